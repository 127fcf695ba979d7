//! Dual frames induced by an invertible multiplier.
//!
//! For invertible `M = M_{m,Φ,Ψ}` with zero-free `m`,
//! `Ψ† = (M^{-1}(m_n φ_n))` is a dual of `Ψ`, `Φ† = ((M^{-1})*(m̄_n ψ_n))`
//! is a dual of `Φ`, and `M^{-1} = M_{1/m,Ψ†,Φ^d}` for every dual `Φ^d`
//! of `Φ`.

use faer::{c64, Mat, MatRef};

use crate::error::{Error, Result};
use crate::frames::FiniteFrame;
use crate::linalg;
use crate::multiplier::MultiplierOp;
use crate::symbol::Symbol;

/// Tolerance for the coincidence `Ψ† = Ψ̃`.
pub const COINCIDENCE_TOL: f64 = 1e-8;

/// Tolerance for the duality and representation identities.
pub const DUALITY_TOL: f64 = 1e-9;

fn require_inverse_shape(m_inv: MatRef<'_, c64>, d: usize) -> Result<()> {
    if m_inv.nrows() != d || m_inv.ncols() != d {
        return Err(Error::shape(
            "multiplier inverse",
            format!("{d}x{d}"),
            format!("{}x{}", m_inv.nrows(), m_inv.ncols()),
        ));
    }
    Ok(())
}

fn require_zero_free(m: &Symbol, count: usize) -> Result<()> {
    if m.len() != count {
        return Err(Error::shape("symbol", count, m.len()));
    }
    match m.first_zero() {
        Some(index) => Err(Error::ZeroSymbol { index }),
        None => Ok(()),
    }
}

/// `Ψ† = (M^{-1}(m_n φ_n))`
pub fn psi_dagger(m_inv: MatRef<'_, c64>, m: &Symbol, phi: &FiniteFrame) -> Result<FiniteFrame> {
    require_inverse_shape(m_inv, phi.dim())?;
    require_zero_free(m, phi.count())?;
    let scaled = phi.scaled_columns(m.values())?;
    FiniteFrame::new(linalg::matmul(m_inv, scaled.synthesis()))
}

/// `Φ† = ((M^{-1})*(m̄_n ψ_n))`
pub fn phi_dagger(m_inv: MatRef<'_, c64>, m: &Symbol, psi: &FiniteFrame) -> Result<FiniteFrame> {
    require_inverse_shape(m_inv, psi.dim())?;
    require_zero_free(m, psi.count())?;
    let scaled = psi.scaled_columns(m.conj().values())?;
    FiniteFrame::new(linalg::matmul(
        m_inv.adjoint().to_owned().as_ref(),
        scaled.synthesis(),
    ))
}

#[derive(Clone, Debug)]
pub struct DualPair {
    pub psi_dagger: FiniteFrame,
    pub phi_dagger: FiniteFrame,
    /// `‖T_{Ψ†} U_Ψ − I‖₂`
    pub psi_defect: f64,
    /// `‖T_{Φ†} U_Φ − I‖₂`
    pub phi_defect: f64,
}

impl DualPair {
    pub fn holds(&self, tol: f64) -> bool {
        self.psi_defect <= tol && self.phi_defect <= tol
    }
}

/// Both induced duals with their duality defects.
pub fn dual_pair(
    m_inv: MatRef<'_, c64>,
    m: &Symbol,
    phi: &FiniteFrame,
    psi: &FiniteFrame,
) -> Result<DualPair> {
    let pd = psi_dagger(m_inv, m, phi)?;
    let fd = phi_dagger(m_inv, m, psi)?;
    Ok(DualPair {
        psi_defect: psi.dual_defect(&pd)?,
        phi_defect: phi.dual_defect(&fd)?,
        psi_dagger: pd,
        phi_dagger: fd,
    })
}

/// Result of testing `M^{-1} = M_{1/m,Ψ†,Φ^d}` for one candidate `Φ^d`.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct CandidateCheck {
    /// `‖T_{Φ^d} U_Φ − I‖₂`
    pub dual_defect: f64,
    /// `‖M^{-1} − M_{1/m,Ψ†,Φ^d}‖₂ / ‖M^{-1}‖₂`
    pub residual: f64,
    /// Candidate is a dual and the representation holds, both within `tol`.
    pub accepted: bool,
}

/// Checks the reciprocal-symbol representation of `M^{-1}` for each
/// candidate. A candidate that is not a dual of `Φ` is reported with
/// `accepted = false` rather than as an error.
pub fn verify_inverse_representation(
    m_inv: MatRef<'_, c64>,
    m: &Symbol,
    psi_dagger: &FiniteFrame,
    phi: &FiniteFrame,
    candidates: &[FiniteFrame],
    tol: f64,
) -> Result<Vec<CandidateCheck>> {
    require_inverse_shape(m_inv, phi.dim())?;
    let recip = m.reciprocal()?;
    let norm = linalg::spectral_norm(m_inv)?;
    candidates
        .iter()
        .map(|cand| {
            let dual_defect = phi.dual_defect(cand)?;
            let op = MultiplierOp::build(recip.clone(), psi_dagger.clone(), cand.clone())?;
            let residual = linalg::spectral_distance(m_inv, op.matrix())? / norm;
            Ok(CandidateCheck {
                dual_defect,
                residual,
                accepted: dual_defect <= tol && residual <= tol,
            })
        })
        .collect()
}

/// Recovers `X` from `M^{-1} = M_{1/m,X,Φ^d_j}` for all given duals at
/// once, by linear least squares. With enough duals the stacked system has
/// full rank and `X = Ψ†`.
pub fn recover_psi_dagger(
    m_inv: MatRef<'_, c64>,
    m: &Symbol,
    duals: &[FiniteFrame],
) -> Result<FiniteFrame> {
    let first = duals
        .first()
        .ok_or_else(|| Error::InvalidArgument("at least one dual is required".into()))?;
    let (d, n) = (first.dim(), first.count());
    require_inverse_shape(m_inv, d)?;
    let recip = m.reciprocal()?;
    if recip.len() != n {
        return Err(Error::shape("symbol", n, recip.len()));
    }
    // X · diag(1/m) · T_j* = M^{-1}  ⇔  (T_j diag(1/m̄)) X* = (M^{-1})*
    let k = duals.len();
    let mut a = Mat::<c64>::zeros(k * d, n);
    let mut b = Mat::<c64>::zeros(k * d, d);
    for (j, dual) in duals.iter().enumerate() {
        if dual.dim() != d || dual.count() != n {
            return Err(Error::shape(
                "stacked duals",
                format!("{d}x{n}"),
                format!("{}x{}", dual.dim(), dual.count()),
            ));
        }
        let t = dual.synthesis();
        for r in 0..d {
            for c in 0..n {
                a[(j * d + r, c)] = t[(r, c)] * recip.values()[c].conj();
            }
            for c in 0..d {
                b[(j * d + r, c)] = m_inv[(c, r)].conj();
            }
        }
    }
    let x_adj = linalg::lstsq(a.as_ref(), b.as_ref())?;
    FiniteFrame::new(x_adj.adjoint().to_owned())
}

/// Outcome of the canonical-dual coincidence tests.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct Coincidence {
    /// `Ψ` equivalent to `mΦ`.
    pub psi_case: bool,
    /// `Φ` equivalent to `m̄Ψ`.
    pub phi_case: bool,
    /// `‖T_{Ψ†} − T_{Ψ̃}‖₂`
    pub psi_distance: f64,
    /// `‖T_{Φ†} − T_{Φ̃}‖₂`
    pub phi_distance: f64,
}

impl Coincidence {
    /// Whether each equivalence verdict agrees with the direct distance test.
    pub fn consistent(&self) -> bool {
        self.psi_case == (self.psi_distance <= COINCIDENCE_TOL)
            && self.phi_case == (self.phi_distance <= COINCIDENCE_TOL)
    }
}

/// Tests `Ψ ~ mΦ` and `Φ ~ m̄Ψ` by kernel projections and compares with
/// the direct distances of the induced duals to the canonical duals.
pub fn canonical_coincidence(
    m_inv: MatRef<'_, c64>,
    m: &Symbol,
    phi: &FiniteFrame,
    psi: &FiniteFrame,
) -> Result<Coincidence> {
    let pair = dual_pair(m_inv, m, phi, psi)?;
    let m_phi = phi.scaled_columns(m.values())?;
    let mbar_psi = psi.scaled_columns(m.conj().values())?;
    let psi_case = psi.is_equivalent_to(&m_phi, COINCIDENCE_TOL)?;
    let phi_case = phi.is_equivalent_to(&mbar_psi, COINCIDENCE_TOL)?;
    let psi_distance = linalg::spectral_distance(
        pair.psi_dagger.synthesis(),
        psi.canonical_dual()?.synthesis(),
    )?;
    let phi_distance = linalg::spectral_distance(
        pair.phi_dagger.synthesis(),
        phi.canonical_dual()?.synthesis(),
    )?;
    Ok(Coincidence {
        psi_case,
        phi_case,
        psi_distance,
        phi_distance,
    })
}

/// `‖M^{-1} − M_{1/m,Ψ̃,Φ̃}‖₂ / ‖M^{-1}‖₂` for bases `Φ`, `Ψ` of `C^d`.
pub fn riesz_inverse_formula(m: &Symbol, phi: &FiniteFrame, psi: &FiniteFrame) -> Result<f64> {
    for f in [phi, psi] {
        if f.count() != f.dim() {
            return Err(Error::InvalidArgument(format!(
                "Riesz formula needs bases, got {} vectors in dimension {}",
                f.count(),
                f.dim()
            )));
        }
        f.require_frame()?;
    }
    let recip = m.reciprocal()?;
    let op = MultiplierOp::build(m.clone(), phi.clone(), psi.clone())?;
    let inv = crate::inversion::direct_invert(op.matrix())?;
    let rhs = MultiplierOp::build(recip, psi.canonical_dual()?, phi.canonical_dual()?)?;
    Ok(linalg::spectral_distance(inv.as_ref(), rhs.matrix())?
        / linalg::spectral_norm(inv.as_ref())?)
}

/// The four statements linked for a constant symbol `m = (c)`:
/// `Ψ ~ Φ`; `M^{-1} = M_{(1/c),Ψ̃,Φ̃}`; `Ψ† = Ψ̃`; `Φ† = Φ̃`.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct ConstantChain {
    pub equivalent: bool,
    pub invertible: bool,
    /// `‖M^{-1} − M_{(1/c),Ψ̃,Φ̃}‖₂ / ‖M^{-1}‖₂`
    pub formula_residual: f64,
    /// `‖T_{Ψ†} − T_{Ψ̃}‖₂`
    pub psi_distance: f64,
    /// `‖T_{Φ†} − T_{Φ̃}‖₂`
    pub phi_distance: f64,
}

impl ConstantChain {
    /// Verdicts of the four statements at tolerance `tol`.
    pub fn verdicts(&self, tol: f64) -> [bool; 4] {
        [
            self.equivalent,
            self.invertible && self.formula_residual <= tol,
            self.invertible && self.psi_distance <= tol,
            self.invertible && self.phi_distance <= tol,
        ]
    }

    /// Whether the four statements are all true or all false.
    pub fn consistent(&self, tol: f64) -> bool {
        let v = self.verdicts(tol);
        v.iter().all(|&x| x) || v.iter().all(|&x| !x)
    }
}

/// Evaluates the constant-symbol chain for `M_{(c),Φ,Ψ}`. A singular
/// multiplier yields `invertible = false` with infinite distances.
pub fn constant_symbol_chain(
    c: c64,
    phi: &FiniteFrame,
    psi: &FiniteFrame,
) -> Result<ConstantChain> {
    if c == c64::ZERO {
        return Err(Error::ZeroSymbol { index: 0 });
    }
    let m = Symbol::constant(phi.count(), c)?;
    let equivalent = psi.is_equivalent_to(phi, COINCIDENCE_TOL)?;
    let op = MultiplierOp::build(m.clone(), phi.clone(), psi.clone())?;
    let inv = match crate::inversion::direct_invert(op.matrix()) {
        Ok(inv) => inv,
        Err(Error::Singular { .. }) => {
            return Ok(ConstantChain {
                equivalent,
                invertible: false,
                formula_residual: f64::INFINITY,
                psi_distance: f64::INFINITY,
                phi_distance: f64::INFINITY,
            })
        }
        Err(e) => return Err(e),
    };
    let (psi_can, phi_can) = (psi.canonical_dual()?, phi.canonical_dual()?);
    let rhs = MultiplierOp::build(m.reciprocal()?, psi_can.clone(), phi_can.clone())?;
    let formula_residual = linalg::spectral_distance(inv.as_ref(), rhs.matrix())?
        / linalg::spectral_norm(inv.as_ref())?;
    let pair = dual_pair(inv.as_ref(), &m, phi, psi)?;
    Ok(ConstantChain {
        equivalent,
        invertible: true,
        formula_residual,
        psi_distance: linalg::spectral_distance(pair.psi_dagger.synthesis(), psi_can.synthesis())?,
        phi_distance: linalg::spectral_distance(pair.phi_dagger.synthesis(), phi_can.synthesis())?,
    })
}
