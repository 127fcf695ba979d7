//! Frame multipliers `M_{m,Φ,Ψ} f = Σ m_n ⟨f, ψ_n⟩ φ_n`.
//!
//! An operator is kept both materialized (`T_Φ diag(m) T_Ψ*`) and
//! applicable matrix-free through analysis, scaling and synthesis.

use faer::{c64, Mat, MatRef};

use crate::error::{Error, Result};
use crate::frames::{FiniteFrame, DEFAULT_FRAME_TOL};
use crate::linalg;
use crate::par::{self, ExecPolicy};
use crate::symbol::{SignPattern, Symbol};

#[derive(Clone, Debug)]
pub struct MultiplierOp {
    symbol: Symbol,
    phi: FiniteFrame,
    psi: FiniteFrame,
    matrix: Mat<c64>,
}

/// `‖M‖₂` against `√(B_Φ B_Ψ) ‖m‖_∞`.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct NormBound {
    pub lhs: f64,
    pub rhs: f64,
}

impl NormBound {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs * (1.0 + 1e-12) + f64::MIN_POSITIVE
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SchattenReport {
    pub p: f64,
    /// `Σ m_n ⟨φ_n, ψ_n⟩`
    pub trace: c64,
    /// Sum of the matrix diagonal.
    pub trace_diagonal: c64,
    pub trace_norm: f64,
    pub hs_norm: f64,
    pub p_norm: f64,
    /// `√(B_Φ B_Ψ)`
    pub bessel_factor: f64,
    pub bounds_ok: bool,
}

impl SchattenReport {
    /// Relative disagreement of the two trace computations.
    pub fn trace_discrepancy(&self) -> f64 {
        let scale = self
            .trace
            .norm()
            .max(self.trace_norm)
            .max(f64::MIN_POSITIVE);
        (self.trace - self.trace_diagonal).norm() / scale
    }
}

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct Classification {
    pub injective: bool,
    pub surjective: bool,
    pub invertible: bool,
    pub sigma_min: f64,
    pub sigma_max: f64,
    /// `σ_max / σ_min`, infinite when singular.
    pub condition: f64,
}

impl MultiplierOp {
    pub fn build(symbol: Symbol, phi: FiniteFrame, psi: FiniteFrame) -> Result<Self> {
        if phi.dim() != psi.dim() || phi.count() != psi.count() {
            return Err(Error::shape(
                "multiplier frames",
                format!("{}x{}", phi.dim(), phi.count()),
                format!("{}x{}", psi.dim(), psi.count()),
            ));
        }
        if symbol.len() != phi.count() {
            return Err(Error::shape("multiplier symbol", phi.count(), symbol.len()));
        }
        let matrix = linalg::sandwich_diag(phi.synthesis(), symbol.values(), psi.synthesis());
        Ok(MultiplierOp {
            symbol,
            phi,
            psi,
            matrix,
        })
    }

    /// Frame-type operator: constant symbol `(1)`.
    pub fn frame_type(phi: FiniteFrame, psi: FiniteFrame) -> Result<Self> {
        let m = Symbol::ones(phi.count())?;
        Self::build(m, phi, psi)
    }

    pub fn symbol(&self) -> &Symbol {
        &self.symbol
    }

    pub fn phi(&self) -> &FiniteFrame {
        &self.phi
    }

    pub fn psi(&self) -> &FiniteFrame {
        &self.psi
    }

    pub fn matrix(&self) -> MatRef<'_, c64> {
        self.matrix.as_ref()
    }

    pub fn into_matrix(self) -> Mat<c64> {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.phi.dim()
    }

    /// `T_Φ (m · U_Ψ f)` without touching the materialized matrix.
    pub fn apply(&self, f: &[c64]) -> Result<Vec<c64>> {
        let mut coeffs = self.psi.analysis(f)?;
        for (c, m) in coeffs.iter_mut().zip(self.symbol.values()) {
            *c *= m;
        }
        self.phi.synthesize(&coeffs)
    }

    pub fn apply_many(&self, signals: &[Vec<c64>], policy: ExecPolicy) -> Result<Vec<Vec<c64>>> {
        par::map_slice(policy, signals, |f| self.apply(f))
            .into_iter()
            .collect()
    }

    /// `‖M* − M_{m̄,Ψ,Φ}‖₂ / ‖M‖₂`
    pub fn adjoint_residual(&self) -> Result<f64> {
        let swapped = linalg::sandwich_diag(
            self.psi.synthesis(),
            self.symbol.conj().values(),
            self.phi.synthesis(),
        );
        let adj = self.matrix.adjoint().to_owned();
        let num = linalg::spectral_distance(adj.as_ref(), swapped.as_ref())?;
        let den = linalg::spectral_norm(self.matrix())?;
        Ok(if den > 0.0 { num / den } else { num })
    }

    pub fn norm_bound(&self) -> Result<NormBound> {
        let lhs = linalg::spectral_norm(self.matrix())?;
        let rhs = self.bessel_factor()? * self.symbol.stats().sup_abs;
        Ok(NormBound { lhs, rhs })
    }

    /// `√(B_Φ B_Ψ)`
    pub fn bessel_factor(&self) -> Result<f64> {
        Ok((self.phi.bounds()?.upper * self.psi.bounds()?.upper).sqrt())
    }

    pub fn schatten(&self, p: f64) -> Result<SchattenReport> {
        if !(p >= 1.0) {
            return Err(Error::InvalidArgument(format!("Schatten exponent {p} < 1")));
        }
        let sv = linalg::singular_values(self.matrix())?;
        let trace_norm: f64 = sv.iter().sum();
        let hs_norm = sv.iter().map(|s| s * s).sum::<f64>().sqrt();
        let p_norm = if p.is_infinite() {
            sv.first().copied().unwrap_or(0.0)
        } else {
            sv.iter().map(|s| s.powf(p)).sum::<f64>().powf(1.0 / p)
        };
        let trace_diagonal = (0..self.dim()).fold(c64::ZERO, |acc, i| acc + self.matrix[(i, i)]);
        let (tp, tq) = (self.phi.synthesis(), self.psi.synthesis());
        let trace = self
            .symbol
            .values()
            .iter()
            .enumerate()
            .fold(c64::ZERO, |acc, (n, m)| {
                let ip = (0..self.dim()).fold(c64::ZERO, |s, i| s + tp[(i, n)] * tq[(i, n)].conj());
                acc + m * ip
            });
        let bessel_factor = self.bessel_factor()?;
        let slack = |x: f64| x * (1.0 + 1e-12) + 1e-300;
        let bounds_ok = trace_norm <= slack(bessel_factor * self.symbol.p_norm(1.0))
            && hs_norm <= slack(bessel_factor * self.symbol.p_norm(2.0))
            && p_norm <= slack(bessel_factor * self.symbol.p_norm(p));
        Ok(SchattenReport {
            p,
            trace,
            trace_diagonal,
            trace_norm,
            hs_norm,
            p_norm,
            bessel_factor,
            bounds_ok,
        })
    }

    pub fn classify(&self, tol: f64) -> Result<Classification> {
        classify_matrix(self.matrix(), tol)
    }

    /// For a signed symbol, `‖M_{m,Φ,Φ} ∓ S_{(√|m_n| φ_n)}‖₂ / ‖M‖₂` with the
    /// sign of `m`. Fails for mixed or complex symbols.
    pub fn weighted_frame_residual(symbol: &Symbol, phi: &FiniteFrame) -> Result<f64> {
        let sign = symbol.stats().sign.sign().ok_or_else(|| {
            Error::InvalidArgument("weighted-frame identity needs a signed real symbol".into())
        })?;
        let op = MultiplierOp::build(symbol.clone(), phi.clone(), phi.clone())?;
        let s = phi.weighted(&symbol.abs())?.frame_operator();
        let signed = linalg::scale(s.as_ref(), c64::new(sign, 0.0));
        let num = linalg::spectral_distance(op.matrix(), signed.as_ref())?;
        let den = linalg::spectral_norm(op.matrix())?;
        Ok(if den > 0.0 { num / den } else { num })
    }
}

/// Rank classification of a square matrix from its singular values. In
/// finite dimension injective, surjective and invertible coincide.
pub fn classify_matrix(m: MatRef<'_, c64>, tol: f64) -> Result<Classification> {
    if m.nrows() != m.ncols() {
        return Err(Error::shape(
            "classify",
            "square matrix",
            format!("{}x{}", m.nrows(), m.ncols()),
        ));
    }
    let sv = linalg::singular_values(m)?;
    let sigma_max = sv.first().copied().unwrap_or(0.0);
    let sigma_min = sv.last().copied().unwrap_or(0.0);
    let invertible = sigma_max > 0.0 && sigma_min > tol * sigma_max;
    let condition = if invertible {
        sigma_max / sigma_min
    } else {
        f64::INFINITY
    };
    Ok(Classification {
        injective: invertible,
        surjective: invertible,
        invertible,
        sigma_min,
        sigma_max,
        condition,
    })
}

/// One random `(m, Φ, Ψ)` instance run through every multiplier identity.
#[derive(Clone, Debug)]
pub struct IdentityCheck {
    pub adjoint_residual: f64,
    pub norm_bound: NormBound,
    pub schatten: Vec<SchattenReport>,
    /// Present when the symbol is signed real.
    pub weighted_frame_residual: Option<f64>,
}

impl IdentityCheck {
    pub fn run(op: &MultiplierOp, exponents: &[f64]) -> Result<Self> {
        let schatten = exponents
            .iter()
            .map(|&p| op.schatten(p))
            .collect::<Result<Vec<_>>>()?;
        let weighted_frame_residual = match op.symbol().stats().sign {
            SignPattern::Mixed => None,
            _ => Some(MultiplierOp::weighted_frame_residual(
                op.symbol(),
                op.phi(),
            )?),
        };
        Ok(IdentityCheck {
            adjoint_residual: op.adjoint_residual()?,
            norm_bound: op.norm_bound()?,
            schatten,
            weighted_frame_residual,
        })
    }
}

/// Runs [`IdentityCheck::run`] over many operators.
pub fn check_identities_batch(
    ops: &[MultiplierOp],
    exponents: &[f64],
    policy: ExecPolicy,
) -> Result<Vec<IdentityCheck>> {
    par::map_slice(policy, ops, |op| IdentityCheck::run(op, exponents))
        .into_iter()
        .collect()
}

/// Default tolerance for [`MultiplierOp::classify`].
pub const DEFAULT_CLASSIFY_TOL: f64 = DEFAULT_FRAME_TOL;
