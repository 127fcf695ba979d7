//! Neumann-type inversion of frame multipliers with a-priori iteration
//! counts and per-iteration error bounds, plus a direct-solve oracle.
//!
//! Every iterative routine evaluates a partial sum
//! `X_n = Σ_{k=0}^{n} P^k X_0` by the recursion `Q ← P·Q`, `X ← X + Q`.
//! The error `‖M^{-1} − X_n‖₂` is bounded by `ratio^{n+1} · scale`, with
//! method-specific constants. When an oracle inverse is supplied, the
//! absolute spectral-norm error of every partial sum is recorded next to
//! its bound.

use std::fmt;
use std::str::FromStr;

use faer::{c64, Mat, MatRef};

use crate::error::{Error, Result};
use crate::frames::{gaussian_matrix, FiniteFrame, FrameBounds};
use crate::linalg;
use crate::multiplier::{classify_matrix, MultiplierOp, DEFAULT_CLASSIFY_TOL};
use crate::par::{self, ExecPolicy};
use crate::symbol::{SignPattern, Symbol};

/// Number of random probes used for the norm sandwich checks.
pub const SANDWICH_PROBES: usize = 20;
const SANDWICH_SEED: u64 = 0x5a4d_5749_4348;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Weighted,
    WeightedApply,
    TwoStage,
    Neumann,
    Direct,
    Transformed,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Weighted => "weighted",
            Method::WeightedApply => "weighted_apply",
            Method::TwoStage => "two_stage",
            Method::Neumann => "neumann",
            Method::Direct => "direct",
            Method::Transformed => "transformed",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Accepts the names above plus the short forms `prop8`, `prop9`, `prop11`.
impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "weighted" | "prop8" => Method::Weighted,
            "weighted_apply" => Method::WeightedApply,
            "two_stage" | "prop9" => Method::TwoStage,
            "neumann" | "prop11" => Method::Neumann,
            "direct" => Method::Direct,
            "transformed" => Method::Transformed,
            _ => return Err(Error::InvalidArgument(format!("unknown method `{s}`"))),
        })
    }
}

/// Constants entering a method's condition and bounds. Unused ones stay
/// `None`.
#[derive(Copy, Clone, Debug, Default, PartialEq)]
pub struct Constants {
    pub a_phi: Option<f64>,
    pub b_phi: Option<f64>,
    pub b_psi: Option<f64>,
    /// `min |m_n|`
    pub a: Option<f64>,
    /// `max |m_n|`
    pub b: Option<f64>,
    /// `max |m_n − 1|`
    pub lambda: Option<f64>,
    pub mu: Option<f64>,
    pub epsilon: Option<f64>,
}

impl fmt::Display for Constants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fields = [
            ("A_phi", self.a_phi),
            ("B_phi", self.b_phi),
            ("B_psi", self.b_psi),
            ("a", self.a),
            ("b", self.b),
            ("lambda", self.lambda),
            ("mu", self.mu),
            ("epsilon", self.epsilon),
        ];
        let mut first = true;
        for (name, v) in fields {
            if let Some(v) = v {
                if !first {
                    f.write_str(" ")?;
                }
                write!(f, "{name}={v:.16e}")?;
                first = false;
            }
        }
        Ok(())
    }
}

/// Outcome of checking `lower‖h‖ ≤ ‖M^{-1}h‖ ≤ upper‖h‖` on random `h`.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct Sandwich {
    pub lower: f64,
    pub upper: f64,
    /// Smallest and largest observed `‖M^{-1}h‖/‖h‖`.
    pub observed_min: f64,
    pub observed_max: f64,
    pub probes: usize,
}

impl Sandwich {
    pub fn holds(&self) -> bool {
        let slack = 1e-10;
        self.observed_min >= self.lower * (1.0 - slack)
            && self.observed_max <= self.upper * (1.0 + slack)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InversionReport {
    pub method: Method,
    /// Stage number for two-stage methods (two_stage: 1 and 2).
    pub stage: Option<u8>,
    pub constants: Constants,
    pub ratio: f64,
    pub scale: f64,
    pub tolerance: f64,
    pub n_planned: usize,
    /// `bounds[k] = ratio^{k+1} · scale`, `k = 0..=n_planned`.
    pub bounds: Vec<f64>,
    /// Measured `‖X_k − oracle‖₂`; empty without an oracle.
    pub residuals: Vec<f64>,
    /// Spectral norm of the oracle, when one was supplied.
    pub oracle_norm: Option<f64>,
    pub converged: bool,
    pub sandwich: Option<Sandwich>,
}

impl InversionReport {
    fn planned(
        method: Method,
        constants: Constants,
        ratio: f64,
        scale: f64,
        e: f64,
    ) -> Result<Self> {
        let n = plan_iterations(ratio, scale, e)?;
        let bounds = (0..=n)
            .map(|k| bound_at(ratio, scale, k))
            .collect::<Vec<_>>();
        let converged = bounds.last().is_some_and(|&b| b <= e);
        Ok(InversionReport {
            method,
            stage: None,
            constants,
            ratio,
            scale,
            tolerance: e,
            n_planned: n,
            bounds,
            residuals: Vec::new(),
            oracle_norm: None,
            converged,
            sandwich: None,
        })
    }

    pub fn final_bound(&self) -> f64 {
        self.bounds.last().copied().unwrap_or(0.0)
    }

    pub fn final_residual(&self) -> Option<f64> {
        self.residuals.last().copied()
    }

    /// Measured residuals relative to the oracle norm.
    pub fn relative_residuals(&self) -> Vec<f64> {
        match self.oracle_norm {
            Some(n) if n > 0.0 => self.residuals.iter().map(|r| r / n).collect(),
            _ => self.residuals.clone(),
        }
    }

    /// Indices `k` with `residual(k) > bound(k)·(1 + rel) + abs`.
    pub fn dominance_violations(&self, rel: f64, abs: f64) -> Vec<usize> {
        self.residuals
            .iter()
            .zip(&self.bounds)
            .enumerate()
            .filter(|(_, (r, b))| **r > **b * (1.0 + rel) + abs)
            .map(|(k, _)| k)
            .collect()
    }

    /// Header line naming the method and its constants.
    pub fn header(&self) -> String {
        let mut h = format!("method={}", self.method);
        if let Some(s) = self.stage {
            h.push_str(&format!(" stage={s}"));
        }
        let c = self.constants.to_string();
        if !c.is_empty() {
            h.push(' ');
            h.push_str(&c);
        }
        h.push_str(&format!(
            " ratio={:.16e} scale={:.16e} e={:.16e} n={}",
            self.ratio, self.scale, self.tolerance, self.n_planned
        ));
        h
    }
}

fn bound_at(ratio: f64, scale: f64, k: usize) -> f64 {
    ratio.powi(k as i32 + 1) * scale
}

/// Smallest `n ≥ 0` with `ratio^{n+1} · scale ≤ e`.
pub fn plan_iterations(ratio: f64, scale: f64, e: f64) -> Result<usize> {
    if !(0.0..1.0).contains(&ratio) {
        return Err(Error::ConditionViolated {
            method: "plan_iterations",
            detail: format!("series ratio {ratio:e} is not in [0, 1)"),
        });
    }
    if !(scale > 0.0 && scale.is_finite()) || !(e > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "iteration plan needs scale > 0 and e > 0, got scale={scale:e}, e={e:e}"
        )));
    }
    if ratio == 0.0 || ratio * scale <= e {
        return Ok(0);
    }
    // closed form, then corrected against the exact test
    let est = ((e / scale).ln() / ratio.ln() - 1.0).ceil().max(0.0) as usize;
    let mut n = est.saturating_sub(2);
    while bound_at(ratio, scale, n) > e {
        n += 1;
    }
    Ok(n)
}

/// Optimal `μ` in `Σ |⟨h, ψ_n − φ_n⟩|² ≤ μ‖h‖²`: the largest eigenvalue
/// of the frame operator of `(ψ_n − φ_n)`.
pub fn mu_perturbation(phi: &FiniteFrame, psi: &FiniteFrame) -> Result<f64> {
    let diff = difference(phi, psi)?;
    let ev =
        linalg::hermitian_eigenvalues(linalg::matmul_adj(diff.as_ref(), diff.as_ref()).as_ref())?;
    Ok(ev.last().copied().unwrap_or(0.0).max(0.0))
}

/// Lower bound on `μ` from `probes` random unit vectors `h`, each seeded
/// from `seed` and its index so the result is independent of `policy`.
pub fn mu_probe_lower_bound(
    phi: &FiniteFrame,
    psi: &FiniteFrame,
    probes: usize,
    seed: u64,
    policy: ExecPolicy,
) -> Result<f64> {
    let diff = difference(phi, psi)?;
    let d = diff.nrows();
    let vals = par::map_indexed(policy, probes, |i| {
        let h = linalg::column(
            gaussian_matrix(d, 1, seed.wrapping_add(i as u64)).as_ref(),
            0,
        );
        let nh = linalg::vec_norm(&h);
        let c = linalg::adj_mat_vec(diff.as_ref(), &h);
        let e = linalg::vec_norm(&c);
        (e / nh).powi(2)
    });
    Ok(vals.into_iter().fold(0.0, f64::max))
}

fn difference(phi: &FiniteFrame, psi: &FiniteFrame) -> Result<Mat<c64>> {
    if phi.dim() != psi.dim() || phi.count() != psi.count() {
        return Err(Error::shape(
            "perturbation frames",
            format!("{}x{}", phi.dim(), phi.count()),
            format!("{}x{}", psi.dim(), psi.count()),
        ));
    }
    Ok(psi.synthesis() - phi.synthesis())
}

/// Solves `M X = I` by pivoted LU after rejecting numerically singular
/// `M` by its singular values.
pub fn direct_invert(m: MatRef<'_, c64>) -> Result<Mat<c64>> {
    let cl = classify_matrix(m, DEFAULT_CLASSIFY_TOL)?;
    if !cl.invertible {
        return Err(Error::Singular {
            sigma_min: cl.sigma_min,
            sigma_max: cl.sigma_max,
        });
    }
    Ok(linalg::lu_solve(m, linalg::identity(m.nrows()).as_ref()))
}

/// `Σ_{k=0}^{n} P^k X_0`, recording `‖X_k − oracle‖₂` per step.
fn accumulate(
    p: MatRef<'_, c64>,
    x0: MatRef<'_, c64>,
    n: usize,
    oracle: Option<MatRef<'_, c64>>,
) -> Result<(Mat<c64>, Vec<f64>)> {
    let mut q = x0.to_owned();
    let mut acc = x0.to_owned();
    let mut residuals = Vec::new();
    if let Some(o) = oracle {
        residuals.push(linalg::spectral_distance(acc.as_ref(), o)?);
    }
    for _ in 0..n {
        q = linalg::matmul(p, q.as_ref());
        acc += &q;
        if let Some(o) = oracle {
            residuals.push(linalg::spectral_distance(acc.as_ref(), o)?);
        }
    }
    Ok((acc, residuals))
}

fn check_oracle(oracle: Option<MatRef<'_, c64>>, d: usize) -> Result<Option<f64>> {
    match oracle {
        None => Ok(None),
        Some(o) if o.nrows() == d && o.ncols() == d => Ok(Some(linalg::spectral_norm(o)?)),
        Some(o) => Err(Error::shape(
            "oracle inverse",
            format!("{d}x{d}"),
            format!("{}x{}", o.nrows(), o.ncols()),
        )),
    }
}

fn sandwich(inverse: MatRef<'_, c64>, lower: f64, upper: f64) -> Sandwich {
    let d = inverse.nrows();
    let h = gaussian_matrix(d, SANDWICH_PROBES, SANDWICH_SEED);
    let img = linalg::matmul(inverse, h.as_ref());
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for j in 0..SANDWICH_PROBES {
        let r = linalg::vec_norm(&linalg::column(img.as_ref(), j))
            / linalg::vec_norm(&linalg::column(h.as_ref(), j));
        lo = lo.min(r);
        hi = hi.max(r);
    }
    Sandwich {
        lower,
        upper,
        observed_min: lo,
        observed_max: hi,
        probes: SANDWICH_PROBES,
    }
}

/// Work shared by every inversion of `M_{m,Φ,·}` for fixed `Φ` and signed
/// real `m`: the weighted frame operator `S_w = S_{(√|m_n| φ_n)}` and its
/// inverse.
#[derive(Clone, Debug)]
pub struct WeightedPrecompute {
    phi: FiniteFrame,
    symbol: Symbol,
    s_w: Mat<c64>,
    s_w_inv: Mat<c64>,
    sign: f64,
    a: f64,
    b: f64,
    frame_bounds: FrameBounds,
}

impl WeightedPrecompute {
    pub fn s_w(&self) -> MatRef<'_, c64> {
        self.s_w.as_ref()
    }

    pub fn s_w_inv(&self) -> MatRef<'_, c64> {
        self.s_w_inv.as_ref()
    }

    pub fn sign(&self) -> f64 {
        self.sign
    }

    pub fn symbol_bounds(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn frame_bounds(&self) -> FrameBounds {
        self.frame_bounds
    }

    pub fn phi(&self) -> &FiniteFrame {
        &self.phi
    }

    pub fn symbol(&self) -> &Symbol {
        &self.symbol
    }

    /// `‖S_w S_w^{-1} − I‖₂`
    pub fn inverse_residual(&self) -> Result<f64> {
        let p = linalg::matmul(self.s_w.as_ref(), self.s_w_inv.as_ref());
        linalg::spectral_distance(p.as_ref(), linalg::identity(p.nrows()).as_ref())
    }

    /// `μ < a²A²/(b²B)`
    pub fn mu_threshold(&self) -> f64 {
        let (a, b) = (self.a, self.b);
        let FrameBounds { lower, upper } = self.frame_bounds;
        a * a * lower * lower / (b * b * upper)
    }

    fn constants(&self, mu: f64) -> Constants {
        Constants {
            a_phi: Some(self.frame_bounds.lower),
            b_phi: Some(self.frame_bounds.upper),
            a: Some(self.a),
            b: Some(self.b),
            mu: Some(mu),
            ..Constants::default()
        }
    }

    /// Checks the condition for `Ψ` and returns `(μ, ratio, scale, sandwich lower, upper)`.
    fn admit(&self, psi: &FiniteFrame) -> Result<(f64, f64, f64, f64, f64)> {
        let mu = mu_perturbation(&self.phi, psi)?;
        let threshold = self.mu_threshold();
        if !(mu < threshold) {
            return Err(Error::ConditionViolated {
                method: "weighted",
                detail: format!(
                    "mu = {mu:e} is not below a^2 A^2 / (b^2 B) = {threshold:e} ({})",
                    self.constants(mu)
                ),
            });
        }
        let FrameBounds { lower, upper } = self.frame_bounds;
        let pert = self.b * (mu * upper).sqrt();
        let aa = self.a * lower;
        let ratio = pert / aa;
        let scale = 1.0 / (aa - pert);
        Ok((mu, ratio, scale, 1.0 / (self.b * upper + pert), scale))
    }

    /// `M_{|m|,Φ,Ψ}`; the sign of `m` is applied outside the series.
    fn positive_multiplier(&self, psi: &FiniteFrame) -> Result<MultiplierOp> {
        let abs = Symbol::from_real(&self.symbol.abs())?;
        MultiplierOp::build(abs, self.phi.clone(), psi.clone())
    }
}

pub fn weighted_precompute(phi: &FiniteFrame, m: &Symbol) -> Result<WeightedPrecompute> {
    if m.len() != phi.count() {
        return Err(Error::shape("weighted symbol", phi.count(), m.len()));
    }
    if let Some(index) = m.first_zero() {
        return Err(Error::ZeroSymbol { index });
    }
    let stats = m.stats();
    let sign = stats.sign.sign().ok_or_else(|| Error::ConditionViolated {
        method: "weighted",
        detail: "symbol must be all positive real or all negative real".into(),
    })?;
    let frame_bounds = phi.require_frame()?;
    let s_w = phi.weighted(&m.abs())?.frame_operator();
    let s_w_inv = direct_invert(s_w.as_ref())?;
    Ok(WeightedPrecompute {
        phi: phi.clone(),
        symbol: m.clone(),
        s_w,
        s_w_inv,
        sign,
        a: stats.inf_abs,
        b: stats.sup_abs,
        frame_bounds,
    })
}

fn signed(m: MatRef<'_, c64>, sign: f64) -> Mat<c64> {
    linalg::scale(m, c64::new(sign, 0.0))
}

/// Inverse of `M_{m,Φ,Ψ}` by the weighted-frame-operator series.
pub fn weighted_invert(
    pre: &WeightedPrecompute,
    psi: &FiniteFrame,
    e: f64,
    oracle: Option<MatRef<'_, c64>>,
) -> Result<(Mat<c64>, InversionReport)> {
    let d = pre.phi.dim();
    let oracle_norm = check_oracle(oracle, d)?;
    let (mu, ratio, scale, lo, hi) = pre.admit(psi)?;
    let mut report =
        InversionReport::planned(Method::Weighted, pre.constants(mu), ratio, scale, e)?;
    let m_pos = pre.positive_multiplier(psi)?;
    let diff = &pre.s_w - m_pos.matrix();
    let p = linalg::matmul(pre.s_w_inv.as_ref(), diff.as_ref());
    // the series runs on M_{|m|}; compare against sign · oracle
    let signed_oracle = oracle.map(|o| signed(o, pre.sign));
    let (acc, residuals) = accumulate(
        p.as_ref(),
        pre.s_w_inv.as_ref(),
        report.n_planned,
        signed_oracle.as_ref().map(|o| o.as_ref()),
    )?;
    let inverse = signed(acc.as_ref(), pre.sign);
    report.residuals = residuals;
    report.oracle_norm = oracle_norm;
    report.sandwich = Some(sandwich(inverse.as_ref(), lo, hi));
    Ok((inverse, report))
}

/// `M_{m,Φ,Ψ}^{-1} f` by iterating on vectors; `P` is never formed.
pub fn weighted_apply(
    pre: &WeightedPrecompute,
    psi: &FiniteFrame,
    f: &[c64],
    e: f64,
    oracle: Option<&[c64]>,
) -> Result<(Vec<c64>, InversionReport)> {
    let d = pre.phi.dim();
    if f.len() != d {
        return Err(Error::shape("weighted_apply input", d, f.len()));
    }
    if let Some(o) = oracle {
        if o.len() != d {
            return Err(Error::shape("weighted_apply oracle", d, o.len()));
        }
    }
    let (mu, ratio, scale, _, _) = pre.admit(psi)?;
    let mut report =
        InversionReport::planned(Method::WeightedApply, pre.constants(mu), ratio, scale, e)?;
    let m_pos = pre.positive_multiplier(psi)?;
    let signed_oracle: Option<Vec<c64>> = oracle.map(|o| o.iter().map(|z| z * pre.sign).collect());
    let mut q = linalg::mat_vec(pre.s_w_inv.as_ref(), f);
    let mut out = q.clone();
    let mut residuals = Vec::new();
    let mut record = |out: &[c64]| {
        if let Some(o) = &signed_oracle {
            residuals.push(linalg::vec_distance(out, o));
        }
    };
    record(&out);
    for _ in 0..report.n_planned {
        let sq = linalg::mat_vec(pre.s_w.as_ref(), &q);
        let mq = m_pos.apply(&q)?;
        let r: Vec<c64> = sq.iter().zip(&mq).map(|(x, y)| x - y).collect();
        q = linalg::mat_vec(pre.s_w_inv.as_ref(), &r);
        for (o, qi) in out.iter_mut().zip(&q) {
            *o += qi;
        }
        record(&out);
    }
    report.residuals = residuals;
    report.oracle_norm = signed_oracle.as_ref().map(|o| linalg::vec_norm(o));
    Ok((out.iter().map(|z| z * pre.sign).collect(), report))
}

/// Oracles for the two stages of [`two_stage_invert`].
#[derive(Copy, Clone, Debug, Default)]
pub struct TwoStageOracles<'a> {
    /// `M_{m,Φ,Φ}^{-1}`
    pub stage1: Option<MatRef<'a, c64>>,
    /// `M_{m,Φ,Ψ}^{-1}`
    pub stage2: Option<MatRef<'a, c64>>,
}

#[derive(Clone, Debug)]
pub struct TwoStageOutput {
    /// Approximation of `M_{m,Φ,Φ}^{-1}`.
    pub inverse_phiphi: Mat<c64>,
    /// Approximation of `M_{m,Φ,Ψ}^{-1}`.
    pub inverse: Mat<c64>,
    pub stage1: InversionReport,
    pub stage2: InversionReport,
}

/// Stage-1 tolerance relative to the requested `e`.
pub const TWO_STAGE_INNER_FACTOR: f64 = 1e-3;

/// Two-stage inversion for complex symbols close to 1: first
/// `M_{m,Φ,Φ}^{-1}` from `S_Φ^{-1}`, then `M^{-1}` from it. Stage 1 is
/// run to `e · TWO_STAGE_INNER_FACTOR`.
pub fn two_stage_invert(
    phi: &FiniteFrame,
    m: &Symbol,
    psi: &FiniteFrame,
    e: f64,
    oracles: TwoStageOracles<'_>,
) -> Result<TwoStageOutput> {
    let d = phi.dim();
    let norm2 = check_oracle(oracles.stage2, d)?;
    if psi.dim() != d || psi.count() != phi.count() {
        return Err(Error::shape(
            "two_stage frames",
            format!("{}x{}", d, phi.count()),
            format!("{}x{}", psi.dim(), psi.count()),
        ));
    }
    let (inverse_phiphi, m_phiphi, stage1) =
        two_stage_inner(phi, m, e * TWO_STAGE_INNER_FACTOR, oracles.stage1)?;
    let lower = stage1.constants.a_phi.unwrap_or(0.0);
    let upper = stage1.constants.b_phi.unwrap_or(0.0);
    let lambda = stage1.constants.lambda.unwrap_or(0.0);

    let mu = mu_perturbation(phi, psi)?;
    let gap = lower - lambda * upper;
    let threshold = gap * gap / ((lambda + 1.0).powi(2) * upper);
    let constants = Constants {
        mu: Some(mu),
        ..stage1.constants
    };
    if !(mu < threshold) {
        return Err(Error::ConditionViolated {
            method: "two_stage stage 2",
            detail: format!(
                "mu = {mu:e} is not below (A - lambda B)^2 / ((lambda + 1)^2 B) = {threshold:e} ({constants})"
            ),
        });
    }
    let pert = (lambda + 1.0) * (mu * upper).sqrt();
    let ratio = pert / gap;
    let scale = 1.0 / (gap - pert);
    let mut stage2 = InversionReport::planned(Method::TwoStage, constants, ratio, scale, e)?;
    stage2.stage = Some(2);
    let op = MultiplierOp::build(m.clone(), phi.clone(), psi.clone())?;
    let diff = m_phiphi.matrix() - op.matrix();
    let p = linalg::matmul(inverse_phiphi.as_ref(), diff.as_ref());
    let (inverse, residuals) = accumulate(
        p.as_ref(),
        inverse_phiphi.as_ref(),
        stage2.n_planned,
        oracles.stage2,
    )?;
    stage2.residuals = residuals;
    stage2.oracle_norm = norm2;
    stage2.sandwich = Some(sandwich(
        inverse.as_ref(),
        1.0 / ((lambda + 1.0) * (upper + (mu * upper).sqrt())),
        scale,
    ));
    Ok(TwoStageOutput {
        inverse_phiphi,
        inverse,
        stage1,
        stage2,
    })
}

/// `M_{m,Φ,Φ}^{-1} = Σ [S_Φ^{-1}(S_Φ − M_{m,Φ,Φ})]^k S_Φ^{-1}` under
/// `λ < A/B`.
fn two_stage_inner(
    phi: &FiniteFrame,
    m: &Symbol,
    e: f64,
    oracle: Option<MatRef<'_, c64>>,
) -> Result<(Mat<c64>, MultiplierOp, InversionReport)> {
    let d = phi.dim();
    let norm = check_oracle(oracle, d)?;
    if m.len() != phi.count() {
        return Err(Error::shape("two_stage symbol", phi.count(), m.len()));
    }
    let FrameBounds { lower, upper } = phi.require_frame()?;
    let lambda = m.stats().lambda;
    let constants = Constants {
        a_phi: Some(lower),
        b_phi: Some(upper),
        lambda: Some(lambda),
        ..Constants::default()
    };
    if !(lambda < lower / upper) {
        return Err(Error::ConditionViolated {
            method: "two_stage stage 1",
            detail: format!(
                "lambda = {lambda:e} is not below A/B = {:e} ({constants})",
                lower / upper
            ),
        });
    }
    let gap = lower - lambda * upper;
    let mut report = InversionReport::planned(
        Method::TwoStage,
        constants,
        lambda * upper / lower,
        1.0 / gap,
        e,
    )?;
    report.stage = Some(1);
    let s = phi.frame_operator();
    let s_inv = direct_invert(s.as_ref())?;
    let m_phiphi = MultiplierOp::build(m.clone(), phi.clone(), phi.clone())?;
    let diff = &s - m_phiphi.matrix();
    let p = linalg::matmul(s_inv.as_ref(), diff.as_ref());
    let (inv, residuals) = accumulate(p.as_ref(), s_inv.as_ref(), report.n_planned, oracle)?;
    report.residuals = residuals;
    report.oracle_norm = norm;
    report.sandwich = Some(sandwich(
        inv.as_ref(),
        1.0 / ((lambda + 1.0) * upper),
        1.0 / gap,
    ));
    Ok((inv, m_phiphi, report))
}

/// Inverse of `M_{m,Φ,Ψ}` by `Σ (I − M)^k`, valid when `Ψ` is an
/// ε-approximate dual of `Φ` and `λ√(B_Φ B_Ψ) + ε < 1`. Apart from the
/// spectral constants, only products with `M` are formed.
pub fn neumann_invert(
    phi: &FiniteFrame,
    psi: &FiniteFrame,
    m: &Symbol,
    e: f64,
    oracle: Option<MatRef<'_, c64>>,
) -> Result<(Mat<c64>, InversionReport)> {
    let d = phi.dim();
    let oracle_norm = check_oracle(oracle, d)?;
    let op = MultiplierOp::build(m.clone(), phi.clone(), psi.clone())?;
    let b_phi = phi.bounds()?.upper;
    let b_psi = psi.bounds()?.upper;
    let eps = phi.dual_defect(psi)?;
    let lambda = m.stats().lambda;
    let constants = Constants {
        b_phi: Some(b_phi),
        b_psi: Some(b_psi),
        lambda: Some(lambda),
        epsilon: Some(eps),
        ..Constants::default()
    };
    let lb = lambda * (b_phi * b_psi).sqrt();
    let ratio = lb + eps;
    if !(eps < 1.0 && ratio < 1.0) {
        return Err(Error::ConditionViolated {
            method: "neumann",
            detail: format!(
                "need epsilon < 1 and lambda sqrt(B_phi B_psi) + epsilon < 1, got epsilon = {eps:e}, lambda sqrt(B_phi B_psi) = {lb:e}"
            ),
        });
    }
    let mut report =
        InversionReport::planned(Method::Neumann, constants, ratio, 1.0 / (1.0 - ratio), e)?;
    let id = linalg::identity(d);
    let p = &id - op.matrix();
    let (inverse, residuals) = accumulate(p.as_ref(), id.as_ref(), report.n_planned, oracle)?;
    report.residuals = residuals;
    report.oracle_norm = oracle_norm;
    report.sandwich = Some(sandwich(
        inverse.as_ref(),
        1.0 / (1.0 + ratio),
        1.0 / (1.0 - ratio),
    ));
    Ok((inverse, report))
}

#[derive(Clone, Debug)]
pub struct TransformedOutput {
    /// `M_{m,Φ,GΦ}^{-1} = (G^{-1})* M_{m,Φ,Φ}^{-1}`
    pub inverse_phipsi: Mat<c64>,
    /// `M_{m,GΦ,Φ}^{-1} = M_{m,Φ,Φ}^{-1} G^{-1}`
    pub inverse_psiphi: Mat<c64>,
    pub report: InversionReport,
    /// Residuals of both products against direct inversion.
    pub check_phipsi: f64,
    pub check_psiphi: f64,
}

/// Inverses of the multipliers of a frame and its image `Ψ = GΦ`. The
/// inner inverse `M_{m,Φ,Φ}^{-1}` comes from the weighted frame operator
/// for signed `m`, otherwise from the first stage of the two-stage series.
/// Bounds are those of the inner inverse scaled by `‖G^{-1}‖₂`; residuals
/// refer to `M_{m,Φ,GΦ}^{-1}` when `oracle` is given.
pub fn transformed_invert(
    phi: &FiniteFrame,
    g: MatRef<'_, c64>,
    m: &Symbol,
    e: f64,
    oracle: Option<MatRef<'_, c64>>,
) -> Result<TransformedOutput> {
    let d = phi.dim();
    let oracle_norm = check_oracle(oracle, d)?;
    if g.nrows() != d || g.ncols() != d {
        return Err(Error::shape(
            "transformed transform",
            format!("{d}x{d}"),
            format!("{}x{}", g.nrows(), g.ncols()),
        ));
    }
    let cl = classify_matrix(g, DEFAULT_CLASSIFY_TOL)?;
    if !cl.invertible {
        return Err(Error::Singular {
            sigma_min: cl.sigma_min,
            sigma_max: cl.sigma_max,
        });
    }
    let g_inv_norm = 1.0 / cl.sigma_min;
    let g_inv = linalg::lu_solve(g, linalg::identity(d).as_ref());

    let inner_e = e / g_inv_norm;
    let (inner, inner_report) = match m.stats().sign {
        SignPattern::Mixed => {
            let (inv, _, rep) = two_stage_inner(phi, m, inner_e, None)?;
            (inv, rep)
        }
        _ => {
            let pre = weighted_precompute(phi, m)?;
            weighted_invert(&pre, phi, inner_e, None)?
        }
    };
    let inverse_phipsi = linalg::matmul(g_inv.adjoint().to_owned().as_ref(), inner.as_ref());
    let inverse_psiphi = linalg::matmul(inner.as_ref(), g_inv.as_ref());

    let psi = phi.transformed(g)?;
    let m_phipsi = MultiplierOp::build(m.clone(), phi.clone(), psi.clone())?;
    let m_psiphi = MultiplierOp::build(m.clone(), psi, phi.clone())?;
    let check_phipsi = inverse_residual(m_phipsi.matrix(), inverse_phipsi.as_ref())?;
    let check_psiphi = inverse_residual(m_psiphi.matrix(), inverse_psiphi.as_ref())?;

    let mut report = InversionReport::planned(
        Method::Transformed,
        inner_report.constants,
        inner_report.ratio,
        inner_report.scale * g_inv_norm,
        e,
    )?;
    if let Some(o) = oracle {
        // partial sums of the inner series mapped through (G^{-1})*
        report.residuals = transformed_residuals(phi, m, g_inv.as_ref(), report.n_planned, o)?;
    }
    report.oracle_norm = oracle_norm;
    report.sandwich = inner_report.sandwich;
    Ok(TransformedOutput {
        inverse_phipsi,
        inverse_psiphi,
        report,
        check_phipsi,
        check_psiphi,
    })
}

fn transformed_residuals(
    phi: &FiniteFrame,
    m: &Symbol,
    g_inv: MatRef<'_, c64>,
    n: usize,
    oracle: MatRef<'_, c64>,
) -> Result<Vec<f64>> {
    let (p, x0) = match m.stats().sign {
        SignPattern::Mixed => {
            let s = phi.frame_operator();
            let s_inv = direct_invert(s.as_ref())?;
            let op = MultiplierOp::build(m.clone(), phi.clone(), phi.clone())?;
            let diff = &s - op.matrix();
            (linalg::matmul(s_inv.as_ref(), diff.as_ref()), s_inv)
        }
        _ => {
            let pre = weighted_precompute(phi, m)?;
            let x0 = signed(pre.s_w_inv(), pre.sign());
            // Ψ = Φ: S_w − M_{|m|,Φ,Φ} = 0
            (Mat::zeros(phi.dim(), phi.dim()), x0)
        }
    };
    let mut q = x0.clone();
    let mut acc = x0;
    let mut out = Vec::with_capacity(n + 1);
    let g_inv_adj = g_inv.adjoint().to_owned();
    let mapped = |acc: &Mat<c64>| linalg::matmul(g_inv_adj.as_ref(), acc.as_ref());
    out.push(linalg::spectral_distance(mapped(&acc).as_ref(), oracle)?);
    for _ in 0..n {
        q = linalg::matmul(p.as_ref(), q.as_ref());
        acc += &q;
        out.push(linalg::spectral_distance(mapped(&acc).as_ref(), oracle)?);
    }
    Ok(out)
}

/// `‖M X − I‖₂`
pub fn inverse_residual(m: MatRef<'_, c64>, x: MatRef<'_, c64>) -> Result<f64> {
    let p = linalg::matmul(m, x);
    linalg::spectral_distance(p.as_ref(), linalg::identity(p.nrows()).as_ref())
}
