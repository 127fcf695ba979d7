//! Finite frames of `C^d` stored as `d × N` synthesis matrices.
//!
//! Column `n` of the synthesis matrix `T_Φ` is the frame vector `φ_n`. The
//! analysis operator is `U_Φ = T_Φ*`, the frame operator `S_Φ = T_Φ T_Φ*`.
//! Frame bounds are the extreme eigenvalues of `S_Φ`, which are the optimal
//! bounds in finite dimension.

use std::sync::OnceLock;

use faer::{c64, Mat, MatRef};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg;

/// Relative eigenvalue threshold for the frame predicate.
pub const DEFAULT_FRAME_TOL: f64 = 1e-12;

/// Optimal frame bounds `0 ≤ A ≤ B`.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct FrameBounds {
    pub lower: f64,
    pub upper: f64,
}

impl FrameBounds {
    /// `B / A`, infinite when `A = 0`.
    pub fn condition(&self) -> f64 {
        if self.lower > 0.0 {
            self.upper / self.lower
        } else {
            f64::INFINITY
        }
    }
}

#[derive(Clone, Debug)]
pub struct FiniteFrame {
    synthesis: Mat<c64>,
    bounds: OnceLock<FrameBounds>,
}

impl PartialEq for FiniteFrame {
    fn eq(&self, other: &Self) -> bool {
        self.synthesis == other.synthesis
    }
}

impl FiniteFrame {
    pub fn new(synthesis: Mat<c64>) -> Result<Self> {
        if synthesis.nrows() == 0 || synthesis.ncols() == 0 {
            return Err(Error::InvalidArgument(format!(
                "frame needs d >= 1 and N >= 1, got {}x{}",
                synthesis.nrows(),
                synthesis.ncols()
            )));
        }
        Ok(FiniteFrame {
            synthesis,
            bounds: OnceLock::new(),
        })
    }

    /// Builds a frame from explicit column vectors.
    pub fn from_columns(columns: &[Vec<c64>]) -> Result<Self> {
        let d = columns.first().map_or(0, Vec::len);
        if let Some(bad) = columns.iter().find(|c| c.len() != d) {
            return Err(Error::shape("frame columns", d, bad.len()));
        }
        Self::new(Mat::from_fn(d, columns.len(), |i, j| columns[j][i]))
    }

    /// Real-valued columns, convenient for small hand-built frames.
    pub fn from_real_columns(columns: &[&[f64]]) -> Result<Self> {
        let cols: Vec<Vec<c64>> = columns
            .iter()
            .map(|c| c.iter().map(|&x| c64::new(x, 0.0)).collect())
            .collect();
        Self::from_columns(&cols)
    }

    /// The standard orthonormal basis of `C^d`.
    pub fn orthonormal_basis(d: usize) -> Result<Self> {
        Self::new(linalg::identity(d))
    }

    pub fn dim(&self) -> usize {
        self.synthesis.nrows()
    }

    pub fn count(&self) -> usize {
        self.synthesis.ncols()
    }

    pub fn synthesis(&self) -> MatRef<'_, c64> {
        self.synthesis.as_ref()
    }

    pub fn into_synthesis(self) -> Mat<c64> {
        self.synthesis
    }

    pub fn column(&self, n: usize) -> Vec<c64> {
        linalg::column(self.synthesis(), n)
    }

    /// `U_Φ f = (⟨f, φ_n⟩)_n`
    pub fn analysis(&self, f: &[c64]) -> Result<Vec<c64>> {
        if f.len() != self.dim() {
            return Err(Error::shape("analysis input", self.dim(), f.len()));
        }
        Ok(linalg::adj_mat_vec(self.synthesis(), f))
    }

    /// `T_Φ c = Σ c_n φ_n`
    pub fn synthesize(&self, c: &[c64]) -> Result<Vec<c64>> {
        if c.len() != self.count() {
            return Err(Error::shape(
                "synthesis coefficients",
                self.count(),
                c.len(),
            ));
        }
        Ok(linalg::mat_vec(self.synthesis(), c))
    }

    /// `S_Φ = T_Φ T_Φ*`
    pub fn frame_operator(&self) -> Mat<c64> {
        let t = self.synthesis();
        let mut s = linalg::matmul_adj(t, t);
        // exact Hermitian symmetry; the product leaves rounding asymmetry
        let d = s.nrows();
        for j in 0..d {
            s[(j, j)] = c64::new(s[(j, j)].re, 0.0);
            for i in j + 1..d {
                let v = s[(i, j)];
                s[(j, i)] = v.conj();
            }
        }
        s
    }

    /// Optimal bounds from the eigenvalues of `S_Φ`; cached after the first
    /// call.
    pub fn bounds(&self) -> Result<FrameBounds> {
        if let Some(b) = self.bounds.get() {
            return Ok(*b);
        }
        let ev = linalg::hermitian_eigenvalues(self.frame_operator().as_ref())?;
        let upper = ev.last().copied().unwrap_or(0.0).max(0.0);
        let lower = ev.first().copied().unwrap_or(0.0).clamp(0.0, upper);
        let b = FrameBounds { lower, upper };
        let _ = self.bounds.set(b);
        Ok(b)
    }

    /// `A > tol · B`.
    pub fn is_frame(&self, tol: f64) -> Result<bool> {
        let b = self.bounds()?;
        Ok(b.upper > 0.0 && b.lower > tol * b.upper)
    }

    pub(crate) fn require_frame(&self) -> Result<FrameBounds> {
        let b = self.bounds()?;
        if b.upper > 0.0 && b.lower > DEFAULT_FRAME_TOL * b.upper {
            Ok(b)
        } else {
            Err(Error::NotAFrame {
                lower: b.lower,
                upper: b.upper,
            })
        }
    }

    /// Canonical dual `(S_Φ^{-1} φ_n)`.
    pub fn canonical_dual(&self) -> Result<FiniteFrame> {
        self.require_frame()?;
        let s = self.frame_operator();
        FiniteFrame::new(linalg::lu_solve(s.as_ref(), self.synthesis()))
    }

    /// Canonical tight frame `(S_Φ^{-1/2} φ_n)`, a Parseval frame.
    pub fn canonical_tight(&self) -> Result<FiniteFrame> {
        self.require_frame()?;
        let s = self.frame_operator();
        let inv_sqrt = linalg::hermitian_function(s.as_ref(), |l| 1.0 / l.sqrt())?;
        FiniteFrame::new(linalg::matmul(inv_sqrt.as_ref(), self.synthesis()))
    }

    /// Duality defect `ε = ‖T_candidate U_Φ − I‖₂` and whether `ε ≤ tol`.
    /// `ε < 1` certifies an ε-approximate dual.
    pub fn is_dual(&self, candidate: &FiniteFrame, tol: f64) -> Result<(bool, f64)> {
        let eps = self.dual_defect(candidate)?;
        Ok((eps <= tol, eps))
    }

    pub fn dual_defect(&self, candidate: &FiniteFrame) -> Result<f64> {
        self.require_same_shape(candidate, "dual candidate")?;
        let mut p = linalg::matmul_adj(candidate.synthesis(), self.synthesis());
        for i in 0..p.nrows() {
            p[(i, i)] -= c64::ONE;
        }
        linalg::spectral_norm(p.as_ref())
    }

    /// Truncated frame-algorithm dual
    /// `ψ_n = (2/(A+B)) Σ_{k=0}^{K} (I − 2S/(A+B))^k φ_n`,
    /// returned with its measured duality defect, which never exceeds
    /// `((B−A)/(B+A))^{K+1}`.
    pub fn approximate_dual(&self, terms: usize) -> Result<(FiniteFrame, f64)> {
        let b = self.require_frame()?;
        let relax = 2.0 / (b.lower + b.upper);
        let s = self.frame_operator();
        let d = self.dim();
        let step = Mat::from_fn(d, d, |i, j| {
            let id = if i == j { 1.0 } else { 0.0 };
            c64::new(id, 0.0) - s[(i, j)] * relax
        });
        let mut power = self.synthesis().to_owned();
        let mut acc = power.clone();
        for _ in 0..terms {
            power = linalg::matmul(step.as_ref(), power.as_ref());
            acc += &power;
        }
        let dual = FiniteFrame::new(linalg::scale(acc.as_ref(), c64::new(relax, 0.0)))?;
        let eps = self.dual_defect(&dual)?;
        Ok((dual, eps))
    }

    /// `(√w_n φ_n)` for nonnegative weights.
    pub fn weighted(&self, weights: &[f64]) -> Result<FiniteFrame> {
        if weights.len() != self.count() {
            return Err(Error::shape("weights", self.count(), weights.len()));
        }
        if let Some(n) = weights.iter().position(|&w| !(w >= 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "weight {n} is negative: {}",
                weights[n]
            )));
        }
        let t = self.synthesis();
        FiniteFrame::new(Mat::from_fn(self.dim(), self.count(), |i, j| {
            t[(i, j)] * weights[j].sqrt()
        }))
    }

    /// `(c_n φ_n)` for a complex sequence `c`, e.g. `mΦ`.
    pub fn scaled_columns(&self, c: &[c64]) -> Result<FiniteFrame> {
        if c.len() != self.count() {
            return Err(Error::shape("column scales", self.count(), c.len()));
        }
        let t = self.synthesis();
        FiniteFrame::new(Mat::from_fn(self.dim(), self.count(), |i, j| {
            t[(i, j)] * c[j]
        }))
    }

    /// `(G φ_n)` for a `d × d` operator `G`.
    pub fn transformed(&self, g: MatRef<'_, c64>) -> Result<FiniteFrame> {
        if g.nrows() != self.dim() || g.ncols() != self.dim() {
            return Err(Error::shape(
                "frame transform",
                format!("{0}x{0}", self.dim()),
                format!("{}x{}", g.nrows(), g.ncols()),
            ));
        }
        FiniteFrame::new(linalg::matmul(g, self.synthesis()))
    }

    /// Frames `Φ`, `Ψ` are equivalent (`Ψ = GΦ` with `G` invertible) iff the
    /// kernels of their synthesis operators coincide. Differing kernels give
    /// `false` for arbitrary sequences; equal kernels certify equivalence only
    /// when both sequences are frames, otherwise `NotAFrame` is returned.
    pub fn is_equivalent_to(&self, other: &FiniteFrame, tol: f64) -> Result<bool> {
        self.require_same_shape(other, "equivalence")?;
        let p = self.row_space_projection()?;
        let q = other.row_space_projection()?;
        if linalg::spectral_distance(p.as_ref(), q.as_ref())? > tol {
            return Ok(false);
        }
        self.require_frame()?;
        other.require_frame()?;
        Ok(true)
    }

    /// Orthogonal projection of `C^N` onto `(ker T_Φ)^⊥`, rank decided with
    /// the default frame tolerance.
    pub fn row_space_projection(&self) -> Result<Mat<c64>> {
        let (_, s, v) = linalg::thin_svd(self.synthesis())?;
        let smax = s.first().copied().unwrap_or(0.0);
        let rank = s.iter().filter(|&&x| x > DEFAULT_FRAME_TOL * smax).count();
        let vr = v.as_ref().subcols(0, rank);
        Ok(linalg::matmul_adj(vr, vr))
    }

    /// Orthonormal basis (as columns) of `ker T_Φ ⊂ C^N`.
    pub fn kernel_basis(&self) -> Result<Mat<c64>> {
        let p = self.row_space_projection()?;
        let n = self.count();
        let comp = Mat::from_fn(n, n, |i, j| {
            let id = if i == j { c64::ONE } else { c64::ZERO };
            id - p[(i, j)]
        });
        let (vals, vecs) = linalg::hermitian_eigen(comp.as_ref())?;
        let keep: Vec<usize> = (0..n).filter(|&k| vals[k] > 0.5).collect();
        Ok(Mat::from_fn(n, keep.len(), |i, j| vecs[(i, keep[j])]))
    }

    /// A non-canonical dual `S^{-1}Φ + W K*`, with `K` an orthonormal basis of
    /// `ker T_Φ` and `W` a seeded Gaussian `d × dim ker` map scaled by
    /// `strength`. Equals the canonical dual for a basis.
    pub fn alternate_dual(&self, strength: f64, seed: u64) -> Result<FiniteFrame> {
        let canon = self.canonical_dual()?;
        let k = self.kernel_basis()?;
        if k.ncols() == 0 {
            return Ok(canon);
        }
        let w = gaussian_matrix(self.dim(), k.ncols(), seed);
        let w = linalg::scale(w.as_ref(), c64::new(strength, 0.0));
        let corr = linalg::matmul_adj(w.as_ref(), k.as_ref());
        FiniteFrame::new(canon.synthesis() + corr.as_ref())
    }

    fn require_same_shape(&self, other: &FiniteFrame, context: &'static str) -> Result<()> {
        if self.dim() != other.dim() || self.count() != other.count() {
            return Err(Error::shape(
                context,
                format!("{}x{}", self.dim(), self.count()),
                format!("{}x{}", other.dim(), other.count()),
            ));
        }
        Ok(())
    }
}

/// `d × n` matrix of independent standard complex Gaussians
/// (`E|z|² = 1`), deterministic in `seed`.
pub fn gaussian_matrix(d: usize, n: usize, seed: u64) -> Mat<c64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let mut m = Mat::zeros(d, n);
    for j in 0..n {
        for i in 0..d {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            m[(i, j)] = c64::new(re * scale, im * scale);
        }
    }
    m
}

/// Seeded random frame of `N ≥ d` standard complex Gaussian vectors in
/// `C^d`; redraws until the frame predicate holds.
pub fn random_frame(d: usize, n: usize, seed: u64) -> Result<FiniteFrame> {
    if d == 0 || n < d {
        return Err(Error::InvalidArgument(format!(
            "random frame needs N >= d >= 1, got d={d}, N={n}"
        )));
    }
    let mut attempt = 0u64;
    loop {
        let s = seed.wrapping_add(attempt.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let frame = FiniteFrame::new(gaussian_matrix(d, n, s))?;
        if frame.is_frame(DEFAULT_FRAME_TOL)? {
            return Ok(frame);
        }
        attempt += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> c64 {
        c64::new(re, 0.0)
    }

    fn e1e1e2() -> FiniteFrame {
        FiniteFrame::from_real_columns(&[&[1.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]).unwrap()
    }

    fn close(a: MatRef<'_, c64>, b: MatRef<'_, c64>, tol: f64) -> bool {
        linalg::spectral_distance(a, b).unwrap() <= tol
    }

    #[test]
    fn analysis_examples() {
        let onb = FiniteFrame::orthonormal_basis(2).unwrap();
        assert_eq!(
            onb.analysis(&[c(1.0), c(0.0)]).unwrap(),
            vec![c(1.0), c(0.0)]
        );
        let f = e1e1e2();
        assert_eq!(f.analysis(&[c(1.0), c(1.0)]).unwrap(), vec![c(1.0); 3]);
        assert!(matches!(
            f.analysis(&[c(1.0)]),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn analysis_is_conjugate_linear_in_frame() {
        let f = FiniteFrame::from_columns(&[vec![c64::new(0.0, 1.0)]]).unwrap();
        // ⟨1, i⟩ = 1 · conj(i) = −i
        assert_eq!(f.analysis(&[c(1.0)]).unwrap()[0], c64::new(0.0, -1.0));
    }

    #[test]
    fn synthesis_examples() {
        let onb = FiniteFrame::orthonormal_basis(3).unwrap();
        assert_eq!(onb.synthesize(&[c64::ZERO; 3]).unwrap(), vec![c64::ZERO; 3]);
        let f = e1e1e2();
        assert_eq!(
            f.synthesize(&[c(1.0), c(-1.0), c(5.0)]).unwrap(),
            vec![c(0.0), c(5.0)]
        );
        assert!(f.synthesize(&[c(1.0)]).is_err());
    }

    #[test]
    fn frame_operator_examples() {
        let s = e1e1e2().frame_operator();
        let want = Mat::from_fn(
            2,
            2,
            |i, j| if i == j { c([2.0, 1.0][i]) } else { c64::ZERO },
        );
        assert!(close(s.as_ref(), want.as_ref(), 1e-15));
        let f = FiniteFrame::from_real_columns(&[&[2.0, 0.0], &[0.0, 0.5]]).unwrap();
        let s = f.frame_operator();
        assert_eq!(s[(0, 0)], c(4.0));
        assert_eq!(s[(1, 1)], c(0.25));
    }

    #[test]
    fn bounds_examples() {
        let b = FiniteFrame::orthonormal_basis(4).unwrap().bounds().unwrap();
        assert!((b.lower - 1.0).abs() < 1e-14 && (b.upper - 1.0).abs() < 1e-14);
        let b = e1e1e2().bounds().unwrap();
        assert!((b.lower - 1.0).abs() < 1e-14 && (b.upper - 2.0).abs() < 1e-14);
        let r3 = 3f64.sqrt() / 2.0;
        let merc =
            FiniteFrame::from_real_columns(&[&[1.0, 0.0], &[-0.5, r3], &[-0.5, -r3]]).unwrap();
        let b = merc.bounds().unwrap();
        assert!((b.lower - 1.5).abs() < 1e-14 && (b.upper - 1.5).abs() < 1e-14);
    }

    #[test]
    fn frame_predicate() {
        assert!(FiniteFrame::orthonormal_basis(2)
            .unwrap()
            .is_frame(DEFAULT_FRAME_TOL)
            .unwrap());
        let deficient = FiniteFrame::from_real_columns(&[&[1.0, 0.0], &[1.0, 0.0]]).unwrap();
        assert!(!deficient.is_frame(DEFAULT_FRAME_TOL).unwrap());
        let tiny = FiniteFrame::from_real_columns(&[&[1.0, 0.0], &[0.0, 1e-15]]).unwrap();
        assert!(!tiny.is_frame(DEFAULT_FRAME_TOL).unwrap());
    }

    #[test]
    fn canonical_dual_examples() {
        let onb = FiniteFrame::orthonormal_basis(3).unwrap();
        assert!(close(
            onb.canonical_dual().unwrap().synthesis(),
            onb.synthesis(),
            1e-15
        ));

        let r3 = 3f64.sqrt() / 2.0;
        let merc =
            FiniteFrame::from_real_columns(&[&[1.0, 0.0], &[-0.5, r3], &[-0.5, -r3]]).unwrap();
        let want = linalg::scale(merc.synthesis(), c(1.0 / 1.5));
        assert!(close(
            merc.canonical_dual().unwrap().synthesis(),
            want.as_ref(),
            1e-14
        ));

        let want =
            FiniteFrame::from_real_columns(&[&[0.5, 0.0], &[0.5, 0.0], &[0.0, 1.0]]).unwrap();
        let dual = e1e1e2().canonical_dual().unwrap();
        assert!(close(dual.synthesis(), want.synthesis(), 1e-15));

        let deficient = FiniteFrame::from_real_columns(&[&[1.0, 0.0], &[1.0, 0.0]]).unwrap();
        assert!(matches!(
            deficient.canonical_dual(),
            Err(Error::NotAFrame { .. })
        ));
    }

    #[test]
    fn canonical_tight_examples() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let want = FiniteFrame::from_real_columns(&[&[h, 0.0], &[h, 0.0], &[0.0, 1.0]]).unwrap();
        let tight = e1e1e2().canonical_tight().unwrap();
        assert!(close(tight.synthesis(), want.synthesis(), 1e-14));
        let b = tight.bounds().unwrap();
        assert!((b.lower - 1.0).abs() < 1e-10 && (b.upper - 1.0).abs() < 1e-10);

        let scaled = FiniteFrame::new(linalg::scale(linalg::identity(3).as_ref(), c(2.0))).unwrap();
        let t = scaled.canonical_tight().unwrap();
        assert!(close(t.synthesis(), linalg::identity(3).as_ref(), 1e-14));
    }

    #[test]
    fn is_dual_examples() {
        let phi = random_frame(3, 6, 11).unwrap();
        let canon = phi.canonical_dual().unwrap();
        let (ok, eps) = phi.is_dual(&canon, 1e-12).unwrap();
        assert!(ok && eps <= 1e-12);

        let shrunk = FiniteFrame::new(linalg::scale(canon.synthesis(), c(0.9))).unwrap();
        let (_, eps) = phi.is_dual(&shrunk, 1e-12).unwrap();
        assert!((eps - 0.1).abs() < 1e-12);

        let alt = FiniteFrame::from_real_columns(&[&[1.0, 0.0], &[0.0, 0.0], &[0.0, 1.0]]).unwrap();
        let (ok, eps) = e1e1e2().is_dual(&alt, 1e-12).unwrap();
        assert!(ok && eps <= 1e-12);

        let wrong = FiniteFrame::orthonormal_basis(2).unwrap();
        assert!(e1e1e2().is_dual(&wrong, 1e-12).is_err());
    }

    #[test]
    fn approximate_dual_examples() {
        let r3 = 3f64.sqrt() / 2.0;
        let merc =
            FiniteFrame::from_real_columns(&[&[1.0, 0.0], &[-0.5, r3], &[-0.5, -r3]]).unwrap();
        let (_, eps) = merc.approximate_dual(0).unwrap();
        assert!(eps < 1e-12);

        let (_, eps) = e1e1e2().approximate_dual(0).unwrap();
        assert!((eps - 1.0 / 3.0).abs() < 1e-12);

        let phi = random_frame(4, 7, 3).unwrap();
        let b = phi.bounds().unwrap();
        let (_, eps) = phi.approximate_dual(5).unwrap();
        let bound = ((b.upper - b.lower) / (b.upper + b.lower)).powi(6);
        assert!(eps <= bound * (1.0 + 1e-9) + 1e-15, "{eps} > {bound}");
    }

    #[test]
    fn weighted_frame_examples() {
        let phi = random_frame(3, 5, 2).unwrap();
        let same = phi.weighted(&[1.0; 5]).unwrap();
        assert!(close(same.synthesis(), phi.synthesis(), 0.0));
        let doubled = phi.weighted(&[4.0; 5]).unwrap();
        let want = linalg::scale(phi.synthesis(), c(2.0));
        assert!(close(doubled.synthesis(), want.as_ref(), 1e-15));

        let w = [0.5, 1.5, 2.0, 0.25, 3.0];
        let direct = linalg::sandwich_diag(
            phi.synthesis(),
            &w.iter().map(|&x| c(x)).collect::<Vec<_>>(),
            phi.synthesis(),
        );
        let s = phi.weighted(&w).unwrap().frame_operator();
        let scale = linalg::spectral_norm(direct.as_ref()).unwrap();
        assert!(close(s.as_ref(), direct.as_ref(), 1e-13 * scale));

        assert!(phi.weighted(&[1.0, -1.0, 1.0, 1.0, 1.0]).is_err());
        assert!(phi.weighted(&[1.0; 4]).is_err());
    }

    #[test]
    fn equivalence_examples() {
        let phi = random_frame(3, 6, 5).unwrap();
        assert!(phi.is_equivalent_to(&phi, 1e-9).unwrap());
        assert!(phi
            .is_equivalent_to(&phi.canonical_dual().unwrap(), 1e-9)
            .unwrap());

        let a = FiniteFrame::from_real_columns(&[
            &[1.0, 0.0, 0.0],
            &[1.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0],
            &[0.0, 1.0, 0.0],
        ])
        .unwrap();
        let b = FiniteFrame::from_real_columns(&[
            &[1.0, 0.0, 0.0],
            &[1.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0],
            &[0.0, 0.0, 1.0],
        ])
        .unwrap();
        assert!(!a.is_equivalent_to(&b, 1e-9).unwrap());
    }

    #[test]
    fn random_frame_is_deterministic() {
        let a = random_frame(3, 9, 42).unwrap();
        let b = random_frame(3, 9, 42).unwrap();
        assert_eq!(a, b);
        assert!(a.bounds().unwrap().lower > 0.0);
        let basis = random_frame(2, 2, 1).unwrap();
        assert!(basis.is_frame(DEFAULT_FRAME_TOL).unwrap());
        assert!(random_frame(3, 2, 0).is_err());
    }

    #[test]
    fn alternate_dual_is_a_dual() {
        let phi = random_frame(3, 7, 8).unwrap();
        let alt = phi.alternate_dual(1.0, 99).unwrap();
        let canon = phi.canonical_dual().unwrap();
        assert!(phi.dual_defect(&alt).unwrap() < 1e-12);
        assert!(linalg::spectral_distance(alt.synthesis(), canon.synthesis()).unwrap() > 1e-3);
        assert_eq!(phi.kernel_basis().unwrap().ncols(), 4);
    }
}
