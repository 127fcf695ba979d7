//! Gabor systems on `C^L` with cyclic translation and integer modulation.
//!
//! A rectangular lattice is given by the time step `a` and the number of
//! frequency channels `M` (frequency step `b = L/M`). The atom with
//! frequency index `k ∈ [0, M)` and time index `n ∈ [0, L/a)` is
//! `E_{kb} T_{na} g`, stored at column `i = k + M·n`.

use std::f64::consts::PI;
use std::path::PathBuf;
use std::str::FromStr;

use faer::{c64, Mat, MatRef};

use crate::error::{Error, Result};
use crate::frames::FiniteFrame;
use crate::linalg;
use crate::multiplier::MultiplierOp;
use crate::par::{self, ExecPolicy};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaborLattice {
    len: usize,
    time_step: usize,
    channels: usize,
}

impl GaborLattice {
    pub fn new(len: usize, time_step: usize, channels: usize) -> Result<Self> {
        if len == 0 || time_step == 0 || channels == 0 {
            return Err(Error::InvalidArgument(format!(
                "lattice parameters must be positive: L={len}, a={time_step}, M={channels}"
            )));
        }
        if !len.is_multiple_of(time_step) || !len.is_multiple_of(channels) {
            return Err(Error::InvalidArgument(format!(
                "a={time_step} and M={channels} must divide L={len}"
            )));
        }
        Ok(GaborLattice {
            len,
            time_step,
            channels,
        })
    }

    /// Signal length `L`.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Time step `a`.
    pub fn time_step(&self) -> usize {
        self.time_step
    }

    /// Number of frequency channels `M`.
    pub fn channels(&self) -> usize {
        self.channels
    }

    /// Frequency step `b = L/M`.
    pub fn freq_step(&self) -> usize {
        self.len / self.channels
    }

    /// Number of time positions `L/a`.
    pub fn time_positions(&self) -> usize {
        self.len / self.time_step
    }

    /// `N = M · L/a`
    pub fn atom_count(&self) -> usize {
        self.channels * self.time_positions()
    }

    /// `N / L = M / a`
    pub fn redundancy(&self) -> f64 {
        self.channels as f64 / self.time_step as f64
    }

    pub fn index(&self, k: usize, n: usize) -> usize {
        k + self.channels * n
    }

    /// `(k, n)` of atom index `i`.
    pub fn coords(&self, i: usize) -> (usize, usize) {
        (i % self.channels, i / self.channels)
    }

    /// `exp(2πi k l / M)`, with the exponent reduced modulo `M` first.
    fn modulation(&self, k: usize, l: usize) -> c64 {
        let r = (k * l) % self.channels;
        c64::from_polar(1.0, 2.0 * PI * r as f64 / self.channels as f64)
    }

    fn check_indices(&self, k: usize, n: usize) -> Result<()> {
        if k >= self.channels || n >= self.time_positions() {
            return Err(Error::InvalidArgument(format!(
                "time-frequency index (k={k}, n={n}) outside [0,{}) x [0,{})",
                self.channels,
                self.time_positions()
            )));
        }
        Ok(())
    }

    /// Writes `E_{kb} T_{na} f` into `out`.
    fn shift_into(&self, k: usize, n: usize, f: &[c64], out: &mut [c64]) {
        let shift = n * self.time_step;
        for (l, o) in out.iter_mut().enumerate() {
            let src = (l + self.len - shift % self.len) % self.len;
            *o = self.modulation(k, l) * f[src];
        }
    }
}

/// `result[l] = exp(2πi·k·l/M) · f[(l − n·a) mod L]`
pub fn tf_shift(lattice: &GaborLattice, k: usize, n: usize, f: &[c64]) -> Result<Vec<c64>> {
    lattice.check_indices(k, n)?;
    if f.len() != lattice.len() {
        return Err(Error::shape("tf_shift input", lattice.len(), f.len()));
    }
    let mut out = vec![c64::ZERO; f.len()];
    lattice.shift_into(k, n, f, &mut out);
    Ok(out)
}

/// Matrix of `E_{kb} T_{na}` on `C^L`.
pub fn shift_matrix(lattice: &GaborLattice, k: usize, n: usize) -> Result<Mat<c64>> {
    lattice.check_indices(k, n)?;
    let l = lattice.len();
    let mut m = Mat::zeros(l, l);
    let mut e = vec![c64::ZERO; l];
    let mut col = vec![c64::ZERO; l];
    for j in 0..l {
        e[j] = c64::ONE;
        lattice.shift_into(k, n, &e, &mut col);
        e[j] = c64::ZERO;
        for i in 0..l {
            m[(i, j)] = col[i];
        }
    }
    Ok(m)
}

#[derive(Clone, Debug, PartialEq)]
pub struct GaborSystem {
    lattice: GaborLattice,
    window: Vec<c64>,
}

impl GaborSystem {
    pub fn new(lattice: GaborLattice, window: Vec<c64>) -> Result<Self> {
        if window.len() != lattice.len() {
            return Err(Error::shape("gabor window", lattice.len(), window.len()));
        }
        if window.iter().all(|z| *z == c64::ZERO) {
            return Err(Error::InvalidArgument(
                "gabor window is identically zero".into(),
            ));
        }
        Ok(GaborSystem { lattice, window })
    }

    pub fn lattice(&self) -> &GaborLattice {
        &self.lattice
    }

    pub fn window(&self) -> &[c64] {
        &self.window
    }

    pub fn frame(&self) -> FiniteFrame {
        self.frame_with(ExecPolicy::default())
    }

    /// Expands the system into its `L × N` synthesis matrix, one atom per
    /// column. Columns are independent work items under `policy`.
    pub fn frame_with(&self, policy: ExecPolicy) -> FiniteFrame {
        let lat = self.lattice;
        let rows = lat.len();
        let mut data = vec![c64::ZERO; rows * lat.atom_count()];
        par::fill_columns(policy, &mut data, rows, |i, col| {
            let (k, n) = lat.coords(i);
            lat.shift_into(k, n, &self.window, col);
        });
        let synth = Mat::from_fn(rows, lat.atom_count(), |i, j| data[i + rows * j]);
        FiniteFrame::new(synth).expect("lattice has positive size")
    }

    /// Window of the canonical dual, `S^{-1} g`. The canonical dual of a
    /// Gabor frame is the Gabor system of this window.
    pub fn dual_window(&self) -> Result<Vec<c64>> {
        let frame = self.frame();
        frame.require_frame()?;
        let s = frame.frame_operator();
        let g = Mat::from_fn(self.window.len(), 1, |i, _| self.window[i]);
        let x = linalg::lu_solve(s.as_ref(), g.as_ref());
        Ok(linalg::column(x.as_ref(), 0))
    }

    pub fn with_window(&self, window: Vec<c64>) -> Result<GaborSystem> {
        GaborSystem::new(self.lattice, window)
    }
}

/// Gabor frame-type operator `M_{(1),Φ,Ψ}` of two systems on one lattice.
pub fn frame_type_operator(phi: &GaborSystem, psi: &GaborSystem) -> Result<MultiplierOp> {
    if phi.lattice != psi.lattice {
        return Err(Error::shape(
            "frame-type operator lattices",
            format!("{:?}", phi.lattice),
            format!("{:?}", psi.lattice),
        ));
    }
    MultiplierOp::frame_type(phi.frame(), psi.frame())
}

/// Largest relative commutator `‖VW − WV‖₂ / ‖V‖₂` over the lattice
/// generators `W = E_b` (k=1, n=0) and `W = T_a` (k=0, n=1).
pub fn commutator_defect(v: MatRef<'_, c64>, lattice: &GaborLattice) -> Result<f64> {
    let l = lattice.len();
    if v.nrows() != l || v.ncols() != l {
        return Err(Error::shape(
            "commutation test",
            format!("{l}x{l}"),
            format!("{}x{}", v.nrows(), v.ncols()),
        ));
    }
    let a = lattice.time_step() % l;
    let w: Vec<c64> = (0..l).map(|j| lattice.modulation(1, j)).collect();
    // V·E − E·V: (V E)[i,j] = V[i,j] w_j, (E V)[i,j] = w_i V[i,j]
    let mod_comm = Mat::from_fn(l, l, |i, j| v[(i, j)] * w[j] - w[i] * v[(i, j)]);
    // V·T − T·V: (V T)[i,j] = V[i, j+a], (T V)[i,j] = V[i−a, j]
    let trans_comm = Mat::from_fn(l, l, |i, j| v[(i, (j + a) % l)] - v[((i + l - a) % l, j)]);
    let norm = linalg::spectral_norm(v)?;
    let worst =
        linalg::spectral_norm(mod_comm.as_ref())?.max(linalg::spectral_norm(trans_comm.as_ref())?);
    Ok(if norm > 0.0 { worst / norm } else { worst })
}

/// Whether `V` commutes with every lattice time-frequency shift, tested on
/// the two generators.
pub fn commutes_with_lattice(v: MatRef<'_, c64>, lattice: &GaborLattice, tol: f64) -> Result<bool> {
    Ok(commutator_defect(v, lattice)? <= tol)
}

/// For `V` in the commutant of the lattice shifts, the window `u` with
/// `V = M_{(1),Φ,Ψ_u}`, `Ψ_u` the Gabor system of `u`: `u = V* S_Φ^{-1} v`.
pub fn commutant_window(v: MatRef<'_, c64>, phi: &GaborSystem) -> Result<Vec<c64>> {
    let dual = phi.dual_window()?;
    Ok(linalg::adj_mat_vec(v, &dual))
}

/// Basis (columns) of the symbols `m` for which `M_{m,Φ,Ψ}` commutes with
/// both lattice generators, i.e. the null space of
/// `m ↦ ([M_m, E_b], [M_m, T_a])`.
pub fn commuting_symbols(phi: &GaborSystem, psi: &GaborSystem, tol: f64) -> Result<Mat<c64>> {
    if phi.lattice != psi.lattice {
        return Err(Error::shape(
            "commuting symbols lattices",
            format!("{:?}", phi.lattice),
            format!("{:?}", psi.lattice),
        ));
    }
    let lat = phi.lattice;
    let l = lat.len();
    let n_atoms = lat.atom_count();
    let (tp, tq) = (phi.frame(), psi.frame());
    let (tp, tq) = (tp.synthesis(), tq.synthesis());
    let a = lat.time_step() % l;
    let w: Vec<c64> = (0..l).map(|j| lat.modulation(1, j)).collect();
    let rows = 2 * l * l;
    let cols = par::map_indexed(ExecPolicy::default(), n_atoms, |n| {
        // rank one φ_n ψ_n*
        let r = |i: usize, j: usize| tp[(i, n)] * tq[(j, n)].conj();
        let mut col = Vec::with_capacity(rows);
        for j in 0..l {
            for i in 0..l {
                col.push(r(i, j) * w[j] - w[i] * r(i, j));
            }
        }
        for j in 0..l {
            for i in 0..l {
                col.push(r(i, (j + a) % l) - r((i + l - a) % l, j));
            }
        }
        col
    });
    let system = Mat::from_fn(rows, n_atoms, |i, j| cols[j][i]);
    let (_, s, v) = linalg::thin_svd(system.as_ref())?;
    let smax = s.first().copied().unwrap_or(0.0);
    let null: Vec<usize> = (0..n_atoms)
        .filter(|&k| s.get(k).copied().unwrap_or(0.0) <= tol * smax)
        .collect();
    Ok(Mat::from_fn(n_atoms, null.len(), |i, j| v[(i, null[j])]))
}

/// Periodic Hann window of length `wlen`, centered whole-point-even on
/// `C^L` and normalized to unit norm.
pub fn hann_window(len: usize, wlen: usize) -> Result<Vec<c64>> {
    if wlen == 0 || wlen > len {
        return Err(Error::InvalidArgument(format!(
            "hann length {wlen} outside [1, {len}]"
        )));
    }
    let mut out = vec![0.0f64; len];
    for j in 0..wlen {
        let h = 0.5 * (1.0 - (2.0 * PI * j as f64 / wlen as f64).cos());
        let idx = (j + len - wlen / 2) % len;
        out[idx] = h;
    }
    if wlen == 1 {
        out[0] = 1.0;
    }
    Ok(normalize(&out))
}

/// Periodized Gaussian `Σ_j exp(−π (l' + jL)² / s)` with `s = a·L/M`,
/// `l'` the representative of `l` in `(−L/2, L/2]`, unit norm.
pub fn gauss_window(lattice: &GaborLattice) -> Vec<c64> {
    let len = lattice.len();
    let lf = len as f64;
    let s = lattice.time_step() as f64 * lf / lattice.channels() as f64;
    let mut reach = 0usize;
    while (-PI * (reach as f64 * lf - lf / 2.0).powi(2) / s).exp() >= 1e-17 {
        reach += 1;
    }
    let j = reach as i64;
    let w: Vec<f64> = (0..len)
        .map(|l| {
            let centered = if 2 * l > len { l as f64 - lf } else { l as f64 };
            (-j..=j)
                .map(|p| (-PI * (centered + p as f64 * lf).powi(2) / s).exp())
                .sum()
        })
        .collect();
    normalize(&w)
}

/// Unit impulse at index 0.
pub fn delta_window(len: usize) -> Vec<c64> {
    let mut w = vec![c64::ZERO; len];
    if let Some(first) = w.first_mut() {
        *first = c64::ONE;
    }
    w
}

fn normalize(x: &[f64]) -> Vec<c64> {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    x.iter().map(|&v| c64::new(v / norm, 0.0)).collect()
}

/// Window specification as accepted on the command line:
/// `hann:<wlen>`, `gauss`, `delta` or `file:<path>`.
#[derive(Clone, Debug, PartialEq)]
pub enum WindowSpec {
    Hann(usize),
    Gauss,
    Delta,
    File(PathBuf),
}

impl FromStr for WindowSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("unknown window spec `{s}`"));
        match s.split_once(':') {
            None if s == "gauss" => Ok(WindowSpec::Gauss),
            None if s == "delta" => Ok(WindowSpec::Delta),
            Some(("hann", w)) => w.parse().map(WindowSpec::Hann).map_err(|_| bad()),
            Some(("file", p)) if !p.is_empty() => Ok(WindowSpec::File(PathBuf::from(p))),
            _ => Err(bad()),
        }
    }
}

impl WindowSpec {
    pub fn resolve(&self, lattice: &GaborLattice) -> Result<Vec<c64>> {
        match self {
            WindowSpec::Hann(w) => hann_window(lattice.len(), *w),
            WindowSpec::Gauss => Ok(gauss_window(lattice)),
            WindowSpec::Delta => Ok(delta_window(lattice.len())),
            WindowSpec::File(p) => {
                let w = crate::io::read_symbol_file(p)?;
                if w.len() != lattice.len() {
                    return Err(Error::shape("window file", lattice.len(), w.len()));
                }
                Ok(w.values().to_vec())
            }
        }
    }
}
