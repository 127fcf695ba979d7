//! Command implementations for the `framemult` binary.
//!
//! Every command is a plain function from parsed arguments to an outcome so
//! that tests can drive them without spawning processes. [`run`] parses a
//! command line, dispatches, prints diagnostics and maps failures to exit
//! codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | internal numerical failure |
//! | 2 | a method's condition (or another mathematical precondition) does not hold |
//! | 3 | I/O, parse or usage error |
//! | 4 | shape mismatch |

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use framemult::gabor::{GaborLattice, GaborSystem, WindowSpec};
use framemult::inversion::{self, InversionReport, Method, TwoStageOracles};
use framemult::io::{self, MaskGrid, Signal};
use framemult::multiplier::MultiplierOp;
use framemult::{c64, linalg, Error, FiniteFrame, Mat, Symbol, DEFAULT_FRAME_TOL};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_CONDITION: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_SHAPE: i32 = 4;

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Usage(String),
    /// The masked signal was written but the inverse could not be applied.
    RecoverySkipped(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::RecoverySkipped(m) => write!(f, "recovery skipped: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Core(Error::Io(e))
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_IO,
            CliError::RecoverySkipped(_) => EXIT_CONDITION,
            CliError::Core(e) => match e {
                Error::ConditionViolated { .. }
                | Error::NotAFrame { .. }
                | Error::Singular { .. }
                | Error::ZeroSymbol { .. } => EXIT_CONDITION,
                Error::Io(_)
                | Error::Parse { .. }
                | Error::Wav { .. }
                | Error::InvalidArgument(_) => EXIT_IO,
                Error::ShapeMismatch { .. } => EXIT_SHAPE,
                Error::Decomposition(_) => EXIT_INTERNAL,
            },
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(
    name = "framemult",
    version,
    about = "Frame multipliers: checks, inversion, masks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print dimension, count, frame bounds and condition of a frame file.
    Framecheck(FramecheckArgs),
    /// Invert a multiplier and write the inverse and an iteration report.
    Invert(InvertArgs),
    /// Convergence table of the weighted-frame-operator series on a Gabor pair.
    BenchConvergence(BenchArgs),
    /// Apply a time-frequency mask to a WAV signal, optionally undoing it.
    ApplyMask(MaskArgs),
    /// Write a mask file for a lattice.
    MakeMask(MakeMaskArgs),
    /// Write a seeded random frame in the matrix text format.
    RandomFrame(RandomFrameArgs),
    /// Write a linear chirp as a mono 16-bit WAV file.
    Chirp(ChirpArgs),
}

/// Symbol specification: `ones`, `const:<re>[,<im>]`, `uniform:<lo>:<hi>`
/// (seeded by `--seed`) or `file:<path>`.
#[derive(Clone, Debug, PartialEq)]
pub enum SymbolSpec {
    Ones,
    Const(c64),
    Uniform(f64, f64),
    File(PathBuf),
}

impl FromStr for SymbolSpec {
    type Err = Error;

    fn from_str(s: &str) -> framemult::Result<Self> {
        let bad = || Error::InvalidArgument(format!("unknown symbol spec `{s}`"));
        let num = |t: &str| t.parse::<f64>().map_err(|_| bad());
        if s == "ones" {
            return Ok(SymbolSpec::Ones);
        }
        match s.split_once(':') {
            Some(("const", v)) => match v.split_once(',') {
                Some((re, im)) => Ok(SymbolSpec::Const(c64::new(num(re)?, num(im)?))),
                None => Ok(SymbolSpec::Const(c64::new(num(v)?, 0.0))),
            },
            Some(("uniform", range)) => {
                let (lo, hi) = range.split_once(':').ok_or_else(bad)?;
                Ok(SymbolSpec::Uniform(num(lo)?, num(hi)?))
            }
            Some(("file", p)) if !p.is_empty() => Ok(SymbolSpec::File(PathBuf::from(p))),
            _ => Err(bad()),
        }
    }
}

impl SymbolSpec {
    pub fn resolve(&self, len: usize, seed: u64) -> framemult::Result<Symbol> {
        match self {
            SymbolSpec::Ones => Symbol::ones(len),
            SymbolSpec::Const(c) => Symbol::constant(len, *c),
            SymbolSpec::Uniform(lo, hi) => Symbol::uniform_real(len, *lo, *hi, seed),
            SymbolSpec::File(p) => {
                let m = io::read_symbol_file(p)?;
                if m.len() != len {
                    return Err(Error::ShapeMismatch {
                        context: "symbol file",
                        expected: len.to_string(),
                        found: m.len().to_string(),
                    });
                }
                Ok(m)
            }
        }
    }
}

#[derive(Clone, Debug, Args)]
pub struct LatticeArgs {
    /// Signal length L.
    #[arg(long = "L", default_value_t = 1024)]
    pub len: usize,
    /// Time step a.
    #[arg(long = "a", default_value_t = 256)]
    pub time_step: usize,
    /// Number of frequency channels M.
    #[arg(long = "M", default_value_t = 512)]
    pub channels: usize,
    /// Window of the analysis system: hann:<wlen>, gauss, delta or file:<path>.
    #[arg(long, default_value = "hann:512")]
    pub window: WindowSpec,
}

impl LatticeArgs {
    pub fn lattice(&self) -> framemult::Result<GaborLattice> {
        GaborLattice::new(self.len, self.time_step, self.channels)
    }

    pub fn system(&self) -> framemult::Result<GaborSystem> {
        let lat = self.lattice()?;
        GaborSystem::new(lat, self.window.resolve(&lat)?)
    }
}

#[derive(Clone, Debug, Args)]
pub struct PairArgs {
    #[command(flatten)]
    pub lattice: LatticeArgs,
    /// Window of the second Gabor system G.
    #[arg(long, default_value = "gauss")]
    pub psi_window: WindowSpec,
    /// Ψ = Φ + δ·G with this δ.
    #[arg(long, default_value_t = 0.01)]
    pub perturb: f64,
    /// Use Ψ = G itself instead of the perturbation Φ + δ·G.
    #[arg(long)]
    pub literal_psi: bool,
}

impl PairArgs {
    /// `(Φ, Ψ)` synthesis frames.
    pub fn frames(&self) -> framemult::Result<(FiniteFrame, FiniteFrame)> {
        let phi_sys = self.lattice.system()?;
        let lat = *phi_sys.lattice();
        let g = GaborSystem::new(lat, self.psi_window.resolve(&lat)?)?.frame();
        let phi = phi_sys.frame();
        let psi = if self.literal_psi {
            g
        } else {
            let scaled = linalg::scale(g.synthesis(), c64::new(self.perturb, 0.0));
            FiniteFrame::new(phi.synthesis() + scaled.as_ref())?
        };
        Ok((phi, psi))
    }
}

#[derive(Clone, Debug, Args)]
pub struct FramecheckArgs {
    pub frame: PathBuf,
}

#[derive(Clone, Debug, Args)]
pub struct InvertArgs {
    /// Φ in the matrix text format; without it a Gabor pair is built.
    #[arg(long, requires = "psi")]
    pub phi: Option<PathBuf>,
    #[arg(long, requires = "phi")]
    pub psi: Option<PathBuf>,
    #[command(flatten)]
    pub pair: PairArgs,
    #[arg(long, default_value = "uniform:0.5:1")]
    pub symbol: SymbolSpec,
    #[arg(long, default_value = "weighted")]
    pub method: Method,
    /// Target n-term error.
    #[arg(long, default_value_t = 1e-8)]
    pub e: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Skip the direct-inversion oracle; the report's residual column stays blank.
    #[arg(long)]
    pub no_oracle: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Clone, Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    #[arg(long, default_value = "uniform:0.5:1")]
    pub symbol: SymbolSpec,
    #[arg(long, default_value_t = 1e-8)]
    pub e: f64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Clone, Debug, Args)]
pub struct MaskArgs {
    /// Input WAV; only the first L samples are processed.
    pub input: PathBuf,
    /// Masked output WAV (L samples).
    pub output: PathBuf,
    #[command(flatten)]
    pub lattice: LatticeArgs,
    #[arg(long)]
    pub mask: PathBuf,
    /// Also apply the inverse multiplier and write the recovered signal.
    #[arg(long)]
    pub invert_after: bool,
    /// Path of the recovered WAV; defaults to `<output>.recovered.wav`.
    #[arg(long)]
    pub recovered: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-12)]
    pub e: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Clone, Debug, Args)]
pub struct MakeMaskArgs {
    #[arg(long = "L", default_value_t = 1024)]
    pub len: usize,
    #[arg(long = "a", default_value_t = 256)]
    pub time_step: usize,
    #[arg(long = "M", default_value_t = 512)]
    pub channels: usize,
    /// `ones`, `const:<v>`, `band:<k0>:<k1>:<v>` (channels k0..k1 set to v,
    /// the rest 1) or `uniform:<lo>:<hi>`.
    #[arg(long, default_value = "ones")]
    pub kind: String,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Clone, Debug, Args)]
pub struct RandomFrameArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Clone, Debug, Args)]
pub struct ChirpArgs {
    pub out: PathBuf,
    #[arg(long, default_value_t = 1024)]
    pub rate: u32,
    #[arg(long, default_value_t = 1.0)]
    pub seconds: f64,
    #[arg(long, default_value_t = 20.0)]
    pub f0: f64,
    #[arg(long, default_value_t = 400.0)]
    pub f1: f64,
    #[arg(long, default_value_t = 0.5)]
    pub amplitude: f64,
}

/// Parses `args` (including the program name), runs the command and
/// returns the exit code. Normal output goes to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_IO } else { EXIT_OK };
            if code == EXIT_OK {
                let _ = write!(out, "{e}");
            } else {
                let _ = write!(err, "{e}");
            }
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn dispatch(command: Command, out: &mut dyn Write) -> CliResult<()> {
    match command {
        Command::Framecheck(a) => framecheck(&a, out).map(|_| ()),
        Command::Invert(a) => invert(&a, out).map(|_| ()),
        Command::BenchConvergence(a) => bench_convergence(&a, out).map(|_| ()),
        Command::ApplyMask(a) => apply_mask(&a, out).map(|_| ()),
        Command::MakeMask(a) => make_mask(&a, out),
        Command::RandomFrame(a) => random_frame(&a, out),
        Command::Chirp(a) => chirp(&a, out),
    }
}

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct FrameSummary {
    pub dim: usize,
    pub count: usize,
    pub lower: f64,
    pub upper: f64,
    pub is_frame: bool,
    pub condition: f64,
}

pub fn framecheck(args: &FramecheckArgs, out: &mut dyn Write) -> CliResult<FrameSummary> {
    let frame = FiniteFrame::new(io::read_matrix_file(&args.frame)?)?;
    let b = frame.bounds()?;
    let is_frame = frame.is_frame(DEFAULT_FRAME_TOL)?;
    let s = FrameSummary {
        dim: frame.dim(),
        count: frame.count(),
        lower: b.lower,
        upper: b.upper,
        is_frame,
        condition: if is_frame {
            b.condition()
        } else {
            f64::INFINITY
        },
    };
    writeln!(out, "d = {}", s.dim)?;
    writeln!(out, "N = {}", s.count)?;
    writeln!(out, "A = {:.16e}", s.lower)?;
    writeln!(out, "B = {:.16e}", s.upper)?;
    writeln!(out, "is_frame = {}", s.is_frame)?;
    writeln!(out, "condition = {:.16e}", s.condition)?;
    Ok(s)
}

#[derive(Debug)]
pub struct InvertOutcome {
    pub inverse: Mat<c64>,
    /// Empty for `direct`; two entries for `two_stage`.
    pub reports: Vec<InversionReport>,
    /// `‖M X − I‖₂`
    pub inverse_residual: f64,
}

pub fn invert(args: &InvertArgs, out: &mut dyn Write) -> CliResult<InvertOutcome> {
    let (phi, psi) = match (&args.phi, &args.psi) {
        (Some(p), Some(q)) => (
            FiniteFrame::new(io::read_matrix_file(p)?)?,
            FiniteFrame::new(io::read_matrix_file(q)?)?,
        ),
        _ => args.pair.frames()?,
    };
    if phi.dim() != psi.dim() || phi.count() != psi.count() {
        return Err(Error::ShapeMismatch {
            context: "frame files",
            expected: format!("{}x{}", phi.dim(), phi.count()),
            found: format!("{}x{}", psi.dim(), psi.count()),
        }
        .into());
    }
    let m = args.symbol.resolve(phi.count(), args.seed)?;
    let op = MultiplierOp::build(m.clone(), phi.clone(), psi.clone())?;
    let oracle = if args.no_oracle || args.method == Method::Direct {
        None
    } else {
        Some(inversion::direct_invert(op.matrix())?)
    };
    let oracle_ref = oracle.as_ref().map(|o| o.as_ref());
    let (inverse, reports) = match args.method {
        Method::Weighted | Method::WeightedApply => {
            let pre = inversion::weighted_precompute(&phi, &m)?;
            let (inv, rep) = inversion::weighted_invert(&pre, &psi, args.e, oracle_ref)?;
            (inv, vec![rep])
        }
        Method::TwoStage => {
            let stage1 = if oracle.is_some() {
                let mpp = MultiplierOp::build(m.clone(), phi.clone(), phi.clone())?;
                Some(inversion::direct_invert(mpp.matrix())?)
            } else {
                None
            };
            let res = inversion::two_stage_invert(
                &phi,
                &m,
                &psi,
                args.e,
                TwoStageOracles {
                    stage1: stage1.as_ref().map(|o| o.as_ref()),
                    stage2: oracle_ref,
                },
            )?;
            (res.inverse, vec![res.stage1, res.stage2])
        }
        Method::Neumann => {
            let (inv, rep) = inversion::neumann_invert(&phi, &psi, &m, args.e, oracle_ref)?;
            (inv, vec![rep])
        }
        Method::Direct => (inversion::direct_invert(op.matrix())?, Vec::new()),
        Method::Transformed => return Err(CliError::Usage(
            "transformed needs an explicit transform; use weighted, two_stage, neumann or direct"
                .into(),
        )),
    };
    let inverse_residual = inversion::inverse_residual(op.matrix(), inverse.as_ref())?;
    if let Some(path) = &args.out {
        io::write_matrix_file(path, inverse.as_ref())?;
    }
    if let Some(path) = &args.report {
        let mut w = BufWriter::new(File::create(path)?);
        write_reports(&mut w, args.method, &reports, inverse_residual)?;
        w.flush()?;
    }
    writeln!(out, "method = {}", args.method)?;
    for r in &reports {
        writeln!(out, "{}", r.header())?;
        write!(out, "final bound = {:.6e}", r.final_bound())?;
        match r.final_residual() {
            Some(x) => writeln!(out, ", final measured error = {x:.6e}")?,
            None => writeln!(out)?,
        }
    }
    writeln!(out, "||M X - I|| = {inverse_residual:.6e}")?;
    Ok(InvertOutcome {
        inverse,
        reports,
        inverse_residual,
    })
}

fn write_reports(
    w: &mut dyn Write,
    method: Method,
    reports: &[InversionReport],
    residual: f64,
) -> CliResult<()> {
    if reports.is_empty() {
        writeln!(w, "method={method} inverse_residual={residual:.16e}")?;
    }
    for r in reports {
        io::write_report(&mut *w, r)?;
    }
    Ok(())
}

pub fn bench_convergence(args: &BenchArgs, out: &mut dyn Write) -> CliResult<InversionReport> {
    let (phi, psi) = args.pair.frames()?;
    let m = args.symbol.resolve(phi.count(), args.seed)?;
    let pre = inversion::weighted_precompute(&phi, &m)?;
    // check the condition before paying for the oracle
    let mu = inversion::mu_perturbation(&phi, &psi)?;
    if !(mu < pre.mu_threshold()) {
        return Err(Error::ConditionViolated {
            method: "weighted",
            detail: format!(
                "mu = {mu:e} is not below a^2 A^2 / (b^2 B) = {:e}",
                pre.mu_threshold()
            ),
        }
        .into());
    }
    let op = MultiplierOp::build(m, phi, psi.clone())?;
    let oracle = inversion::direct_invert(op.matrix())?;
    let (_, report) = inversion::weighted_invert(&pre, &psi, args.e, Some(oracle.as_ref()))?;
    let mut w = BufWriter::new(File::create(&args.out)?);
    io::write_convergence_csv(&mut w, &report)?;
    w.flush()?;
    writeln!(out, "{}", report.header())?;
    writeln!(
        out,
        "rows = {}, final measured = {:.6e}, final bound = {:.6e}",
        report.bounds.len(),
        report.final_residual().unwrap_or(f64::NAN),
        report.final_bound()
    )?;
    Ok(report)
}

#[derive(Clone, Debug)]
pub struct MaskOutcome {
    /// Input block of length L.
    pub input: Vec<f64>,
    pub masked: Vec<f64>,
    pub recovered: Option<Vec<f64>>,
    /// Method used for recovery.
    pub method: Option<Method>,
    /// `‖recovered − input‖ / ‖input‖`
    pub recovery_error: Option<f64>,
}

fn rel_error(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt();
    let den: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    if den > 0.0 {
        num / den
    } else {
        num
    }
}

fn to_complex(x: &[f64]) -> Vec<c64> {
    x.iter().map(|&v| c64::new(v, 0.0)).collect()
}

/// Masks the leading block of a signal with `M_{m,P,P}`, `P` the canonical
/// tight frame of the Gabor system, and optionally applies the inverse.
pub fn mask_signal(
    samples: &[f64],
    lattice_args: &LatticeArgs,
    mask: &MaskGrid,
    invert_after: bool,
    e: f64,
) -> CliResult<MaskOutcome> {
    let system = lattice_args.system()?;
    let lat = *system.lattice();
    if samples.len() < lat.len() {
        return Err(Error::InvalidArgument(format!(
            "signal has {} samples, the lattice needs L = {}",
            samples.len(),
            lat.len()
        ))
        .into());
    }
    let m = mask.to_symbol(&lat)?;
    let parseval = system.frame().canonical_tight()?;
    let input = samples[..lat.len()].to_vec();
    let op = MultiplierOp::build(m.clone(), parseval.clone(), parseval.clone())?;
    let masked_c = op.apply(&to_complex(&input))?;
    let masked: Vec<f64> = masked_c.iter().map(|z| z.re).collect();
    let mut outcome = MaskOutcome {
        input,
        masked,
        recovered: None,
        method: None,
        recovery_error: None,
    };
    if !invert_after {
        return Ok(outcome);
    }
    let attempt8 = inversion::weighted_precompute(&parseval, &m)
        .and_then(|pre| inversion::weighted_apply(&pre, &parseval, &masked_c, e, None))
        .map(|(x, _)| (x, Method::Weighted));
    let result = match attempt8 {
        Ok(r) => Ok(r),
        Err(e8) => inversion::neumann_invert(&parseval, &parseval, &m, e, None)
            .map(|(inv, _)| (linalg::mat_vec(inv.as_ref(), &masked_c), Method::Neumann))
            .map_err(|e11| format!("weighted: {e8}; neumann: {e11}")),
    };
    match result {
        Ok((x, method)) => {
            let rec: Vec<f64> = x.iter().map(|z| z.re).collect();
            outcome.recovery_error = Some(rel_error(&rec, &outcome.input));
            outcome.recovered = Some(rec);
            outcome.method = Some(method);
            Ok(outcome)
        }
        Err(msg) => Err(CliError::RecoverySkipped(msg)),
    }
}

pub fn apply_mask(args: &MaskArgs, out: &mut dyn Write) -> CliResult<MaskOutcome> {
    let signal = io::read_wav(&args.input)?;
    let mask = io::read_mask_file(&args.mask)?;
    let lat = args.lattice.lattice()?;
    if signal.len() > lat.len() {
        writeln!(
            out,
            "note: processing the first {} of {} samples",
            lat.len(),
            signal.len()
        )?;
    }
    let result = mask_signal(
        &signal.samples,
        &args.lattice,
        &mask,
        args.invert_after,
        args.e,
    );
    let outcome = match result {
        Ok(o) => o,
        Err(CliError::RecoverySkipped(msg)) => {
            // the masked output is still written
            let o = mask_signal(&signal.samples, &args.lattice, &mask, false, args.e)?;
            io::write_wav(&args.output, &Signal::new(o.masked, signal.sample_rate)?)?;
            writeln!(out, "wrote {}", args.output.display())?;
            writeln!(out, "warning: recovery skipped: {msg}")?;
            return Err(CliError::RecoverySkipped(msg));
        }
        Err(e) => return Err(e),
    };
    io::write_wav(
        &args.output,
        &Signal::new(outcome.masked.clone(), signal.sample_rate)?,
    )?;
    writeln!(out, "wrote {}", args.output.display())?;
    if let (Some(rec), Some(method)) = (&outcome.recovered, outcome.method) {
        let path = args
            .recovered
            .clone()
            .unwrap_or_else(|| recovered_path(&args.output));
        io::write_wav(&path, &Signal::new(rec.clone(), signal.sample_rate)?)?;
        writeln!(
            out,
            "recovered with {method}, relative error {:.3e}, wrote {}",
            outcome.recovery_error.unwrap_or(f64::NAN),
            path.display()
        )?;
    }
    Ok(outcome)
}

fn recovered_path(output: &Path) -> PathBuf {
    let stem = output
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    output.with_file_name(format!("{stem}.recovered.wav"))
}

/// Mask described by `kind` (see [`MakeMaskArgs::kind`]).
pub fn build_mask(lattice: &GaborLattice, kind: &str, seed: u64) -> CliResult<MaskGrid> {
    let bad = || CliError::Usage(format!("unknown mask kind `{kind}`"));
    let num = |t: &str| t.parse::<f64>().map_err(|_| bad());
    let parts: Vec<&str> = kind.split(':').collect();
    let mask = match parts.as_slice() {
        ["ones"] => MaskGrid::constant(lattice, 1.0)?,
        ["const", v] => MaskGrid::constant(lattice, num(v)?)?,
        ["band", k0, k1, v] => {
            let (k0, k1) = (
                k0.parse::<usize>().map_err(|_| bad())?,
                k1.parse::<usize>().map_err(|_| bad())?,
            );
            let v = num(v)?;
            MaskGrid::from_fn(lattice, |k, _| if (k0..k1).contains(&k) { v } else { 1.0 })?
        }
        ["uniform", lo, hi] => {
            let sym = Symbol::uniform_real(lattice.atom_count(), num(lo)?, num(hi)?, seed)?;
            let vals = sym.values();
            MaskGrid::from_fn(lattice, |k, n| vals[lattice.index(k, n)].re)?
        }
        _ => return Err(bad()),
    };
    Ok(mask)
}

pub fn make_mask(args: &MakeMaskArgs, out: &mut dyn Write) -> CliResult<()> {
    let lat = GaborLattice::new(args.len, args.time_step, args.channels)?;
    let mask = build_mask(&lat, &args.kind, args.seed)?;
    io::write_mask_file(&args.out, &mask)?;
    writeln!(
        out,
        "wrote {} ({} x {})",
        args.out.display(),
        mask.rows(),
        mask.cols()
    )?;
    Ok(())
}

pub fn random_frame(args: &RandomFrameArgs, out: &mut dyn Write) -> CliResult<()> {
    let f = framemult::frames::random_frame(args.d, args.n, args.seed)?;
    io::write_matrix_file(&args.out, f.synthesis())?;
    writeln!(out, "wrote {}", args.out.display())?;
    Ok(())
}

/// Linear chirp `A sin(2π(f0 t + (f1 − f0) t² / (2T)))`.
pub fn chirp_samples(rate: u32, seconds: f64, f0: f64, f1: f64, amplitude: f64) -> Vec<f64> {
    let n = (rate as f64 * seconds).round() as usize;
    let rate = rate as f64;
    (0..n)
        .map(|i| {
            let t = i as f64 / rate;
            let phase = f0 * t + (f1 - f0) * t * t / (2.0 * seconds);
            amplitude * (2.0 * std::f64::consts::PI * phase).sin()
        })
        .collect()
}

pub fn chirp(args: &ChirpArgs, out: &mut dyn Write) -> CliResult<()> {
    let samples = chirp_samples(args.rate, args.seconds, args.f0, args.f1, args.amplitude);
    io::write_wav(&args.out, &Signal::new(samples, args.rate)?)?;
    writeln!(out, "wrote {}", args.out.display())?;
    Ok(())
}
