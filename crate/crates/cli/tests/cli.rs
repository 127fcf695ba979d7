use std::fs;
use std::path::Path;
use std::process::Command;

use framemult::io;
use framemult::{c64, linalg, Mat};
use framemult_cli::{run, EXIT_CONDITION, EXIT_IO, EXIT_OK, EXIT_SHAPE};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_framemult"))
}

fn call(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(
        std::iter::once("framemult").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_real(path: &Path, rows: &[&[f64]]) {
    let m = Mat::from_fn(rows.len(), rows[0].len(), |i, j| c64::new(rows[i][j], 0.0));
    io::write_matrix_file(path, m.as_ref()).unwrap();
}

#[test]
fn framecheck_identity_and_redundant() {
    let dir = tempfile::tempdir().unwrap();
    let id = dir.path().join("id.txt");
    write_real(&id, &[&[1.0, 0.0], &[0.0, 1.0]]);
    let out = bin().args(["framecheck", s(&id)]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("A = 1.0000000000000000e0"), "{text}");
    assert!(text.contains("B = 1.0000000000000000e0"), "{text}");
    assert!(text.contains("is_frame = true"));

    let red = dir.path().join("red.txt");
    write_real(&red, &[&[1.0, 1.0, 0.0], &[0.0, 0.0, 1.0]]);
    let (code, text, _) = call(&["framecheck", s(&red)]);
    assert_eq!(code, EXIT_OK);
    assert!(text.contains("A = 1.0000000000000000e0"), "{text}");
    assert!(text.contains("B = 2.0000000000000000e0"), "{text}");
    assert!(text.contains("condition = 2.0000000000000000e0"), "{text}");
}

#[test]
fn framecheck_reports_non_frames() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("deficient.txt");
    write_real(&p, &[&[1.0, 2.0], &[0.0, 0.0]]);
    let (code, text, _) = call(&["framecheck", s(&p)]);
    assert_eq!(code, EXIT_OK);
    assert!(text.contains("is_frame = false"));
    assert!(text.contains("condition = inf"));
}

#[test]
fn malformed_input_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.txt");
    fs::write(&p, "2 2\n1,0 0,0\n0,0 x,1\n").unwrap();
    let out = bin().args(["framecheck", s(&p)]).output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_IO));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 3"), "{err}");

    let (code, _, _) = call(&["framecheck", s(&dir.path().join("missing.txt"))]);
    assert_eq!(code, EXIT_IO);
    let (code, _, _) = call(&["invert", "--method", "nope"]);
    assert_eq!(code, EXIT_IO);
    let (code, _, _) = call(&["no-such-command"]);
    assert_eq!(code, EXIT_IO);
}

#[test]
fn help_exits_0() {
    let (code, out, _) = call(&["--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("bench-convergence"));
}

#[test]
fn invert_parseval_ones_is_identity_without_iterating() {
    let dir = tempfile::tempdir().unwrap();
    let frame = dir.path().join("p.txt");
    let h = std::f64::consts::FRAC_1_SQRT_2;
    write_real(&frame, &[&[h, h, 0.0, 0.0], &[0.0, 0.0, h, h]]);
    let inv = dir.path().join("inv.txt");
    let report = dir.path().join("report.txt");
    let (code, _, err) = call(&[
        "invert",
        "--phi",
        s(&frame),
        "--psi",
        s(&frame),
        "--symbol",
        "ones",
        "--out",
        s(&inv),
        "--report",
        s(&report),
    ]);
    assert_eq!(code, EXIT_OK, "{err}");
    let x = io::read_matrix_file(&inv).unwrap();
    let id = linalg::identity(2);
    assert!(linalg::spectral_distance(x.as_ref(), id.as_ref()).unwrap() < 1e-15);
    let text = fs::read_to_string(&report).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("method=weighted "), "{}", lines[0]);
    assert!(lines[0].ends_with(" n=0"), "{}", lines[0]);
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("0,"));
}

#[test]
fn iterative_methods_agree_with_direct() {
    let dir = tempfile::tempdir().unwrap();
    let phi = dir.path().join("phi.txt");
    let (code, _, _) = call(&[
        "random-frame",
        "--d",
        "4",
        "--n",
        "8",
        "--seed",
        "3",
        "--out",
        s(&phi),
    ]);
    assert_eq!(code, EXIT_OK);
    let dual = dir.path().join("dual.txt");
    let frame = framemult::FiniteFrame::new(io::read_matrix_file(&phi).unwrap()).unwrap();
    io::write_matrix_file(&dual, frame.canonical_dual().unwrap().synthesis()).unwrap();
    for (method, psi, symbol) in [
        ("weighted", &phi, "uniform:0.5:1"),
        ("prop8", &phi, "uniform:0.5:1"),
        ("two_stage", &phi, "const:1.01,0.01"),
        ("neumann", &dual, "const:1.1"),
    ] {
        let want = dir.path().join(format!("{method}.direct.txt"));
        let got = dir.path().join(format!("{method}.txt"));
        for (m, out) in [("direct", &want), (method, &got)] {
            let (code, _, err) = call(&[
                "invert",
                "--phi",
                s(&phi),
                "--psi",
                s(psi),
                "--method",
                m,
                "--symbol",
                symbol,
                "--e",
                "1e-12",
                "--out",
                s(out),
            ]);
            assert_eq!(code, EXIT_OK, "{m}: {err}");
        }
        let (x, y) = (
            io::read_matrix_file(&got).unwrap(),
            io::read_matrix_file(&want).unwrap(),
        );
        let rel = linalg::spectral_distance(x.as_ref(), y.as_ref()).unwrap()
            / linalg::spectral_norm(y.as_ref()).unwrap();
        assert!(rel < 1e-10, "{method}: {rel}");
    }
}

#[test]
fn neumann_accepts_truncated_reciprocal_diagonal() {
    let dir = tempfile::tempdir().unwrap();
    let n = 6;
    let e = Mat::from_fn(n, n, |i, j| {
        if i == j {
            c64::new(1.0, 0.0)
        } else {
            c64::ZERO
        }
    });
    let onb = dir.path().join("onb.txt");
    io::write_matrix_file(&onb, e.as_ref()).unwrap();
    let sym = dir.path().join("m.txt");
    let m =
        framemult::Symbol::from_real(&(1..=n).map(|k| 1.0 / k as f64).collect::<Vec<_>>()).unwrap();
    io::write_symbol_file(&sym, &m).unwrap();
    let spec = format!("file:{}", s(&sym));
    let out = dir.path().join("inv.txt");
    let (code, _, err) = call(&[
        "invert",
        "--phi",
        s(&onb),
        "--psi",
        s(&onb),
        "--method",
        "neumann",
        "--symbol",
        &spec,
        "--e",
        "1e-6",
        "--out",
        s(&out),
    ]);
    assert_eq!(code, EXIT_OK, "{err}");
    let got = io::read_matrix_file(&out).unwrap();
    for k in 0..n {
        assert!((got[(k, k)].re - (k + 1) as f64).abs() < 1e-5);
    }
}

#[test]
fn condition_violation_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let onb = dir.path().join("onb.txt");
    write_real(&onb, &[&[1.0, 0.0], &[0.0, 1.0]]);
    let far = dir.path().join("far.txt");
    write_real(&far, &[&[5.0, 0.0], &[0.0, 1.0]]);
    let out = bin()
        .args([
            "invert",
            "--phi",
            s(&onb),
            "--psi",
            s(&far),
            "--symbol",
            "ones",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_CONDITION));
    assert!(String::from_utf8(out.stderr).unwrap().contains("mu"));
}

#[test]
fn shape_mismatch_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.txt");
    let b = dir.path().join("b.txt");
    write_real(&a, &[&[1.0, 0.0], &[0.0, 1.0]]);
    write_real(&b, &[&[1.0, 0.0, 1.0], &[0.0, 1.0, 1.0]]);
    let (code, _, _) = call(&["invert", "--phi", s(&a), "--psi", s(&b)]);
    assert_eq!(code, EXIT_SHAPE);
}

#[test]
fn bench_without_perturbation_has_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("c.csv");
    let (code, _, err) = call(&[
        "bench-convergence",
        "--L",
        "64",
        "--a",
        "8",
        "--M",
        "16",
        "--window",
        "hann:16",
        "--perturb",
        "0",
        "--out",
        s(&csv),
    ]);
    assert_eq!(code, EXIT_OK, "{err}");
    let text = fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "iteration,measured_error,predicted_bound");
    assert_eq!(lines.len(), 2, "{text}");
}

#[test]
fn bench_is_deterministic_and_dominated() {
    let dir = tempfile::tempdir().unwrap();
    let run_once = |name: &str| {
        let p = dir.path().join(name);
        let out = bin()
            .args([
                "bench-convergence",
                "--L",
                "128",
                "--a",
                "16",
                "--M",
                "32",
                "--window",
                "hann:32",
                "--e",
                "1e-10",
            ])
            .args(["--out", s(&p)])
            .output()
            .unwrap();
        assert_eq!(
            out.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        fs::read(&p).unwrap()
    };
    let first = run_once("a.csv");
    assert_eq!(first, run_once("b.csv"));
    let text = String::from_utf8(first).unwrap();
    let rows: Vec<(f64, f64)> = text
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[1].parse().unwrap(), f[2].parse().unwrap())
        })
        .collect();
    assert!(rows.len() >= 2);
    assert!(rows.iter().all(|(m, b)| m <= b));
    assert!(rows.last().unwrap().1 <= 1e-10);
}

#[test]
fn literal_gaussian_pair_violates_condition() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, err) = call(&[
        "bench-convergence",
        "--L",
        "64",
        "--a",
        "8",
        "--M",
        "16",
        "--window",
        "hann:16",
        "--literal-psi",
        "--out",
        s(&dir.path().join("c.csv")),
    ]);
    assert_eq!(code, EXIT_CONDITION, "{err}");
}

fn chirp(dir: &Path) -> std::path::PathBuf {
    let p = dir.join("in.wav");
    let (code, _, _) = call(&["chirp", s(&p), "--rate", "256", "--seconds", "0.5"]);
    assert_eq!(code, EXIT_OK);
    p
}

const SMALL: [&str; 8] = [
    "--L", "128", "--a", "16", "--M", "32", "--window", "hann:32",
];

#[test]
fn all_ones_mask_is_identity() {
    let dir = tempfile::tempdir().unwrap();
    let input = chirp(dir.path());
    let mask = dir.path().join("ones.txt");
    let (code, _, _) = call(&[
        "make-mask",
        "--L",
        "128",
        "--a",
        "16",
        "--M",
        "32",
        "--out",
        s(&mask),
    ]);
    assert_eq!(code, EXIT_OK);
    let out = dir.path().join("out.wav");
    let mut args = vec!["apply-mask", s(&input), s(&out), "--mask", s(&mask)];
    args.extend(SMALL);
    let (code, _, err) = call(&args);
    assert_eq!(code, EXIT_OK, "{err}");
    assert_eq!(io::read_wav(&out).unwrap(), io::read_wav(&input).unwrap());
}

#[test]
fn binary_mask_contracts_energy_and_skips_recovery() {
    let dir = tempfile::tempdir().unwrap();
    let input = chirp(dir.path());
    let mask = dir.path().join("half.txt");
    let (code, _, _) = call(&[
        "make-mask",
        "--L",
        "128",
        "--a",
        "16",
        "--M",
        "32",
        "--kind",
        "band:0:16:0",
        "--out",
        s(&mask),
    ]);
    assert_eq!(code, EXIT_OK);
    let out = dir.path().join("out.wav");
    let mut args = vec![
        "apply-mask",
        s(&input),
        s(&out),
        "--mask",
        s(&mask),
        "--invert-after",
    ];
    args.extend(SMALL);
    let (code, text, err) = call(&args);
    assert_eq!(code, EXIT_CONDITION, "{text}{err}");
    assert!(text.contains("recovery skipped"));
    let energy = |p: &Path| {
        io::read_wav(p)
            .unwrap()
            .samples
            .iter()
            .map(|x| x * x)
            .sum::<f64>()
    };
    let (ein, eout) = (energy(&input), energy(&out));
    assert!(eout <= ein * (1.0 + 1e-6), "{eout} > {ein}");
    assert!(eout < 0.99 * ein);
    assert!(!dir.path().join("out.recovered.wav").exists());
}

#[test]
fn attenuation_mask_is_undone() {
    let dir = tempfile::tempdir().unwrap();
    let input = chirp(dir.path());
    let mask = dir.path().join("att.txt");
    let (code, _, _) = call(&[
        "make-mask",
        "--L",
        "128",
        "--a",
        "16",
        "--M",
        "32",
        "--kind",
        "band:2:10:0.01",
        "--out",
        s(&mask),
    ]);
    assert_eq!(code, EXIT_OK);
    let out = dir.path().join("out.wav");
    let mut args = vec![
        "apply-mask",
        s(&input),
        s(&out),
        "--mask",
        s(&mask),
        "--invert-after",
    ];
    args.extend(SMALL);
    let (code, text, err) = call(&args);
    assert_eq!(code, EXIT_OK, "{err}");
    assert!(text.contains("recovered with weighted"), "{text}");
    let rec = io::read_wav(dir.path().join("out.recovered.wav")).unwrap();
    let orig = io::read_wav(&input).unwrap();
    let worst = rec.samples[..128]
        .iter()
        .zip(&orig.samples)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    assert!(worst <= 2.0 / 32768.0, "{worst}");
}

#[test]
fn shipped_masks_parse_on_the_default_lattice() {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let lat = framemult::GaborLattice::new(1024, 256, 512).unwrap();
    for entry in fs::read_dir(data).unwrap() {
        let mask = io::read_mask_file(entry.unwrap().path()).unwrap();
        assert_eq!((mask.rows(), mask.cols()), (512, 4));
        mask.to_symbol(&lat).unwrap();
    }
}

#[test]
fn stereo_wav_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("stereo.wav");
    let mut b = Vec::new();
    b.extend_from_slice(b"RIFF");
    b.extend_from_slice(&(36u32 + 8).to_le_bytes());
    b.extend_from_slice(b"WAVEfmt ");
    b.extend_from_slice(&16u32.to_le_bytes());
    b.extend_from_slice(&1u16.to_le_bytes());
    b.extend_from_slice(&2u16.to_le_bytes());
    b.extend_from_slice(&8000u32.to_le_bytes());
    b.extend_from_slice(&32000u32.to_le_bytes());
    b.extend_from_slice(&4u16.to_le_bytes());
    b.extend_from_slice(&16u16.to_le_bytes());
    b.extend_from_slice(b"data");
    b.extend_from_slice(&8u32.to_le_bytes());
    b.extend_from_slice(&[0u8; 8]);
    fs::write(&p, b).unwrap();
    let mask = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/mask_ones_L1024_a256_M512.txt");
    let (code, _, err) = call(&[
        "apply-mask",
        s(&p),
        s(&dir.path().join("o.wav")),
        "--mask",
        s(&mask),
    ]);
    assert_eq!(code, EXIT_IO);
    assert!(err.contains("mono") || err.contains("channel"), "{err}");
}
