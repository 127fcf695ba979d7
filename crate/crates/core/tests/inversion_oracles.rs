use framemult::frames::{gaussian_matrix, random_frame};
use framemult::inversion::{self, TwoStageOracles};
use framemult::{c64, linalg, Error, FiniteFrame, Mat, MultiplierOp, Symbol};

fn c(x: f64) -> c64 {
    c64::new(x, 0.0)
}

fn direct(m: &Symbol, phi: &FiniteFrame, psi: &FiniteFrame) -> Mat<c64> {
    let op = MultiplierOp::build(m.clone(), phi.clone(), psi.clone()).unwrap();
    inversion::direct_invert(op.matrix()).unwrap()
}

fn perturbed(phi: &FiniteFrame, mu: f64, seed: u64) -> FiniteFrame {
    let e = gaussian_matrix(phi.dim(), phi.count(), seed);
    let s = (mu / linalg::spectral_norm(e.as_ref()).unwrap().powi(2)).sqrt();
    FiniteFrame::new(phi.synthesis() + linalg::scale(e.as_ref(), c(s)).as_ref()).unwrap()
}

#[test]
fn diagonal_symbol_on_basis_inverts_entrywise() {
    let onb = FiniteFrame::orthonormal_basis(5).unwrap();
    let vals = [0.6, 0.7, 0.8, 0.9, 1.0];
    let m = Symbol::from_real(&vals).unwrap();
    let pre = inversion::weighted_precompute(&onb, &m).unwrap();
    let (x, rep) = inversion::weighted_invert(&pre, &onb, 1e-12, None).unwrap();
    assert_eq!(rep.n_planned, 0);
    for (k, v) in vals.iter().enumerate() {
        assert!((x[(k, k)] - c(1.0 / v)).norm() < 1e-14);
    }
}

#[test]
fn bounds_decay_geometrically() {
    let phi = random_frame(6, 12, 1).unwrap();
    let m = Symbol::uniform_real(12, 0.5, 1.0, 1).unwrap();
    let pre = inversion::weighted_precompute(&phi, &m).unwrap();
    let psi = perturbed(&phi, 0.5 * pre.mu_threshold(), 2);
    let (_, rep) = inversion::weighted_invert(&pre, &psi, 1e-10, None).unwrap();
    assert!(rep.ratio > 0.0 && rep.ratio < 1.0);
    assert!((rep.bounds[0] - rep.ratio * rep.scale).abs() <= 1e-15 * rep.scale);
    for w in rep.bounds.windows(2) {
        assert!((w[1] / w[0] - rep.ratio).abs() < 1e-12);
    }
    assert!(rep.final_bound() <= 1e-10);
    assert!(rep.bounds[rep.bounds.len() - 2] > 1e-10);
}

#[test]
fn plan_iterations_reference_values() {
    assert_eq!(inversion::plan_iterations(0.5, 1.0, 1e-3).unwrap(), 9);
    assert_eq!(inversion::plan_iterations(0.0, 1.0, 1e-3).unwrap(), 0);
    assert_eq!(inversion::plan_iterations(0.1, 1.0, 2e-8).unwrap(), 7);
    assert_eq!(inversion::plan_iterations(0.1, 1.0, 0.5e-8).unwrap(), 8);
    assert!(inversion::plan_iterations(1.0, 1.0, 1e-3).is_err());
}

#[test]
fn methods_agree_where_their_conditions_overlap() {
    for seed in 0..10 {
        let phi = random_frame(5, 10, 100 + seed).unwrap();
        let b = phi.bounds().unwrap();
        let lambda = 0.3 * b.lower / b.upper;
        let m = Symbol::from_real(
            &(0..10)
                .map(|k| 1.0 + lambda * ((k as f64) * 0.7).cos())
                .collect::<Vec<_>>(),
        )
        .unwrap();
        let psi = perturbed(&phi, 1e-4 * b.lower, 200 + seed);
        let want = direct(&m, &phi, &psi);

        let pre = inversion::weighted_precompute(&phi, &m).unwrap();
        let (x8, _) = inversion::weighted_invert(&pre, &psi, 1e-12, None).unwrap();
        let out9 =
            inversion::two_stage_invert(&phi, &m, &psi, 1e-12, TwoStageOracles::default()).unwrap();
        let f = linalg::column(gaussian_matrix(5, 1, 300 + seed).as_ref(), 0);
        let (y, _) = inversion::weighted_apply(&pre, &psi, &f, 1e-12, None).unwrap();
        for x in [&x8, &out9.inverse] {
            let rel = linalg::spectral_distance(x.as_ref(), want.as_ref()).unwrap()
                / linalg::spectral_norm(want.as_ref()).unwrap();
            assert!(rel < 1e-10, "{rel}");
        }
        let yw = linalg::mat_vec(want.as_ref(), &f);
        assert!(linalg::vec_distance(&y, &yw) <= 1e-10 * linalg::vec_norm(&yw));
    }
}

#[test]
fn measured_error_stays_under_the_bound() {
    let mut checked = 0;
    for seed in 0..50 {
        let d = 3 + seed as usize % 6;
        let phi = random_frame(d, 2 * d, 1000 + seed).unwrap();
        let m = if seed % 2 == 0 {
            Symbol::uniform_real(2 * d, 0.3, 1.5, seed).unwrap()
        } else {
            Symbol::uniform_real(2 * d, -1.5, -0.3, seed).unwrap()
        };
        let pre = inversion::weighted_precompute(&phi, &m).unwrap();
        let frac = 0.1 + 0.8 * (seed as f64 / 50.0);
        let psi = perturbed(&phi, frac * pre.mu_threshold(), 2000 + seed);
        let oracle = direct(&m, &phi, &psi);
        let (_, rep) = inversion::weighted_invert(&pre, &psi, 1e-9, Some(oracle.as_ref())).unwrap();
        assert!(
            rep.dominance_violations(1e-9, 1e-13).is_empty(),
            "seed {seed}"
        );
        assert!(rep.sandwich.unwrap().holds());
        checked += rep.residuals.len();
    }
    assert!(checked > 100);
}

#[test]
fn weighted_rejects_beyond_threshold_and_zero_symbols() {
    let phi = random_frame(4, 8, 7).unwrap();
    let m = Symbol::uniform_real(8, 0.5, 1.0, 7).unwrap();
    let pre = inversion::weighted_precompute(&phi, &m).unwrap();
    let psi = perturbed(&phi, 1.5 * pre.mu_threshold(), 8);
    assert!(matches!(
        inversion::weighted_invert(&pre, &psi, 1e-8, None),
        Err(Error::ConditionViolated { .. })
    ));
    let mut vals = m.values().to_vec();
    vals[3] = c64::ZERO;
    let z = Symbol::new(vals).unwrap();
    assert!(matches!(
        inversion::weighted_precompute(&phi, &z),
        Err(Error::ZeroSymbol { index: 3 })
    ));
}

#[test]
fn mixed_sign_symbols_are_rejected() {
    let phi = random_frame(4, 8, 9).unwrap();
    let m = Symbol::from_real(&[1.0, -1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0]).unwrap();
    assert!(inversion::weighted_precompute(&phi, &m).is_err());
}

#[test]
fn transformed_matches_direct_for_both_orders() {
    for seed in 0..10 {
        let phi = random_frame(4, 7, 400 + seed).unwrap();
        let g = gaussian_matrix(4, 4, 500 + seed)
            + linalg::scale(linalg::identity(4).as_ref(), c(3.0)).as_ref();
        let m = Symbol::uniform_real(7, 0.5, 1.0, seed).unwrap();
        let psi = phi.transformed(g.as_ref()).unwrap();
        let out = inversion::transformed_invert(&phi, g.as_ref(), &m, 1e-12, None).unwrap();
        for (x, want) in [
            (&out.inverse_phipsi, direct(&m, &phi, &psi)),
            (&out.inverse_psiphi, direct(&m, &psi, &phi)),
        ] {
            let rel = linalg::spectral_distance(x.as_ref(), want.as_ref()).unwrap()
                / linalg::spectral_norm(want.as_ref()).unwrap();
            assert!(rel < 1e-10, "{rel}");
        }
    }
}

#[test]
fn neumann_with_exact_and_approximate_duals() {
    let phi = random_frame(5, 9, 11).unwrap();
    let canon = phi.canonical_dual().unwrap();
    let m = Symbol::from_real(&[1.1, 0.9, 1.05, 0.95, 1.0, 1.02, 0.98, 1.08, 0.92]).unwrap();
    for (psi, eps_max) in [(canon, 1e-12), (phi.approximate_dual(3).unwrap().0, 1.0)] {
        let want = direct(&m, &phi, &psi);
        match inversion::neumann_invert(&phi, &psi, &m, 1e-11, Some(want.as_ref())) {
            Ok((_, rep)) => {
                assert!(rep.constants.epsilon.unwrap() < eps_max);
                assert!(rep.dominance_violations(1e-9, 1e-13).is_empty());
                assert!(rep.final_residual().unwrap() <= 1e-11 + 1e-13);
            }
            Err(Error::ConditionViolated { .. }) => assert!(eps_max == 1.0),
            Err(e) => panic!("{e}"),
        }
    }
}

#[test]
fn mu_probes_never_exceed_mu() {
    let phi = random_frame(6, 10, 12).unwrap();
    let psi = perturbed(&phi, 0.3, 13);
    let mu = inversion::mu_perturbation(&phi, &psi).unwrap();
    assert!((mu - 0.3).abs() < 1e-12);
    let seq = inversion::mu_probe_lower_bound(&phi, &psi, 64, 1, framemult::ExecPolicy::Sequential)
        .unwrap();
    let par = inversion::mu_probe_lower_bound(&phi, &psi, 64, 1, framemult::ExecPolicy::Parallel)
        .unwrap();
    assert_eq!(seq.to_bits(), par.to_bits());
    assert!(seq <= mu * (1.0 + 1e-12));
    assert!(seq > 0.1 * mu);
}
