mod common;

use complex_spectra::potentials::sector_pair_by_label;
use complex_spectra::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn levels(problem: &ShootingProblem, n_max: usize) -> Vec<Complex64> {
    find_eigenvalues(problem, n_max).unwrap().into_iter().map(|r| r.energy).collect()
}

fn pair_problem(spec: PotentialSpec, label: &str) -> ShootingProblem {
    ShootingProblem::new(spec, sector_pair_by_label(&spec, label).unwrap()).unwrap()
}

#[test]
fn hermitian_spectra_match_finite_differences() {
    let cases: [(PotentialSpec, fn(f64) -> f64); 2] =
        [(PotentialSpec::harmonic(), |x| x * x), (PotentialSpec::sextic(), |x| x.powi(6))];
    for (spec, v) in cases {
        let oracle = common::extrapolated_levels(v, 12.0, 4000, 6);
        let problem = match pt_sector_pair(&spec) {
            Ok(pair) => ShootingProblem::new(spec, pair).unwrap(),
            Err(_) => pair_problem(spec, "AE"),
        };
        let shot = levels(&problem, 5);
        for (e, o) in shot.iter().zip(&oracle) {
            assert!((e - c(*o, 0.0)).norm() <= 1e-6 * o, "{spec}: {e} vs {o}");
        }
    }
}

#[test]
fn cubic_ground_state_matches_complex_finite_differences() {
    let oracle = common::extrapolated_level_near(|x| c(0.0, x.powi(3)), 12.0, 4000, c(1.2, 0.0));
    let problem = ShootingProblem::pt(PotentialSpec::cubic()).unwrap();
    let shot = levels(&problem, 1);
    assert!((shot[0] - oracle).norm() < 1e-8, "{} vs {oracle}", shot[0]);
    assert!(wronskian_mismatch(&problem, oracle).unwrap().norm() <= problem.root_tol);
}

#[test]
fn negative_epsilon_ground_state_matches_finite_differences() {
    for eps in [-0.5, -0.9] {
        let spec = PotentialSpec::deformed(eps);
        let v = move |x: f64| eval_potential(&spec, c(x, 0.0)).unwrap();
        let oracle = common::extrapolated_level_near(v, 25.0, 6000, c(1.0, 0.0));
        let shot = levels(&ShootingProblem::pt(spec).unwrap(), 0)[0];
        assert!((shot - oracle).norm() <= 1e-5 * oracle.norm(), "eps = {eps}: {shot} vs {oracle}");
    }
}

#[test]
fn harmonic_mismatch_at_and_off_eigenvalues() {
    let problem = ShootingProblem::pt(PotentialSpec::harmonic()).unwrap();
    assert!(wronskian_mismatch(&problem, c(1.0, 0.0)).unwrap().norm() <= problem.root_tol);
    assert!(wronskian_mismatch(&problem, c(2.0, 0.0)).unwrap().norm() >= 10.0 * problem.root_tol);
}

#[test]
fn pt_spectra_are_real_for_nonnegative_epsilon() {
    for eps in [0.5, 1.5, 3.0] {
        let problem = ShootingProblem::pt(PotentialSpec::deformed(eps)).unwrap();
        for e in levels(&problem, 20) {
            assert!(e.im.abs() <= 1e-7 * e.re.abs().max(1.0), "eps = {eps}: {e}");
            assert!(e.re > 0.0);
        }
    }
}

#[test]
fn mirror_pair_gives_conjugate_spectrum() {
    let spec = PotentialSpec::cubic();
    for (a, b) in [("AC", "BD"), ("BE", "CE")] {
        let left = levels(&pair_problem(spec, a), 3);
        let right = levels(&pair_problem(spec, b), 3);
        for (x, y) in left.iter().zip(&right) {
            assert!((x - y.conj()).norm() <= 1e-8 * x.norm(), "{a}/{b}: {x} vs {y}");
        }
    }
}

#[test]
fn doubling_the_radius_changes_nothing() {
    for spec in [PotentialSpec::cubic(), PotentialSpec::deformed(2.0), PotentialSpec::deformed(0.5)] {
        let problem = ShootingProblem::pt(spec).unwrap();
        let base = levels(&problem, 6);
        let far = ShootingProblem {
            ray_radius: 2.0 * problem.radius_for(base[6]),
            ..problem.clone()
        };
        for (e, f) in base.iter().zip(levels(&far, 6)) {
            assert!((e - f).norm() <= 1e-8 * e.norm(), "{spec}: {e} vs {f}");
        }
    }
}

#[test]
fn conjugate_family_has_the_same_spectrum() {
    for eps in [1.0, 2.0] {
        let plain = levels(&ShootingProblem::pt(PotentialSpec::deformed(eps)).unwrap(), 5);
        let conjugate = PotentialSpec::DeformedMonomial {
            epsilon: eps,
            include_harmonic: false,
            conjugate: true,
        };
        let mirrored = levels(&ShootingProblem::pt(conjugate).unwrap(), 5);
        for (a, b) in plain.iter().zip(&mirrored) {
            assert!((a - b).norm() <= 1e-9 * a.norm(), "eps = {eps}: {a} vs {b}");
        }
    }
}

#[test]
fn epsilon_two_matches_inverted_quartic_pair() {
    let grid = [1.9, 1.95, 2.0];
    let scan = scan_epsilon(false, &grid, 5).unwrap();
    let direct = levels(&ShootingProblem::pt(PotentialSpec::deformed(2.0)).unwrap(), 5);
    for (r, d) in scan.records[2].iter().zip(&direct) {
        assert!((r.energy - d).norm() <= 1e-8 * d.norm());
    }
}

#[test]
fn sextic_imaginary_axis_pair_is_negative_hermitian() {
    let spec = PotentialSpec::sextic();
    let ae = levels(&pair_problem(spec, "AE"), 2);
    let cg = levels(&pair_problem(spec, "CG"), 2);
    for (a, g) in ae.iter().zip(&cg) {
        assert!((a + g).norm() <= 1e-8 * a.norm(), "{a} vs {g}");
    }
}

#[test]
fn wkb_error_shrinks_with_n() {
    let cases = [
        ShootingProblem::pt(PotentialSpec::cubic()).unwrap(),
        pair_problem(PotentialSpec::sextic(), "AE"),
        pair_problem(PotentialSpec::sextic(), "BD"),
        ShootingProblem::pt(PotentialSpec::deformed(2.0)).unwrap(),
    ];
    for problem in cases {
        let shot = levels(&problem, 20);
        let errors: Vec<f64> = (0..=20)
            .map(|n| {
                let w = wkb_energy_estimate(&problem.spec, &problem.pair, n).unwrap();
                (w - shot[n]).norm() / shot[n].norm()
            })
            .collect();
        let label = problem.pair.label();
        assert!(errors[10..].iter().all(|&e| e < 0.02), "{label}: {errors:?}");
        assert!(errors[20] < errors[2], "{label}: {errors:?}");
    }
}

#[test]
fn wkb_scaling_law() {
    for spec in [PotentialSpec::sextic(), PotentialSpec::inverted_quartic(), PotentialSpec::cubic()] {
        let pair = pt_sector_pair(&spec)
            .or_else(|_| enumerate_sector_pairs(&spec).map(|p| p.into_iter().find(|p| p.pt_symmetric).unwrap()))
            .unwrap();
        let n = spec.integer_degree().unwrap() as f64;
        let ratio = (wkb_energy_estimate(&spec, &pair, 80).unwrap() / wkb_energy_estimate(&spec, &pair, 40).unwrap()).norm();
        let want = 2f64.powf(2.0 * n / (n + 2.0));
        assert!((ratio - want).abs() <= 0.02 * want, "{spec}: {ratio} vs {want}");
    }
}

#[test]
fn pt_hermitian_ratio_approaches_limit() {
    let limit = 2f64.powf(1.5);
    for n in [10, 40] {
        let wkb = pt_hermitian_ratio(n, RatioSource::Wkb).unwrap();
        assert!((wkb - limit).abs() <= 1e-9 * limit, "n = {n}: {wkb}");
    }
    let r0 = pt_hermitian_ratio(0, RatioSource::Shooting).unwrap();
    assert!((r0 - 2.439 / 1.145).abs() <= 5e-3, "{r0}");
    let r10 = pt_hermitian_ratio(10, RatioSource::Shooting).unwrap();
    assert!((r10 - limit).abs() < (r0 - limit).abs(), "{r0} then {r10}");
}

#[test]
fn wavefunction_decays_on_both_arms() {
    let problem = ShootingProblem::pt(PotentialSpec::deformed(2.0)).unwrap();
    let e0 = levels(&problem, 0)[0];
    let sample = wavefunction_samples(&problem, e0).unwrap();
    let first = sample.psi.first().unwrap().norm();
    let last = sample.psi.last().unwrap().norm();
    let peak = sample.psi.iter().map(|p| p.norm()).fold(0.0, f64::max);
    assert!(first < 1e-6 * peak && last < 1e-6 * peak, "ends {first:e} {last:e}, peak {peak}");
}
