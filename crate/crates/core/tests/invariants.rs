//! Property tests for the potentials, the classical integrator and the
//! Riemann-sphere map.

use std::f64::consts::PI;

use complex_spectra::*;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn point() -> impl Strategy<Value = Complex64> {
    (0.05f64..4.0, -PI..PI).prop_map(|(r, a)| Complex64::from_polar(r, a))
}

fn integer_deformed() -> impl Strategy<Value = PotentialSpec> {
    (0i32..=4, any::<bool>(), any::<bool>()).prop_map(|(k, include_harmonic, conjugate)| {
        PotentialSpec::DeformedMonomial {
            epsilon: k as f64,
            include_harmonic,
            conjugate,
        }
    })
}

fn any_family() -> impl Strategy<Value = PotentialSpec> {
    prop_oneof![
        integer_deformed(),
        (-0.9f64..4.0, any::<bool>()).prop_map(|(epsilon, conjugate)| PotentialSpec::DeformedMonomial {
            epsilon,
            include_harmonic: false,
            conjugate,
        }),
        (-PI..PI).prop_map(|theta| PotentialSpec::RotatedQuartic { theta }),
        (2u32..=8, point()).prop_map(|(degree, coefficient)| PotentialSpec::PureMonomial { degree, coefficient }),
    ]
}

/// Points kept away from the branch cut of the deformed families.
fn off_cut(spec: &PotentialSpec, x: Complex64) -> bool {
    match spec {
        PotentialSpec::DeformedMonomial { conjugate, .. } => {
            let cut = if *conjugate { -PI / 2.0 } else { PI / 2.0 };
            (x.arg() - cut).abs() > 0.05
        }
        _ => true,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn integer_epsilon_matches_polynomial(spec in integer_deformed(), x in point()) {
        let PotentialSpec::DeformedMonomial { epsilon, include_harmonic, conjugate } = spec else { unreachable!() };
        let sign = if conjugate { -1.0 } else { 1.0 };
        let mut want = x * x * (c(0.0, sign) * x).powi(epsilon as i32);
        if include_harmonic {
            want += x * x;
        }
        let got = eval_potential(&spec, x).unwrap();
        prop_assert!((got - want).norm() <= 1e-12 * want.norm().max(1e-300), "{got} vs {want}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn force_is_minus_derivative(spec in any_family(), x in point()) {
        prop_assume!(off_cut(&spec, x));
        let h = 1e-5 * x.norm().max(1.0);
        let v = |z: Complex64| eval_potential(&spec, z).unwrap();
        let derivative = (v(x + h) - v(x - h)) / (2.0 * h);
        let force = eval_force(&spec, x).unwrap();
        prop_assert!((force + derivative).norm() <= 1e-6 * force.norm().max(1.0), "{force} vs {derivative}");
    }

    #[test]
    fn turning_points_solve_v_equals_e(spec in any_family(), e in point()) {
        prop_assume!(spec.integer_degree().is_some());
        let tps = turning_points(&spec, e).unwrap();
        prop_assert!(!tps.is_empty());
        for x in tps {
            let residual = (eval_potential(&spec, x).unwrap() - e).norm();
            prop_assert!(residual <= 1e-10 * e.norm().max(1.0), "x = {x}: {residual:e}");
        }
    }

    #[test]
    fn deformed_sectors_are_mirror_symmetric(epsilon in -0.95f64..4.0, conjugate in any::<bool>()) {
        let spec = PotentialSpec::DeformedMonomial { epsilon, include_harmonic: false, conjugate };
        let sectors = stokes_sectors(&spec).unwrap();
        for s in &sectors {
            let mirror = potentials::wrap_angle(PI - s.center_angle);
            prop_assert!(
                sectors.iter().any(|t| potentials::angle_distance(t.center_angle, mirror) <= 1e-9),
                "no mirror for {s:?}"
            );
        }
    }

    #[test]
    fn sphere_round_trip(r in 0.0f64..1e6, a in -PI..PI) {
        let x = Complex64::from_polar(r, a);
        let back = inverse_riemann_sphere_projection(riemann_sphere_projection(SpherePoint::Finite(x)));
        let SpherePoint::Finite(y) = back else { panic!("finite point mapped to infinity") };
        prop_assert!((x - y).norm() <= 1e-12 * x.norm().max(1.0), "{x} -> {y}");
        let [px, py, pz] = riemann_sphere_projection(SpherePoint::Finite(x));
        prop_assert!((px * px + py * py + pz * pz - 1.0).abs() <= 1e-14);
    }
}

/// `Re ∫₀^R √V(r e^{iθ}) e^{iθ} dr`, integrated along the ray with a
/// continuous square root.
fn ray_exponent(spec: &PotentialSpec, theta: f64, radius: f64) -> f64 {
    let steps = 4000;
    let dir = Complex64::from_polar(1.0, theta);
    let mut total = c(0.0, 0.0);
    let mut last: Option<Complex64> = None;
    for k in 0..steps {
        let r = (k as f64 + 0.5) * radius / steps as f64;
        let mut root = eval_potential(spec, dir * r).unwrap().sqrt();
        if let Some(prev) = last {
            if (root - prev).norm() > (root + prev).norm() {
                root = -root;
            }
        }
        last = Some(root);
        total += root * dir * (radius / steps as f64);
    }
    total.re.abs()
}

#[test]
fn sector_centers_maximize_decay() {
    let families = [
        PotentialSpec::harmonic(),
        PotentialSpec::cubic(),
        PotentialSpec::deformed(2.0),
        PotentialSpec::deformed(0.5),
        PotentialSpec::sextic(),
        PotentialSpec::inverted_quartic(),
        PotentialSpec::RotatedQuartic { theta: 1.0 },
    ];
    for spec in families {
        for s in stokes_sectors(&spec).unwrap() {
            let at = ray_exponent(&spec, s.center_angle, 10.0);
            assert!(at > 0.0);
            for offset in [-0.05, 0.05] {
                let beside = ray_exponent(&spec, s.center_angle + offset * s.opening, 10.0);
                assert!(at > beside, "{spec}: sector {} at {:.4}", s.label, s.center_angle);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn energy_is_conserved(x in point(), e in point(), sextic in any::<bool>()) {
        let spec = if sextic { PotentialSpec::sextic() } else { PotentialSpec::harmonic() };
        let start = classical::PhasePoint::with_energy(&spec, x * 0.5, e).unwrap();
        let config = IntegratorConfig::default().with_t_max(3.0);
        if let Ok(traj) = integrate(&spec, start, config) {
            let scale = traj.energy.norm().max(1.0);
            for s in &traj.samples {
                let h = classical::energy_of(&spec, s.x, s.p).unwrap();
                // Evaluating p² + V far out cannot do better than this.
                let round_off = 16.0 * f64::EPSILON * (s.p.norm_sqr() + eval_potential(&spec, s.x).unwrap().norm());
                let drift = (h - traj.energy).norm();
                prop_assert!(drift <= config.energy_drift_tol * scale + round_off, "t = {}: {drift:e}", s.t);
            }
            prop_assert!(traj.samples.windows(2).all(|w| w[1].t > w[0].t));
        }
    }

    #[test]
    fn pt_image_runs_backwards(x in point(), energy in 0.2f64..3.0) {
        let spec = PotentialSpec::cubic();
        let e = c(energy, 0.0);
        let x0 = x * 0.5;
        let p0 = classical::momentum_for_energy(&spec, x0, e).unwrap();
        let config = IntegratorConfig::default().with_t_max(1.0);
        let image = integrate(&spec, PhasePoint::new(-x0.conj(), p0.conj()), config);
        let reversed = integrate(&spec, PhasePoint::new(x0, -p0), config);
        if let (Ok(image), Ok(reversed)) = (image, reversed) {
            prop_assume!(image.termination == Termination::Completed && reversed.termination == Termination::Completed);
            let (a, b) = (image.last(), reversed.last());
            prop_assert!((a.t - b.t).abs() < 1e-12);
            prop_assert!((a.x + b.x.conj()).norm() <= 1e-6 * a.x.norm().max(1.0), "{} vs {}", a.x, b.x);
            prop_assert!((a.p + b.p.conj()).norm() <= 1e-6 * a.p.norm().max(1.0), "{} vs {}", a.p, b.p);
        }
    }

    #[test]
    fn real_axis_is_a_separatrix(x0 in -2.0f64..2.0, p0 in 0.2f64..3.0) {
        let spec = PotentialSpec::inverted_quartic();
        let start = PhasePoint::new(c(x0, 0.0), c(p0, 0.0));
        let traj = integrate(&spec, start, IntegratorConfig::default().with_t_max(5.0)).unwrap();
        prop_assert!(traj.samples.iter().all(|s| s.x.im.abs() <= 1e-8));
    }

    #[test]
    fn quadrature_agrees_with_integration(s in 0.1f64..2.5, upper in any::<bool>()) {
        let spec = PotentialSpec::inverted_quartic();
        let x0 = c(0.0, if upper { s } else { -s });
        let start = classical::PhasePoint::with_energy(&spec, x0, c(1.0, 0.0)).unwrap();
        let traj = integrate(&spec, start, IntegratorConfig::default().with_t_max(2.5)).unwrap();
        let orbit = detect_closed_orbit(&traj, 1e-6).unwrap();
        prop_assert!(orbit.closed);
        let quadrature = trajectory_quadrature_period(&traj).unwrap();
        prop_assert!((quadrature.re - orbit.period).abs() <= 1e-4 * orbit.period);
        prop_assert!((orbit.period - 1.854074).abs() <= 1e-3);
    }
}
