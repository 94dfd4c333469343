use hessian_radial::{
    cauchy_young_slack, detect_blowup, example_4_1_threshold, example_4_2_threshold, ko_classify_analytic,
    ko_classify_numeric, verify_subsolution, BlowupStatus, KoClass, Nonlinearity, ProblemParams,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn builtin_grid() -> Vec<Nonlinearity> {
    let mut out = Vec::new();
    for q in [0.0, 0.25, 0.5, 0.75, 1.25, 1.5, 2.0] {
        out.push(Nonlinearity::power_cutoff(q).unwrap());
    }
    for alpha in [0.0, 0.5, 1.0, 2.0] {
        out.push(Nonlinearity::exponential(alpha).unwrap());
    }
    out
}

#[test]
fn numeric_and_analytic_classifiers_agree() {
    for k in 1..=3 {
        for f in builtin_grid() {
            let analytic = ko_classify_analytic(&f, k).unwrap().classification;
            assert_ne!(analytic, KoClass::Inconclusive);
            let numeric = ko_classify_numeric(&f, k, 1.0, 1e6, 2000).unwrap().classification;
            assert!(
                numeric == analytic || numeric == KoClass::Inconclusive,
                "{f} k={k}: {numeric:?} vs {analytic:?}"
            );
        }
    }
}

#[test]
fn tail_exponent_over_four_decades() {
    for k in 1..=3 {
        let kf = k as f64;
        for q in [0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 2.0] {
            let f = Nonlinearity::power_cutoff(q).unwrap();
            let v = ko_classify_numeric(&f, k, 10.0, 1e5, 500).unwrap();
            let p = v.evidence.tail_exponent_estimate.unwrap();
            assert!((p - (kf * q + 1.0) / (kf + 1.0)).abs() < 0.02, "q={q} k={k}: {p}");
        }
    }
}

#[test]
fn constant_rescaling_keeps_the_classification() {
    let mut rng = StdRng::seed_from_u64(11);
    for k in 1..=3 {
        for f in builtin_grid() {
            let base = ko_classify_numeric(&f, k, 1.0, 1e5, 800).unwrap().classification;
            for _ in 0..3 {
                let c = 10f64.powf(rng.random_range(-2.0..2.0));
                let scaled = f.scaled(c).unwrap();
                let v = ko_classify_numeric(&scaled, k, 1.0, 1e5, 800).unwrap().classification;
                assert_eq!(v, base, "{f} scaled by {c}");
            }
        }
    }
}

/// Diverging integral in the sharp regime means a global solution; a
/// converging one means blow-up at a finite radius.
#[test]
fn classification_matches_solver_behaviour() {
    let diverging = ["const:1", "exp:0", "pow:0.5", "pow:1"];
    let converging = ["exp:0.5", "exp:1", "pow:1.5", "pow:2"];
    for (n, k) in [(2, 1), (3, 1), (3, 2), (3, 3)] {
        let mu0 = hessian_radial::mu_zero(n, k).unwrap();
        for mu in [0.0, 0.5 * mu0] {
            let p = ProblemParams::new(n, k, mu).unwrap();
            assert!(p.ko_equiv_regime());
            for spec in diverging {
                let f: Nonlinearity = spec.parse().unwrap();
                assert_eq!(ko_classify_analytic(&f, k).unwrap().classification, KoClass::Diverges);
                for a in [0.0, 1.0] {
                    let r = detect_blowup(&p, &f, a, 50.0, 1e300, 1e-2).unwrap();
                    assert_eq!(
                        r.status,
                        BlowupStatus::Global { r_max: 50.0 },
                        "{spec} ({n},{k},{mu}) a={a}"
                    );
                }
            }
            for spec in converging {
                let f: Nonlinearity = spec.parse().unwrap();
                assert_eq!(ko_classify_analytic(&f, k).unwrap().classification, KoClass::Converges);
                // the cut-off power vanishes at a = 0, where φ ≡ 0 is the solution
                let starts: &[f64] = if spec.starts_with("pow") { &[1.0] } else { &[0.0, 1.0] };
                for &a in starts {
                    let r = detect_blowup(&p, &f, a, 50.0, 1e300, 1e-2).unwrap();
                    assert!(
                        matches!(r.status, BlowupStatus::FiniteBlowup { .. }),
                        "{spec} ({n},{k},{mu}) a={a}: {:?}",
                        r.status
                    );
                }
            }
        }
    }
}

#[test]
fn slack_is_nonnegative_at_threshold() {
    for n in 2..=6 {
        for mu in [-3.0, -1.0, -0.5, -0.1, 0.0, 0.4] {
            let a = example_4_2_threshold(n, mu);
            for i in 0..=20_000 {
                let r = 100.0 * i as f64 / 20_000.0;
                assert!(cauchy_young_slack(n, mu, a, r) >= -1e-12, "n={n} mu={mu} r={r}");
            }
        }
    }
}

#[test]
fn threshold_is_sharp_at_the_origin() {
    for n in 2..=5 {
        for k in 1..=n {
            let t = example_4_1_threshold(n, k).unwrap();
            for mu in [0.0, 0.2] {
                let p = ProblemParams::new(n, k, mu).unwrap();
                for alpha in [-2.0, 0.0, 0.5, 1.0] {
                    for scale in [0.9, 0.999, 1.0, 1.001, 1.5] {
                        let rep = verify_subsolution(&p, scale * t, alpha, &[0.0]).unwrap();
                        assert_eq!(rep.all_pass, scale >= 1.0, "({n},{k},{mu},{alpha}) x{scale}");
                    }
                }
            }
        }
    }
}
