use locpriv::geometry::circumcenter;
use locpriv::harmonic::{harmonic_log_density, sample_exit, ExitPoint};
use locpriv::inference::{attack, mse_of_draws, AttackConfig};
use locpriv::rng::Stream;
use locpriv::strategies::{ExitObservationSet, StrategySpec};
use locpriv::trajectory::{cut_privacy_region, Sample, Trajectory};
use locpriv::{Disk, Point};
use proptest::prelude::*;

fn point(lim: f64) -> impl Strategy<Value = Point> {
    (-lim..lim, -lim..lim).prop_map(|(x, y)| Point::new(x, y))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn fixed_radius_attack_recovers_home_exactly(theta in point(1e3), r_star in 1e-2f64..1e2, seed in any::<u64>()) {
        let region = Disk::new(theta, r_star).unwrap();
        let mut rng = Stream::new(seed).rng();
        let exits: Vec<ExitPoint> = (0..3).map(|_| sample_exit(&theta, &region, &mut rng).unwrap()).collect();
        let obs = ExitObservationSet {
            strategy: StrategySpec::fixed_radius(r_star).unwrap(),
            sps: exits.iter().map(|e| e.pos.dist2(&theta)).collect(),
            exits,
        };
        let report = attack(&obs, &theta, &AttackConfig::default(), &mut rng).unwrap();
        prop_assert!(report.posterior_mean.dist(&theta) <= 1e-9 * r_star,
            "error {:e} vs r* {r_star}", report.posterior_mean.dist(&theta));
        prop_assert!(report.posterior_mse <= (1e-9 * r_star).powi(2));
    }

    #[test]
    fn circumcenter_is_permutation_invariant(c in point(100.0), r in 0.1f64..50.0, a in 0.0f64..std::f64::consts::TAU, b in 0.5f64..2.5, d in 0.5f64..2.5) {
        let disk = Disk::new(c, r).unwrap();
        let p = [disk.boundary_point(a), disk.boundary_point(a + b), disk.boundary_point(a + b + d)];
        let base = circumcenter(p[0], p[1], p[2]).unwrap();
        prop_assert!(base.center.dist(&c) <= 1e-9 * r.max(c.norm()));
        prop_assert!((base.radius - r).abs() <= 1e-9 * r.max(c.norm()));
        for (i, j, k) in [(0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)] {
            let q = circumcenter(p[i], p[j], p[k]).unwrap();
            prop_assert!(q.center.dist(&base.center) <= 1e-12 * r.max(c.norm()));
        }
    }

    #[test]
    fn exit_density_is_translation_invariant(theta in point(0.7), phi in 0.0f64..std::f64::consts::TAU, v in point(1e3)) {
        let d = Disk::new(Point::ORIGIN, 1.0).unwrap();
        let z = d.boundary_point(phi);
        let a = harmonic_log_density(&z, &theta, &d).unwrap();
        let b = harmonic_log_density(&(z + v), &(theta + v), &d.translate(v)).unwrap();
        prop_assert!((a - b).abs() < 1e-6 * (1.0 + a.abs()));
    }

    #[test]
    fn cutting_is_idempotent(steps in prop::collection::vec(point(1.0), 2..60), c in point(2.0), r in 0.3f64..3.0) {
        let mut pos = Point::ORIGIN;
        let samples: Vec<Sample> = steps.iter().enumerate().map(|(k, s)| {
            pos = pos + *s;
            Sample { t: k as f64, pos }
        }).collect();
        let tr = Trajectory::new(samples).unwrap();
        let region = Disk::new(c, r).unwrap();
        let once = cut_privacy_region(&tr, &region);
        match &once.published {
            None => prop_assert!(once.sp.is_infinite()),
            Some(p) => {
                prop_assert!(once.sp.is_finite() && once.sp >= 0.0);
                let twice = cut_privacy_region(p, &region);
                prop_assert_eq!(twice.published.as_ref(), Some(p));
                prop_assert_eq!(twice.sp, 0.0);
            }
        }
    }

    #[test]
    fn trajectory_csv_round_trip(steps in prop::collection::vec((1e-3f64..10.0, point(1e6)), 1..40)) {
        let mut t = 0.0;
        let samples: Vec<Sample> = steps.iter().map(|(dt, p)| { t += dt; Sample { t, pos: *p } }).collect();
        let tr = Trajectory::new(samples).unwrap();
        let back = Trajectory::parse_csv(&tr.to_csv_string(), "prop").unwrap();
        prop_assert_eq!(back, tr);
    }

    #[test]
    fn mse_splits_into_bias_and_variance(draws in prop::collection::vec(point(10.0), 1..50), truth in point(10.0)) {
        let (mean, dec) = mse_of_draws(&draws, &truth);
        let direct = draws.iter().map(|p| p.dist2(&truth)).sum::<f64>() / draws.len() as f64;
        prop_assert!((dec.mse - direct).abs() < 1e-9 * (1.0 + direct));
        prop_assert!((dec.bias2 - mean.dist2(&truth)).abs() < 1e-12 * (1.0 + dec.bias2));
        prop_assert!(dec.variance >= 0.0);
    }
}
