mod common;

use ballinterp::cubature::{
    axial_sphere_rule, ball_rule, circle_rule, exactness_report, lift_ball_rule_to_sphere,
    restrict_sphere_rule_to_ball, sphere_rule, BallWeight, CubatureRule, Domain,
};
use ballinterp::oracle::monomial_integral;
use ballinterp::Error;
use common::{rng, Poly};
use proptest::prelude::*;

fn cap_rule(m: usize, degree: usize) -> CubatureRule {
    sphere_rule(m, degree).unwrap()
}

#[test]
fn lifted_rule_integrates_like_sphere_rule() {
    let mut r = rng(21);
    for d in 1..=2 {
        for m in 1..=2 {
            for n in 0..=8 {
                let w = BallWeight::new(d, m).unwrap();
                let lifted = lift_ball_rule_to_sphere(&ball_rule(w, n).unwrap(), &cap_rule(m, n)).unwrap();
                let direct = sphere_rule(d + m, n).unwrap();
                assert_eq!(lifted.domain(), direct.domain());
                assert_eq!(lifted.degree(), n);
                for _ in 0..3 {
                    let p = Poly::random(&mut r, d + m + 1, n);
                    let a = lifted.integrate(|y| p.eval(y)).unwrap();
                    let b = direct.integrate(|y| p.eval(y)).unwrap();
                    let scale = p.scale() * direct.total_weight();
                    assert!((a - b).abs() <= 1e-10 * scale, "(d,m,n)=({d},{m},{n}): {a} vs {b}");
                }
            }
        }
    }
}

#[test]
fn restricted_rule_integrates_like_ball_rule() {
    let mut r = rng(22);
    for d in 1..=2 {
        for m in 1..=2 {
            for n in 0..=8 {
                let w = BallWeight::new(d, m).unwrap();
                let restricted = restrict_sphere_rule_to_ball(&sphere_rule(d + m, n).unwrap(), d).unwrap();
                let direct = ball_rule(w, n).unwrap();
                assert_eq!(restricted.domain(), Domain::WeightedBall(w));
                for _ in 0..3 {
                    let p = Poly::random(&mut r, d, n);
                    let a = restricted.integrate(|x| p.eval(x)).unwrap();
                    let b = direct.integrate(|x| p.eval(x)).unwrap();
                    assert!((a - b).abs() <= 1e-10 * p.scale() * w.mass(), "(d,m,n)=({d},{m},{n}): {a} vs {b}");
                }
            }
        }
    }
}

#[test]
fn lift_then_restrict_recovers_the_ball_rule() {
    let w = BallWeight::new(2, 2).unwrap();
    let ball = ball_rule(w, 6).unwrap();
    let cap = cap_rule(2, 6);
    let back = restrict_sphere_rule_to_ball(&lift_ball_rule_to_sphere(&ball, &cap).unwrap(), 2).unwrap();
    assert_eq!(back.len(), ball.len() * cap.len());
    assert!(exactness_report(&back).passed());
    for (i, x) in ball.nodes().enumerate() {
        for j in 0..cap.len() {
            assert_eq!(back.node(i * cap.len() + j), x);
        }
        let merged: f64 = back.weights()[i * cap.len()..(i + 1) * cap.len()].iter().sum();
        assert!((merged - ball.weights()[i]).abs() <= 1e-14 * ball.weights()[i].max(1e-300) + 1e-16);
    }
}

#[test]
fn built_in_rules_are_exact_to_their_degree() {
    for (d, m, degree) in [(1, 1, 15), (1, 4, 12), (2, 3, 14), (3, 1, 10), (3, 2, 9), (4, 1, 6)] {
        let report = exactness_report(&ball_rule(BallWeight::new(d, m).unwrap(), degree).unwrap());
        assert!(report.passed(), "{report}");
    }
    for (dim, degree) in [(1, 13), (2, 11), (3, 8), (4, 5)] {
        let report = exactness_report(&sphere_rule(dim, degree).unwrap());
        assert!(report.passed(), "{report}");
        let report = exactness_report(&axial_sphere_rule(dim, degree).unwrap());
        assert!(report.passed(), "{report}");
    }
}

#[test]
fn exactness_report_flags_too_low_degree() {
    let w = BallWeight::new(2, 1).unwrap();
    let rule = ball_rule(w, 4).unwrap();
    let (nodes, weights): (Vec<f64>, Vec<f64>) = (rule.nodes().flatten().copied().collect(), rule.weights().to_vec());
    let overclaimed = CubatureRule::new(Domain::WeightedBall(w), 12, nodes, weights).unwrap();
    let report = exactness_report(&overclaimed);
    assert!(!report.passed());
    assert!(report.failures().all(|e| e.monomial.degree() > 4));
}

#[test]
fn mismatched_lift_is_rejected() {
    let ball = ball_rule(BallWeight::new(2, 2).unwrap(), 4).unwrap();
    assert!(matches!(
        lift_ball_rule_to_sphere(&ball, &circle_rule(4)),
        Err(Error::DomainMismatch(_))
    ));
    assert!(matches!(lift_ball_rule_to_sphere(&circle_rule(4), &circle_rule(4)), Err(Error::DomainMismatch(_))));
    assert!(matches!(
        restrict_sphere_rule_to_ball(&sphere_rule(2, 4).unwrap(), 2),
        Err(Error::DomainMismatch(_))
    ));
    assert!(matches!(restrict_sphere_rule_to_ball(&ball, 1), Err(Error::DomainMismatch(_))));
}

#[test]
fn rule_file_round_trip_is_lossless() {
    for rule in [
        ball_rule(BallWeight::new(3, 2).unwrap(), 5).unwrap(),
        sphere_rule(2, 7).unwrap(),
    ] {
        let mut buf = Vec::new();
        rule.write_text(&mut buf).unwrap();
        let back = CubatureRule::read_text(buf.as_slice()).unwrap();
        assert_eq!(back.domain(), rule.domain());
        assert_eq!(back.degree(), rule.degree());
        assert_eq!(back.weights(), rule.weights());
        assert!(back.nodes().zip(rule.nodes()).all(|(a, b)| a == b));
    }
}

#[test]
fn declared_symmetry_holds() {
    for rule in [
        ball_rule(BallWeight::new(2, 1).unwrap(), 16).unwrap(),
        ball_rule(BallWeight::new(3, 1).unwrap(), 9).unwrap(),
        sphere_rule(2, 11).unwrap(),
        axial_sphere_rule(3, 6).unwrap(),
        circle_rule(7),
    ] {
        assert!(rule.symmetry().holds_for(&rule), "{:?}", rule.domain());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ball_rule_weights_sum_to_mass(d in 1usize..=4, m in 1usize..=5, degree in 0usize..=12) {
        let w = BallWeight::new(d, m).unwrap();
        let rule = ball_rule(w, degree).unwrap();
        prop_assert!((rule.total_weight() - w.mass()).abs() <= 1e-12 * w.mass());
        prop_assert!(rule.weights().iter().all(|&l| l > 0.0));
        prop_assert!(rule.nodes().all(|x| x.iter().map(|v| v * v).sum::<f64>() <= 1.0 + 1e-14));
    }

    #[test]
    fn sphere_rule_weights_sum_to_area(dim in 1usize..=4, degree in 0usize..=10) {
        let rule = sphere_rule(dim, degree).unwrap();
        let area = Domain::Sphere { dim }.measure();
        prop_assert!((rule.total_weight() - area).abs() <= 1e-12 * area);
        prop_assert!(rule.nodes().all(|y| (y.iter().map(|v| v * v).sum::<f64>() - 1.0).abs() <= 1e-14));
    }

    #[test]
    fn ball_rule_matches_single_monomial(d in 1usize..=3, m in 1usize..=4, seed in 0u64..1000) {
        let mut r = rng(seed);
        let w = BallWeight::new(d, m).unwrap();
        let degree = 8;
        let rule = ball_rule(w, degree).unwrap();
        let p = Poly::random(&mut r, d, degree);
        let exact: f64 = p
            .terms
            .iter()
            .map(|(b, c)| c * monomial_integral(b, Domain::WeightedBall(w)).unwrap())
            .sum();
        let got = rule.integrate(|x| p.eval(x)).unwrap();
        prop_assert!((got - exact).abs() <= 1e-11 * p.scale() * w.mass());
    }
}
