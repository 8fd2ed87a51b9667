mod common;

use proptest::prelude::*;
use zhopf_core::coefficients::*;

fn power_sum(c: &[f64], eps: f64) -> f64 {
    c.iter().enumerate().map(|(i, a)| a * eps.powi(i as i32)).sum()
}

fn fixtures() -> Vec<(ZeroHopfFamily, OscillatorParams)> {
    vec![
        (ZeroHopfFamily::Thm1, common::example1()),
        (ZeroHopfFamily::H1, common::example2()),
        (ZeroHopfFamily::H2, common::example3()),
        (ZeroHopfFamily::H3, common::example4()),
        (ZeroHopfFamily::H4, common::example5()),
    ]
}

#[test]
fn example1_at_zero() {
    let v = eval_params(&common::example1(), 0.0);
    assert_eq!([v.h, v.k, v.alpha, v.beta, v.mu, v.nu, v.omega], [1.0, 67.0 / 50.0, 0.0, 117.0 / 50.0, 0.0, 1.0, 1.0]);
}

#[test]
fn example1_at_one_seventieth() {
    let v = eval_params(&common::example1(), 1.0 / 70.0);
    assert!((v.h - (1.0 + 1.0 / 1750.0 + 3.0 / 122500.0)).abs() < 1e-15);
}

#[test]
fn horner_agrees_with_power_sums() {
    for (_, p) in fixtures() {
        for eps in [0.0, 1.0 / 70.0, -0.3, 1.0] {
            let v = eval_params(&p, eps);
            for (got, c) in
                [(v.h, &p.h), (v.k, &p.k), (v.alpha, &p.alpha), (v.beta, &p.beta), (v.mu, &p.mu), (v.nu, &p.nu)]
            {
                let want = power_sum(c.coeffs(), eps);
                assert!((got - want).abs() <= 1e-14 * (1.0 + want.abs()));
            }
        }
    }
}

#[test]
fn every_fixture_is_member_of_its_family() {
    for (f, p) in fixtures() {
        let rep = check_family(&p, f, 1e-12).unwrap();
        assert!(rep.member, "{f}: {:?}", rep.failures());
        let base = check_family(&p, f.base(), 1e-12).unwrap();
        assert!(base.member, "{f} base");
    }
}

#[test]
fn example1_conditions() {
    let rep = check_family(&common::example1(), ZeroHopfFamily::Thm1, 1e-12).unwrap();
    assert!(rep.conditions_pass);
    let d = thm1_deltas(&common::example1());
    assert!(d.delta_a > 0.0 && d.delta_b > 0.0 && d.delta_c > 0.0);
    assert!((d.delta_d + 2.34).abs() < 1e-12);
}

#[test]
fn example4_h3_relations() {
    let rep = check_family(&common::example4(), ZeroHopfFamily::H3, 1e-12).unwrap();
    assert!(rep.relations.iter().all(|r| r.residual.abs() <= 1e-12));
    assert!(rep.relations.len() >= 6);
}

#[test]
fn fixtures_fail_other_families() {
    assert!(!check_family(&common::example2(), ZeroHopfFamily::Thm1, 1e-12).unwrap().member);
    assert!(!check_family(&common::example3(), ZeroHopfFamily::H1, 1e-12).unwrap().member);
    assert!(!check_family(&common::example1(), ZeroHopfFamily::H4, 1e-12).unwrap().member);
}

#[test]
fn field_samples_example1() {
    let p = common::example1();
    assert_eq!(vector_field(&p, 0.0, [0.0; 3]), [0.0; 3]);
    assert_eq!(vector_field(&p, 0.0, [1.0, 0.0, 0.0]), [-1.0, 67.0 / 50.0, 0.0]);
    assert_eq!(vector_field(&p, 0.0, [0.0, 1.0, 0.0]), [1.0, 0.0, 117.0 / 50.0]);
}

#[test]
fn config_json_with_rationals() {
    let s = r#"{"omega": 1, "h": ["1", "1/25", "3/25"], "k": ["67/50", "1/25", "3/50"],
        "alpha": [0, -1, "1/25"], "beta": ["117/50", "1/25", "3/50"],
        "mu": [0, "20029/5025", "3/50"], "nu": [1, "1/25", "3/50"], "family": "THM1"}"#;
    let cfg: ParamsConfig = serde_json::from_str(s).unwrap();
    assert_eq!(cfg.params().unwrap(), common::example1());
    assert_eq!(cfg.family().unwrap(), Some(ZeroHopfFamily::Thm1));
}

proptest! {
    #[test]
    fn field_is_odd(x in -3.0..3.0f64, y in -3.0..3.0f64, z in -3.0..3.0f64, eps in -0.5..0.5f64) {
        for (_, p) in fixtures() {
            let a = vector_field(&p, eps, [x, y, z]);
            let b = vector_field(&p, eps, [-x, -y, -z]);
            for i in 0..3 {
                prop_assert!((a[i] + b[i]).abs() <= 1e-12 * (1.0 + a[i].abs()));
            }
        }
    }

    #[test]
    fn eval_is_power_sum(c in prop::collection::vec(-10.0..10.0f64, 1..5), eps in -1.0..1.0f64) {
        let q = EpsPolynomial::new(c.clone()).unwrap();
        let want = power_sum(&c, eps);
        prop_assert!((q.eval(eps) - want).abs() <= 1e-13 * (1.0 + c.iter().map(|v| v.abs()).sum::<f64>()));
    }
}
