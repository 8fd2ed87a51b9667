mod common;

use std::f64::consts::PI;

use nalgebra::Matrix2;
use proptest::prelude::*;
use zhopf_core::averaging::*;
use zhopf_core::coefficients::*;
use zhopf_core::standard_form::*;

fn fixture(f: ZeroHopfFamily) -> OscillatorParams {
    match f {
        ZeroHopfFamily::Thm1 => common::example1(),
        ZeroHopfFamily::H1 => common::example2(),
        ZeroHopfFamily::H2 => common::example3(),
        ZeroHopfFamily::H3 => common::example4(),
        ZeroHopfFamily::H4 => common::example5(),
        _ => unreachable!(),
    }
}

fn grid5() -> Vec<Vec2> {
    let mut out = Vec::new();
    for i in 0..5 {
        for j in 0..5 {
            out.push([0.5 + 0.5 * i as f64, -0.8 + 0.4 * j as f64]);
        }
    }
    out
}

#[test]
fn engine_matches_closed_forms() {
    for (f, k) in TABULATED {
        let p = fixture(f);
        let sys = standardize(&p, f).unwrap();
        let g = averaged(&sys, k).unwrap();
        let relative = f == ZeroHopfFamily::H3 && k >= 3;
        let mut worst: f64 = 0.0;
        for x in grid5() {
            let a = g.eval(x);
            let b = closed_form_g(f, k, x, &p).unwrap();
            let scale = if relative { b[0].abs().max(b[1].abs()).max(1.0) } else { 1.0 };
            worst = worst.max((a[0] - b[0]).abs() / scale).max((a[1] - b[1]).abs() / scale);
        }
        let tol = if relative { 1e-5 } else { 1e-7 };
        assert!(worst < tol, "{f} order {k}: {worst:e}");
    }
}

#[test]
fn quadrature_is_converged() {
    for f in [ZeroHopfFamily::Thm1, ZeroHopfFamily::H1, ZeroHopfFamily::H2, ZeroHopfFamily::H4] {
        let p = fixture(f);
        let sys = standardize(&p, f).unwrap();
        let coarse = AveragedFunction::new(&sys, 1, 1024).unwrap();
        let fine = AveragedFunction::new(&sys, 1, 2048).unwrap();
        for x in [[0.9, 0.2], [1.7, -0.5]] {
            let a = coarse.eval(x);
            let b = fine.eval(x);
            assert!((a[0] - b[0]).abs() <= 1e-10 && (a[1] - b[1]).abs() <= 1e-10, "{f} {a:?} {b:?}");
        }
    }
}

#[test]
fn higher_orders_settle_under_refinement() {
    for (f, k) in [(ZeroHopfFamily::H4, 2), (ZeroHopfFamily::H3, 2), (ZeroHopfFamily::H3, 4)] {
        let p = fixture(f);
        let sys = standardize(&p, f).unwrap();
        let coarse = AveragedFunction::new(&sys, k, 1024).unwrap();
        let fine = AveragedFunction::new(&sys, k, 2048).unwrap();
        let x = [1.3, 0.4];
        let a = coarse.eval(x);
        let b = fine.eval(x);
        let s = 1.0 + b[0].abs().max(b[1].abs());
        assert!((a[0] - b[0]).abs() <= 1e-6 * s && (a[1] - b[1]).abs() <= 1e-6 * s, "{f} {k} {a:?} {b:?}");
    }
}

#[test]
fn linear_system_gives_matrix_powers() {
    // dx/dθ = ε A x has g_k = (2π)^k A^k x / k!
    let a = Matrix2::new(0.3, -0.7, 0.2, -0.1);
    let sys = ClosureSystem::new(4, move |_t, x: Vec2| {
        let v = a * nalgebra::Vector2::new(x[0], x[1]);
        [[v[0], v[1]], [0.0; 2], [0.0; 2], [0.0; 2]]
    })
    .unwrap();
    let g = averaged(&sys, 4).unwrap();
    let x = nalgebra::Vector2::new(0.8, -0.4);
    let all = g.eval_all([x[0], x[1]]);
    let mut pow = Matrix2::identity();
    let mut fact = 1.0;
    for (k, gk) in all.iter().enumerate() {
        pow *= a;
        fact *= (k + 1) as f64;
        let want = pow * x * (2.0 * PI).powi(k as i32 + 1) / fact;
        assert!((gk[0] - want[0]).abs() < 1e-6 && (gk[1] - want[1]).abs() < 1e-6, "order {}", k + 1);
    }
}

#[test]
fn central_zero_of_three_orbit_form() {
    let p = common::example1();
    let sys = standardize(&p, ZeroHopfFamily::Thm1).unwrap();
    let g = averaged(&sys, 1).unwrap();
    let rep = zhopf_core::bifurcation::predict_theorem1(&p).unwrap();
    let v = g.eval([rep.r0.unwrap(), 0.0]);
    assert!(v[0].abs() < 1e-8 && v[1].abs() < 1e-8, "{v:?}");
}

#[test]
fn h3_second_order_vanishes_on_its_roots() {
    let p = common::example4();
    let zp = (p.mu.c(1) * p.omega * p.omega).sqrt() / p.h.c(0).abs();
    for z in [0.0, zp, -zp] {
        for r in [0.3, 1.0, 2.0] {
            let v = g2_h3([r, z], &p);
            assert!(v[0].abs() < 1e-12 && v[1].abs() < 1e-9, "{z}");
        }
    }
}

#[test]
fn rejects_orders_beyond_the_system() {
    let sys = standardize(&common::example1(), ZeroHopfFamily::Thm1).unwrap();
    let t1 = sys.truncated(1).unwrap();
    assert!(matches!(averaged(&t1, 2), Err(zhopf_core::Error::OrderUnavailable { .. })));
    assert!(AveragedFunction::new(&sys, 1, 1023).is_err());
    assert!(matches!(
        closed_form_g(ZeroHopfFamily::H1, 2, [1.0, 0.0], &common::example2()),
        Err(zhopf_core::Error::NotTabulated { .. })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]
    #[test]
    fn hessian_is_symmetric(
        t in 0.0..(2.0 * PI),
        r in 0.2..2.5f64, z in -1.0..1.0f64,
        u0 in -1.0..1.0f64, u1 in -1.0..1.0f64,
        v0 in -1.0..1.0f64, v1 in -1.0..1.0f64,
    ) {
        let sys = standardize(&common::example1(), ZeroHopfFamily::Thm1).unwrap();
        let d = DerivativeTensors::new(&sys, FdSteps::default());
        let a = d.hvp(t, [r, z], [u0, u1], [v0, v1]);
        let b = d.hvp(t, [r, z], [v0, v1], [u0, u1]);
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x[0] - y[0]).abs() < 1e-5 * (1.0 + x[0].abs()));
            prop_assert!((x[1] - y[1]).abs() < 1e-5 * (1.0 + x[1].abs()));
        }
    }
}
