mod common;

use std::f64::consts::PI;

use nalgebra::Matrix3;
use zhopf_core::bifurcation::*;
use zhopf_core::coefficients::*;
use zhopf_core::standard_form::*;
use zhopf_core::verify::*;
use zhopf_core::Error;

const EPS1: f64 = 1.0 / 70.0;

fn linear_map(p: &OscillatorParams, sign: f64) -> ReturnMap<LinearField> {
    let pipe = ReductionPipeline::new(p, ZeroHopfFamily::Thm1).unwrap();
    ReturnMap::with_pipeline(LinearField(linear_part_at_zero(p) * sign), &pipe, IntegratorConfig::default())
}

fn example1_orbits(eps: f64) -> (ReturnMap<ParamValues>, Vec<PeriodicOrbit>) {
    let p = common::example1();
    let map = ReturnMap::new(&p, ZeroHopfFamily::Thm1, eps, IntegratorConfig::default()).unwrap();
    let s = eps.sqrt();
    let orbits = predict_orbits(&p, ZeroHopfFamily::Thm1, eps)
        .unwrap()
        .iter()
        .map(|o| refine_periodic_orbit(&map, [s * o.x[0], s * o.x[1]], &ShootingOptions::default()).unwrap())
        .collect();
    (map, orbits)
}

#[test]
fn origin_is_an_equilibrium() {
    let tr = integrate(&common::example1(), EPS1, [0.0; 3], 50.0, &IntegratorConfig::default()).unwrap();
    assert!(tr.x.iter().all(|x| x.iter().all(|v| v.abs() <= 1e-12)));
}

#[test]
fn linear_rotation_preserves_radius() {
    let pipe = ReductionPipeline::new(&common::example1(), ZeroHopfFamily::Thm1).unwrap();
    let j = jordan_target(pipe.omega);
    let tr = integrate_field(&LinearField(j), [1.0, 0.0, 0.0], 200.0 * PI, &IntegratorConfig::default()).unwrap();
    let worst = tr.x.iter().map(|x| (x[0] * x[0] + x[1] * x[1] - 1.0).abs()).fold(0.0, f64::max);
    assert!(worst <= 1e-8, "{worst:e}");
}

#[test]
fn unperturbed_return_is_identity() {
    let p = common::example1();
    let map = linear_map(&p, 1.0);
    let rs = map.returns([1.0, 0.3], 3, None).unwrap();
    for r in rs {
        assert!((r.q[0] - 1.0).abs() < 1e-9 && (r.q[1] - 0.3).abs() < 1e-9, "{:?}", r.q);
        assert!((r.time - 2.0 * PI / p.omega).abs() < 1e-9);
    }
}

#[test]
fn reversed_rotation_has_no_positive_crossing() {
    let map = linear_map(&common::example1(), -1.0);
    assert!(matches!(map.returns([1.0, 0.3], 1, None), Err(Error::NoReturn(_))));
}

#[test]
fn rejects_bad_arguments() {
    let p = common::example1();
    assert!(integrate(&p, EPS1, [0.1, 0.0, 0.0], 0.0, &IntegratorConfig::default()).is_err());
    let cfg = IntegratorConfig { rtol: -1.0, ..Default::default() };
    assert!(integrate(&p, EPS1, [0.1, 0.0, 0.0], 1.0, &cfg).is_err());
    let cfg = IntegratorConfig { max_steps: 5, ..Default::default() };
    assert!(matches!(integrate(&p, EPS1, [0.1, 0.0, 0.0], 100.0, &cfg), Err(Error::StepLimitExceeded(_))));
}

#[test]
fn example1_three_orbits() {
    let (map, orbits) = example1_orbits(EPS1);
    assert_eq!(orbits.len(), 3);
    for o in &orbits {
        assert!(o.residual <= 1e-9);
        assert!((o.period - 2.0 * PI).abs() < 0.25 * 2.0 * PI);
    }
    assert_eq!(orbits[0].stability, Stability::Saddle);
    assert_eq!(orbits[1].stability, Stability::Unstable);
    assert_eq!(orbits[2].stability, Stability::Unstable);
    assert!(symmetry_defect(&map, &orbits[1], &orbits[2]).unwrap() <= 1e-8);
    assert!((orbits[1].period - orbits[2].period).abs() < 1e-9);
}

#[test]
fn monodromy_methods_agree() {
    let p = common::example1();
    let map = ReturnMap::new(&p, ZeroHopfFamily::Thm1, EPS1, IntegratorConfig::default()).unwrap();
    let s = EPS1.sqrt();
    let o = &predict_orbits(&p, ZeroHopfFamily::Thm1, EPS1).unwrap()[1];
    let seed = [s * o.x[0], s * o.x[1]];
    let a = refine_periodic_orbit(&map, seed, &ShootingOptions::default()).unwrap();
    let fd = ShootingOptions { monodromy: MonodromyMethod::FiniteDifference, ..Default::default() };
    let b = refine_periodic_orbit(&map, seed, &fd).unwrap();
    assert!(multiplier_error(&a.multipliers, &b.multipliers) < 1e-6);
    assert!((a.q[0] - b.q[0]).abs() < 1e-9 && (a.q[1] - b.q[1]).abs() < 1e-9);
}

#[test]
fn period_correction_is_linear_in_eps() {
    // T − 2π = a ε + b ε² + …: slopes (T − 2π)/ε are affine in ε with a ≠ 0
    let ladder = [1.0 / 200.0, 1.0 / 140.0, 1.0 / 70.0];
    let slopes: Vec<f64> = ladder
        .iter()
        .map(|&e| {
            let (_, orbits) = example1_orbits(e);
            (orbits[0].period - 2.0 * PI) / e
        })
        .collect();
    let b01 = (slopes[1] - slopes[0]) / (ladder[1] - ladder[0]);
    let b12 = (slopes[2] - slopes[1]) / (ladder[2] - ladder[1]);
    assert!((b01 - b12).abs() < 0.05 * b12.abs(), "{slopes:?}");
    let a = slopes[0] - b01 * ladder[0];
    assert!(a.abs() > 1e-2, "{a}");
}

#[test]
fn example2_caption_trajectory_settles() {
    let p = common::example2();
    let eps = 1.0 / 25.0;
    let tr = integrate(&p, eps, [0.0, 0.025, 0.08], 600.0, &IntegratorConfig::default()).unwrap();
    let map = ReturnMap::new(&p, ZeroHopfFamily::H1, eps, IntegratorConfig::default()).unwrap();
    let rs = map.returns_from_state(*tr.x.last().unwrap(), 3, None).unwrap();
    let d = (rs[2].q[0] - rs[1].q[0]).hypot(rs[2].q[1] - rs[1].q[1]);
    assert!(d < 1e-6, "{d:e}");
}

/// Rotation about the Z axis with a Hopf normal form in `(R − 1, Z)` whose
/// attracting circle has radius `√σ`.
struct HopfTorus {
    sigma: f64,
    c: f64,
}

impl VectorField3 for HopfTorus {
    fn f(&self, x: [f64; 3]) -> [f64; 3] {
        let r = x[0].hypot(x[1]);
        let (u, v) = (r - 1.0, x[2]);
        let q = u * u + v * v;
        let du = self.sigma * u - self.c * v - q * u;
        let dv = self.c * u + self.sigma * v - q * v;
        [-x[1] + x[0] * du / r, x[0] + x[1] * du / r, dv]
    }
    fn jac(&self, x: [f64; 3]) -> Matrix3<f64> {
        let h = 1e-7;
        Matrix3::from_fn(|i, j| {
            let mut a = x;
            let mut b = x;
            a[j] += h;
            b[j] -= h;
            (self.f(a)[i] - self.f(b)[i]) / (2.0 * h)
        })
    }
}

#[test]
fn synthetic_invariant_circle_is_detected() {
    let field = HopfTorus { sigma: 0.01, c: 0.1 * 2f64.sqrt() };
    let map = ReturnMap::local(field, [1.0, 0.0, 0.0], 0.5, 1.0, IntegratorConfig::default()).unwrap();
    let ev = detect_torus(&map, [0.0, 0.0], [0.03, 0.0], 300, 300, &TorusOptions::default()).unwrap();
    assert_eq!(ev.verdict, TorusVerdict::Torus, "{} {} {:?}", ev.max_deviation, ev.mean_radius, ev.verdict);
    assert!((ev.mean_radius - 0.1).abs() < 1e-3);
    // the section's second axis is −Z, which reverses the orientation
    let rho = ev.rotation_number.min(1.0 - ev.rotation_number);
    assert!((rho - 0.1 * 2f64.sqrt()).abs() < 1e-2, "{}", ev.rotation_number);
}

#[test]
fn unperturbed_flow_is_locked() {
    let p = common::example1();
    let map = linear_map(&p, 1.0);
    let ev = detect_torus(&map, [1.0, 0.3], [1.01, 0.3], 20, 40, &TorusOptions::default()).unwrap();
    assert!(matches!(ev.verdict, TorusVerdict::PeriodicLocked | TorusVerdict::Inconclusive), "{:?}", ev.verdict);
}

#[test]
fn far_seed_is_never_a_torus() {
    let (map, orbits) = example1_orbits(EPS1);
    let c = orbits[1].q;
    let ev = detect_torus(&map, c, [c[0] + 4.0, c[1] + 4.0], 30, 30, &TorusOptions::default()).unwrap();
    assert_ne!(ev.verdict, TorusVerdict::Torus);
}

#[test]
fn multiplier_prediction_at_zero_eps_is_identity() {
    let j = nalgebra::Matrix2::new(0.3, -1.0, 2.0, 0.1);
    let m = predicted_multipliers(&j, 0.0);
    assert!(m.iter().all(|z| (z.re - 1.0).abs() < 1e-15 && z.im.abs() < 1e-15));
}

#[test]
fn poincare_returns_list_times() {
    let p = common::example1();
    let s = EPS1.sqrt();
    let rep = predict_theorem1(&p).unwrap();
    let r =
        poincare_return(&p, ZeroHopfFamily::Thm1, EPS1, [s * rep.r0.unwrap(), 0.0], 4, &IntegratorConfig::default())
            .unwrap();
    assert_eq!(r.len(), 4);
    assert!(r.iter().all(|(_, t)| (t - 2.0 * PI).abs() < 0.25 * 2.0 * PI));
}
