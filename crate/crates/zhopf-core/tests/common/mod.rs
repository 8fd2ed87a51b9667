#![allow(dead_code)]

use zhopf_core::coefficients::OscillatorParams;

pub fn example1() -> OscillatorParams {
    OscillatorParams::from_slices(
        [
            &[1.0, 1.0 / 25.0, 3.0 / 25.0],
            &[67.0 / 50.0, 1.0 / 25.0, 3.0 / 50.0],
            &[0.0, -1.0, 1.0 / 25.0],
            &[117.0 / 50.0, 1.0 / 25.0, 3.0 / 50.0],
            &[0.0, 20029.0 / 5025.0, 3.0 / 50.0],
            &[1.0, 1.0 / 25.0, 3.0 / 50.0],
        ],
        1.0,
    )
    .unwrap()
}

pub fn example2() -> OscillatorParams {
    OscillatorParams::from_slices(
        [
            &[0.0, -1.0, 3.0],
            &[-2393.0 / 1184.0, 3.0, 3.0],
            &[-37.0 / 32.0, -1.0, 3.0],
            &[-1.0, 3.0, 3.0],
            &[-1.0, -2.0, 3.0],
            &[37.0 / 32.0, -4.0, 3.0],
        ],
        1.0,
    )
    .unwrap()
}

pub fn example3() -> OscillatorParams {
    OscillatorParams::from_slices(
        [
            &[-1.0, -171.0 / 10.0, -103.0 / 5.0],
            &[-2393.0 / 1184.0, 187.0 / 10.0, 3.0],
            &[-37.0 / 32.0, -1.0, 29.0 / 5.0],
            &[0.0, -1.0, 1.0 / 10.0],
            &[-1.0, -2.0, -221.0 / 10.0],
            &[37.0 / 32.0, -4.0, 37.0 / 32.0],
        ],
        1.0,
    )
    .unwrap()
}

pub fn example4() -> OscillatorParams {
    OscillatorParams::from_slices(
        [
            &[1.0, 0.0, 1.0 / 50.0],
            &[-1.0, -128.0, 1.0 / 50.0],
            &[0.0, 0.0, 0.0, -25.0],
            &[1.0, 0.0, 1.0 / 50.0],
            &[0.0, 1.0, 4065.0 / 64.0],
            &[0.0, 128.0, -1.0],
        ],
        1.0,
    )
    .unwrap()
}

pub fn example5() -> OscillatorParams {
    OscillatorParams::from_slices(
        [
            &[0.0, -1.0, 43.0 / 5.0],
            &[-16.0 / 5.0, -54.0 / 5.0, 8.0 / 5.0],
            &[0.0, -1.0],
            &[-1.0, -14.0 / 5.0, 1.0 / 5.0],
            &[0.0, -1.0],
            &[5.0 / 16.0, -1.0, -46.0 / 5.0],
        ],
        1.0,
    )
    .unwrap()
}

/// Family-III parameters with the three-orbit sign conditions, or `None`.
pub fn thm1_params(w: f64, h0: f64, k0: f64, nu0: f64, a1: f64, mu1: f64) -> Option<OscillatorParams> {
    let b0 = (k0 * nu0 + w * w) / h0;
    let p =
        OscillatorParams::from_slices([&[h0, 0.3], &[k0, -0.2], &[0.0, a1], &[b0, 0.1], &[0.0, mu1], &[nu0, 0.05]], w)
            .ok()?;
    let d = zhopf_core::coefficients::thm1_deltas(&p);
    let ok = d.delta_a > 1e-3 && d.delta_b > 1e-3 && d.delta_c > 1e-3 && d.delta_d.abs() > 1e-3;
    ok.then_some(p)
}

/// Parameters satisfying the relations of `f` at order zero, built from free values.
pub fn family_params(f: zhopf_core::coefficients::ZeroHopfFamily, v: [f64; 5], w: f64) -> OscillatorParams {
    use zhopf_core::coefficients::ZeroHopfFamily as F;
    let [a, b, c, d, e] = v;
    // order-zero (h, k, alpha, beta, mu, nu)
    let c0 = match f.base() {
        F::I => [0.0, -(a * a * b * b + w * w) / b, a * b, c, a, b],
        F::II => [c, -(a * a * b * b + w * w) / b, a * b, 0.0, a, b],
        F::III => [a, c, 0.0, (c * b + w * w) / a, 0.0, b],
        F::IV => [a, c, 0.0, w * w / a, b, 0.0],
        F::V => [0.0, -w * w / b, 0.0, c, 0.0, b],
        _ => unreachable!("base families only"),
    };
    OscillatorParams::from_slices(
        [&[c0[0], d], &[c0[1], e], &[c0[2], 0.1], &[c0[3], -0.2], &[c0[4], 0.3], &[c0[5], 0.4]],
        w,
    )
    .unwrap()
}
