//! Reduction of the oscillator to a `2π`-periodic planar system in `(r, z)`.
//!
//! After the family's linear change `x = ε^s L X`, the field reads
//! `Ẋ = B(ε) X + ε^{2s} L⁻¹ (−ν(ε) (LX)₀³, 0, 0)` with `B(ε) = L⁻¹ A(ε) L`,
//! which is polynomial in `ε`. In cylindrical coordinates
//! `(X, Y, Z) = (r cos θ, r sin θ, z)` the angle becomes the new time and
//! `F_i` are the Taylor coefficients of `(ṙ/θ̇, ż/θ̇)`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
use serde::Serialize;

use crate::coefficients::{check_family, EpsPolynomial, OscillatorParams, ZeroHopfFamily, DEFAULT_RESIDUAL_TOL};
use crate::series::{Series, TERMS};
use crate::{Error, Result};

pub const PERIOD: f64 = 2.0 * PI;

/// Highest averaging order the reduction supplies.
pub const MAX_ORDER: usize = 4;

/// Node scale for the Vandermonde cross-check.
pub const VANDERMONDE_EPS0: f64 = 1e-3;

/// Amplitude scaling `(X̄, Ȳ, Z̄) = ε^s (X, Y, Z)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Scaling {
    /// `s = 1/2`
    Sqrt,
    /// `s = 1`
    Linear,
}

impl Scaling {
    pub fn exponent(self) -> f64 {
        match self {
            Scaling::Sqrt => 0.5,
            Scaling::Linear => 1.0,
        }
    }

    /// Power of `ε` multiplying the cubic term, `2s`.
    fn cubic_shift(self) -> usize {
        match self {
            Scaling::Sqrt => 1,
            Scaling::Linear => 2,
        }
    }

    /// `ε^s`; for `s = 1/2` only defined for `ε ≥ 0`.
    pub fn factor(self, eps: f64) -> f64 {
        match self {
            Scaling::Sqrt => eps.sqrt(),
            Scaling::Linear => eps,
        }
    }
}

/// Real Jordan block `diag(rotation ω, 0)` in `(X, Y, Z)` order.
pub fn jordan_target(omega: f64) -> Matrix3<f64> {
    Matrix3::new(0.0, -omega, 0.0, omega, 0.0, 0.0, 0.0, 0.0, 0.0)
}

/// Linearization at the origin at `ε = 0`.
pub fn linear_part_at_zero(p: &OscillatorParams) -> Matrix3<f64> {
    p.eval(0.0).linear_part()
}

fn max_abs(m: &Matrix3<f64>) -> f64 {
    m.iter().fold(0.0_f64, |a, v| a.max(v.abs()))
}

/// The hard-coded linear change of each base family, columns mapping
/// `(X̄, Ȳ, Z̄)` to `(x, y, z)`.
pub fn linear_change(p: &OscillatorParams, f: ZeroHopfFamily) -> Result<Matrix3<f64>> {
    let (h0, k0, b0, mu0, nu0, w) = (p.h.c(0), p.k.c(0), p.beta.c(0), p.mu.c(0), p.nu.c(0), p.omega);
    let need = |v: f64, name: &str| {
        if v == 0.0 {
            Err(Error::InvalidParams(format!("{name} must be nonzero for family {f}")))
        } else {
            Ok(())
        }
    };
    let l = match f.base() {
        ZeroHopfFamily::III => {
            need(h0, "h0")?;
            Matrix3::new(-nu0 / w, 0.0, h0 / w, 0.0, 1.0, 0.0, -(k0 * nu0 + w * w) / (h0 * w), 0.0, k0 / w)
        }
        ZeroHopfFamily::I => {
            need(nu0, "nu0")?;
            Matrix3::new(1.0, 0.0, 0.0, -mu0, -w / nu0, 0.0, b0 / nu0, -b0 * mu0 / w, -nu0 / w)
        }
        ZeroHopfFamily::II => {
            need(nu0, "nu0")?;
            let c = h0 * nu0 * nu0 / (w * w * w);
            Matrix3::new(1.0, 0.0, c, -mu0, -w / nu0, -mu0 * c, 0.0, 0.0, -nu0 / w)
        }
        ZeroHopfFamily::IV => {
            need(h0, "h0")?;
            Matrix3::new(0.0, 0.0, h0 / w, 0.0, 1.0, 0.0, -w / h0, 0.0, k0 / w)
        }
        _ => {
            need(nu0, "nu0")?;
            Matrix3::new(1.0, 0.0, 0.0, 0.0, -w / nu0, 0.0, b0 / nu0, 0.0, -nu0 / w)
        }
    };
    Ok(l)
}

/// Basis `(e_X, e_Y, e_Z)` with `A e_X = ω e_Y`, `A e_Y = −ω e_X`, `A e_Z = 0`,
/// built from the kernels of `A² + ω²` and `A`. Used only to cross-check the
/// hard-coded changes.
pub fn generic_jordan_basis(a: &Matrix3<f64>, omega: f64) -> Option<Matrix3<f64>> {
    let kernel_vector = |m: Matrix3<f64>| -> Vector3<f64> {
        let svd = m.svd(false, true);
        let v_t = svd.v_t.expect("requested V");
        let (i, _) =
            svd.singular_values.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).expect("three singular values");
        v_t.row(i).transpose()
    };
    let ex = kernel_vector(a * a + Matrix3::identity() * (omega * omega));
    let ey = a * ex / omega;
    let ez = kernel_vector(*a);
    let l = Matrix3::from_columns(&[ex, ey, ez]);
    l.try_inverse().map(|_| l)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReductionPipeline {
    pub family: ZeroHopfFamily,
    pub scaling: Scaling,
    pub omega: f64,
    l: Matrix3<f64>,
    l_inv: Matrix3<f64>,
}

impl ReductionPipeline {
    pub fn new(p: &OscillatorParams, family: ZeroHopfFamily) -> Result<Self> {
        let l = linear_change(p, family)?;
        let l_inv = l.try_inverse().ok_or_else(|| Error::InvalidParams("linear change is singular".into()))?;
        Ok(Self { family, scaling: Scaling::Sqrt, omega: p.omega, l, l_inv })
    }

    pub fn with_scaling(mut self, s: Scaling) -> Self {
        self.scaling = s;
        self
    }

    pub fn l(&self) -> &Matrix3<f64> {
        &self.l
    }

    pub fn l_inv(&self) -> &Matrix3<f64> {
        &self.l_inv
    }

    /// `‖L⁻¹ A L − J‖_∞` at `ε = 0`.
    pub fn jordan_residual(&self, p: &OscillatorParams) -> f64 {
        let b = self.l_inv * linear_part_at_zero(p) * self.l;
        max_abs(&(b - jordan_target(self.omega)))
    }

    /// Jordan coordinates `(X̄, Ȳ, Z̄)` of a state.
    pub fn to_jordan(&self, x: [f64; 3]) -> [f64; 3] {
        let v = self.l_inv * Vector3::from(x);
        [v[0], v[1], v[2]]
    }

    pub fn from_jordan(&self, xb: [f64; 3]) -> [f64; 3] {
        let v = self.l * Vector3::from(xb);
        [v[0], v[1], v[2]]
    }

    /// State for averaged coordinates `(r, z)` at angle `θ`, undoing the `ε^s` scaling.
    pub fn state_from_polar(&self, theta: f64, r: f64, z: f64, eps: f64) -> [f64; 3] {
        let s = self.scaling.factor(eps);
        self.from_jordan([s * r * theta.cos(), s * r * theta.sin(), s * z])
    }
}

/// The planar periodic system `dx/dθ = Σ εⁱ F_i(θ, x)`, `x = (r, z)`.
#[derive(Clone, Debug)]
pub struct StandardFormSystem {
    pub pipeline: ReductionPipeline,
    pub params: OscillatorParams,
    order: usize,
    /// `L⁻¹ A_i L` for each power of `ε` in `A(ε)`.
    b: Vec<Matrix3<f64>>,
    nu: Series,
}

/// Coefficients of `A(ε)` by power of `ε`; `νμ` is multiplied out.
fn linear_part_coeffs(p: &OscillatorParams) -> Vec<Matrix3<f64>> {
    let deg = p.degree();
    let nm = 2 * deg;
    (0..=nm)
        .map(|i| {
            let numu: f64 = (0..=i).map(|j| p.nu.c(j) * p.mu.c(i - j)).sum();
            let c = |q: &EpsPolynomial| if i <= deg { q.c(i) } else { 0.0 };
            Matrix3::new(numu, c(&p.nu), 0.0, c(&p.k), -c(&p.alpha), -c(&p.h), 0.0, c(&p.beta), 0.0)
        })
        .collect()
}

/// Build the standard form with the default `s = 1/2` scaling and order 4.
pub fn standardize(p: &OscillatorParams, f: ZeroHopfFamily) -> Result<StandardFormSystem> {
    let report = check_family(p, f, DEFAULT_RESIDUAL_TOL)?;
    if !report.member {
        return Err(Error::FamilyMismatch { family: f.to_string(), detail: report.failures().join("; ") });
    }
    StandardFormSystem::new(ReductionPipeline::new(p, f)?, p.clone())
}

impl StandardFormSystem {
    /// Assemble from a pipeline without the membership check.
    pub fn new(pipeline: ReductionPipeline, params: OscillatorParams) -> Result<Self> {
        let b = linear_part_coeffs(&params).into_iter().map(|a| pipeline.l_inv * a * pipeline.l).collect();
        let nu = Series::from_coeffs(params.nu.coeffs());
        Ok(Self { pipeline, params, order: MAX_ORDER, b, nu })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Same system restricted to `F_1..F_k`.
    pub fn truncated(&self, k: usize) -> Result<Self> {
        if k == 0 || k > MAX_ORDER {
            return Err(Error::OrderUnavailable { requested: k, available: MAX_ORDER });
        }
        Ok(Self { order: k, ..self.clone() })
    }

    pub fn omega(&self) -> f64 {
        self.pipeline.omega
    }

    /// `Ẋ` as a series in `ε` at the Jordan-coordinate point `xj`.
    fn xdot_series(&self, xj: Vector3<f64>) -> [Series; 3] {
        let mut out = [Series::ZERO; 3];
        for (i, bi) in self.b.iter().enumerate().take(TERMS) {
            let v = bi * xj;
            for c in 0..3 {
                out[c].0[i] += v[c];
            }
        }
        let x0 = (self.pipeline.l.row(0) * xj)[0];
        let cubic = (-self.nu * (x0 * x0 * x0)).shift(self.pipeline.scaling.cubic_shift());
        for (c, o) in out.iter_mut().enumerate() {
            *o = *o + cubic * self.pipeline.l_inv[(c, 0)];
        }
        out
    }

    /// Series of `(ṙ/θ̇, ż/θ̇)` at `(θ, r, z)`; order-0 terms are zero.
    /// At `r = 0` only the first-order coefficient is finite; the rest are NaN.
    pub fn series(&self, theta: f64, x: [f64; 2]) -> [Series; 2] {
        let (s, c) = theta.sin_cos();
        let [r, z] = x;
        let xd = self.xdot_series(Vector3::new(r * c, r * s, z));
        let mut rdot = xd[0] * c + xd[1] * s;
        let mut zdot = xd[2];
        rdot.0[0] = 0.0;
        zdot.0[0] = 0.0;
        let w = self.omega();
        if r == 0.0 {
            let mut a = [f64::NAN; TERMS];
            let mut b = [f64::NAN; TERMS];
            a[0] = 0.0;
            b[0] = 0.0;
            a[1] = rdot.0[1] / w;
            b[1] = zdot.0[1] / w;
            return [Series(a), Series(b)];
        }
        let mut thdot = (xd[1] * c - xd[0] * s).scale(1.0 / r);
        thdot.0[0] = w;
        [rdot.div(thdot), zdot.div(thdot)]
    }

    /// `F_i(θ, x)` for `i = 1..=order`.
    pub fn coefficients(&self, theta: f64, x: [f64; 2]) -> Vec<[f64; 2]> {
        let [a, b] = self.series(theta, x);
        (1..=self.order).map(|i| [a.0[i], b.0[i]]).collect()
    }

    /// `F_i(θ, x)` for a single order.
    pub fn f(&self, i: usize, theta: f64, x: [f64; 2]) -> Result<[f64; 2]> {
        if i == 0 || i > self.order {
            return Err(Error::OrderUnavailable { requested: i, available: self.order });
        }
        let [a, b] = self.series(theta, x);
        Ok([a.0[i], b.0[i]])
    }

    /// First-order coefficient without the series machinery.
    pub fn f1(&self, cos_t: f64, sin_t: f64, x: [f64; 2]) -> [f64; 2] {
        let [r, z] = x;
        let xj = Vector3::new(r * cos_t, r * sin_t, z);
        let mut v = self.b.get(1).map(|b1| b1 * xj).unwrap_or_else(Vector3::zeros);
        if self.pipeline.scaling.cubic_shift() == 1 {
            let x0 = (self.pipeline.l.row(0) * xj)[0];
            v -= self.pipeline.l_inv.column(0) * (self.params.nu.c(0) * x0 * x0 * x0);
        }
        let w = self.omega();
        [(cos_t * v[0] + sin_t * v[1]) / w, v[2] / w]
    }

    /// Exact time-reparametrized right-hand side at finite `ε`.
    pub fn rhs(&self, theta: f64, x: [f64; 2], eps: f64) -> Result<[f64; 2]> {
        let (s, c) = theta.sin_cos();
        let [r, z] = x;
        let xj = Vector3::new(r * c, r * s, z);
        let a = self.params.eval(eps).linear_part();
        let mut v = self.pipeline.l_inv * a * self.pipeline.l * xj;
        let x0 = (self.pipeline.l.row(0) * xj)[0];
        let shift = self.pipeline.scaling.cubic_shift() as i32;
        v -= self.pipeline.l_inv.column(0) * (eps.powi(shift) * self.params.nu.eval(eps) * x0 * x0 * x0);
        let w = self.omega();
        let thdot = if r > 0.0 { (c * v[1] - s * v[0]) / r } else { f64::NAN };
        if !(thdot >= 0.5 * w) {
            return Err(Error::ScalingSingularity { theta_dot: thdot, r, eps });
        }
        Ok([(c * v[0] + s * v[1]) / thdot, v[2] / thdot])
    }

    /// Taylor coefficients `F_1..F_order` recovered by interpolating `rhs` at
    /// `{±ε₀, ±ε₀/2, ±ε₀/4}` (the value at `ε = 0` is zero).
    pub fn extract_vandermonde(&self, theta: f64, x: [f64; 2], eps0: f64) -> Result<Vec<[f64; 2]>> {
        let nodes: Vec<f64> = [1.0, 0.5, 0.25].iter().flat_map(|s| [s * eps0, -s * eps0]).collect();
        let n = nodes.len();
        let vm = DMatrix::from_fn(n, n, |i, j| nodes[i].powi(j as i32 + 1));
        let lu = vm.lu();
        let mut cols = Vec::with_capacity(2);
        for comp in 0..2 {
            let rhs: Vec<f64> = nodes.iter().map(|&e| self.rhs(theta, x, e).map(|v| v[comp])).collect::<Result<_>>()?;
            let sol = lu
                .solve(&DVector::from_vec(rhs))
                .ok_or_else(|| Error::InvalidParams("singular Vandermonde system".into()))?;
            cols.push(sol);
        }
        Ok((0..self.order).map(|i| [cols[0][i], cols[1][i]]).collect())
    }
}

/// The printed first-order coefficient for family III, transcribed term by term.
pub fn closed_form_f1_iii(theta: f64, r: f64, z: f64, p: &OscillatorParams) -> [f64; 2] {
    let (h0, h1) = (p.h.c(0), p.h.c(1));
    let (k0, k1) = (p.k.c(0), p.k.c(1));
    let a1 = p.alpha.c(1);
    let b1 = p.beta.c(1);
    let mu1 = p.mu.c(1);
    let (nu0, nu1) = (p.nu.c(0), p.nu.c(1));
    let w = p.omega;
    let (s, c) = theta.sin_cos();
    let w2 = w * w;
    let w5 = w.powi(5);
    let first = k0 * nu0 * c * (h0 * mu1 * w2 * z - h0.powi(3) * z.powi(3)) / w5
        + k0 * nu0 * nu0 * r * c * c * (3.0 * h0 * h0 * z * z - mu1 * w2) / w5
        + s * (z * (h0 * k1 - h1 * k0) / w2
            + r * c / (h0 * w2) * (h0 * k0 * nu1 - b1 * h0 * h0 - h0 * k1 * nu0 + h1 * k0 * nu0 + h1 * w2))
        - 3.0 * h0 * k0 * nu0.powi(3) * r * r * z * c.powi(3) / w5
        + k0 * nu0.powi(4) * r.powi(3) * c.powi(4) / w5
        - a1 * r * s * s / w;
    let q = k0 * nu0 + w2;
    let second = nu0 * nu0 * r * c * q * (3.0 * h0 * h0 * z * z - mu1 * w2) / (h0 * w5)
        + nu0 * z * q * (mu1 * w2 - h0 * h0 * z * z) / w5
        + nu0.powi(4) * r.powi(3) * c.powi(3) * q / (h0 * w5)
        + r * s * (nu1 * q - b1 * h0 * nu0) / (h0 * w2)
        - 3.0 * nu0.powi(3) * r * r * z * c * c * q / w5;
    [first, second]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example1() -> OscillatorParams {
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

    #[test]
    fn pipeline_is_jordan_for_example1() {
        let p = example1();
        let pl = ReductionPipeline::new(&p, ZeroHopfFamily::Thm1).unwrap();
        assert!(pl.jordan_residual(&p) < 1e-14);
    }

    #[test]
    fn generic_basis_normalizes() {
        let a = linear_part_at_zero(&example1());
        let l = generic_jordan_basis(&a, 1.0).unwrap();
        let b = l.try_inverse().unwrap() * a * l;
        assert!(max_abs(&(b - jordan_target(1.0))) < 1e-12);
    }

    #[test]
    fn fast_first_order_matches_series() {
        let sys = standardize(&example1(), ZeroHopfFamily::Thm1).unwrap();
        for &(t, r, z) in &[(0.3, 1.2, -0.4), (2.0, 0.5, 0.7), (5.5, 2.0, 0.0)] {
            let a = sys.f(1, t, [r, z]).unwrap();
            let b = sys.f1(f64::cos(t), f64::sin(t), [r, z]);
            assert!((a[0] - b[0]).abs() < 1e-14 && (a[1] - b[1]).abs() < 1e-14);
        }
    }

    #[test]
    fn first_order_finite_at_origin_of_plane() {
        let sys = standardize(&example1(), ZeroHopfFamily::Thm1).unwrap();
        let f = sys.f(1, 0.7, [0.0, 0.3]).unwrap();
        assert!(f[0].is_finite() && f[1].is_finite());
        let g = sys.f(1, 0.7, [1e-8, 0.3]).unwrap();
        assert!((f[0] - g[0]).abs() < 1e-6 && (f[1] - g[1]).abs() < 1e-6);
    }

    #[test]
    fn rhs_rejects_large_amplitude() {
        let sys = standardize(&example1(), ZeroHopfFamily::Thm1).unwrap();
        let hits = (0..16)
            .filter(|j| {
                let t = *j as f64 * PI / 8.0;
                matches!(sys.rhs(t, [1e-6, 5.0], 0.1), Err(Error::ScalingSingularity { .. }))
            })
            .count();
        assert!(hits > 0);
        assert!(sys.rhs(0.3, [1.0, 0.2], 1e-3).is_ok());
    }

    #[test]
    fn mismatch_is_reported() {
        let p = example1().with_coeff(crate::coefficients::Coefficient::Alpha, 0, 0.5).unwrap();
        assert!(matches!(standardize(&p, ZeroHopfFamily::III), Err(Error::FamilyMismatch { .. })));
    }
}
