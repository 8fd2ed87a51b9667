//! Direct integration of the oscillator: periodic orbits by shooting on a
//! Poincaré section, Floquet multipliers, and invariant-curve evidence from
//! iterated returns.
//!
//! The section is `{Ȳ = 0, X̄ > 0}` in the Jordan coordinates of the family,
//! crossed with `dȲ/dt > 0`; section coordinates are `(X̄, Z̄)` without the
//! `ε^s` scaling.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, Matrix2, Matrix3, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::averaging::Vec2;
use crate::bifurcation::{eigenvalues2, Stability};
use crate::coefficients::{eval_params, OscillatorParams, ParamValues, ZeroHopfFamily};
use crate::standard_form::ReductionPipeline;
use crate::{Error, Result};

/// Steps below this size are taken as a sign of stiffness.
pub const MIN_STEP: f64 = 1e-14;
/// Crossing speeds below this fail the transversality check.
pub const MIN_CROSSING_SPEED: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub rtol: f64,
    pub atol: f64,
    pub initial_step: f64,
    pub max_step: f64,
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self { rtol: 1e-10, atol: 1e-12, initial_step: 1e-3, max_step: 0.5, max_steps: 2_000_000 }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rtol > 0.0 && self.atol > 0.0 && self.initial_step > 0.0 && self.max_step > 0.0)
            || self.max_steps == 0
        {
            return Err(Error::InvalidParams("integrator tolerances and steps must be positive".into()));
        }
        Ok(())
    }
}

// Dormand–Prince 5(4) tableau.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] =
    [5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0, -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0];

/// One accepted or trial step: the new state, its derivative and the max-norm error.
struct StepResult<const N: usize> {
    y: [f64; N],
    f: [f64; N],
    err: f64,
}

/// Dormand–Prince 5(4) with FSAL; `f0` is the derivative at `y0`.
fn dp_step<const N: usize>(
    rhs: &impl Fn(&[f64; N]) -> [f64; N],
    y0: &[f64; N],
    f0: &[f64; N],
    h: f64,
    cfg: &IntegratorConfig,
) -> StepResult<N> {
    let mut k = [[0.0; N]; 7];
    k[0] = *f0;
    for s in 1..7 {
        let mut ys = *y0;
        for (j, kj) in k.iter().enumerate().take(s) {
            let a = A[s][j];
            if a != 0.0 {
                for i in 0..N {
                    ys[i] += h * a * kj[i];
                }
            }
        }
        k[s] = rhs(&ys);
    }
    let mut y = *y0;
    let mut acc = 0.0;
    for i in 0..N {
        let mut d5 = 0.0;
        let mut d4 = 0.0;
        for s in 0..7 {
            d5 += B5[s] * k[s][i];
            d4 += B4[s] * k[s][i];
        }
        y[i] += h * d5;
        let sc = cfg.atol + cfg.rtol * y0[i].abs().max(y[i].abs());
        acc = f64::max(acc, (h * (d5 - d4) / sc).abs());
    }
    // k[6] is the derivative at the new point (FSAL)
    StepResult { y, f: k[6], err: acc }
}

/// State of an adaptive integration between accepted steps.
pub struct Stepper<const N: usize, F> {
    rhs: F,
    cfg: IntegratorConfig,
    pub t: f64,
    pub y: [f64; N],
    pub f: [f64; N],
    h: f64,
    pub steps: usize,
}

impl<const N: usize, F: Fn(&[f64; N]) -> [f64; N]> Stepper<N, F> {
    pub fn new(rhs: F, y0: [f64; N], cfg: IntegratorConfig) -> Result<Self> {
        cfg.validate()?;
        let f = rhs(&y0);
        Ok(Self { rhs, cfg, t: 0.0, y: y0, f, h: cfg.initial_step, steps: 0 })
    }

    /// Advance by one accepted step, never past `t_stop`.
    pub fn step(&mut self, t_stop: f64) -> Result<()> {
        loop {
            if self.steps >= self.cfg.max_steps {
                return Err(Error::StepLimitExceeded(self.cfg.max_steps));
            }
            let h = self.h.min(self.cfg.max_step).min(t_stop - self.t);
            if h < MIN_STEP {
                return Err(Error::StiffnessSuspected { t: self.t, h });
            }
            let r = dp_step(&self.rhs, &self.y, &self.f, h, &self.cfg);
            self.steps += 1;
            let fac = if r.err == 0.0 { 5.0 } else { (0.8 * r.err.powf(-0.2)).clamp(0.2, 5.0) };
            if r.err <= 1.0 && r.y.iter().all(|v| v.is_finite()) {
                self.t += h;
                self.y = r.y;
                self.f = r.f;
                if h == self.h.min(self.cfg.max_step) {
                    self.h = h * fac;
                }
                return Ok(());
            }
            self.h = if r.err.is_finite() { h * fac.min(1.0) } else { h * 0.2 };
        }
    }

    /// One unadapted step of size `h` from the current state.
    pub fn trial(&self, h: f64) -> ([f64; N], [f64; N]) {
        let r = dp_step(&self.rhs, &self.y, &self.f, h, &self.cfg);
        (r.y, r.f)
    }

    pub fn rhs(&self, y: &[f64; N]) -> [f64; N] {
        (self.rhs)(y)
    }
}

/// Accepted-step samples of a trajectory.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trajectory {
    pub t: Vec<f64>,
    pub x: Vec<[f64; 3]>,
}

/// A smooth vector field on R³ with its Jacobian.
pub trait VectorField3: Sync {
    fn f(&self, x: [f64; 3]) -> [f64; 3];
    fn jac(&self, x: [f64; 3]) -> Matrix3<f64>;
}

impl VectorField3 for ParamValues {
    fn f(&self, x: [f64; 3]) -> [f64; 3] {
        self.field(x)
    }
    fn jac(&self, x: [f64; 3]) -> Matrix3<f64> {
        self.field_jacobian(x)
    }
}

/// `ẋ = A x`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearField(pub Matrix3<f64>);

impl VectorField3 for LinearField {
    fn f(&self, x: [f64; 3]) -> [f64; 3] {
        let v = self.0 * Vector3::from(x);
        [v[0], v[1], v[2]]
    }
    fn jac(&self, _x: [f64; 3]) -> Matrix3<f64> {
        self.0
    }
}

pub fn integrate_field(
    field: &impl VectorField3,
    x0: [f64; 3],
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    if !(t_end > 0.0) {
        return Err(Error::InvalidParams(format!("t_end must be positive, got {t_end}")));
    }
    let mut st = Stepper::new(|y: &[f64; 3]| field.f(*y), x0, *cfg)?;
    let mut out = Trajectory { t: vec![0.0], x: vec![x0] };
    while st.t < t_end {
        st.step(t_end)?;
        out.t.push(st.t);
        out.x.push(st.y);
    }
    Ok(out)
}

/// Integrate the oscillator at fixed `ε`.
pub fn integrate(
    p: &OscillatorParams,
    eps: f64,
    x0: [f64; 3],
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    integrate_field(&eval_params(p, eps), x0, t_end, cfg)
}

/// How the monodromy matrix is computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum MonodromyMethod {
    #[default]
    Variational,
    FiniteDifference,
}

/// Section point, return time and (optionally) the section-map Jacobian.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Return {
    pub q: Vec2,
    pub time: f64,
    pub state: [f64; 3],
    pub jacobian: Option<Matrix2<f64>>,
}

/// Which crossings of the plane `{s = 0}` count as returns.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SectionKind {
    /// `{Ȳ = 0, X̄ > 0}` in Jordan coordinates.
    Jordan,
    /// Plane through a reference point normal to the flow there; crossings
    /// farther than `radius` from the point are ignored.
    Local { radius: f64 },
}

/// The first-return map of a vector field to a planar section.
///
/// A state is `origin + frame · (q0, s, q1)`; the section is `s = 0`.
pub struct ReturnMap<V> {
    pub field: V,
    frame: Matrix3<f64>,
    frame_inv: Matrix3<f64>,
    origin: Vector3<f64>,
    pub kind: SectionKind,
    pub omega: f64,
    pub cfg: IntegratorConfig,
}

impl ReturnMap<ParamValues> {
    pub fn new(p: &OscillatorParams, family: ZeroHopfFamily, eps: f64, cfg: IntegratorConfig) -> Result<Self> {
        let pipe = ReductionPipeline::new(p, family)?;
        Ok(Self::with_pipeline(eval_params(p, eps), &pipe, cfg))
    }
}

impl<V: VectorField3> ReturnMap<V> {
    pub fn with_pipeline(field: V, pipe: &ReductionPipeline, cfg: IntegratorConfig) -> Self {
        Self {
            field,
            frame: *pipe.l(),
            frame_inv: *pipe.l_inv(),
            origin: Vector3::zeros(),
            kind: SectionKind::Jordan,
            omega: pipe.omega,
            cfg,
        }
    }

    /// Section through `x_ref` normal to the field there.
    pub fn local(field: V, x_ref: [f64; 3], radius: f64, omega: f64, cfg: IntegratorConfig) -> Result<Self> {
        let n = Vector3::from(field.f(x_ref));
        if !(n.norm() > MIN_CROSSING_SPEED) || !(radius > 0.0) {
            return Err(Error::LostTransversality(n.norm()));
        }
        let n = n.normalize();
        let trial = if n.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
        let e1 = (trial - n * n.dot(&trial)).normalize();
        let e3 = n.cross(&e1);
        let frame = Matrix3::from_columns(&[e1, n, e3]);
        Ok(Self {
            field,
            frame,
            frame_inv: frame.transpose(),
            origin: Vector3::from(x_ref),
            kind: SectionKind::Local { radius },
            omega,
            cfg,
        })
    }

    pub fn base_period(&self) -> f64 {
        2.0 * PI / self.omega
    }

    pub fn state(&self, q: Vec2) -> [f64; 3] {
        let v = self.origin + self.frame * Vector3::new(q[0], 0.0, q[1]);
        [v[0], v[1], v[2]]
    }

    /// Frame coordinates `(q0, s, q1)` of a state.
    pub fn coords(&self, x: [f64; 3]) -> [f64; 3] {
        let v = self.frame_inv * (Vector3::from(x) - self.origin);
        [v[0], v[1], v[2]]
    }

    fn section(&self, x: &[f64]) -> f64 {
        (0..3).map(|j| self.frame_inv[(1, j)] * (x[j] - self.origin[j])).sum()
    }

    fn section_speed(&self, x: &[f64]) -> f64 {
        let f = self.field.f([x[0], x[1], x[2]]);
        (0..3).map(|j| self.frame_inv[(1, j)] * f[j]).sum()
    }

    fn admissible(&self, x: &[f64]) -> bool {
        let c = self.coords([x[0], x[1], x[2]]);
        match self.kind {
            SectionKind::Jordan => c[0] > 0.0,
            SectionKind::Local { radius } => c[0].hypot(c[2]) <= radius,
        }
    }

    /// Locate the crossing inside the last accepted step and return the state there.
    fn locate<const N: usize, F: Fn(&[f64; N]) -> [f64; N]>(
        &self,
        prev: &([f64; N], [f64; N], f64),
        st: &Stepper<N, F>,
    ) -> Result<(f64, [f64; N])> {
        let (y0, f0, t0) = prev;
        let dt = st.t - t0;
        let (s0, s1) = (self.section(y0), self.section(&st.y));
        let (d0, d1) = (self.section(f0) * dt, self.section(&st.f) * dt);
        // cubic Hermite in the unit interval
        let herm = |u: f64| {
            let (u2, u3) = (u * u, u * u * u);
            (2.0 * u3 - 3.0 * u2 + 1.0) * s0 + (u3 - 2.0 * u2 + u) * d0 + (-2.0 * u3 + 3.0 * u2) * s1 + (u3 - u2) * d1
        };
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if herm(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        // Newton polish with single steps from the start of the interval
        let probe = Stepper { rhs: &st.rhs, cfg: st.cfg, t: *t0, y: *y0, f: *f0, h: dt, steps: 0 };
        let mut tau = 0.5 * (lo + hi) * dt;
        let mut y = probe.trial(tau).0;
        for _ in 0..8 {
            let s = self.section(&y);
            let speed = self.section_speed(&y);
            if speed.abs() < MIN_CROSSING_SPEED {
                return Err(Error::LostTransversality(speed.abs()));
            }
            let d = s / speed;
            tau = (tau - d).clamp(0.0, dt);
            y = probe.trial(tau).0;
            if d.abs() <= 1e-15 * (1.0 + tau) {
                break;
            }
        }
        Ok((t0 + tau, y))
    }

    /// Successive returns from a section point. `limit` bounds the section-coordinate
    /// norm; leaving it gives [`Error::Diverged`].
    pub fn returns(&self, q: Vec2, n: usize, limit: Option<f64>) -> Result<Vec<Return>> {
        self.returns_from_state(self.state(q), n, limit)
    }

    pub fn returns_from_state(&self, x0: [f64; 3], n: usize, limit: Option<f64>) -> Result<Vec<Return>> {
        let rhs = |y: &[f64; 3]| self.field.f(*y);
        let mut st = Stepper::new(rhs, x0, self.cfg)?;
        let t_guard = 1e-3 * self.base_period();
        let t_cap = 10.0 * self.base_period();
        let mut out = Vec::with_capacity(n);
        let mut t_last = 0.0;
        while out.len() < n {
            let prev = (st.y, st.f, st.t);
            st.step(f64::INFINITY)?;
            let (s0, s1) = (self.section(&prev.0), self.section(&st.y));
            if s0 < 0.0 && s1 >= 0.0 && st.t > t_guard {
                let (t, y) = self.locate(&prev, &st)?;
                if self.admissible(&y) {
                    let speed = self.section_speed(&y);
                    if speed < MIN_CROSSING_SPEED {
                        return Err(Error::LostTransversality(speed.abs()));
                    }
                    let j = self.coords(y);
                    let q = [j[0], j[2]];
                    if let Some(lim) = limit {
                        if !(q[0].hypot(q[1]) <= lim) {
                            return Err(Error::Diverged(out.len()));
                        }
                    }
                    out.push(Return { q, time: t - t_last, state: y, jacobian: None });
                    t_last = t;
                }
            }
            if st.t - t_last > t_cap {
                return Err(Error::NoReturn(st.t));
            }
        }
        Ok(out)
    }

    /// First return with the Jacobian of the section map from the variational equations.
    pub fn return_with_jacobian(&self, q: Vec2) -> Result<Return> {
        let x0 = self.state(q);
        let mut y0 = [0.0; 12];
        y0[..3].copy_from_slice(&x0);
        for i in 0..3 {
            y0[3 + 4 * i] = 1.0;
        }
        let rhs = |y: &[f64; 12]| {
            let x = [y[0], y[1], y[2]];
            let f = self.field.f(x);
            let jm = self.field.jac(x);
            let mut out = [0.0; 12];
            out[..3].copy_from_slice(&f);
            // Φ stored row-major in y[3..12]
            for r in 0..3 {
                for c in 0..3 {
                    out[3 + 3 * r + c] = (0..3).map(|k| jm[(r, k)] * y[3 + 3 * k + c]).sum();
                }
            }
            out
        };
        let mut st = Stepper::new(rhs, y0, self.cfg)?;
        let t_guard = 1e-3 * self.base_period();
        let t_cap = 10.0 * self.base_period();
        loop {
            let prev = (st.y, st.f, st.t);
            st.step(f64::INFINITY)?;
            let (s0, s1) = (self.section(&prev.0), self.section(&st.y));
            if s0 < 0.0 && s1 >= 0.0 && st.t > t_guard {
                let (t, y) = self.locate(&prev, &st)?;
                if self.admissible(&y) {
                    let x = [y[0], y[1], y[2]];
                    let f = Vector3::from(self.field.f(x));
                    let phi = Matrix3::from_row_slice(&y[3..12]);
                    let grad = self.frame_inv.row(1).transpose();
                    let speed = grad.dot(&f);
                    if speed < MIN_CROSSING_SPEED {
                        return Err(Error::LostTransversality(speed.abs()));
                    }
                    let proj = Matrix3::identity() - f * grad.transpose() / speed;
                    let d = self.frame_inv * proj * phi * self.frame;
                    let m = Matrix2::new(d[(0, 0)], d[(0, 2)], d[(2, 0)], d[(2, 2)]);
                    let j = self.coords(x);
                    return Ok(Return { q: [j[0], j[2]], time: t, state: x, jacobian: Some(m) });
                }
            }
            if st.t > t_cap {
                return Err(Error::NoReturn(st.t));
            }
        }
    }

    /// Section-map Jacobian by central differences with step `1e-7 (1 + |q|)`.
    pub fn fd_jacobian(&self, q: Vec2) -> Result<Matrix2<f64>> {
        let h = 1e-7 * (1.0 + q[0].hypot(q[1]));
        let mut m = Matrix2::zeros();
        for k in 0..2 {
            let mut a = q;
            let mut b = q;
            a[k] += h;
            b[k] -= h;
            let pa = self.returns(a, 1, None)?[0].q;
            let pb = self.returns(b, 1, None)?[0].q;
            m[(0, k)] = (pa[0] - pb[0]) / (2.0 * h);
            m[(1, k)] = (pa[1] - pb[1]) / (2.0 * h);
        }
        Ok(m)
    }

    fn return_and_jacobian(&self, q: Vec2, method: MonodromyMethod) -> Result<(Return, Matrix2<f64>)> {
        match method {
            MonodromyMethod::Variational => {
                let r = self.return_with_jacobian(q)?;
                Ok((r, r.jacobian.expect("variational return carries a Jacobian")))
            }
            MonodromyMethod::FiniteDifference => {
                let r = self.returns(q, 1, None)?[0];
                Ok((r, self.fd_jacobian(q)?))
            }
        }
    }
}

pub fn poincare_return(
    p: &OscillatorParams,
    family: ZeroHopfFamily,
    eps: f64,
    q: Vec2,
    n: usize,
    cfg: &IntegratorConfig,
) -> Result<Vec<(Vec2, f64)>> {
    let map = ReturnMap::new(p, family, eps, *cfg)?;
    Ok(map.returns(q, n, None)?.into_iter().map(|r| (r.q, r.time)).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShootingOptions {
    pub max_iter: usize,
    /// Newton stops once the residual falls below this.
    pub target: f64,
    /// Largest residual accepted as converged.
    pub accept: f64,
    pub monodromy: MonodromyMethod,
}

impl Default for ShootingOptions {
    fn default() -> Self {
        Self { max_iter: 25, target: 1e-11, accept: 1e-9, monodromy: MonodromyMethod::Variational }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PeriodicOrbit {
    pub q: Vec2,
    /// Point of the orbit in the original coordinates.
    pub state: [f64; 3],
    pub period: f64,
    pub residual: f64,
    pub iterations: usize,
    pub monodromy: [[f64; 2]; 2],
    pub multipliers: [Complex64; 2],
    pub stability: Stability,
}

pub fn classify_multipliers(m: &[Complex64; 2]) -> Stability {
    let inside = m.iter().filter(|z| z.norm() < 1.0).count();
    if m.iter().any(|z| (z.norm() - 1.0).abs() < 1e-12) {
        return Stability::Nonhyperbolic;
    }
    match inside {
        2 => Stability::Stable,
        0 => Stability::Unstable,
        _ => Stability::Saddle,
    }
}

fn norm2(v: Vec2) -> f64 {
    v[0].hypot(v[1])
}

/// Newton on `P(q) − q` from `seed`.
pub fn refine_periodic_orbit<V: VectorField3>(
    map: &ReturnMap<V>,
    seed: Vec2,
    opts: &ShootingOptions,
) -> Result<PeriodicOrbit> {
    let mut q = seed;
    let mut best = f64::INFINITY;
    for it in 0..=opts.max_iter {
        let (r, m) = map.return_and_jacobian(q, opts.monodromy)?;
        let res = [r.q[0] - q[0], r.q[1] - q[1]];
        let rn = norm2(res);
        let done = rn <= opts.target || (rn <= opts.accept && rn >= 0.5 * best);
        if done || it == opts.max_iter {
            if rn > opts.accept {
                return Err(Error::NewtonDiverged { iterations: it, residual: rn });
            }
            let mult = eigenvalues2(&m);
            return Ok(PeriodicOrbit {
                q,
                state: map.state(q),
                period: r.time,
                residual: rn,
                iterations: it,
                monodromy: [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]],
                multipliers: mult,
                stability: classify_multipliers(&mult),
            });
        }
        best = best.min(rn);
        let a = m - Matrix2::identity();
        let d = a
            .lu()
            .solve(&nalgebra::Vector2::new(-res[0], -res[1]))
            .ok_or(Error::NewtonDiverged { iterations: it, residual: rn })?;
        q = [q[0] + d[0], q[1] + d[1]];
        if !q.iter().all(|v| v.is_finite()) {
            return Err(Error::NewtonDiverged { iterations: it, residual: rn });
        }
    }
    unreachable!("loop returns on its last iteration")
}

/// Distance between the image of orbit `a` under `x ↦ −x` and orbit `b`,
/// measured on the section.
pub fn symmetry_defect<V: VectorField3>(map: &ReturnMap<V>, a: &PeriodicOrbit, b: &PeriodicOrbit) -> Result<f64> {
    let img = a.state.map(|v| -v);
    let r = map.returns_from_state(img, 1, None)?[0];
    Ok(norm2([r.q[0] - b.q[0], r.q[1] - b.q[1]]))
}

/// First-order multiplier prediction `exp(ε λ)` for eigenvalues `λ` of `Dg1`
/// with `g1 = y1(2π)`.
pub fn predicted_multipliers(dg1: &Matrix2<f64>, eps: f64) -> [Complex64; 2] {
    eigenvalues2(dg1).map(|l| (l * eps).exp())
}

/// Largest distance between the observed multipliers and the prediction,
/// minimized over the two pairings.
pub fn multiplier_error(observed: &[Complex64; 2], predicted: &[Complex64; 2]) -> f64 {
    let a = (observed[0] - predicted[0]).norm().max((observed[1] - predicted[1]).norm());
    let b = (observed[0] - predicted[1]).norm().max((observed[1] - predicted[0]).norm());
    a.min(b)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TorusVerdict {
    Torus,
    PeriodicLocked,
    Diverged,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusOptions {
    pub degree: usize,
    /// Relative to the mean radius of the samples.
    pub curve_tol: f64,
    /// Bound on the section-coordinate norm of the iterates.
    pub limit: f64,
}

impl Default for TorusOptions {
    fn default() -> Self {
        Self { degree: 8, curve_tol: 2e-3, limit: 10.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TorusEvidence {
    pub center: Vec2,
    pub seed: Vec2,
    pub iterates: Vec<Vec2>,
    pub return_times: Vec<f64>,
    pub n_transient: usize,
    pub n_sample: usize,
    pub rotation_number: f64,
    pub degree: usize,
    /// Cosine and sine coefficients `(a0, a1, b1, …)` of radius against angle.
    pub fit: Vec<f64>,
    pub mean_radius: f64,
    /// Max radial deviation from the fit over the mean radius.
    pub max_deviation: f64,
    pub monotone_winding: bool,
    pub converging: bool,
    pub verdict: TorusVerdict,
}

/// Least-squares Fourier fit of `ρ(φ)`; returns the coefficients and the max residual.
pub fn fourier_fit(phi: &[f64], rho: &[f64], degree: usize) -> (Vec<f64>, f64) {
    let n = phi.len();
    let m = 2 * degree + 1;
    let basis = |p: f64, j: usize| {
        if j == 0 {
            1.0
        } else if j % 2 == 1 {
            (j.div_ceil(2) as f64 * p).cos()
        } else {
            ((j / 2) as f64 * p).sin()
        }
    };
    let a = DMatrix::from_fn(n, m, |i, j| basis(phi[i], j));
    let b = DVector::from_column_slice(rho);
    let coef = a.clone().svd(true, true).solve(&b, 1e-14).unwrap_or_else(|_| DVector::zeros(m));
    let resid = (a * &coef - b).amax();
    (coef.iter().copied().collect(), resid)
}

/// Iterate the return map around the periodic point `center` and look for an
/// invariant closed curve.
pub fn detect_torus<V: VectorField3>(
    map: &ReturnMap<V>,
    center: Vec2,
    seed: Vec2,
    n_transient: usize,
    n_sample: usize,
    opts: &TorusOptions,
) -> Result<TorusEvidence> {
    if n_sample < 2 * opts.degree + 2 {
        return Err(Error::InvalidParams("too few samples for the curve fit".into()));
    }
    let total = n_transient + n_sample;
    let mut ev = TorusEvidence {
        center,
        seed,
        iterates: Vec::new(),
        return_times: Vec::new(),
        n_transient,
        n_sample,
        rotation_number: f64::NAN,
        degree: opts.degree,
        fit: Vec::new(),
        mean_radius: f64::NAN,
        max_deviation: f64::NAN,
        monotone_winding: false,
        converging: false,
        verdict: TorusVerdict::Inconclusive,
    };
    // iterate in chunks so that a blow-up keeps the iterates computed so far
    let mut x = map.state(seed);
    while ev.iterates.len() < total {
        let chunk = (total - ev.iterates.len()).min(100);
        match map.returns_from_state(x, chunk, Some(opts.limit)) {
            Ok(rs) => {
                for r in &rs {
                    ev.iterates.push(r.q);
                    ev.return_times.push(r.time);
                }
                x = rs.last().expect("nonempty chunk").state;
            }
            Err(
                Error::Diverged(_)
                | Error::StepLimitExceeded(_)
                | Error::StiffnessSuspected { .. }
                | Error::NoReturn(_),
            ) => {
                ev.verdict = TorusVerdict::Diverged;
                return Ok(ev);
            }
            Err(e) => return Err(e),
        }
    }
    let samples = &ev.iterates[n_transient..];
    let rel: Vec<Vec2> = samples.iter().map(|q| [q[0] - center[0], q[1] - center[1]]).collect();
    let rho: Vec<f64> = rel.iter().map(|d| norm2(*d)).collect();
    let phi: Vec<f64> = rel.iter().map(|d| d[1].atan2(d[0])).collect();
    let mean_r = rho.iter().sum::<f64>() / rho.len() as f64;
    ev.mean_radius = mean_r;

    let incs: Vec<f64> = phi
        .windows(2)
        .map(|w| {
            let d = w[1] - w[0];
            d - 2.0 * PI * (d / (2.0 * PI)).round()
        })
        .collect();
    let mean_inc = incs.iter().sum::<f64>() / incs.len() as f64;
    ev.rotation_number = (mean_inc / (2.0 * PI)).rem_euclid(1.0);
    ev.monotone_winding = incs.iter().all(|d| *d > 0.0) || incs.iter().all(|d| *d < 0.0);

    let q4 = rho.len() / 4;
    let first = rho[..q4].iter().sum::<f64>() / q4 as f64;
    let last = rho[rho.len() - q4..].iter().sum::<f64>() / q4 as f64;
    ev.converging = mean_r < 1e-9 || last < 0.5 * first;

    let scale = 1.0 + norm2(center);
    let locked = (1..=50).any(|per| {
        per < samples.len()
            && samples.iter().zip(&samples[per..]).all(|(a, b)| norm2([a[0] - b[0], a[1] - b[1]]) <= 1e-8 * scale)
    });

    let (fit, resid) = fourier_fit(&phi, &rho, opts.degree);
    ev.fit = fit;
    ev.max_deviation = if mean_r > 0.0 { resid / mean_r } else { f64::INFINITY };

    ev.verdict = if locked {
        TorusVerdict::PeriodicLocked
    } else if !ev.converging && ev.monotone_winding && ev.max_deviation <= opts.curve_tol {
        TorusVerdict::Torus
    } else {
        TorusVerdict::Inconclusive
    };
    Ok(ev)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_period() {
        let w = 2.0;
        let lin = LinearField(Matrix3::new(0.0, -w, 0.0, w, 0.0, 0.0, 0.0, 0.0, 0.0));
        let tr = integrate_field(&lin, [1.0, 0.0, 0.5], PI, &IntegratorConfig::default()).unwrap();
        let x = tr.x.last().unwrap();
        assert!((x[0] - 1.0).abs() < 1e-9 && x[1].abs() < 1e-9 && (x[2] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn exponential_decay_matches() {
        let lin = LinearField(Matrix3::from_diagonal(&Vector3::new(-1.0, 0.5, 0.0)));
        let tr = integrate_field(&lin, [1.0, 1.0, 1.0], 3.0, &IntegratorConfig::default()).unwrap();
        let x = tr.x.last().unwrap();
        assert!((x[0] - (-3f64).exp()).abs() < 1e-10);
        assert!((x[1] - 1.5f64.exp()).abs() < 1e-8);
    }

    #[test]
    fn rejects_bad_config() {
        let cfg = IntegratorConfig { rtol: 0.0, ..Default::default() };
        let lin = LinearField(Matrix3::zeros());
        assert!(integrate_field(&lin, [0.0; 3], 1.0, &cfg).is_err());
        assert!(integrate_field(&lin, [0.0; 3], -1.0, &IntegratorConfig::default()).is_err());
    }

    #[test]
    fn fourier_fit_recovers_coefficients() {
        let phi: Vec<f64> = (0..64).map(|i| i as f64 * 0.37).collect();
        let rho: Vec<f64> = phi.iter().map(|p| 1.0 + 0.2 * p.cos() - 0.1 * (3.0 * p).sin()).collect();
        let (c, r) = fourier_fit(&phi, &rho, 4);
        assert!(r < 1e-12);
        assert!((c[0] - 1.0).abs() < 1e-12 && (c[1] - 0.2).abs() < 1e-12 && (c[6] + 0.1).abs() < 1e-12);
    }

    #[test]
    fn multiplier_classes() {
        let c = |a: f64, b: f64| classify_multipliers(&[Complex64::new(a, 0.0), Complex64::new(b, 0.0)]);
        assert_eq!(c(0.5, 0.9), Stability::Stable);
        assert_eq!(c(0.5, 1.1), Stability::Saddle);
        assert_eq!(c(-1.5, 1.1), Stability::Unstable);
    }
}
