//! Averaged functions `g_1..g_4` by the recursive `y_i` integrals, and the
//! tabulated closed forms.
//!
//! With `y_0 = 0`,
//!
//! ```text
//! y1 = ∫ F1
//! y2 = ∫ 2F2 + 2 DF1·y1
//! y3 = ∫ 6F3 + 6 DF2·y1 + 3 D²F1(y1,y1) + 3 DF1·y2
//! y4 = ∫ 24F4 + 24 DF3·y1 + 12 D²F2(y1,y1) + 12 DF2·y2 + 12 D²F1(y1,y2)
//!        + 4 D³F1(y1,y1,y1) + 4 DF1·y3
//! ```
//!
//! and `g_i = y_i(2π)/i!`.

use std::f64::consts::PI;

use nalgebra::Matrix2;

use crate::coefficients::{OscillatorParams, ZeroHopfFamily};
use crate::standard_form::{StandardFormSystem, MAX_ORDER, PERIOD};
use crate::{Error, Result};

/// Default number of Simpson panels on `[0, 2π]`.
pub const DEFAULT_PANELS: usize = 2048;

pub type Vec2 = [f64; 2];

/// `F_1..F_4` evaluated together; entries past the order are zero.
pub type Coeffs = [Vec2; MAX_ORDER];

/// A `2π`-periodic planar system `dx/dθ = Σ εⁱ F_i(θ, x)`.
pub trait PeriodicSystem: Sync {
    fn order(&self) -> usize;

    fn eval(&self, theta: f64, x: Vec2) -> Coeffs;

    /// `F_1` alone; override when it is much cheaper than the full set.
    fn eval_first(&self, theta: f64, x: Vec2) -> Vec2 {
        self.eval(theta, x)[0]
    }
}

impl PeriodicSystem for StandardFormSystem {
    fn order(&self) -> usize {
        StandardFormSystem::order(self)
    }

    fn eval(&self, theta: f64, x: Vec2) -> Coeffs {
        let [a, b] = self.series(theta, x);
        let mut out = [[0.0; 2]; MAX_ORDER];
        for (i, o) in out.iter_mut().enumerate().take(self.order()) {
            *o = [a.0[i + 1], b.0[i + 1]];
        }
        out
    }

    fn eval_first(&self, theta: f64, x: Vec2) -> Vec2 {
        let (s, c) = theta.sin_cos();
        self.f1(c, s, x)
    }
}

/// A system given by a closure, for synthetic checks.
pub struct ClosureSystem<F> {
    order: usize,
    f: F,
}

impl<F: Fn(f64, Vec2) -> Coeffs + Sync> ClosureSystem<F> {
    pub fn new(order: usize, f: F) -> Result<Self> {
        if order == 0 || order > MAX_ORDER {
            return Err(Error::OrderUnavailable { requested: order, available: MAX_ORDER });
        }
        Ok(Self { order, f })
    }
}

impl<F: Fn(f64, Vec2) -> Coeffs + Sync> PeriodicSystem for ClosureSystem<F> {
    fn order(&self) -> usize {
        self.order
    }

    fn eval(&self, theta: f64, x: Vec2) -> Coeffs {
        (self.f)(theta, x)
    }
}

/// A map `R² → R²`, such as an averaged function or a closed form.
pub trait PlanarMap: Sync {
    fn eval(&self, x: Vec2) -> Vec2;
}

impl<F: Fn(Vec2) -> Vec2 + Sync> PlanarMap for F {
    fn eval(&self, x: Vec2) -> Vec2 {
        self(x)
    }
}

/// Central-difference step scales per derivative order; each is multiplied by `1 + |x|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FdSteps {
    pub h1: f64,
    pub h2: f64,
    pub h3: f64,
}

impl Default for FdSteps {
    fn default() -> Self {
        Self { h1: 1e-5, h2: 1e-4, h3: 6e-4 }
    }
}

fn norm(v: Vec2) -> f64 {
    v[0].hypot(v[1])
}

fn axpy(x: Vec2, a: f64, u: Vec2) -> Vec2 {
    [x[0] + a * u[0], x[1] + a * u[1]]
}

fn combine(terms: &[(f64, &Coeffs)]) -> Coeffs {
    let mut out = [[0.0; 2]; MAX_ORDER];
    for (w, c) in terms {
        for i in 0..MAX_ORDER {
            out[i][0] += w * c[i][0];
            out[i][1] += w * c[i][1];
        }
    }
    out
}

/// Derivatives of all `F_i` at once, applied to given vectors.
pub struct DerivativeTensors<'a, S: ?Sized> {
    sys: &'a S,
    pub steps: FdSteps,
}

impl<'a, S: PeriodicSystem + ?Sized> DerivativeTensors<'a, S> {
    pub fn new(sys: &'a S, steps: FdSteps) -> Self {
        Self { sys, steps }
    }

    /// `DF_i(θ, x)·v` for every order.
    pub fn jvp(&self, theta: f64, x: Vec2, v: Vec2) -> Coeffs {
        let n = norm(v);
        if n == 0.0 {
            return [[0.0; 2]; MAX_ORDER];
        }
        let h = self.steps.h1 * (1.0 + norm(x));
        let u = [v[0] / n, v[1] / n];
        let p = self.sys.eval(theta, axpy(x, h, u));
        let m = self.sys.eval(theta, axpy(x, -h, u));
        combine(&[(n / (2.0 * h), &p), (-n / (2.0 * h), &m)])
    }

    /// `D²F_i(θ, x)(u, v)`.
    pub fn hvp(&self, theta: f64, x: Vec2, u: Vec2, v: Vec2) -> Coeffs {
        let (nu, nv) = (norm(u), norm(v));
        if nu == 0.0 || nv == 0.0 {
            return [[0.0; 2]; MAX_ORDER];
        }
        let h = self.steps.h2 * (1.0 + norm(x));
        let a = [u[0] / nu, u[1] / nu];
        let b = [v[0] / nv, v[1] / nv];
        let at = |sa: f64, sb: f64| self.sys.eval(theta, axpy(axpy(x, sa * h, a), sb * h, b));
        let (pp, pm, mp, mm) = (at(1.0, 1.0), at(1.0, -1.0), at(-1.0, 1.0), at(-1.0, -1.0));
        let w = nu * nv / (4.0 * h * h);
        combine(&[(w, &pp), (-w, &pm), (-w, &mp), (w, &mm)])
    }

    /// `D³F_i(θ, x)(u, u, u)`.
    pub fn tvp(&self, theta: f64, x: Vec2, u: Vec2) -> Coeffs {
        let n = norm(u);
        if n == 0.0 {
            return [[0.0; 2]; MAX_ORDER];
        }
        let h = self.steps.h3 * (1.0 + norm(x));
        let a = [u[0] / n, u[1] / n];
        let at = |s: f64| self.sys.eval(theta, axpy(x, s * h, a));
        let (p2, p1, m1, m2) = (at(2.0), at(1.0), at(-1.0), at(-2.0));
        let w = n * n * n / (2.0 * h * h * h);
        combine(&[(w, &p2), (-2.0 * w, &p1), (2.0 * w, &m1), (-w, &m2)])
    }

    /// Jacobian matrix of `F_i` (1-based order).
    pub fn jacobian(&self, i: usize, theta: f64, x: Vec2) -> Matrix2<f64> {
        let c0 = self.jvp(theta, x, [1.0, 0.0])[i - 1];
        let c1 = self.jvp(theta, x, [0.0, 1.0])[i - 1];
        Matrix2::new(c0[0], c1[0], c0[1], c1[1])
    }
}

/// Running composite Simpson integral at every node of a uniform grid with an
/// even number of panels.
pub fn cumulative_simpson(f: &[Vec2], h: f64) -> Vec<Vec2> {
    let n = f.len() - 1;
    debug_assert!(n.is_multiple_of(2));
    let mut cum = vec![[0.0; 2]; n + 1];
    let mut a = 0;
    while a + 2 <= n {
        for c in 0..2 {
            let (fa, fb, fc) = (f[a][c], f[a + 1][c], f[a + 2][c]);
            cum[a + 1][c] = cum[a][c] + h / 12.0 * (5.0 * fa + 8.0 * fb - fc);
            cum[a + 2][c] = cum[a][c] + h / 3.0 * (fa + 4.0 * fb + fc);
        }
        a += 2;
    }
    cum
}

/// `y_1..y_k` on the shared θ-grid.
#[derive(Clone, Debug)]
pub struct YPath {
    pub h: f64,
    pub y: Vec<Vec<Vec2>>,
}

impl YPath {
    /// `y_k(θ)` by four-point Lagrange interpolation on the grid.
    pub fn at(&self, k: usize, theta: f64) -> Vec2 {
        let ys = &self.y[k - 1];
        let n = ys.len() - 1;
        let s = (theta / self.h).clamp(0.0, n as f64);
        let j = (s.floor() as usize).clamp(1, n.saturating_sub(2).max(1)) - 1;
        let nodes = [j, j + 1, j + 2, j + 3];
        let mut out = [0.0; 2];
        for (a, &na) in nodes.iter().enumerate() {
            let mut w = 1.0;
            for (b, &nb) in nodes.iter().enumerate() {
                if a != b {
                    w *= (s - nb as f64) / (na as f64 - nb as f64);
                }
            }
            out[0] += w * ys[na][0];
            out[1] += w * ys[na][1];
        }
        out
    }
}

/// The averaged function of a given order over a periodic system.
pub struct AveragedFunction<'a, S: ?Sized> {
    sys: &'a S,
    pub order: usize,
    pub panels: usize,
    pub steps: FdSteps,
}

/// `g_order` with the default grid and steps.
pub fn averaged<S: PeriodicSystem + ?Sized>(sys: &S, order: usize) -> Result<AveragedFunction<'_, S>> {
    AveragedFunction::new(sys, order, DEFAULT_PANELS)
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

impl<'a, S: PeriodicSystem + ?Sized> AveragedFunction<'a, S> {
    pub fn new(sys: &'a S, order: usize, panels: usize) -> Result<Self> {
        if order == 0 || order > sys.order() {
            return Err(Error::OrderUnavailable { requested: order, available: sys.order() });
        }
        if panels < 2 || !panels.is_multiple_of(2) {
            return Err(Error::InvalidParams(format!("panel count {panels} must be even")));
        }
        Ok(Self { sys, order, panels, steps: FdSteps::default() })
    }

    pub fn with_steps(mut self, steps: FdSteps) -> Self {
        self.steps = steps;
        self
    }

    pub fn system(&self) -> &'a S {
        self.sys
    }

    fn grid(&self) -> (f64, Vec<f64>) {
        let h = PERIOD / self.panels as f64;
        (h, (0..=self.panels).map(|j| j as f64 * h).collect())
    }

    /// `y_1..y_order` on the grid at `x`.
    pub fn path(&self, x: Vec2) -> YPath {
        let (h, th) = self.grid();
        let k = self.order;
        if k == 1 {
            let f: Vec<Vec2> = th.iter().map(|&t| self.sys.eval_first(t, x)).collect();
            return YPath { h, y: vec![cumulative_simpson(&f, h)] };
        }
        let d = DerivativeTensors::new(self.sys, self.steps);
        let base: Vec<Coeffs> = th.iter().map(|&t| self.sys.eval(t, x)).collect();
        let lin = |w: &[(f64, Vec2)]| -> Vec2 { w.iter().fold([0.0; 2], |acc, (a, v)| axpy(acc, *a, *v)) };

        let f1: Vec<Vec2> = base.iter().map(|c| c[0]).collect();
        let y1 = cumulative_simpson(&f1, h);
        let mut ys = vec![y1];

        let j1: Vec<Coeffs> = th.iter().zip(&ys[0]).map(|(&t, &v)| d.jvp(t, x, v)).collect();
        let i2: Vec<Vec2> = (0..th.len()).map(|j| lin(&[(2.0, base[j][1]), (2.0, j1[j][0])])).collect();
        ys.push(cumulative_simpson(&i2, h));
        if k == 2 {
            return YPath { h, y: ys };
        }

        let j2: Vec<Coeffs> = th.iter().zip(&ys[1]).map(|(&t, &v)| d.jvp(t, x, v)).collect();
        let h11: Vec<Coeffs> = th.iter().zip(&ys[0]).map(|(&t, &v)| d.hvp(t, x, v, v)).collect();
        let i3: Vec<Vec2> = (0..th.len())
            .map(|j| lin(&[(6.0, base[j][2]), (6.0, j1[j][1]), (3.0, h11[j][0]), (3.0, j2[j][0])]))
            .collect();
        ys.push(cumulative_simpson(&i3, h));
        if k == 3 {
            return YPath { h, y: ys };
        }

        let i4: Vec<Vec2> = (0..th.len())
            .map(|j| {
                let t = th[j];
                let (y1, y2, y3) = (ys[0][j], ys[1][j], ys[2][j]);
                let j3 = d.jvp(t, x, y3);
                let h12 = d.hvp(t, x, y1, y2);
                let t111 = d.tvp(t, x, y1);
                lin(&[
                    (24.0, base[j][3]),
                    (24.0, j1[j][2]),
                    (12.0, h11[j][1]),
                    (12.0, j2[j][1]),
                    (12.0, h12[0]),
                    (4.0, t111[0]),
                    (4.0, j3[0]),
                ])
            })
            .collect();
        ys.push(cumulative_simpson(&i4, h));
        YPath { h, y: ys }
    }

    /// `g_1..g_order` at `x`.
    pub fn eval_all(&self, x: Vec2) -> Vec<Vec2> {
        let path = self.path(x);
        path.y
            .iter()
            .enumerate()
            .map(|(i, y)| {
                let f = factorial(i + 1);
                let last = y[y.len() - 1];
                [last[0] / f, last[1] / f]
            })
            .collect()
    }
}

impl<S: PeriodicSystem + ?Sized> PlanarMap for AveragedFunction<'_, S> {
    fn eval(&self, x: Vec2) -> Vec2 {
        self.eval_all(x)[self.order - 1]
    }
}

/// Pairs with a printed closed form.
pub const TABULATED: [(ZeroHopfFamily, usize); 8] = [
    (ZeroHopfFamily::Thm1, 1),
    (ZeroHopfFamily::H1, 1),
    (ZeroHopfFamily::H2, 1),
    (ZeroHopfFamily::H3, 2),
    (ZeroHopfFamily::H3, 3),
    (ZeroHopfFamily::H3, 4),
    (ZeroHopfFamily::H4, 1),
    (ZeroHopfFamily::H4, 2),
];

/// Printed averaged functions in the `y_i(2π)/i!` convention. Forms printed as
/// θ-means (the first-order ones) are multiplied by `2π`.
pub fn closed_form_g(f: ZeroHopfFamily, order: usize, x: Vec2, p: &OscillatorParams) -> Result<Vec2> {
    let mean = |v: Vec2| Ok([2.0 * PI * v[0], 2.0 * PI * v[1]]);
    match (f, order) {
        (ZeroHopfFamily::Thm1 | ZeroHopfFamily::III, 1) => mean(g1_thm1_mean(x, p)),
        (ZeroHopfFamily::H1, 1) => mean(g1_h1_mean(x, p)),
        (ZeroHopfFamily::H2, 1) => mean(g1_h2_mean(x, p)),
        (ZeroHopfFamily::H3, 2) => Ok(g2_h3(x, p)),
        (ZeroHopfFamily::H3, 3) => Ok(g3_h3(x, p)),
        (ZeroHopfFamily::H3, 4) => Ok(g4_h3(x, p)),
        (ZeroHopfFamily::H4, 1) => mean(g1_h4_mean(x, p)),
        (ZeroHopfFamily::H4, 2) => Ok(g2_h4(x, p)),
        _ => Err(Error::NotTabulated { family: f.to_string(), order }),
    }
}

/// First-order form for the three-orbit family, with `μ1` in the linear terms.
pub fn g1_thm1_mean(x: Vec2, p: &OscillatorParams) -> Vec2 {
    let [r, z] = x;
    let (h0, k0, a1, mu1, nu0, w) = (p.h.c(0), p.k.c(0), p.alpha.c(1), p.mu.c(1), p.nu.c(0), p.omega);
    let w2 = w * w;
    let w3 = w2 * w;
    let w5 = w3 * w2;
    let q = k0 * nu0 + w2;
    let g1 = r * (3.0 * h0 * h0 * k0 * nu0 * nu0 * z * z / (2.0 * w5) - (a1 * w2 + k0 * mu1 * nu0 * nu0) / (2.0 * w3))
        + 3.0 * k0 * nu0.powi(4) * r.powi(3) / (8.0 * w5);
    let g2 =
        -h0 * h0 * nu0 * z.powi(3) * q / w5 - 3.0 * nu0.powi(3) * r * r * z * q / (2.0 * w5) + mu1 * nu0 * z * q / w3;
    [g1, g2]
}

pub fn g1_h1_mean(x: Vec2, p: &OscillatorParams) -> Vec2 {
    let [r, z] = x;
    let (h1, a1, b0, mu0, mu1, nu0, nu1, w) =
        (p.h.c(1), p.alpha.c(1), p.beta.c(0), p.mu.c(0), p.mu.c(1), p.nu.c(0), p.nu.c(1), p.omega);
    let w3 = w.powi(3);
    [
        r * (w * w * (mu0 * nu1 - a1 + mu1 * nu0) - b0 * h1 * mu0 * nu0) / (2.0 * w3)
            - 3.0 * nu0 * r.powi(3) / (8.0 * w),
        b0 * h1 * mu0 * nu0 * z / w3,
    ]
}

pub fn g1_h2_mean(x: Vec2, p: &OscillatorParams) -> Vec2 {
    let [r, z] = x;
    let (h0, a1, b1, mu0, mu1, nu0, nu1, w) =
        (p.h.c(0), p.alpha.c(1), p.beta.c(1), p.mu.c(0), p.mu.c(1), p.nu.c(0), p.nu.c(1), p.omega);
    let w3 = w.powi(3);
    [
        r * ((w * w * (mu0 * nu1 - a1 + mu1 * nu0) - b1 * h0 * mu0 * nu0) / (2.0 * w3)
            - 3.0 * h0 * h0 * nu0.powi(5) * z * z / (2.0 * w.powi(7)))
            - 3.0 * nu0 * r.powi(3) / (8.0 * w),
        b1 * h0 * mu0 * nu0 * z / w3,
    ]
}

pub fn g1_h4_mean(x: Vec2, p: &OscillatorParams) -> Vec2 {
    let r = x[0];
    let (a1, mu1, nu0, w) = (p.alpha.c(1), p.mu.c(1), p.nu.c(0), p.omega);
    [-3.0 * nu0 * r.powi(3) / (8.0 * w) - r * (a1 - mu1 * nu0) / (2.0 * w), 0.0]
}

pub fn g2_h4(x: Vec2, p: &OscillatorParams) -> Vec2 {
    let [r, z] = x;
    let (h1, k1) = (p.h.c(1), p.k.c(1));
    let (a1, a2) = (p.alpha.c(1), p.alpha.c(2));
    let (b0, b1) = (p.beta.c(0), p.beta.c(1));
    let (mu1, mu2) = (p.mu.c(1), p.mu.c(2));
    let (nu0, nu1) = (p.nu.c(0), p.nu.c(1));
    let w = p.omega;
    let r2 = r * r;
    let g1 = PI / (32.0 * nu0 * w.powi(4))
        * (4.0 * b0 * h1 * nu0 * r * w * (4.0 * a1 - 12.0 * mu1 * nu0 + 9.0 * nu0 * r2)
            + 8.0 * h1 * nu0.powi(3) * z * (4.0 * a1 - 4.0 * mu1 * nu0 + 9.0 * nu0 * r2)
            + r * w
                * (w * (4.0
                    * w
                    * (4.0 * a1 * nu1 + nu0 * (-8.0 * a2 + 4.0 * mu1 * nu1 + 8.0 * mu2 * nu0 - 3.0 * nu1 * r2))
                    + PI * nu0
                        * (4.0 * a1 - 4.0 * mu1 * nu0 + 3.0 * nu0 * r2)
                        * (4.0 * a1 - 4.0 * mu1 * nu0 + 9.0 * nu0 * r2))
                    - 4.0 * k1 * nu0 * nu0 * (4.0 * a1 - 4.0 * mu1 * nu0 + 3.0 * nu0 * r2)));
    let g2 = PI * b0 * h1 * nu0 * z * (2.0 * mu1 - 3.0 * r2) / w.powi(3)
        + PI * r * (b1 * nu0 - b0 * nu1) * (4.0 * a1 - 4.0 * mu1 * nu0 + 3.0 * nu0 * r2) / (4.0 * nu0.powi(3));
    [g1, g2]
}

/// Coefficients used by the H3 forms.
struct H3Coeffs {
    h0: f64,
    h1: f64,
    h2: f64,
    k0: f64,
    k1: f64,
    k2: f64,
    a3: f64,
    a4: f64,
    b1: f64,
    b2: f64,
    mu1: f64,
    mu2: f64,
    mu3: f64,
    nu1: f64,
    nu2: f64,
    nu3: f64,
    w: f64,
}

impl H3Coeffs {
    fn new(p: &OscillatorParams) -> Self {
        Self {
            h0: p.h.c(0),
            h1: p.h.c(1),
            h2: p.h.c(2),
            k0: p.k.c(0),
            k1: p.k.c(1),
            k2: p.k.c(2),
            a3: p.alpha.c(3),
            a4: p.alpha.c(4),
            b1: p.beta.c(1),
            b2: p.beta.c(2),
            mu1: p.mu.c(1),
            mu2: p.mu.c(2),
            mu3: p.mu.c(3),
            nu1: p.nu.c(1),
            nu2: p.nu.c(2),
            nu3: p.nu.c(3),
            w: p.omega,
        }
    }
}

pub fn g2_h3(x: Vec2, p: &OscillatorParams) -> Vec2 {
    let z = x[1];
    let (h0, mu1, nu1, w) = (p.h.c(0), p.mu.c(1), p.nu.c(1), p.omega);
    [0.0, 2.0 * PI * nu1 * (mu1 * w * w - h0 * h0 * z * z) * z / w.powi(3)]
}

pub fn g3_h3(x: Vec2, p: &OscillatorParams) -> Vec2 {
    let [r, z] = x;
    let H3Coeffs { h0, h1, k0, k1, a3, b1, mu1, mu2, nu1, nu2, w, .. } = H3Coeffs::new(p);
    let w2 = w * w;
    let w4 = w2 * w2;
    let g1 = PI / w.powi(5)
        * (h0 * h0 * nu1 * z * z * (2.0 * h0 * k1 * z - 2.0 * h1 * k0 * z + 3.0 * k0 * nu1 * r)
            - mu1 * nu1 * w2 * (2.0 * h0 * k1 * z - 2.0 * h1 * k0 * z + k0 * nu1 * r)
            - a3 * r * w4);
    let g2 = PI / (h0 * w.powi(5))
        * (h0.powi(3) * nu1 * z.powi(3) * (b1 * h0 - 3.0 * k0 * nu1)
            + h0 * w2
                * z
                * (-2.0 * h0 * h0 * nu2 * z * z
                    + h0 * nu1 * (h1 * z * z - b1 * mu1 - 6.0 * nu1 * r * z)
                    + 3.0 * k0 * mu1 * nu1 * nu1)
            + w4 * (2.0 * h0 * z * (mu1 * nu2 + mu2 * nu1) - h1 * mu1 * nu1 * z + 2.0 * mu1 * nu1 * nu1 * r));
    [g1, g2]
}

pub fn g4_h3(x: Vec2, p: &OscillatorParams) -> Vec2 {
    let [r, z] = x;
    let H3Coeffs { h0, h1, h2, k0, k1, k2, a3, a4, b1, b2, mu1, mu2, mu3, nu1, nu2, nu3, w } = H3Coeffs::new(p);
    let w2 = w * w;
    let w4 = w2 * w2;
    let w6 = w4 * w2;
    let g1 = PI / (2.0 * h0 * w.powi(7))
        * (h0.powi(3)
            * nu1
            * z
            * z
            * (-3.0 * k0 * nu1 * (-4.0 * h0 * k1 * z + 3.0 * b1 * h0 * r + 4.0 * h1 * k0 * z)
                + 2.0 * b1 * h0 * z * (h1 * k0 - h0 * k1)
                + 9.0 * k0 * k0 * nu1 * nu1 * r)
            + h0 * w2
                * (4.0 * h0 * h0 * nu2 * z * z * (h0 * k1 * z - h1 * k0 * z + 3.0 * k0 * nu1 * r)
                    + nu1
                        * (2.0
                            * h0
                            * z.powi(3)
                            * (-3.0 * h0 * h1 * k1 + 2.0 * h0 * (h0 * k2 - h2 * k0) + 3.0 * h1 * h1 * k0)
                            + 3.0 * h0 * nu1 * r * z * z * (6.0 * h0 * k1 - 7.0 * h1 * k0)
                            + k0 * mu1 * nu1 * (-8.0 * h0 * k1 * z + 3.0 * b1 * h0 * r + 8.0 * h1 * k0 * z)
                            + 2.0 * b1 * h0 * mu1 * z * (h0 * k1 - h1 * k0)
                            - 3.0 * k0 * nu1 * nu1 * r * (k0 * mu1 - 4.0 * h0 * r * z)))
            - w4 * (h0
                * h0
                * (2.0 * k1 * z * (a3 + 2.0 * mu1 * nu2 + 2.0 * mu2 * nu1)
                    + 4.0 * k2 * mu1 * nu1 * z
                    + a3 * b1 * (-r))
                + h0 * (nu1
                    * (-4.0 * h2 * k0 * mu1 * z
                        + k0 * r * (a3 + 4.0 * mu1 * nu2 + 2.0 * mu2 * nu1)
                        + 6.0 * k1 * mu1 * nu1 * r)
                    - 2.0 * h1 * z * (k0 * (a3 + 2.0 * mu1 * nu2 + 2.0 * mu2 * nu1) + 3.0 * k1 * mu1 * nu1))
                + h1 * k0 * mu1 * nu1 * (6.0 * h1 * z - 7.0 * nu1 * r))
            + r * w6 * (a3 * h1 - 2.0 * a4 * h0));
    let g2 = PI / (4.0 * h0 * h0 * w.powi(7))
        * (24.0 * PI * h0.powi(6) * nu1 * nu1 * w * z.powi(5)
            - 3.0 * h0.powi(4) * nu1 * z.powi(3) * (b1 * h0 - k0 * nu1) * (b1 * h0 - 5.0 * k0 * nu1)
            - 32.0 * PI * h0.powi(4) * mu1 * nu1 * nu1 * w.powi(3) * z.powi(3)
            + w6 * (8.0 * h0 * h0 * z * (mu1 * nu3 + mu2 * nu2 + mu3 * nu1)
                - 4.0 * h0 * z * (h1 * mu1 * nu2 + h1 * mu2 * nu1 + h2 * mu1 * nu1)
                + 4.0 * h0 * nu1 * r * (a3 + 4.0 * mu1 * nu2 + 2.0 * mu2 * nu1)
                + h1 * mu1 * nu1 * (3.0 * h1 * z - 4.0 * nu1 * r))
            + 8.0 * PI * h0 * h0 * mu1 * mu1 * nu1 * nu1 * w.powi(5) * z
            + h0 * w4
                * (-8.0 * h0.powi(3) * nu3 * z.powi(3)
                    + 4.0
                        * h0
                        * h0
                        * z
                        * (-nu1 * (b1 * mu2 + b2 * mu1) + h1 * nu2 * z * z + h2 * nu1 * z * z
                            - nu2 * (b1 * mu1 + 12.0 * nu1 * r * z))
                    + h0 * nu1
                        * (-3.0 * h1 * h1 * z.powi(3)
                            + 2.0 * h1 * z * (b1 * mu1 + 6.0 * nu1 * r * z)
                            + 4.0
                                * nu1
                                * (3.0 * k0 * mu2 * z + 5.0 * k1 * mu1 * z
                                    - 3.0 * r * (b1 * mu1 + 3.0 * nu1 * r * z))
                            + 24.0 * k0 * mu1 * nu2 * z)
                    + 2.0 * k0 * mu1 * nu1 * nu1 * (12.0 * nu1 * r - 13.0 * h1 * z))
            + h0 * h0
                * w2
                * z
                * (4.0 * h0.powi(3) * z * z * (b1 * nu2 + b2 * nu1)
                    + h0 * h0
                        * nu1
                        * (3.0 * b1 * b1 * mu1 - 2.0 * b1 * z * z - 12.0 * z * z * (2.0 * k0 * nu2 + 3.0 * k1 * nu1)
                            + 36.0 * b1 * nu1 * r * z)
                    - 6.0 * h0 * k0 * nu1 * nu1 * (3.0 * b1 * mu1 - 7.0 * h1 * z * z + 12.0 * nu1 * r * z)
                    + 15.0 * k0 * k0 * mu1 * nu1.powi(3)));
    [g1, g2]
}
