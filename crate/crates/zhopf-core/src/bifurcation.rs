//! Zeros of averaged functions and their stability, the three-orbit
//! predictions, the Lyapunov–Schmidt functions for H3, the Neimark–Sacker
//! analysis of the symmetric orbits, and the H4 displacement zero.
//!
//! Quantities carried over from the printed formulas (`lambda1`, `A`, `B`,
//! `omega_0`, `alpha'`) use the θ-mean averaged function `g1/2π`; `ell_1` uses
//! `g1 = y1(2π)`.

use std::f64::consts::PI;

use nalgebra::Matrix2;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::averaging::{averaged, PlanarMap, Vec2};
use crate::coefficients::{
    check_family, thm1_deltas, Coefficient, OscillatorParams, ZeroHopfFamily, DEFAULT_RESIDUAL_TOL,
};
use crate::standard_form::{ReductionPipeline, StandardFormSystem};
use crate::{Error, Result};

/// Newton residual target for zeros of averaged functions.
pub const NEWTON_TOL: f64 = 1e-12;
/// Radius within which converged zeros are merged.
pub const DEDUP_RADIUS: f64 = 1e-6;
/// Real parts within this margin of zero count as nonhyperbolic.
pub const HYPERBOLICITY_MARGIN: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stability {
    Stable,
    Unstable,
    Saddle,
    Nonhyperbolic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

impl std::str::FromStr for Branch {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "+" | "plus" => Ok(Branch::Plus),
            "-" | "minus" => Ok(Branch::Minus),
            _ => Err(Error::InvalidParams(format!("unknown branch `{s}`"))),
        }
    }
}

pub fn eigenvalues2(j: &Matrix2<f64>) -> [Complex64; 2] {
    let tr = j.trace();
    let det = j.determinant();
    let disc = tr * tr / 4.0 - det;
    if disc >= 0.0 {
        let s = disc.sqrt();
        [Complex64::new(tr / 2.0 - s, 0.0), Complex64::new(tr / 2.0 + s, 0.0)]
    } else {
        let s = (-disc).sqrt();
        [Complex64::new(tr / 2.0, -s), Complex64::new(tr / 2.0, s)]
    }
}

/// Stability of the orbit predicted by a zero with the given Jacobian eigenvalues.
pub fn classify_eigenvalues(ev: &[Complex64; 2]) -> Stability {
    let m = HYPERBOLICITY_MARGIN;
    if ev.iter().any(|e| e.re.abs() <= m) {
        return Stability::Nonhyperbolic;
    }
    let real = ev.iter().all(|e| e.im == 0.0);
    let neg = ev.iter().filter(|e| e.re < 0.0).count();
    match (real, neg) {
        (_, 2) => Stability::Stable,
        (true, 1) => Stability::Saddle,
        _ => Stability::Unstable,
    }
}

pub fn classify_jacobian(j: &Matrix2<f64>) -> Stability {
    classify_eigenvalues(&eigenvalues2(j))
}

/// Central-difference Jacobian with step `h·(1 + |x|)`.
pub fn fd_jacobian(g: &(impl PlanarMap + ?Sized), x: Vec2, h: f64) -> Matrix2<f64> {
    let s = h * (1.0 + x[0].hypot(x[1]));
    let col = |k: usize| {
        let mut p = x;
        let mut m = x;
        p[k] += s;
        m[k] -= s;
        let (a, b) = (g.eval(p), g.eval(m));
        [(a[0] - b[0]) / (2.0 * s), (a[1] - b[1]) / (2.0 * s)]
    };
    let (c0, c1) = (col(0), col(1));
    Matrix2::new(c0[0], c1[0], c0[1], c1[1])
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AveragedZero {
    pub x: Vec2,
    /// Order of the averaged function the zero belongs to.
    pub order: usize,
    pub residual: f64,
    pub jacobian: [[f64; 2]; 2],
    pub det: f64,
    pub eigenvalues: [Complex64; 2],
    pub stability: Stability,
    pub simple: bool,
}

impl AveragedZero {
    pub fn new(x: Vec2, order: usize, residual: f64, j: Matrix2<f64>) -> Self {
        let ev = eigenvalues2(&j);
        let det = j.determinant();
        Self {
            x,
            order,
            residual,
            jacobian: [[j[(0, 0)], j[(0, 1)]], [j[(1, 0)], j[(1, 1)]]],
            det,
            eigenvalues: ev,
            stability: classify_eigenvalues(&ev),
            simple: det.abs() > HYPERBOLICITY_MARGIN,
        }
    }
}

pub fn classify_zero(z: &AveragedZero) -> Stability {
    classify_eigenvalues(&z.eigenvalues)
}

/// Axis-aligned search box in `(r, z)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SearchBox {
    pub r: (f64, f64),
    pub z: (f64, f64),
}

impl SearchBox {
    fn contains(&self, x: Vec2) -> bool {
        x[0] >= self.r.0 && x[0] <= self.r.1 && x[1] >= self.z.0 && x[1] <= self.z.1
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZeroSearch {
    pub zeros: Vec<AveragedZero>,
    pub attempted: usize,
    pub converged: usize,
}

fn vnorm(v: Vec2) -> f64 {
    v[0].hypot(v[1])
}

/// Damped Newton on a planar map from `x0`; `None` if it stalls.
pub fn newton2(g: &(impl PlanarMap + ?Sized), x0: Vec2, tol: f64, max_iter: usize) -> Option<(Vec2, f64)> {
    let mut x = x0;
    let mut gx = g.eval(x);
    let mut res = vnorm(gx);
    for _ in 0..max_iter {
        if res <= tol {
            return Some((x, res));
        }
        let j = fd_jacobian(g, x, 1e-6);
        let step = j.lu().solve(&nalgebra::Vector2::new(-gx[0], -gx[1]))?;
        let mut lam = 1.0;
        loop {
            let xn = [x[0] + lam * step[0], x[1] + lam * step[1]];
            let gn = g.eval(xn);
            let rn = vnorm(gn);
            if rn.is_finite() && (rn < res || lam < 1e-3) {
                let moved = lam * vnorm([step[0], step[1]]);
                x = xn;
                gx = gn;
                res = rn;
                if moved < 1e-15 * (1.0 + vnorm(x)) && res > tol {
                    return None;
                }
                break;
            }
            lam *= 0.5;
        }
        if !res.is_finite() {
            return None;
        }
    }
    (res <= tol).then_some((x, res))
}

/// Newton from the centre of every grid cell; zeros inside the box are merged
/// within [`DEDUP_RADIUS`] and sorted by `(r, z)`.
pub fn find_zeros(
    g: &(impl PlanarMap + ?Sized),
    order: usize,
    bx: SearchBox,
    grid: (usize, usize),
) -> Result<ZeroSearch> {
    if !(bx.r.0 > 0.0 && bx.r.1 > bx.r.0 && bx.z.1 > bx.z.0) || grid.0 == 0 || grid.1 == 0 {
        return Err(Error::InvalidParams("search box must have r > 0 and positive extent".into()));
    }
    let seeds: Vec<Vec2> = (0..grid.0)
        .flat_map(|i| {
            (0..grid.1).map(move |j| {
                [
                    bx.r.0 + (i as f64 + 0.5) * (bx.r.1 - bx.r.0) / grid.0 as f64,
                    bx.z.0 + (j as f64 + 0.5) * (bx.z.1 - bx.z.0) / grid.1 as f64,
                ]
            })
        })
        .collect();
    let found: Vec<(Vec2, f64)> = seeds.par_iter().filter_map(|&s| newton2(g, s, NEWTON_TOL, 60)).collect();
    let converged = found.len();
    let mut zeros: Vec<AveragedZero> = Vec::new();
    for (x, res) in found {
        if !bx.contains(x) || zeros.iter().any(|z| vnorm([z.x[0] - x[0], z.x[1] - x[1]]) < DEDUP_RADIUS) {
            continue;
        }
        zeros.push(AveragedZero::new(x, order, res, fd_jacobian(g, x, 1e-6)));
    }
    zeros.sort_by(|a, b| a.x[0].total_cmp(&b.x[0]).then(a.x[1].total_cmp(&b.x[1])));
    Ok(ZeroSearch { zeros, attempted: seeds.len(), converged })
}

fn sqrt_opt(v: f64) -> Option<f64> {
    (v >= 0.0).then(|| v.sqrt())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PredictionReport {
    pub delta_a: f64,
    pub delta_b: f64,
    pub delta_c: f64,
    pub delta_d: f64,
    /// As printed.
    pub lambda1: f64,
    pub lambda2: f64,
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    pub lambda_plus: Complex64,
    pub lambda_minus: Complex64,
    pub r0: Option<f64>,
    pub r1: Option<f64>,
    pub z1: Option<f64>,
    pub z2: Option<f64>,
    pub ell_1_1: f64,
    pub ell_1: f64,
    pub mu_hat_1: f64,
    /// Eigenvalues of `Dg1(r0, 0)`.
    pub central_eigenvalues: [f64; 2],
    pub central_det: f64,
    /// `−δ_d δ_c δ_c / (k0³ α1 ν0 ω⁶)` as printed.
    pub central_det_printed: f64,
    pub symmetric_trace: f64,
    pub symmetric_det: f64,
    pub symmetric_eigenvalues: [Complex64; 2],
    pub central_stability: Stability,
    pub symmetric_stability: Stability,
    /// `δ_a, δ_b, δ_c > 0` and `δ_d ≠ 0`.
    pub three_orbits: bool,
    pub all_deltas_positive: bool,
    /// Three orbits exist and `ℓ1 ≠ 0`.
    pub torus_bifurcation: bool,
}

pub fn predict_theorem1(p: &OscillatorParams) -> Result<PredictionReport> {
    let rep = check_family(p, ZeroHopfFamily::Thm1, DEFAULT_RESIDUAL_TOL)?;
    if !rep.member {
        return Err(Error::FamilyMismatch { family: "THM1".into(), detail: rep.failures().join("; ") });
    }
    let d = thm1_deltas(p);
    let (h0, k0, a1, mu1, nu0, w) = (p.h.c(0), p.k.c(0), p.alpha.c(1), p.mu.c(1), p.nu.c(0), p.omega);
    let (w2, w3) = (w * w, w * w * w);
    let w6 = w3 * w3;
    let q = k0 * nu0 + w2;

    let lambda1 = q * (2.0 * a1 * w2 + 5.0 * a1 * k0 * nu0 + k0 * mu1 * nu0 * nu0) / (k0 * nu0 * w3);
    let lambda2 = -(8.0 * a1 * w2 + 15.0 * a1 * k0 * nu0 + 2.0 * k0 * mu1 * nu0 * nu0) / (4.0 * w3);
    let a = (k0 * nu0 + 2.0 * w2) * (4.0 * a1 * w2 + k0 * nu0 * (5.0 * a1 + 2.0 * mu1 * nu0)) / (8.0 * k0 * nu0 * w3);
    let b = (64.0 * a1 * a1 * w.powi(8)
        + (k0 * nu0).powi(4) * (145.0 * a1 * a1 + 276.0 * a1 * mu1 * nu0 + 36.0 * (mu1 * nu0).powi(2))
        + 4.0 * (k0 * nu0).powi(3) * w2 * (153.0 * a1 * a1 + 136.0 * a1 * mu1 * nu0 + 12.0 * (mu1 * nu0).powi(2))
        + 4.0 * (k0 * nu0).powi(2) * w.powi(4) * (221.0 * a1 * a1 + 84.0 * a1 * mu1 * nu0 + 4.0 * (mu1 * nu0).powi(2))
        + 32.0 * a1 * k0 * nu0 * w.powi(6) * (15.0 * a1 + 2.0 * mu1 * nu0))
        / (a1 * a1 * k0 * k0 * nu0 * nu0);
    let sqrt_b = Complex64::new(b, 0.0).sqrt();
    let lam_pm = sqrt_b * (a1 / (8.0 * w3));
    let lambda_plus = Complex64::new(a, 0.0) + lam_pm;
    let lambda_minus = Complex64::new(a, 0.0) - lam_pm;

    let r0 = sqrt_opt((a1 * w2 + k0 * mu1 * nu0 * nu0) / (3.0 * k0)).map(|s| 2.0 * w / (nu0 * nu0) * s);
    let r1 = sqrt_opt((2.0 * k0 * mu1 * nu0 * nu0 - a1 * w2) / (15.0 * k0)).map(|s| 2.0 * w / (nu0 * nu0) * s);
    let z1 = sqrt_opt((2.0 * a1 * w2 + k0 * mu1 * nu0 * nu0) / (5.0 * k0)).map(|s| w / (h0 * nu0) * s);
    let z2 = z1.map(|z| -z);

    let ell_1_1 = -h0 * h0 * nu0 * (5.0 * k0 * k0 * nu0 * nu0 + 16.0 * k0 * nu0 * w2 + 8.0 * w2 * w2) / q;
    let ell_1 = 3.0 * PI / (8.0 * w3) * ell_1_1;
    let mu_hat_1 = -a1 * (5.0 * k0 * nu0 + 4.0 * w2) / (2.0 * k0 * nu0 * nu0);

    let central_eigenvalues = [d.delta_c / (k0 * w3), -d.delta_b * d.delta_d / (a1 * k0 * k0 * nu0 * w3)];
    let central_det = -d.delta_b * d.delta_c * d.delta_d / (a1 * k0.powi(3) * nu0 * w6);
    let central_det_printed = -d.delta_d * d.delta_c * d.delta_c / (k0.powi(3) * a1 * nu0 * w6);
    let symmetric_trace = -(4.0 * a1 * w2 + 5.0 * a1 * k0 * nu0 + 2.0 * k0 * mu1 * nu0 * nu0) / (5.0 * k0 * nu0 * w);
    let symmetric_det = 2.0 * d.delta_a * d.delta_b * d.delta_d / (5.0 * k0.powi(3) * nu0 * a1 * w6);
    let symmetric_eigenvalues = eigenvalues2(&Matrix2::new(
        symmetric_trace / 2.0,
        -1.0,
        symmetric_det - symmetric_trace.powi(2) / 4.0,
        symmetric_trace / 2.0,
    ));
    let ce = [Complex64::new(central_eigenvalues[0], 0.0), Complex64::new(central_eigenvalues[1], 0.0)];

    let three_orbits = d.delta_a > 0.0 && d.delta_b > 0.0 && d.delta_c > 0.0 && d.delta_d != 0.0;
    Ok(PredictionReport {
        delta_a: d.delta_a,
        delta_b: d.delta_b,
        delta_c: d.delta_c,
        delta_d: d.delta_d,
        lambda1,
        lambda2,
        a,
        b,
        lambda_plus,
        lambda_minus,
        r0,
        r1,
        z1,
        z2,
        ell_1_1,
        ell_1,
        mu_hat_1,
        central_eigenvalues,
        central_det,
        central_det_printed,
        symmetric_trace,
        symmetric_det,
        symmetric_eigenvalues,
        central_stability: classify_eigenvalues(&ce),
        symmetric_stability: classify_eigenvalues(&symmetric_eigenvalues),
        three_orbits,
        all_deltas_positive: three_orbits && d.delta_d > 0.0,
        torus_bifurcation: three_orbits && ell_1 != 0.0,
    })
}

/// Derivative along one coordinate by the five-point stencil, exact for quartics.
fn d1(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) / (12.0 * h)
}

/// Second derivative by the five-point stencil, exact for quintics.
fn d2(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (-f(x + 2.0 * h) + 16.0 * f(x + h) - 30.0 * f(x) + 16.0 * f(x - h) - f(x - 2.0 * h)) / (12.0 * h * h)
}

/// Bifurcation functions on the manifold `z = z_branch` of zeros of `g2`.
pub struct LsReduction<'a> {
    g2: &'a dyn PlanarMap,
    g3: &'a dyn PlanarMap,
    g4: &'a dyn PlanarMap,
    pub branch: Branch,
    pub z_branch: f64,
    /// `∂(g2)_z/∂z` on the branch.
    pub delta_r: f64,
    /// `4πμ1ν1/ω` as printed.
    pub delta_r_printed: f64,
    pub eps: f64,
    /// Printed zero of `F²`.
    pub a_eps_closed: f64,
    /// Newton zero of `F²` assembled from the averaged functions.
    pub a_eps_newton: f64,
    /// `|∂F²/∂r|` at `a_eps_newton`.
    pub dfdr_at_zero: f64,
    pub rho: f64,
    pub kappa: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LsSummary {
    pub branch: Branch,
    pub z_branch: f64,
    pub delta_r: f64,
    pub delta_r_printed: f64,
    pub eps: f64,
    pub f1_slope: f64,
    pub f1_slope_printed: f64,
    pub a_eps_closed: f64,
    pub a_eps_newton: f64,
    pub dfdr_at_zero: f64,
    pub rho: f64,
    pub kappa: f64,
}

impl LsReduction<'_> {
    fn h(&self) -> f64 {
        1e-3 * (1.0 + self.z_branch.abs())
    }

    fn at(&self, g: &dyn PlanarMap, r: f64, dz: f64, c: usize) -> f64 {
        g.eval([r, self.z_branch + dz])[c]
    }

    /// `Γ = ∂(g2)_r/∂z` on the branch.
    pub fn gamma_block(&self, r: f64) -> f64 {
        d1(|dz| self.at(self.g2, r, dz, 0), 0.0, self.h())
    }

    pub fn delta_block(&self, r: f64) -> f64 {
        d1(|dz| self.at(self.g2, r, dz, 1), 0.0, self.h())
    }

    pub fn gamma1(&self, r: f64) -> f64 {
        -self.at(self.g3, r, 0.0, 1) / self.delta_block(r)
    }

    pub fn f1(&self, r: f64) -> f64 {
        self.gamma_block(r) * self.gamma1(r) + self.at(self.g3, r, 0.0, 0)
    }

    pub fn gamma2(&self, r: f64) -> f64 {
        let h = self.h();
        let g1 = self.gamma1(r);
        let g2zz = d2(|dz| self.at(self.g2, r, dz, 1), 0.0, h);
        let g3z = d1(|dz| self.at(self.g3, r, dz, 1), 0.0, h);
        -(g2zz * g1 * g1 + 2.0 * g3z * g1 + 2.0 * self.at(self.g4, r, 0.0, 1)) / self.delta_block(r)
    }

    pub fn f2(&self, r: f64) -> f64 {
        let h = self.h();
        let g1 = self.gamma1(r);
        let g2zz = d2(|dz| self.at(self.g2, r, dz, 0), 0.0, h);
        let g3z = d1(|dz| self.at(self.g3, r, dz, 0), 0.0, h);
        0.5 * self.gamma_block(r) * self.gamma2(r) + 0.5 * g2zz * g1 * g1 + g3z * g1 + self.at(self.g4, r, 0.0, 0)
    }

    /// `F²(r, ε) = ε f1(r) + ε² f2(r)`.
    pub fn big_f(&self, r: f64, eps: f64) -> f64 {
        eps * self.f1(r) + eps * eps * self.f2(r)
    }

    pub fn dfdr(&self, r: f64, eps: f64) -> f64 {
        d1(|s| self.big_f(s, eps), r, 1e-3 * (1.0 + r.abs()))
    }

    /// `(ε, |∂F²/∂r(a_ε, ε)|/ε)` for each `ε`; a positive lower bound witnesses
    /// the nondegeneracy of the zero.
    pub fn derivative_witness(&self, eps_list: &[f64]) -> Result<Vec<(f64, f64)>> {
        eps_list
            .iter()
            .map(|&e| {
                let a = newton1(|r| self.big_f(r, e), 1.0)?;
                Ok((e, self.dfdr(a, e).abs() / e.abs()))
            })
            .collect()
    }

    pub fn summary(&self, p: &OscillatorParams) -> LsSummary {
        LsSummary {
            branch: self.branch,
            z_branch: self.z_branch,
            delta_r: self.delta_r,
            delta_r_printed: self.delta_r_printed,
            eps: self.eps,
            f1_slope: self.f1(1.0) - self.f1(0.0),
            f1_slope_printed: f1_slope_printed(p),
            a_eps_closed: self.a_eps_closed,
            a_eps_newton: self.a_eps_newton,
            dfdr_at_zero: self.dfdr_at_zero,
            rho: self.rho,
            kappa: self.kappa,
        }
    }
}

fn newton1(f: impl Fn(f64) -> f64, x0: f64) -> Result<f64> {
    let mut x = x0;
    let mut last = f64::INFINITY;
    for it in 0..60 {
        let fx = f(x);
        let h = 1e-4 * (1.0 + x.abs());
        let df = d1(&f, x, h);
        if df == 0.0 || !df.is_finite() {
            return Err(Error::NewtonDiverged { iterations: it, residual: fx.abs() });
        }
        let dx = fx / df;
        x -= dx;
        let scale = 1.0 + x.abs();
        if dx.abs() <= 1e-13 * scale {
            return Ok(x);
        }
        // steps stop shrinking at the noise floor of a numerically evaluated f
        if it >= 4 && dx.abs() > 0.5 * last && dx.abs() <= 1e-7 * scale {
            return Ok(x);
        }
        last = dx.abs();
    }
    let r = f(x).abs();
    Err(Error::NewtonDiverged { iterations: 60, residual: r })
}

/// `π(2k0μ1ν1² − α3ω²)/ω³`.
pub fn f1_slope_printed(p: &OscillatorParams) -> f64 {
    let (k0, a3, mu1, nu1, w) = (p.k.c(0), p.alpha.c(3), p.mu.c(1), p.nu.c(1), p.omega);
    PI * (2.0 * k0 * mu1 * nu1 * nu1 - a3 * w * w) / w.powi(3)
}

/// The printed `ρ`.
pub fn rho_h3(p: &OscillatorParams) -> f64 {
    let (h0, h1, k0, k1) = (p.h.c(0), p.h.c(1), p.k.c(0), p.k.c(1));
    let (a3, a4, b1) = (p.alpha.c(3), p.alpha.c(4), p.beta.c(1));
    let (mu1, mu2, nu1, nu2, w) = (p.mu.c(1), p.mu.c(2), p.nu.c(1), p.nu.c(2), p.omega);
    let w2 = w * w;
    w2 * w2 * (2.0 * a4 * h0 - a3 * h1) + 6.0 * h0 * k0 * mu1 * nu1 * nu1 * (b1 * h0 - k0 * nu1)
        - w2 * (a3 * b1 * h0 * h0 + h0 * nu1 * (k0 * (8.0 * mu1 * nu2 - a3 + 4.0 * mu2 * nu1) + 4.0 * k1 * mu1 * nu1)
            - 6.0 * h1 * k0 * mu1 * nu1 * nu1)
}

/// The printed `κ`.
pub fn kappa_h3(p: &OscillatorParams) -> f64 {
    let (h0, h1, k0, k1) = (p.h.c(0), p.h.c(1), p.k.c(0), p.k.c(1));
    let (a3, a4, b1) = (p.alpha.c(3), p.alpha.c(4), p.beta.c(1));
    let (mu1, mu2, nu1, nu2, w) = (p.mu.c(1), p.mu.c(2), p.nu.c(1), p.nu.c(2), p.omega);
    let w2 = w * w;
    PI / (2.0 * h0 * w.powi(5))
        * (w2
            * (a3 * b1 * h0 * h0 + h0 * nu1 * (k0 * (8.0 * mu1 * nu2 - a3 + 4.0 * mu2 * nu1) + 4.0 * k1 * mu1 * nu1)
                - 6.0 * h1 * k0 * mu1 * nu1 * nu1)
            + w2 * w2 * (a3 * h1 - 2.0 * a4 * h0)
            + 6.0 * h0 * k0 * mu1 * nu1 * nu1 * (k0 * nu1 - b1 * h0))
}

/// The printed `a_ε`.
pub fn a_eps_printed(p: &OscillatorParams, eps: f64) -> f64 {
    let (h0, h1, k0, k1) = (p.h.c(0), p.h.c(1), p.k.c(0), p.k.c(1));
    let (a3, mu1, nu1, w) = (p.alpha.c(3), p.mu.c(1), p.nu.c(1), p.omega);
    let w2 = w * w;
    let s = 2.0 * k0 * mu1 * nu1 * nu1 - a3 * w2;
    -2.0 * w * eps * (h1 * k0 - h0 * k1) * s * mu1.sqrt()
        / (h0 * (2.0 * a3 * w2 * w2 - 4.0 * k0 * mu1 * nu1 * nu1 * w2) + eps * rho_h3(p))
}

/// Lyapunov–Schmidt reduction on `Z± = {(r, ±√μ1 ω/h0)}` for family H3.
pub fn ls_bifurcation_functions<'a>(
    g2: &'a dyn PlanarMap,
    g3: &'a dyn PlanarMap,
    g4: &'a dyn PlanarMap,
    p: &OscillatorParams,
    branch: Branch,
    eps: f64,
) -> Result<LsReduction<'a>> {
    let rep = check_family(p, ZeroHopfFamily::H3, DEFAULT_RESIDUAL_TOL)?;
    if !rep.member {
        return Err(Error::FamilyMismatch { family: "H3".into(), detail: rep.failures().join("; ") });
    }
    let (h0, mu1, nu1, w) = (p.h.c(0), p.mu.c(1), p.nu.c(1), p.omega);
    if !(mu1 > 0.0) {
        return Err(Error::InvalidParams(format!("mu1 must be positive, got {mu1}")));
    }
    let z_branch = branch.sign() * mu1.sqrt() * w / h0;
    let mut ls = LsReduction {
        g2,
        g3,
        g4,
        branch,
        z_branch,
        delta_r: 0.0,
        delta_r_printed: 4.0 * PI * mu1 * nu1 / w,
        eps,
        a_eps_closed: a_eps_printed(p, eps),
        a_eps_newton: f64::NAN,
        dfdr_at_zero: f64::NAN,
        rho: rho_h3(p),
        kappa: kappa_h3(p),
    };
    let samples = [0.1, 0.5, 1.0, 1.5, 2.0];
    for &r in &samples {
        let d = ls.delta_block(r);
        if !(d.abs() >= 1e-12) {
            return Err(Error::DegenerateDelta(d));
        }
    }
    ls.delta_r = ls.delta_block(1.0);
    let mut f1max: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for &r in &samples {
        f1max = f1max.max(ls.f1(r).abs());
        let a = g3.eval([r, z_branch]);
        let b = g3.eval([r, 0.0]);
        scale = scale.max(vnorm(a)).max(vnorm(b));
    }
    if f1max <= 1e-9 * (1.0 + scale) {
        return Err(Error::FlatF1);
    }
    let seed = if ls.a_eps_closed.is_finite() { ls.a_eps_closed } else { 1.0 };
    let a = newton1(|r| ls.big_f(r, eps), seed + 0.5)?;
    ls.a_eps_newton = a;
    ls.dfdr_at_zero = ls.dfdr(a, eps).abs();
    Ok(ls)
}

/// Averaged function of order one, as a function of `μ1`.
pub trait G1Family: Sync {
    fn eval(&self, mu1: f64, x: Vec2) -> Vec2;
}

/// The engine-computed `g1`, rebuilt for each `μ1`.
pub struct EngineG1 {
    params: OscillatorParams,
    pipeline: ReductionPipeline,
}

impl EngineG1 {
    pub fn new(p: &OscillatorParams, family: ZeroHopfFamily) -> Result<Self> {
        Ok(Self { params: p.clone(), pipeline: ReductionPipeline::new(p, family)? })
    }

    fn system(&self, mu1: f64) -> StandardFormSystem {
        let p = self.params.with_coeff(Coefficient::Mu, 1, mu1).expect("degree 1 is within cap");
        StandardFormSystem::new(self.pipeline.clone(), p).expect("pipeline already validated")
    }
}

impl G1Family for EngineG1 {
    fn eval(&self, mu1: f64, x: Vec2) -> Vec2 {
        let sys = self.system(mu1);
        let g = averaged(&sys, 1).expect("order 1 is available");
        g.eval(x)
    }
}

/// The printed first-order form (μ1 reading), in the `y1(2π)` convention.
pub struct ClosedFormG1 {
    params: OscillatorParams,
}

impl ClosedFormG1 {
    pub fn new(p: &OscillatorParams) -> Self {
        Self { params: p.clone() }
    }
}

impl G1Family for ClosedFormG1 {
    fn eval(&self, mu1: f64, x: Vec2) -> Vec2 {
        let p = self.params.with_coeff(Coefficient::Mu, 1, mu1).expect("degree 1 is within cap");
        let v = crate::averaging::g1_thm1_mean(x, &p);
        [2.0 * PI * v[0], 2.0 * PI * v[1]]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EigenPathPoint {
    pub mu1: f64,
    pub r: f64,
    pub z: f64,
    pub alpha: f64,
    pub beta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NsReport {
    pub branch: Branch,
    pub mu_start: f64,
    pub mu0: f64,
    pub zero_at_mu0: Vec2,
    pub alpha_at_mu0: f64,
    /// Imaginary part at the crossing from the Jacobian.
    pub omega_frame: f64,
    /// `√5 δ_d/ω³`.
    pub omega_0: f64,
    pub alpha_prime: f64,
    /// `−ν0/(5ω)`.
    pub alpha_prime_printed: f64,
    /// Lyapunov coefficient with the printed `ω0` in the printed frame.
    pub ell_1: f64,
    /// Lyapunov coefficient with the frame's own rotation rate.
    pub ell_1_oriented: f64,
    /// The oriented value vanishes: the first-order averaged system is a centre.
    pub degenerate: bool,
    pub ell_1_proposition: f64,
    pub mu_hat_1: f64,
    pub supercritical: bool,
    pub path: Vec<EigenPathPoint>,
}

impl NsReport {
    /// Whether a torus is predicted at `μ1`, per `ℓ1 (μ1 − μ̂) < 0`.
    pub fn torus_predicted(&self, mu1: f64) -> bool {
        self.ell_1 * (mu1 - self.mu0) < 0.0
    }
}

struct MeanG1<'a, G: ?Sized> {
    g: &'a G,
    mu1: f64,
}

impl<G: G1Family + ?Sized> PlanarMap for MeanG1<'_, G> {
    fn eval(&self, x: Vec2) -> Vec2 {
        let v = self.g.eval(self.mu1, x);
        [v[0] / (2.0 * PI), v[1] / (2.0 * PI)]
    }
}

fn alpha_beta(j: &Matrix2<f64>) -> (f64, f64) {
    let tr = j.trace() / 2.0;
    (tr, (j.determinant() - tr * tr).max(0.0).sqrt())
}

/// Neimark–Sacker analysis of the symmetric zero on the given branch.
pub fn ns_analyze(g1: &(impl G1Family + ?Sized), p: &OscillatorParams, branch: Branch) -> Result<NsReport> {
    let rep = check_family(p, ZeroHopfFamily::Thm1, DEFAULT_RESIDUAL_TOL)?;
    if !rep.member {
        return Err(Error::FamilyMismatch { family: "THM1".into(), detail: rep.failures().join("; ") });
    }
    let pred = predict_theorem1(p)?;
    let (r1, z1) = match (pred.r1, pred.z1) {
        (Some(r), Some(z)) if r > 0.0 && z != 0.0 => (r, branch.sign() * z.abs()),
        _ => return Err(Error::InvalidParams("symmetric zeros do not exist for these parameters".into())),
    };
    let zero_at = |mu1: f64, seed: Vec2| -> Result<(Vec2, Matrix2<f64>)> {
        let g = MeanG1 { g: g1, mu1 };
        let (x, res) = newton2(&g, seed, NEWTON_TOL, 60)
            .ok_or(Error::NewtonDiverged { iterations: 60, residual: vnorm(g.eval(seed)) })?;
        let _ = res;
        Ok((x, fd_jacobian(&g, x, 1e-6)))
    };

    let mu_start = p.mu.c(1);
    let (mut x, j) = zero_at(mu_start, [r1, z1])?;
    let (mut a_prev, b0) = alpha_beta(&j);
    let mut path = vec![EigenPathPoint { mu1: mu_start, r: x[0], z: x[1], alpha: a_prev, beta: b0 }];

    // direction of decreasing |α| from a one-sided probe
    let probe = 1e-3;
    let (_, jp) = zero_at(mu_start + probe, x)?;
    let slope = (alpha_beta(&jp).0 - a_prev) / probe;
    let dir = if a_prev * slope > 0.0 { -1.0 } else { 1.0 };

    let mut step = 1e-3;
    let mut mu = mu_start;
    let mut bracket = None;
    for _ in 0..200_000 {
        let mu_next = mu + dir * step;
        let (xn, jn) = match zero_at(mu_next, x) {
            Ok(v) => v,
            Err(_) if step > 1e-8 => {
                step *= 0.5;
                continue;
            }
            Err(e) => return Err(e),
        };
        if !(xn[0] > 0.0) {
            break;
        }
        let (an, bn) = alpha_beta(&jn);
        path.push(EigenPathPoint { mu1: mu_next, r: xn[0], z: xn[1], alpha: an, beta: bn });
        // only a crossing of a complex pair is a Neimark–Sacker point
        let complex = jn.determinant() > (0.5 * jn.trace()).powi(2);
        if complex && (an == 0.0 || an.signum() != a_prev.signum()) {
            bracket = Some(((mu, x, a_prev), (mu_next, xn, an)));
            break;
        }
        mu = mu_next;
        x = xn;
        a_prev = an;
        if (mu - mu_start).abs() > 100.0 {
            break;
        }
    }
    let ((mut ma, mut xa, mut aa), (mut mb, _, _)) = bracket.ok_or(Error::NoCrossing)?;
    let alpha_of = |m: f64, seed: Vec2| -> Result<(f64, Vec2, Matrix2<f64>)> {
        let (x, j) = zero_at(m, seed)?;
        Ok((alpha_beta(&j).0, x, j))
    };
    for _ in 0..20 {
        let mm = 0.5 * (ma + mb);
        let (am, xm, _) = alpha_of(mm, xa)?;
        if am.signum() == aa.signum() {
            ma = mm;
            xa = xm;
            aa = am;
        } else {
            mb = mm;
        }
    }
    // secant polish on α(μ)
    let mut m0 = 0.5 * (ma + mb);
    let mut m1 = mb;
    let (mut f0, mut x0, _) = alpha_of(m0, xa)?;
    let (mut f1v, _, _) = alpha_of(m1, xa)?;
    for _ in 0..30 {
        if f1v == f0 {
            break;
        }
        let m2 = m1 - f1v * (m1 - m0) / (f1v - f0);
        m0 = m1;
        f0 = f1v;
        m1 = m2;
        let (f2, x2, _) = alpha_of(m1, x0)?;
        f1v = f2;
        x0 = x2;
        if f1v.abs() < 1e-13 || (m1 - m0).abs() < 1e-14 {
            break;
        }
    }
    let mu0 = m1;
    let (alpha0, xz, j0) = alpha_of(mu0, x0)?;

    let dmu = 1e-3;
    let (ap, _, _) = alpha_of(mu0 + dmu, xz)?;
    let (am, _, _) = alpha_of(mu0 - dmu, xz)?;
    let alpha_prime = (ap - am) / (2.0 * dmu);
    if alpha_prime.abs() < 1e-8 {
        return Err(Error::TransversalityFail(alpha_prime.abs()));
    }

    let d = thm1_deltas(p);
    let w = p.omega;
    let omega_0 = 5f64.sqrt() * d.delta_d / w.powi(3);
    let det = j0.determinant();
    let mut wf = det.max(0.0).sqrt();
    let bcoef = -j0[(1, 1)] / j0[(1, 0)];
    let mut c = wf / j0[(1, 0)];
    if c / bcoef < 0.0 {
        wf = -wf;
        c = -c;
    }
    let gm = MeanG1 { g: g1, mu1: mu0 };
    let u0 = [(xz[0] - bcoef * xz[1]) / c, xz[1]];
    let gt = |u: Vec2| -> Vec2 {
        let v = gm.eval([c * u[0] + bcoef * u[1], u[1]]);
        [(v[0] - bcoef * v[1]) / c, v[1]]
    };
    let ell_recipe = lyapunov_formula(&gt, u0, omega_0);
    let ell_oriented = lyapunov_formula(&gt, u0, wf);

    Ok(NsReport {
        branch,
        mu_start,
        mu0,
        zero_at_mu0: xz,
        alpha_at_mu0: alpha0,
        omega_frame: wf,
        omega_0,
        alpha_prime,
        alpha_prime_printed: -p.nu.c(0) / (5.0 * w),
        ell_1: 2.0 * PI * ell_recipe,
        ell_1_oriented: 2.0 * PI * ell_oriented,
        degenerate: (2.0 * PI * ell_oriented).abs() <= 1e-6 * (2.0 * PI * ell_recipe).abs().max(1.0),
        ell_1_proposition: pred.ell_1,
        mu_hat_1: pred.mu_hat_1,
        supercritical: ell_recipe < 0.0,
        path,
    })
}

/// `S3/8 + S2/(8ω0)` from second and third partial derivatives of a planar
/// map whose Jacobian at `u0` is a rotation block.
pub fn lyapunov_formula(g: &impl Fn(Vec2) -> Vec2, u0: Vec2, omega0: f64) -> f64 {
    let scale = 1.0 + u0[0].hypot(u0[1]);
    let h2 = 1e-4 * scale;
    let h3 = 5e-4 * scale;
    let at = |du: f64, dv: f64| g([u0[0] + du, u0[1] + dv]);
    let second = |c: usize, h: f64| {
        let f0 = at(0.0, 0.0)[c];
        let uu = (at(h, 0.0)[c] - 2.0 * f0 + at(-h, 0.0)[c]) / (h * h);
        let vv = (at(0.0, h)[c] - 2.0 * f0 + at(0.0, -h)[c]) / (h * h);
        let uv = (at(h, h)[c] - at(h, -h)[c] - at(-h, h)[c] + at(-h, -h)[c]) / (4.0 * h * h);
        (uu, uv, vv)
    };
    let third_pure_u = |c: usize, h: f64| {
        (at(2.0 * h, 0.0)[c] - 2.0 * at(h, 0.0)[c] + 2.0 * at(-h, 0.0)[c] - at(-2.0 * h, 0.0)[c]) / (2.0 * h * h * h)
    };
    let third_pure_v = |c: usize, h: f64| {
        (at(0.0, 2.0 * h)[c] - 2.0 * at(0.0, h)[c] + 2.0 * at(0.0, -h)[c] - at(0.0, -2.0 * h)[c]) / (2.0 * h * h * h)
    };
    // ∂u ∂v²: centred difference in u of the second difference in v
    let third_uvv = |c: usize, h: f64| {
        let vv = |du: f64| (at(du, h)[c] - 2.0 * at(du, 0.0)[c] + at(du, -h)[c]) / (h * h);
        (vv(h) - vv(-h)) / (2.0 * h)
    };
    let third_uuv = |c: usize, h: f64| {
        let uu = |dv: f64| (at(h, dv)[c] - 2.0 * at(0.0, dv)[c] + at(-h, dv)[c]) / (h * h);
        (uu(h) - uu(-h)) / (2.0 * h)
    };
    let (g1uu, g1uv, g1vv) = second(0, h2);
    let (g2uu, g2uv, g2vv) = second(1, h2);
    let s3 = third_pure_u(0, h3) + third_uvv(0, h3) + third_uuv(1, h3) + third_pure_v(1, h3);
    let s2 = g1uv * (g1uu + g1vv) - g2uv * (g2uu + g2vv) - g1uu * g2uu + g1vv * g2vv;
    s3 / 8.0 + s2 / (8.0 * omega0)
}

/// Fixed-point prediction for family H4 from the displacement map.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct H4Displacement {
    /// `2√((μ1ν0 − α1)/(3ν0))`.
    pub base_radius: f64,
    pub r_tilde: f64,
    pub z_tilde: f64,
    /// `−g2_r(ρ0, 0) / (2π g1_r'(ρ0))` with both functions in the `y_i(2π)/i!` convention.
    pub r_tilde_consistent: f64,
    pub det: f64,
}

impl H4Displacement {
    /// `(ρ0 + ε r̃, 0)` with the consistently normalized `r̃`.
    pub fn expansion(&self, eps: f64) -> Vec2 {
        [self.base_radius + eps * self.r_tilde_consistent, 0.0]
    }

    /// Same expansion with the printed `r̃`.
    pub fn expansion_printed(&self, eps: f64) -> Vec2 {
        [self.base_radius + eps * self.r_tilde, 0.0]
    }
}

/// Printed `H1 = (H1¹, H1²)`.
pub fn h4_coefficient_function(p: &OscillatorParams, x: Vec2) -> Vec2 {
    let [r, z] = x;
    let h1 = p.h.c(1);
    let (a1, a2, b0) = (p.alpha.c(1), p.alpha.c(2), p.beta.c(0));
    let (mu1, mu2, nu0, nu1, w) = (p.mu.c(1), p.mu.c(2), p.nu.c(0), p.nu.c(1), p.omega);
    let s = (3.0 * mu1 * nu0 - 3.0 * a1).sqrt();
    let n32 = nu0.powf(1.5);
    let first = 1.0 / (3.0 * n32 * w.powi(4))
        * (w.powi(3) * (2.0 * PI * s * (a1 * nu1 - a2 * nu0 + mu2 * nu0 * nu0) + 3.0 * n32 * r * (a1 - mu1 * nu0))
            - 2.0 * PI * h1 * nu0 * (a1 * b0 * w * s + 3.0 * nu0.powf(2.5) * z * (a1 - mu1 * nu0)));
    let second = 2.0 * PI * b0 * h1 * z * (2.0 * a1 - mu1 * nu0) / w.powi(3);
    [first, second]
}

pub fn displacement_h4(p: &OscillatorParams) -> Result<H4Displacement> {
    let rep = check_family(p, ZeroHopfFamily::H4, DEFAULT_RESIDUAL_TOL)?;
    if !rep.member {
        return Err(Error::FamilyMismatch { family: "H4".into(), detail: rep.failures().join("; ") });
    }
    let h1 = p.h.c(1);
    let (a1, b0) = (p.alpha.c(1), p.beta.c(0));
    let (mu1, mu2, nu0, nu1, w) = (p.mu.c(1), p.mu.c(2), p.nu.c(0), p.nu.c(1), p.omega);
    let delta4 = nu0 * (mu1 * nu0 - a1);
    if !(delta4 > 0.0) {
        return Err(Error::InvalidParams(format!("delta_4 = {delta4} must be positive")));
    }
    let det = 2.0 * PI * b0 * h1 * (2.0 * a1 * a1 - 3.0 * a1 * mu1 * nu0 + mu1 * mu1 * nu0 * nu0) / w.powi(4);
    if det.abs() < 1e-12 {
        return Err(Error::DegenerateDet(det));
    }
    let base_radius = 2.0 * ((mu1 * nu0 - a1) / (3.0 * nu0)).sqrt();
    let w2 = w * w;
    let r_tilde = 2.0 * PI * (w2 * (a1 * nu1 - nu0 * (a1 - mu2 * nu0)) - a1 * b0 * h1 * nu0)
        / (w2 * (3.0 * nu0.powi(3) * (mu1 * nu0 - a1)).sqrt());
    let g2 = crate::averaging::g2_h4([base_radius, 0.0], p);
    let g1_slope = (a1 - mu1 * nu0) / w;
    Ok(H4Displacement { base_radius, r_tilde, z_tilde: 0.0, r_tilde_consistent: -g2[0] / (2.0 * PI * g1_slope), det })
}

/// A predicted periodic orbit in averaged coordinates.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrbitPrediction {
    pub label: String,
    /// `(r, z)` in the scaled cylindrical coordinates.
    pub x: Vec2,
    pub stability: Option<Stability>,
}

/// The periodic-orbit predictions of each refined hypothesis at a given `ε`.
pub fn predict_orbits(p: &OscillatorParams, f: ZeroHopfFamily, eps: f64) -> Result<Vec<OrbitPrediction>> {
    let mk = |label: &str, x: Vec2, s: Option<Stability>| OrbitPrediction { label: label.into(), x, stability: s };
    match f {
        ZeroHopfFamily::Thm1 => {
            let rep = predict_theorem1(p)?;
            let (r0, r1, z1) = match (rep.r0, rep.r1, rep.z1) {
                (Some(a), Some(b), Some(c)) => (a, b, c),
                _ => return Err(Error::InvalidParams("three-orbit conditions fail".into())),
            };
            Ok(vec![
                mk("central", [r0, 0.0], Some(rep.central_stability)),
                mk("plus", [r1, z1], Some(rep.symmetric_stability)),
                mk("minus", [r1, -z1], Some(rep.symmetric_stability)),
            ])
        }
        ZeroHopfFamily::H1 | ZeroHopfFamily::H2 => {
            let sys = crate::standard_form::standardize(p, f)?;
            let g = averaged(&sys, 1)?;
            let (h, b) = if f == ZeroHopfFamily::H1 { (p.h.c(1), p.beta.c(0)) } else { (p.h.c(0), p.beta.c(1)) };
            let (a1, mu0, mu1, nu0, nu1, w) = (p.alpha.c(1), p.mu.c(0), p.mu.c(1), p.nu.c(0), p.nu.c(1), p.omega);
            let num = w * w * (mu0 * nu1 - a1 + mu1 * nu0) - b * h * mu0 * nu0;
            let rbar = 2.0 / w * (num / (3.0 * nu0)).sqrt();
            if !rbar.is_finite() {
                return Err(Error::InvalidParams("no positive zero of g1".into()));
            }
            let (x, res) = newton2(&g, [rbar, 0.0], 1e-11, 60)
                .ok_or(Error::NewtonDiverged { iterations: 60, residual: f64::NAN })?;
            let z = AveragedZero::new(x, 1, res, fd_jacobian(&g, x, 1e-6));
            Ok(vec![mk("orbit", x, Some(z.stability))])
        }
        ZeroHopfFamily::H3 => {
            let g2 = |x: Vec2| crate::averaging::g2_h3(x, p);
            let g3 = |x: Vec2| crate::averaging::g3_h3(x, p);
            let g4 = |x: Vec2| crate::averaging::g4_h3(x, p);
            let ls = ls_bifurcation_functions(&g2, &g3, &g4, p, Branch::Plus, eps)?;
            Ok(vec![mk("orbit", [ls.a_eps_newton, ls.z_branch], None)])
        }
        ZeroHopfFamily::H4 => {
            let d = displacement_h4(p)?;
            Ok(vec![mk("orbit", d.expansion(eps), None)])
        }
        other => Err(Error::InvalidParams(format!("no orbit prediction for family {other}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classification_rules() {
        let c = |a: f64, b: f64| classify_jacobian(&Matrix2::new(a, 0.0, 0.0, b));
        assert_eq!(c(-1.0, -2.0), Stability::Stable);
        assert_eq!(c(1.0, -1.0), Stability::Saddle);
        assert_eq!(c(1.0, 2.0), Stability::Unstable);
        assert_eq!(c(0.0, -2.0), Stability::Nonhyperbolic);
        let focus = Matrix2::new(0.1, -1.0, 1.0, 0.1);
        assert_eq!(classify_jacobian(&focus), Stability::Unstable);
    }

    #[test]
    fn no_zeros_off_axis() {
        let g = |x: Vec2| [2.0 * x[0], 2.0 * x[1]];
        let s = find_zeros(&g, 1, SearchBox { r: (0.1, 2.0), z: (-1.0, 1.0) }, (5, 5)).unwrap();
        assert!(s.zeros.is_empty());
        assert_eq!(s.attempted, 25);
    }

    #[test]
    fn stencils_are_exact_on_polynomials() {
        let f = |x: f64| 3.0 * x.powi(4) - x.powi(3) + 2.0;
        assert!((d1(f, 0.7, 1e-2) - (12.0 * 0.343 - 3.0 * 0.49)).abs() < 1e-9);
        assert!((d2(f, 0.7, 1e-2) - (36.0 * 0.49 - 6.0 * 0.7)).abs() < 1e-7);
    }
}
