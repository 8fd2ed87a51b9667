//! One-parameter sweeps over `ε` or a single polynomial coefficient.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use zhopf_core::bifurcation::{predict_orbits, predict_theorem1, Stability};
use zhopf_core::coefficients::{eval_params, thm1_deltas, Coefficient, OscillatorParams, ZeroHopfFamily};
use zhopf_core::standard_form::ReductionPipeline;
use zhopf_core::verify::{detect_torus, refine_periodic_orbit, PeriodicOrbit, ReturnMap, TorusVerdict};
use zhopf_core::{Error, Result};

use crate::example::RunOptions;

/// The swept quantity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepSymbol {
    Eps,
    /// Coefficient of `ε^degree` in one parameter polynomial.
    Coeff(Coefficient, usize),
}

impl FromStr for SweepSymbol {
    type Err = Error;
    /// `eps`, or a coefficient name followed by its degree, e.g. `mu1`.
    fn from_str(s: &str) -> Result<Self> {
        if s == "eps" {
            return Ok(SweepSymbol::Eps);
        }
        let split = s.find(|c: char| c.is_ascii_digit()).ok_or_else(|| bad_symbol(s))?;
        let c: Coefficient = s[..split].parse()?;
        let d: usize = s[split..].parse().map_err(|_| bad_symbol(s))?;
        Ok(SweepSymbol::Coeff(c, d))
    }
}

fn bad_symbol(s: &str) -> Error {
    Error::InvalidSweep(format!("symbol `{s}` is neither `eps` nor a coefficient like `mu1`"))
}

impl fmt::Display for SweepSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SweepSymbol::Eps => write!(f, "eps"),
            SweepSymbol::Coeff(c, d) => write!(f, "{}{d}", c.name()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Analysis {
    Deltas,
    Eigen,
    Ell1,
    Orbit,
    /// Modulus of the symmetric orbit's multipliers and the side of the unit circle.
    Torus,
    /// Full `detect_torus` run around the plus orbit.
    TorusDetect,
}

impl FromStr for Analysis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "deltas" => Analysis::Deltas,
            "eigen" => Analysis::Eigen,
            "ell1" => Analysis::Ell1,
            "orbit" => Analysis::Orbit,
            "torus" => Analysis::Torus,
            "torus-detect" => Analysis::TorusDetect,
            _ => return Err(Error::InvalidSweep(format!("unknown analysis `{s}`"))),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepSpec {
    pub symbol: SweepSymbol,
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub analyses: Vec<Analysis>,
    pub family: ZeroHopfFamily,
    /// `ε` used when the swept symbol is a coefficient.
    pub eps: f64,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.count < 2 {
            return Err(Error::InvalidSweep(format!("count must be at least 2, got {}", self.count)));
        }
        if !(self.lo < self.hi) {
            return Err(Error::InvalidSweep(format!("need lo < hi, got [{}, {}]", self.lo, self.hi)));
        }
        if self.analyses.is_empty() {
            return Err(Error::InvalidSweep("no analysis selected".into()));
        }
        if self.symbol != SweepSymbol::Eps && !(self.eps > 0.0) {
            return Err(Error::InvalidSweep("eps must be positive".into()));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.count - 1;
        (0..=n).map(|i| self.lo + (self.hi - self.lo) * i as f64 / n as f64).collect()
    }

    fn orbit_labels(&self) -> Vec<&'static str> {
        if self.family == ZeroHopfFamily::Thm1 {
            vec!["central", "plus", "minus"]
        } else {
            vec!["orbit"]
        }
    }

    pub fn columns(&self) -> Vec<String> {
        let mut out = vec!["index".to_string(), self.symbol.to_string()];
        for a in &self.analyses {
            let cols: Vec<String> = match a {
                Analysis::Deltas => ["delta_a", "delta_b", "delta_c", "delta_d"].map(String::from).to_vec(),
                Analysis::Eigen => [
                    "central_eig_1",
                    "central_eig_2",
                    "symmetric_trace",
                    "symmetric_det",
                    "symmetric_eig_re",
                    "symmetric_eig_im",
                ]
                .map(String::from)
                .to_vec(),
                Analysis::Ell1 => vec!["ell_1".into(), "mu_hat_1".into()],
                Analysis::Orbit => self
                    .orbit_labels()
                    .iter()
                    .flat_map(|l| ["residual", "period", "max_multiplier", "stability"].map(|c| format!("{l}_{c}")))
                    .collect(),
                Analysis::Torus => vec!["symmetric_modulus".into(), "ns_side".into()],
                Analysis::TorusDetect => vec!["torus_verdict".into(), "torus_max_deviation".into()],
            };
            out.extend(cols);
        }
        out.push("error".into());
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub index: usize,
    pub value: f64,
    pub values: Vec<f64>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepTable {
    pub columns: Vec<String>,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?.checked_sub(2)?;
        Some(self.rows.iter().map(|r| r.values[j]).collect())
    }

    pub fn write_to(&self, w: impl Write) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.columns)?;
        for r in &self.rows {
            let mut rec = vec![r.index.to_string(), r.value.to_string()];
            rec.extend(r.values.iter().map(|v| v.to_string()));
            rec.push(r.error.clone().unwrap_or_default());
            out.write_record(rec)?;
        }
        out.flush()?;
        Ok(())
    }
}

fn stability_code(s: Stability) -> f64 {
    match s {
        Stability::Stable => -1.0,
        Stability::Saddle => 0.0,
        Stability::Unstable => 1.0,
        Stability::Nonhyperbolic => 2.0,
    }
}

fn max_modulus(o: &PeriodicOrbit) -> f64 {
    o.multipliers.iter().map(|m| m.norm()).fold(0.0, f64::max)
}

/// Refines every averaged prediction at this `ε`, in prediction order.
pub fn refine_all(
    p: &OscillatorParams,
    family: ZeroHopfFamily,
    eps: f64,
    opts: &RunOptions,
) -> Result<Vec<Result<PeriodicOrbit>>> {
    let pipe = ReductionPipeline::new(p, family)?;
    let map = ReturnMap::with_pipeline(eval_params(p, eps), &pipe, opts.integrator);
    let s = pipe.scaling.factor(eps);
    Ok(predict_orbits(p, family, eps)?
        .iter()
        .map(|o| refine_periodic_orbit(&map, [s * o.x[0], s * o.x[1]], &opts.shooting))
        .collect())
}

/// Plus-branch symmetric orbit of a Theorem-1 parameter set.
pub fn symmetric_orbit(p: &OscillatorParams, eps: f64, opts: &RunOptions) -> Result<PeriodicOrbit> {
    let pipe = ReductionPipeline::new(p, ZeroHopfFamily::Thm1)?;
    let map = ReturnMap::with_pipeline(eval_params(p, eps), &pipe, opts.integrator);
    let s = pipe.scaling.factor(eps);
    let pred = predict_orbits(p, ZeroHopfFamily::Thm1, eps)?;
    refine_periodic_orbit(&map, [s * pred[1].x[0], s * pred[1].x[1]], &opts.shooting)
}

/// `|m| − 1` for the complex multiplier pair of the symmetric orbit.
pub fn ns_side(p: &OscillatorParams, eps: f64, opts: &RunOptions) -> Result<f64> {
    let o = symmetric_orbit(p, eps, opts)?;
    if o.multipliers[0].im == 0.0 {
        return Err(Error::InvalidParams("symmetric orbit multipliers are real".into()));
    }
    Ok(o.multipliers[0].norm() - 1.0)
}

fn row(spec: &SweepSpec, base: &OscillatorParams, opts: &RunOptions, index: usize, value: f64) -> SweepRow {
    let mut values = Vec::new();
    let mut errors: Vec<String> = Vec::new();
    let note = |errors: &mut Vec<String>, stage: &str, e: Error| errors.push(format!("{stage}: {e}"));
    let (p, eps) = match spec.symbol {
        SweepSymbol::Eps => (Ok(base.clone()), value),
        SweepSymbol::Coeff(c, d) => (base.with_coeff(c, d, value), spec.eps),
    };
    let p = match p {
        Ok(p) => p,
        Err(e) => {
            let n = spec.columns().len() - 3;
            return SweepRow { index, value, values: vec![f64::NAN; n], error: Some(e.to_string()) };
        }
    };
    let thm1 = spec.family == ZeroHopfFamily::Thm1;
    let report = thm1.then(|| predict_theorem1(&p));
    for a in &spec.analyses {
        match a {
            Analysis::Deltas => {
                let d = thm1_deltas(&p);
                values.extend([d.delta_a, d.delta_b, d.delta_c, d.delta_d]);
            }
            Analysis::Eigen | Analysis::Ell1 => {
                let n = if *a == Analysis::Eigen { 6 } else { 2 };
                match &report {
                    Some(Ok(r)) if *a == Analysis::Eigen => values.extend([
                        r.central_eigenvalues[0],
                        r.central_eigenvalues[1],
                        r.symmetric_trace,
                        r.symmetric_det,
                        r.symmetric_eigenvalues[0].re,
                        r.symmetric_eigenvalues[0].im.abs(),
                    ]),
                    Some(Ok(r)) => values.extend([r.ell_1, r.mu_hat_1]),
                    Some(Err(e)) => {
                        note(&mut errors, "predict", e.clone());
                        values.extend(vec![f64::NAN; n]);
                    }
                    None => {
                        note(&mut errors, "predict", Error::InvalidParams(format!("{a:?} needs family THM1")));
                        values.extend(vec![f64::NAN; n]);
                    }
                }
            }
            Analysis::Orbit => {
                let labels = spec.orbit_labels();
                match refine_all(&p, spec.family, eps, opts) {
                    Ok(all) => {
                        for (l, o) in labels.iter().zip(
                            all.into_iter()
                                .chain(std::iter::repeat_with(|| Err(Error::InvalidParams("no prediction".into())))),
                        ) {
                            match o {
                                Ok(o) => {
                                    values.extend([o.residual, o.period, max_modulus(&o), stability_code(o.stability)])
                                }
                                Err(e) => {
                                    note(&mut errors, &format!("refine {l}"), e);
                                    values.extend([f64::NAN; 4]);
                                }
                            }
                        }
                    }
                    Err(e) => {
                        note(&mut errors, "predict_orbits", e);
                        values.extend(vec![f64::NAN; 4 * labels.len()]);
                    }
                }
            }
            Analysis::Torus => match ns_side(&p, eps, opts) {
                Ok(d) => values.extend([1.0 + d, d.signum()]),
                Err(e) => {
                    note(&mut errors, "torus", e);
                    values.extend([f64::NAN; 2]);
                }
            },
            Analysis::TorusDetect => {
                let ev = symmetric_orbit(&p, eps, opts).and_then(|o| {
                    let pipe = ReductionPipeline::new(&p, ZeroHopfFamily::Thm1)?;
                    let map = ReturnMap::with_pipeline(eval_params(&p, eps), &pipe, opts.integrator);
                    let seed = [o.q[0] * 1.01, o.q[1] * 1.01];
                    detect_torus(&map, o.q, seed, opts.n_transient, opts.n_sample, &opts.torus)
                });
                match ev {
                    Ok(e) => {
                        values.extend([if e.verdict == TorusVerdict::Torus { 1.0 } else { -1.0 }, e.max_deviation])
                    }
                    Err(e) => {
                        note(&mut errors, "detect_torus", e);
                        values.extend([f64::NAN; 2]);
                    }
                }
            }
        }
    }
    let error = (!errors.is_empty()).then(|| errors.join("; "));
    SweepRow { index, value, values, error }
}

/// Rows run in parallel and come back in grid order.
pub fn sweep(spec: &SweepSpec, base: &OscillatorParams, opts: &RunOptions) -> Result<SweepTable> {
    spec.validate()?;
    let rows = spec.values().into_par_iter().enumerate().map(|(i, v)| row(spec, base, opts, i, v)).collect();
    Ok(SweepTable { columns: spec.columns(), rows })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TorusFlip {
    pub eps: f64,
    pub grid: Vec<(f64, f64)>,
    /// Sign changes of `|m| − 1` along the grid.
    pub flips: usize,
    /// Bisected zero of `|m| − 1` when there is exactly one flip.
    pub abscissa: Option<f64>,
}

/// Locates the `μ1` at which the symmetric orbit's multipliers cross the unit circle.
pub fn torus_flip(
    base: &OscillatorParams,
    eps: f64,
    lo: f64,
    hi: f64,
    count: usize,
    tol: f64,
    opts: &RunOptions,
) -> Result<TorusFlip> {
    let spec = SweepSpec {
        symbol: SweepSymbol::Coeff(Coefficient::Mu, 1),
        lo,
        hi,
        count,
        analyses: vec![Analysis::Torus],
        family: ZeroHopfFamily::Thm1,
        eps,
    };
    spec.validate()?;
    let side = |mu1: f64| base.with_coeff(Coefficient::Mu, 1, mu1).and_then(|p| ns_side(&p, eps, opts));
    let grid: Vec<(f64, f64)> = spec.values().into_par_iter().map(|v| (v, side(v).unwrap_or(f64::NAN))).collect();
    let changes: Vec<usize> = (1..grid.len())
        .filter(|&i| grid[i - 1].1.is_finite() && grid[i].1.is_finite() && grid[i - 1].1.signum() != grid[i].1.signum())
        .collect();
    let mut out = TorusFlip { eps, grid, flips: changes.len(), abscissa: None };
    if let [i] = changes[..] {
        let (mut a, mut fa) = out.grid[i - 1];
        let mut b = out.grid[i].0;
        while b - a > tol {
            let m = 0.5 * (a + b);
            let fm = side(m)?;
            if fm.signum() == fa.signum() {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
        }
        out.abscissa = Some(0.5 * (a + b));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(count: usize, lo: f64, hi: f64) -> SweepSpec {
        SweepSpec {
            symbol: SweepSymbol::Coeff(Coefficient::Mu, 1),
            lo,
            hi,
            count,
            analyses: vec![Analysis::Deltas],
            family: ZeroHopfFamily::Thm1,
            eps: 0.01,
        }
    }

    #[test]
    fn symbols_round_trip() {
        for s in ["eps", "mu1", "alpha3", "nu0"] {
            assert_eq!(s.parse::<SweepSymbol>().unwrap().to_string(), s);
        }
        assert!("mu".parse::<SweepSymbol>().is_err());
        assert!("xi1".parse::<SweepSymbol>().is_err());
    }

    #[test]
    fn guards() {
        assert!(matches!(spec(1, 0.0, 1.0).validate(), Err(Error::InvalidSweep(_))));
        assert!(spec(2, 1.0, 1.0).validate().is_err());
        assert!(spec(2, 0.0, 1.0).validate().is_ok());
        assert_eq!(spec(3, 0.0, 1.0).values(), vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn column_layout() {
        let mut s = spec(2, 0.0, 1.0);
        s.analyses = vec![Analysis::Orbit, Analysis::Torus];
        let c = s.columns();
        assert_eq!(c.len(), 2 + 12 + 2 + 1);
        assert_eq!(c[2], "central_residual");
        assert_eq!(c.last().unwrap(), "error");
    }
}
