//! Parameter polynomials, their evaluation, and zero-Hopf family membership.

use std::fmt;
use std::str::FromStr;

use nalgebra::Matrix3;
use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Highest supported power of `eps` in any coefficient.
pub const MAX_DEGREE: usize = 4;

/// Default tolerance for relation residuals on exact-rational inputs.
pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-10;

/// `c0 + c1 eps + ... + cK eps^K` with `K <= 4`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct EpsPolynomial {
    coeffs: Vec<f64>,
}

impl EpsPolynomial {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() > MAX_DEGREE + 1 {
            return Err(Error::DegreeTooHigh(coeffs.len() - 1));
        }
        if let Some(c) = coeffs.iter().find(|c| !c.is_finite()) {
            return Err(Error::InvalidParams(format!("non-finite coefficient {c}")));
        }
        Ok(Self { coeffs })
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Self { coeffs: vec![c] }
    }

    /// Coefficient of `eps^i`; zero past the stored degree.
    pub fn c(&self, i: usize) -> f64 {
        self.coeffs.get(i).copied().unwrap_or(0.0)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Degree of the stored coefficient list (0 for the empty polynomial).
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, eps: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * eps + c)
    }

    /// Copy with the coefficient of `eps^i` replaced.
    pub fn with_coeff(&self, i: usize, value: f64) -> Result<Self> {
        if i > MAX_DEGREE {
            return Err(Error::DegreeTooHigh(i));
        }
        let mut coeffs = self.coeffs.clone();
        if coeffs.len() <= i {
            coeffs.resize(i + 1, 0.0);
        }
        coeffs[i] = value;
        Self::new(coeffs)
    }
}

impl TryFrom<Vec<f64>> for EpsPolynomial {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<EpsPolynomial> for Vec<f64> {
    fn from(p: EpsPolynomial) -> Vec<f64> {
        p.coeffs
    }
}

/// Parse `"67/50"`, `"-3"`, or a decimal literal.
pub fn parse_coefficient(s: &str) -> Result<f64> {
    let t = s.trim();
    if let Ok(q) = Rational64::from_str(t) {
        return Ok(*q.numer() as f64 / *q.denom() as f64);
    }
    t.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| Error::BadCoefficient(s.to_string()))
}

/// A coefficient as written in a config file: a JSON number or a string.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoeffValue {
    Number(f64),
    Text(String),
}

impl CoeffValue {
    pub fn value(&self) -> Result<f64> {
        match self {
            CoeffValue::Number(v) => Ok(*v),
            CoeffValue::Text(s) => parse_coefficient(s),
        }
    }
}

/// Parameter file layout; `family` names one of the tags of [`ZeroHopfFamily`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamsConfig {
    pub omega: CoeffValue,
    pub h: Vec<CoeffValue>,
    pub k: Vec<CoeffValue>,
    pub alpha: Vec<CoeffValue>,
    pub beta: Vec<CoeffValue>,
    pub mu: Vec<CoeffValue>,
    pub nu: Vec<CoeffValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
}

impl ParamsConfig {
    pub fn params(&self) -> Result<OscillatorParams> {
        let poly = |v: &[CoeffValue]| -> Result<EpsPolynomial> {
            EpsPolynomial::new(v.iter().map(CoeffValue::value).collect::<Result<_>>()?)
        };
        OscillatorParams::new(
            poly(&self.h)?,
            poly(&self.k)?,
            poly(&self.alpha)?,
            poly(&self.beta)?,
            poly(&self.mu)?,
            poly(&self.nu)?,
            self.omega.value()?,
        )
    }

    pub fn family(&self) -> Result<Option<ZeroHopfFamily>> {
        self.family.as_deref().map(str::parse).transpose()
    }
}

/// Names of the six parameter polynomials.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Coefficient {
    H,
    K,
    Alpha,
    Beta,
    Mu,
    Nu,
}

impl Coefficient {
    pub const ALL: [Coefficient; 6] =
        [Coefficient::H, Coefficient::K, Coefficient::Alpha, Coefficient::Beta, Coefficient::Mu, Coefficient::Nu];

    pub fn name(self) -> &'static str {
        match self {
            Coefficient::H => "h",
            Coefficient::K => "k",
            Coefficient::Alpha => "alpha",
            Coefficient::Beta => "beta",
            Coefficient::Mu => "mu",
            Coefficient::Nu => "nu",
        }
    }
}

impl FromStr for Coefficient {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Coefficient::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown coefficient `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OscillatorParams {
    pub h: EpsPolynomial,
    pub k: EpsPolynomial,
    pub alpha: EpsPolynomial,
    pub beta: EpsPolynomial,
    pub mu: EpsPolynomial,
    pub nu: EpsPolynomial,
    pub omega: f64,
}

impl OscillatorParams {
    pub fn new(
        h: EpsPolynomial,
        k: EpsPolynomial,
        alpha: EpsPolynomial,
        beta: EpsPolynomial,
        mu: EpsPolynomial,
        nu: EpsPolynomial,
        omega: f64,
    ) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::InvalidParams(format!("omega must be positive, got {omega}")));
        }
        Ok(Self { h, k, alpha, beta, mu, nu, omega })
    }

    /// Build from plain coefficient slices, `[h, k, alpha, beta, mu, nu]`.
    pub fn from_slices(c: [&[f64]; 6], omega: f64) -> Result<Self> {
        let p = |s: &[f64]| EpsPolynomial::new(s.to_vec());
        Self::new(p(c[0])?, p(c[1])?, p(c[2])?, p(c[3])?, p(c[4])?, p(c[5])?, omega)
    }

    pub fn get(&self, c: Coefficient) -> &EpsPolynomial {
        match c {
            Coefficient::H => &self.h,
            Coefficient::K => &self.k,
            Coefficient::Alpha => &self.alpha,
            Coefficient::Beta => &self.beta,
            Coefficient::Mu => &self.mu,
            Coefficient::Nu => &self.nu,
        }
    }

    fn get_mut(&mut self, c: Coefficient) -> &mut EpsPolynomial {
        match c {
            Coefficient::H => &mut self.h,
            Coefficient::K => &mut self.k,
            Coefficient::Alpha => &mut self.alpha,
            Coefficient::Beta => &mut self.beta,
            Coefficient::Mu => &mut self.mu,
            Coefficient::Nu => &mut self.nu,
        }
    }

    /// Copy with the `eps^i` coefficient of `c` replaced.
    pub fn with_coeff(&self, c: Coefficient, i: usize, value: f64) -> Result<Self> {
        let mut out = self.clone();
        *out.get_mut(c) = self.get(c).with_coeff(i, value)?;
        Ok(out)
    }

    /// Largest stored degree among the six polynomials.
    pub fn degree(&self) -> usize {
        Coefficient::ALL.iter().map(|c| self.get(*c).degree()).max().unwrap_or(0)
    }

    pub fn eval(&self, eps: f64) -> ParamValues {
        eval_params(self, eps)
    }
}

/// The six coefficients and `omega` at a fixed `eps`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ParamValues {
    pub h: f64,
    pub k: f64,
    pub alpha: f64,
    pub beta: f64,
    pub mu: f64,
    pub nu: f64,
    pub omega: f64,
}

impl ParamValues {
    pub fn field(&self, v: [f64; 3]) -> [f64; 3] {
        let [x, y, z] = v;
        [-self.nu * (x * x * x - self.mu * x - y), -self.h * z + self.k * x - self.alpha * y, self.beta * y]
    }

    /// Jacobian of the field at `v`.
    pub fn field_jacobian(&self, v: [f64; 3]) -> Matrix3<f64> {
        let x = v[0];
        Matrix3::new(
            -self.nu * (3.0 * x * x - self.mu),
            self.nu,
            0.0,
            self.k,
            -self.alpha,
            -self.h,
            0.0,
            self.beta,
            0.0,
        )
    }

    /// Linearization at the origin.
    pub fn linear_part(&self) -> Matrix3<f64> {
        self.field_jacobian([0.0; 3])
    }
}

pub fn eval_params(p: &OscillatorParams, eps: f64) -> ParamValues {
    ParamValues {
        h: p.h.eval(eps),
        k: p.k.eval(eps),
        alpha: p.alpha.eval(eps),
        beta: p.beta.eval(eps),
        mu: p.mu.eval(eps),
        nu: p.nu.eval(eps),
        omega: p.omega,
    }
}

pub fn vector_field(p: &OscillatorParams, eps: f64, x: [f64; 3]) -> [f64; 3] {
    eval_params(p, eps).field(x)
}

/// Zero-Hopf families: the five base families and the refined hypotheses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ZeroHopfFamily {
    I,
    II,
    III,
    IV,
    V,
    H1,
    H2,
    H3,
    H4,
    #[serde(rename = "THM1")]
    Thm1,
}

impl ZeroHopfFamily {
    pub const ALL: [ZeroHopfFamily; 10] = [
        ZeroHopfFamily::I,
        ZeroHopfFamily::II,
        ZeroHopfFamily::III,
        ZeroHopfFamily::IV,
        ZeroHopfFamily::V,
        ZeroHopfFamily::H1,
        ZeroHopfFamily::H2,
        ZeroHopfFamily::H3,
        ZeroHopfFamily::H4,
        ZeroHopfFamily::Thm1,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            ZeroHopfFamily::I => "I",
            ZeroHopfFamily::II => "II",
            ZeroHopfFamily::III => "III",
            ZeroHopfFamily::IV => "IV",
            ZeroHopfFamily::V => "V",
            ZeroHopfFamily::H1 => "H1",
            ZeroHopfFamily::H2 => "H2",
            ZeroHopfFamily::H3 => "H3",
            ZeroHopfFamily::H4 => "H4",
            ZeroHopfFamily::Thm1 => "THM1",
        }
    }

    /// The base family whose linear change of variables applies.
    pub fn base(self) -> ZeroHopfFamily {
        match self {
            ZeroHopfFamily::H1 => ZeroHopfFamily::I,
            ZeroHopfFamily::H2 => ZeroHopfFamily::II,
            ZeroHopfFamily::Thm1 => ZeroHopfFamily::III,
            ZeroHopfFamily::H3 => ZeroHopfFamily::IV,
            ZeroHopfFamily::H4 => ZeroHopfFamily::V,
            f => f,
        }
    }

    /// `omega` implied by the family relations for given `eps^0` coefficients,
    /// `[h0, k0, alpha0, beta0, mu0, nu0]`. `None` if the implied square is not positive.
    pub fn implied_omega(self, c0: [f64; 6]) -> Option<f64> {
        let [h0, k0, _a0, b0, mu0, nu0] = c0;
        let w2 = match self.base() {
            ZeroHopfFamily::I | ZeroHopfFamily::II => -k0 * nu0 - mu0 * mu0 * nu0 * nu0,
            ZeroHopfFamily::III => b0 * h0 - k0 * nu0,
            ZeroHopfFamily::IV => b0 * h0,
            _ => -k0 * nu0,
        };
        (w2 > 0.0).then(|| w2.sqrt())
    }
}

impl fmt::Display for ZeroHopfFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for ZeroHopfFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        ZeroHopfFamily::ALL
            .into_iter()
            .find(|f| f.tag().eq_ignore_ascii_case(t))
            .ok_or_else(|| Error::UnknownFamily(s.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Relation {
    pub name: String,
    pub residual: f64,
    pub pass: bool,
}

/// A sign or nondegeneracy condition. `required == false` marks a condition
/// that is reported for reference but does not gate membership.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Condition {
    pub name: String,
    pub value: f64,
    pub pass: bool,
    pub required: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FamilyReport {
    pub family: ZeroHopfFamily,
    pub tol: f64,
    pub relations: Vec<Relation>,
    pub conditions: Vec<Condition>,
    /// All relation residuals within `tol`.
    pub member: bool,
    /// All required conditions hold.
    pub conditions_pass: bool,
}

impl FamilyReport {
    pub fn passed(&self) -> bool {
        self.member && self.conditions_pass
    }

    pub fn failures(&self) -> Vec<String> {
        self.relations
            .iter()
            .filter(|r| !r.pass)
            .map(|r| format!("{} (residual {:.3e})", r.name, r.residual))
            .chain(
                self.conditions
                    .iter()
                    .filter(|c| c.required && !c.pass)
                    .map(|c| format!("{} (value {:.3e})", c.name, c.value)),
            )
            .collect()
    }
}

/// The four sign quantities governing the three-orbit picture.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Deltas {
    pub delta_a: f64,
    pub delta_b: f64,
    pub delta_c: f64,
    pub delta_d: f64,
}

pub fn thm1_deltas(p: &OscillatorParams) -> Deltas {
    let (k0, nu0, a1, mu1, w) = (p.k.c(0), p.nu.c(0), p.alpha.c(1), p.mu.c(1), p.omega);
    let w2 = w * w;
    Deltas {
        delta_a: k0 * (2.0 * k0 * mu1 * nu0 * nu0 - a1 * w2),
        delta_b: k0 * (2.0 * a1 * w2 + k0 * mu1 * nu0 * nu0),
        delta_c: k0 * (a1 * w2 + k0 * mu1 * nu0 * nu0),
        delta_d: a1 * (k0 * nu0 + w2),
    }
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        f64::INFINITY
    } else {
        num / den
    }
}

pub fn check_family(p: &OscillatorParams, f: ZeroHopfFamily, tol: f64) -> Result<FamilyReport> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParams(format!("tolerance must be positive, got {tol}")));
    }
    let c = |poly: &EpsPolynomial, i| poly.c(i);
    let (h0, h1, k0, k1) = (c(&p.h, 0), c(&p.h, 1), c(&p.k, 0), c(&p.k, 1));
    let (a0, a1, a2, a3) = (c(&p.alpha, 0), c(&p.alpha, 1), c(&p.alpha, 2), c(&p.alpha, 3));
    let (b0, b1) = (c(&p.beta, 0), c(&p.beta, 1));
    let (mu0, mu1) = (c(&p.mu, 0), c(&p.mu, 1));
    let (nu0, nu1) = (c(&p.nu, 0), c(&p.nu, 1));
    let w = p.omega;
    let w2 = w * w;

    let mut rel: Vec<(&str, f64)> = Vec::new();
    match f.base() {
        ZeroHopfFamily::I => {
            rel.push(("h0 = 0", h0));
            rel.push(("k0 = -(mu0^2 nu0^2 + omega^2)/nu0", k0 + ratio(mu0 * mu0 * nu0 * nu0 + w2, nu0)));
            rel.push(("alpha0 = mu0 nu0", a0 - mu0 * nu0));
        }
        ZeroHopfFamily::II => {
            rel.push(("beta0 = 0", b0));
            rel.push(("k0 = -(mu0^2 nu0^2 + omega^2)/nu0", k0 + ratio(mu0 * mu0 * nu0 * nu0 + w2, nu0)));
            rel.push(("alpha0 = mu0 nu0", a0 - mu0 * nu0));
        }
        ZeroHopfFamily::III => {
            rel.push(("alpha0 = 0", a0));
            rel.push(("beta0 = (k0 nu0 + omega^2)/h0", b0 - ratio(k0 * nu0 + w2, h0)));
            rel.push(("mu0 = 0", mu0));
        }
        ZeroHopfFamily::IV => {
            rel.push(("alpha0 = 0", a0));
            rel.push(("beta0 = omega^2/h0", b0 - ratio(w2, h0)));
            rel.push(("nu0 = 0", nu0));
        }
        _ => {
            rel.push(("alpha0 = 0", a0));
            rel.push(("k0 = -omega^2/nu0", k0 + ratio(w2, nu0)));
            rel.push(("h0 = 0", h0));
            rel.push(("mu0 = 0", mu0));
        }
    }
    if f == ZeroHopfFamily::H3 {
        rel.push(("alpha1 = 0", a1));
        rel.push(("mu0 = 0", mu0));
        rel.push(("alpha2 = 0", a2));
    }

    let positive =
        |name: &str, v: f64, required| Condition { name: name.to_string(), value: v, pass: v > 0.0, required };
    let nonzero =
        |name: &str, v: f64, required| Condition { name: name.to_string(), value: v, pass: v.abs() > tol, required };
    let mut cond = Vec::new();
    match f {
        ZeroHopfFamily::Thm1 => {
            let d = thm1_deltas(p);
            cond.push(positive("delta_a > 0", d.delta_a, true));
            cond.push(positive("delta_b > 0", d.delta_b, true));
            cond.push(positive("delta_c > 0", d.delta_c, true));
            cond.push(nonzero("delta_d != 0", d.delta_d, true));
            cond.push(positive("delta_d > 0", d.delta_d, false));
        }
        ZeroHopfFamily::H1 => {
            let d1 = w2 * (mu0 * nu1 - a1 + mu1 * nu0) - b0 * h1 * mu0 * nu0;
            cond.push(positive("delta_1 nu0 > 0", d1 * nu0, true));
            cond.push(nonzero("beta0 h1 mu0 != 0", b0 * h1 * mu0, true));
            cond.push(nonzero("beta1 h1 mu0 != 0", b1 * h1 * mu0, false));
        }
        ZeroHopfFamily::H2 => {
            let d2 = w2 * (mu0 * nu1 - a1 + mu1 * nu0) - b1 * h0 * mu0 * nu0;
            cond.push(positive("delta_2 nu0 > 0", d2 * nu0, true));
            cond.push(nonzero("beta1 h0 mu0 != 0", b1 * h0 * mu0, true));
        }
        ZeroHopfFamily::H3 => {
            cond.push(positive("mu1 > 0", mu1, true));
            let d3 = mu1.max(0.0).sqrt() * (h1 * k0 - h0 * k1) * h0 * w;
            cond.push(positive("delta_3 > 0", d3, true));
            cond.push(nonzero("2 k0 mu1 nu1^2 - alpha3 omega^2 != 0", 2.0 * k0 * mu1 * nu1 * nu1 - a3 * w2, true));
        }
        ZeroHopfFamily::H4 => {
            cond.push(positive("delta_4 > 0", nu0 * (mu1 * nu0 - a1), true));
            cond.push(nonzero(
                "beta0 h1 (2 alpha1^2 - 3 alpha1 mu1 nu0 + mu1^2 nu0^2) != 0",
                b0 * h1 * (2.0 * a1 * a1 - 3.0 * a1 * mu1 * nu0 + mu1 * mu1 * nu0 * nu0),
                true,
            ));
        }
        _ => {}
    }

    let relations: Vec<Relation> = rel
        .into_iter()
        .map(|(name, r)| Relation { name: name.to_string(), residual: r, pass: r.abs() <= tol })
        .collect();
    let member = relations.iter().all(|r| r.pass);
    let conditions_pass = cond.iter().filter(|c| c.required).all(|c| c.pass);
    Ok(FamilyReport { family: f, tol, relations, conditions: cond, member, conditions_pass })
}
