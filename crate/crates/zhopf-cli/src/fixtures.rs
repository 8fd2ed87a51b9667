//! The five worked examples with their exact rational coefficients.

use serde::Serialize;
use zhopf_core::bifurcation::Stability;
use zhopf_core::coefficients::{parse_coefficient, OscillatorParams, ParamsConfig, ZeroHopfFamily};
use zhopf_core::{Error, Result};

/// What the figure caption of an example shows.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpectedOutcome {
    pub orbits: usize,
    pub stabilities: Vec<Stability>,
    pub tori: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExampleFixture {
    pub id: u8,
    pub family: ZeroHopfFamily,
    pub config: ParamsConfig,
    /// `ε` as written, e.g. `"1/70"`.
    pub eps: String,
    /// Start points of the figure trajectories, original coordinates.
    pub figure_seeds: Vec<[f64; 3]>,
    pub figure: String,
    pub expected: ExpectedOutcome,
}

impl ExampleFixture {
    pub fn params(&self) -> Result<OscillatorParams> {
        self.config.params()
    }

    pub fn eps_value(&self) -> f64 {
        parse_coefficient(&self.eps).expect("fixture epsilon parses")
    }
}

const EXAMPLE1: &str = r#"{
  "omega": "1",
  "h": ["1", "1/25", "3/25"],
  "k": ["67/50", "1/25", "3/50"],
  "alpha": ["0", "-1", "1/25"],
  "beta": ["117/50", "1/25", "3/50"],
  "mu": ["0", "20029/5025", "3/50"],
  "nu": ["1", "1/25", "3/50"],
  "family": "THM1"
}"#;

const EXAMPLE2: &str = r#"{
  "omega": "1",
  "h": ["0", "-1", "3"],
  "k": ["-2393/1184", "3", "3"],
  "alpha": ["-37/32", "-1", "3"],
  "beta": ["-1", "3", "3"],
  "mu": ["-1", "-2", "3"],
  "nu": ["37/32", "-4", "3"],
  "family": "H1"
}"#;

const EXAMPLE3: &str = r#"{
  "omega": "1",
  "h": ["-1", "-171/10", "-103/5"],
  "k": ["-2393/1184", "187/10", "3"],
  "alpha": ["-37/32", "-1", "29/5"],
  "beta": ["0", "-1", "1/10"],
  "mu": ["-1", "-2", "-221/10"],
  "nu": ["37/32", "-4", "37/32"],
  "family": "H2"
}"#;

const EXAMPLE4: &str = r#"{
  "omega": "1",
  "h": ["1", "0", "1/50"],
  "k": ["-1", "-128", "1/50"],
  "alpha": ["0", "0", "0", "-25"],
  "beta": ["1", "0", "1/50"],
  "mu": ["0", "1", "4065/64"],
  "nu": ["0", "128", "-1"],
  "family": "H3"
}"#;

const EXAMPLE5: &str = r#"{
  "omega": "1",
  "h": ["0", "-1", "43/5"],
  "k": ["-16/5", "-54/5", "8/5"],
  "alpha": ["0", "-1"],
  "beta": ["-1", "-14/5", "1/5"],
  "mu": ["0", "-1"],
  "nu": ["5/16", "-1", "-46/5"],
  "family": "H4"
}"#;

/// Raw JSON of fixture `id`, with coefficients as rational strings.
pub fn fixture_json(id: u8) -> Result<&'static str> {
    match id {
        1 => Ok(EXAMPLE1),
        2 => Ok(EXAMPLE2),
        3 => Ok(EXAMPLE3),
        4 => Ok(EXAMPLE4),
        5 => Ok(EXAMPLE5),
        _ => Err(Error::InvalidParams(format!("example id must be 1..5, got {id}"))),
    }
}

pub fn fixture(id: u8) -> Result<ExampleFixture> {
    let config: ParamsConfig =
        serde_json::from_str(fixture_json(id)?).map_err(|e| Error::InvalidParams(format!("fixture {id}: {e}")))?;
    let family = config.family()?.expect("fixtures carry a family tag");
    let one_stable = ExpectedOutcome { orbits: 1, stabilities: vec![Stability::Stable], tori: 0 };
    let (eps, seeds, figure, expected) = match id {
        1 => (
            "1/70",
            vec![[0.198, 0.0, 0.490], [-0.198, 0.0, -0.490]],
            "Fig. 1: return map near the two tori and trajectories from p+ and p-",
            ExpectedOutcome {
                orbits: 3,
                stabilities: vec![Stability::Saddle, Stability::Unstable, Stability::Unstable],
                tori: 2,
            },
        ),
        2 => ("1/25", vec![[0.0, 0.025, 0.08]], "Fig. 2: trajectory from p1 attracted by the orbit", one_stable),
        3 => ("1/25", vec![[0.0, 0.0, -0.01]], "Fig. 3: trajectory from p2 attracted by the orbit", one_stable),
        4 => ("1/150", vec![[0.1, -0.2, 0.0]], "Fig. 4: trajectory from p3 attracted by the orbit", one_stable),
        _ => ("1/150", vec![[0.0, 0.1, 0.08]], "Fig. 5: trajectory from p4 attracted by the orbit", one_stable),
    };
    Ok(ExampleFixture { id, family, config, eps: eps.into(), figure_seeds: seeds, figure: figure.into(), expected })
}

pub fn all_fixtures() -> Vec<ExampleFixture> {
    (1..=5).map(|i| fixture(i).expect("bundled fixtures parse")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_are_kept_as_written() {
        assert!(EXAMPLE2.contains("\"-2393/1184\""));
        assert!(EXAMPLE1.contains("\"20029/5025\""));
        let p = fixture(2).unwrap().params().unwrap();
        assert_eq!(p.k.c(0), -2393.0 / 1184.0);
    }

    #[test]
    fn every_fixture_parses_with_its_family() {
        let tags: Vec<_> = all_fixtures().iter().map(|f| f.family).collect();
        use ZeroHopfFamily::*;
        assert_eq!(tags, vec![Thm1, H1, H2, H3, H4]);
        assert!(fixture(0).is_err() && fixture(6).is_err());
    }

    #[test]
    fn epsilons() {
        let e: Vec<f64> = all_fixtures().iter().map(|f| f.eps_value()).collect();
        assert_eq!(e, vec![1.0 / 70.0, 1.0 / 25.0, 1.0 / 25.0, 1.0 / 150.0, 1.0 / 150.0]);
    }
}
