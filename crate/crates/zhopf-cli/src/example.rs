//! The full pipeline on one bundled example, with figure data.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;
use zhopf_core::averaging::{averaged, g2_h3, g3_h3, g4_h3, Vec2};
use zhopf_core::bifurcation::{
    displacement_h4, find_zeros, ls_bifurcation_functions, ns_analyze, predict_orbits, predict_theorem1, Branch,
    EngineG1, H4Displacement, LsSummary, NsReport, OrbitPrediction, PredictionReport, SearchBox, Stability, ZeroSearch,
};
use zhopf_core::coefficients::{
    check_family, eval_params, FamilyReport, OscillatorParams, ParamValues, ZeroHopfFamily, DEFAULT_RESIDUAL_TOL,
};
use zhopf_core::standard_form::{standardize, ReductionPipeline};
use zhopf_core::verify::{
    detect_torus, integrate, refine_periodic_orbit, symmetry_defect, IntegratorConfig, PeriodicOrbit, ReturnMap,
    ShootingOptions, Stepper, TorusEvidence, TorusOptions, TorusVerdict, Trajectory, VectorField3,
};
use zhopf_core::{Error, Result};

use crate::fixtures::{fixture, ExampleFixture, ExpectedOutcome};
use crate::table::Table;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TolProfile {
    #[default]
    Default,
    Strict,
}

impl FromStr for TolProfile {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "default" => Ok(TolProfile::Default),
            "strict" => Ok(TolProfile::Strict),
            _ => Err(Error::InvalidParams(format!("unknown tolerance profile `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RunOptions {
    pub profile: TolProfile,
    pub integrator: IntegratorConfig,
    pub shooting: ShootingOptions,
    pub torus: TorusOptions,
    pub n_transient: usize,
    pub n_sample: usize,
    /// Length of the figure trajectories and of the caption transient.
    pub transient_time: f64,
    /// Newton seeds per axis for the averaged zero search.
    pub zero_grid: usize,
    /// Trajectories are cut once the state norm exceeds this.
    pub blowup: f64,
}

impl RunOptions {
    pub fn new(profile: TolProfile) -> Self {
        let mut o = Self {
            profile,
            integrator: IntegratorConfig::default(),
            shooting: ShootingOptions::default(),
            torus: TorusOptions::default(),
            n_transient: 500,
            n_sample: 500,
            transient_time: 400.0,
            zero_grid: 8,
            blowup: 1e3,
        };
        if profile == TolProfile::Strict {
            o.integrator.rtol = 1e-12;
            o.integrator.atol = 1e-14;
        }
        o
    }
}

impl Default for RunOptions {
    fn default() -> Self {
        Self::new(TolProfile::Default)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeedSource {
    /// Averaged zero mapped to the Jordan section.
    AveragedPrediction,
    /// Caption start point after the transient, on the Jordan section.
    CaptionTransient,
    /// Local section through the caption transient end state.
    LocalSection,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Attempt {
    pub source: SeedSource,
    pub seed: Vec2,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrbitOutcome {
    pub label: String,
    pub predicted: Vec2,
    pub predicted_stability: Option<Stability>,
    pub expected_stability: Option<Stability>,
    pub attempts: Vec<Attempt>,
    pub seed_source: Option<SeedSource>,
    pub orbit: Option<PeriodicOrbit>,
    /// Time mean of the scaled cylindrical `(r, z)` over one period.
    pub scaled_mean: Option<Vec2>,
    pub distance_to_prediction: Option<f64>,
    /// Period over `2π/ω`.
    pub period_ratio: Option<f64>,
    pub period_within_band: Option<bool>,
    pub matches_expected: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TorusOutcome {
    pub label: String,
    pub seed_state: [f64; 3],
    pub error: Option<String>,
    pub verdict: Option<TorusVerdict>,
    pub rotation_number: Option<f64>,
    pub mean_radius: Option<f64>,
    pub max_deviation: Option<f64>,
    pub monotone_winding: Option<bool>,
    pub converging: Option<bool>,
}

impl TorusOutcome {
    fn new(label: &str, seed_state: [f64; 3], ev: &Result<TorusEvidence>) -> Self {
        let mut t = Self {
            label: label.into(),
            seed_state,
            error: None,
            verdict: None,
            rotation_number: None,
            mean_radius: None,
            max_deviation: None,
            monotone_winding: None,
            converging: None,
        };
        match ev {
            Ok(e) => {
                t.verdict = Some(e.verdict);
                t.rotation_number = Some(e.rotation_number).filter(|v| v.is_finite());
                t.mean_radius = Some(e.mean_radius).filter(|v| v.is_finite());
                t.max_deviation = Some(e.max_deviation).filter(|v| v.is_finite());
                t.monotone_winding = Some(e.monotone_winding);
                t.converging = Some(e.converging);
            }
            Err(e) => t.error = Some(e.to_string()),
        }
        t
    }

    pub fn is_torus(&self, tol: f64) -> bool {
        self.verdict == Some(TorusVerdict::Torus) && self.max_deviation.is_some_and(|d| d <= tol)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Prediction {
    pub theorem1: Option<PredictionReport>,
    pub ns: Option<NsReport>,
    pub ls: Option<LsSummary>,
    pub h4: Option<H4Displacement>,
    pub orbits: Vec<OrbitPrediction>,
    pub zeros: Option<ZeroSearch>,
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verification {
    pub orbits: Vec<OrbitOutcome>,
    pub symmetry_defect: Option<f64>,
    pub tori: Vec<TorusOutcome>,
    /// Largest distance between the minus iterates and the mirrored plus iterates.
    pub mirror_defect: Option<f64>,
    /// Torus runs from the caption start points; reported, not counted.
    pub caption_tori: Vec<TorusOutcome>,
    pub orbits_found: usize,
    pub tori_found: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Stage {
    pub name: String,
    pub ok: bool,
    pub detail: Option<String>,
}

impl Stage {
    fn new(name: &str, ok: bool, detail: Option<String>) -> Self {
        Self { name: name.into(), ok, detail }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Artifact {
    pub file: String,
    pub figure: String,
    pub columns: Vec<String>,
    pub rows: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExampleReport {
    pub id: u8,
    pub family: ZeroHopfFamily,
    pub eps: String,
    pub eps_value: f64,
    pub options: RunOptions,
    pub expected: ExpectedOutcome,
    pub family_check: FamilyReport,
    pub prediction: Option<Prediction>,
    pub verification: Option<Verification>,
    pub stages: Vec<Stage>,
    pub artifacts: Vec<Artifact>,
    pub family_ok: bool,
    pub prediction_ok: bool,
    pub verification_ok: bool,
}

impl ExampleReport {
    pub fn exit_code(&self) -> i32 {
        if !self.family_ok {
            3
        } else if !self.verification_ok {
            2
        } else {
            0
        }
    }
}

/// Error of a pipeline stage that stops the run.
#[derive(Clone, Debug, PartialEq)]
pub struct StageError {
    pub stage: String,
    pub source: Error,
}

impl fmt::Display for StageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "stage `{}` failed: {}", self.stage, self.source)
    }
}

impl std::error::Error for StageError {}

fn at<T>(stage: &str, r: Result<T>) -> std::result::Result<T, StageError> {
    r.map_err(|source| StageError { stage: stage.into(), source })
}

pub struct ExampleRun {
    pub report: ExampleReport,
    pub tables: Vec<(String, Table)>,
}

impl ExampleRun {
    /// Writes `example<id>.json` and every table into `dir`.
    pub fn write(&self, dir: &Path) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        for (name, t) in &self.tables {
            t.write_file(&dir.join(name)).map_err(std::io::Error::other)?;
        }
        let json = serde_json::to_string_pretty(&self.report).map_err(std::io::Error::other)?;
        std::fs::write(dir.join(format!("example{}.json", self.report.id)), json + "\n")
    }
}

struct Ctx<'a> {
    fx: &'a ExampleFixture,
    p: OscillatorParams,
    eps: f64,
    pipe: ReductionPipeline,
    field: ParamValues,
    opts: &'a RunOptions,
}

impl Ctx<'_> {
    fn jordan_map(&self) -> ReturnMap<ParamValues> {
        ReturnMap::with_pipeline(self.field, &self.pipe, self.opts.integrator)
    }

    fn scale(&self) -> f64 {
        self.pipe.scaling.factor(self.eps)
    }

    fn base_period(&self) -> f64 {
        2.0 * PI / self.p.omega
    }
}

/// Samples up to `t_end`, stopping early when the state leaves the ball of
/// radius `bound` or the integrator fails.
pub fn bounded_trajectory(
    field: &impl VectorField3,
    x0: [f64; 3],
    t_end: f64,
    bound: f64,
    cfg: &IntegratorConfig,
) -> (Trajectory, Option<String>) {
    let mut out = Trajectory { t: vec![0.0], x: vec![x0] };
    let mut st = match Stepper::new(|y: &[f64; 3]| field.f(*y), x0, *cfg) {
        Ok(s) => s,
        Err(e) => return (out, Some(e.to_string())),
    };
    while st.t < t_end {
        if let Err(e) = st.step(t_end) {
            return (out, Some(e.to_string()));
        }
        out.t.push(st.t);
        out.x.push(st.y);
        let n = st.y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(n <= bound) {
            return (out, Some(format!("state norm {n:.3e} exceeded {bound:.1e} at t = {:.6}", st.t)));
        }
    }
    (out, None)
}

fn trajectory_table(tr: &Trajectory) -> Table {
    let mut t = Table::new(&["t", "x", "y", "z"]);
    for (s, x) in tr.t.iter().zip(&tr.x) {
        t.push(vec![*s, x[0], x[1], x[2]]);
    }
    t
}

fn section_table(ev: &TorusEvidence) -> Table {
    let mut t = Table::new(&["index", "X", "Z", "return_time"]);
    for (i, (q, rt)) in ev.iterates.iter().zip(&ev.return_times).enumerate() {
        t.push(vec![i as f64, q[0], q[1], *rt]);
    }
    t
}

fn fmt_err(e: &Error) -> String {
    e.to_string()
}

fn predict(ctx: &Ctx) -> Result<Prediction> {
    let (p, f) = (&ctx.p, ctx.fx.family);
    let mut pr =
        Prediction { theorem1: None, ns: None, ls: None, h4: None, orbits: Vec::new(), zeros: None, note: None };
    pr.orbits = predict_orbits(p, f, ctx.eps)?;
    match f {
        ZeroHopfFamily::Thm1 => {
            pr.theorem1 = Some(predict_theorem1(p)?);
            pr.ns = Some(ns_analyze(&EngineG1::new(p, f)?, p, Branch::Plus)?);
        }
        ZeroHopfFamily::H3 => {
            let (g2, g3, g4) = (|x: Vec2| g2_h3(x, p), |x: Vec2| g3_h3(x, p), |x: Vec2| g4_h3(x, p));
            pr.ls = Some(ls_bifurcation_functions(&g2, &g3, &g4, p, Branch::Plus, ctx.eps)?.summary(p));
        }
        ZeroHopfFamily::H4 => pr.h4 = Some(displacement_h4(p)?),
        _ => {}
    }
    if matches!(f, ZeroHopfFamily::Thm1 | ZeroHopfFamily::H1 | ZeroHopfFamily::H2) {
        let sys = standardize(p, f)?;
        let g = averaged(&sys, 1)?;
        let rmax = pr.orbits.iter().map(|o| o.x[0]).fold(0.0, f64::max);
        let zmax = pr.orbits.iter().map(|o| o.x[1].abs()).fold(0.0, f64::max);
        let bx = SearchBox { r: (0.05, 2.0 * rmax + 0.5), z: (-(2.0 * zmax + 0.5), 2.0 * zmax + 0.5) };
        pr.zeros = Some(find_zeros(&g, 1, bx, (ctx.opts.zero_grid, ctx.opts.zero_grid))?);
    } else {
        pr.note = Some(format!(
            "family {f}: the first-order averaged function vanishes on a curve; the orbit comes from the higher-order reduction"
        ));
    }
    Ok(pr)
}

/// Scaled cylindrical mean of the orbit and its one-period samples.
fn orbit_profile(ctx: &Ctx, orbit: &PeriodicOrbit) -> Result<(Vec2, Trajectory)> {
    let tr = integrate(&ctx.p, ctx.eps, orbit.state, orbit.period, &ctx.opts.integrator)?;
    let s = ctx.scale();
    let rz: Vec<Vec2> =
        tr.x.iter()
            .map(|x| {
                let j = ctx.pipe.to_jordan(*x);
                [j[0].hypot(j[1]) / s, j[2] / s]
            })
            .collect();
    let mut acc = [0.0; 2];
    for i in 1..rz.len() {
        let dt = tr.t[i] - tr.t[i - 1];
        for c in 0..2 {
            acc[c] += 0.5 * dt * (rz[i][c] + rz[i - 1][c]);
        }
    }
    let total = tr.t.last().copied().unwrap_or(1.0);
    Ok(([acc[0] / total, acc[1] / total], tr))
}

/// The transient end state from a caption start point, if the trajectory stays bounded.
fn transient_end(ctx: &Ctx, start: [f64; 3]) -> Result<[f64; 3]> {
    let (tr, err) =
        bounded_trajectory(&ctx.field, start, ctx.opts.transient_time, ctx.opts.blowup, &ctx.opts.integrator);
    match err {
        Some(e) => Err(Error::InvalidParams(format!("caption transient: {e}"))),
        None => Ok(*tr.x.last().expect("trajectory has samples")),
    }
}

fn local_map(ctx: &Ctx, x_ref: [f64; 3]) -> Result<ReturnMap<ParamValues>> {
    let tr = integrate(&ctx.p, ctx.eps, x_ref, ctx.base_period(), &ctx.opts.integrator)?;
    let far =
        tr.x.iter()
            .map(|x| ((x[0] - x_ref[0]).powi(2) + (x[1] - x_ref[1]).powi(2) + (x[2] - x_ref[2]).powi(2)).sqrt())
            .fold(0.0, f64::max);
    ReturnMap::local(ctx.field, x_ref, 0.3 * far, ctx.p.omega, ctx.opts.integrator)
}

fn refine_orbit(
    ctx: &Ctx,
    pred: &OrbitPrediction,
    expected: Option<Stability>,
    caption: Option<[f64; 3]>,
) -> (OrbitOutcome, Option<Table>) {
    let s = ctx.scale();
    let jmap = ctx.jordan_map();
    let mut out = OrbitOutcome {
        label: pred.label.clone(),
        predicted: pred.x,
        predicted_stability: pred.stability,
        expected_stability: expected,
        attempts: Vec::new(),
        seed_source: None,
        orbit: None,
        scaled_mean: None,
        distance_to_prediction: None,
        period_ratio: None,
        period_within_band: None,
        matches_expected: false,
    };
    let sh = &ctx.opts.shooting;
    let seed = [s * pred.x[0], s * pred.x[1]];
    let mut found = refine_periodic_orbit(&jmap, seed, sh);
    out.attempts.push(Attempt {
        source: SeedSource::AveragedPrediction,
        seed,
        error: found.as_ref().err().map(fmt_err),
    });
    out.seed_source = found.is_ok().then_some(SeedSource::AveragedPrediction);
    if let (Err(_), Some(start)) = (&found, caption) {
        let end = transient_end(ctx, start);
        let seed = end.as_ref().map_err(Clone::clone).and_then(|x| Ok(jmap.returns_from_state(*x, 1, None)?[0].q));
        found = seed.clone().and_then(|q| refine_periodic_orbit(&jmap, q, sh));
        out.attempts.push(Attempt {
            source: SeedSource::CaptionTransient,
            seed: seed.unwrap_or([f64::NAN; 2]),
            error: found.as_ref().err().map(fmt_err),
        });
        if found.is_ok() {
            out.seed_source = Some(SeedSource::CaptionTransient);
        } else if let Ok(x) = end {
            found = local_map(ctx, x).and_then(|m| refine_periodic_orbit(&m, [0.0, 0.0], sh));
            out.attempts.push(Attempt {
                source: SeedSource::LocalSection,
                seed: [0.0, 0.0],
                error: found.as_ref().err().map(fmt_err),
            });
            out.seed_source = found.is_ok().then_some(SeedSource::LocalSection);
        }
    }
    let mut table = None;
    if let Ok(orbit) = found {
        if let Ok((mean, tr)) = orbit_profile(ctx, &orbit) {
            out.scaled_mean = Some(mean);
            out.distance_to_prediction = Some((mean[0] - pred.x[0]).hypot(mean[1] - pred.x[1]));
            table = Some(trajectory_table(&tr));
        }
        let ratio = orbit.period / ctx.base_period();
        out.period_ratio = Some(ratio);
        out.period_within_band = Some((ratio - 1.0).abs() <= 0.25);
        out.matches_expected = orbit.residual <= sh.accept && expected.is_none_or(|e| e == orbit.stability);
        out.orbit = Some(orbit);
    }
    (out, table)
}

/// Relative deviation bound for a detected invariant curve.
pub const TORUS_TOL: f64 = 2e-3;
/// Bound on the mirror defect between the two torus clouds.
pub const MIRROR_TOL: f64 = 1e-6;

pub fn run_example(id: u8, opts: &RunOptions) -> std::result::Result<ExampleRun, StageError> {
    let fx = at("fixture", fixture(id))?;
    let p = at("fixture", fx.params())?;
    let eps = fx.eps_value();
    let family_check = at("check_family", check_family(&p, fx.family, DEFAULT_RESIDUAL_TOL))?;
    let mut report = ExampleReport {
        id,
        family: fx.family,
        eps: fx.eps.clone(),
        eps_value: eps,
        options: *opts,
        expected: fx.expected.clone(),
        family_ok: family_check.passed(),
        family_check,
        prediction: None,
        verification: None,
        stages: Vec::new(),
        artifacts: Vec::new(),
        prediction_ok: false,
        verification_ok: false,
    };
    let detail = (!report.family_ok).then(|| report.family_check.failures().join("; "));
    report.stages.push(Stage::new("check_family", report.family_ok, detail));
    if !report.family_ok {
        return Ok(ExampleRun { report, tables: Vec::new() });
    }

    let pipe = at("standardize", ReductionPipeline::new(&p, fx.family))?;
    let ctx = Ctx { fx: &fx, field: eval_params(&p, eps), p: p.clone(), eps, pipe, opts };
    let prediction = at("predict", predict(&ctx))?;
    report.stages.push(Stage::new("predict", true, None));
    report.prediction_ok = true;

    let mut tables: Vec<(String, Table, String)> = Vec::new();
    let fig = fx.figure.clone();
    let thm1 = fx.family == ZeroHopfFamily::Thm1;

    for (i, start) in fx.figure_seeds.iter().enumerate() {
        let (tr, err) = bounded_trajectory(&ctx.field, *start, opts.transient_time, opts.blowup, &opts.integrator);
        let name = if thm1 {
            format!("fig{id}_trajectory_{}.csv", if i == 0 { "plus" } else { "minus" })
        } else {
            format!("fig{id}_trajectory.csv")
        };
        report.stages.push(Stage::new(&format!("trajectory {name}"), err.is_none(), err));
        tables.push((name, trajectory_table(&tr), fig.clone()));
    }

    let caption = if thm1 { None } else { fx.figure_seeds.first().copied() };
    let mut orbits = Vec::new();
    for (i, pred) in prediction.orbits.iter().enumerate() {
        let (o, t) = refine_orbit(&ctx, pred, fx.expected.stabilities.get(i).copied(), caption);
        if let Some(t) = t {
            tables.push((format!("fig{id}_orbit_{}.csv", pred.label), t, fig.clone()));
        }
        let detail = o.attempts.iter().filter_map(|a| a.error.clone()).next_back().filter(|_| o.orbit.is_none());
        report.stages.push(Stage::new(&format!("refine {}", pred.label), o.matches_expected, detail));
        orbits.push(o);
    }
    let orbits_found = orbits.iter().filter(|o| o.orbit.is_some()).count();

    let jmap = ctx.jordan_map();
    let mut ver = Verification {
        orbits,
        symmetry_defect: None,
        tori: Vec::new(),
        mirror_defect: None,
        caption_tori: Vec::new(),
        orbits_found,
        tori_found: 0,
    };

    let sym = |l: &str| ver.orbits.iter().find(|o| o.label == l).and_then(|o| o.orbit.clone());
    if let (true, Some(plus), Some(minus)) = (thm1, sym("plus"), sym("minus")) {
        ver.symmetry_defect = symmetry_defect(&jmap, &plus, &minus).ok();
        let (nt, ns) = (opts.n_transient, opts.n_sample);
        let seed_p = [plus.q[0] * 1.01, plus.q[1] * 1.01];
        let state_p = jmap.state(seed_p);
        let mirrored = jmap.returns_from_state(state_p.map(|v| -v), 1, None).map(|r| r[0]);
        let ev_p = detect_torus(&jmap, plus.q, seed_p, nt, ns, &opts.torus);
        let ev_m = mirrored.and_then(|r| detect_torus(&jmap, minus.q, r.q, nt, ns, &opts.torus));
        ver.tori.push(TorusOutcome::new("torus-plus", state_p, &ev_p));
        ver.tori.push(TorusOutcome::new("torus-minus", state_p.map(|v| -v), &ev_m));
        if let (Ok(a), Ok(b)) = (&ev_p, &ev_m) {
            ver.mirror_defect = mirror_defect(&jmap, a, b);
            tables.push((format!("fig{id}_section_plus.csv"), section_table(a), fig.clone()));
            tables.push((format!("fig{id}_section_minus.csv"), section_table(b), fig.clone()));
        }
        for (k, (start, center)) in fx.figure_seeds.iter().zip([plus.q, minus.q]).enumerate() {
            let label = if k == 0 { "caption-plus" } else { "caption-minus" };
            let ev = jmap
                .returns_from_state(*start, 1, None)
                .and_then(|r| detect_torus(&jmap, center, r[0].q, nt, ns, &opts.torus));
            if let Ok(e) = &ev {
                tables.push((format!("fig{id}_section_{label}.csv"), section_table(e), fig.clone()));
            }
            ver.caption_tori.push(TorusOutcome::new(label, *start, &ev));
        }
        let mirror_ok = ver.mirror_defect.is_some_and(|d| d <= MIRROR_TOL);
        ver.tori_found = if mirror_ok { ver.tori.iter().filter(|t| t.is_torus(TORUS_TOL)).count() } else { 0 };
        for t in &ver.tori {
            let detail = t
                .error
                .clone()
                .or_else(|| Some(format!("verdict {:?}, max deviation {:?}", t.verdict?, t.max_deviation)));
            report.stages.push(Stage::new(&format!("detect_torus {}", t.label), t.is_torus(TORUS_TOL), detail));
        }
        report.stages.push(Stage::new(
            "torus mirror",
            mirror_ok,
            ver.mirror_defect.map(|d| format!("mirror defect {d:.3e}")),
        ));
    }

    let all_orbits = ver.orbits.len() == fx.expected.orbits && ver.orbits.iter().all(|o| o.matches_expected);
    let sym_ok = !thm1 || ver.symmetry_defect.is_some_and(|d| d <= 1e-8);
    report.verification_ok = all_orbits && sym_ok && ver.tori_found == fx.expected.tori;
    report.verification = Some(ver);
    report.prediction = Some(prediction);

    report.artifacts = tables
        .iter()
        .map(|(file, t, figure)| Artifact {
            file: file.clone(),
            figure: figure.clone(),
            columns: t.headers.clone(),
            rows: t.rows.len(),
        })
        .collect();
    Ok(ExampleRun { report, tables: tables.into_iter().map(|(n, t, _)| (n, t)).collect() })
}

/// Max distance between `b`'s iterates and the section images of `x ↦ −x`
/// applied to `a`'s, sampled over the recorded returns.
fn mirror_defect<V: VectorField3>(map: &ReturnMap<V>, a: &TorusEvidence, b: &TorusEvidence) -> Option<f64> {
    let n = a.iterates.len().min(b.iterates.len());
    if n == 0 {
        return None;
    }
    let step = (n / 50).max(1);
    let mut worst = 0.0f64;
    for k in (0..n).step_by(step) {
        let img = map.returns_from_state(map.state(a.iterates[k]).map(|v| -v), 1, None).ok()?[0].q;
        worst = worst.max((img[0] - b.iterates[k][0]).hypot(img[1] - b.iterates[k][1]));
    }
    Some(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use zhopf_core::verify::LinearField;

    #[test]
    fn profiles() {
        assert_eq!("strict".parse::<TolProfile>().unwrap(), TolProfile::Strict);
        assert!("loose".parse::<TolProfile>().is_err());
        let s = RunOptions::new(TolProfile::Strict);
        assert!(s.integrator.rtol < RunOptions::default().integrator.rtol);
    }

    #[test]
    fn trajectory_stops_at_the_bound() {
        let grow = LinearField(nalgebra::Matrix3::identity());
        let (tr, err) = bounded_trajectory(&grow, [1.0, 0.0, 0.0], 100.0, 1e3, &IntegratorConfig::default());
        assert!(err.is_some());
        let t_end = *tr.t.last().unwrap();
        assert!(t_end > 6.5 && t_end < 7.5, "{t_end}");
    }
}
