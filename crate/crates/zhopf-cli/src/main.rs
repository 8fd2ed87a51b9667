use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};
use zhopf_cli::example::{run_example, RunOptions, TolProfile, TORUS_TOL};
use zhopf_cli::fixtures::fixture;
use zhopf_cli::sweep::{sweep, Analysis, SweepSpec, SweepSymbol};
use zhopf_cli::table::Table;
use zhopf_core::averaging::averaged;
use zhopf_core::bifurcation::{ns_analyze, predict_orbits, predict_theorem1, Branch, EngineG1};
use zhopf_core::coefficients::{
    check_family, eval_params, parse_coefficient, OscillatorParams, ParamsConfig, ZeroHopfFamily, DEFAULT_RESIDUAL_TOL,
};
use zhopf_core::standard_form::{standardize, ReductionPipeline};
use zhopf_core::verify::{detect_torus, refine_periodic_orbit, ReturnMap, TorusVerdict};

#[derive(Parser)]
#[command(name = "zhopf", version, about = "Zero-Hopf averaging analysis of the cubic oscillator")]
struct Cli {
    /// Parameter file (JSON), or `example:<id>` for a bundled fixture.
    #[arg(long, global = true)]
    config: Option<String>,
    /// Directory for JSON reports and CSV data.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[arg(long, global = true, default_value = "default")]
    tol_profile: String,
    /// Write (θ, r, z, F₁, F₂) samples of the standard form to this CSV.
    #[arg(long, global = true)]
    dump_standard_form: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analytic predictions as JSON.
    Predict {
        #[arg(long, default_value = "+", allow_hyphen_values = true)]
        branch: String,
    },
    /// Refine an orbit or look for a torus by integrating the full system.
    Verify {
        #[arg(long)]
        eps: String,
        /// central, plus, minus, torus-plus, torus-minus, or orbit for single-orbit families.
        #[arg(long)]
        target: String,
        #[arg(long)]
        dump_iterates: Option<PathBuf>,
    },
    /// Averaged function on a grid as CSV.
    G {
        #[arg(long)]
        family: Option<String>,
        #[arg(long, default_value_t = 1)]
        order: usize,
        /// `rmin:rmax:n,zmin:zmax:m`
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
    },
    /// One-parameter sweep as CSV.
    Sweep {
        /// `eps` or a coefficient such as `mu1`.
        #[arg(long)]
        symbol: String,
        /// `lo:hi:count`
        #[arg(long, allow_hyphen_values = true)]
        range: String,
        /// Comma-separated: deltas, eigen, ell1, orbit, torus, torus-detect.
        #[arg(long, default_value = "orbit")]
        analyses: String,
        /// `ε` when sweeping a coefficient.
        #[arg(long)]
        eps: Option<String>,
    },
    /// Run a bundled example end to end.
    Example { id: u8 },
}

type AnyResult<T> = Result<T, Box<dyn std::error::Error>>;

struct Loaded {
    params: OscillatorParams,
    family: Option<ZeroHopfFamily>,
}

fn load_config(spec: Option<&str>) -> AnyResult<Loaded> {
    let spec = spec.ok_or("--config is required for this command")?;
    let cfg: ParamsConfig = match spec.strip_prefix("example:") {
        Some(id) => fixture(id.parse()?)?.config,
        None => serde_json::from_str(&fs::read_to_string(spec)?)?,
    };
    Ok(Loaded { params: cfg.params()?, family: cfg.family()? })
}

fn pick_family(flag: Option<&str>, loaded: &Loaded) -> AnyResult<ZeroHopfFamily> {
    match flag {
        Some(f) => Ok(f.parse()?),
        None => loaded.family.ok_or_else(|| "no family given in the config or on the command line".into()),
    }
}

fn parse_range(s: &str) -> AnyResult<(f64, f64, usize)> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("range `{s}` is not lo:hi:count").into());
    }
    Ok((parse_coefficient(parts[0])?, parse_coefficient(parts[1])?, parts[2].parse()?))
}

fn emit(out_dir: Option<&Path>, name: &str, body: &str) -> AnyResult<()> {
    match out_dir {
        Some(d) => {
            fs::create_dir_all(d)?;
            fs::write(d.join(name), body)?;
        }
        None => std::io::stdout().write_all(body.as_bytes())?,
    }
    Ok(())
}

fn table_string(t: &Table) -> AnyResult<String> {
    let mut buf = Vec::new();
    t.write_to(&mut buf)?;
    Ok(String::from_utf8(buf)?)
}

fn dump_standard_form(path: &Path, p: &OscillatorParams, f: ZeroHopfFamily) -> AnyResult<()> {
    let sys = standardize(p, f)?;
    let mut t = Table::new(&["theta", "r", "z", "F1_1", "F1_2", "F2_1", "F2_2"]);
    for i in 0..16 {
        let th = 2.0 * std::f64::consts::PI * i as f64 / 16.0;
        for a in 0..5 {
            for b in 0..5 {
                let (r, z) = (0.5 + 0.5 * a as f64, -0.8 + 0.4 * b as f64);
                let c = sys.coefficients(th, [r, z]);
                let f2 = c.get(1).copied().unwrap_or([f64::NAN; 2]);
                t.push(vec![th, r, z, c[0][0], c[0][1], f2[0], f2[1]]);
            }
        }
    }
    t.write_file(path)?;
    Ok(())
}

fn cmd_predict(loaded: &Loaded, branch: &str) -> AnyResult<(Value, u8)> {
    let f = pick_family(None, loaded)?;
    let p = &loaded.params;
    let fam = check_family(p, f, DEFAULT_RESIDUAL_TOL)?;
    if !fam.passed() {
        return Ok((json!({ "family": f, "family_check": fam }), 3));
    }
    let mut out = match f {
        ZeroHopfFamily::Thm1 => {
            let mut v = serde_json::to_value(predict_theorem1(p)?)?;
            let branch: Branch = branch.parse()?;
            v["ns"] = match ns_analyze(&EngineG1::new(p, f)?, p, branch) {
                Ok(r) => serde_json::to_value(r)?,
                Err(e) => json!({ "error": e.to_string() }),
            };
            v
        }
        _ => json!({}),
    };
    out["family"] = json!(f);
    out["family_check"] = serde_json::to_value(&fam)?;
    out["orbits"] = match predict_orbits(p, f, 1.0 / 70.0) {
        Ok(o) if matches!(f, ZeroHopfFamily::Thm1 | ZeroHopfFamily::H1 | ZeroHopfFamily::H2) => {
            serde_json::to_value(o)?
        }
        Ok(_) => json!("depends on eps; see `verify`"),
        Err(e) => json!({ "error": e.to_string() }),
    };
    Ok((out, 0))
}

fn cmd_verify(
    loaded: &Loaded,
    opts: &RunOptions,
    eps: f64,
    target: &str,
    dump: Option<&Path>,
) -> AnyResult<(Value, u8)> {
    let f = pick_family(None, loaded)?;
    let p = &loaded.params;
    let fam = check_family(p, f, DEFAULT_RESIDUAL_TOL)?;
    if !fam.passed() {
        return Ok((json!({ "family": f, "family_check": fam }), 3));
    }
    let preds = predict_orbits(p, f, eps)?;
    let label = target.strip_prefix("torus-").unwrap_or(target);
    let pred = preds.iter().find(|o| o.label == label).ok_or_else(|| {
        format!("target `{target}` not among {:?}", preds.iter().map(|o| &o.label).collect::<Vec<_>>())
    })?;
    let pipe = ReductionPipeline::new(p, f)?;
    let map = ReturnMap::with_pipeline(eval_params(p, eps), &pipe, opts.integrator);
    let s = pipe.scaling.factor(eps);
    let mut out = json!({ "family": f, "eps": eps, "target": target, "predicted": pred });
    let orbit = match refine_periodic_orbit(&map, [s * pred.x[0], s * pred.x[1]], &opts.shooting) {
        Ok(o) => o,
        Err(e) => {
            out["error"] = json!(e.to_string());
            out["pass"] = json!(false);
            return Ok((out, 2));
        }
    };
    out["orbit"] = serde_json::to_value(&orbit)?;
    let mut pass = orbit.residual <= opts.shooting.accept;
    if target.starts_with("torus-") {
        let seed = [orbit.q[0] * 1.01, orbit.q[1] * 1.01];
        match detect_torus(&map, orbit.q, seed, opts.n_transient, opts.n_sample, &opts.torus) {
            Ok(ev) => {
                if let Some(path) = dump {
                    let mut t = Table::new(&["index", "X", "Z", "return_time"]);
                    for (i, (q, rt)) in ev.iterates.iter().zip(&ev.return_times).enumerate() {
                        t.push(vec![i as f64, q[0], q[1], *rt]);
                    }
                    t.write_file(path)?;
                }
                pass &= ev.verdict == TorusVerdict::Torus && ev.max_deviation <= TORUS_TOL;
                out["torus"] = serde_json::to_value(&ev)?;
            }
            Err(e) => {
                pass = false;
                out["torus"] = json!({ "error": e.to_string() });
            }
        }
    }
    out["pass"] = json!(pass);
    Ok((out, if pass { 0 } else { 2 }))
}

fn cmd_g(loaded: &Loaded, family: Option<&str>, order: usize, grid: &str) -> AnyResult<Table> {
    let f = pick_family(family, loaded)?;
    let (rs, zs) = grid.split_once(',').ok_or("grid must be rmin:rmax:n,zmin:zmax:m")?;
    let (r0, r1, n) = parse_range(rs)?;
    let (z0, z1, m) = parse_range(zs)?;
    let sys = standardize(&loaded.params, f)?;
    let g = averaged(&sys, order)?;
    let mut t = Table::new(&["r", "z", "g1", "g2"]);
    let pts = |a: f64, b: f64, k: usize| -> Vec<f64> {
        if k <= 1 {
            vec![a]
        } else {
            (0..k).map(|i| a + (b - a) * i as f64 / (k - 1) as f64).collect()
        }
    };
    for r in pts(r0, r1, n) {
        for z in pts(z0, z1, m) {
            let v = g.eval_all([r, z]);
            let last = v[order - 1];
            t.push(vec![r, z, last[0], last[1]]);
        }
    }
    Ok(t)
}

fn run(cli: Cli) -> AnyResult<u8> {
    let profile: TolProfile = cli.tol_profile.parse()?;
    let opts = RunOptions::new(profile);
    let out_dir = cli.out_dir.as_deref();
    if let Some(path) = &cli.dump_standard_form {
        let loaded = load_config(cli.config.as_deref())?;
        dump_standard_form(path, &loaded.params, pick_family(None, &loaded)?)?;
    }
    match &cli.command {
        Command::Predict { branch } => {
            let loaded = load_config(cli.config.as_deref())?;
            let (v, code) = cmd_predict(&loaded, branch)?;
            emit(out_dir, "predict.json", &(serde_json::to_string_pretty(&v)? + "\n"))?;
            Ok(code)
        }
        Command::Verify { eps, target, dump_iterates } => {
            let loaded = load_config(cli.config.as_deref())?;
            let (v, code) = cmd_verify(&loaded, &opts, parse_coefficient(eps)?, target, dump_iterates.as_deref())?;
            emit(out_dir, "verify.json", &(serde_json::to_string_pretty(&v)? + "\n"))?;
            Ok(code)
        }
        Command::G { family, order, grid } => {
            let loaded = load_config(cli.config.as_deref())?;
            let t = cmd_g(&loaded, family.as_deref(), *order, grid)?;
            emit(out_dir, "g.csv", &table_string(&t)?)?;
            Ok(0)
        }
        Command::Sweep { symbol, range, analyses, eps } => {
            let loaded = load_config(cli.config.as_deref())?;
            let (lo, hi, count) = parse_range(range)?;
            let symbol: SweepSymbol = symbol.parse()?;
            let spec = SweepSpec {
                symbol,
                lo,
                hi,
                count,
                analyses: analyses.split(',').map(str::parse).collect::<Result<Vec<Analysis>, _>>()?,
                family: pick_family(None, &loaded)?,
                eps: match eps {
                    Some(e) => parse_coefficient(e)?,
                    None if symbol == SweepSymbol::Eps => f64::NAN,
                    None => return Err("--eps is required when sweeping a coefficient".into()),
                },
            };
            let t = sweep(&spec, &loaded.params, &opts)?;
            let mut buf = Vec::new();
            t.write_to(&mut buf)?;
            emit(out_dir, "sweep.csv", &String::from_utf8(buf)?)?;
            Ok(0)
        }
        Command::Example { id } => {
            let run = run_example(*id, &opts)?;
            let dir = out_dir.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from(format!("example{id}")));
            run.write(&dir)?;
            let r = &run.report;
            eprintln!(
                "example {id}: family {} prediction {} verification {} -> {}",
                if r.family_ok { "ok" } else { "FAIL" },
                if r.prediction_ok { "ok" } else { "FAIL" },
                if r.verification_ok { "ok" } else { "FAIL" },
                dir.display()
            );
            Ok(r.exit_code() as u8)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
