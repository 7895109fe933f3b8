mod args;
mod output;

use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use serde::Serialize;
use serde_json::{json, Value};

use spinent::analysis::{derivative_minimum_scaling, ScalingStudy};
use spinent::bethe::{hf_correlators, solve_ground, BetheState, HfCorrelators};
use spinent::checks::{self, Outcome, CRITERIA};
use spinent::{degeneracy_count, sweep, Family, Lattice, SectorSet, SolverOptions, SweepSpec, SweepRow};

use args::{BetheArgs, CheckArgs, Cli, Command, FormatArg, GeometryArg, JobsArg, ModelArg, OutputArgs, ScalingArgs, SolverArgs, SpectrumArgs, SweepArgs};
use output::Meta;

const EXIT_USAGE: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;
const EXIT_CRITERIA: u8 = 3;

enum Failure {
    Usage(String),
    Numerical(String),
}

impl From<spinent::Error> for Failure {
    fn from(e: spinent::Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(format!("cannot write output: {e}"))
    }
}

type RunResult = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let code = match run(cli) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            EXIT_NUMERICAL
        }
    };
    ExitCode::from(code)
}

fn run(cli: Cli) -> RunResult {
    let start = Instant::now();
    match cli.command {
        Command::Sweep(a) => run_sweep(a, start),
        Command::Spectrum(a) => run_spectrum(a, start),
        Command::Bethe(a) => run_bethe(a, start),
        Command::Scaling(a) => run_scaling(a, start),
        Command::Check(a) => run_check(a),
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn solver_options(s: &SolverArgs) -> Result<SolverOptions, Failure> {
    if !(s.tol > 0.0 && s.tol_deg > 0.0) {
        return Err(usage("--tol and --tol-deg must be positive"));
    }
    Ok(SolverOptions { tol: s.tol, tol_deg: s.tol_deg, ..SolverOptions::default() })
}

fn solver_json(o: &SolverOptions) -> Value {
    json!({ "tol": o.tol, "tol_deg": o.tol_deg, "max_krylov": o.max_krylov, "max_restarts": o.max_restarts })
}

fn worker_pool(j: &JobsArg) -> Result<rayon::ThreadPool, Failure> {
    let jobs = j.jobs.unwrap_or_else(rayon::current_num_threads);
    if jobs == 0 {
        return Err(usage("--jobs must be at least 1"));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| usage(format!("cannot start workers: {e}")))
}

fn check_beta(model: ModelArg, beta: f64) -> Result<(), Failure> {
    if beta != 0.0 && model != ModelArg::XxzOne {
        return Err(usage("--beta only applies to --model xxz-one"));
    }
    Ok(())
}

fn model_name(m: ModelArg) -> &'static str {
    match m {
        ModelArg::XxzHalf => "xxz-half",
        ModelArg::XxzOne => "xxz-one",
        ModelArg::Blbq => "blbq",
    }
}

fn geometry_name(g: GeometryArg) -> &'static str {
    match g {
        GeometryArg::Chain => "chain",
        GeometryArg::Square => "square",
    }
}

fn path_json(p: Option<&Path>) -> Value {
    p.map_or(Value::Null, |p| Value::String(p.display().to_string()))
}

fn meta(config: Value, out: &OutputArgs, start: Instant) -> Meta {
    Meta {
        config,
        wall_clock_seconds: (!out.no_wall_clock).then(|| start.elapsed().as_secs_f64()),
    }
}

fn run_sweep(a: SweepArgs, start: Instant) -> RunResult {
    check_beta(a.model, a.beta)?;
    let options = solver_options(&a.solver)?;
    let lattices = a
        .sizes
        .iter()
        .map(|e| e.lattice(a.geometry))
        .collect::<Result<Vec<Lattice>, String>>()
        .map_err(usage)?;
    let pool = worker_pool(&a.jobs)?;
    let spec = SweepSpec { family: a.model.family(), lattices, grid: a.param, beta: a.beta, options };
    let table = pool.install(|| sweep(&spec))?;

    let config = json!({
        "command": "sweep",
        "model": model_name(a.model),
        "geometry": geometry_name(a.geometry),
        "sizes": spec.lattices.iter().map(|l| l.geometry().to_string()).collect::<Vec<_>>(),
        "param": { "start": a.param.start, "end": a.param.end, "count": a.param.count },
        "beta": a.beta,
        "solver": solver_json(&options),
        "jobs": pool.current_num_threads(),
        "format": match a.format { FormatArg::Csv => "csv", FormatArg::Json => "json" },
        "out": path_json(a.output.out.as_deref()),
    });
    let m = meta(config, &a.output, start);
    let text = match a.format {
        FormatArg::Csv => output::sweep_csv(&m, &table),
        FormatArg::Json => output::json(&m, &json!({ "rows": table.rows })),
    };
    output::emit(a.output.out.as_deref(), &text)?;

    let failed: Vec<&SweepRow> = table.failed().collect();
    if failed.is_empty() {
        Ok(0)
    } else {
        for r in &failed {
            eprintln!("failed: size {} param {}: {}", r.size, r.param, r.error.as_deref().unwrap_or(""));
        }
        Ok(EXIT_NUMERICAL)
    }
}

#[derive(Serialize)]
struct Level {
    energy: f64,
    twice_sz: i32,
}

#[derive(Serialize)]
struct Multiplet {
    energy: f64,
    multiplicity: usize,
    twice_sz: Vec<i32>,
    /// Set on the last multiplet when the level budget may have cut it short.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    may_be_truncated: bool,
}

#[derive(Serialize)]
struct Spectrum {
    levels: Vec<Level>,
    multiplets: Vec<Multiplet>,
    ground_energy: f64,
    first_excited_multiplicity: Option<usize>,
}

fn run_spectrum(a: SpectrumArgs, start: Instant) -> RunResult {
    check_beta(a.model, a.beta)?;
    let family = a.model.family();
    let param = match (family, a.delta, a.theta) {
        (Family::Blbq, None, Some(t)) => t,
        (Family::XxzHalf | Family::XxzOne, Some(d), None) => d,
        (Family::Blbq, _, _) => return Err(usage("--model blbq takes --theta (and no --delta)")),
        _ => return Err(usage("XXZ models take --delta (and no --theta)")),
    };
    if a.levels == 0 {
        return Err(usage("--levels must be at least 1"));
    }
    let options = solver_options(&a.solver)?;
    let lattice = a.size.lattice(a.geometry).map_err(usage)?;
    let model = family.model(param, a.beta);
    let set = SectorSet::new(&lattice, family.spin()).map_err(spinent::Error::from)?;
    let raw = set.lowest_levels(&model, a.levels, &options).map_err(spinent::Error::from)?;

    let energies: Vec<f64> = raw.iter().map(|l| l.0).collect();
    let counts = degeneracy_count(&energies, options.tol_deg);
    let mut multiplets = Vec::with_capacity(counts.len());
    let mut offset = 0;
    for (k, &c) in counts.iter().enumerate() {
        let slice = &raw[offset..offset + c];
        let mut twice_sz: Vec<i32> = slice.iter().map(|l| l.1).collect();
        twice_sz.sort_unstable();
        multiplets.push(Multiplet {
            energy: slice[0].0,
            multiplicity: c,
            twice_sz,
            may_be_truncated: k + 1 == counts.len() && raw.len() == a.levels,
        });
        offset += c;
    }
    let spectrum = Spectrum {
        ground_energy: energies[0],
        first_excited_multiplicity: multiplets.get(1).map(|m| m.multiplicity),
        levels: raw.iter().map(|&(energy, twice_sz)| Level { energy, twice_sz }).collect(),
        multiplets,
    };
    let config = json!({
        "command": "spectrum",
        "model": model_name(a.model),
        "geometry": geometry_name(a.geometry),
        "size": lattice.geometry().to_string(),
        "param": param,
        "beta": a.beta,
        "levels": a.levels,
        "solver": solver_json(&options),
        "format": "json",
        "out": path_json(a.output.out.as_deref()),
    });
    output::emit(a.output.out.as_deref(), &output::json(&meta(config, &a.output, start), &spectrum))?;
    Ok(0)
}

#[derive(Serialize)]
struct BetheReport {
    #[serde(flatten)]
    state: BetheState,
    hellmann_feynman: Option<HfCorrelators>,
}

fn run_bethe(a: BetheArgs, start: Instant) -> RunResult {
    if a.hf_step.is_nan() || a.hf_step <= 0.0 {
        return Err(usage("--hf-step must be positive"));
    }
    let state = solve_ground(a.size, a.delta).map_err(spinent::Error::from)?;
    let hf = hf_correlators(|d| solve_ground(a.size, d).map(|s| s.energy), a.size, a.delta, a.hf_step).ok();
    let config = json!({
        "command": "bethe",
        "size": a.size,
        "delta": a.delta,
        "hf_step": a.hf_step,
        "format": "json",
        "out": path_json(a.output.out.as_deref()),
    });
    let report = BetheReport { state, hellmann_feynman: hf };
    output::emit(a.output.out.as_deref(), &output::json(&meta(config, &a.output, start), &report))?;
    Ok(0)
}

#[derive(Serialize)]
struct ScalingReport {
    #[serde(flatten)]
    study: ScalingStudy,
    rows: Vec<SweepRow>,
}

fn run_scaling(a: ScalingArgs, start: Instant) -> RunResult {
    check_beta(a.model, a.beta)?;
    let options = solver_options(&a.solver)?;
    let lattices = a
        .sizes
        .iter()
        .map(|&n| Lattice::chain(n).map_err(|e| usage(e.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    let pool = worker_pool(&a.jobs)?;
    let spec = SweepSpec { family: a.model.family(), lattices, grid: a.param, beta: a.beta, options };
    let table = pool.install(|| sweep(&spec))?;
    if let Some(r) = table.failed().next() {
        return Err(Failure::Numerical(format!(
            "size {} at {}: {}",
            r.size,
            r.param,
            r.error.as_deref().unwrap_or("")
        )));
    }
    let study = derivative_minimum_scaling(&table, &a.sizes).map_err(spinent::Error::from)?;
    let config = json!({
        "command": "scaling",
        "model": model_name(a.model),
        "geometry": "chain",
        "sizes": a.sizes,
        "param": { "start": a.param.start, "end": a.param.end, "count": a.param.count },
        "beta": a.beta,
        "solver": solver_json(&options),
        "jobs": pool.current_num_threads(),
        "format": "json",
        "out": path_json(a.output.out.as_deref()),
    });
    let report = ScalingReport { study, rows: table.rows };
    output::emit(a.output.out.as_deref(), &output::json(&meta(config, &a.output, start), &report))?;
    Ok(0)
}

fn run_check(a: CheckArgs) -> RunResult {
    let ids: Vec<u8> = if a.criteria.is_empty() {
        CRITERIA.iter().map(|c| c.0).collect()
    } else {
        a.criteria.clone()
    };
    let pool = worker_pool(&a.jobs)?;
    let mut outcomes: Vec<Outcome> = Vec::with_capacity(ids.len());
    for id in ids {
        let outcome = pool.install(|| checks::run(id))?;
        println!("{outcome}");
        outcomes.push(outcome);
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    println!("{passed}/{} criteria passed", outcomes.len());
    if let Some(path) = &a.out {
        let text = serde_json::to_string_pretty(&outcomes).expect("outcomes are serializable");
        std::fs::write(path, text + "\n")?;
    }
    Ok(if passed == outcomes.len() { 0 } else { EXIT_CRITERIA })
}
