use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use gridroute::algorithms::{build_policy, upper_bound, PolicyId, PolicyParams};
use gridroute::analysis::{bound_report, instance_lower_bound, instance_report};
use gridroute::coloring::{
    build_bipartite, konig_decompose, schedule_from_coloring, weighted_color_exact, weighted_color_greedy,
};
use gridroute::embeddings::{square2hexagon, square2triangle, transport_routing};
use gridroute::engine::{run_policy, validate_trace_with, SimResult, Trace, ValidateOptions};
use gridroute::experiment::{default_policy, rows_to_tsv, run_sweep, ExperimentSpec};
use gridroute::grid::{ConvexSubgrid, DuplexMode, GridKind};
use gridroute::instances::{generate, Certificate, Family, FamilyParams, Instance};
use gridroute::Error;

const EXIT_VIOLATION: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_TIMEOUT: u8 = 3;

#[derive(Parser)]
#[command(name = "gridroute", version, about = "Packet routing on square, triangular and hexagonal grids")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a policy on an instance, validate the trace and check the bounds.
    Simulate(SimulateArgs),
    /// Run a TOML experiment matrix.
    Sweep {
        spec: PathBuf,
        /// One JSON object per row instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Print lower and upper bounds for parameters or an instance.
    Bounds(BoundsArgs),
    /// Write a generated instance.
    Generate {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the attached certificates as JSON.
        #[arg(long)]
        certificates: Option<PathBuf>,
    },
    /// Replay a square-grid trace on the triangular or hexagonal grid.
    Embed {
        #[arg(long, default_value = "square")]
        from: String,
        #[arg(long)]
        to: Target,
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Split an (ℓ,k) instance into matchings.
    Color {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum, default_value = "greedy")]
        method: Method,
        /// Run the matchings one after another.
        #[arg(long)]
        schedule: bool,
        #[arg(long, default_value = "full")]
        duplex: DuplexMode,
    },
    /// Check a trace file against an instance.
    Verify {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        trace: PathBuf,
        /// Defaults to the instance header.
        #[arg(long)]
        duplex: Option<DuplexMode>,
        #[arg(long, default_value_t = 1)]
        capacity: u64,
        /// Skip the hop-count check (for non-geodesic routings).
        #[arg(long)]
        any_path: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Tri,
    Hex,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Exact,
    Greedy,
    Konig,
}

/// An instance file, or generator flags.
#[derive(Args)]
struct Source {
    /// Instance file (`empty` for an instance without demands).
    #[arg(long, conflicts_with = "family")]
    instance: Option<PathBuf>,
    #[arg(long)]
    family: Option<Family>,
    #[arg(long, default_value = "tri")]
    kind: GridKind,
    #[arg(long, default_value_t = 4)]
    lmax: u64,
    #[arg(long, default_value_t = 8)]
    size: i64,
    #[arg(long, default_value_t = 1)]
    l: u64,
    #[arg(long, default_value_t = 1)]
    k: u64,
    #[arg(long, default_value_t = 2)]
    r: i64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl Source {
    fn params(&self) -> FamilyParams {
        FamilyParams {
            kind: self.kind,
            size: self.size,
            l_max: self.lmax,
            l: self.l,
            k: self.k,
            r: self.r,
            seed: self.seed,
        }
    }

    fn load(&self) -> Result<(Instance, Vec<Certificate>), Fail> {
        match (&self.instance, self.family) {
            (Some(p), _) if p.as_os_str() == "empty" && !p.exists() => {
                Ok((Instance::empty(ConvexSubgrid::rect(GridKind::Square, 0, 0, 1, 1)), Vec::new()))
            }
            (Some(p), _) => Ok((read_instance(p)?, Vec::new())),
            (None, Some(f)) => {
                let g = generate(f, &self.params())?;
                Ok((g.instance, g.certificates))
            }
            (None, None) => Err(Fail::usage("give --instance or --family")),
        }
    }
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    source: Source,
    /// Defaults to the family's policy, or the permutation / (ℓ,k) policy of the grid.
    #[arg(long)]
    policy: Option<PolicyId>,
    #[arg(long)]
    duplex: Option<DuplexMode>,
    #[arg(long, env = "GRIDROUTE_MAX_STEPS")]
    max_steps: Option<u64>,
    /// Write the trace here.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// JSON-lines trace instead of text.
    #[arg(long)]
    json_trace: bool,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long, conflicts_with_all = ["kind", "lmax"])]
    instance: Option<PathBuf>,
    #[arg(long)]
    kind: Option<GridKind>,
    #[arg(long, default_value_t = 1)]
    l: u64,
    #[arg(long, default_value_t = 1)]
    k: u64,
    #[arg(long)]
    lmax: Option<u64>,
    #[arg(long, default_value = "full")]
    duplex: DuplexMode,
}

struct Fail {
    code: u8,
    msg: String,
}

impl Fail {
    fn usage(msg: impl Into<String>) -> Self {
        Fail { code: EXIT_USAGE, msg: msg.into() }
    }
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::PolicyConflict { .. } => EXIT_VIOLATION,
            _ => EXIT_USAGE,
        };
        Fail { code, msg: e.to_string() }
    }
}

fn read(path: &Path) -> Result<String, Fail> {
    fs::read_to_string(path).map_err(|e| Fail::usage(format!("{}: {e}", path.display())))
}

fn read_instance(path: &Path) -> Result<Instance, Fail> {
    Instance::parse(&read(path)?).map_err(|e| Fail::usage(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Fail> {
    fs::write(path, text).map_err(|e| Fail::usage(format!("{}: {e}", path.display())))
}

fn print(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn result_json(r: &SimResult, kind: GridKind) -> Value {
    let top: Vec<Value> = r
        .top_arcs(10)
        .into_iter()
        .map(|((a, b), c)| json!({"from": a.format(kind), "to": b.format(kind), "count": c}))
        .collect();
    json!({
        "completion_time": r.completion_time,
        "delivered": r.delivered,
        "max_queue": r.max_queue,
        "total_hops": r.total_hops(),
        "top_arcs": top,
    })
}

fn simulate(a: SimulateArgs) -> Result<u8, Fail> {
    let (inst, certs) = a.source.load()?;
    let kind = inst.kind();
    let duplex = a.duplex.unwrap_or(inst.duplex);
    let policy_id = a.policy.unwrap_or_else(|| match a.source.family {
        Some(f) => default_policy(f, kind, duplex),
        None if inst.is_permutation() => PolicyId::permutation(kind, duplex),
        None => PolicyId::LkGeneral,
    });
    let params = PolicyParams {
        l: Some(inst.limits.0 as u64),
        k: Some(inst.limits.1 as u64),
        r: a.source.family.map(|_| a.source.r),
    };
    let policy = build_policy(policy_id, &params, kind, duplex)?;
    let max_steps = a.max_steps.unwrap_or_else(|| inst.default_max_steps());
    if max_steps == 0 {
        return Err(Fail::usage("--max-steps must be positive"));
    }
    let (res, trace) = run_policy(&inst, policy.as_ref(), duplex, max_steps)?;
    let violations = validate_trace_with(&inst, &ValidateOptions { duplex, shortest_path: true, capacity: 1 }, &trace);
    let lb = instance_lower_bound(&inst, duplex, policy.canonical_paths(), &certs);
    let ub = upper_bound(policy_id, &params, &inst, duplex);
    let t = res.completion_time;
    let within = lb <= t && ub.is_none_or(|u| t <= u);

    if let Some(path) = &a.trace {
        let text = if a.json_trace { trace.to_json_lines(kind, Some(&res)) } else { trace.to_text(kind, Some(&res)) };
        write(path, &text)?;
    }
    print(&json!({
        "params": {
            "family": a.source.family.map(|f| f.to_string()),
            "instance": a.source.instance.as_ref().map(|p| p.display().to_string()),
            "kind": kind.to_string(),
            "duplex": duplex.to_string(),
            "policy": policy.name(),
            "limits": [inst.limits.0, inst.limits.1],
            "l_max": inst.l_max(),
            "packets": inst.demands.len(),
            "seed": a.source.seed,
            "max_steps": max_steps,
        },
        "result": result_json(&res, kind),
        "bounds": {"lb": lb, "ub": ub, "satisfied": within},
        "violations": violations.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
    }));
    if !res.delivered {
        eprintln!("timeout after {max_steps} steps");
        return Ok(EXIT_TIMEOUT);
    }
    Ok(if violations.is_empty() && within { 0 } else { EXIT_VIOLATION })
}

fn sweep(spec: &Path, as_json: bool) -> Result<u8, Fail> {
    let spec = ExperimentSpec::parse(&read(spec)?)?;
    let rows = run_sweep(&spec)?;
    if as_json {
        for r in &rows {
            let mut v = serde_json::to_value(r).expect("serializable");
            v["ok"] = json!(r.ok());
            println!("{v}");
        }
    } else {
        print!("{}", rows_to_tsv(&rows));
    }
    for r in rows.iter().filter(|r| !r.ok()) {
        eprintln!("cell {}: {}", r.cell.index, r.error.as_deref().unwrap_or("bound or validity check failed"));
    }
    Ok(if rows.iter().all(|r| r.ok()) { 0 } else { EXIT_VIOLATION })
}

fn bounds(a: BoundsArgs) -> Result<u8, Fail> {
    let report = match (&a.instance, a.kind, a.lmax) {
        (Some(p), _, _) => instance_report(&read_instance(p)?, a.duplex, None)?,
        (None, Some(kind), Some(lmax)) => {
            if a.l == 0 || a.k == 0 || lmax == 0 {
                return Err(Fail::usage("--l, --k and --lmax must be positive"));
            }
            bound_report(kind, a.l, a.k, lmax, a.duplex)
        }
        _ => return Err(Fail::usage("give --instance, or --kind with --lmax")),
    };
    print(&serde_json::to_value(report).expect("serializable"));
    Ok(0)
}

fn generate_cmd(source: Source, out: Option<PathBuf>, certs: Option<PathBuf>) -> Result<u8, Fail> {
    let (inst, certificates) = source.load()?;
    let text = inst.serialize();
    match out {
        Some(p) => write(&p, &text)?,
        None => print!("{text}"),
    }
    if let Some(p) = certs {
        write(&p, &serde_json::to_string_pretty(&certificates).expect("serializable"))?;
    }
    Ok(0)
}

fn embed(from: &str, to: Target, instance: &Path, trace: &Path, out: Option<PathBuf>) -> Result<u8, Fail> {
    if !matches!(from, "square" | "sq") {
        return Err(Fail::usage("only --from square is supported"));
    }
    let inst = read_instance(instance)?;
    let (kind, tr) = Trace::parse(&read(trace)?)?;
    if kind.is_some_and(|k| k != GridKind::Square) {
        return Err(Fail::usage("the trace is not a square-grid trace"));
    }
    let (emb, capacity) = match to {
        Target::Tri => (square2triangle(), 1),
        Target::Hex => (square2hexagon(), 2),
    };
    let (target, moved) = transport_routing(&emb, &inst, &tr)?;
    let opts = ValidateOptions { duplex: DuplexMode::Full, shortest_path: false, capacity };
    let violations = validate_trace_with(&target, &opts, &moved);
    if let Some(p) = out {
        write(&p, &moved.to_text(emb.target, None))?;
    }
    print(&json!({
        "from": "square",
        "to": emb.target.to_string(),
        "source_steps": tr.len(),
        "target_steps": moved.len(),
        "capacity": capacity,
        "violations": violations.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
    }));
    Ok(if violations.is_empty() { 0 } else { EXIT_VIOLATION })
}

fn color(instance: &Path, method: Method, schedule: bool, duplex: DuplexMode) -> Result<u8, Fail> {
    let inst = read_instance(instance)?;
    let g = build_bipartite(&inst);
    let c = match method {
        Method::Exact => weighted_color_exact(&g)?,
        Method::Greedy => weighted_color_greedy(&g),
        Method::Konig => konig_decompose(&g),
    };
    let kind = inst.kind();
    let matchings: Vec<Value> = c
        .matchings
        .iter()
        .zip(c.costs(&g))
        .map(|(m, cost)| {
            let demands: Vec<String> = m
                .iter()
                .map(|&e| {
                    format!("{} -> {}", inst.demands[e].origin.format(kind), inst.demands[e].destination.format(kind))
                })
                .collect();
            json!({"cost": cost, "demands": demands})
        })
        .collect();
    let mut out = json!({
        "delta": g.max_degree(),
        "edges": g.edges.len(),
        "objective": c.objective(&g),
        "matchings": matchings,
    });
    let mut code = 0;
    if schedule {
        let s = schedule_from_coloring(&inst, &c, duplex, None)?;
        out["schedule"] = json!({
            "per_matching": s.per_matching,
            "result": result_json(&s.result, kind),
        });
        if !s.result.delivered {
            code = EXIT_TIMEOUT;
        }
    }
    print(&out);
    Ok(code)
}

fn verify(
    instance: &Path,
    trace: &Path,
    duplex: Option<DuplexMode>,
    capacity: u64,
    any_path: bool,
) -> Result<u8, Fail> {
    let inst = read_instance(instance)?;
    let (kind, tr) = Trace::parse(&read(trace)?)?;
    if kind.is_some_and(|k| k != inst.kind()) {
        return Err(Fail::usage("trace and instance use different grids"));
    }
    let opts = ValidateOptions { duplex: duplex.unwrap_or(inst.duplex), shortest_path: !any_path, capacity };
    let violations = validate_trace_with(&inst, &opts, &tr);
    for v in &violations {
        println!("{v}");
    }
    if violations.is_empty() {
        println!("ok: {} steps, no violations", tr.len());
        Ok(0)
    } else {
        Ok(EXIT_VIOLATION)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Sweep { spec, json } => sweep(&spec, json),
        Command::Bounds(a) => bounds(a),
        Command::Generate { source, out, certificates } => generate_cmd(source, out, certificates),
        Command::Embed { from, to, instance, trace, out } => embed(&from, to, &instance, &trace, out),
        Command::Color { instance, method, schedule, duplex } => color(&instance, method, schedule, duplex),
        Command::Verify { instance, trace, duplex, capacity, any_path } => {
            verify(&instance, &trace, duplex, capacity, any_path)
        }
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
