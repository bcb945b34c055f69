//! `pdgsem` command-line front end.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value as Json};

use pdgsem::cfg::{cfg_run, parse_cfg, parse_store, Cfg, ParseError, Store, Verdict};
use pdgsem::dependence::analyze;
use pdgsem::determinism::check_dpdg;
use pdgsem::exec::{run_machine, PdgMachine, PdgVerdict, Strategy};
use pdgsem::harness::{
    audit_run, check_confluence, check_equivalence_with, explore_machine, fuzz_campaign,
    ExploreLimits, ExploreVerdict, FuzzParams, GenParams,
};
use pdgsem::node::{fmt_path, fmt_set, NodeId};
use pdgsem::pdg::{
    mca, pdg_from_analysis, pdg_to_dot, EdgeKey, McaError, Pdg, SubgraphMode, Subgraphs,
};

#[derive(Parser)]
#[command(
    name = "pdgsem",
    version,
    about = "Build, check and execute program dependence graphs"
)]
struct Cli {
    /// Emit a single JSON document instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse and validate a program.
    Check { file: PathBuf },
    /// Print control, data and def-order dependences.
    Deps { file: PathBuf },
    /// Print the PDG, a subgraph or an mca set.
    Pdg(PdgArgs),
    /// Run the program sequentially.
    RunCfg {
        file: PathBuf,
        #[command(flatten)]
        init: InitArgs,
        #[arg(long, default_value_t = 10_000)]
        bound: usize,
        /// Print every step with its store.
        #[arg(long)]
        trace: bool,
    },
    /// Run the PDG as a dataflow machine.
    RunPdg {
        file: PathBuf,
        #[command(flatten)]
        init: InitArgs,
        #[arg(long, value_enum, default_value_t = StrategyArg::MinId)]
        strategy: StrategyArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        bound: usize,
        #[arg(long)]
        trace: bool,
        /// Check the concurrency invariants at every visited state.
        #[arg(long)]
        audit: bool,
    },
    /// Explore every interleaving of a PDG run.
    Explore {
        file: PathBuf,
        #[command(flatten)]
        init: InitArgs,
        #[arg(long, default_value_t = 100_000)]
        max_states: usize,
        #[arg(long, default_value_t = 10_000)]
        max_depth: usize,
    },
    /// Check whether the PDG is deterministic.
    Dpdg { file: PathBuf },
    /// Compare the CFG and PDG interpreters.
    Equiv {
        file: PathBuf,
        #[command(flatten)]
        init: InitArgs,
        #[arg(long, default_value_t = 10_000)]
        bound: usize,
    },
    /// Differential testing over random programs.
    Fuzz {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 12)]
        max_nodes: usize,
    },
}

#[derive(Args)]
struct PdgArgs {
    file: PathBuf,
    /// Write Graphviz output to this file.
    #[arg(long, value_name = "OUT")]
    dot: Option<PathBuf>,
    #[arg(long, value_name = "NODE", requires = "mode")]
    subgraph: Option<NodeId>,
    /// G, GT, GF, GS, GTS or GFS.
    #[arg(long, value_name = "M", requires = "subgraph")]
    mode: Option<SubgraphMode>,
    #[arg(long, num_args = 2, value_names = ["P", "Q"])]
    mca: Option<Vec<NodeId>>,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct InitArgs {
    /// Initial store, e.g. `x=1,b=T`.
    #[arg(long, value_name = "S")]
    init: Option<String>,
    /// File with one binding per line.
    #[arg(long, value_name = "FILE")]
    init_file: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    MinId,
    Random,
}

enum Failure {
    /// Bad input: exit 2.
    Usage(String),
    /// A check did not pass: exit 1.
    Check,
    /// A bound or limit was hit: exit 3.
    Limit,
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = cli.json;
    let out = match cli.cmd {
        Cmd::Check { file } => check(&file, json),
        Cmd::Deps { file } => deps(&file, json),
        Cmd::Pdg(args) => pdg_cmd(args, json),
        Cmd::RunCfg {
            file,
            init,
            bound,
            trace,
        } => run_cfg(&file, &init, bound, trace, json),
        Cmd::RunPdg {
            file,
            init,
            strategy,
            seed,
            bound,
            trace,
            audit,
        } => {
            let strategy = match strategy {
                StrategyArg::MinId => Strategy::MinId,
                StrategyArg::Random => Strategy::Random(seed),
            };
            run_pdg(&file, &init, strategy, bound, trace, audit, json)
        }
        Cmd::Explore {
            file,
            init,
            max_states,
            max_depth,
        } => explore(
            &file,
            &init,
            ExploreLimits {
                max_states,
                max_depth,
            },
            json,
        ),
        Cmd::Dpdg { file } => dpdg(&file, json),
        Cmd::Equiv { file, init, bound } => equiv(&file, &init, bound, json),
        Cmd::Fuzz {
            seed,
            count,
            max_nodes,
        } => fuzz(seed, count, max_nodes, json),
    };
    match out {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Limit) => ExitCode::from(3),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Cfg, Failure> {
    parse_cfg(&read(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_store(cfg: &Cfg, init: &InitArgs) -> Result<Store, Failure> {
    let text = match (&init.init, &init.init_file) {
        (Some(s), _) => s.clone(),
        (None, Some(f)) => read(f)?,
        (None, None) => unreachable!("clap requires one of --init and --init-file"),
    };
    let bindings = parse_store(&text).map_err(Failure::Usage)?;
    Store::for_cfg(cfg, bindings).map_err(|e| Failure::Usage(e.to_string()))
}

fn print_json(v: &impl serde::Serialize) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn build(cfg: &Cfg) -> Pdg {
    pdg_from_analysis(cfg, &analyze(cfg))
}

fn mca_failure(e: McaError) -> Failure {
    eprintln!("error: {e}");
    Failure::Limit
}

fn check(file: &Path, json: bool) -> Outcome {
    let text = read(file)?;
    let cfg = match parse_cfg(&text) {
        Ok(cfg) => cfg,
        Err(ParseError::Invalid(violations)) => {
            let msgs: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
            if json {
                print_json(&json!({ "valid": false, "violations": msgs }));
            } else {
                for m in &msgs {
                    println!("INVALID {m}");
                }
            }
            return Err(Failure::Check);
        }
        Err(e) => return Err(Failure::Usage(format!("{}: {e}", file.display()))),
    };
    let start = cfg.start().expect("valid program");
    let ret = cfg.ret_node().expect("valid program");
    if json {
        print_json(&json!({
            "valid": true,
            "nodes": cfg.nodes().len(),
            "edges": cfg.edges().len(),
            "start": start,
            "ret": ret,
            "variables": cfg.variables(),
        }));
    } else {
        println!(
            "OK nodes={} edges={} start={start} ret={ret} vars={}",
            cfg.nodes().len(),
            cfg.edges().len(),
            cfg.variables().into_iter().collect::<Vec<_>>().join(",")
        );
    }
    Ok(())
}

fn deps(file: &Path, json: bool) -> Outcome {
    let cfg = load(file)?;
    let d = analyze(&cfg).deps;
    if json {
        let cd: Vec<Json> = d.cd.iter().map(|(s, t, l)| json!([s, t, l])).collect();
        let lidd: Vec<Json> = d.lidd.iter().map(|(s, t, x)| json!([s, t, x])).collect();
        let lcdd: Vec<Json> = d.lcdd.iter().map(|(s, t, x)| json!([s, t, x])).collect();
        let def_order: Vec<Json> = d.def_order.iter().map(|(s, t)| json!([s, t])).collect();
        print_json(&json!({ "cd": cd, "lidd": lidd, "lcdd": lcdd, "def_order": def_order }));
        return Ok(());
    }
    for (s, t, l) in &d.cd {
        println!("CD {s} {t} {l}");
    }
    for (s, t, x) in &d.lidd {
        println!("LIDD {s} {t} {x}");
    }
    for (s, t, x) in &d.lcdd {
        println!("LCDD {s} {t} {x}");
    }
    for (s, t) in &d.def_order {
        println!("DEFORD {s} {t}");
    }
    Ok(())
}

fn edge_line(e: &EdgeKey) -> String {
    match e {
        EdgeKey::Control { src, dst, label } => format!("C {src} {dst} {label}"),
        EdgeKey::Flow { src, dst, var } => format!("F {src} {dst} {var}"),
        EdgeKey::Carried { src, dst, var } => format!("L {src} {dst} {var}"),
        EdgeKey::DefOrder { src, dst } => format!("D {src} {dst}"),
    }
}

fn pdg_cmd(args: PdgArgs, json: bool) -> Outcome {
    let cfg = load(&args.file)?;
    let pdg = build(&cfg);
    if let Some(out) = &args.dot {
        fs::write(out, pdg_to_dot(&pdg))
            .map_err(|e| Failure::Usage(format!("{}: {e}", out.display())))?;
    }
    let check_node = |n: NodeId| {
        if pdg.stmt(n).is_some() || n == NodeId::Entry {
            Ok(n)
        } else {
            Err(Failure::Usage(format!("node {n} is not in the program")))
        }
    };
    let mut doc = serde_json::Map::new();
    let mut selected = false;
    if let (Some(n), Some(mode)) = (args.subgraph, args.mode) {
        selected = true;
        let set = Subgraphs::new(&pdg).get(check_node(n)?, mode).clone();
        if json {
            doc.insert(
                "subgraph".into(),
                json!({ "node": n, "mode": mode.to_string(), "nodes": set }),
            );
        } else {
            println!("{}", fmt_set(&set));
        }
    }
    if let Some(pq) = &args.mca {
        selected = true;
        let (p, q) = (check_node(pq[0])?, check_node(pq[1])?);
        let set = mca(&pdg, p, q).map_err(mca_failure)?;
        if json {
            doc.insert("mca".into(), json!({ "p": p, "q": q, "nodes": set }));
        } else {
            println!("{}", fmt_set(&set));
        }
    }
    if !selected && args.dot.is_none() {
        let lines: Vec<String> = pdg.edges().iter().map(edge_line).collect();
        if json {
            doc.insert("edges".into(), json!(pdg.edges()));
        } else {
            for l in lines {
                println!("{l}");
            }
        }
    }
    if json {
        if let Some(out) = &args.dot {
            doc.insert("dot".into(), json!(out.display().to_string()));
        }
        print_json(&doc);
    }
    Ok(())
}

fn run_cfg(file: &Path, init: &InitArgs, bound: usize, trace: bool, json: bool) -> Outcome {
    let cfg = load(file)?;
    let store = load_store(&cfg, init)?;
    let t = cfg_run(&cfg, &store, bound);
    if json {
        if trace {
            print_json(&t);
        } else {
            print_json(&json!({
                "verdict": t.verdict,
                "returned": t.returned,
                "steps": t.steps.len(),
                "final_store": t.final_store,
            }));
        }
    } else {
        if trace {
            for (i, (n, s)) in t.steps.iter().enumerate() {
                println!("step {i}: exec {n}; store {}", fmt_store(s));
            }
        }
        match &t.verdict {
            Verdict::Terminated => println!("terminated after {} steps", t.steps.len()),
            Verdict::BoundExceeded => println!("bound of {bound} steps exceeded"),
            Verdict::RuntimeError(e) => println!("runtime error: {e}"),
        }
        if let Some(v) = t.returned {
            println!("returned {v}");
        }
        println!("store {}", fmt_store(&t.final_store));
    }
    match t.verdict {
        Verdict::Terminated => Ok(()),
        Verdict::BoundExceeded => Err(Failure::Limit),
        Verdict::RuntimeError(_) => Err(Failure::Check),
    }
}

fn fmt_store(s: &Store) -> String {
    let items: Vec<String> = s
        .bindings()
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect();
    items.join(",")
}

fn run_pdg(
    file: &Path,
    init: &InitArgs,
    strategy: Strategy,
    bound: usize,
    trace: bool,
    audit: bool,
    json: bool,
) -> Outcome {
    let cfg = load(file)?;
    let store = load_store(&cfg, init)?;
    let pdg = build(&cfg);
    let machine = PdgMachine::new(&pdg);
    let run = run_machine(&machine, &store, strategy, bound)
        .map_err(|e| Failure::Usage(e.to_string()))?;
    let report = if audit {
        let dpdg = check_dpdg(&pdg).map_err(mca_failure)?;
        Some(audit_run(&machine, &run, &dpdg))
    } else {
        None
    };
    if json {
        let mut doc = json!({
            "strategy": strategy,
            "verdict": run.verdict,
            "returned": run.returned,
            "ret_executions": run.ret_executions,
            "order": run.order,
        });
        if trace {
            doc["next_sets"] = json!(run.next_sets);
        }
        if let Some(r) = &report {
            doc["audit"] = json!(r);
        }
        print_json(&doc);
    } else {
        if trace {
            for (i, (n, next)) in run.order.iter().zip(&run.next_sets).enumerate() {
                println!("step {i}: exec {n}; Next was {}", fmt_set(next));
            }
        }
        match &run.verdict {
            PdgVerdict::Quiescent => println!("quiescent after {} steps", run.order.len()),
            PdgVerdict::Stuck => {
                println!("stuck after {} steps: ret never executed", run.order.len())
            }
            PdgVerdict::BoundExceeded => println!("bound of {bound} steps exceeded"),
            PdgVerdict::RuntimeError(e) => println!("runtime error: {e}"),
        }
        if let Some(v) = run.returned {
            println!("returned {v}");
        }
        if let Some(r) = &report {
            println!(
                "audit states={} pairs={} diamonds={} failures={}",
                r.states,
                r.pairs,
                r.diamonds,
                r.failures.len()
            );
            for f in &r.failures {
                println!(
                    "AUDIT {} p={} q={} after [{}]: {}",
                    json!(f.check).as_str().unwrap_or_default(),
                    f.p,
                    f.q,
                    fmt_path(&f.path),
                    f.detail
                );
            }
        }
    }
    match run.verdict {
        PdgVerdict::BoundExceeded => Err(Failure::Limit),
        PdgVerdict::Stuck | PdgVerdict::RuntimeError(_) => Err(Failure::Check),
        PdgVerdict::Quiescent if report.is_some_and(|r| !r.passed()) => Err(Failure::Check),
        PdgVerdict::Quiescent => Ok(()),
    }
}

fn explore(file: &Path, init: &InitArgs, limits: ExploreLimits, json: bool) -> Outcome {
    let cfg = load(file)?;
    let store = load_store(&cfg, init)?;
    let pdg = build(&cfg);
    let dpdg = check_dpdg(&pdg).map_err(mca_failure)?;
    let machine = PdgMachine::new(&pdg);
    let e = explore_machine(&machine, &store, limits).map_err(|e| Failure::Usage(e.to_string()))?;
    let confluence = check_confluence(&e, &dpdg);
    if json {
        print_json(&json!({
            "deterministic": dpdg.is_deterministic(),
            "exploration": e,
            "final_states": e.final_states().len(),
            "returned": e.returned_values(),
            "confluence": confluence,
        }));
    } else {
        let verdict = match e.verdict {
            ExploreVerdict::Complete => "complete",
            ExploreVerdict::StateLimit => "state limit reached",
            ExploreVerdict::DepthLimit => "depth limit reached",
        };
        println!(
            "{verdict}: {} states, {} transitions",
            e.states, e.transitions
        );
        let returned: Vec<String> = e.returned_values().iter().map(|v| v.to_string()).collect();
        println!("returned {{{}}}", returned.join(", "));
        println!(
            "final states {} ({} stuck runs)",
            e.final_states().len(),
            e.stuck.len()
        );
        let lengths: Vec<String> = e
            .run_lengths
            .iter()
            .map(|(k, n)| format!("{k}:{n}"))
            .collect();
        println!("run lengths {}", lengths.join(" "));
        println!("confluence {:?}", confluence.verdict);
        for f in &e.errors {
            println!(
                "ERROR at {} after [{}]: {}",
                f.node,
                fmt_path(&f.path),
                f.error
            );
        }
    }
    if !e.is_complete() {
        Err(Failure::Limit)
    } else if !e.errors.is_empty() {
        Err(Failure::Check)
    } else {
        Ok(())
    }
}

fn dpdg(file: &Path, json: bool) -> Outcome {
    let cfg = load(file)?;
    let report = check_dpdg(&build(&cfg)).map_err(mca_failure)?;
    if json {
        print_json(&report);
    } else if report.is_deterministic() {
        println!("DETERMINISTIC");
    } else {
        for v in &report.violations {
            println!("{v}");
        }
    }
    if report.is_deterministic() {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn equiv(file: &Path, init: &InitArgs, bound: usize, json: bool) -> Outcome {
    let cfg = load(file)?;
    let store = load_store(&cfg, init)?;
    let (r, _) = check_equivalence_with(&cfg, &store, bound, ExploreLimits::default());
    if json {
        print_json(&r);
    } else {
        let leg = |name: &str, l: &pdgsem::harness::Leg| match l {
            pdgsem::harness::Leg::Pass => println!("{name}: pass"),
            pdgsem::harness::Leg::Fail(d) => println!("{name}: FAIL {d}"),
            pdgsem::harness::Leg::Skipped(d) => println!("{name}: skipped ({d})"),
        };
        match r.cfg_returned {
            Some(v) => println!("cfg returned {v} after {} steps", r.cfg_steps),
            None => println!("cfg returned nothing after {} steps", r.cfg_steps),
        }
        leg("guided", &r.guided);
        leg("runs", &r.runs);
        if let Some(m) = r.method {
            println!(
                "compared {} runs by {m:?}, {} mismatches, {} stuck",
                r.compared, r.mismatches, r.stuck
            );
        }
    }
    if r.failed() {
        Err(Failure::Check)
    } else if r.skipped() {
        if matches!(&r.guided, pdgsem::harness::Leg::Skipped(d) if d.contains("bound")) {
            Err(Failure::Limit)
        } else {
            Err(Failure::Check)
        }
    } else {
        Ok(())
    }
}

fn fuzz(seed: u64, count: usize, max_nodes: usize, json: bool) -> Outcome {
    if max_nodes < 2 {
        return Err(Failure::Usage("--max-nodes must be at least 2".to_string()));
    }
    let params = FuzzParams {
        generator: GenParams {
            max_nodes,
            ..GenParams::default()
        },
        ..FuzzParams::default()
    };
    let report = fuzz_campaign(seed, count, &params);
    if json {
        print_json(&report);
    } else {
        let t = &report.totals;
        println!("programs {}", t.programs);
        println!("deterministic {}", t.deterministic);
        println!("cfg condition violations {}", t.cfg_condition_violations);
        println!("static failures {}", t.static_failures);
        println!("terminated {}", t.terminated);
        println!("guided pass {} fail {}", t.guided_pass, t.guided_fail);
        println!(
            "runs pass {} fail {} (stuck {})",
            t.runs_pass, t.runs_fail, t.stuck_runs
        );
        println!(
            "explorations complete {} limited {}",
            t.explorations_complete, t.explorations_limited
        );
        println!(
            "confluence pass {} fail {} alarms {}",
            t.confluence_pass, t.confluence_fail, t.confluence_alarms
        );
        println!("audits {} failures {}", t.audits, t.audit_failures);
        for p in &report.programs {
            let mut problems: BTreeSet<String> = p.cfg_conditions.iter().cloned().collect();
            problems.extend(p.static_failures.iter().cloned());
            if let Some(eq) = &p.equivalence {
                if let pdgsem::harness::Leg::Fail(d) = &eq.guided {
                    problems.insert(format!("guided: {d}"));
                }
                if let pdgsem::harness::Leg::Fail(d) = &eq.runs {
                    problems.insert(format!("runs: {d}"));
                }
            }
            if p.confluence.as_ref().is_some_and(|c| c.alarm) {
                problems.insert("confluence alarm".to_string());
            }
            if let Some(n) = p.audit_failures.filter(|&n| n > 0) {
                problems.insert(format!("{n} audit failures"));
            }
            for m in problems {
                println!("FAIL program {} seed {}: {m}", p.index, p.seed);
            }
        }
    }
    if report.clean() {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}
