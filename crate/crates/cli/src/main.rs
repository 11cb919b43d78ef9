//! `keller`: validate, analyze and enumerate cube tilings and box families.
//!
//! Exit codes: 0 success, 1 property failure, 2 input error, 3 budget
//! exceeded, 4 theorem violation.

mod input;
mod report;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use keller_core::enumeration::{analyze_tiling, census_with_tilings, enumerate_tilings, BoundKind, CSV_HEADER};
use keller_core::hat::{gamma1_violations, hat_measure, suits_equivalent_with_cap, verify_box_count, Exact, HatSpace, DEFAULT_MATERIALIZE_CAP};
use keller_core::keller::{c_stats, is_keller_family, is_partition_of_x, keller_pair, theorem_b_report, BoxFamilyDoc};
use keller_core::multipile::{build_multipile, is_multipile, max_extremal_p_value};
use keller_core::torus::{check_tiling, laminated_construction, p_params, to_box_family};
use keller_core::verify::{Suite, VerifyConfig};
use keller_core::{BoxFamily, Error as CoreError, SearchOptions, Symmetry, TorusTiling};
use serde_json::{json, Value};

use input::{Construction, Input, InputError};
use report::{Format, RunConfig};

const DEFAULT_SEED: u64 = 0x6b656c6c6572;

#[derive(Parser)]
#[command(name = "keller", version, about = "Keller packings, multipiles and cube tilings of tori")]
struct Cli {
    /// Report format; csv is available for `census` and `verify`.
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// Worker threads for searches (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Seed for randomized property sweeps.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Largest cell grid a search may take on.
    #[arg(long, global = true, env = "KELLER_CELL_BUDGET", default_value_t = keller_core::enumeration::DEFAULT_CELL_BUDGET)]
    cell_budget: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that a tiling covers its torus exactly once, or that a box
    /// family satisfies Keller's condition.
    Validate { path: PathBuf },
    /// Report p, c, the bound and the multipile verdict.
    Analyze {
        path: PathBuf,
        /// Exit 1 unless the input has this property.
        #[arg(long, value_enum)]
        expect: Option<Expect>,
    },
    /// Stream the canonical tilings of a torus as JSON lines.
    Enumerate {
        #[command(flatten)]
        torus: TorusArgs,
        /// Write to a file instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate p over all canonical tilings of a torus.
    Census {
        #[command(flatten)]
        torus: TorusArgs,
        /// Also write every tiling with its analysis as JSON lines.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Run the acceptance criteria.
    Verify {
        /// Criteria to run (default: all nine).
        #[arg(long = "criterion", value_parser = clap::value_parser!(u8).range(1..=9))]
        criteria: Vec<u8>,
        #[arg(long, default_value_t = VerifyConfig::default().random_families)]
        random_families: usize,
        #[arg(long, default_value_t = VerifyConfig::default().suit_pairs)]
        suit_pairs: usize,
    },
    /// Build a box family from a multipile tree, or a tiling from a
    /// lamination recipe.
    BuildMultipile {
        path: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check hat disjointness and the measure identity; with `--against`,
    /// compare two families as suits.
    ///
    /// Suit comparison materializes the product over the referenced
    /// partitions when it has at most `--cap` points and otherwise compares
    /// measures of the hat unions by inclusion-exclusion.
    HatCheck {
        path: PathBuf,
        #[arg(long)]
        against: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_MATERIALIZE_CAP)]
        cap: u64,
    },
}

#[derive(Args)]
struct TorusArgs {
    /// Cube side lengths, one per axis.
    #[arg(long, value_delimiter = ',', required = true)]
    m: Vec<usize>,
    /// Offset resolution: one value for all axes or one per axis
    /// (default: product of m).
    #[arg(long, value_delimiter = ',')]
    q: Option<Vec<usize>>,
    /// `all`, `none`, or a list of t (translations), p (permutations),
    /// r (reflections).
    #[arg(long, default_value = "all")]
    symmetry: String,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Expect {
    /// `c(G) = |G| - 1`.
    Equality,
    Multipile,
    /// `p(T)` equals the bound (tilings only).
    Bound,
}

/// Success or property failure; errors carry the other exit codes.
enum Status {
    Ok,
    Failed,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if cause.is::<InputError>() || cause.is::<std::io::Error>() {
            return 2;
        }
        if let Some(err) = cause.downcast_ref::<CoreError>() {
            return match err {
                CoreError::BudgetExceeded { .. } => 3,
                CoreError::TheoremViolation(_) => 4,
                _ => 2,
            };
        }
    }
    2
}

impl Cli {
    fn config(&self, command: &'static str) -> RunConfig {
        RunConfig {
            command,
            inputs: Vec::new(),
            m: None,
            q: None,
            symmetry: None,
            cell_budget: self.cell_budget,
            seed: self.seed,
            format: self.format,
            expect: None,
            materialize_cap: None,
            criteria: None,
        }
    }

    fn options(&self, symmetry: Symmetry) -> SearchOptions {
        SearchOptions { symmetry, cell_budget: self.cell_budget, jobs: self.jobs }
    }
}

fn run(cli: &Cli) -> anyhow::Result<Status> {
    if cli.cell_budget == 0 || cli.jobs == Some(0) {
        return Err(InputError("cell budget and jobs must be positive".into()).into());
    }
    let csv_ok = matches!(cli.command, Command::Census { .. } | Command::Verify { .. });
    if cli.format == Format::Csv && !csv_ok {
        return Err(InputError("csv output is available for census and verify only".into()).into());
    }
    match &cli.command {
        Command::Validate { path } => validate(cli, path),
        Command::Analyze { path, expect } => analyze(cli, path, *expect),
        Command::Enumerate { torus, out } => enumerate(cli, torus, out.as_deref()),
        Command::Census { torus, dump } => census(cli, torus, dump.as_deref()),
        Command::Verify { criteria, random_families, suit_pairs } => verify(cli, criteria, *random_families, *suit_pairs),
        Command::BuildMultipile { path, out } => build(path, out.as_deref()),
        Command::HatCheck { path, against, cap } => hat_check(cli, path, against.as_deref(), *cap),
    }
}

fn print(text: &str) -> anyhow::Result<()> {
    let mut stdout = std::io::stdout().lock();
    stdout.write_all(text.as_bytes())?;
    stdout.flush()?;
    Ok(())
}

fn emit(config: &RunConfig, result: Value) -> anyhow::Result<()> {
    print(&report::render(config, result))
}

/// First pair of boxes breaking Keller's condition, if any.
fn keller_defect(g: &BoxFamily) -> Option<(usize, usize)> {
    let boxes = g.boxes();
    (0..boxes.len()).flat_map(|j| (0..j).map(move |i| (i, j))).find(|&(i, j)| !keller_pair(&boxes[i], &boxes[j]))
}

fn path_config(cli: &Cli, command: &'static str, paths: &[&Path]) -> RunConfig {
    RunConfig { inputs: paths.iter().map(|p| p.display().to_string()).collect(), ..cli.config(command) }
}

fn validate(cli: &Cli, path: &Path) -> anyhow::Result<Status> {
    let config = path_config(cli, "validate", &[path]);
    let (result, ok) = match input::load_input(path)? {
        Input::Tiling(t) => match check_tiling(&t) {
            Ok(()) => (json!({"kind": "tiling", "valid": true, "cubes": t.len()}), true),
            Err(defect) => {
                eprintln!("invalid tiling: {defect}");
                (json!({"kind": "tiling", "valid": false, "defect": defect}), false)
            }
        },
        Input::Family(g) => match keller_defect(&g) {
            None => (json!({"kind": "family", "valid": true, "boxes": g.len()}), true),
            Some((i, j)) => {
                eprintln!("boxes {i} and {j} violate Keller's condition");
                (json!({"kind": "family", "valid": false, "defect": {"boxes": [i, j]}}), false)
            }
        },
    };
    emit(&config, result)?;
    Ok(if ok { Status::Ok } else { Status::Failed })
}

fn analyze(cli: &Cli, path: &Path, expect: Option<Expect>) -> anyhow::Result<Status> {
    let mut config = path_config(cli, "analyze", &[path]);
    config.expect = expect.map(|e| format!("{e:?}").to_lowercase());
    let (family, tiling) = match input::load_input(path)? {
        Input::Tiling(t) => {
            if let Err(defect) = check_tiling(&t) {
                eprintln!("invalid tiling: {defect}");
                emit(&config, json!({"kind": "tiling", "valid": false, "defect": defect}))?;
                return Ok(Status::Failed);
            }
            (to_box_family(&t)?, Some(t))
        }
        Input::Family(g) => {
            if let Some((i, j)) = keller_defect(&g) {
                eprintln!("boxes {i} and {j} violate Keller's condition");
                emit(&config, json!({"kind": "family", "valid": false, "defect": {"boxes": [i, j]}}))?;
                return Ok(Status::Failed);
            }
            (g, None)
        }
    };
    let stats = c_stats(&family)?;
    let b = theorem_b_report(&family)?;
    let multipile = is_multipile(&family)?.verdict;
    if !b.inequality_holds || b.equality != multipile {
        return Err(CoreError::TheoremViolation(format!(
            "c = {} with |G| = {}, multipile {multipile}",
            b.c, b.size
        ))
        .into());
    }
    let mut result = json!({
        "kind": if tiling.is_some() { "tiling" } else { "family" },
        "valid": true,
        "c_per_axis": stats.c_per_axis,
        "c_total": stats.c_total,
        "size": b.size,
        "equality": b.equality,
        "multipile": multipile,
        "hidden_partitions": stats.hidden,
    });
    let mut at_bound = None;
    if let Some(t) = &tiling {
        // Re-checks every proved relation between p, c and the verdict.
        analyze_tiling(t)?;
        let p = p_params(t)?;
        let (bound, kind) = match t.spec().uniform_m() {
            Some(n) => ((n.pow(t.spec().dim() as u32) - 1) / (n - 1), BoundKind::Theorem),
            None => (max_extremal_p_value(t.spec().m()), BoundKind::Conjectural),
        };
        at_bound = Some(p.total == bound);
        let extra = json!({
            "m": t.spec().m(),
            "q": t.spec().q(),
            "p_per_axis": p.per_axis,
            "p_total": p.total,
            "bound": bound,
            "bound_kind": kind,
        });
        result.as_object_mut().expect("object").extend(extra.as_object().expect("object").clone());
    }
    emit(&config, result)?;
    let met = match expect {
        None => true,
        Some(Expect::Equality) => b.equality,
        Some(Expect::Multipile) => multipile,
        Some(Expect::Bound) => at_bound.ok_or_else(|| InputError("--expect bound needs a tiling".into()))?,
    };
    Ok(if met { Status::Ok } else { Status::Failed })
}

fn torus_config(cli: &Cli, command: &'static str, torus: &TorusArgs) -> anyhow::Result<(RunConfig, keller_core::TorusSpec, Symmetry)> {
    let spec = input::resolve_spec(&torus.m, torus.q.as_deref())?;
    let symmetry: Symmetry = torus.symmetry.parse().map_err(|e: CoreError| InputError(e.to_string()))?;
    let config = RunConfig {
        m: Some(spec.m().to_vec()),
        q: Some(spec.q().to_vec()),
        symmetry: Some(symmetry.to_string()),
        ..cli.config(command)
    };
    Ok((config, spec, symmetry))
}

fn writer(out: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(std::io::BufWriter::new(
            std::fs::File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(std::io::BufWriter::new(std::io::stdout().lock())),
    })
}

fn enumerate(cli: &Cli, torus: &TorusArgs, out: Option<&Path>) -> anyhow::Result<Status> {
    let (_, spec, symmetry) = torus_config(cli, "enumerate", torus)?;
    let tilings = enumerate_tilings(&spec, &cli.options(symmetry))?;
    let mut w = writer(out)?;
    for t in &tilings {
        match cli.format {
            Format::Text => writeln!(w, "{:?}", t.starts())?,
            _ => writeln!(w, "{}", serde_json::to_string(t)?)?,
        }
    }
    w.flush()?;
    log::info!("{} tilings of {spec}", tilings.len());
    Ok(Status::Ok)
}

fn census(cli: &Cli, torus: &TorusArgs, dump: Option<&Path>) -> anyhow::Result<Status> {
    let (config, spec, symmetry) = torus_config(cli, "census", torus)?;
    let census = census_with_tilings(&spec, &cli.options(symmetry))?;
    if let Some(path) = dump {
        let mut w = writer(Some(path))?;
        for (t, a) in census.tilings.iter().zip(&census.analyses) {
            let mut line = serde_json::to_value(t)?;
            line.as_object_mut().expect("object").insert("analysis".into(), serde_json::to_value(a)?);
            writeln!(w, "{}", serde_json::to_string(&line)?)?;
        }
        w.flush()?;
    }
    match cli.format {
        Format::Csv => print(&format!("{}{CSV_HEADER}\n{}\n", report::csv_preamble(&config), census.row.csv_line()))?,
        _ => emit(&config, serde_json::to_value(&census.row)?)?,
    }
    Ok(Status::Ok)
}

fn verify(cli: &Cli, criteria: &[u8], random_families: usize, suit_pairs: usize) -> anyhow::Result<Status> {
    let mut ids = if criteria.is_empty() { (1..=9).collect() } else { criteria.to_vec() };
    ids.sort_unstable();
    ids.dedup();
    let config = RunConfig { criteria: Some(ids.clone()), ..cli.config("verify") };
    let suite = Suite::new(VerifyConfig {
        seed: cli.seed,
        jobs: cli.jobs,
        cell_budget: cli.cell_budget,
        random_families,
        suit_pairs,
        ..VerifyConfig::default()
    });
    let mut outcomes = Vec::new();
    for id in ids {
        let o = suite.run(id);
        eprintln!("criterion {} {} [{:.2}s]", o.id, if o.passed { "PASS" } else { "FAIL" }, o.seconds);
        outcomes.push(o);
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    match cli.format {
        Format::Csv => {
            let mut text = report::csv_preamble(&config);
            text.push_str("id,passed,seconds,detail\n");
            for o in &outcomes {
                text.push_str(&format!("{},{},{:.3},\"{}\"\n", o.id, o.passed, o.seconds, o.detail.replace('"', "\"\"")));
            }
            print(&text)?;
        }
        _ => emit(&config, json!({"passed": passed, "total": outcomes.len(), "criteria": outcomes}))?,
    }
    Ok(if passed == outcomes.len() { Status::Ok } else { Status::Failed })
}

fn build(path: &Path, out: Option<&Path>) -> anyhow::Result<Status> {
    let text = match input::load_construction(path)? {
        Construction::Tree(system, tree) => {
            let g = build_multipile(&system, &tree)?;
            serde_json::to_string_pretty(&BoxFamilyDoc::from_family(&g))?
        }
        Construction::Recipe(spec, recipe) => {
            let t: TorusTiling = laminated_construction(&spec, &recipe)?;
            serde_json::to_string_pretty(&t)?
        }
    };
    let mut w = writer(out)?;
    writeln!(w, "{text}")?;
    w.flush()?;
    Ok(Status::Ok)
}

fn hat_check(cli: &Cli, path: &Path, against: Option<&Path>, cap: u64) -> anyhow::Result<Status> {
    let mut paths = vec![path];
    paths.extend(against);
    let config = RunConfig { materialize_cap: Some(cap), ..path_config(cli, "hat-check", &paths) };
    let g = family_at(path)?;
    let system = g.system().clone();
    let violations = gamma1_violations(&g)?;
    let measure_sum = Exact(g.boxes().iter().map(|k| hat_measure(&system, k)).sum());
    let mut result = json!({
        "gamma1_violations": violations,
        "measure_sum": measure_sum,
        "box_count": g.len(),
        "keller": is_keller_family(&g)?,
        "partition_of_x": is_partition_of_x(&g),
    });
    let obj = result.as_object_mut().expect("object");
    let mut ok = true;
    if is_keller_family(&g)? && is_partition_of_x(&g) && g.boxes().iter().all(|k| k.is_proper()) {
        let r = verify_box_count(&g)?;
        if !r.holds {
            return Err(CoreError::TheoremViolation(format!("hat measures sum to {} over {} boxes", r.measure_sum, r.box_count)).into());
        }
        obj.insert("implied_size".into(), json!(r.implied_size));
    }
    if !violations.is_empty() {
        return Err(CoreError::TheoremViolation(format!("hat disjointness disagrees with Keller's condition at {violations:?}")).into());
    }
    if let Some(other) = against {
        let h = family_at(other)?;
        let space = HatSpace::pinned_by(&system, &[&g, &h]);
        let route = match space.size() {
            Some(n) if n <= cap => "materialized",
            _ => "measure",
        };
        let equivalent = suits_equivalent_with_cap(&g, &h, cap)?;
        obj.insert("suits_equivalent".into(), json!(equivalent));
        obj.insert("route".into(), json!(route));
        ok = equivalent;
    }
    emit(&config, result)?;
    Ok(if ok { Status::Ok } else { Status::Failed })
}

fn family_at(path: &Path) -> anyhow::Result<BoxFamily> {
    match input::load_input(path)? {
        Input::Family(g) => Ok(g),
        Input::Tiling(t) => Ok(to_box_family(&t)?),
    }
}
