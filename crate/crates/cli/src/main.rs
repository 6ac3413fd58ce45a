//! `qml`: exact stability, chambers and pointed-curve moduli from the command line.

mod input;
mod output;

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qmoduli::catalog::{
    random_a_stable_tree, random_chain, random_gk_shape, random_pn_config, random_pn_weight,
    random_qn_config, random_qn_weight, realize_shape, seeded_rng,
};
use qmoduli::chambers::{
    classify_weight, enumerate_chambers_with, stability_polytope, Classification, HassettWeight,
    Mode, Wall, Weight,
};
use qmoduli::configs::{brute_force_semistable, is_semistable, theta_polytope, Config, Verdict};
use qmoduli::curves::{
    contract_gamma_i, lm_moduli_coordinates, moduli_coordinates, reconstruct,
    verify_functor_conditions, Chain, Curve, FamilyMode, LimitFamily, PointedTree,
};
use qmoduli::exec::Exec;
use qmoduli::index::IdxSet;
use qmoduli::limits::Limits;
use qmoduli::verify::{run_suite, Bounds, Suite, SuiteReport, SCHEMA};

use input::{load, ChainShape, ConfigShape, FamilyShape, TreeShape, WeightShape};
use output::{tagged, Format, Sink};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Bound(String),
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Invalid(String),
    #[error("inconsistent family: condition {condition} fails: {detail}")]
    Inconsistent { condition: String, detail: String },
    #[error("{0}")]
    Output(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Bound(_) => 2,
            CliError::Parse(_) | CliError::Output(_) => 3,
            CliError::Invalid(_) => 4,
            CliError::Inconsistent { .. } => 5,
        }
    }
}

impl From<qmoduli::Error> for CliError {
    fn from(e: qmoduli::Error) -> Self {
        match e {
            qmoduli::Error::InconsistentFamily { condition, detail } => {
                CliError::Inconsistent { condition, detail }
            }
            other => CliError::Invalid(other.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "qml",
    version,
    about = "Exact quiver stability, wall-and-chamber structure and pointed-curve moduli"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t, global = true)]
    format: Format,
    /// Write the output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Qn,
    Pn,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Qn => Mode::Qn,
            ModeArg::Pn => Mode::Pn,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Walls, chambers, witnesses and adjacency of the weight polytope.
    Chambers {
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long)]
        n: usize,
        /// Run without the thread pool.
        #[arg(long)]
        sequential: bool,
    },
    /// Stability verdict of a configuration at a weight.
    Stability {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        weight: PathBuf,
        /// Require the configuration to be of this quiver.
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        /// Also run the exhaustive checker and report agreement.
        #[arg(long)]
        oracle: bool,
    },
    /// Vertices of the stability polytope of a configuration.
    Polytope {
        #[arg(long)]
        config: PathBuf,
    },
    /// Wall membership of a weight.
    Classify {
        #[arg(long)]
        weight: PathBuf,
    },
    /// Pointed trees, chains and their chart families.
    #[command(subcommand)]
    Tree(TreeCommand),
    /// Seeded random inputs.
    #[command(subcommand)]
    Random(RandomCommand),
    /// Run a verification suite (or `all`).
    Verify {
        suite: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Size caps, e.g. `max_n=5,samples=100`.
        #[arg(long, default_value = "")]
        bounds: String,
        #[arg(long)]
        sequential: bool,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct CurveInput {
    /// A pointed tree.
    #[arg(long)]
    tree: Option<PathBuf>,
    /// A Losev-Manin chain.
    #[arg(long)]
    chain: Option<PathBuf>,
}

#[derive(Subcommand)]
enum TreeCommand {
    /// Stability of a tree (GK, and Hassett with --hassett) or a chain.
    Check {
        #[command(flatten)]
        input: CurveInput,
        /// Hassett weights `a1,a2,...` with entries `num/den`.
        #[arg(long)]
        hassett: Option<String>,
    },
    /// Contract a tree to the marks in --keep, or to the chart --chart.
    Contract {
        #[arg(long)]
        tree: PathBuf,
        /// 1-based marks to keep, e.g. `1,2,4,5`.
        #[arg(long, conflicts_with = "chart", required_unless_present = "chart")]
        keep: Option<String>,
        /// 1-based chart triple, e.g. `1,2,3`.
        #[arg(long)]
        chart: Option<String>,
    },
    /// Chart coordinates of a tree or chain.
    Coords {
        #[command(flatten)]
        input: CurveInput,
        #[arg(long)]
        hassett: Option<String>,
    },
    /// Rebuild the curve of a chart family and confirm the round trip.
    Reconstruct {
        #[arg(long)]
        family: PathBuf,
    },
    /// Check the functor conditions on a chart family.
    Functor {
        #[arg(long)]
        family: PathBuf,
    },
}

#[derive(Subcommand)]
enum RandomCommand {
    /// A stable tree: GK, or a-stable with --hassett.
    Tree {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        hassett: Option<String>,
    },
    /// A Losev-Manin stable chain.
    Chain {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// A configuration with frequent coincidences.
    Config {
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// A weight in the polytope of the quiver.
    Weight {
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let sink = Sink {
        format: cli.format,
        out: cli.out,
    };
    match run(cli.command, &sink) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qml: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn run(command: Command, sink: &Sink) -> Result<(), CliError> {
    match command {
        Command::Chambers {
            mode,
            n,
            sequential,
        } => cmd_chambers(mode.into(), n, exec(sequential), sink),
        Command::Stability {
            config,
            weight,
            mode,
            oracle,
        } => cmd_stability(&config, &weight, mode, oracle, sink),
        Command::Polytope { config } => cmd_polytope(&config, sink),
        Command::Classify { weight } => cmd_classify(&weight, sink),
        Command::Tree(t) => cmd_tree(t, sink),
        Command::Random(r) => cmd_random(r, sink),
        Command::Verify {
            suite,
            seed,
            bounds,
            sequential,
        } => cmd_verify(&suite, seed, &bounds, exec(sequential), sink),
    }
}

fn exec(sequential: bool) -> Exec {
    if sequential {
        Exec::Sequential
    } else {
        Exec::default()
    }
}

fn load_config(path: &PathBuf) -> Result<Config, CliError> {
    load::<Config, ConfigShape>(path, "configuration")
}

fn load_weight(path: &PathBuf) -> Result<Weight, CliError> {
    load::<Weight, WeightShape>(path, "weight")
}

fn load_tree(path: &PathBuf) -> Result<PointedTree, CliError> {
    load::<PointedTree, TreeShape>(path, "tree")
}

fn load_chain(path: &PathBuf) -> Result<Chain, CliError> {
    load::<Chain, ChainShape>(path, "chain")
}

fn load_family(path: &PathBuf) -> Result<LimitFamily, CliError> {
    load::<LimitFamily, FamilyShape>(path, "family")
}

fn hassett(s: &str) -> Result<HassettWeight, CliError> {
    HassettWeight::parse(s).map_err(|e| CliError::Invalid(format!("--hassett: {e}")))
}

/// Parses 1-based indices `1,2,4` into 0-based ones.
fn indices(s: &str, flag: &str) -> Result<Vec<usize>, CliError> {
    s.split(',')
        .map(|x| match x.trim().parse::<usize>() {
            Ok(i) if i >= 1 => Ok(i - 1),
            _ => Err(CliError::Parse(format!(
                "{flag}: expected 1-based indices, got {x:?}"
            ))),
        })
        .collect()
}

fn cmd_chambers(mode: Mode, n: usize, exec: Exec, sink: &Sink) -> Result<(), CliError> {
    let complex =
        enumerate_chambers_with(mode, n, exec, Limits::from_env()).map_err(|e| match e {
            qmoduli::Error::TooLarge { what, bound } => {
                CliError::Bound(format!("{what} exceeds the bound {bound}"))
            }
            other => CliError::Bound(other.to_string()),
        })?;
    sink.emit(&tagged(&complex), || {
        format!(
            "{mode} n={n}: {} walls, {} chambers, {} adjacencies",
            complex.walls.len(),
            complex.chambers.len(),
            complex.edges.len()
        )
    })
}

#[derive(Serialize)]
struct StabilityOut {
    #[serde(flatten)]
    verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    agreement: Option<bool>,
}

fn cmd_stability(
    config: &PathBuf,
    weight: &PathBuf,
    mode: Option<ModeArg>,
    oracle: bool,
    sink: &Sink,
) -> Result<(), CliError> {
    let config = load_config(config)?;
    let weight = load_weight(weight)?;
    if let Some(m) = mode {
        let m = Mode::from(m);
        if config.mode() != m {
            return Err(CliError::Invalid(format!(
                "configuration is a {} representation, not {m}",
                config.mode()
            )));
        }
    }
    let verdict = is_semistable(&config, &weight)?;
    let oracle = if oracle {
        Some(brute_force_semistable(&config, &weight)?)
    } else {
        None
    };
    let agreement = oracle.as_ref().map(|o| o.kind() == verdict.kind());
    let out = StabilityOut {
        verdict,
        oracle,
        agreement,
    };
    sink.emit(&tagged(&out), || {
        let mut s = format!("{:?}", out.verdict.kind());
        if let Some(a) = out.agreement {
            let _ = write!(s, " (oracle {})", if a { "agrees" } else { "DISAGREES" });
        }
        s
    })
}

fn cmd_polytope(config: &PathBuf, sink: &Sink) -> Result<(), CliError> {
    let config = load_config(config)?;
    let geometry = stability_polytope(&theta_polytope(&config)?);
    #[derive(Serialize)]
    struct Out {
        vertices: Vec<Weight>,
        facets: Vec<Wall>,
        full_dimensional: bool,
    }
    let n = config.n();
    let out = Out {
        vertices: geometry.vertices.iter().map(|v| v.weight(n)).collect(),
        facets: geometry.facets.clone(),
        full_dimensional: geometry.polytope.is_full_dimensional(),
    };
    sink.emit(&tagged(&out), || {
        format!(
            "{} vertices, full-dimensional: {}",
            out.vertices.len(),
            out.full_dimensional
        )
    })
}

fn cmd_classify(weight: &PathBuf, sink: &Sink) -> Result<(), CliError> {
    let weight = load_weight(weight)?;
    let class = classify_weight(&weight);
    sink.emit(&tagged(&class), || match &class {
        Classification::Generic { .. } => "generic".into(),
        Classification::OnWalls { inner, outer } => {
            format!("on {} walls and {} facets", inner.len(), outer.len())
        }
    })
}

fn cmd_tree(command: TreeCommand, sink: &Sink) -> Result<(), CliError> {
    match command {
        TreeCommand::Check { input, hassett: a } => {
            #[derive(Serialize)]
            struct Out {
                n: usize,
                components: usize,
                #[serde(skip_serializing_if = "Option::is_none")]
                gk_stable: Option<bool>,
                #[serde(skip_serializing_if = "Option::is_none")]
                a_stable: Option<bool>,
                #[serde(skip_serializing_if = "Option::is_none")]
                lm_stable: Option<bool>,
            }
            let out = match (&input.tree, &input.chain) {
                (Some(path), _) => {
                    let tree = load_tree(path)?;
                    let a_stable = match a {
                        Some(s) => {
                            let a = hassett(&s)?;
                            if a.n() != tree.n() {
                                return Err(CliError::Invalid(format!(
                                    "--hassett has {} entries for {} marks",
                                    a.n(),
                                    tree.n()
                                )));
                            }
                            Some(tree.is_a_stable(&a))
                        }
                        None => None,
                    };
                    Out {
                        n: tree.n(),
                        components: tree.components(),
                        gk_stable: Some(tree.is_gk_stable()),
                        a_stable,
                        lm_stable: None,
                    }
                }
                (None, Some(path)) => {
                    let chain = load_chain(path)?;
                    Out {
                        n: chain.n(),
                        components: chain.components(),
                        gk_stable: None,
                        a_stable: None,
                        lm_stable: Some(chain.is_lm_stable()),
                    }
                }
                (None, None) => unreachable!("clap requires one input"),
            };
            sink.emit(&tagged(&out), || {
                let flags = [
                    ("gk", out.gk_stable),
                    ("a", out.a_stable),
                    ("lm", out.lm_stable),
                ];
                flags
                    .iter()
                    .filter_map(|(k, v)| v.map(|v| format!("{k}-stable: {v}")))
                    .collect::<Vec<_>>()
                    .join(", ")
            })
        }
        TreeCommand::Contract { tree, keep, chart } => {
            let tree = load_tree(&tree)?;
            if let Some(keep) = keep {
                let keep: IdxSet = indices(&keep, "--keep")?.into_iter().collect();
                let contracted = contract_gamma_i(&tree, keep)?;
                sink.emit(&tagged(&contracted), || {
                    format!("{} components", contracted.components())
                })
            } else {
                let t = indices(
                    chart.as_deref().expect("clap requires --keep or --chart"),
                    "--chart",
                )?;
                let t: [usize; 3] = t
                    .try_into()
                    .map_err(|_| CliError::Parse("--chart takes three indices".into()))?;
                if t.iter().any(|&i| i >= tree.n()) || t[0] == t[1] || t[1] == t[2] || t[0] == t[2]
                {
                    return Err(CliError::Invalid(
                        "--chart needs three distinct marks of the tree".into(),
                    ));
                }
                #[derive(Serialize)]
                struct Out {
                    chart: [usize; 3],
                    active: bool,
                    #[serde(skip_serializing_if = "Option::is_none")]
                    configuration: Option<Config>,
                }
                let configuration = tree.contract_to_chart(t).map(Config::Qn);
                let out = Out {
                    chart: t.map(|i| i + 1),
                    active: configuration.is_some(),
                    configuration,
                };
                sink.emit(&tagged(&out), || format!("chart active: {}", out.active))
            }
        }
        TreeCommand::Coords { input, hassett: a } => {
            let family = match (&input.tree, &input.chain) {
                (Some(path), _) => {
                    let tree = load_tree(path)?;
                    let mode = match a {
                        Some(s) => FamilyMode::Hassett { a: hassett(&s)? },
                        None => FamilyMode::Gk,
                    };
                    moduli_coordinates(&tree, &mode)?
                }
                (None, Some(path)) => lm_moduli_coordinates(&load_chain(path)?)?,
                (None, None) => unreachable!("clap requires one input"),
            };
            sink.emit(&tagged(&family), || {
                format!(
                    "{} family on {} marks: {} active charts",
                    family.mode,
                    family.n,
                    family.charts.len()
                )
            })
        }
        TreeCommand::Reconstruct { family } => {
            let family = load_family(&family)?;
            let curve = reconstruct(&family)?;
            let again = match &curve {
                Curve::Tree { tree } => moduli_coordinates(tree, &family.mode)?,
                Curve::Chain { chain } => lm_moduli_coordinates(chain)?,
            };
            #[derive(Serialize)]
            struct Out {
                curve: Curve,
                round_trip: bool,
            }
            let out = Out {
                round_trip: again == family,
                curve,
            };
            sink.emit(&tagged(&out), || {
                let what = match &out.curve {
                    Curve::Tree { tree } => format!("tree with {} components", tree.components()),
                    Curve::Chain { chain } => {
                        format!("chain with {} components", chain.components())
                    }
                };
                format!("{what}; round trip: {}", out.round_trip)
            })
        }
        TreeCommand::Functor { family } => {
            let family = load_family(&family)?;
            let report = verify_functor_conditions(&family);
            sink.emit(&tagged(&report), || {
                report
                    .checks
                    .iter()
                    .map(|c| {
                        format!(
                            "{}: {}",
                            c.condition,
                            if c.passed { "ok" } else { "FAILED" }
                        )
                    })
                    .collect::<Vec<_>>()
                    .join("\n")
            })?;
            match report.first_failure() {
                Some(f) => Err(CliError::Inconsistent {
                    condition: f.condition.clone(),
                    detail: f.witness.clone().unwrap_or_default(),
                }),
                None => Ok(()),
            }
        }
    }
}

fn cmd_random(command: RandomCommand, sink: &Sink) -> Result<(), CliError> {
    let check_n = |n: usize, lo: usize, hi: usize| {
        if (lo..=hi).contains(&n) {
            Ok(())
        } else {
            Err(CliError::Invalid(format!("--n must lie in {lo}..={hi}")))
        }
    };
    match command {
        RandomCommand::Tree {
            n,
            seed,
            hassett: a,
        } => {
            let mut rng = seeded_rng(seed);
            let tree = match a {
                Some(s) => {
                    let a = hassett(&s)?;
                    if a.n() != n {
                        return Err(CliError::Invalid(format!(
                            "--hassett has {} entries, --n is {n}",
                            a.n()
                        )));
                    }
                    random_a_stable_tree(&a, &mut rng)
                }
                None => {
                    check_n(n, 3, 12)?;
                    realize_shape(&random_gk_shape(n, &mut rng), &mut rng)
                }
            };
            sink.emit(&tagged(&tree), || {
                format!("tree with {} components on {n} marks", tree.components())
            })
        }
        RandomCommand::Chain { n, seed } => {
            check_n(n, 1, 12)?;
            let chain = random_chain(n, &mut seeded_rng(seed));
            sink.emit(&tagged(&chain), || {
                format!("chain with {} components on {n} marks", chain.components())
            })
        }
        RandomCommand::Config { mode, n, seed } => {
            let mut rng = seeded_rng(seed);
            let config = match mode {
                ModeArg::Qn => {
                    check_n(n, 3, 30)?;
                    Config::Qn(random_qn_config(n, 8, &mut rng))
                }
                ModeArg::Pn => {
                    check_n(n, 1, 30)?;
                    Config::Pn(random_pn_config(n, 8, &mut rng))
                }
            };
            sink.emit(&tagged(&config), || format!("{:?}", config.sections()))
        }
        RandomCommand::Weight { mode, n, seed } => {
            let mut rng = seeded_rng(seed);
            let weight = match mode {
                ModeArg::Qn => {
                    check_n(n, 3, 30)?;
                    Weight::Qn(random_qn_weight(n, 12, &mut rng))
                }
                ModeArg::Pn => {
                    check_n(n, 1, 30)?;
                    Weight::Pn(random_pn_weight(n, 12, &mut rng))
                }
            };
            sink.emit(&tagged(&weight), || {
                format!(
                    "{:?}",
                    weight
                        .coords()
                        .iter()
                        .map(ToString::to_string)
                        .collect::<Vec<_>>()
                )
            })
        }
    }
}

fn cmd_verify(
    suite: &str,
    seed: u64,
    bounds: &str,
    exec: Exec,
    sink: &Sink,
) -> Result<(), CliError> {
    let bounds: Bounds = bounds
        .parse()
        .map_err(|e: qmoduli::Error| CliError::Parse(format!("--bounds: {e}")))?;
    let suites: Vec<Suite> = if suite == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![suite
            .parse()
            .map_err(|e: qmoduli::Error| CliError::Parse(e.to_string()))?]
    };
    let reports: Vec<SuiteReport> = suites
        .iter()
        .map(|&s| run_suite(s, seed, bounds, exec))
        .collect();
    let text = || {
        let mut s = String::new();
        for r in &reports {
            let _ = writeln!(s, "{}: {}", r.suite, if r.passed { "PASS" } else { "FAIL" });
            for p in &r.properties {
                let _ = writeln!(
                    s,
                    "  {}: {} ({} cases)",
                    p.property,
                    if p.passed { "pass" } else { "FAIL" },
                    p.cases
                );
            }
        }
        s
    };
    let passed = reports.iter().all(|r| r.passed);
    if let [single] = reports.as_slice() {
        sink.emit(single, text)?;
    } else {
        #[derive(Serialize)]
        struct All<'a> {
            schema: &'static str,
            seed: u64,
            passed: bool,
            reports: &'a [SuiteReport],
        }
        sink.emit(
            &All {
                schema: SCHEMA,
                seed,
                passed,
                reports: &reports,
            },
            text,
        )?;
    }
    if passed {
        Ok(())
    } else {
        let failing: Vec<&str> = reports
            .iter()
            .filter(|r| !r.passed)
            .map(|r| r.suite.as_str())
            .collect();
        Err(CliError::Failed(format!(
            "failing suites: {}",
            failing.join(", ")
        )))
    }
}
