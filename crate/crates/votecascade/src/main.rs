use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use votecascade::error::{HarnessError, Result};
use votecascade::formats::{load_edge_list, load_electorate, save_edge_list, save_electorate, write_file};
use votecascade::grid::{ExperimentGrid, GraphFamily};
use votecascade::results::{emit_csv, emit_plot_data};
use votecascade::scenarios::{GraphSource, ScenarioIndex, ScenarioSpec, TargetRule};
use votecascade::swapdist::swap_distance_study;
use votecascade::timing::{scalability_sweep, timing_comparison, timing_scenario, WallClock, SWEEP_SIZES};
use votecascade_core::campaign::{budget_for, describe_round, run_campaign, Algorithm, CampaignConfig, NullClock};
use votecascade_core::graph::SpatialParams;
use votecascade_core::greedy::brute_force_optimal;
use votecascade_core::heuristics::PageRankOptions;
use votecascade_core::model::NoiseSpec;
use votecascade_core::scenario::Scenario;
use votecascade_core::stream::stream_rng;

#[derive(Parser)]
#[command(name = "votecascade", version, about = "Election manipulation through information cascades")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a random network or electorate to a file.
    #[command(subcommand)]
    Generate(Generate),
    /// Run an experiment grid and write the result table as CSV.
    Run(RunArgs),
    /// Run one multi-round campaign and print every round.
    Campaign(CampaignArgs),
    /// Time seed selection, optionally across electorate sizes.
    Bench(BenchArgs),
    /// Measure how far noisy views move preferences from single-peakedness.
    Swapdist(SwapdistArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    WattsStrogatz,
    PreferentialAttachment,
}

#[derive(Args)]
struct SpatialArgs {
    #[arg(long, default_value_t = 0.13)]
    radius: f64,
    #[arg(long, default_value_t = 2)]
    weak_ties: usize,
    #[arg(long, default_value_t = 2.0)]
    exponent: f64,
    /// Make every weak tie two-way.
    #[arg(long)]
    reciprocal_weak_ties: bool,
}

impl SpatialArgs {
    fn params(&self) -> SpatialParams {
        SpatialParams {
            radius: self.radius,
            weak_ties: self.weak_ties,
            exponent: self.exponent,
            reciprocal_weak_ties: self.reciprocal_weak_ties,
        }
    }
}

#[derive(Args)]
struct ElectorateArgs {
    #[arg(long, default_value_t = 20)]
    voters: usize,
    #[arg(long, default_value_t = 5)]
    candidates: usize,
    /// `zero`, `uniform(lo,hi)`, `gaussian(mean,variance)` or `mixture(w:mean:var;...)`.
    #[arg(long, default_value = "zero")]
    noise: String,
    /// `random`, `rightmost` or a candidate id.
    #[arg(long, default_value = "random")]
    target: String,
}

#[derive(Subcommand)]
enum Generate {
    /// A social network with uniformly random edge probabilities.
    Graph {
        #[arg(long, value_enum, default_value = "watts-strogatz")]
        family: Family,
        #[arg(long, default_value_t = 20)]
        voters: usize,
        #[command(flatten)]
        spatial: SpatialArgs,
        #[arg(long, default_value_t = 0.25)]
        p_pref: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Candidates and voters uniform in [-1, 1], with sampled views.
    Electorate {
        #[command(flatten)]
        electorate: ElectorateArgs,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    /// TOML grid file; every key is optional.
    #[arg(long)]
    grid: Option<PathBuf>,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Also write the table in long format.
    #[arg(long)]
    plot_data: Option<PathBuf>,
    /// Worker threads; all cores by default.
    #[arg(long)]
    threads: Option<usize>,
    /// Report zero seconds instead of measuring, for byte-identical output.
    #[arg(long)]
    no_timing: bool,
    #[arg(long, value_delimiter = ',')]
    voters: Option<Vec<usize>>,
    #[arg(long)]
    candidates: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    budget_fractions: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    deltas: Option<Vec<f64>>,
    /// Repeat for several noises.
    #[arg(long = "noise")]
    noises: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    algorithms: Option<Vec<String>>,
    #[arg(long)]
    target: Option<String>,
    #[arg(long)]
    rounds: Option<usize>,
    #[arg(long)]
    greedy_runs: Option<u64>,
    #[arg(long)]
    placements: Option<usize>,
    #[arg(long)]
    graphs: Option<usize>,
    #[arg(long)]
    probability_sets: Option<usize>,
    #[arg(long)]
    reciprocal_weak_ties: bool,
}

#[derive(Args)]
struct CampaignArgs {
    /// Edge list; requires `--electorate`. A spatial scenario is generated otherwise.
    #[arg(long, requires = "electorate")]
    network: Option<PathBuf>,
    #[arg(long, requires = "network")]
    electorate: Option<PathBuf>,
    #[command(flatten)]
    synthetic: ElectorateArgs,
    #[command(flatten)]
    spatial: SpatialArgs,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value = "SPpagerank1.0_pos")]
    algorithm: String,
    #[arg(long, default_value_t = 0.1)]
    budget_fraction: f64,
    #[arg(long, default_value_t = 0.3)]
    delta: f64,
    #[arg(long, default_value_t = 10)]
    rounds: usize,
    /// Keep playing rounds after every voter supports the target.
    #[arg(long)]
    keep_going: bool,
    #[arg(long, default_value_t = votecascade_core::greedy::DEFAULT_SPREAD_RUNS)]
    greedy_runs: u64,
    /// Also report the exact best first-round seed set (tiny networks only).
    #[arg(long)]
    optimal: bool,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    seed: u64,
    #[arg(long, value_delimiter = ',', default_value = "SPpagerank1.0_pos,greedy-apx")]
    algorithms: Vec<String>,
    #[arg(long, default_value_t = 20)]
    scenarios: usize,
    #[arg(long, default_value_t = 20)]
    voters: usize,
    #[arg(long, default_value_t = 0.1)]
    budget_fraction: f64,
    #[arg(long, default_value_t = 0.3)]
    delta: f64,
    #[arg(long, default_value_t = votecascade_core::greedy::DEFAULT_SPREAD_RUNS)]
    greedy_runs: u64,
    /// Time one algorithm across electorate sizes instead.
    #[arg(long)]
    sweep: bool,
    #[arg(long, value_delimiter = ',', default_values_t = SWEEP_SIZES)]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 5)]
    repetitions: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SwapdistArgs {
    #[arg(long)]
    seed: u64,
    /// Repeat for several noises.
    #[arg(long = "noise", default_values_t = ["zero".to_string(), "gaussian(0,0.08)".to_string(), "gaussian(0,1)".to_string()])]
    noises: Vec<String>,
    #[arg(long, default_value_t = 10000)]
    elections: usize,
    #[arg(long, default_value_t = 20)]
    voters: usize,
    #[arg(long, default_value_t = 5)]
    candidates: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_algorithm(name: &str, greedy_runs: u64) -> Result<Algorithm> {
    Ok(match name.parse::<Algorithm>()? {
        Algorithm::GreedyApx { lazy, .. } => Algorithm::GreedyApx { runs: greedy_runs, lazy },
        a => a,
    })
}

fn parse_noise(s: &str) -> Result<NoiseSpec> {
    let noise: NoiseSpec = s.parse()?;
    noise.validate()?;
    Ok(noise)
}

fn spec(e: &ElectorateArgs, graph: GraphSource) -> Result<ScenarioSpec> {
    let spec = ScenarioSpec {
        n_voters: e.voters,
        n_candidates: e.candidates,
        noise: parse_noise(&e.noise)?,
        target: e.target.parse::<TargetRule>()?,
        graph,
    };
    spec.validate()?;
    Ok(spec)
}

fn generate(cmd: Generate) -> Result<()> {
    match cmd {
        Generate::Graph { family, voters, spatial, p_pref, seed, out } => {
            let graph = match family {
                Family::WattsStrogatz => GraphSource::Spatial(spatial.params()),
                Family::PreferentialAttachment => {
                    if !(0.0..=1.0).contains(&p_pref) {
                        return Err(HarnessError::config("`p_pref` must lie in [0, 1]"));
                    }
                    GraphSource::Attachment { p_pref }
                }
            };
            let e = ElectorateArgs { voters, candidates: 2, noise: "zero".into(), target: "random".into() };
            let net = spec(&e, graph)?.network(seed, 0, 0)?;
            save_edge_list(&net, &out)?;
            println!("wrote {} nodes and {} edges to {}", net.n(), net.edge_count(), out.display());
        }
        Generate::Electorate { electorate, seed, out } => {
            let e = spec(&electorate, GraphSource::Spatial(SpatialParams::default()))?.electorate(seed, 0)?;
            save_electorate(&e, &out)?;
            println!("wrote {} voters and {} candidates to {}", e.n_voters(), e.n_candidates(), out.display());
        }
    }
    Ok(())
}

fn run(args: RunArgs) -> Result<()> {
    let mut grid = match &args.grid {
        Some(path) => ExperimentGrid::load(path)?,
        None => ExperimentGrid::default(),
    };
    grid.seed = Some(args.seed);
    if let Some(v) = args.voters {
        grid.voters = v;
    }
    if let Some(c) = args.candidates {
        grid.candidates = c;
    }
    if let Some(b) = args.budget_fractions {
        grid.budget_fractions = b;
    }
    if let Some(d) = args.deltas {
        grid.deltas = d;
    }
    if !args.noises.is_empty() {
        grid.noises = args.noises;
    }
    if let Some(a) = args.algorithms {
        grid.algorithms = a;
    }
    if let Some(t) = args.target {
        grid.target = t;
    }
    if let Some(r) = args.rounds {
        grid.rounds = r;
    }
    if let Some(g) = args.greedy_runs {
        grid.greedy_runs = g;
    }
    if let Some(p) = args.placements {
        grid.replications.placements = p;
    }
    if let Some(g) = args.graphs {
        grid.replications.graphs = g;
    }
    if let Some(p) = args.probability_sets {
        grid.replications.probability_sets = p;
    }
    if args.reciprocal_weak_ties {
        grid.graph.reciprocal_weak_ties = true;
    }
    let plan = grid.plan()?;
    if grid.graph.family == GraphFamily::Community && grid.target == "random" {
        eprintln!("note: the community protocol usually promotes candidate 2 (`--target 2`)");
    }
    let table =
        if args.no_timing { plan.run(&NullClock, args.threads)? } else { plan.run(&WallClock::new(), args.threads)? };
    emit_csv(&table, &args.out)?;
    if let Some(path) = &args.plot_data {
        emit_plot_data(&table, path)?;
    }
    println!(
        "{} rows from {} scenarios per (voters, noise) pair written to {}",
        table.rows.len(),
        grid.scenario_count(),
        args.out.display()
    );
    Ok(())
}

fn campaign(args: CampaignArgs) -> Result<()> {
    let algorithm = parse_algorithm(&args.algorithm, args.greedy_runs)?;
    let scenario = match (&args.network, &args.electorate) {
        (Some(net), Some(electorate)) => Scenario::new(load_electorate(electorate)?, load_edge_list(net)?, args.delta)?,
        _ => spec(&args.synthetic, GraphSource::Spatial(args.spatial.params()))?.scenario(
            args.seed,
            ScenarioIndex { placement: 0, graph: 0, probabilities: 0 },
            args.delta,
        )?,
    };
    let config = CampaignConfig {
        algorithm,
        budget_fraction: args.budget_fraction,
        rounds: args.rounds,
        stop_at_unanimity: !args.keep_going,
        pagerank: PageRankOptions::default(),
    };
    config.validate()?;
    let budget = budget_for(args.budget_fraction, scenario.n());
    let tally = scenario.electorate.tally();
    println!(
        "{} voters, {} edges, target {}, budget {budget}, delta {}, algorithm {}",
        scenario.n(),
        scenario.network.edge_count(),
        scenario.target(),
        scenario.delta,
        algorithm
    );
    println!("initial tally {:?} mov {}", tally.votes(), tally.margin_of_victory(scenario.target()));
    if args.optimal {
        let (seeds, value) = brute_force_optimal(&scenario, budget)?;
        println!("optimal first-round seeds {seeds:?} expected dmov {value:.4}");
    }
    let clock = WallClock::new();
    let mut rng = stream_rng(args.seed, &[]);
    for report in run_campaign(&scenario, &config, &mut rng, &clock)? {
        println!("{} selection {:.6}s", describe_round(&report), report.selection_seconds);
    }
    Ok(())
}

fn csv_text(header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| HarnessError::config(e.to_string());
    w.write_record(header).map_err(err)?;
    for r in rows {
        w.write_record(r).map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| HarnessError::config(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
}

fn bench(args: BenchArgs) -> Result<()> {
    let clock = WallClock::new();
    if args.sweep {
        let algorithm = parse_algorithm(&args.algorithms[0], args.greedy_runs)?;
        let sweep =
            scalability_sweep(&args.sizes, &algorithm, args.budget_fraction, args.repetitions, args.seed, &clock)?;
        let mut rows = Vec::new();
        for p in &sweep.points {
            println!(
                "n {:>6}: median {:.6}s mean {:.6}s std {:.6}s",
                p.n_voters, p.median_seconds, p.seconds.mean, p.seconds.std
            );
            rows.push(vec![
                p.n_voters.to_string(),
                p.median_seconds.to_string(),
                p.seconds.mean.to_string(),
                p.seconds.std.to_string(),
            ]);
        }
        println!("{}: time grows as n^{:.3}", sweep.algorithm, sweep.exponent);
        if let Some(out) = &args.out {
            write_file(out, &csv_text(&["n_voters", "median_s", "mean_s", "std_s"], &rows)?)?;
        }
        return Ok(());
    }
    let algorithms =
        args.algorithms.iter().map(|a| parse_algorithm(a, args.greedy_runs)).collect::<Result<Vec<_>>>()?;
    let scenarios = (0..args.scenarios)
        .map(|i| timing_scenario(args.voters, i, args.delta, args.seed))
        .collect::<Result<Vec<_>>>()?;
    let timings = timing_comparison(
        &scenarios,
        &algorithms,
        args.budget_fraction,
        PageRankOptions::default(),
        args.seed,
        &clock,
    )?;
    let slowest = timings.iter().map(|t| t.seconds.mean).fold(0.0, f64::max);
    let mut rows = Vec::new();
    for t in &timings {
        println!(
            "{:<28} mean {:.6}s std {:.6}s ({}x faster than the slowest)",
            t.algorithm,
            t.seconds.mean,
            t.seconds.std,
            format_ratio(slowest, t.seconds.mean)
        );
        rows.push(vec![
            t.algorithm.clone(),
            t.seconds.count.to_string(),
            t.seconds.mean.to_string(),
            t.seconds.std.to_string(),
        ]);
    }
    if let Some(out) = &args.out {
        write_file(out, &csv_text(&["algorithm", "calls", "mean_s", "std_s"], &rows)?)?;
    }
    Ok(())
}

fn format_ratio(slowest: f64, t: f64) -> String {
    if t > 0.0 {
        format!("{:.1}", slowest / t)
    } else {
        "inf".into()
    }
}

fn swapdist(args: SwapdistArgs) -> Result<()> {
    let noises = args.noises.iter().map(|s| parse_noise(s)).collect::<Result<Vec<_>>>()?;
    let study = swap_distance_study(&noises, args.elections, args.voters, args.candidates, args.seed)?;
    for (noise, s) in noises.iter().zip(study.summaries()) {
        println!(
            "{:<24} mean swap distance {:.4} std {:.4} over {} elections",
            noise.to_string(),
            s.mean,
            s.std,
            s.count
        );
    }
    if let Some(out) = &args.out {
        write_file(out, &study.to_csv()?)?;
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate(g) => generate(g),
        Command::Run(a) => run(a),
        Command::Campaign(a) => campaign(a),
        Command::Bench(a) => bench(a),
        Command::Swapdist(a) => swapdist(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
