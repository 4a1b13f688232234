use std::path::PathBuf;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ltlrl::learning::{AlphaSchedule, StartMode};
use ltlrl_cli::config::DEFAULT_ORACLE_CAP;
use ltlrl_cli::experiment::write_json;
use ltlrl_cli::report::{analyse, oracle_report};
use ltlrl_cli::simulate::write_trajectory;
use ltlrl_cli::{
    compare, export, load_policy, preset, run_experiment, simulate_policy, EmbeddingMode,
    ExperimentConfig, Setup, COMPARED_MODES, PRESET_NAMES,
};

#[derive(Parser)]
#[command(
    name = "ltlrl",
    version,
    about = "LTL control synthesis by Q-learning on embedded LDGBA products"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train over repetitions and write curves, policy, values and oracle report.
    Learn(ExperimentArgs),
    /// Exact analysis of the product: MECs and maximal satisfaction probabilities.
    Oracle(SourceArgs),
    /// Train under eldgba and ldba-baseline and compare reward collection.
    Compare(ExperimentArgs),
    /// Roll out a stored policy.
    Simulate(SimulateArgs),
    /// Write the model, automaton and product as JSON.
    Export(SourceArgs),
    /// List the named presets.
    Presets,
}

#[derive(Clone, Copy, ValueEnum)]
enum StartArg {
    Initial,
    RandomState,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Named base configuration.
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,
    /// JSON experiment configuration used as the base.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Model file or built-in (fig1, case1, case2, case2:<n>, random:<seed>).
    #[arg(long)]
    model: Option<String>,
    /// Automaton file or built-in (phi_e, phi_case1, phi_case2, phi_case3, random:<seed>).
    #[arg(long)]
    automaton: Option<String>,
    #[arg(long, value_enum)]
    mode: Option<EmbeddingMode>,
    #[arg(long)]
    episodes: Option<usize>,
    #[arg(long)]
    tau: Option<usize>,
    #[arg(long = "r-f")]
    r_f: Option<f64>,
    #[arg(long = "gamma-f")]
    gamma_f: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long, value_enum)]
    start: Option<StartArg>,
    /// Polynomial learning-rate exponent, `alpha = count^-omega`.
    #[arg(long)]
    omega: Option<f64>,
    /// Stop each repetition once the value map has converged.
    #[arg(long)]
    stop_on_convergence: bool,
    /// Product state budget for the oracle.
    #[arg(long)]
    cap: Option<usize>,
    #[arg(long, default_value = "results")]
    out: PathBuf,
}

impl ExperimentArgs {
    fn resolve(self) -> Result<ExperimentConfig> {
        let mut cfg = match (&self.config, &self.preset) {
            (Some(path), _) => ExperimentConfig::from_file(path)?,
            (None, Some(name)) => preset(name)?,
            (None, None) => {
                let (Some(m), Some(a)) = (&self.model, &self.automaton) else {
                    bail!("--model and --automaton are required without --preset or --config");
                };
                ExperimentConfig::new(m.clone(), a.clone())
            }
        };
        if let Some(m) = self.model {
            cfg.model = m;
        }
        if let Some(a) = self.automaton {
            cfg.automaton = a;
        }
        if let Some(m) = self.mode {
            cfg.mode = m;
        }
        if let Some(e) = self.episodes {
            cfg.learn.episodes = e;
        }
        if let Some(t) = self.tau {
            cfg.learn.tau = t;
        }
        if let Some(r) = self.r_f {
            cfg.reward.r_f = r;
        }
        if let Some(g) = self.gamma_f {
            cfg.reward.gamma_f = g;
        }
        if let Some(s) = self.seed {
            cfg.learn.seed = s;
        }
        if let Some(n) = self.reps {
            cfg.repetitions = n;
        }
        if let Some(s) = self.start {
            cfg.learn.start = match s {
                StartArg::Initial => StartMode::Initial,
                StartArg::RandomState => StartMode::RandomState,
            };
        }
        if let Some(omega) = self.omega {
            cfg.learn.alpha = AlphaSchedule::Polynomial { omega };
        }
        if self.stop_on_convergence {
            cfg.learn.stop_on_convergence = true;
        }
        if let Some(c) = self.cap {
            cfg.oracle_cap = c;
        }
        cfg.out = Some(self.out);
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct SourceArgs {
    #[arg(long)]
    model: String,
    #[arg(long)]
    automaton: String,
    #[arg(long, value_enum, default_value_t = EmbeddingMode::Eldgba)]
    mode: EmbeddingMode,
    #[arg(long, default_value_t = DEFAULT_ORACLE_CAP)]
    cap: usize,
    #[arg(long, default_value = "results")]
    out: PathBuf,
}

#[derive(Args)]
struct SimulateArgs {
    /// A `policy.json` written by `learn`.
    #[arg(long)]
    policy: PathBuf,
    #[arg(long, default_value_t = 25)]
    steps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory for `trajectory.csv` and `trajectory.json`.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn learn(args: ExperimentArgs) -> Result<()> {
    let cfg = args.resolve()?;
    let started = Instant::now();
    let b = run_experiment(&cfg)?;
    let s = &b.summary;
    println!(
        "model {} automaton {} mode {}",
        cfg.model, cfg.automaton, cfg.mode
    );
    match s.product_states {
        Some(n) => println!("product states {n}"),
        None => println!("product states unknown (above cap {})", cfg.oracle_cap),
    }
    for r in &s.repetitions {
        let conv = r.converged_at.map_or("-".to_string(), |e| e.to_string());
        println!(
            "rep {:>3} seed {:>4} episodes {:>6} converged {:>6} visited {:>6} value(x0) {:.4}",
            r.repetition, r.seed, r.episodes_run, conv, r.visited_states, r.final_value_at_x0
        );
    }
    println!("final mean reward {:.6}", s.final_mean_reward);
    if let Some(o) = &b.oracle {
        println!(
            "oracle max probability at x0 {:.6}",
            o.initial_max_probability
        );
        if let Some(l) = o.learned.first() {
            println!(
                "learned policy satisfaction probability {:.6}",
                l.satisfaction_probability
            );
        }
        if let Some(g) = o.max_start_gap {
            println!("max |learned - oracle| over start states {g:.6}");
        }
    }
    for n in &s.notices {
        println!("notice: {n}");
    }
    println!(
        "artifacts in {} ({:.2} s)",
        cfg.out.as_ref().expect("set").display(),
        started.elapsed().as_secs_f64()
    );
    Ok(())
}

fn oracle(args: SourceArgs) -> Result<()> {
    let setup = Setup::load(&args.model, &args.automaton, args.mode)?;
    let p = setup.product();
    let Some(a) = analyse(&p, args.cap)? else {
        bail!("product exceeds {} states; raise --cap", args.cap);
    };
    let report = oracle_report(&a, &p, args.cap, &[])?;
    std::fs::create_dir_all(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))?;
    write_json(&args.out.join("oracle.json"), &report)?;
    println!("product states {}", report.product_states);
    println!(
        "mecs {} (accepting {})",
        report.mecs.len(),
        a.sat.amecs.len()
    );
    println!(
        "max probability at x0 {:.6}",
        report.initial_max_probability
    );
    println!("report in {}", args.out.join("oracle.json").display());
    Ok(())
}

fn compare_cmd(args: ExperimentArgs) -> Result<()> {
    let cfg = args.resolve()?;
    let started = Instant::now();
    let (cmp, _) = compare(&cfg, &COMPARED_MODES)?;
    println!(
        "{} repetitions x {} episodes",
        cmp.repetitions, cmp.episodes
    );
    for o in &cmp.outcomes {
        let half = o
            .first_half_episode
            .map_or("-".to_string(), |e| e.to_string());
        println!(
            "{:<14} final mean reward {:.6} (std {:.6}) first episode at half of final {half}",
            o.mode.to_string(),
            o.final_mean_reward,
            o.final_std_reward
        );
    }
    println!(
        "artifacts in {} ({:.2} s)",
        cfg.out.as_ref().expect("set").display(),
        started.elapsed().as_secs_f64()
    );
    Ok(())
}

fn simulate(args: SimulateArgs) -> Result<()> {
    let artifact = load_policy(&args.policy)?;
    let trace = simulate_policy(&artifact, args.steps, args.seed)?;
    for s in &trace {
        println!(
            "{:>4} {:<28} accepting {:<6} {}",
            s.t, s.state, s.accepting, s.action
        );
    }
    if let Some(dir) = &args.out {
        write_trajectory(dir, &trace)?;
        println!("trajectory in {}", dir.display());
    }
    Ok(())
}

fn export_cmd(args: SourceArgs) -> Result<()> {
    let setup = Setup::load(&args.model, &args.automaton, args.mode)?;
    let n = export(&setup, args.cap, &args.out)?;
    println!(
        "exported model, automaton and {n}-state product to {}",
        args.out.display()
    );
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Learn(a) => learn(a),
        Command::Oracle(a) => oracle(a),
        Command::Compare(a) => compare_cmd(a),
        Command::Simulate(a) => simulate(a),
        Command::Export(a) => export_cmd(a),
        Command::Presets => {
            for name in PRESET_NAMES {
                let c = preset(name)?;
                println!(
                    "{name:<10} model {:<9} automaton {:<10} episodes {:>6} tau {:>5} reps {}",
                    c.model, c.automaton, c.learn.episodes, c.learn.tau, c.repetitions
                );
            }
            Ok(())
        }
    }
}
