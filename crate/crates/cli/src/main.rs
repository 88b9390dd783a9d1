//! `ofl`: evaluate, check and stress prediction-augmented obnoxious facility location mechanisms.

use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

use ofl_cli::{parse, report, InstanceFile, LoadedInstance};
use ofl_core::experiments::{
    evaluate_instance, fuzz_bounds, lb_verify, sweep, witness, FuzzConfig, GeneratorConfig, Setting, WitnessTarget,
};
use ofl_core::game_checks::{check_coalition, check_unilateral, CoalitionSearch, MisreportSet};
use ofl_core::mechanisms::DualRule;
use ofl_core::spaces::SpaceKind;
use ofl_core::welfare::optimal_location;
use ofl_core::MechanismConfig;

const EXIT_ASSERTION: u8 = 1;
const EXIT_VIOLATION: u8 = 2;
const EXIT_USAGE: u8 = 64;

/// Slack allowed above a bound before a sweep row counts as exceeding it.
const BOUND_SLACK: f64 = 1e-9;

#[derive(Parser, Debug)]
#[command(name = "ofl", version, about = "Obnoxious facility location with predictions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the mechanism on one instance and compare it with the optimum.
    Run(InstanceArgs),
    /// Print an optimal location and the optimal welfare.
    Opt {
        /// Instance file, or `-` for standard input.
        file: PathBuf,
    },
    /// Search unilateral misreports on a grid; exits 2 on a profitable one.
    CheckSp {
        #[command(flatten)]
        input: InstanceArgs,
        /// Grid points per axis, or per unit length on trees.
        #[arg(long, default_value_t = 101)]
        grid: usize,
        /// Never flip agent types, even under the dual model.
        #[arg(long)]
        no_type_flips: bool,
    },
    /// Search coalition misreports; exits 2 when every member gains by more than the factor gamma.
    CheckGsp {
        #[command(flatten)]
        input: InstanceArgs,
        #[arg(long, default_value_t = 2)]
        coalition_size: usize,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        #[arg(long, default_value_t = 11)]
        grid: usize,
        /// Joint misreports tried per coalition before subsampling.
        #[arg(long, default_value_t = 20_000)]
        budget: usize,
        #[arg(long, env = "OFL_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        no_type_flips: bool,
    },
    /// Adversarial search for worst ratios at each trust level, as CSV; exits 1 if a finite bound is exceeded.
    Sweep {
        #[arg(long)]
        space: Setting,
        #[arg(long, value_delimiter = ',', default_value = "0,0.2,0.4,0.6,0.8")]
        lambda_grid: Vec<f64>,
        /// Ratio evaluations per search.
        #[arg(long, default_value_t = 2000)]
        budget: usize,
        #[arg(long, env = "OFL_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = RuleArg::AsWritten)]
        dual_rule: RuleArg,
        #[command(flatten)]
        generator: GeneratorArgs,
        /// Write the CSV here instead of standard output.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run the threshold mechanism on its hard profile.
    LbVerify {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        c: f64,
        #[arg(long)]
        epsilon: f64,
    },
    /// Check both bounds on a random corpus; exits 1 on any violation.
    Fuzz {
        #[arg(long)]
        space: Setting,
        #[arg(long, env = "OFL_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        count: usize,
        #[arg(long, value_delimiter = ',', default_value = "0,0.2,0.4,0.6,0.8")]
        lambda_grid: Vec<f64>,
        #[arg(long, value_enum, default_value_t = RuleArg::AsWritten)]
        dual_rule: RuleArg,
        #[command(flatten)]
        generator: GeneratorArgs,
    },
    /// Print a hard instance as an instance file.
    Witness {
        #[arg(long)]
        space: SpaceKind,
        #[arg(long, value_enum)]
        target: TargetArg,
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        n: usize,
    },
}

#[derive(Args, Debug)]
struct InstanceArgs {
    /// Instance file, or `-` for standard input.
    file: PathBuf,
    /// Override the file's trust level.
    #[arg(long)]
    lambda: Option<f64>,
    /// Override the file's dual-model rule.
    #[arg(long, value_enum)]
    dual_rule: Option<RuleArg>,
}

#[derive(Args, Debug)]
struct GeneratorArgs {
    #[arg(long, default_value_t = GeneratorConfig::default().max_agents)]
    max_agents: usize,
    #[arg(long, default_value_t = GeneratorConfig::default().max_vertices)]
    max_vertices: usize,
}

impl From<&GeneratorArgs> for GeneratorConfig {
    fn from(a: &GeneratorArgs) -> Self {
        GeneratorConfig {
            max_agents: a.max_agents,
            max_vertices: a.max_vertices,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RuleArg {
    AsWritten,
    PredictionFavoring,
}

impl From<RuleArg> for DualRule {
    fn from(r: RuleArg) -> Self {
        match r {
            RuleArg::AsWritten => DualRule::AsWritten,
            RuleArg::PredictionFavoring => DualRule::PredictionFavoring,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TargetArg {
    Robustness,
    Consistency,
}

impl From<TargetArg> for WitnessTarget {
    fn from(t: TargetArg) -> Self {
        match t {
            TargetArg::Robustness => WitnessTarget::Robustness,
            TargetArg::Consistency => WitnessTarget::Consistency,
        }
    }
}

fn read_text(path: &Path) -> anyhow::Result<String> {
    if path == Path::new("-") {
        let mut text = String::new();
        io::stdin().read_to_string(&mut text).context("reading standard input")?;
        Ok(text)
    } else {
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
    }
}

fn load(path: &Path) -> anyhow::Result<LoadedInstance> {
    let text = read_text(path)?;
    let loaded = parse(&text)
        .and_then(|f| f.load())
        .with_context(|| format!("invalid instance file {}", path.display()))?;
    Ok(loaded)
}

impl InstanceArgs {
    fn load(&self) -> anyhow::Result<LoadedInstance> {
        let mut loaded = load(&self.file)?;
        if let Some(lambda) = self.lambda {
            loaded.config = MechanismConfig::new(lambda)?.with_dual_rule(loaded.config.dual_rule);
        }
        if let Some(rule) = self.dual_rule {
            loaded.config = loaded.config.with_dual_rule(rule.into());
        }
        Ok(loaded)
    }
}

fn print_json(value: &Value) -> anyhow::Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn grid_set(resolution: usize, loaded: &LoadedInstance, no_type_flips: bool) -> MisreportSet<f64> {
    MisreportSet::Grid {
        resolution,
        type_flips: !no_type_flips && loaded.instance.profile.types.is_some(),
    }
}

fn execute(command: Command) -> anyhow::Result<u8> {
    match command {
        Command::Run(input) => {
            let loaded = input.load()?;
            let r = evaluate_instance(&loaded.instance, &loaded.config)?;
            print_json(&report::evaluation(loaded.instance.mechanism().name(), &r))?;
        }
        Command::Opt { file } => {
            let inst = load(&file)?.instance;
            let (y, opt) = optimal_location(&inst.space, &inst.profile, inst.model)?;
            print_json(&report::optimum(&y, opt))?;
        }
        Command::CheckSp {
            input,
            grid,
            no_type_flips,
        } => {
            let loaded = input.load()?;
            let set = grid_set(grid, &loaded, no_type_flips);
            let r = check_unilateral(&loaded.instance, &loaded.config, &set)?;
            print_json(&report::deviation(&r))?;
            if r.violated {
                return Ok(EXIT_VIOLATION);
            }
        }
        Command::CheckGsp {
            input,
            coalition_size,
            gamma,
            grid,
            budget,
            seed,
            no_type_flips,
        } => {
            let loaded = input.load()?;
            let set = grid_set(grid, &loaded, no_type_flips);
            let search = CoalitionSearch {
                max_size: coalition_size,
                gamma,
                budget,
                seed,
            };
            let r = check_coalition(&loaded.instance, &loaded.config, &set, &search)?;
            print_json(&report::deviation(&r))?;
            if r.violated {
                return Ok(EXIT_VIOLATION);
            }
        }
        Command::Sweep {
            space,
            lambda_grid,
            budget,
            seed,
            dual_rule,
            generator,
            output,
        } => {
            let rule = DualRule::from(dual_rule);
            let curve = sweep(space, &lambda_grid, budget, seed, rule, &(&generator).into())?;
            let records = report::sweep_records(&curve, rule)?;
            let sink: Box<dyn Write> = match &output {
                Some(path) => Box::new(
                    std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?,
                ),
                None => Box::new(io::stdout().lock()),
            };
            let mut writer = csv::Writer::from_writer(sink);
            for r in &records {
                writer.serialize(r)?;
            }
            writer.flush()?;
            let exceeded: Vec<_> = records.iter().filter(|r| r.exceeds(BOUND_SLACK)).collect();
            for r in &exceeded {
                eprintln!(
                    "bound exceeded: lambda {} ({}) ratio {} > {}",
                    r.lambda, r.eta_mode, r.empirical_ratio, r.bound
                );
            }
            if !exceeded.is_empty() {
                return Ok(EXIT_ASSERTION);
            }
        }
        Command::LbVerify { n, c, epsilon } => {
            print_json(&report::lower_bound(&lb_verify(n, c, epsilon)?))?;
        }
        Command::Fuzz {
            space,
            seed,
            count,
            lambda_grid,
            dual_rule,
            generator,
        } => {
            let cfg = FuzzConfig {
                count,
                seed,
                lambdas: lambda_grid,
                generator: (&generator).into(),
                dual_rule: dual_rule.into(),
            };
            let rows = fuzz_bounds(space, &cfg)?;
            let name = space.name();
            print_json(&Value::Array(rows.iter().map(|r| report::fuzz_row(name, r)).collect()))?;
            if !rows.iter().all(|r| r.passed()) {
                return Ok(EXIT_ASSERTION);
            }
        }
        Command::Witness {
            space,
            target,
            lambda,
            n,
        } => {
            let w = witness::<f64>(space, target.into(), lambda, n)?;
            let cfg = MechanismConfig::new(lambda)?;
            let file = InstanceFile::from_instance(&w.instance, &cfg);
            eprintln!("{} (expected ratio {})", w.description, w.expected_ratio);
            let mut out = io::stdout().lock();
            serde_json::to_writer_pretty(&mut out, &file)?;
            writeln!(out)?;
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
