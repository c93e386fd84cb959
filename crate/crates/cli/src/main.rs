use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use oblab::formalism::{to_csv, Seed};
use oblab::harness::{
    candidate_from_text, candidate_to_text, load_bundle, make_challenge, registry, write_reports,
    ChallengeSpec, Experiment, ExperimentPlan, Flavour,
};

/// Security games and obfuscation challenges over a small program IR.
#[derive(Parser)]
#[command(name = "oblab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a security game over an n-grid and print the report as CSV.
    Game(GameArgs),
    /// Make, verify or reveal challenge bundles.
    #[command(subcommand)]
    Challenge(ChallengeCommand),
    /// List registered classes, assets, obfuscators and attackers.
    List,
}

#[derive(Args)]
struct GameArgs {
    #[arg(long)]
    class: String,
    #[arg(long)]
    obf: String,
    #[arg(long = "attack")]
    attacker: String,
    /// Defaults to the class's default asset.
    #[arg(long)]
    asset: Option<String>,
    #[arg(long, value_delimiter = ',', required = true)]
    n_grid: Vec<usize>,
    #[arg(long, default_value_t = 4096)]
    trials: u64,
    /// Hex seed, at most 64 digits.
    #[arg(long, env = "OBLAB_SEED")]
    seed: String,
    /// CSV path; the JSON mirror is written next to it.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum ChallengeCommand {
    Make(MakeArgs),
    /// Exit 0 if the candidate is accepted, 1 if rejected.
    Verify {
        #[arg(long)]
        bundle: PathBuf,
        /// Hex for bit-string assets, JSON for DFA assets.
        #[arg(long)]
        candidate: PathBuf,
    },
    /// Print the correct asset. Needs the secret part.
    Reveal {
        #[arg(long)]
        bundle: PathBuf,
    },
}

#[derive(Args)]
struct MakeArgs {
    #[arg(long)]
    class: String,
    #[arg(long)]
    obf: String,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value = "setter")]
    flavour: Flavour,
    #[arg(long)]
    asset: Option<String>,
    #[arg(long, env = "OBLAB_SEED")]
    seed: String,
    #[arg(long)]
    out: PathBuf,
}

fn game(args: GameArgs) -> Result<ExitCode> {
    let plan = ExperimentPlan {
        experiments: vec![Experiment {
            class: args.class,
            asset: args.asset,
            obf: args.obf,
            attacker: args.attacker,
            grid: args.n_grid,
            trials: args.trials,
            seed: args.seed,
        }],
    };
    let reports = plan.run()?;
    if let Some(out) = &args.out {
        let json =
            write_reports(&reports, out).with_context(|| format!("writing {}", out.display()))?;
        eprintln!("wrote {} and {}", out.display(), json.display());
    }
    print!("{}", to_csv(&reports));
    Ok(ExitCode::SUCCESS)
}

fn challenge(cmd: ChallengeCommand) -> Result<ExitCode> {
    match cmd {
        ChallengeCommand::Make(a) => {
            let spec = ChallengeSpec {
                class: a.class,
                obf: a.obf,
                n: a.n,
                flavour: a.flavour,
                seed: Seed::from_hex(&a.seed)?,
                asset: a.asset,
            };
            let meta = make_challenge(&spec, &a.out)?;
            println!("{}", meta.bundle_id);
            Ok(ExitCode::SUCCESS)
        }
        ChallengeCommand::Verify { bundle, candidate } => {
            let bundle = load_bundle(&bundle)?;
            let text = std::fs::read_to_string(&candidate)
                .with_context(|| format!("reading {}", candidate.display()))?;
            let cand = candidate_from_text(bundle.schema()?, &text)?;
            if bundle.verify(&cand)? {
                println!("accept");
                Ok(ExitCode::SUCCESS)
            } else {
                println!("reject");
                Ok(ExitCode::from(1))
            }
        }
        ChallengeCommand::Reveal { bundle } => {
            let bundle = load_bundle(&bundle)?;
            println!("{}", candidate_to_text(bundle.schema()?, &bundle.reveal()?));
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn list() -> Result<ExitCode> {
    println!("classes:");
    for id in registry::CLASS_IDS {
        let class = registry::class(id)?;
        let assets: Vec<String> = class
            .assets()
            .iter()
            .map(|a| {
                let flavour = if a.needs_aux() { "setter" } else { "public" };
                format!("{} ({flavour})", a.id())
            })
            .collect();
        let range = class.n_range();
        println!(
            "  {id:<10} n in {}..={}  assets: {}",
            range.start(),
            range.end(),
            assets.join(", ")
        );
    }
    println!("obfuscators (chain with '+'):");
    for id in registry::OBFUSCATOR_IDS {
        println!("  {id:<20} class {}", registry::obfuscator(id)?.class_id());
    }
    println!("attackers:");
    for id in registry::ATTACKER_IDS {
        println!("  {id}");
    }
    println!("  bruteforce:<q>");
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Game(args) => game(args),
        Command::Challenge(cmd) => challenge(cmd),
        Command::List => list(),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        ExitCode::from(2)
    })
}
