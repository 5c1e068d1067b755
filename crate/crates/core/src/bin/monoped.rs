//! Command-line entry point. Exit codes: 0 success, 1 configuration error, 2 runtime failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use monoped_codesign::cli::{self, KindSelection};
use monoped_codesign::codesign::CaseKind;
use monoped_codesign::config::RunConfig;
use monoped_codesign::Error;

#[derive(Parser)]
#[command(
    name = "monoped",
    version,
    about = "Actuator sizing and co-design for a jumping monoped"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON run configuration; built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// RNG seed (overrides the config).
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; defaults to all cores.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Isspg,
    Esspg,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum CaseArg {
    #[value(alias = "nominal-eval")]
    Nominal,
    A,
    B,
    C,
    Custom,
}

#[derive(Subcommand)]
enum Command {
    /// Build the ratio-binned actuator catalog.
    Stage1 {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "both")]
        kind: KindArg,
    },
    /// Optimize one case with CMA-ES.
    Codesign {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        case: Option<CaseArg>,
    },
    /// Simulate one design point and write its trajectory.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// l1,l2,g_k,g_h,K,C,T; defaults to the config's case values.
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
        /// Take the point from a best_point.json file instead.
        #[arg(long, conflicts_with = "point")]
        point_file: Option<PathBuf>,
    },
    /// Write the design manifest for a best_point.json file.
    Export {
        #[command(flatten)]
        common: Common,
        /// Defaults to <out>/best_point.json.
        #[arg(long)]
        best_point: Option<PathBuf>,
    },
    /// Stage 1, co-design and export in sequence.
    Pipeline {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        case: Option<CaseArg>,
    },
    /// Component mass breakdown per ratio bin and link mass table.
    MassReport {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "both")]
        kind: KindArg,
    },
}

fn kind(k: KindArg) -> KindSelection {
    match k {
        KindArg::Isspg => KindSelection::Isspg,
        KindArg::Esspg => KindSelection::Esspg,
        KindArg::Both => KindSelection::Both,
    }
}

fn case(c: Option<CaseArg>) -> Option<CaseKind> {
    c.map(|c| match c {
        CaseArg::Nominal => CaseKind::Nominal,
        CaseArg::A => CaseKind::A,
        CaseArg::B => CaseKind::B,
        CaseArg::C => CaseKind::C,
        CaseArg::Custom => CaseKind::Custom,
    })
}

fn load(common: &Common) -> Result<(RunConfig, PathBuf), Error> {
    let mut config = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::shipped_default(),
    };
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    if let Some(out) = &common.out {
        config.output_dir = out.clone();
    }
    let out = config.output_dir.clone();
    Ok((config, out))
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::Stage1 { common, kind: k } => {
            let (config, out) = load(&common)?;
            let r = cli::with_jobs(common.jobs, || cli::cmd_stage1(&config, kind(k), &out))??;
            print!("{}", r.summary);
        }
        Command::Codesign { common, case: c } => {
            let (config, out) = load(&common)?;
            let r = cli::with_jobs(common.jobs, || cli::cmd_codesign(&config, case(c), &out))??;
            print!("{}", r.summary);
        }
        Command::Simulate {
            common,
            point,
            point_file,
        } => {
            let (config, out) = load(&common)?;
            let y = match (point, point_file) {
                (Some(text), _) => cli::parse_point(&text)?,
                (None, Some(path)) => cli::read_best_point(&path)?.point,
                (None, None) => config.case.values,
            };
            let r = cli::with_jobs(common.jobs, || cli::cmd_simulate(&config, &y, &out))??;
            print!("{}", r.summary);
        }
        Command::Export { common, best_point } => {
            let (config, out) = load(&common)?;
            let bp = best_point.unwrap_or_else(|| out.join(cli::BEST_POINT_JSON));
            let r = cli::with_jobs(common.jobs, || cli::cmd_export(&config, &bp, &out))??;
            println!("wrote {}", r.path.display());
        }
        Command::Pipeline { common, case: c } => {
            let (config, out) = load(&common)?;
            let r = cli::with_jobs(common.jobs, || cli::cmd_pipeline(&config, case(c), &out))??;
            print!("{}", r.text);
        }
        Command::MassReport { common, kind: k } => {
            let (config, out) = load(&common)?;
            let path = cli::with_jobs(common.jobs, || cli::cmd_mass_report(&config, kind(k), &out))??;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config_error() { 1 } else { 2 })
        }
    }
}
