mod commands;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mcg_core::tower::cache::CacheError;
use mcg_core::tower::TowerError;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "mcg", version, about = "Finite-window constructions on the tower of finite groups")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum TowerArg {
    Paper,
    Toy,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    #[arg(long, global = true, value_enum, default_value_t = TowerArg::Paper)]
    pub tower: TowerArg,
    /// highest level to build (paper: at most 4, default 3; toy: default 20)
    #[arg(long, global = true)]
    pub max_level: Option<usize>,
    /// toy interval sizes, comma separated (overrides --max-level)
    #[arg(long, global = true, value_delimiter = ',')]
    pub toy_sizes: Option<Vec<String>>,
    /// `<stage>=<n>`, repeatable; stages d0, scan, d2, witnesses, homogenize, semaphore
    #[arg(long = "budget", global = true, value_name = "STAGE=N")]
    pub budgets: Vec<String>,
    #[arg(long, global = true, env = "MCG_CACHE_DIR")]
    pub cache_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Build the tower and write the level cache.
    TowerBuild,
    /// Evaluate phi(w) at a point.
    Eval {
        #[arg(long)]
        word: String,
        #[arg(long)]
        point: String,
        #[arg(long)]
        inverse: bool,
    },
    /// The D-pipeline.
    Dpipe {
        #[command(subcommand)]
        cmd: DpipeCmd,
    },
    /// Case table of g grafted with f on D.
    SurgeryDemo {
        #[arg(long)]
        g: String,
        /// comma separated site points
        #[arg(long, value_delimiter = ',')]
        d: Vec<String>,
        #[arg(long)]
        f: String,
        /// tabulate the points below this bound as well as E
        #[arg(long, default_value_t = 16)]
        window: u64,
    },
    /// Windowed membership of h in the group.
    Member {
        /// file holding an injection spec for h
        #[arg(long)]
        h: PathBuf,
        /// highest level of the window
        #[arg(long, default_value_t = 10)]
        window: usize,
        /// points checked per level
        #[arg(long, default_value_t = 8)]
        offsets: u64,
        /// `name=<spec>`, repeatable; injections generators may resolve to
        #[arg(long = "known", value_name = "NAME=SPEC")]
        known: Vec<String>,
    },
    /// Run a verification suite, or `all`.
    Verify {
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand, Debug)]
pub enum DpipeCmd {
    Trace {
        #[arg(long)]
        f: String,
        #[arg(long, default_value = "f")]
        name: String,
    },
}

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub msg: String,
}

impl CliError {
    pub fn parse(msg: impl ToString) -> Self {
        Self { code: 2, msg: msg.to_string() }
    }

    pub fn other(msg: impl ToString) -> Self {
        Self { code: 1, msg: msg.to_string() }
    }
}

impl From<TowerError> for CliError {
    fn from(e: TowerError) -> Self {
        let code = match e {
            TowerError::LevelTooLarge { .. } | TowerError::PointBeyondBuiltLevels(_) => 3,
            TowerError::Word(_) | TowerError::WrongLevel { .. } | TowerError::BadConfig(_) => 2,
            _ => 1,
        };
        Self { code, msg: e.to_string() }
    }
}

impl From<CacheError> for CliError {
    fn from(e: CacheError) -> Self {
        let code = match e {
            CacheError::Corrupt { .. } => 5,
            CacheError::Io(_) => 1,
        };
        Self { code, msg: e.to_string() }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok((out, code)) => {
            print!("{out}");
            ExitCode::from(code)
        }
        Err(e) => {
            if !e.msg.is_empty() {
                eprintln!("mcg: {}", e.msg);
            }
            ExitCode::from(e.code)
        }
    }
}
