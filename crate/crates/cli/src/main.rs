use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use twistss_cli::analyze::analyze;
use twistss_cli::input::load_model;
use twistss_cli::massey_cmd::{self, MasseyRequest};
use twistss_cli::selftest;
use twistss_core::parse_twist;

#[derive(Parser)]
#[command(
    name = "twistss",
    version,
    about = "Twisted de Rham cohomology and its spectral sequence"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Computes twisted cohomology and all pages, and verifies the differentials.
    Analyze {
        /// Model file, or the name of a bundled model.
        model: String,
        #[arg(long, default_value = "")]
        twist: String,
        #[arg(long)]
        max_page: Option<usize>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Massey products and the defining systems behind the higher differentials.
    Massey(MasseyArgs),
    /// Runs the acceptance suite on the bundled models.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Additional model files (`*.json`) to include.
        #[arg(long)]
        models: Option<PathBuf>,
    },
}

#[derive(Args)]
struct MasseyArgs {
    model: String,
    #[arg(long, default_value = "")]
    twist: String,
    #[arg(long, num_args = 3, value_names = ["X1", "X2", "X3"], conflicts_with_all = ["thm41", "thm42"])]
    triple: Option<Vec<String>>,
    #[arg(long, requires_all = ["class", "t"], conflicts_with = "thm42")]
    thm41: bool,
    #[arg(long, requires_all = ["class", "t", "s"])]
    thm42: bool,
    #[arg(long)]
    class: Option<String>,
    #[arg(long)]
    t: Option<usize>,
    #[arg(long)]
    s: Option<usize>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

impl MasseyArgs {
    fn request(&self) -> Result<MasseyRequest, String> {
        if let Some(t) = &self.triple {
            return Ok(MasseyRequest::Triple([t[0].clone(), t[1].clone(), t[2].clone()]));
        }
        let class = self.class.clone().unwrap_or_default();
        match (self.thm41, self.thm42, self.t, self.s) {
            (true, _, Some(t), _) => Ok(MasseyRequest::Thm41 { class, t }),
            (_, true, Some(t), Some(s)) => Ok(MasseyRequest::Thm42 { class, t, s }),
            _ => Err("one of --triple, --thm41 or --thm42 is required".into()),
        }
    }
}

fn emit(text: String, out: Option<&PathBuf>) -> Result<(), String> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(value) = std::env::var("TWISTSS_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .parse()
        .map_err(|_| format!("TWISTSS_THREADS must be a positive integer, got `{value}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n.max(1))
        .build_global()
        .map_err(|e| e.to_string())
}

fn run(cli: Cli) -> Result<i32, String> {
    configure_threads()?;
    match cli.command {
        Command::Analyze {
            model,
            twist,
            max_page,
            format,
            out,
        } => {
            let model = load_model(&model).map_err(|e| e.to_string())?;
            let h = parse_twist(&model, &twist).map_err(|e| e.to_string())?;
            let report = analyze(&model, &h, max_page).map_err(|e| e.to_string())?;
            let text = match format {
                Format::Text => report.to_text(),
                Format::Json => report.to_json(),
            };
            emit(text, out.as_ref())?;
            Ok(report.exit_code())
        }
        Command::Massey(args) => {
            let request = args.request()?;
            let model = load_model(&args.model).map_err(|e| e.to_string())?;
            let h = parse_twist(&model, &args.twist).map_err(|e| e.to_string())?;
            let report = massey_cmd::run(&model, &h, &request).map_err(|e| e.to_string())?;
            let text = match args.format {
                Format::Text => report.to_text(),
                Format::Json => report.to_json(),
            };
            emit(text, None)?;
            Ok(report.exit_code())
        }
        Command::Selftest { seed, models } => {
            let results = selftest::run(seed, models.as_deref()).map_err(|e| e.to_string())?;
            for r in &results {
                println!("{}", r.line());
            }
            let failed = results.iter().filter(|r| !r.passed).count();
            println!("{} of {} criteria passed", results.len() - failed, results.len());
            Ok(if failed == 0 { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
