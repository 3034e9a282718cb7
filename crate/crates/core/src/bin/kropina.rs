use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use kropina::einstein::TheoremId;
use kropina::workbench::{
    error_exit_code, exit, load_scenario, run_check, run_convert, run_verify, LoadedScenario, ReportDocument,
    Representation, RunOptions, WeightSpec, BUILTINS,
};
use kropina::Error;

#[derive(Parser)]
#[command(name = "kropina", version, about = "Kropina metric workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the weighted Einstein characterization selected by the weights.
    Check(CheckArgs),
    /// Compare every closed form with the generic Finsler pipeline.
    Verify(VerifyArgs),
    /// Rewrite a scenario in the other representation.
    Convert(ConvertArgs),
    /// Built-in scenarios.
    Scenarios {
        #[command(subcommand)]
        action: ScenariosAction,
    },
}

#[derive(Subcommand)]
enum ScenariosAction {
    List,
}

#[derive(Args)]
struct Common {
    /// Built-in scenario name (`random:<seed>` included) or a JSON file.
    #[arg(long)]
    scenario: String,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    points: Option<usize>,
    #[arg(long)]
    dirs: Option<usize>,
    /// Write the JSON report here, `-` for stdout.
    #[arg(long)]
    json_out: Option<PathBuf>,
    #[arg(long)]
    no_timings: bool,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    common: Common,
    /// `auto`, `41`, `44`, `51` or `61`.
    #[arg(long, default_value = "auto")]
    theorem: String,
    #[arg(long)]
    tol: Option<f64>,
    /// Preset (`plain`, `ricInf`, `pric`, `ricN:<N>`) or `<a>,<c>`.
    #[arg(long)]
    weights: Option<String>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct ConvertArgs {
    #[command(flatten)]
    common: Common,
    /// `nav` or `ab`.
    #[arg(long)]
    to: String,
    /// New gauge expression in x1..xn.
    #[arg(long, allow_hyphen_values = true)]
    gauge: Option<String>,
    /// Write the converted scenario here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn options(&self) -> RunOptions {
        RunOptions {
            seed: self.seed,
            points: self.points,
            directions: self.dirs,
            tolerance: None,
            timings: !self.no_timings,
        }
    }
}

fn fail(e: &Error) -> i32 {
    eprintln!("error: {e}");
    error_exit_code(e)
}

fn emit(doc: &ReportDocument, json_out: Option<&PathBuf>) -> i32 {
    match json_out {
        Some(p) if p.as_os_str() == "-" => println!("{}", doc.to_json_pretty()),
        Some(p) => {
            print!("{}", doc.render_text());
            if let Err(e) = std::fs::write(p, doc.to_json_pretty() + "\n") {
                return fail(&Error::Io(format!("{}: {e}", p.display())));
            }
        }
        None => print!("{}", doc.render_text()),
    }
    doc.exit_code
}

fn check(args: CheckArgs) -> Result<i32, Error> {
    let mut loaded = load_scenario(&args.common.scenario)?;
    let theorem = match args.theorem.as_str() {
        "auto" => None,
        t => Some(t.parse::<TheoremId>()?),
    };
    if let Some(w) = &args.weights {
        let spec = WeightSpec::parse(w)?;
        loaded.weights = spec.config(loaded.scenario.dimension)?;
        loaded.scenario.weights = spec;
    }
    let opts = RunOptions {
        tolerance: args.tol,
        ..args.common.options()
    };
    Ok(emit(&run_check(&loaded, theorem, &opts), args.common.json_out.as_ref()))
}

fn verify(args: VerifyArgs) -> Result<i32, Error> {
    let loaded = load_scenario(&args.common.scenario)?;
    Ok(emit(
        &run_verify(&loaded, &args.common.options()),
        args.common.json_out.as_ref(),
    ))
}

fn convert(args: ConvertArgs) -> Result<i32, Error> {
    let to: Representation = args.to.parse()?;
    let loaded: LoadedScenario = load_scenario(&args.common.scenario)?;
    let (doc, out) = run_convert(&loaded, to, args.gauge.as_deref(), &args.common.options());
    if let Some(s) = out {
        let text = s.to_json_pretty() + "\n";
        match &args.out {
            Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?,
            None => print!("{text}"),
        }
    }
    match &args.common.json_out {
        Some(p) if p.as_os_str() == "-" => eprintln!("{}", doc.to_json_pretty()),
        Some(p) => {
            std::fs::write(p, doc.to_json_pretty() + "\n").map_err(|e| Error::Io(format!("{}: {e}", p.display())))?
        }
        None => eprint!("{}", doc.render_text()),
    }
    Ok(doc.exit_code)
}

fn run(cli: Cli) -> i32 {
    let result = match cli.command {
        Command::Check(a) => check(a),
        Command::Verify(a) => verify(a),
        Command::Convert(a) => convert(a),
        Command::Scenarios {
            action: ScenariosAction::List,
        } => {
            for (name, description) in BUILTINS {
                println!("{name:<18} {description}");
            }
            Ok(exit::PASS)
        }
    };
    result.unwrap_or_else(|e| fail(&e))
}

fn main() -> ExitCode {
    let code = match Cli::try_parse() {
        Ok(cli) => run(cli),
        Err(e) => {
            let _ = e.print();
            match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => exit::PASS,
                _ => exit::USAGE,
            }
        }
    };
    ExitCode::from(code as u8)
}
