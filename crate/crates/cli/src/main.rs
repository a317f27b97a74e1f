use std::fs::File;
use std::io::{BufWriter, Write};
use std::process::ExitCode;

use clap::Parser;

mod commands;
mod error;
mod settings;
mod table;

use error::CliError;
use settings::{Cli, Mode, Settings};
use table::Table;

fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(raw) = std::env::var("DICKE_THREADS") {
        let n: usize = raw
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Config(format!("DICKE_THREADS=`{raw}` is not a positive integer")))?;
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))
}

fn emit(table: &Table, settings: &Settings) -> Result<(), CliError> {
    let format = settings.format()?;
    match settings.out() {
        Some(path) => {
            let file = File::create(path)
                .map_err(|e| CliError::Io(format!("creating {}: {e}", path.display())))?;
            let mut w = BufWriter::new(file);
            table.write(format, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut w = stdout.lock();
            table.write(format, &mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    let settings = Settings::resolve(cli.mode.flags())?;
    // Fail on a bad format before doing any work.
    settings.format()?;
    let pool = thread_pool()?;
    pool.install(|| {
        let table = match &cli.mode {
            Mode::EpsilonSweep(_) => commands::epsilon_sweep(&settings)?,
            Mode::CouplingSweep(_) => commands::coupling_sweep(&settings)?,
            Mode::PhaseDiagram(_) => commands::phase_diagram(&settings)?,
            Mode::SymmetryTables(_) => commands::symmetry_tables(&settings)?,
            Mode::QuarticDemo(_) => commands::quartic_demo(&settings)?,
            Mode::Ensemble(_) => commands::ensemble(&settings)?,
            Mode::Decay(_) => commands::decay(&settings)?,
            Mode::Verify(_) => {
                let (table, passed) = commands::verify(&settings)?;
                emit(&table, &settings)?;
                if !passed {
                    let failed: Vec<String> = table
                        .rows
                        .iter()
                        .filter(|r| r[1] == table::Cell::Bool(false))
                        .map(|r| match &r[0] {
                            table::Cell::Text(s) => s.clone(),
                            _ => String::new(),
                        })
                        .collect();
                    return Err(CliError::Verification(failed.join(", ")));
                }
                return Ok(());
            }
        };
        emit(&table, &settings)
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dicke: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
