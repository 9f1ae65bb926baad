use std::io::{self, BufRead, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use mwk_cli::{output, parse_line, run_source_in, Session};

#[derive(Parser)]
#[command(name = "mwk", version, about = "Exact computations in Milnor-Witt K-theory of fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a `.mwk` script.
    Run {
        script: PathBuf,
        /// Emit a JSON array of records instead of text.
        #[arg(long)]
        json: bool,
        /// Factorization and suite seed (overrides MWK_SEED).
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the randomized rules suite.
    Suite {
        /// Run only rules whose name starts with this prefix.
        #[arg(long)]
        filter: Option<String>,
        #[arg(long, default_value_t = 50)]
        instances: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Interactive session, one statement per line.
    Repl,
}

fn code(c: i32) -> ExitCode {
    ExitCode::from(c as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { script, json, seed } => {
            if let Some(s) = seed {
                std::env::set_var("MWK_SEED", s.to_string());
            }
            let src = match std::fs::read_to_string(&script) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("mwk: cannot read {}: {e}", script.display());
                    return code(1);
                }
            };
            let mut session = Session::new();
            if let Some(s) = seed {
                session.suite_seed = s;
            }
            let out = run_source_in(&mut session, &src);
            if json {
                print!("{}", output::render_json(&out));
            } else {
                print!("{}", output::render_text(&out));
            }
            if let Some(e) = &out.error {
                eprintln!("{}: {e}", script.display());
            }
            code(out.exit_code())
        }
        Command::Suite { filter, instances, seed, json } => {
            let mut stmt = format!("rules-suite instances {instances} seed {seed}");
            if let Some(f) = &filter {
                stmt = format!("rules-suite filter {f} instances {instances} seed {seed}");
            }
            let out = run_source_in(&mut Session::new(), &stmt);
            if json {
                print!("{}", output::render_json(&out));
            } else {
                print!("{}", output::render_text(&out));
            }
            if let Some(e) = &out.error {
                eprintln!("{e}");
            }
            code(out.exit_code())
        }
        Command::Repl => repl(),
    }
}

fn repl() -> ExitCode {
    let mut session = Session::new();
    let stdin = io::stdin();
    let mut lineno = 0;
    loop {
        print!("mwk> ");
        io::stdout().flush().ok();
        let mut line = String::new();
        match stdin.lock().read_line(&mut line) {
            Ok(0) => {
                println!();
                return code(0);
            }
            Ok(_) => {}
            Err(e) => {
                eprintln!("mwk: {e}");
                return code(1);
            }
        }
        lineno += 1;
        let stmt = match parse_line(line.trim_end(), lineno) {
            Ok(Some(s)) => s,
            Ok(None) => continue,
            Err(e) => {
                eprintln!("{e}");
                continue;
            }
        };
        match session.exec(&stmt) {
            Ok(Some(r)) => print!("{}", output::render_record(&r)),
            Ok(None) => {}
            Err(e) => eprintln!("{e}"),
        }
    }
}
