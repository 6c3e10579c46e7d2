use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use fusionlab_cli::{envelope, run, Cli, Diagnostic, Failure};

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let wants_json = args.iter().any(|a| a == "--json");
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            if wants_json {
                let command = args.get(1).map(String::as_str).unwrap_or("");
                let diag = Diagnostic::error("usage", e.kind().to_string());
                print!("{}", envelope(command, None, &[diag]));
            } else {
                let _ = e.print();
            }
            return ExitCode::from(2);
        }
    };
    let command = cli.command.name();
    let (stdout, code) = match run(&cli) {
        Ok(out) if cli.json => (envelope(command, Some(out.json), &[]), 0),
        Ok(out) => (out.text, 0),
        Err(failure) => {
            let (diags, code) = match failure {
                Failure::Domain(d) => (d, 1),
                Failure::Usage(msg) => (vec![Diagnostic::error("usage", msg)], 2),
            };
            if cli.json {
                (envelope(command, None, &diags), code)
            } else {
                for d in &diags {
                    match &d.span {
                        Some(s) => eprintln!("error: {}:{}: {}", s.line, s.column, d.message),
                        None => eprintln!("error: {}", d.message),
                    }
                }
                (String::new(), code)
            }
        }
    };
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(stdout.as_bytes());
    let _ = out.flush();
    ExitCode::from(code)
}
