//! `qpe`: conditional apparatus energy shifts from the command line.

mod args;
mod commands;
mod output;

use std::ffi::OsString;
use std::process::ExitCode;

use args::{ArgError, FormatArg};
use commands::Failure;
use output::{Format, OutputSpec};

fn main() -> ExitCode {
    let argv: Vec<OsString> = std::env::args_os().collect();
    ExitCode::from(run(&argv) as u8)
}

fn run(argv: &[OsString]) -> i32 {
    let cli = match args::parse(argv) {
        Ok(c) => c,
        Err(ArgError::Display(e)) => {
            let _ = e.print();
            return 0;
        }
        Err(ArgError::Usage(msg)) => {
            eprintln!("{msg}");
            return 2;
        }
    };
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return 2;
    }
    let precision = cli.opts.precision.unwrap_or(OutputSpec::DEFAULT_PRECISION);
    if !(OutputSpec::MIN_PRECISION..=OutputSpec::MAX_PRECISION).contains(&precision) {
        eprintln!(
            "error: --precision must be between {} and {} (got {precision})",
            OutputSpec::MIN_PRECISION,
            OutputSpec::MAX_PRECISION
        );
        return 2;
    }
    let format = match cli.opts.format {
        Some(FormatArg::Json) => Format::Json,
        _ => Format::Csv,
    };
    let spec = OutputSpec { format, precision };

    let (doc, code) = match commands::run(cli.group, &cli.opts) {
        Ok(d) => (d, 0),
        Err(Failure::Violations(d)) => {
            eprintln!("error: selftest found violations");
            (d, 1)
        }
        Err(f) => {
            let code = f.exit_code();
            match f {
                Failure::Usage(m) => eprintln!("error: {m}"),
                Failure::Core(e) => eprintln!("error: {e}"),
                Failure::Io(e) => eprintln!("error: {e}"),
                Failure::Violations(_) => unreachable!(),
            }
            return code;
        }
    };
    if let Err(e) = output::emit(&doc.render(spec), cli.opts.out.as_deref()) {
        eprintln!("error: writing output: {e}");
        return Failure::Io(e).exit_code();
    }
    code
}

/// Caps the rayon pool at `QPE_THREADS` when set.
fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("QPE_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().map_err(|_| format!("QPE_THREADS must be a positive integer (got {raw:?})"))?;
    if n == 0 {
        return Err("QPE_THREADS must be at least 1".into());
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}
