use std::process::ExitCode;

use atomfwm_cli::{configure, execute, parse, CliError};

fn run(args: &[String]) -> Result<ExitCode, CliError> {
    let cli = match parse(args)? {
        Ok(cli) => cli,
        Err(help) => {
            help.print().ok();
            return Ok(ExitCode::SUCCESS);
        }
    };
    let report = execute(&configure(&cli)?, args)?;
    for f in &report.files {
        println!("{}", f.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args: Vec<String> = std::env::args().collect();
    run(&args).unwrap_or_else(|e| {
        eprintln!("{}", e.record());
        ExitCode::from(e.exit_code())
    })
}
