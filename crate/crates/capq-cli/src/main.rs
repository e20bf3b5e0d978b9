use std::process::ExitCode;

fn main() -> ExitCode {
    let result = capq_cli::parse_args(std::env::args_os().skip(1))
        .and_then(|config| capq_cli::run(&config, &mut std::io::stdout().lock()));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let code = capq_cli::exit_code(&err);
            match err.downcast_ref::<clap::Error>() {
                Some(e) => {
                    let _ = e.print();
                }
                None => eprintln!("error: {err:#}"),
            }
            ExitCode::from(code as u8)
        }
    }
}
