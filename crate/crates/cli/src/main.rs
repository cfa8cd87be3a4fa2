use std::io;
use std::process::ExitCode;

fn main() -> ExitCode {
    let config = match mirrorint_cli::parse_args(std::env::args_os()) {
        Ok(c) => c,
        Err((code, msg)) => {
            if code == mirrorint_cli::EXIT_OK {
                print!("{msg}");
            } else {
                eprint!("{msg}");
            }
            return ExitCode::from(code as u8);
        }
    };
    let stdout = io::stdout();
    let code = mirrorint_cli::run(&config, &mut stdout.lock());
    ExitCode::from(code as u8)
}
