use std::io::{self, IsTerminal};
use std::process::ExitCode;
use std::thread;

use clap::Parser;

use mini_imandra::cli::{self, Args};
use mini_imandra::driver::Driver;

/// The evaluator and the term passes recurse on the native stack.
const STACK: usize = 512 << 20;

fn main() -> ExitCode {
    let args = Args::parse();
    let worker = thread::Builder::new().stack_size(STACK).spawn(move || {
        let cfg = args.config();
        let out = args.output();
        let mut stdout = io::stdout().lock();
        let mut stderr = io::stderr();
        if args.files.is_empty() {
            let mut d = Driver::new(cfg);
            let prompt = io::stdin().is_terminal();
            let mut input = io::stdin().lock();
            match cli::repl(&mut d, &out, &mut input, &mut stdout, &mut stderr, prompt) {
                Ok(()) => 0,
                Err(_) => 3,
            }
        } else {
            cli::run_batch(&args.files, cfg, &out, &mut stdout, &mut stderr)
        }
    });
    match worker.map(|h| h.join()) {
        Ok(Ok(code)) => ExitCode::from(code as u8),
        _ => ExitCode::from(3),
    }
}
