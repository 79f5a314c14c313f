use std::io::Write;

use anyhow::{Context, Result};

fn main() -> Result<()> {
    let mut out = std::io::stdout().lock();
    let mut err = std::io::stderr().lock();
    let code = apq_core::cli::run(std::env::args_os(), &mut out, &mut err);
    out.flush().context("flushing stdout")?;
    std::process::exit(code)
}
