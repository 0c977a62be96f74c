// SPDX-License-Identifier: Apache-2.0

use std::io;
use std::process::ExitCode;

fn main() -> ExitCode {
    let code = analog_dj_cli::run(std::env::args_os(), &mut io::stdout(), &mut io::stderr());
    ExitCode::from(code as u8)
}
