//! `enet` command line: validate and format `.enet` files, simulate, analyze,
//! export state graphs, and run the risk pipeline.
//!
//! Exit codes: 0 success, 1 validation/check failure or bad input data,
//! 2 usage or I/O error.

mod args;
mod net_cmds;
mod risk_cmd;

use std::ffi::OsString;
use std::io::{IsTerminal, Write};

use clap::Parser;

pub use args::{Cli, Command};
pub use net_cmds::trace_line;

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

/// Error that ends a command: message for stderr plus exit code.
#[derive(Debug)]
pub(crate) struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn data(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_FAIL,
            message: message.into(),
        }
    }
}

pub(crate) type CmdResult = Result<u8, Failure>;

/// Output streams plus whether diagnostics may use ANSI colour.
pub(crate) struct Io<'a> {
    pub out: &'a mut dyn Write,
    pub err: &'a mut dyn Write,
    pub color: bool,
}

impl Io<'_> {
    /// Writes a diagnostic line, colouring its leading `error`/`warning` word.
    pub fn diagnostic(&mut self, line: &str) {
        let line = if self.color {
            colorize(line)
        } else {
            line.to_owned()
        };
        let _ = writeln!(self.err, "{line}");
    }
}

fn colorize(line: &str) -> String {
    for (word, code) in [("error", "31"), ("warning", "33")] {
        if let Some(rest) = line.strip_prefix(word) {
            return format!("\x1b[1;{code}m{word}\x1b[0m{rest}");
        }
    }
    line.to_owned()
}

/// `ENET_COLOR=never` disables colour; `auto` (the default) enables it only
/// when stderr is a terminal.
fn color_enabled() -> bool {
    match std::env::var("ENET_COLOR").as_deref() {
        Ok("never") => false,
        _ => std::io::stderr().is_terminal(),
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_USAGE
                }
            };
        }
    };
    let mut io = Io {
        out,
        err,
        color: color_enabled(),
    };
    let result = match &cli.command {
        Command::Validate(a) => net_cmds::validate(a, &mut io),
        Command::Format(a) => net_cmds::format(a, &mut io),
        Command::Simulate(a) => net_cmds::simulate(a, &mut io),
        Command::Analyze(a) => net_cmds::analyze(a, &mut io),
        Command::ExportDot(a) => net_cmds::export_dot(a, &mut io),
        Command::Risk(a) => risk_cmd::risk(a, &mut io),
    };
    let code = match result {
        Ok(code) => code,
        Err(f) => {
            if !f.message.is_empty() {
                let _ = writeln!(io.err, "enet: {}", f.message);
            }
            f.code
        }
    };
    let _ = io.out.flush();
    code
}
