//! Library behind the `charp-orbits` binary: the expression parser, problem
//! files, orbit enumeration with its disk cache, and the commands.

pub mod commands;
pub mod error;
pub mod expr;
pub mod orbit;
pub mod problem;
pub mod setops;

pub use commands::{run, Command, Report, RunOptions};
pub use error::CliError;
pub use expr::{parse_expr, ParseError, ParseErrorKind};
pub use problem::Problem;
