//! Batch runner behind the `dqsim` binary: configs, sweeps, verification
//! suites and the cost calculator.

pub mod config;
pub mod row;
pub mod run;
pub mod sweep;
pub mod verify;

pub use config::{AutoOr, Protocol, RunConfig};
pub use row::{read_csv, to_csv_string, write_csv, ResultRow, COLUMNS};
pub use run::{run_config, RunOptions};
pub use sweep::{loglog_slope, parse_value, slope_row, sweep};
pub use verify::{render_table, run_suite, Check, Suite};

use dqsim_core::{Error, ErrorClass};

pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_CAPABILITY: u8 = 3;
pub const EXIT_NUMERICAL: u8 = 4;

pub fn exit_code(err: &Error) -> u8 {
    match err.class() {
        ErrorClass::Config => EXIT_CONFIG,
        ErrorClass::Capability => EXIT_CAPABILITY,
        ErrorClass::Numerical => EXIT_NUMERICAL,
    }
}
