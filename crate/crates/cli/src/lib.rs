//! Scenario files: parsing, canonical printing, running checks and reports.

pub mod ast;
pub mod parse;
pub mod print;
pub mod report;
pub mod run;

pub use ast::{Format, Scenario};
pub use parse::{parse_scenario, DslError};
pub use print::print_scenario;
pub use report::{to_json, to_text, Report};
pub use run::{plan, run_scenario, RunOptions};

/// Render a report in the requested format.
pub fn emit_report(rep: &Report, format: Format) -> String {
    match format {
        Format::Text => to_text(rep),
        Format::Json => to_json(rep),
    }
}
