//! Configuration, dispatch and reporting for the `specprod` experiment runner.

pub mod config;
pub mod plot;
pub mod report;
pub mod study;

pub use config::{ConfigError, DegreeSpec, Exponent, ExperimentConfig, OutputFormat, Pairing, Study};
pub use plot::{plot_svg, PlotError};
pub use report::{emit_report, parse_json_report, FitVariable, InvariantCheck, NamedFit, NamedValue, ReportDocument};
pub use study::{run_study, RunError};
