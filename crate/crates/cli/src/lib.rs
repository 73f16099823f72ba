//! Command implementations behind the `mibids` binary.

pub mod commands;
pub mod experiment;
pub mod select;
pub mod settings;

pub use experiment::{paper_matrix, run_experiment, CellSpec, ExperimentSpec, ReportBundle, Table};
pub use select::{select_features, Selection, Selector};
pub use settings::Settings;
