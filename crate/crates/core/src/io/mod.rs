//! Configuration, snapshot persistence and report files.

mod config;
mod report;
mod snapshot;

pub use config::{
    load_config, load_config_with, InitialCondition, PartitionKind, ProviderMode, RunConfig, ECHO_FILE,
};
pub use report::{
    emit_reports, fmt_f64, svg_line_plot, write_ledger_csv, write_monitor_csv, write_series_csv,
    write_study_csv, write_summary_csv, LEDGER_HEADER, MONITOR_HEADER, SERIES_HEADER,
};
pub use snapshot::{
    load_field, persist_field, read_trajectory, write_snapshot, write_trajectory, FieldSnapshot,
    FORMAT_VERSION, HEADER_LEN, MAGIC, SNAPSHOT_EXT,
};
