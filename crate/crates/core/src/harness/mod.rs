//! Data ingestion, synthetic instances and the experiment drivers.

mod experiment;
mod ingest;
mod synth;

pub use experiment::{
    run_random_bad, run_table1, ExperimentConfig, InputSource, RandomBadRow, RowLabel, RunRecord, StatsRow,
    Table1Report, random_bad_csv,
};
pub use ingest::{ingest_csv, read_points_csv, write_points_csv, CsvOptions, Ingested};
pub use synth::{build_random_bad_instance, clean_first_tree, synth_gaussian_mixture, MixtureSpec, RandomBadInstanceSpec};
