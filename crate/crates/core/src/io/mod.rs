//! CSV ingestion and result serialization.

mod export;
mod load;
mod schema;

pub use export::{
    fmt_f64, read_dataset_csv, read_synthetic_csv, write_chain_csv, write_dataset_csv, write_json,
    write_report_table, write_synthetic_csv, write_table_csv,
};
pub use load::{build_dataset, load_dataset, read_raw_csv, LoadedData};
pub use schema::{ColumnRole, ColumnSpec, DataSchema};
