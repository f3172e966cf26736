//! Configuration parsing and file emitters.

pub mod config;
pub mod csv;
pub mod pgm;

pub use config::{parse_config, OutputFormat, RunConfig, TimeSpec};
pub use csv::{
    format_carpet_csv, format_report_csv, format_slice_csv, read_csv_slice, write_carpet_csv,
    write_csv_slice, write_report_csv,
};
pub use pgm::{decode_pgm, encode_pgm, write_pgm_carpet, Pgm};
