//! Command-line front end for `fanocoeff-core`: output formats, certificate
//! files and threaded certification.

pub mod cli;
pub mod files;
pub mod shard;
pub mod table;

pub use cli::{run, Cli};
pub use files::{timestamp, write_certificate};
pub use shard::{certify_sharded, certify_sharded_with};
pub use table::{build_table, build_table_with, TableRow};
