//! Instance-file schema and report rendering behind the `ofl` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod instance_file;
pub mod report;

pub use instance_file::{parse, InstanceFile, LoadedInstance, SchemaError};
