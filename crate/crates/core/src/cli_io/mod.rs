//! Command-line surface: text grammars in, CSV/JSON tables out.

mod command;
mod emit;
mod parse;

pub use command::{execute, run, Check, Cli, Command, Eval, McArgs};
pub use emit::{
    emit_table, fmt_float, parse_table_json, DistRow, Format, RateRow, SampleRow, Table,
};
pub use parse::{
    parse_count, parse_model_spec, parse_n_grid, parse_real, parse_real_grid, parse_set_spec,
};
