//! Last-passage dynamic programming on a weight rectangle.

mod decompose;
mod field;
mod oracle;
mod path;
mod streaming;

pub use decompose::{
    axis_weight_u, characteristic_point, decompose, expected_passage, interior_from_corner, interior_passage_a,
    Decomposition, InteriorTable,
};
pub use field::{check_monotone_coupling, compute_field, write_field_csv, CouplingVerdict, LppField};
pub use oracle::{brute_force_passage, MAX_ENUMERATION};
pub use path::{backtrack_path, path_row_coordinates, LatticePath, Step, TiePolicy};
pub use streaming::{stream_passage, StreamSummary};
