//! Morse–Smale segmentation of scalar fields on grids and graphs, persistence
//! simplification hierarchies, and the encodings built on top of them.

pub mod error;
pub mod field;
pub mod npy;
pub mod par;

pub use error::{Error, Result};
pub use field::{distance_transform, BinaryMask, DomainKind, ScalarField};
pub use par::Exec;
pub mod morse;
pub mod persistence;
pub mod oracle;
pub mod dual;
pub mod hierarchy;
pub mod encode;
pub mod synth;
pub mod verify;

/// Renders rows as CSV under a fixed header (written even with no rows).
pub(crate) fn to_csv<R: serde::Serialize>(header: &[&str], rows: impl IntoIterator<Item = R>) -> String {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.serialize(r).expect("rows serialize");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}
