//! Constructions of K_t-minor-free graphs that are not λ-choosable, together with the
//! exact checkers that certify them: list-assignment validity, (non-)colourability,
//! clique-sum minor preservation, K_t-minor search, obstacle composition and the
//! counting arguments behind each gadget.

pub mod choosability;
pub mod coloring;
pub mod error;
pub mod gadgets;
pub mod graph;
pub mod lambda;
pub mod lists;
pub mod minor;
pub mod obstacle;
pub mod sdr;
pub mod steiner;
pub mod witness;

pub use error::{Error, Result};
pub use graph::{Graph, Vertex};
pub use lambda::{leq_order, parse_lambda, Lambda};
pub use lists::{Color, ColorSet, ColourClasses, ListAssignment};
