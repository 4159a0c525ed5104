//! Computing with left-orders on finitely generated groups that carry
//! peripheral ℤ² subgroups: order oracles and their combinators, positive
//! cone search on Cayley balls, dynamic realisations as piecewise-linear
//! actions on the line, slope detection and gluing checks.

pub mod conesearch;
pub mod detection;
pub mod dynreal;
pub mod error;
pub mod gluing;
pub mod lattice;
pub mod orders;
pub mod presentations;
pub mod word;

pub use error::{Error, Result};
pub use presentations::{parse_presentation, Ball, Family, GroupBackend, PeripheralSubgroup, Presentation};
pub use word::Word;
