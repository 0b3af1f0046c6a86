//! Reference implementations used to check the main crates.
//!
//! Everything here is written from the textbook definitions, favors
//! clarity over speed, and shares no code with `tfhog-core`.

pub mod dft;
pub mod eig;
pub mod problems;
pub mod qp;
pub mod wilcoxon;
