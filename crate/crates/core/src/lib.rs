//! Histogram-of-oriented-gradients features computed on constant-Q
//! time-frequency images, with a one-vs-one kernel SVM and the evaluation
//! protocol used to score acoustic scene classifiers.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, audio
//! decoding and the command line live in the `tfhog` companion crate.
//!
//! Pipeline, one clip at a time:
//!
//! ```text
//! AudioClip -> cqt -> to_image (dB, 512x512 bicubic) -> mean_filter
//!           -> gradient -> cell_histograms -> normalize_cells -> pooling
//! ```

#![no_std]

extern crate alloc;

mod error;
mod hash;
mod matrix;

pub mod eval;
pub mod hog;
pub mod learn;
pub mod pipeline;
pub mod pooling;
pub mod signal;
pub mod tfr;

pub use error::{Error, Result};
pub use hash::fnv1a64;
pub use matrix::Matrix;
