//! Sequential W-operator networks on binary images, trained by descent
//! over the lattices of characteristic functions and of windows.

pub mod cli;
pub mod error;
pub mod eval;
pub mod fn_trainer;
pub mod image;
pub mod io;
pub mod lattice;
pub mod loss;
pub mod oracle;
pub mod rng;
pub mod window_search;

pub use error::{Error, Result};
pub use image::BinaryImage;
pub use lattice::{Layer, NetworkParams, PixelOffset, TruthTable, Window, WindowVector};
