//! Point-cloud interpolation and augmentation via optimal-assignment mixing.

pub mod align;
pub mod cloud;
pub mod emd;
pub mod error;
pub mod mesh;
pub mod mix;
pub mod rng;
pub mod shapes;
pub mod vec3;
pub mod verify;
pub mod xyz;

pub use error::{Error, Result};
