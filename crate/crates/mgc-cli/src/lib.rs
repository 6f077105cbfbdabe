//! Library half of the command-line tool: document formats, output shapes,
//! the reproduction suite, DOT emission, and the sampling helpers.

pub mod docs;
pub mod dot;
pub mod output;
pub mod rng;
pub mod sampling;
pub mod suite;
