//! Central configurations of the Newtonian N-body problem, described in
//! pair-space variables, with constructors for the classical four-body
//! families and a small integrator for checking their motions.
//!
//! Bodies are indexed from 0 in the API and from 1 in labels and files.

pub mod centrality;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod families;
pub mod io;
pub mod pairspace;

pub use error::{Error, Result};
