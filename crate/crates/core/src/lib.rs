//! Ocean field reconstruction from glider samples and adaptive glider path
//! control.
//!
//! The library is organized around the data flow of a survey:
//!
//! * [`geo`] and [`eddy`]: regions, grids, gridded fields and a synthetic
//!   eddy that serves as ground truth;
//! * [`tps`] and [`block`]: thin-plate-spline smoothing and its overlapping
//!   block decomposition, plus an IDW baseline and [`crossval`];
//! * [`glider`] and [`design`]: sawtooth sampling along straight lines and
//!   the choice of survey formation;
//! * [`current`], [`optim`] and [`control`]: current imputation, bounded
//!   derivative-free minimizers, and receding-horizon heading control;
//! * [`io`] and [`cli`]: file formats and the command-line front end.

// Validation deliberately uses `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod block;
pub mod cli;
pub mod control;
pub mod crossval;
pub mod current;
pub mod design;
pub mod eddy;
pub mod error;
pub mod geo;
pub mod glider;
pub mod io;
mod linalg;
pub mod optim;
pub mod tps;

pub use error::{Error, Result, SingularReason};
