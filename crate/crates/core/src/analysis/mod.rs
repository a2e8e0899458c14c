//! Closed-form predictions and fitting routines.

mod closed_form;
mod fit;
mod ness;

pub use closed_form::*;
pub use fit::*;
pub use ness::*;
