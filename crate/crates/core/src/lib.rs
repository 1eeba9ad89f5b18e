//! Exact constructions of growth functions and machine-checked finite
//! certificates about them.
//!
//! The crate is organised bottom-up:
//!
//! - [`exactnum`]: integer roots and exact comparisons against `b * 2^(p/q)`.
//! - [`seqfn`]: memoized growth functions and the generic finite checks
//!   (monotonicity, submultiplicativity, derivative conditions, equivalence
//!   and realizability certificates).
//! - [`holefn`]: the increasing submultiplicative function that is not
//!   equivalent to the growth of any algebra, with its parameter schedule.
//! - [`bzfn`]: the derivative-squaring function whose growth rules out
//!   graded semiprime and prolongable realizations.
//! - [`sbprime`]: the dyadic word construction producing prime monomial
//!   algebras of prescribed growth.
//! - [`langgrowth`]: forbidden-factor automata, exact word counting and
//!   decision procedures for prolongability and irreducibility.
//! - [`cli`]: the `growth-forge` command line.

pub mod bzfn;
pub mod cli;
pub mod error;
pub mod exactnum;
pub mod holefn;
pub mod langgrowth;
pub mod sbprime;
pub mod seqfn;

pub use error::{Error, Result};
pub use exactnum::{ExactInt, RatExp};
