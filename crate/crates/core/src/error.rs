//! Error type shared by every module in the crate.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// One violated configuration invariant; `validate` reports all of them,
/// not just the first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigViolation {
    /// Configuration field the violation is about.
    pub field: &'static str,
    /// Human-readable statement of the violated constraint.
    pub message: String,
}

impl fmt::Display for ConfigViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Window or slice request outside the available slots.
    Range {
        start: usize,
        len: usize,
        available: usize,
    },
    /// Gap slot inside a gap-intolerant request.
    Gap { node_id: String, slot: usize },
    /// An input length does not match what the operation requires.
    Size {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    /// Too few inputs (companions, nodes, samples, ...).
    Arity {
        what: &'static str,
        minimum: usize,
        got: usize,
    },
    /// One or more configuration invariants do not hold.
    Config(Vec<ConfigViolation>),
    /// Protocol misuse, e.g. stepping a node the engine should have
    /// recommanded first.
    Protocol(&'static str),
    /// Phase machine driven outside its legal transitions.
    State(&'static str),
    /// Two artifacts that must cover the same slot range do not.
    Comparison(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Range {
                start,
                len,
                available,
            } => write!(
                f,
                "window [{start}, {start}+{len}) out of range for {available} slots"
            ),
            Error::Gap { node_id, slot } => {
                write!(f, "gap slot at {slot} in trace '{node_id}'")
            }
            Error::Size {
                what,
                expected,
                got,
            } => write!(f, "{what}: expected length {expected}, got {got}"),
            Error::Arity { what, minimum, got } => {
                write!(f, "{what}: need at least {minimum}, got {got}")
            }
            Error::Config(violations) => {
                write!(f, "invalid configuration ({} violations):", violations.len())?;
                for v in violations {
                    write!(f, "\n  {v}")?;
                }
                Ok(())
            }
            Error::Protocol(msg) => write!(f, "protocol error: {msg}"),
            Error::State(msg) => write!(f, "state error: {msg}"),
            Error::Comparison(msg) => write!(f, "comparison error: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
