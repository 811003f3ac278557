//! Headless driver for softbody decks: golden traces, trace verification
//! and integrator accuracy tables.

pub mod compare;
pub mod trace;

use thiserror::Error;

pub use compare::{compare_integrators, parse_grid, run_grid, write_csv, ErrorRow, System, END_TIME};
pub use trace::{read_trace, run_trace, verify_trace, SlideRef, TraceHeader, Verification};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{0}")]
    Config(String),
    #[error("trace diverges at tick {tick}: {reason}")]
    Mismatch { tick: u64, reason: String },
    #[error("numeric fault at step {step} (body {body}, particle {particle}) on slide `{slide}`")]
    NumericFault {
        slide: String,
        step: u64,
        body: usize,
        particle: usize,
    },
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl HarnessError {
    pub fn exit_code(&self) -> u8 {
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::Mismatch { .. } => 3,
            HarnessError::NumericFault { .. } => 4,
            HarnessError::Io { .. } => 1,
        }
    }

    pub fn io(context: impl Into<String>) -> impl FnOnce(std::io::Error) -> Self {
        let context = context.into();
        move |source| HarnessError::Io { context, source }
    }
}
