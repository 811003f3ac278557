//! Dynamic state of the simulation: particles, springs, bodies and the
//! world that steps them.

mod body;
mod collision;
mod world;

use thiserror::Error;

pub use body::{Dimensionality, Particle, SoftBody, Spring, SpringRole, DEGENERATE_LENGTH};
pub use collision::{clamp_and_reflect, ViewBox};
pub use world::{Diagnostics, DragHandle, SimParams, World};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WorldError {
    #[error("body {body} has fewer than 2 particles")]
    TooFewParticles { body: usize },
    #[error("body {body} has {layers} layers (expected 2 or 3)")]
    Layers { body: usize, layers: u8 },
    #[error("body {body} particle {particle} has non-positive mass or non-finite state")]
    BadParticle { body: usize, particle: usize },
    #[error("body {body} spring {spring} is malformed")]
    BadSpring { body: usize, spring: usize },
    #[error("body {body} particle {particle} is pinned outside the view box")]
    PinnedOutsideBox { body: usize, particle: usize },
    #[error("invalid view box {0:?}")]
    ViewBox(ViewBox),
    #[error("invalid simulation parameters {0:?}")]
    Params(SimParams),
}

/// Non-finite state produced while attempting step `tick`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("numeric fault at tick {tick}: body {body} particle {particle}")]
pub struct SimFault {
    pub tick: u64,
    pub body: usize,
    pub particle: usize,
}
