//! Deterministic mass-spring softbody simulation with interchangeable
//! explicit integrators, and a slide-presentation layer in which each slide
//! can host a live simulation scene.
//!
//! The model side ([`physics`], [`integrators`], [`builder`]) is headless and
//! bit-reproducible. [`presentation`] sequences slides and routes input,
//! [`deck`] loads the teaching deck, and [`protocol`] defines the canonical
//! snapshot/command encoding shared by front ends and trace files.

pub mod builder;
pub mod deck;
pub mod integrators;
pub mod math;
pub mod physics;
pub mod presentation;
pub mod protocol;

pub use integrators::IntegratorKind;
pub use math::Vec2;
