//! Model-to-view payloads and the controller command set.
//!
//! Snapshots and commands use a canonical compact JSON text encoding: field
//! order is fixed by declaration, there is no insignificant whitespace, and
//! reals are written as the shortest decimal string that round-trips the
//! underlying `f64`. Encoding is therefore injective and stable across runs,
//! which is what golden traces rely on.

mod command;
mod session;
pub mod wire;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use command::{apply_command, Command, CommandError, ParamSpec, PARAMS};
pub use session::{replay, spawn_session, ClientMessage, ErrorReply, ServerMessage, Session, SessionEnd, SessionHandle, FRAME_DT};

use crate::presentation::{Anchor, Presentation};

/// Structured decode failure with the byte offset where parsing stopped.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed payload at byte {offset}: {message}")]
pub struct DecodeError {
    pub offset: usize,
    pub message: String,
}

impl DecodeError {
    fn from_json(bytes: &[u8], err: serde_json::Error) -> Self {
        // serde_json reports 1-based line/column; columns count bytes
        let line_start: usize = bytes
            .split(|b| *b == b'\n')
            .take(err.line().saturating_sub(1))
            .map(|l| l.len() + 1)
            .sum();
        let offset = if err.is_eof() {
            bytes.len()
        } else {
            (line_start + err.column().saturating_sub(1)).min(bytes.len())
        };
        Self {
            offset,
            message: err.to_string(),
        }
    }

    fn invalid(message: impl Into<String>) -> Self {
        Self {
            offset: 0,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TidgetView {
    pub anchor: Anchor,
    pub lines: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BodyView {
    pub positions: Vec<[f64; 2]>,
    pub springs: Vec<[usize; 2]>,
    /// Current length over rest length, per spring.
    pub ratios: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DragView {
    pub body: usize,
    pub particle: usize,
    pub target: [f64; 2],
}

/// Immutable per-tick render state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameSnapshot {
    /// Rendered ticks since the presentation was built.
    pub tick: u64,
    pub slide_index: usize,
    pub slide_title: String,
    /// Empty when tidgets are globally disabled.
    pub tidgets: Vec<TidgetView>,
    pub bodies: Vec<BodyView>,
    pub drag: Option<DragView>,
    /// Empty on slides without a scene.
    pub integrator: String,
    pub running: bool,
    /// Completed fixed steps of the current scene.
    pub sim_tick: u64,
}

impl FrameSnapshot {
    pub fn capture(p: &Presentation) -> Self {
        let slide = p.current_slide();
        let tidgets = if p.tidgets_enabled() {
            slide
                .tidgets
                .iter()
                .filter(|t| t.visible)
                .map(|t| TidgetView {
                    anchor: t.anchor,
                    lines: t.shown().to_vec(),
                })
                .collect()
        } else {
            Vec::new()
        };
        let scene = slide.scene.as_ref();
        let bodies = scene
            .map(|s| {
                s.world
                    .bodies
                    .iter()
                    .map(|b| BodyView {
                        positions: b.particles.iter().map(|p| [p.position.x, p.position.y]).collect(),
                        springs: b.springs.iter().map(|s| [s.a, s.b]).collect(),
                        ratios: b
                            .springs
                            .iter()
                            .map(|s| {
                                let len = b.particles[s.a].position.distance(b.particles[s.b].position);
                                if s.rest_length > 0.0 {
                                    len / s.rest_length
                                } else {
                                    1.0
                                }
                            })
                            .collect(),
                    })
                    .collect()
            })
            .unwrap_or_default();
        let drag = scene.and_then(|s| s.world.drag).map(|d| DragView {
            body: d.body,
            particle: d.particle,
            target: [d.target.x, d.target.y],
        });
        Self {
            tick: p.frame(),
            slide_index: p.current(),
            slide_title: slide.title.clone(),
            tidgets,
            bodies,
            drag,
            integrator: scene.map(|s| s.integrator.name().to_string()).unwrap_or_default(),
            running: scene.is_some_and(|s| s.running),
            sim_tick: scene.map_or(0, |s| s.world.tick),
        }
    }

    pub fn particle_count(&self) -> usize {
        self.bodies.iter().map(|b| b.positions.len()).sum()
    }

    fn check(&self) -> Result<(), DecodeError> {
        for (i, b) in self.bodies.iter().enumerate() {
            if b.ratios.len() != b.springs.len() {
                return Err(DecodeError::invalid(format!("body {i}: ratio count != spring count")));
            }
            let n = b.positions.len();
            if b.springs.iter().any(|[a, c]| *a >= n || *c >= n) {
                return Err(DecodeError::invalid(format!("body {i}: spring endpoint out of range")));
            }
            let finite = b.positions.iter().flatten().chain(&b.ratios).all(|v| v.is_finite());
            if !finite {
                return Err(DecodeError::invalid(format!("body {i}: non-finite value")));
            }
        }
        if let Some(d) = &self.drag {
            let ok = self.bodies.get(d.body).is_some_and(|b| d.particle < b.positions.len());
            if !ok || !d.target.iter().all(|v| v.is_finite()) {
                return Err(DecodeError::invalid("drag handle does not reference a particle"));
            }
        }
        Ok(())
    }
}

pub fn encode_frame(snapshot: &FrameSnapshot) -> Vec<u8> {
    serde_json::to_vec(snapshot).expect("snapshot serialization is infallible")
}

pub fn decode_frame(bytes: &[u8]) -> Result<FrameSnapshot, DecodeError> {
    let snapshot: FrameSnapshot = serde_json::from_slice(bytes).map_err(|e| DecodeError::from_json(bytes, e))?;
    snapshot.check()?;
    Ok(snapshot)
}

pub fn encode_command(command: &Command) -> Vec<u8> {
    serde_json::to_vec(command).expect("command serialization is infallible")
}

pub fn decode_command(bytes: &[u8]) -> Result<Command, DecodeError> {
    serde_json::from_slice(bytes).map_err(|e| DecodeError::from_json(bytes, e))
}
