//! Integrator accuracy and cost on systems with closed-form solutions.

use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;
use softbody_core::physics::{Dimensionality, Particle, SimParams, SoftBody, Spring, SpringRole, ViewBox, World};
use softbody_core::{IntegratorKind, Vec2};

use crate::HarnessError;

/// Both systems are integrated to this time.
pub const END_TIME: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum System {
    /// Unit mass on a unit-stiffness spring to a pinned anchor at the
    /// origin (rest length 2), released from rest at x = 3.
    Oscillator,
    /// One particle under standard gravity, launched with (0.5, 2) m/s.
    Freefall,
}

impl FromStr for System {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "oscillator" => Ok(System::Oscillator),
            "freefall" => Ok(System::Freefall),
            other => Err(HarnessError::Config(format!(
                "unknown system `{other}` (expected oscillator or freefall)"
            ))),
        }
    }
}

const ANCHOR_REST: f64 = 2.0;
const LAUNCH: Vec2 = Vec2::new(0.5, 2.0);

impl System {
    pub fn name(self) -> &'static str {
        match self {
            System::Oscillator => "oscillator",
            System::Freefall => "freefall",
        }
    }

    /// World with the moving particle at index 1 of body 0.
    pub fn world(self, h: f64) -> World {
        let (anchor, mover, gravity, springs) = match self {
            System::Oscillator => (
                Vec2::ZERO,
                Particle::new(Vec2::new(ANCHOR_REST + 1.0, 0.0), 1.0),
                Vec2::ZERO,
                vec![Spring {
                    a: 0,
                    b: 1,
                    rest_length: ANCHOR_REST,
                    stiffness: 1.0,
                    damping: 0.0,
                    role: SpringRole::Structural,
                }],
            ),
            System::Freefall => (
                Vec2::new(-500.0, 0.0),
                Particle::new(Vec2::ZERO, 1.0).with_velocity(LAUNCH),
                Vec2::new(0.0, -9.81),
                Vec::new(),
            ),
        };
        let body = SoftBody {
            particles: vec![Particle::new(anchor, 1.0).pinned(), mover],
            springs,
            dimensionality: Dimensionality::One,
            layers: 2,
            material: "test".into(),
        };
        let params = SimParams {
            gravity,
            timestep: h,
            ..SimParams::default()
        };
        let bounds = ViewBox::new(Vec2::new(-1e3, -1e3), Vec2::new(1e3, 1e3));
        World::new(vec![body], params, bounds).expect("analytic systems are well formed")
    }

    /// Exact position of the moving particle.
    pub fn oracle(self, t: f64) -> Vec2 {
        match self {
            System::Oscillator => Vec2::new(ANCHOR_REST + t.cos(), 0.0),
            System::Freefall => LAUNCH * t + Vec2::new(0.0, -9.81) * (0.5 * t * t),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorRow {
    pub system: &'static str,
    pub integrator: &'static str,
    pub h: f64,
    pub steps: u64,
    /// Largest position error over all steps, m.
    pub max_error: f64,
    /// Position error at the end time, m.
    pub final_error: f64,
    /// Informational only.
    pub wall_s_per_1e4_steps: f64,
    pub evaluations: u64,
}

/// Parses `h=1/60,1/120,0.005`.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, HarnessError> {
    let bad = |why: String| HarnessError::Config(format!("bad grid `{spec}`: {why}"));
    let list = spec.strip_prefix("h=").ok_or_else(|| bad("expected h=<list>".into()))?;
    list.split(',')
        .map(|item| {
            let value = match item.split_once('/') {
                Some((n, d)) => {
                    let n: f64 = n.trim().parse().map_err(|_| bad(format!("`{item}`")))?;
                    let d: f64 = d.trim().parse().map_err(|_| bad(format!("`{item}`")))?;
                    n / d
                }
                None => item.trim().parse().map_err(|_| bad(format!("`{item}`")))?,
            };
            if value > 0.0 && value.is_finite() && value <= END_TIME {
                Ok(value)
            } else {
                Err(bad(format!("step `{item}` must be in (0, {END_TIME}]")))
            }
        })
        .collect()
}

/// Integrates `system` to `end` with every integrator at every step size.
pub fn run_grid(system: System, grid: &[f64], end: f64) -> Vec<ErrorRow> {
    let mut rows = Vec::new();
    for kind in IntegratorKind::ALL {
        for &h in grid {
            let steps = (end / h).round() as u64;
            let mut world = system.world(h);
            let mut max_error = 0.0f64;
            let mut final_error = 0.0;
            let start = Instant::now();
            for i in 1..=steps {
                world
                    .step(kind)
                    .expect("analytic systems stay finite on the supported grid");
                let err = world.bodies[0].particles[1].position.distance(system.oracle(i as f64 * h));
                max_error = max_error.max(err);
                final_error = err;
            }
            let elapsed = start.elapsed().as_secs_f64();
            rows.push(ErrorRow {
                system: system.name(),
                integrator: kind.name(),
                h,
                steps,
                max_error,
                final_error,
                wall_s_per_1e4_steps: elapsed / steps.max(1) as f64 * 1e4,
                evaluations: steps * kind.evaluations_per_step() as u64,
            });
        }
    }
    rows
}

pub fn compare_integrators(system: System, grid: &[f64]) -> Vec<ErrorRow> {
    run_grid(system, grid, END_TIME)
}

pub fn write_csv<W: Write>(rows: &[ErrorRow], out: W) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row).map_err(|e| HarnessError::Config(format!("csv: {e}")))?;
    }
    w.flush().map_err(HarnessError::io("writing csv"))
}
