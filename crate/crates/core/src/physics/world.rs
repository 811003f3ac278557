use std::cell::Cell;
use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::body::SoftBody;
use super::collision::{clamp_and_reflect, ViewBox};
use super::{SimFault, WorldError};
use crate::integrators::{self, HalfStepMemory, IntegratorError, IntegratorKind, StateVector};
use crate::math::Vec2;

/// Values per particle in the flat state: x, y, vx, vy.
const STRIDE: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimParams {
    pub gravity: Vec2,
    /// Fixed step `h` in seconds.
    pub timestep: f64,
    pub restitution: f64,
    pub drag_stiffness: f64,
    pub drag_damping: f64,
}

impl Default for SimParams {
    fn default() -> Self {
        Self {
            gravity: Vec2::new(0.0, -9.81),
            timestep: 1.0 / 240.0,
            restitution: 0.5,
            drag_stiffness: 40.0,
            drag_damping: 2.0,
        }
    }
}

impl SimParams {
    pub fn validate(&self) -> Result<(), WorldError> {
        let ok = self.gravity.is_finite()
            && self.timestep > 0.0
            && self.timestep.is_finite()
            && (0.0..=1.0).contains(&self.restitution)
            && self.drag_stiffness >= 0.0
            && self.drag_stiffness.is_finite()
            && self.drag_damping >= 0.0
            && self.drag_damping.is_finite();
        if ok {
            Ok(())
        } else {
            Err(WorldError::Params(*self))
        }
    }
}

/// Pointer coupling: a spring-damper from `target` to one particle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DragHandle {
    pub body: usize,
    pub particle: usize,
    pub target: Vec2,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Diagnostics {
    /// Spring evaluations skipped because the endpoints coincided.
    pub degenerate_springs: u64,
    /// Particle-face contacts resolved after steps.
    pub collisions: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct World {
    pub bodies: Vec<SoftBody>,
    pub params: SimParams,
    pub view_box: ViewBox,
    pub drag: Option<DragHandle>,
    /// Completed steps.
    pub tick: u64,
    pub diagnostics: Diagnostics,
    half_step: Option<HalfStepMemory>,
}

impl World {
    pub fn new(bodies: Vec<SoftBody>, params: SimParams, view_box: ViewBox) -> Result<Self, WorldError> {
        let mut world = Self {
            bodies,
            params,
            view_box,
            drag: None,
            tick: 0,
            diagnostics: Diagnostics::default(),
            half_step: None,
        };
        world.validate()?;
        for body in &mut world.bodies {
            for p in body.particles.iter_mut().filter(|p| p.pinned) {
                p.velocity = Vec2::ZERO;
            }
        }
        Ok(world)
    }

    pub fn validate(&self) -> Result<(), WorldError> {
        self.params.validate()?;
        if !self.view_box.is_valid() {
            return Err(WorldError::ViewBox(self.view_box));
        }
        for (index, body) in self.bodies.iter().enumerate() {
            body.validate(index)?;
            for (particle, p) in body.particles.iter().enumerate() {
                if p.pinned && !self.view_box.contains(p.position) {
                    return Err(WorldError::PinnedOutsideBox { body: index, particle });
                }
            }
        }
        Ok(())
    }

    pub fn particle_count(&self) -> usize {
        self.bodies.iter().map(|b| b.particles.len()).sum()
    }

    pub fn spring_count(&self) -> usize {
        self.bodies.iter().map(|b| b.springs.len()).sum()
    }

    /// Current leapfrog half-step velocities, if the last step used `Feynman`.
    pub fn half_step_memory(&self) -> Option<&HalfStepMemory> {
        self.half_step.as_ref()
    }

    /// Forgets leapfrog history; the next `Feynman` step bootstraps again.
    pub fn clear_half_step_memory(&mut self) {
        self.half_step = None;
    }

    pub fn state_vector(&self) -> StateVector {
        let mut values = Vec::with_capacity(self.particle_count() * STRIDE);
        for p in self.bodies.iter().flat_map(|b| &b.particles) {
            values.extend_from_slice(&[p.position.x, p.position.y, p.velocity.x, p.velocity.y]);
        }
        StateVector::new(values, 2).expect("stride matches layout")
    }

    /// Maps a flat particle index back to `(body, particle)`.
    pub fn locate(&self, mut flat: usize) -> Option<(usize, usize)> {
        for (b, body) in self.bodies.iter().enumerate() {
            if flat < body.particles.len() {
                return Some((b, flat));
            }
            flat -= body.particles.len();
        }
        None
    }

    fn flat_index(&self, body: usize, particle: usize) -> usize {
        self.bodies[..body].iter().map(|b| b.particles.len()).sum::<usize>() + particle
    }

    /// Total force on every particle for the given flat state.
    ///
    /// Each particle's contributions are summed in an order that depends only
    /// on their values, ordered by `|x|`, then `x`, then `y`. A mirror image
    /// of the body then sums the same terms in the same order, so mirrored
    /// particles get exactly negated `x` and identical `y` forces.
    fn forces_at(&self, state: &[f64], forces: &mut [Vec2], degenerate: &Cell<u64>) {
        let g = self.params.gravity;
        let drag = self
            .drag
            .map(|d| (self.flat_index(d.body, d.particle), d.target));
        let pos = |i: usize| Vec2::new(state[i * STRIDE], state[i * STRIDE + 1]);
        let vel = |i: usize| Vec2::new(state[i * STRIDE + 2], state[i * STRIDE + 3]);

        let mut terms: Vec<(usize, Vec2)> = Vec::with_capacity(forces.len() * 6);
        let mut offset = 0;
        for body in &self.bodies {
            for (i, p) in body.particles.iter().enumerate() {
                terms.push((offset + i, g * p.mass));
            }
            for s in &body.springs {
                let (a, b) = (offset + s.a, offset + s.b);
                match s.force_on_a(pos(a), pos(b), vel(a), vel(b)) {
                    Some(f) => {
                        terms.push((a, f));
                        terms.push((b, -f));
                    }
                    None => degenerate.set(degenerate.get() + 1),
                }
            }
            offset += body.particles.len();
        }
        terms.sort_unstable_by(|(i, f), (j, g)| {
            i.cmp(j)
                .then(f.x.abs().total_cmp(&g.x.abs()))
                .then(f.x.partial_cmp(&g.x).unwrap_or(Ordering::Equal))
                .then(f.y.total_cmp(&g.y))
        });
        forces.fill(Vec2::ZERO);
        for (i, f) in terms {
            forces[i] += f;
        }

        if let Some((i, target)) = drag {
            forces[i] += (target - pos(i)) * self.params.drag_stiffness - vel(i) * self.params.drag_damping;
        }
    }

    /// Time derivative of a flat state: velocities, then `F/m`. Pinned
    /// particles have zero derivative.
    fn derivative(&self, state: &[f64], out: &mut [f64], degenerate: &Cell<u64>) {
        let mut forces = vec![Vec2::ZERO; state.len() / STRIDE];
        self.forces_at(state, &mut forces, degenerate);
        let particles = self.bodies.iter().flat_map(|b| &b.particles);
        for (i, (p, f)) in particles.zip(&forces).enumerate() {
            let o = i * STRIDE;
            if p.pinned {
                out[o..o + STRIDE].fill(0.0);
            } else {
                out[o] = state[o + 2];
                out[o + 1] = state[o + 3];
                out[o + 2] = f.x / p.mass;
                out[o + 3] = f.y / p.mass;
            }
        }
    }

    /// Refreshes `Particle::force` from the current state.
    pub fn accumulate_forces(&mut self) {
        let state = self.state_vector();
        let degenerate = Cell::new(0);
        let mut forces = vec![Vec2::ZERO; self.particle_count()];
        self.forces_at(state.as_slice(), &mut forces, &degenerate);
        self.diagnostics.degenerate_springs += degenerate.get();
        for (p, f) in self.bodies.iter_mut().flat_map(|b| &mut b.particles).zip(forces) {
            p.force = f;
        }
    }

    /// Advances the world by one fixed step `h`, then resolves view-box
    /// collisions once. On a numeric fault the world is left untouched.
    pub fn step(&mut self, integrator: IntegratorKind) -> Result<(), SimFault> {
        let state = self.state_vector();
        let degenerate = Cell::new(0);
        let mut memory = match integrator {
            IntegratorKind::Feynman => self.half_step.clone(),
            _ => None,
        };
        let f = |s: &[f64], out: &mut [f64]| self.derivative(s, out, &degenerate);
        let result = integrators::step(integrator, &state, f, self.params.timestep, &mut memory);
        self.diagnostics.degenerate_springs += degenerate.get();

        let next = match result {
            Ok(next) => next,
            Err(IntegratorError::NonFinite { index }) => {
                let (body, particle) = self.locate(index / STRIDE).unwrap_or((0, 0));
                return Err(SimFault {
                    tick: self.tick + 1,
                    body,
                    particle,
                });
            }
            Err(other) => unreachable!("world state is always well-formed: {other}"),
        };

        let values = next.as_slice();
        let mut flat = 0;
        for body in &mut self.bodies {
            for p in &mut body.particles {
                let o = flat * STRIDE;
                if p.pinned {
                    p.velocity = Vec2::ZERO;
                } else {
                    p.position = Vec2::new(values[o], values[o + 1]);
                    p.velocity = Vec2::new(values[o + 2], values[o + 3]);
                }
                flat += 1;
            }
        }
        self.half_step = memory;
        self.resolve_viewbox_collision();
        self.tick += 1;
        Ok(())
    }

    /// Clamps every free particle into the view box (see
    /// [`clamp_and_reflect`]).
    pub fn resolve_viewbox_collision(&mut self) {
        let bounds = self.view_box;
        let e = self.params.restitution;
        let mut half = self.half_step.as_mut().map(|m| m.velocities_mut());
        let mut flat = 0;
        let mut hits = 0;
        for body in &mut self.bodies {
            for p in &mut body.particles {
                if !p.pinned {
                    let h = half.as_deref_mut().map(|v| &mut v[flat * 2..flat * 2 + 2]);
                    if clamp_and_reflect(&bounds, e, &mut p.position, &mut p.velocity, h) {
                        hits += 1;
                    }
                }
                flat += 1;
            }
        }
        self.diagnostics.collisions += hits;
    }

    /// Attaches the drag handle to the particle nearest `pointer`, lowest
    /// `(body, particle)` winning ties.
    pub fn begin_drag(&mut self, pointer: Vec2) -> Option<DragHandle> {
        if !pointer.is_finite() {
            return None;
        }
        let mut best: Option<(f64, usize, usize)> = None;
        for (b, body) in self.bodies.iter().enumerate() {
            for (i, p) in body.particles.iter().enumerate() {
                let d = p.position.distance_squared(pointer);
                if best.is_none_or(|(bd, _, _)| d < bd) {
                    best = Some((d, b, i));
                }
            }
        }
        self.drag = best.map(|(_, body, particle)| DragHandle {
            body,
            particle,
            target: pointer,
        });
        self.drag
    }

    /// Moves the active handle's target. No-op without an active handle.
    pub fn update_drag(&mut self, pointer: Vec2) {
        if let Some(handle) = self.drag.as_mut() {
            if pointer.is_finite() {
                handle.target = pointer;
            }
        }
    }

    pub fn end_drag(&mut self) {
        self.drag = None;
    }

    pub fn total_momentum(&self) -> Vec2 {
        self.bodies
            .iter()
            .flat_map(|b| &b.particles)
            .fold(Vec2::ZERO, |acc, p| acc + p.velocity * p.mass)
    }

    pub fn kinetic_energy(&self) -> f64 {
        self.bodies
            .iter()
            .flat_map(|b| &b.particles)
            .map(|p| 0.5 * p.mass * p.velocity.length_squared())
            .sum()
    }

    /// Elastic energy stored in all springs, `½k(|d|−r)²`.
    pub fn spring_energy(&self) -> f64 {
        self.bodies
            .iter()
            .flat_map(|b| {
                b.springs.iter().map(move |s| {
                    let len = b.particles[s.a].position.distance(b.particles[s.b].position);
                    0.5 * s.stiffness * (len - s.rest_length).powi(2)
                })
            })
            .sum()
    }

    /// Potential energy in the uniform gravity field, relative to the origin.
    pub fn gravity_energy(&self) -> f64 {
        let g = self.params.gravity;
        self.bodies
            .iter()
            .flat_map(|b| &b.particles)
            .map(|p| -p.mass * g.dot(p.position))
            .sum()
    }

    pub fn total_energy(&self) -> f64 {
        self.kinetic_energy() + self.spring_energy() + self.gravity_energy()
    }
}
