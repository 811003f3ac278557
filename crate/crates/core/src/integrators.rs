//! Explicit fixed-step integrators over a flat first-order state vector.
//!
//! The state holds one block per point: `dim` position components followed by
//! `dim` velocity components. A derivative evaluator maps a state to its time
//! derivative with the same layout (velocities, then accelerations).
//!
//! | kind      | order | evaluations per step |
//! |-----------|-------|----------------------|
//! | Euler     | 1     | 1                    |
//! | Midpoint  | 2     | 2                    |
//! | Feynman   | 2     | 1                    |
//! | RK4       | 4     | 4                    |

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IntegratorKind {
    #[serde(rename = "euler")]
    ExplicitEuler,
    Midpoint,
    /// Leapfrog with half-step velocities.
    Feynman,
    #[serde(rename = "rk4")]
    Rk4,
}

impl IntegratorKind {
    pub const ALL: [IntegratorKind; 4] = [
        IntegratorKind::ExplicitEuler,
        IntegratorKind::Midpoint,
        IntegratorKind::Feynman,
        IntegratorKind::Rk4,
    ];

    /// Wire and deck name.
    pub fn name(self) -> &'static str {
        match self {
            IntegratorKind::ExplicitEuler => "euler",
            IntegratorKind::Midpoint => "midpoint",
            IntegratorKind::Feynman => "feynman",
            IntegratorKind::Rk4 => "rk4",
        }
    }

    pub fn evaluations_per_step(self) -> usize {
        match self {
            IntegratorKind::ExplicitEuler | IntegratorKind::Feynman => 1,
            IntegratorKind::Midpoint => 2,
            IntegratorKind::Rk4 => 4,
        }
    }

    /// Global convergence order on smooth problems.
    pub fn order(self) -> u32 {
        match self {
            IntegratorKind::ExplicitEuler => 1,
            IntegratorKind::Midpoint | IntegratorKind::Feynman => 2,
            IntegratorKind::Rk4 => 4,
        }
    }
}

impl fmt::Display for IntegratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown integrator `{0}` (expected euler, midpoint, feynman or rk4)")]
pub struct UnknownIntegrator(pub String);

impl FromStr for IntegratorKind {
    type Err = UnknownIntegrator;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        IntegratorKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| UnknownIntegrator(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntegratorError {
    #[error("timestep must be positive and finite, got {0}")]
    InvalidStep(f64),
    #[error("non-finite value at state index {index}")]
    NonFinite { index: usize },
    #[error("state length {len} is not a multiple of {block}")]
    Layout { len: usize, block: usize },
}

/// Flat state: per point, `dim` positions then `dim` velocities.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    values: Vec<f64>,
    dim: usize,
}

impl StateVector {
    pub fn new(values: Vec<f64>, dim: usize) -> Result<Self, IntegratorError> {
        let block = 2 * dim;
        if dim == 0 || !values.len().is_multiple_of(block) {
            return Err(IntegratorError::Layout {
                len: values.len(),
                block,
            });
        }
        Ok(Self { values, dim })
    }

    /// Single scalar unknown (`dim = 1`, no velocity split); only for
    /// first-order test problems with Euler, Midpoint and RK4.
    pub fn scalar(values: Vec<f64>) -> Self {
        Self { values, dim: 1 }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> usize {
        self.values.len() / (2 * self.dim)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }

    pub fn position(&self, point: usize) -> &[f64] {
        let start = point * 2 * self.dim;
        &self.values[start..start + self.dim]
    }

    pub fn velocity(&self, point: usize) -> &[f64] {
        let start = point * 2 * self.dim + self.dim;
        &self.values[start..start + self.dim]
    }

    fn check_finite(&self) -> Result<(), IntegratorError> {
        match self.values.iter().position(|v| !v.is_finite()) {
            Some(index) => Err(IntegratorError::NonFinite { index }),
            None => Ok(()),
        }
    }

    fn with_values(&self, values: Vec<f64>) -> Self {
        Self {
            values,
            dim: self.dim,
        }
    }
}

/// Velocities at the most recent half step, carried between leapfrog calls.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfStepMemory {
    velocities: Vec<f64>,
}

impl HalfStepMemory {
    pub fn velocities(&self) -> &[f64] {
        &self.velocities
    }

    pub fn velocities_mut(&mut self) -> &mut [f64] {
        &mut self.velocities
    }
}

fn check_step(h: f64) -> Result<(), IntegratorError> {
    if h > 0.0 && h.is_finite() {
        Ok(())
    } else {
        Err(IntegratorError::InvalidStep(h))
    }
}

fn eval<F>(f: &F, s: &[f64]) -> Vec<f64>
where
    F: Fn(&[f64], &mut [f64]),
{
    let mut out = vec![0.0; s.len()];
    f(s, &mut out);
    out
}

/// `s + scale * d`, element-wise.
fn offset(s: &[f64], scale: f64, d: &[f64]) -> Vec<f64> {
    s.iter().zip(d).map(|(x, dx)| x + scale * dx).collect()
}

/// `s' = s + h·f(s)`
pub fn euler_step<F>(s: &StateVector, f: F, h: f64) -> Result<StateVector, IntegratorError>
where
    F: Fn(&[f64], &mut [f64]),
{
    check_step(h)?;
    let d = eval(&f, &s.values);
    let next = s.with_values(offset(&s.values, h, &d));
    next.check_finite()?;
    Ok(next)
}

/// `s' = s + h·f(s + (h/2)·f(s))`
pub fn midpoint_step<F>(s: &StateVector, f: F, h: f64) -> Result<StateVector, IntegratorError>
where
    F: Fn(&[f64], &mut [f64]),
{
    check_step(h)?;
    let d1 = eval(&f, &s.values);
    let mid = offset(&s.values, 0.5 * h, &d1);
    let d2 = eval(&f, &mid);
    let next = s.with_values(offset(&s.values, h, &d2));
    next.check_finite()?;
    Ok(next)
}

/// Classical fourth-order Runge-Kutta.
pub fn rk4_step<F>(s: &StateVector, f: F, h: f64) -> Result<StateVector, IntegratorError>
where
    F: Fn(&[f64], &mut [f64]),
{
    check_step(h)?;
    let k1 = eval(&f, &s.values);
    let k2 = eval(&f, &offset(&s.values, 0.5 * h, &k1));
    let k3 = eval(&f, &offset(&s.values, 0.5 * h, &k2));
    let k4 = eval(&f, &offset(&s.values, h, &k3));
    let sixth = h / 6.0;
    let values = (0..s.values.len())
        .map(|i| s.values[i] + sixth * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect();
    let next = s.with_values(values);
    next.check_finite()?;
    Ok(next)
}

/// Leapfrog ("Feynman") step with explicit half-step memory.
///
/// ```text
/// v(t+h/2) = v(t-h/2) + h·a(x(t))        (bootstrap: v(h/2) = v(0) + (h/2)·a(x(0)))
/// x(t+h)   = x(t) + h·v(t+h/2)
/// ```
///
/// The returned state carries positions at `t+h` and a reported velocity equal
/// to the mean of `v(t+h/2)` and the next half-step velocity predicted with
/// the latest acceleration, i.e. `v(t+h/2) + (h/2)·a(x(t))`. The acceleration
/// is evaluated with the velocity stored in `s`, which only matters for
/// velocity-dependent forces such as damping.
pub fn feynman_step<F>(
    s: &StateVector,
    f: F,
    h: f64,
    memory: Option<&HalfStepMemory>,
) -> Result<(StateVector, HalfStepMemory), IntegratorError>
where
    F: Fn(&[f64], &mut [f64]),
{
    check_step(h)?;
    let dim = s.dim;
    let points = s.points();
    if let Some(m) = memory {
        if m.velocities.len() != points * dim {
            return Err(IntegratorError::Layout {
                len: m.velocities.len(),
                block: dim,
            });
        }
    }

    let d = eval(&f, &s.values);
    let mut values = s.values.clone();
    let mut half = vec![0.0; points * dim];
    for p in 0..points {
        let base = p * 2 * dim;
        for c in 0..dim {
            let accel = d[base + dim + c];
            let v_half = match memory {
                Some(m) => m.velocities[p * dim + c] + h * accel,
                None => s.values[base + dim + c] + 0.5 * h * accel,
            };
            half[p * dim + c] = v_half;
            values[base + c] = s.values[base + c] + h * v_half;
            values[base + dim + c] = v_half + 0.5 * h * accel;
        }
    }

    let next = s.with_values(values);
    next.check_finite()?;
    if let Some(index) = half.iter().position(|v| !v.is_finite()) {
        let point = index / dim;
        return Err(IntegratorError::NonFinite {
            index: point * 2 * dim + dim + index % dim,
        });
    }
    Ok((next, HalfStepMemory { velocities: half }))
}

/// Dispatches on `kind`. Leapfrog reads and replaces `memory`; every other
/// kind clears it.
pub fn step<F>(
    kind: IntegratorKind,
    s: &StateVector,
    f: F,
    h: f64,
    memory: &mut Option<HalfStepMemory>,
) -> Result<StateVector, IntegratorError>
where
    F: Fn(&[f64], &mut [f64]),
{
    match kind {
        IntegratorKind::ExplicitEuler => {
            let next = euler_step(s, f, h)?;
            *memory = None;
            Ok(next)
        }
        IntegratorKind::Midpoint => {
            let next = midpoint_step(s, f, h)?;
            *memory = None;
            Ok(next)
        }
        IntegratorKind::Rk4 => {
            let next = rk4_step(s, f, h)?;
            *memory = None;
            Ok(next)
        }
        IntegratorKind::Feynman => {
            let (next, mem) = feynman_step(s, f, h, memory.as_ref())?;
            *memory = Some(mem);
            Ok(next)
        }
    }
}
