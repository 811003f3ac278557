use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::WorldError;
use crate::math::Vec2;

#[derive(Debug, Clone, PartialEq)]
pub struct Particle {
    pub position: Vec2,
    pub velocity: Vec2,
    /// Scratch accumulator, refreshed by `World::accumulate_forces`.
    pub force: Vec2,
    pub mass: f64,
    pub pinned: bool,
}

impl Particle {
    pub fn new(position: Vec2, mass: f64) -> Self {
        Self {
            position,
            velocity: Vec2::ZERO,
            force: Vec2::ZERO,
            mass,
            pinned: false,
        }
    }

    pub fn pinned(mut self) -> Self {
        self.pinned = true;
        self.velocity = Vec2::ZERO;
        self
    }

    pub fn with_velocity(mut self, velocity: Vec2) -> Self {
        self.velocity = velocity;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpringRole {
    /// Along a chain or around a ring (and antipodal braces).
    Structural,
    /// Between the same angular index on adjacent layers.
    Radial,
    /// Diagonal between adjacent layers.
    Shear,
}

/// Damped linear spring between particles `a` and `b` of one body.
#[derive(Debug, Clone, PartialEq)]
pub struct Spring {
    pub a: usize,
    pub b: usize,
    pub rest_length: f64,
    pub stiffness: f64,
    pub damping: f64,
    pub role: SpringRole,
}

impl Spring {
    /// Force exerted on particle `a`; `b` receives the negation. Returns
    /// `None` when the endpoints (nearly) coincide and the axis is undefined.
    pub fn force_on_a(&self, pa: Vec2, pb: Vec2, va: Vec2, vb: Vec2) -> Option<Vec2> {
        let d = pb - pa;
        let len = d.length();
        if len < DEGENERATE_LENGTH {
            return None;
        }
        let dir = d / len;
        let stretch = len - self.rest_length;
        let closing_speed = (vb - va).dot(dir);
        Some(dir * (self.stiffness * stretch + self.damping * closing_speed))
    }
}

/// Endpoint separation below which a spring contributes no force.
pub const DEGENERATE_LENGTH: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Dimensionality {
    #[serde(rename = "1d")]
    One,
    #[serde(rename = "2d")]
    Two,
    #[serde(rename = "3d")]
    Three,
}

impl Dimensionality {
    pub fn name(self) -> &'static str {
        match self {
            Dimensionality::One => "1d",
            Dimensionality::Two => "2d",
            Dimensionality::Three => "3d",
        }
    }
}

impl fmt::Display for Dimensionality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Dimensionality {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "1d" => Ok(Dimensionality::One),
            "2d" => Ok(Dimensionality::Two),
            "3d" => Ok(Dimensionality::Three),
            other => Err(format!("unknown dimensionality `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SoftBody {
    pub particles: Vec<Particle>,
    pub springs: Vec<Spring>,
    pub dimensionality: Dimensionality,
    /// 2 or 3.
    pub layers: u8,
    pub material: String,
}

impl SoftBody {
    pub fn validate(&self, body: usize) -> Result<(), WorldError> {
        if self.particles.len() < 2 {
            return Err(WorldError::TooFewParticles { body });
        }
        if !matches!(self.layers, 2 | 3) {
            return Err(WorldError::Layers {
                body,
                layers: self.layers,
            });
        }
        for (index, p) in self.particles.iter().enumerate() {
            let mass_ok = p.mass > 0.0 && p.mass.is_finite();
            if !mass_ok || !p.position.is_finite() || !p.velocity.is_finite() {
                return Err(WorldError::BadParticle {
                    body,
                    particle: index,
                });
            }
        }
        let n = self.particles.len();
        for (index, s) in self.springs.iter().enumerate() {
            let endpoints_ok = s.a < n && s.b < n && s.a != s.b;
            let coeffs_ok = s.rest_length >= 0.0
                && s.rest_length.is_finite()
                && s.stiffness > 0.0
                && s.stiffness.is_finite()
                && s.damping >= 0.0
                && s.damping.is_finite();
            if !endpoints_ok || !coeffs_ok {
                return Err(WorldError::BadSpring {
                    body,
                    spring: index,
                });
            }
        }
        Ok(())
    }

    pub fn count_springs(&self, role: SpringRole) -> usize {
        self.springs.iter().filter(|s| s.role == role).count()
    }

    pub fn total_mass(&self) -> f64 {
        self.particles.iter().map(|p| p.mass).sum()
    }
}
