//! Clamp-and-reflect response against the axis-aligned view box.

use serde::{Deserialize, Serialize};

use crate::math::Vec2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ViewBox {
    pub min: Vec2,
    pub max: Vec2,
}

impl ViewBox {
    pub fn new(min: Vec2, max: Vec2) -> Self {
        Self { min, max }
    }

    pub fn is_valid(&self) -> bool {
        self.min.is_finite() && self.max.is_finite() && self.min.x < self.max.x && self.min.y < self.max.y
    }

    pub fn contains(&self, p: Vec2) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }
}

/// Clamps `position` into `bounds`. On each violated axis the velocity
/// component pointing out of the box is negated and scaled by `restitution`;
/// the tangential component is untouched. `half_step`, when present, receives
/// the same reflection (leapfrog velocity memory). Returns whether any face
/// was hit.
pub fn clamp_and_reflect(
    bounds: &ViewBox,
    restitution: f64,
    position: &mut Vec2,
    velocity: &mut Vec2,
    mut half_step: Option<&mut [f64]>,
) -> bool {
    let mut hit = false;
    for axis in 0..2 {
        let lo = bounds.min.axis(axis);
        let hi = bounds.max.axis(axis);
        let p = position.axis(axis);
        // outward normal sign for the violated face
        let outward = if p < lo {
            -1.0
        } else if p > hi {
            1.0
        } else {
            continue;
        };
        hit = true;
        *position.axis_mut(axis) = if outward < 0.0 { lo } else { hi };
        let v = velocity.axis_mut(axis);
        if *v * outward > 0.0 {
            *v *= -restitution;
        }
        if let Some(half) = half_step.as_deref_mut() {
            if half[axis] * outward > 0.0 {
                half[axis] *= -restitution;
            }
        }
    }
    hit
}
