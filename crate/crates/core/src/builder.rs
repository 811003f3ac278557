//! Construction of 1D chains and layered 2D/3D ring bodies from a
//! level-of-detail configuration.
//!
//! Ring particles are indexed `layer * n + i`, layer 0 outermost, angle index
//! `i` running clockwise from the top. Every body is born at equilibrium:
//! spring rest lengths are the as-built endpoint distances.
//!
//! Connectivity for `layers` rings of `n` particles:
//!
//! * structural: `(L,i)–(L,i+1)` around every ring (`layers·n`)
//! * radial: `(L,i)–(L+1,i)` (`(layers−1)·n`)
//! * shear: `(L,i)–(L+1,i±1)` (`(layers−1)·2n`)
//! * 3D only, structural braces `(L,i)–(L,i+n/2)` for `i < n/2` (`layers·n/2`)

use std::f64::consts::TAU;

use thiserror::Error;

use crate::math::Vec2;
use crate::physics::{Dimensionality, Particle, SoftBody, Spring, SpringRole};

#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid body config `{field}`: {reason}")]
pub struct ConfigError {
    pub field: &'static str,
    pub reason: String,
}

impl ConfigError {
    fn new(field: &'static str, reason: impl Into<String>) -> Self {
        Self {
            field,
            reason: reason.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LodConfig {
    pub dimensionality: Dimensionality,
    /// Ring count for 2D/3D bodies (2 or 3); not used by chains.
    pub layers: u8,
    /// Particles per ring, or chain length.
    pub resolution: usize,
    /// Outer ring radius (m).
    pub radius: f64,
    pub layer_gap: f64,
    /// Chain particle spacing (m).
    pub spacing: f64,
    pub particle_mass: f64,
    pub k_structural: f64,
    pub k_radial: f64,
    pub k_shear: f64,
    pub damping: f64,
    pub center: Vec2,
    /// Pin both chain ends.
    pub pin_ends: bool,
    pub material: String,
}

impl Default for LodConfig {
    fn default() -> Self {
        Self {
            dimensionality: Dimensionality::Two,
            layers: 2,
            resolution: 16,
            radius: 0.5,
            layer_gap: 0.15,
            spacing: 0.1,
            particle_mass: 0.1,
            k_structural: 400.0,
            k_radial: 400.0,
            k_shear: 200.0,
            damping: 1.5,
            center: Vec2::ZERO,
            pin_ends: true,
            material: "elastic".to_string(),
        }
    }
}

impl LodConfig {
    pub fn for_dimensionality(dimensionality: Dimensionality) -> Self {
        Self {
            dimensionality,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive = |field: &'static str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(ConfigError::new(field, format!("must be positive, got {v}")))
            }
        };
        if !matches!(self.layers, 2 | 3) {
            return Err(ConfigError::new("layers", format!("must be 2 or 3, got {}", self.layers)));
        }
        positive("mass", self.particle_mass)?;
        positive("k_structural", self.k_structural)?;
        positive("k_radial", self.k_radial)?;
        positive("k_shear", self.k_shear)?;
        if !(self.damping >= 0.0 && self.damping.is_finite()) {
            return Err(ConfigError::new("damping", format!("must be non-negative, got {}", self.damping)));
        }
        if !self.center.is_finite() {
            return Err(ConfigError::new("center", "must be finite"));
        }
        match self.dimensionality {
            Dimensionality::One => {
                if self.resolution < 2 {
                    return Err(ConfigError::new("n", format!("chain needs n >= 2, got {}", self.resolution)));
                }
                positive("spacing", self.spacing)?;
            }
            Dimensionality::Two | Dimensionality::Three => {
                if self.resolution < 3 {
                    return Err(ConfigError::new("n", format!("ring needs n >= 3, got {}", self.resolution)));
                }
                if self.dimensionality == Dimensionality::Three && !self.resolution.is_multiple_of(2) {
                    return Err(ConfigError::new(
                        "n",
                        format!("antipodal bracing needs even n, got {}", self.resolution),
                    ));
                }
                positive("layer_gap", self.layer_gap)?;
                positive("radius", self.radius)?;
                let inner = self.layer_gap * f64::from(self.layers - 1);
                if self.radius <= inner {
                    return Err(ConfigError::new(
                        "radius",
                        format!("radius {} must exceed layer_gap*(layers-1) = {inner}", self.radius),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Particle and per-role spring counts of a body.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BodySpec {
    pub particle_count: usize,
    pub structural: usize,
    pub radial: usize,
    pub shear: usize,
    pub dimensionality: Dimensionality,
    pub layers: u8,
}

impl BodySpec {
    /// Closed-form counts the builder must produce for `cfg`.
    pub fn expected(cfg: &LodConfig) -> Self {
        let n = cfg.resolution;
        let layers = usize::from(cfg.layers);
        let (particle_count, structural, radial, shear) = match cfg.dimensionality {
            Dimensionality::One => (n, n - 1, 0, 0),
            Dimensionality::Two => (layers * n, layers * n, (layers - 1) * n, (layers - 1) * 2 * n),
            Dimensionality::Three => (
                layers * n,
                layers * n + layers * (n / 2),
                (layers - 1) * n,
                (layers - 1) * 2 * n,
            ),
        };
        Self {
            particle_count,
            structural,
            radial,
            shear,
            dimensionality: cfg.dimensionality,
            layers: cfg.layers,
        }
    }

    pub fn of(body: &SoftBody) -> Self {
        Self {
            particle_count: body.particles.len(),
            structural: body.count_springs(SpringRole::Structural),
            radial: body.count_springs(SpringRole::Radial),
            shear: body.count_springs(SpringRole::Shear),
            dimensionality: body.dimensionality,
            layers: body.layers,
        }
    }

    pub fn spring_count(&self) -> usize {
        self.structural + self.radial + self.shear
    }
}

pub fn build(cfg: &LodConfig) -> Result<SoftBody, ConfigError> {
    match cfg.dimensionality {
        Dimensionality::One => build_1d(cfg),
        Dimensionality::Two => build_2d(cfg),
        Dimensionality::Three => build_3d(cfg),
    }
}

/// Horizontal chain centred on `cfg.center`.
pub fn build_1d(cfg: &LodConfig) -> Result<SoftBody, ConfigError> {
    let cfg = &LodConfig {
        dimensionality: Dimensionality::One,
        ..cfg.clone()
    };
    cfg.validate()?;
    let n = cfg.resolution;
    let half_span = (n - 1) as f64 / 2.0;
    let particles = (0..n)
        .map(|i| {
            let offset = Vec2::new((i as f64 - half_span) * cfg.spacing, 0.0);
            let p = Particle::new(cfg.center + offset, cfg.particle_mass);
            if cfg.pin_ends && (i == 0 || i == n - 1) {
                p.pinned()
            } else {
                p
            }
        })
        .collect();
    let mut body = SoftBody {
        particles,
        springs: Vec::with_capacity(n - 1),
        dimensionality: Dimensionality::One,
        layers: cfg.layers,
        material: cfg.material.clone(),
    };
    for i in 0..n - 1 {
        link(&mut body, i, i + 1, cfg.k_structural, cfg.damping, SpringRole::Structural);
    }
    Ok(body)
}

/// Concentric layered rings.
pub fn build_2d(cfg: &LodConfig) -> Result<SoftBody, ConfigError> {
    let cfg = &LodConfig {
        dimensionality: Dimensionality::Two,
        ..cfg.clone()
    };
    cfg.validate()?;
    Ok(layered_rings(cfg))
}

/// Planar stand-in for a layered sphere: the 2D rings plus antipodal braces
/// on every ring.
pub fn build_3d(cfg: &LodConfig) -> Result<SoftBody, ConfigError> {
    let cfg = &LodConfig {
        dimensionality: Dimensionality::Three,
        ..cfg.clone()
    };
    cfg.validate()?;
    let mut body = layered_rings(cfg);
    let n = cfg.resolution;
    for layer in 0..usize::from(cfg.layers) {
        for i in 0..n / 2 {
            let base = layer * n;
            link(&mut body, base + i, base + i + n / 2, cfg.k_structural, cfg.damping, SpringRole::Structural);
        }
    }
    body.dimensionality = Dimensionality::Three;
    Ok(body)
}

/// Index of the mirror image (about the vertical axis through the centre)
/// of ring particle `index`.
pub fn ring_mirror(index: usize, n: usize) -> usize {
    let (layer, i) = (index / n, index % n);
    layer * n + (n - i) % n
}

/// Unit offsets for angle indices `0..n`, exactly mirror-symmetric in x.
fn ring_offsets(n: usize) -> Vec<Vec2> {
    let mut offsets = vec![Vec2::ZERO; n];
    for i in 0..=n / 2 {
        let phi = TAU * i as f64 / n as f64;
        let x = if i == 0 || 2 * i == n { 0.0 } else { phi.sin() };
        let y = if 2 * i == n { -1.0 } else { phi.cos() };
        offsets[i] = Vec2::new(x, y);
        if i != 0 {
            offsets[n - i] = Vec2::new(-x, y);
        }
    }
    offsets
}

fn layered_rings(cfg: &LodConfig) -> SoftBody {
    let n = cfg.resolution;
    let layers = usize::from(cfg.layers);
    let unit = ring_offsets(n);
    let mut particles = Vec::with_capacity(layers * n);
    for layer in 0..layers {
        let r = cfg.radius - cfg.layer_gap * layer as f64;
        particles.extend(unit.iter().map(|u| Particle::new(cfg.center + *u * r, cfg.particle_mass)));
    }
    let mut body = SoftBody {
        particles,
        springs: Vec::with_capacity(layers * n + (layers - 1) * 3 * n + layers * n / 2),
        dimensionality: Dimensionality::Two,
        layers: cfg.layers,
        material: cfg.material.clone(),
    };
    for layer in 0..layers {
        let base = layer * n;
        for i in 0..n {
            link(&mut body, base + i, base + (i + 1) % n, cfg.k_structural, cfg.damping, SpringRole::Structural);
        }
    }
    for layer in 0..layers - 1 {
        let outer = layer * n;
        let inner = outer + n;
        for i in 0..n {
            link(&mut body, outer + i, inner + i, cfg.k_radial, cfg.damping, SpringRole::Radial);
            link(&mut body, outer + i, inner + (i + 1) % n, cfg.k_shear, cfg.damping, SpringRole::Shear);
            link(&mut body, outer + i, inner + (i + n - 1) % n, cfg.k_shear, cfg.damping, SpringRole::Shear);
        }
    }
    body
}

fn link(body: &mut SoftBody, a: usize, b: usize, stiffness: f64, damping: f64, role: SpringRole) {
    let rest_length = body.particles[a].position.distance(body.particles[b].position);
    body.springs.push(Spring {
        a,
        b,
        rest_length,
        stiffness,
        damping,
        role,
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrators::IntegratorKind;
    use crate::physics::{SimParams, ViewBox, World};
    use std::collections::{BTreeSet, VecDeque};

    fn cfg(dim: Dimensionality, layers: u8, n: usize) -> LodConfig {
        LodConfig {
            dimensionality: dim,
            layers,
            resolution: n,
            ..LodConfig::default()
        }
    }

    fn connected(body: &SoftBody) -> bool {
        let n = body.particles.len();
        let mut adj = vec![Vec::new(); n];
        for s in &body.springs {
            adj[s.a].push(s.b);
            adj[s.b].push(s.a);
        }
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(i) = queue.pop_front() {
            for &j in &adj[i] {
                if !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    fn unique_pairs(body: &SoftBody) -> bool {
        let pairs: BTreeSet<_> = body.springs.iter().map(|s| (s.a.min(s.b), s.a.max(s.b))).collect();
        pairs.len() == body.springs.len() && body.springs.iter().all(|s| s.a != s.b)
    }

    #[test]
    fn minimal_chain() {
        let body = build_1d(&cfg(Dimensionality::One, 2, 2)).unwrap();
        assert_eq!(body.particles.len(), 2);
        assert_eq!(body.springs.len(), 1);
    }

    #[test]
    fn chain_span_and_pins() {
        let c = LodConfig {
            spacing: 0.25,
            ..cfg(Dimensionality::One, 2, 5)
        };
        let body = build_1d(&c).unwrap();
        assert_eq!(body.springs.len(), 4);
        let span = body.particles[4].position.x - body.particles[0].position.x;
        assert_eq!(span, 1.0);
        assert!(body.particles[0].pinned && body.particles[4].pinned);
        assert!(body.particles[1..4].iter().all(|p| !p.pinned));
    }

    #[test]
    fn chain_rejects_single_particle() {
        let err = build_1d(&cfg(Dimensionality::One, 2, 1)).unwrap_err();
        assert_eq!(err.field, "n");
    }

    #[test]
    fn two_layer_ring_counts() {
        let body = build_2d(&cfg(Dimensionality::Two, 2, 8)).unwrap();
        let spec = BodySpec::of(&body);
        assert_eq!(spec.particle_count, 16);
        assert_eq!((spec.structural, spec.radial, spec.shear), (16, 8, 16));
        assert_eq!(spec.spring_count(), 40);
    }

    #[test]
    fn three_layer_triangle_counts() {
        let body = build_2d(&cfg(Dimensionality::Two, 3, 3)).unwrap();
        assert_eq!(body.particles.len(), 9);
        assert_eq!(body.springs.len(), 27);
        assert!(unique_pairs(&body));
    }

    #[test]
    fn braced_counts_and_parity() {
        let body = build_3d(&cfg(Dimensionality::Three, 2, 8)).unwrap();
        assert_eq!(body.particles.len(), 16);
        assert_eq!(body.springs.len(), 48);
        let err = build_3d(&cfg(Dimensionality::Three, 2, 7)).unwrap_err();
        assert_eq!(err.field, "n");
    }

    #[test]
    fn radius_ordering_is_enforced() {
        let c = LodConfig {
            radius: 0.3,
            layer_gap: 0.15,
            ..cfg(Dimensionality::Two, 3, 8)
        };
        assert_eq!(build_2d(&c).unwrap_err().field, "radius");
        let c = LodConfig {
            layer_gap: 0.0,
            ..cfg(Dimensionality::Two, 2, 8)
        };
        assert_eq!(build_2d(&c).unwrap_err().field, "layer_gap");
    }

    #[test]
    fn braced_body_is_mirror_symmetric() {
        let body = build_3d(&cfg(Dimensionality::Three, 3, 12)).unwrap();
        for (i, p) in body.particles.iter().enumerate() {
            let m = &body.particles[ring_mirror(i, 12)];
            assert_eq!(p.position.x, -m.position.x);
            assert_eq!(p.position.y, m.position.y);
        }
    }

    #[test]
    fn built_bodies_are_at_equilibrium() {
        let params = SimParams {
            gravity: Vec2::ZERO,
            ..SimParams::default()
        };
        let bounds = ViewBox::new(Vec2::new(-5.0, -5.0), Vec2::new(5.0, 5.0));
        for dim in [Dimensionality::One, Dimensionality::Two, Dimensionality::Three] {
            let body = build(&cfg(dim, 3, 10)).unwrap();
            let start: Vec<_> = body.particles.iter().map(|p| p.position).collect();
            let mut world = World::new(vec![body], params, bounds).unwrap();
            for _ in 0..100 {
                world.step(IntegratorKind::Rk4).unwrap();
            }
            for (p, s) in world.bodies[0].particles.iter().zip(&start) {
                assert!(p.position.distance(*s) <= 1e-12, "{dim}");
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn count_formulas_and_graph_shape(layers in 2u8..=3, n in 3usize..=64) {
            for dim in [Dimensionality::One, Dimensionality::Two, Dimensionality::Three] {
                let c = cfg(dim, layers, n);
                if dim == Dimensionality::Three && n % 2 == 1 {
                    proptest::prop_assert!(build(&c).is_err());
                    continue;
                }
                let body = build(&c).unwrap();
                proptest::prop_assert_eq!(BodySpec::of(&body), BodySpec::expected(&c));
                proptest::prop_assert!(connected(&body));
                proptest::prop_assert!(unique_pairs(&body));
                for s in &body.springs {
                    let d = body.particles[s.a].position.distance(body.particles[s.b].position);
                    proptest::prop_assert!((d - s.rest_length).abs() <= 1e-12);
                }
            }
        }
    }
}
