use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use softbody_core::builder::{self, ring_mirror, LodConfig};
use softbody_core::physics::{Dimensionality, SimParams, ViewBox, World};
use softbody_core::{IntegratorKind, Vec2};

fn ring(n: usize, layers: u8, damping: f64) -> LodConfig {
    LodConfig {
        resolution: n,
        layers,
        damping,
        ..LodConfig::for_dimensionality(if layers == 3 { Dimensionality::Three } else { Dimensionality::Two })
    }
}

fn weightless() -> SimParams {
    SimParams {
        gravity: Vec2::ZERO,
        ..SimParams::default()
    }
}

fn big_box() -> ViewBox {
    ViewBox::new(Vec2::new(-100.0, -100.0), Vec2::new(100.0, 100.0))
}

#[test]
fn momentum_is_conserved_by_every_integrator() {
    for kind in IntegratorKind::ALL {
        let mut body = builder::build(&LodConfig {
            particle_mass: 1.0,
            k_structural: 1.0,
            k_radial: 1.0,
            k_shear: 0.5,
            ..ring(12, 2, 0.0)
        })
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for p in &mut body.particles {
            p.velocity = Vec2::new(rng.gen_range(-0.1..0.1), rng.gen_range(-0.1..0.1));
        }
        let mut w = World::new(vec![body], weightless(), big_box()).unwrap();
        let p0 = w.total_momentum();
        for _ in 0..2000 {
            w.step(kind).unwrap();
        }
        assert_eq!(w.diagnostics.collisions, 0);
        let dp = (w.total_momentum() - p0).length();
        assert!(dp <= 1e-9, "{kind}: |dp| = {dp:e}");
    }
}

fn assert_mirrored(w: &World, n: usize, tol: f64) {
    let particles = &w.bodies[0].particles;
    for (i, p) in particles.iter().enumerate() {
        let m = &particles[ring_mirror(i, n)];
        assert!((p.position.x + m.position.x).abs() <= tol, "x of {i}: {:e}", p.position.x + m.position.x);
        assert!((p.position.y - m.position.y).abs() <= tol, "y of {i}");
        assert!((p.velocity.x + m.velocity.x).abs() <= tol * 1e3, "vx of {i}");
    }
}

#[test]
fn mirror_symmetry_survives_gravity_and_walls() {
    for kind in IntegratorKind::ALL {
        for layers in [2u8, 3] {
            let n = 16;
            let cfg = LodConfig {
                center: Vec2::new(0.0, 0.3),
                ..ring(n, layers, 2.0)
            };
            let body = builder::build(&cfg).unwrap();
            let bounds = ViewBox::new(Vec2::new(-2.0, -1.5), Vec2::new(2.0, 1.5));
            let mut w = World::new(vec![body], SimParams::default(), bounds).unwrap();
            assert_mirrored(&w, n, 0.0);
            for _ in 0..1500 {
                w.step(kind).unwrap();
            }
            assert!(w.diagnostics.collisions > 0, "{kind}: body never hit the floor");
            assert_mirrored(&w, n, 1e-9);
        }
    }
}

#[test]
fn dragging_a_pinned_particle_moves_nothing_pinned() {
    let cfg = LodConfig {
        resolution: 8,
        spacing: 0.2,
        ..LodConfig::for_dimensionality(Dimensionality::One)
    };
    let body = builder::build(&cfg).unwrap();
    let end = body.particles[0].position;
    assert!(body.particles[0].pinned);
    let bounds = ViewBox::new(Vec2::new(-2.0, -1.5), Vec2::new(2.0, 1.5));
    let mut w = World::new(vec![body], SimParams::default(), bounds).unwrap();
    let handle = w.begin_drag(end).unwrap();
    assert_eq!(handle.particle, 0);
    w.update_drag(Vec2::new(1.5, 1.4));
    for kind in IntegratorKind::ALL {
        for _ in 0..250 {
            w.step(kind).unwrap();
        }
    }
    assert_eq!(w.bodies[0].particles[0].position, end);
    assert_eq!(w.bodies[0].particles[0].velocity, Vec2::ZERO);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn containment_under_random_pulls(seed in any::<u64>(), kind in 0usize..4) {
        let kind = IntegratorKind::ALL[kind];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let body = builder::build(&LodConfig {
            particle_mass: 0.2,
            k_structural: 200.0,
            k_radial: 200.0,
            k_shear: 100.0,
            damping: 2.0,
            ..ring(12, 2, 2.0)
        })
        .unwrap();
        let bounds = ViewBox::new(Vec2::new(-2.0, -1.5), Vec2::new(2.0, 1.5));
        let mut w = World::new(vec![body], SimParams::default(), bounds).unwrap();
        for step in 0..600 {
            if step % 40 == 0 {
                w.end_drag();
                w.begin_drag(Vec2::new(rng.gen_range(-2.0..2.0), rng.gen_range(-1.5..1.5)));
            }
            w.update_drag(Vec2::new(rng.gen_range(-4.0..4.0), rng.gen_range(-3.0..3.0)));
            w.step(kind).unwrap();
            for p in &w.bodies[0].particles {
                prop_assert!(bounds.contains(p.position), "{:?} escaped at step {}", p.position, step);
            }
        }
    }
}
