//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

// negated comparisons are deliberate: a NaN measurement must fail
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::collections::{BTreeSet, VecDeque};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use softbody_core::builder::{self, LodConfig};
use softbody_core::deck::default_deck;
use softbody_core::physics::{Dimensionality, SimParams, SoftBody, ViewBox, World};
use softbody_core::presentation::{InputEvent, KeyCode, NavCommand};
use softbody_core::protocol::{encode_frame, FrameSnapshot};
use softbody_core::{IntegratorKind, Vec2};
use softbody_harness::{run_grid, System};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !($cond) {
            return Err(format!($($msg)+));
        }
    };
}

fn ratios(system: System, grid: &[f64], end: f64) -> Vec<(IntegratorKind, Vec<f64>, Vec<f64>)> {
    let rows = run_grid(system, grid, end);
    IntegratorKind::ALL
        .iter()
        .map(|&kind| {
            let errs: Vec<f64> = rows
                .iter()
                .filter(|r| r.integrator == kind.name())
                .map(|r| r.max_error)
                .collect();
            let ratios = errs.windows(2).map(|w| w[0] / w[1]).collect();
            (kind, errs, ratios)
        })
        .collect()
}

fn convergence() -> Outcome {
    let start = Instant::now();
    let grid = [1.0 / 60.0, 1.0 / 120.0, 1.0 / 240.0];
    let mut detail = Vec::new();
    for (kind, _, r) in ratios(System::Oscillator, &grid, 2.0) {
        let (lo, hi) = match kind {
            IntegratorKind::ExplicitEuler => (1.6, 2.4),
            IntegratorKind::Midpoint | IntegratorKind::Feynman => (3.2, 4.8),
            IntegratorKind::Rk4 => (12.0, 20.0),
        };
        ensure!(r.iter().all(|x| (lo..=hi).contains(x)), "{kind}: ratios {r:?} outside [{lo}, {hi}]");
        detail.push(format!("{}={:.2}/{:.2}", kind.name(), r[0], r[1]));
    }
    let secs = start.elapsed().as_secs_f64();
    ensure!(secs < 10.0, "took {secs:.1} s");
    Ok(format!("{} in {secs:.2} s", detail.join(" ")))
}

fn analytic_accuracy() -> Outcome {
    let rows = run_grid(System::Oscillator, &[0.01], 1.0);
    let rk4 = rows.iter().find(|r| r.integrator == "rk4").unwrap();
    ensure!(rk4.steps == 100, "expected 100 steps, got {}", rk4.steps);
    ensure!(rk4.max_error <= 1e-6, "rk4 oscillator error {:e}", rk4.max_error);
    let free = run_grid(System::Freefall, &[1.0 / 60.0], 2.0);
    let mut worst: f64 = 0.0;
    for r in free.iter().filter(|r| r.integrator != "euler") {
        ensure!(r.max_error <= 1e-9, "{} freefall error {:e}", r.integrator, r.max_error);
        worst = worst.max(r.max_error);
    }
    Ok(format!("rk4 oscillator {:.1e} m, freefall worst {worst:.1e} m", rk4.max_error))
}

fn momentum() -> Outcome {
    let mut worst: f64 = 0.0;
    for kind in IntegratorKind::ALL {
        let soft = |dim, center| LodConfig {
            resolution: 10,
            layers: 3,
            particle_mass: 1.0,
            k_structural: 1.0,
            k_radial: 1.0,
            k_shear: 0.5,
            damping: 0.0,
            pin_ends: false,
            center,
            ..LodConfig::for_dimensionality(dim)
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mut bodies: Vec<SoftBody> = [
            soft(Dimensionality::One, Vec2::new(0.0, 5.0)),
            soft(Dimensionality::Two, Vec2::new(-5.0, 0.0)),
            soft(Dimensionality::Three, Vec2::new(5.0, 0.0)),
        ]
        .iter()
        .map(|c| builder::build(c).unwrap())
        .collect();
        for p in bodies.iter_mut().flat_map(|b| &mut b.particles) {
            p.velocity = Vec2::new(rng.gen_range(-0.1..0.1), rng.gen_range(-0.1..0.1));
        }
        let params = SimParams {
            gravity: Vec2::ZERO,
            ..SimParams::default()
        };
        let bounds = ViewBox::new(Vec2::new(-1e3, -1e3), Vec2::new(1e3, 1e3));
        let mut w = World::new(bodies, params, bounds).unwrap();
        let p0 = w.total_momentum();
        for _ in 0..10_000 {
            w.step(kind).map_err(|f| format!("{kind}: fault {f:?}"))?;
        }
        ensure!(w.diagnostics.collisions == 0, "{kind}: collisions happened");
        let dp = (w.total_momentum() - p0).length();
        ensure!(dp <= 1e-9, "{kind}: |dp| = {dp:e}");
        worst = worst.max(dp);
    }
    Ok(format!("worst |dp| {worst:.1e} over 1e4 steps"))
}

fn leapfrog_energy() -> Outcome {
    let mut w = System::Oscillator.world(0.01);
    let e0 = w.total_energy();
    let mut excursion: f64 = 0.0;
    for _ in 0..100_000 {
        w.step(IntegratorKind::Feynman).map_err(|f| format!("fault {f:?}"))?;
        excursion = excursion.max((w.total_energy() - e0).abs());
    }
    let rel = excursion / e0;
    ensure!(rel <= 0.01, "relative excursion {rel:e}");
    Ok(format!("relative excursion {rel:.2e} over 1e5 steps"))
}

fn containment() -> Outcome {
    let deck = default_deck();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut slides = 0;
    for slide in deck.slides().iter().filter(|s| s.is_simulation()) {
        let scene = slide.initial_scene.as_ref().unwrap();
        let mut w = scene.world.clone();
        let b = w.view_box;
        let pointer = |rng: &mut ChaCha8Rng| {
            let margin = 1.0;
            Vec2::new(
                rng.gen_range(b.min.x - margin..b.max.x + margin),
                rng.gen_range(b.min.y - margin..b.max.y + margin),
            )
        };
        for step in 0..10_000u32 {
            match rng.gen_range(0..100) {
                0..=1 => {
                    w.begin_drag(pointer(&mut rng));
                }
                2 => w.end_drag(),
                3..=30 => w.update_drag(pointer(&mut rng)),
                _ => {}
            }
            w.step(scene.integrator)
                .map_err(|f| format!("slide `{}`: fault {f:?}", slide.id))?;
            for body in &w.bodies {
                for p in &body.particles {
                    ensure!(b.contains(p.position), "slide `{}` step {step}: particle at {:?}", slide.id, p.position);
                }
            }
        }
        slides += 1;
    }
    Ok(format!("{slides} sim slides x 1e4 fuzzed steps, nothing escaped"))
}

fn connected_and_simple(body: &SoftBody) -> Result<(), String> {
    let n = body.particles.len();
    let mut seen = BTreeSet::new();
    let mut adj = vec![Vec::new(); n];
    for s in &body.springs {
        if s.a == s.b || s.a >= n || s.b >= n {
            return Err(format!("bad spring {}-{}", s.a, s.b));
        }
        if !seen.insert((s.a.min(s.b), s.a.max(s.b))) {
            return Err(format!("duplicate spring {}-{}", s.a, s.b));
        }
        adj[s.a].push(s.b);
        adj[s.b].push(s.a);
    }
    let mut reached = vec![false; n];
    let mut queue = VecDeque::from([0]);
    reached[0] = true;
    while let Some(i) = queue.pop_front() {
        for &j in &adj[i] {
            if !reached[j] {
                reached[j] = true;
                queue.push_back(j);
            }
        }
    }
    if reached.iter().all(|r| *r) {
        Ok(())
    } else {
        Err("graph is disconnected".into())
    }
}

fn builder_combinatorics() -> Outcome {
    let mut bodies = 0;
    for layers in [2u8, 3] {
        for n in 3..=64usize {
            let l = usize::from(layers);
            for dim in [Dimensionality::Two, Dimensionality::Three] {
                if dim == Dimensionality::Three && n % 2 == 1 {
                    continue;
                }
                let cfg = LodConfig {
                    resolution: n,
                    layers,
                    ..LodConfig::for_dimensionality(dim)
                };
                let body = builder::build(&cfg).map_err(|e| format!("layers {layers} n {n}: {e}"))?;
                let braces = if dim == Dimensionality::Three { l * n / 2 } else { 0 };
                ensure!(body.particles.len() == l * n, "{dim} layers {layers} n {n}: particle count");
                ensure!(
                    body.springs.len() == l * n + (l - 1) * 3 * n + braces,
                    "{dim} layers {layers} n {n}: {} springs",
                    body.springs.len()
                );
                connected_and_simple(&body).map_err(|e| format!("{dim} layers {layers} n {n}: {e}"))?;
                bodies += 1;
            }
        }
    }
    Ok(format!("{bodies} bodies: counts, connectivity and uniqueness hold"))
}

fn record_starts(bytes: &[u8]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut offset = 0;
    while offset < bytes.len() {
        let len = u32::from_be_bytes(bytes[offset..offset + 4].try_into().unwrap()) as usize;
        out.push((offset, 4 + len));
        offset += 4 + len;
    }
    out
}

fn determinism() -> Outcome {
    let exe = env!("CARGO_BIN_EXE_softbody");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let softbody = |args: &[&str]| Command::new(exe).args(args).output().expect("binary runs");
    let path = |name: String| dir.path().join(name).to_string_lossy().into_owned();
    for index in 0..15 {
        let (a, b) = (path(format!("{index}a.trace")), path(format!("{index}b.trace")));
        let slide = index.to_string();
        for out in [&a, &b] {
            let o = softbody(&["run", "--slide", &slide, "--ticks", "1000", "--out", out]);
            ensure!(o.status.success(), "slide {index}: run failed: {}", String::from_utf8_lossy(&o.stderr));
        }
        let bytes = std::fs::read(&a).unwrap();
        ensure!(bytes == std::fs::read(&b).unwrap(), "slide {index}: reruns differ");
        let o = softbody(&["verify", "--trace", &a]);
        ensure!(o.status.code() == Some(0), "slide {index}: verify exit {:?}", o.status.code());

        let records = record_starts(&bytes);
        ensure!(records.len() == 1002, "slide {index}: {} records", records.len());
        let record = rng.gen_range(0..records.len());
        let (start, len) = records[record];
        let pos = start + rng.gen_range(0..len);
        let mut tampered = bytes.clone();
        tampered[pos] ^= 1 << rng.gen_range(0..8);
        std::fs::write(&b, &tampered).unwrap();
        let o = softbody(&["verify", "--trace", &b]);
        let stderr = String::from_utf8_lossy(&o.stderr);
        let tick = record.saturating_sub(1);
        ensure!(o.status.code() == Some(3), "slide {index}: tamper at byte {pos} gave exit {:?}", o.status.code());
        ensure!(
            stderr.contains(&format!("at tick {tick}:")),
            "slide {index}: tamper in record {record} reported as `{}`",
            stderr.trim()
        );
    }
    Ok("15 slides x 1000 ticks: reruns identical, verify ok, tampering located".into())
}

fn deck_fidelity() -> Outcome {
    let expected = [
        "title",
        "toc",
        "introduction",
        "sim-1d",
        "sim-2d",
        "sim-3d",
        "sim-all-d",
        "all-euler",
        "all-midpoint",
        "all-feynman",
        "all-rk4",
        "shortcomings",
        "projected-features",
        "conclusion",
        "references",
    ];
    let mut p = default_deck();
    let ids: Vec<String> = p.slides().iter().map(|s| s.id.clone()).collect();
    ensure!(ids == expected, "order {ids:?}");
    let mut geometry = Vec::new();
    for (offset, kind) in IntegratorKind::ALL.iter().enumerate() {
        let index = 7 + offset;
        p.navigate(NavCommand::Goto(index)).unwrap();
        let scene = p.scene().ok_or(format!("slide {} has no scene", index + 1))?;
        ensure!(scene.integrator == *kind, "slide {} runs {}", index + 1, scene.integrator);
        geometry.push(encode_frame(&FrameSnapshot {
            slide_index: 0,
            slide_title: String::new(),
            tidgets: Vec::new(),
            integrator: String::new(),
            ..FrameSnapshot::capture(&p)
        }));
    }
    ensure!(geometry.windows(2).all(|w| w[0] == w[1]), "integrator slides differ in geometry");
    Ok("15 slides in order; slides 8-11 differ only in integrator".into())
}

fn presentation_fuzz() -> Outcome {
    let mut p = default_deck();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let keys = [
        KeyCode::Space,
        KeyCode::PageUp,
        KeyCode::PageDown,
        KeyCode::Home,
        KeyCode::End,
        KeyCode::Left,
        KeyCode::Right,
    ];
    let mut toggles = 0;
    for event_no in 0..100_000u32 {
        let point = Vec2::new(rng.gen_range(-3.0..3.0), rng.gen_range(-2.5..2.5));
        let event = match rng.gen_range(0..100) {
            0..=29 => InputEvent::Key(keys[rng.gen_range(0..keys.len())]),
            30..=49 => InputEvent::Key(KeyCode::Char(
                ['t', 'b', 'r', 'p', '1', '2', '3', '4', 'x', 'q'][rng.gen_range(0..10)],
            )),
            50..=54 => InputEvent::Key(KeyCode::Char(char::from(rng.gen_range(b'!'..=b'~')))),
            55..=59 => InputEvent::PointerDown(point),
            60..=74 => InputEvent::PointerMove(point),
            75..=79 => InputEvent::PointerUp,
            80 => InputEvent::PointerMove(Vec2::new(f64::NAN, f64::INFINITY)),
            81 => InputEvent::Tick([0.0, -1.0, f64::NAN][rng.gen_range(0..3)]),
            _ => InputEvent::Tick(1.0 / 60.0),
        };
        let outcome = catch_unwind(AssertUnwindSafe(|| p.dispatch(event)));
        ensure!(outcome.is_ok(), "event {event_no} {event:?} panicked");
        ensure!(p.current() < p.len(), "event {event_no}: current {} out of range", p.current());
        if let Some(fault) = p.scene().and_then(|s| s.fault) {
            return Err(format!("event {event_no}: slide {} faulted {fault:?}", p.current()));
        }
        if event_no % 997 == 0 {
            let before = (p.tidgets_enabled(), encode_frame(&FrameSnapshot::capture(&p)));
            p.dispatch(InputEvent::Key(KeyCode::Char('t')));
            ensure!(p.tidgets_enabled() != before.0, "'t' did not toggle");
            p.dispatch(InputEvent::Key(KeyCode::Char('t')));
            let after = (p.tidgets_enabled(), encode_frame(&FrameSnapshot::capture(&p)));
            ensure!(after == before, "'t' twice changed the frame");
            toggles += 1;
        }
    }
    Ok(format!("1e5 events, no fault, {toggles} toggle round trips"))
}

fn main() {
    // silence the default hook; failures are reported below
    std::panic::set_hook(Box::new(|_| {}));
    let criteria: [Criterion; 9] = [
        ("convergence orders", convergence),
        ("analytic accuracy", analytic_accuracy),
        ("momentum conservation", momentum),
        ("leapfrog energy boundedness", leapfrog_energy),
        ("containment", containment),
        ("builder combinatorics", builder_combinatorics),
        ("determinism", determinism),
        ("deck fidelity", deck_fidelity),
        ("presentation fuzz", presentation_fuzz),
    ];
    assert!(Path::new(env!("CARGO_BIN_EXE_softbody")).exists());
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let result = catch_unwind(check).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS  {name:<28} {detail} ({secs:.1} s)"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name:<28} {why} ({secs:.1} s)");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
