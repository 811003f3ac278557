use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::integrators::IntegratorKind;
use crate::math::Vec2;
use crate::physics::SpringRole;
use crate::presentation::{InputEvent, KeyCode, NavCommand, NavError, Presentation};

/// Controller input, as sent by a front end.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Command {
    Navigate { cmd: NavCommand },
    Key { code: KeyCode },
    PointerDown { x: f64, y: f64 },
    PointerMove { x: f64, y: f64 },
    PointerUp { x: f64, y: f64 },
    SetIntegrator { name: IntegratorKind },
    SetParam { path: String, value: f64 },
    // Empty braces so stray fields are rejected like everywhere else.
    Reset {},
    Pause {},
    Run {},
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CommandError {
    #[error(transparent)]
    Navigation(#[from] NavError),
    #[error("current slide has no simulation scene")]
    NoScene,
    #[error("unknown parameter `{0}`")]
    UnknownParam(String),
    #[error("parameter `{path}` = {value} outside [{min}, {max}]")]
    OutOfRange { path: String, value: f64, min: f64, max: f64 },
    #[error("pointer coordinates must be finite")]
    NonFinitePointer,
}

/// A steerable scene parameter and its legal range (inclusive).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamSpec {
    pub path: &'static str,
    pub min: f64,
    pub max: f64,
    pub integer: bool,
}

const fn param(path: &'static str, min: f64, max: f64) -> ParamSpec {
    ParamSpec {
        path,
        min,
        max,
        integer: false,
    }
}

/// Everything `SetParam` accepts. Front ends build their panels from this.
pub const PARAMS: [ParamSpec; 11] = [
    param("gravity.x", -50.0, 50.0),
    param("gravity.y", -50.0, 50.0),
    param("restitution", 0.0, 1.0),
    param("drag_stiffness", 0.0, 1000.0),
    param("drag_damping", 0.0, 100.0),
    param("stiffness.structural", 1e-3, 5000.0),
    param("stiffness.radial", 1e-3, 5000.0),
    param("stiffness.shear", 1e-3, 5000.0),
    param("damping", 0.0, 50.0),
    param("mass", 1e-3, 10.0),
    ParamSpec {
        path: "substeps",
        min: 1.0,
        max: 64.0,
        integer: true,
    },
];

fn pointer(x: f64, y: f64) -> Result<Vec2, CommandError> {
    let p = Vec2::new(x, y);
    if p.is_finite() {
        Ok(p)
    } else {
        Err(CommandError::NonFinitePointer)
    }
}

/// Applies one command between steps. A rejected command leaves the
/// presentation untouched.
pub fn apply_command(p: &mut Presentation, command: &Command) -> Result<(), CommandError> {
    match command {
        Command::Navigate { cmd } => p.navigate(*cmd)?,
        Command::Key { code } => p.dispatch(InputEvent::Key(*code)),
        Command::PointerDown { x, y } => p.dispatch(InputEvent::PointerDown(pointer(*x, *y)?)),
        Command::PointerMove { x, y } => p.dispatch(InputEvent::PointerMove(pointer(*x, *y)?)),
        Command::PointerUp { .. } => p.dispatch(InputEvent::PointerUp),
        Command::SetIntegrator { name } => p.scene_mut().ok_or(CommandError::NoScene)?.set_integrator(*name),
        Command::SetParam { path, value } => set_param(p, path, *value)?,
        Command::Reset {} => p.current_slide_mut().reset_scene(),
        Command::Pause {} | Command::Run {} => {
            if let Some(scene) = p.scene_mut() {
                scene.running = matches!(command, Command::Run {});
            }
        }
    }
    Ok(())
}

fn set_param(p: &mut Presentation, path: &str, value: f64) -> Result<(), CommandError> {
    let spec = PARAMS
        .iter()
        .find(|s| s.path == path)
        .ok_or_else(|| CommandError::UnknownParam(path.to_string()))?;
    let in_range = value >= spec.min && value <= spec.max && (!spec.integer || value.fract() == 0.0);
    if !in_range {
        return Err(CommandError::OutOfRange {
            path: path.to_string(),
            value,
            min: spec.min,
            max: spec.max,
        });
    }
    let scene = p.scene_mut().ok_or(CommandError::NoScene)?;
    let world = &mut scene.world;
    let springs = |world: &mut crate::physics::World, role: Option<SpringRole>, f: &dyn Fn(&mut crate::physics::Spring)| {
        for s in world.bodies.iter_mut().flat_map(|b| &mut b.springs) {
            if role.is_none_or(|r| s.role == r) {
                f(s);
            }
        }
    };
    match path {
        "gravity.x" => world.params.gravity.x = value,
        "gravity.y" => world.params.gravity.y = value,
        "restitution" => world.params.restitution = value,
        "drag_stiffness" => world.params.drag_stiffness = value,
        "drag_damping" => world.params.drag_damping = value,
        "stiffness.structural" => springs(world, Some(SpringRole::Structural), &|s| s.stiffness = value),
        "stiffness.radial" => springs(world, Some(SpringRole::Radial), &|s| s.stiffness = value),
        "stiffness.shear" => springs(world, Some(SpringRole::Shear), &|s| s.stiffness = value),
        "damping" => springs(world, None, &|s| s.damping = value),
        "mass" => {
            for particle in world.bodies.iter_mut().flat_map(|b| &mut b.particles) {
                particle.mass = value;
            }
        }
        "substeps" => scene.substeps_per_tick = value as usize,
        _ => unreachable!("every PARAMS entry is handled"),
    }
    Ok(())
}
