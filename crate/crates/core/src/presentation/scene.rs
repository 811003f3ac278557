use crate::integrators::IntegratorKind;
use crate::physics::{SimFault, World};

/// Fixed steps per rendered tick: 4 × 1/240 s per 60 Hz frame.
pub const DEFAULT_SUBSTEPS: usize = 4;

/// A live simulation hosted by a slide.
#[derive(Debug, Clone, PartialEq)]
pub struct SimScene {
    pub world: World,
    pub integrator: IntegratorKind,
    pub running: bool,
    /// At least 1.
    pub substeps_per_tick: usize,
    /// Set when a step produced non-finite state; the scene is paused.
    pub fault: Option<SimFault>,
}

impl SimScene {
    pub fn new(world: World, integrator: IntegratorKind) -> Self {
        Self {
            world,
            integrator,
            running: true,
            substeps_per_tick: DEFAULT_SUBSTEPS,
            fault: None,
        }
    }

    pub fn with_substeps(mut self, substeps: usize) -> Self {
        self.substeps_per_tick = substeps.max(1);
        self
    }

    pub fn set_integrator(&mut self, integrator: IntegratorKind) {
        self.integrator = integrator;
    }

    /// Runs `substeps_per_tick` fixed steps if the scene is running. A fault
    /// pauses the scene and leaves the world at its last good state.
    pub fn tick(&mut self) {
        if !self.running {
            return;
        }
        for _ in 0..self.substeps_per_tick {
            if let Err(fault) = self.world.step(self.integrator) {
                self.fault = Some(fault);
                self.running = false;
                return;
            }
        }
    }
}
