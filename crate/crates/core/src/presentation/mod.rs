//! Slide framework: a builder-sequenced presentation whose slides carry
//! bulleted text widgets ("tidgets") and optionally a live simulation scene.
//! Host input is delegated to the current slide.
//!
//! Default key map:
//!
//! | key                      | action                                   |
//! |--------------------------|------------------------------------------|
//! | Space, PageDown, Right   | next slide (clamped)                     |
//! | PageUp, Left             | previous slide (clamped)                 |
//! | Home / End               | first / last slide                       |
//! | `t`                      | toggle tidgets                           |
//! | `b`                      | reveal next bullet                       |
//! | `r`                      | reset scene                              |
//! | `1` `2` `3` `4`          | Euler / Midpoint / Feynman / RK4         |
//! | `p`                      | pause / run scene                        |
//!
//! A slide's key handler sees every key first and may swallow it.

mod input;
mod scene;
mod tidget;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub use input::{InputEvent, KeyCode, NavCommand};
pub use scene::{SimScene, DEFAULT_SUBSTEPS};
pub use tidget::{Anchor, Tidget, TIDGET_MARGIN};

use crate::integrators::IntegratorKind;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error("presentation has no slides")]
    Empty,
    #[error("duplicate slide id `{0}`")]
    DuplicateId(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NavError {
    #[error("slide index {index} out of range (deck has {len} slides)")]
    OutOfRange { index: usize, len: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KeyResponse {
    /// The key is swallowed; default bindings do not run.
    Consumed,
    Pass,
}

pub type KeyHandler = Arc<dyn Fn(KeyCode, &mut Slide) -> KeyResponse + Send + Sync>;

#[derive(Clone)]
pub struct Slide {
    pub id: String,
    pub title: String,
    pub tidgets: Vec<Tidget>,
    /// Declared initial scene; re-instantiated whenever the slide is entered.
    pub initial_scene: Option<SimScene>,
    /// Live scene while the slide is current.
    pub scene: Option<SimScene>,
    pub on_key: Option<KeyHandler>,
}

impl Slide {
    pub fn text(id: impl Into<String>, title: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            title: title.into(),
            tidgets: Vec::new(),
            initial_scene: None,
            scene: None,
            on_key: None,
        }
    }

    pub fn simulation(id: impl Into<String>, title: impl Into<String>, scene: SimScene) -> Self {
        Self {
            initial_scene: Some(scene),
            ..Self::text(id, title)
        }
    }

    pub fn with_tidget(mut self, tidget: Tidget) -> Self {
        self.tidgets.push(tidget);
        self
    }

    pub fn with_key_handler<F>(mut self, handler: F) -> Self
    where
        F: Fn(KeyCode, &mut Slide) -> KeyResponse + Send + Sync + 'static,
    {
        self.on_key = Some(Arc::new(handler));
        self
    }

    pub fn is_simulation(&self) -> bool {
        self.initial_scene.is_some()
    }

    fn enter(&mut self) {
        self.scene = self.initial_scene.clone();
        for t in &mut self.tidgets {
            t.reset_reveal();
        }
    }

    fn leave(&mut self) {
        self.scene = None;
    }

    pub fn reset_scene(&mut self) {
        self.scene = self.initial_scene.clone();
    }

    /// Reveals one more line of the first tidget that still has hidden lines.
    pub fn reveal_next(&mut self) -> bool {
        self.tidgets.iter_mut().any(Tidget::reveal_next)
    }
}

impl fmt::Debug for Slide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Slide")
            .field("id", &self.id)
            .field("title", &self.title)
            .field("tidgets", &self.tidgets)
            .field("initial_scene", &self.initial_scene)
            .field("scene", &self.scene)
            .field("on_key", &self.on_key.as_ref().map(|_| "<handler>"))
            .finish()
    }
}

/// Handlers compare by presence only.
impl PartialEq for Slide {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
            && self.title == other.title
            && self.tidgets == other.tidgets
            && self.initial_scene == other.initial_scene
            && self.scene == other.scene
            && self.on_key.is_some() == other.on_key.is_some()
    }
}

#[derive(Debug, Default)]
pub struct PresentationBuilder {
    slides: Vec<Slide>,
}

impl PresentationBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_slide(mut self, slide: Slide) -> Self {
        self.slides.push(slide);
        self
    }

    pub fn finish(self) -> Result<Presentation, BuildError> {
        if self.slides.is_empty() {
            return Err(BuildError::Empty);
        }
        let mut seen = std::collections::HashSet::new();
        for s in &self.slides {
            if !seen.insert(s.id.as_str()) {
                return Err(BuildError::DuplicateId(s.id.clone()));
            }
        }
        let mut p = Presentation {
            slides: self.slides,
            current: 0,
            tidgets_enabled: true,
            frame: 0,
        };
        for s in &mut p.slides {
            s.leave();
        }
        p.slides[0].enter();
        Ok(p)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Presentation {
    slides: Vec<Slide>,
    current: usize,
    tidgets_enabled: bool,
    /// Rendered ticks dispatched so far.
    frame: u64,
}

impl Presentation {
    pub fn builder() -> PresentationBuilder {
        PresentationBuilder::new()
    }

    pub fn slides(&self) -> &[Slide] {
        &self.slides
    }

    pub fn len(&self) -> usize {
        self.slides.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slides.is_empty()
    }

    pub fn current(&self) -> usize {
        self.current
    }

    pub fn current_slide(&self) -> &Slide {
        &self.slides[self.current]
    }

    pub fn current_slide_mut(&mut self) -> &mut Slide {
        &mut self.slides[self.current]
    }

    pub fn scene(&self) -> Option<&SimScene> {
        self.current_slide().scene.as_ref()
    }

    pub fn scene_mut(&mut self) -> Option<&mut SimScene> {
        self.current_slide_mut().scene.as_mut()
    }

    pub fn tidgets_enabled(&self) -> bool {
        self.tidgets_enabled
    }

    pub fn set_tidgets_enabled(&mut self, enabled: bool) {
        self.tidgets_enabled = enabled;
    }

    pub fn frame(&self) -> u64 {
        self.frame
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.slides.iter().position(|s| s.id == id)
    }

    pub fn navigate(&mut self, cmd: NavCommand) -> Result<(), NavError> {
        let last = self.slides.len() - 1;
        let target = match cmd {
            NavCommand::Next => (self.current + 1).min(last),
            NavCommand::Prev => self.current.saturating_sub(1),
            NavCommand::Home => 0,
            NavCommand::End => last,
            NavCommand::Goto(index) if index <= last => index,
            NavCommand::Goto(index) => {
                return Err(NavError::OutOfRange {
                    index,
                    len: self.slides.len(),
                })
            }
        };
        if target != self.current {
            self.slides[self.current].leave();
            self.current = target;
            self.slides[self.current].enter();
        }
        Ok(())
    }

    /// Routes one host event to the presentation and the current slide.
    /// Never fails; events without a meaningful target are ignored.
    pub fn dispatch(&mut self, event: InputEvent) {
        match event {
            InputEvent::Key(code) => self.key(code),
            InputEvent::PointerDown(p) => {
                if let Some(scene) = self.scene_mut() {
                    scene.world.begin_drag(p);
                }
            }
            InputEvent::PointerMove(p) => {
                if let Some(scene) = self.scene_mut() {
                    scene.world.update_drag(p);
                }
            }
            InputEvent::PointerUp => {
                if let Some(scene) = self.scene_mut() {
                    scene.world.end_drag();
                }
            }
            InputEvent::Tick(dt) => {
                if dt > 0.0 && dt.is_finite() {
                    self.frame += 1;
                    if let Some(scene) = self.scene_mut() {
                        scene.tick();
                    }
                }
            }
        }
    }

    fn key(&mut self, code: KeyCode) {
        let slide = self.current_slide_mut();
        if let Some(handler) = slide.on_key.clone() {
            if handler(code, slide) == KeyResponse::Consumed {
                return;
            }
        }
        let nav = match code {
            KeyCode::Space | KeyCode::PageDown | KeyCode::Right => Some(NavCommand::Next),
            KeyCode::PageUp | KeyCode::Left => Some(NavCommand::Prev),
            KeyCode::Home => Some(NavCommand::Home),
            KeyCode::End => Some(NavCommand::End),
            _ => None,
        };
        if let Some(cmd) = nav {
            self.navigate(cmd).expect("relative navigation cannot leave the deck");
            return;
        }
        let KeyCode::Char(c) = code else {
            return;
        };
        match c {
            't' => self.tidgets_enabled = !self.tidgets_enabled,
            'b' => {
                self.current_slide_mut().reveal_next();
            }
            'r' => self.current_slide_mut().reset_scene(),
            'p' => {
                if let Some(scene) = self.scene_mut() {
                    scene.running = !scene.running;
                }
            }
            '1'..='4' => {
                let kind = IntegratorKind::ALL[c as usize - '1' as usize];
                if let Some(scene) = self.scene_mut() {
                    scene.set_integrator(kind);
                }
            }
            _ => {}
        }
    }
}
