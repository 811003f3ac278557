//! Line-oriented deck files.
//!
//! ```text
//! # comment
//! slide <id> <text|sim>
//! title: <text>
//! tidget: <top-left|top-right|bottom-left|bottom-right>
//! bullet: <text>
//! integrator: <euler|midpoint|feynman|rk4>
//! scene: box=x0,y0,x1,y1 gravity=x,y timestep=h restitution=e drag_stiffness=k drag_damping=c substeps=n running=true
//! body: <1d|2d|3d> n=16 layers=2 radius=0.5 ... center=x,y pin_ends=true material=elastic
//! ```
//!
//! `bullet:` lines attach to the most recent `tidget:`, or to an implicit
//! top-left tidget. `integrator:`, `scene:` and `body:` are only valid on
//! `sim` slides; a sim slide needs an integrator and at least one body.
//! Omitted `scene:` and `body:` keys take their defaults. Unknown keys and
//! directives are errors.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::builder::{self, LodConfig};
use crate::integrators::IntegratorKind;
use crate::math::Vec2;
use crate::physics::{Dimensionality, SimParams, ViewBox, World};
use crate::presentation::{Anchor, BuildError, Presentation, SimScene, Slide, Tidget, DEFAULT_SUBSTEPS};

/// Source of the deck shipped with the crate.
pub const DEFAULT_DECK_TEXT: &str = include_str!("../decks/default.deck");

#[derive(Debug, Error)]
pub enum DeckError {
    /// `line` is 1-based; 0 when the deck did not come from text.
    #[error("line {line}: `{field}`: {message}")]
    Parse {
        line: usize,
        field: String,
        message: String,
    },
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl DeckError {
    fn parse(line: usize, field: impl Into<String>, message: impl Into<String>) -> Self {
        DeckError::Parse {
            line,
            field: field.into(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlideKind {
    Text,
    Sim,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TidgetDecl {
    pub anchor: Anchor,
    pub lines: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneDecl {
    pub integrator: IntegratorKind,
    pub params: SimParams,
    pub view_box: ViewBox,
    pub substeps: usize,
    pub running: bool,
    pub bodies: Vec<LodConfig>,
}

impl SceneDecl {
    pub fn new(integrator: IntegratorKind) -> Self {
        Self {
            integrator,
            params: SimParams::default(),
            view_box: ViewBox::new(Vec2::new(-2.0, -1.5), Vec2::new(2.0, 1.5)),
            substeps: DEFAULT_SUBSTEPS,
            running: true,
            bodies: Vec::new(),
        }
    }

    pub fn build(&self) -> Result<SimScene, (String, String)> {
        if self.bodies.is_empty() {
            return Err(("body".into(), "sim slide declares no bodies".into()));
        }
        if self.substeps == 0 {
            return Err(("substeps".into(), "must be at least 1".into()));
        }
        let bodies = self
            .bodies
            .iter()
            .map(|cfg| builder::build(cfg).map_err(|e| (e.field.to_string(), e.reason)))
            .collect::<Result<Vec<_>, _>>()?;
        let world = World::new(bodies, self.params, self.view_box).map_err(|e| ("scene".to_string(), e.to_string()))?;
        let mut scene = SimScene::new(world, self.integrator).with_substeps(self.substeps);
        scene.running = self.running;
        Ok(scene)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlideDecl {
    pub id: String,
    pub title: String,
    pub tidgets: Vec<TidgetDecl>,
    /// Present exactly for sim slides.
    pub scene: Option<SceneDecl>,
}

impl SlideDecl {
    pub fn kind(&self) -> SlideKind {
        if self.scene.is_some() {
            SlideKind::Sim
        } else {
            SlideKind::Text
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeckFile {
    pub slides: Vec<SlideDecl>,
}

struct Pending {
    decl: SlideDecl,
    line: usize,
    integrator: Option<IntegratorKind>,
}

impl DeckFile {
    pub fn parse(text: &str) -> Result<Self, DeckError> {
        let mut slides = Vec::new();
        let mut ids = HashSet::new();
        let mut current: Option<Pending> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            if let Some(rest) = trimmed.strip_prefix("slide ") {
                if let Some(done) = current.take() {
                    slides.push(finish_slide(done)?);
                }
                let words: Vec<&str> = rest.split_whitespace().collect();
                let [id, kind] = words[..] else {
                    return Err(DeckError::parse(line, "slide", "expected `slide <id> <text|sim>`"));
                };
                if !ids.insert(id.to_string()) {
                    return Err(DeckError::parse(line, "slide", format!("duplicate slide id `{id}`")));
                }
                let scene = match kind {
                    "text" => None,
                    // integrator is filled in when the slide is finished
                    "sim" => Some(SceneDecl::new(IntegratorKind::ExplicitEuler)),
                    other => return Err(DeckError::parse(line, "slide", format!("unknown slide kind `{other}`"))),
                };
                current = Some(Pending {
                    decl: SlideDecl {
                        id: id.to_string(),
                        title: String::new(),
                        tidgets: Vec::new(),
                        scene,
                    },
                    line,
                    integrator: None,
                });
                continue;
            }
            let Some((directive, value)) = trimmed.split_once(':') else {
                return Err(DeckError::parse(line, trimmed, "expected `<directive>: <value>`"));
            };
            let (directive, value) = (directive.trim(), value.trim());
            let Some(slide) = current.as_mut() else {
                return Err(DeckError::parse(line, directive, "directive before the first `slide` line"));
            };
            let sim_only = |slide: &mut Pending| {
                slide
                    .decl
                    .scene
                    .as_mut()
                    .map(|_| ())
                    .ok_or_else(|| DeckError::parse(line, directive, "only valid on sim slides"))
            };
            match directive {
                "title" => slide.decl.title = value.to_string(),
                "tidget" => {
                    let anchor = Anchor::parse(value)
                        .ok_or_else(|| DeckError::parse(line, "tidget", format!("unknown anchor `{value}`")))?;
                    slide.decl.tidgets.push(TidgetDecl {
                        anchor,
                        lines: Vec::new(),
                    });
                }
                "bullet" => {
                    if slide.decl.tidgets.is_empty() {
                        slide.decl.tidgets.push(TidgetDecl {
                            anchor: Anchor::TopLeft,
                            lines: Vec::new(),
                        });
                    }
                    slide.decl.tidgets.last_mut().unwrap().lines.push(value.to_string());
                }
                "integrator" => {
                    sim_only(slide)?;
                    let kind = value
                        .parse()
                        .map_err(|e| DeckError::parse(line, "integrator", format!("{e}")))?;
                    slide.integrator = Some(kind);
                }
                "scene" => {
                    sim_only(slide)?;
                    parse_scene(slide.decl.scene.as_mut().unwrap(), value, line)?;
                }
                "body" => {
                    sim_only(slide)?;
                    let cfg = parse_body(value, line)?;
                    slide.decl.scene.as_mut().unwrap().bodies.push(cfg);
                }
                other => return Err(DeckError::parse(line, other, "unknown directive")),
            }
        }
        if let Some(done) = current.take() {
            slides.push(finish_slide(done)?);
        }
        if slides.is_empty() {
            return Err(DeckError::Build(BuildError::Empty));
        }
        Ok(Self { slides })
    }

    /// Canonical text form; `parse(to_text())` gives back an equal deck.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, s) in self.slides.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            let kind = if s.scene.is_some() { "sim" } else { "text" };
            let _ = writeln!(out, "slide {} {kind}", s.id);
            let _ = writeln!(out, "title: {}", s.title);
            if let Some(scene) = &s.scene {
                let p = &scene.params;
                let b = &scene.view_box;
                let _ = writeln!(out, "integrator: {}", scene.integrator.name());
                let _ = writeln!(
                    out,
                    "scene: box={},{},{},{} gravity={},{} timestep={} restitution={} drag_stiffness={} drag_damping={} substeps={} running={}",
                    b.min.x, b.min.y, b.max.x, b.max.y, p.gravity.x, p.gravity.y, p.timestep, p.restitution,
                    p.drag_stiffness, p.drag_damping, scene.substeps, scene.running
                );
                for c in &scene.bodies {
                    let _ = writeln!(
                        out,
                        "body: {} n={} layers={} radius={} layer_gap={} spacing={} mass={} k_structural={} k_radial={} k_shear={} damping={} center={},{} pin_ends={} material={}",
                        c.dimensionality, c.resolution, c.layers, c.radius, c.layer_gap, c.spacing, c.particle_mass,
                        c.k_structural, c.k_radial, c.k_shear, c.damping, c.center.x, c.center.y, c.pin_ends, c.material
                    );
                }
            }
            for t in &s.tidgets {
                let _ = writeln!(out, "tidget: {}", t.anchor.name());
                for l in &t.lines {
                    let _ = writeln!(out, "bullet: {l}");
                }
            }
        }
        out
    }

    pub fn build(&self) -> Result<Presentation, DeckError> {
        let mut builder = Presentation::builder();
        for s in &self.slides {
            let mut slide = match &s.scene {
                None => Slide::text(&s.id, &s.title),
                Some(decl) => {
                    let scene = decl.build().map_err(|(field, message)| DeckError::parse(0, field, message))?;
                    Slide::simulation(&s.id, &s.title, scene)
                }
            };
            for t in &s.tidgets {
                slide = slide.with_tidget(Tidget::new(t.anchor, t.lines.iter().cloned()));
            }
            builder = builder.add_slide(slide);
        }
        Ok(builder.finish()?)
    }
}

fn finish_slide(mut p: Pending) -> Result<SlideDecl, DeckError> {
    if p.decl.title.is_empty() {
        return Err(DeckError::parse(p.line, "title", format!("slide `{}` has no title", p.decl.id)));
    }
    if let Some(scene) = p.decl.scene.as_mut() {
        scene.integrator = p
            .integrator
            .ok_or_else(|| DeckError::parse(p.line, "integrator", format!("sim slide `{}` has no integrator", p.decl.id)))?;
        scene.build().map_err(|(field, message)| DeckError::parse(p.line, field, message))?;
    }
    Ok(p.decl)
}

fn pairs(value: &str, line: usize) -> Result<Vec<(&str, &str)>, DeckError> {
    value
        .split_whitespace()
        .map(|kv| {
            kv.split_once('=')
                .ok_or_else(|| DeckError::parse(line, kv, "expected key=value"))
        })
        .collect()
}

fn real(key: &str, v: &str, line: usize) -> Result<f64, DeckError> {
    match v.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(DeckError::parse(line, key, format!("expected a finite number, got `{v}`"))),
    }
}

fn reals<const N: usize>(key: &str, v: &str, line: usize) -> Result<[f64; N], DeckError> {
    let parts: Vec<&str> = v.split(',').collect();
    if parts.len() != N {
        return Err(DeckError::parse(line, key, format!("expected {N} comma-separated numbers, got `{v}`")));
    }
    let mut out = [0.0; N];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = real(key, p, line)?;
    }
    Ok(out)
}

fn integer<T: std::str::FromStr>(key: &str, v: &str, line: usize) -> Result<T, DeckError> {
    v.parse()
        .map_err(|_| DeckError::parse(line, key, format!("expected a non-negative integer, got `{v}`")))
}

fn flag(key: &str, v: &str, line: usize) -> Result<bool, DeckError> {
    match v {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(DeckError::parse(line, key, format!("expected true or false, got `{v}`"))),
    }
}

fn parse_scene(scene: &mut SceneDecl, value: &str, line: usize) -> Result<(), DeckError> {
    for (k, v) in pairs(value, line)? {
        match k {
            "box" => {
                let [x0, y0, x1, y1] = reals(k, v, line)?;
                scene.view_box = ViewBox::new(Vec2::new(x0, y0), Vec2::new(x1, y1));
            }
            "gravity" => {
                let [x, y] = reals(k, v, line)?;
                scene.params.gravity = Vec2::new(x, y);
            }
            "timestep" => scene.params.timestep = real(k, v, line)?,
            "restitution" => scene.params.restitution = real(k, v, line)?,
            "drag_stiffness" => scene.params.drag_stiffness = real(k, v, line)?,
            "drag_damping" => scene.params.drag_damping = real(k, v, line)?,
            "substeps" => scene.substeps = integer(k, v, line)?,
            "running" => scene.running = flag(k, v, line)?,
            other => return Err(DeckError::parse(line, other, "unknown scene key")),
        }
    }
    Ok(())
}

fn parse_body(value: &str, line: usize) -> Result<LodConfig, DeckError> {
    let (dim, rest) = value.split_once(char::is_whitespace).unwrap_or((value, ""));
    let dimensionality: Dimensionality = dim
        .parse()
        .map_err(|_| DeckError::parse(line, "body", format!("expected 1d, 2d or 3d, got `{dim}`")))?;
    let mut cfg = LodConfig::for_dimensionality(dimensionality);
    for (k, v) in pairs(rest, line)? {
        match k {
            "n" => cfg.resolution = integer(k, v, line)?,
            "layers" => cfg.layers = integer(k, v, line)?,
            "radius" => cfg.radius = real(k, v, line)?,
            "layer_gap" => cfg.layer_gap = real(k, v, line)?,
            "spacing" => cfg.spacing = real(k, v, line)?,
            "mass" => cfg.particle_mass = real(k, v, line)?,
            "k_structural" => cfg.k_structural = real(k, v, line)?,
            "k_radial" => cfg.k_radial = real(k, v, line)?,
            "k_shear" => cfg.k_shear = real(k, v, line)?,
            "damping" => cfg.damping = real(k, v, line)?,
            "center" => {
                let [x, y] = reals(k, v, line)?;
                cfg.center = Vec2::new(x, y);
            }
            "pin_ends" => cfg.pin_ends = flag(k, v, line)?,
            "material" => cfg.material = v.to_string(),
            other => return Err(DeckError::parse(line, other, "unknown body key")),
        }
    }
    cfg.validate().map_err(|e| DeckError::parse(line, e.field, e.reason))?;
    Ok(cfg)
}

pub fn parse_deck(text: &str) -> Result<Presentation, DeckError> {
    DeckFile::parse(text)?.build()
}

pub fn load_deck(path: impl AsRef<Path>) -> Result<Presentation, DeckError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| DeckError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_deck(&text)
}

/// The shipped teaching deck, embedded in the binary.
pub fn default_deck() -> Presentation {
    parse_deck(DEFAULT_DECK_TEXT).expect("embedded deck is valid")
}
