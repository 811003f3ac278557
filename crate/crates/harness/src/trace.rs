//! Trace files: one header record followed by one frame record per tick,
//! framed exactly like the live session stream.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use softbody_core::deck::parse_deck;
use softbody_core::presentation::{NavCommand, Presentation};
use softbody_core::protocol::wire::{encode_message, read_message, TAG_FRAME, TAG_HEADER};
use softbody_core::protocol::{encode_frame, Session};

use crate::HarnessError;

pub const TRACE_FORMAT: u32 = 1;

/// Slide selector: a numeric index or a slide id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SlideRef {
    Index(usize),
    Id(String),
}

impl FromStr for SlideRef {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(s.parse().map(SlideRef::Index).unwrap_or_else(|_| SlideRef::Id(s.to_string())))
    }
}

impl fmt::Display for SlideRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SlideRef::Index(i) => write!(f, "{i}"),
            SlideRef::Id(id) => f.write_str(id),
        }
    }
}

impl SlideRef {
    pub fn resolve(&self, p: &Presentation) -> Result<usize, HarnessError> {
        match self {
            SlideRef::Index(i) if *i < p.len() => Ok(*i),
            SlideRef::Index(i) => Err(HarnessError::Config(format!(
                "slide index {i} out of range (deck has {} slides)",
                p.len()
            ))),
            SlideRef::Id(id) => p
                .index_of(id)
                .ok_or_else(|| HarnessError::Config(format!("no slide with id `{id}`"))),
        }
    }
}

/// Producing configuration, stored as the first trace record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceHeader {
    pub format: u32,
    /// Hex SHA-256 of the deck source text.
    pub deck_sha256: String,
    pub slide_index: usize,
    pub slide_id: String,
    pub ticks: u64,
    /// Empty for text slides.
    pub integrator: String,
    pub timestep: f64,
    pub substeps: usize,
}

pub fn deck_digest(deck_text: &str) -> String {
    hex::encode(Sha256::digest(deck_text.as_bytes()))
}

fn load(deck_text: &str) -> Result<Presentation, HarnessError> {
    parse_deck(deck_text).map_err(|e| HarnessError::Config(format!("deck: {e}")))
}

fn header_for(deck_text: &str, p: &Presentation, index: usize, ticks: u64) -> TraceHeader {
    let slide = &p.slides()[index];
    let scene = slide.initial_scene.as_ref();
    TraceHeader {
        format: TRACE_FORMAT,
        deck_sha256: deck_digest(deck_text),
        slide_index: index,
        slide_id: slide.id.clone(),
        ticks,
        integrator: scene.map(|s| s.integrator.name().to_string()).unwrap_or_default(),
        timestep: scene.map_or(0.0, |s| s.world.params.timestep),
        substeps: scene.map_or(0, |s| s.substeps_per_tick),
    }
}

/// Simulates `ticks` frames of one slide and returns the encoded trace
/// (header plus `ticks + 1` frames, tick 0 included).
pub fn run_trace(deck_text: &str, slide: &SlideRef, ticks: u64) -> Result<Vec<u8>, HarnessError> {
    let mut p = load(deck_text)?;
    let index = slide.resolve(&p)?;
    let header = header_for(deck_text, &p, index, ticks);
    // navigation does not advance the frame counter, so records start at 0
    p.navigate(NavCommand::Goto(index)).expect("index was resolved");
    let mut session = Session::new(p);

    let mut out = encode_message(TAG_HEADER, &serde_json::to_vec(&header).expect("header serializes"));
    out.extend(encode_message(TAG_FRAME, &encode_frame(&session.snapshot())));
    for _ in 0..ticks {
        let frame = session.tick();
        if let Some(fault) = session.presentation().scene().and_then(|s| s.fault) {
            return Err(HarnessError::NumericFault {
                slide: header.slide_id,
                step: fault.tick,
                body: fault.body,
                particle: fault.particle,
            });
        }
        out.extend(encode_message(TAG_FRAME, &encode_frame(&frame)));
    }
    Ok(out)
}

/// Header and raw frame payloads of a trace.
pub fn read_trace(bytes: &[u8]) -> Result<(TraceHeader, Vec<Vec<u8>>), HarnessError> {
    let bad = |why: String| HarnessError::Config(format!("malformed trace: {why}"));
    let mut reader = bytes;
    let header = match read_message(&mut reader).map_err(|e| bad(e.to_string()))? {
        Some((TAG_HEADER, payload)) => {
            serde_json::from_slice::<TraceHeader>(&payload).map_err(|e| bad(format!("header: {e}")))?
        }
        _ => return Err(bad("missing header record".into())),
    };
    let mut frames = Vec::new();
    while let Some((tag, payload)) = read_message(&mut reader).map_err(|e| bad(e.to_string()))? {
        if tag != TAG_FRAME {
            return Err(bad(format!("unexpected record tag 0x{tag:02x}")));
        }
        frames.push(payload);
    }
    Ok((header, frames))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verification {
    pub header: TraceHeader,
    pub frames: u64,
}

/// Re-simulates the configuration named in the trace header against
/// `deck_text` and compares byte for byte. A difference inside the header
/// record is reported as tick 0.
pub fn verify_trace(trace: &[u8], deck_text: &str) -> Result<Verification, HarnessError> {
    let mismatch = |tick: u64, reason: String| HarnessError::Mismatch { tick, reason };
    let header = {
        let mut reader = trace;
        match read_message(&mut reader) {
            Ok(Some((TAG_HEADER, payload))) => serde_json::from_slice::<TraceHeader>(&payload)
                .map_err(|e| mismatch(0, format!("unreadable header: {e}")))?,
            _ => return Err(mismatch(0, "missing or unreadable header record".into())),
        }
    };
    let p = load(deck_text)?;
    if header.slide_index >= p.len() || p.slides()[header.slide_index].id != header.slide_id {
        return Err(mismatch(
            0,
            format!("deck has no slide `{}` at index {}", header.slide_id, header.slide_index),
        ));
    }
    let expected = run_trace(deck_text, &SlideRef::Index(header.slide_index), header.ticks)?;
    if expected == trace {
        return Ok(Verification {
            frames: header.ticks + 1,
            header,
        });
    }

    let first_diff = expected
        .iter()
        .zip(trace)
        .position(|(a, b)| a != b)
        .unwrap_or(expected.len().min(trace.len()));
    // walk the expected record boundaries to find the record holding the
    // first differing byte; record 0 is the header, record k is tick k-1
    let mut offset = 0usize;
    let mut record = 0u64;
    while offset < expected.len() {
        let len = u32::from_be_bytes(expected[offset..offset + 4].try_into().unwrap()) as usize;
        let end = offset + 4 + len;
        if first_diff < end {
            break;
        }
        offset = end;
        record += 1;
    }
    let tick = record.saturating_sub(1);
    let reason = if record == 0 {
        let theirs = &header;
        let ours = header_for(deck_text, &p, header.slide_index, header.ticks);
        if ours.deck_sha256 != theirs.deck_sha256 {
            "header differs: trace was produced from a different deck".to_string()
        } else {
            "header differs from the producing configuration".to_string()
        }
    } else if offset >= expected.len() {
        format!("trace has records beyond the expected {} frames", header.ticks + 1)
    } else if first_diff >= trace.len() {
        "trace ends early".to_string()
    } else {
        format!("frame bytes differ at offset {first_diff}")
    };
    Err(mismatch(tick, reason))
}
