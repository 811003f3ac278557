//! Length-prefixed message framing.
//!
//! Each message is a big-endian `u32` length followed by that many bytes: a
//! one-byte type tag and the canonical payload. Trace files use the same
//! records back to back.

use std::io::{self, ErrorKind, Read, Write};

pub const TAG_COMMAND: u8 = b'C';
pub const TAG_TICK: u8 = b'T';
pub const TAG_FRAME: u8 = b'F';
pub const TAG_ERROR: u8 = b'E';
pub const TAG_HEADER: u8 = b'H';

/// Upper bound on a single message (tag plus payload).
pub const MAX_MESSAGE: usize = 64 << 20;

pub fn write_message<W: Write>(w: &mut W, tag: u8, payload: &[u8]) -> io::Result<()> {
    let len = payload.len() + 1;
    if len > MAX_MESSAGE {
        return Err(io::Error::new(ErrorKind::InvalidInput, "message too large"));
    }
    w.write_all(&(len as u32).to_be_bytes())?;
    w.write_all(&[tag])?;
    w.write_all(payload)
}

pub fn encode_message(tag: u8, payload: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(payload.len() + 5);
    write_message(&mut out, tag, payload).expect("writing to a Vec cannot fail");
    out
}

/// Reads one message. `Ok(None)` on a clean end of stream before any byte of
/// the next message; a stream cut inside a message is `UnexpectedEof`.
pub fn read_message<R: Read>(r: &mut R) -> io::Result<Option<(u8, Vec<u8>)>> {
    let mut prefix = [0u8; 4];
    let mut filled = 0;
    while filled < prefix.len() {
        match r.read(&mut prefix[filled..]) {
            Ok(0) if filled == 0 => return Ok(None),
            Ok(0) => return Err(ErrorKind::UnexpectedEof.into()),
            Ok(n) => filled += n,
            Err(e) if e.kind() == ErrorKind::Interrupted => {}
            Err(e) => return Err(e),
        }
    }
    let len = u32::from_be_bytes(prefix) as usize;
    if len == 0 || len > MAX_MESSAGE {
        return Err(io::Error::new(ErrorKind::InvalidData, format!("bad message length {len}")));
    }
    let mut body = vec![0u8; len];
    r.read_exact(&mut body)?;
    let tag = body.remove(0);
    Ok(Some((tag, body)))
}

/// Splits a buffer of back-to-back messages.
pub fn split_messages(mut bytes: &[u8]) -> io::Result<Vec<(u8, Vec<u8>)>> {
    let mut out = Vec::new();
    while let Some(m) = read_message(&mut bytes)? {
        out.push(m);
    }
    Ok(out)
}
