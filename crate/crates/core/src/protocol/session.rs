use std::io::{self, Read, Write};
use std::sync::mpsc::{self, Receiver, Sender};
use std::sync::Arc;
use std::thread::{self, JoinHandle};

use serde::{Deserialize, Serialize};

use super::wire::{self, TAG_COMMAND, TAG_ERROR, TAG_FRAME, TAG_TICK};
use super::{apply_command, decode_command, encode_frame, Command, FrameSnapshot};
use crate::presentation::{InputEvent, Presentation};

/// Host frame interval reported with each tick.
pub const FRAME_DT: f64 = 1.0 / 60.0;

/// Payload of an error reply.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErrorReply {
    pub message: String,
    /// Byte offset into the rejected payload, for decode failures.
    pub offset: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SessionEnd {
    /// The peer closed the stream between messages.
    Closed,
    /// Read or write failed, or the stream was cut mid-message.
    TransportLost(io::ErrorKind),
}

/// Single-writer owner of a presentation. Commands are applied in arrival
/// order, always between ticks.
#[derive(Debug, Clone)]
pub struct Session {
    presentation: Presentation,
}

impl Session {
    pub fn new(presentation: Presentation) -> Self {
        Self { presentation }
    }

    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn into_presentation(self) -> Presentation {
        self.presentation
    }

    pub fn apply(&mut self, command: &Command) -> Result<(), ErrorReply> {
        apply_command(&mut self.presentation, command).map_err(|e| ErrorReply {
            message: e.to_string(),
            offset: None,
        })
    }

    pub fn apply_bytes(&mut self, payload: &[u8]) -> Result<(), ErrorReply> {
        let command = decode_command(payload).map_err(|e| ErrorReply {
            message: e.message,
            offset: Some(e.offset),
        })?;
        self.apply(&command)
    }

    /// Advances one rendered frame and returns its snapshot.
    pub fn tick(&mut self) -> FrameSnapshot {
        self.presentation.dispatch(InputEvent::Tick(FRAME_DT));
        self.snapshot()
    }

    pub fn snapshot(&self) -> FrameSnapshot {
        FrameSnapshot::capture(&self.presentation)
    }

    /// Runs the framed protocol: the current frame is sent on connect, then
    /// one frame per tick message. Bad commands get an error reply and are
    /// otherwise ignored.
    pub fn serve<R: Read, W: Write>(&mut self, reader: &mut R, writer: &mut W) -> SessionEnd {
        let lost = |e: io::Error| SessionEnd::TransportLost(e.kind());
        let send_frame = |w: &mut W, s: &FrameSnapshot| wire::write_message(w, TAG_FRAME, &encode_frame(s)).and_then(|_| w.flush());
        if let Err(e) = send_frame(writer, &self.snapshot()) {
            return lost(e);
        }
        loop {
            let (tag, payload) = match wire::read_message(reader) {
                Ok(Some(m)) => m,
                Ok(None) => return SessionEnd::Closed,
                Err(e) => return lost(e),
            };
            let reply = match tag {
                TAG_COMMAND => self.apply_bytes(&payload).err(),
                TAG_TICK => {
                    let frame = self.tick();
                    if let Err(e) = send_frame(writer, &frame) {
                        return lost(e);
                    }
                    None
                }
                other => Some(ErrorReply {
                    message: format!("unexpected message tag 0x{other:02x}"),
                    offset: None,
                }),
            };
            if let Some(reply) = reply {
                let payload = serde_json::to_vec(&reply).expect("error reply serializes");
                if let Err(e) = wire::write_message(writer, TAG_ERROR, &payload).and_then(|_| writer.flush()) {
                    return lost(e);
                }
            }
        }
    }
}

/// Replays a recorded client log (framed commands and ticks) and returns the
/// server's byte stream.
pub fn replay(presentation: Presentation, log: &[u8]) -> (Vec<u8>, SessionEnd) {
    let mut session = Session::new(presentation);
    let mut out = Vec::new();
    let mut reader = log;
    let end = session.serve(&mut reader, &mut out);
    (out, end)
}

#[derive(Debug, Clone, PartialEq)]
pub enum ClientMessage {
    /// Encoded command bytes, decoded by the session.
    Command(Vec<u8>),
    Tick,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ServerMessage {
    Frame(Arc<FrameSnapshot>),
    Error(ErrorReply),
}

/// Client side of an in-process session running on its own thread.
#[derive(Debug)]
pub struct SessionHandle {
    tx: Sender<ClientMessage>,
    rx: Receiver<ServerMessage>,
    thread: JoinHandle<Presentation>,
}

impl SessionHandle {
    /// `false` once the session has stopped.
    pub fn send(&self, message: ClientMessage) -> bool {
        self.tx.send(message).is_ok()
    }

    pub fn command(&self, command: &Command) -> bool {
        self.send(ClientMessage::Command(super::encode_command(command)))
    }

    /// Blocks for the next server message; `None` once the session is gone.
    pub fn recv(&self) -> Option<ServerMessage> {
        self.rx.recv().ok()
    }

    /// Closes the client side and returns the presentation as left by the
    /// session.
    pub fn close(self) -> Presentation {
        drop(self.tx);
        drop(self.rx);
        self.thread.join().expect("session thread panicked")
    }
}

/// Moves the presentation onto a session thread. The initial frame is
/// queued before any client message is read.
pub fn spawn_session(presentation: Presentation) -> SessionHandle {
    let (client_tx, client_rx) = mpsc::channel::<ClientMessage>();
    let (server_tx, server_rx) = mpsc::channel::<ServerMessage>();
    let thread = thread::spawn(move || {
        let mut session = Session::new(presentation);
        if server_tx.send(ServerMessage::Frame(Arc::new(session.snapshot()))).is_err() {
            return session.into_presentation();
        }
        for message in client_rx {
            let reply = match message {
                ClientMessage::Command(bytes) => match session.apply_bytes(&bytes) {
                    Ok(()) => continue,
                    Err(e) => ServerMessage::Error(e),
                },
                ClientMessage::Tick => ServerMessage::Frame(Arc::new(session.tick())),
            };
            if server_tx.send(reply).is_err() {
                break;
            }
        }
        session.into_presentation()
    });
    SessionHandle {
        tx: client_tx,
        rx: server_rx,
        thread,
    }
}
