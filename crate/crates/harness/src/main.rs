use std::fs;
use std::io::{self, BufReader, BufWriter};
use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use softbody_core::deck::{parse_deck, DEFAULT_DECK_TEXT};
use softbody_core::protocol::{Session, SessionEnd};
use softbody_harness::{compare_integrators, parse_grid, run_trace, verify_trace, write_csv, HarnessError, SlideRef, System};

#[derive(Parser)]
#[command(name = "softbody", version, about = "Headless softbody deck runner")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Simulate one slide and write a golden trace.
    Run {
        /// Deck file; the built-in deck when omitted.
        #[arg(long)]
        deck: Option<PathBuf>,
        /// Slide id or zero-based index.
        #[arg(long)]
        slide: SlideRef,
        #[arg(long)]
        ticks: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-simulate a trace and compare it byte for byte.
    Verify {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        deck: Option<PathBuf>,
    },
    /// Error and cost table for every integrator on an analytic system.
    CompareIntegrators {
        /// oscillator or freefall
        #[arg(long)]
        system: String,
        #[arg(long, default_value = "h=1/60,1/120,1/240")]
        grid: String,
        /// CSV destination; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Serve the framed session protocol over TCP, one client at a time.
    Serve {
        #[arg(long, default_value = "127.0.0.1:7878")]
        listen: String,
        #[arg(long)]
        deck: Option<PathBuf>,
    },
}

fn deck_text(path: Option<&Path>) -> Result<String, HarnessError> {
    match path {
        None => Ok(DEFAULT_DECK_TEXT.to_string()),
        Some(p) => fs::read_to_string(p).map_err(|e| HarnessError::Config(format!("cannot read deck {}: {e}", p.display()))),
    }
}

fn run(cmd: Cmd) -> Result<(), HarnessError> {
    match cmd {
        Cmd::Run { deck, slide, ticks, out } => {
            let text = deck_text(deck.as_deref())?;
            let bytes = run_trace(&text, &slide, ticks)?;
            fs::write(&out, bytes).map_err(HarnessError::io(format!("writing {}", out.display())))?;
            eprintln!("wrote {} frames to {}", ticks + 1, out.display());
        }
        Cmd::Verify { trace, deck } => {
            let text = deck_text(deck.as_deref())?;
            let bytes = fs::read(&trace)
                .map_err(|e| HarnessError::Config(format!("cannot read trace {}: {e}", trace.display())))?;
            let ok = verify_trace(&bytes, &text)?;
            eprintln!("ok: {} frames of slide `{}` match", ok.frames, ok.header.slide_id);
        }
        Cmd::CompareIntegrators { system, grid, out } => {
            let system: System = system.parse()?;
            let rows = compare_integrators(system, &parse_grid(&grid)?);
            match out {
                Some(path) => {
                    let file = fs::File::create(&path).map_err(HarnessError::io(format!("creating {}", path.display())))?;
                    write_csv(&rows, BufWriter::new(file))?;
                }
                None => write_csv(&rows, io::stdout().lock())?,
            }
        }
        Cmd::Serve { listen, deck } => {
            let text = deck_text(deck.as_deref())?;
            let presentation = parse_deck(&text).map_err(|e| HarnessError::Config(format!("deck: {e}")))?;
            let listener = TcpListener::bind(&listen).map_err(HarnessError::io(format!("binding {listen}")))?;
            eprintln!("listening on {listen}");
            for stream in listener.incoming() {
                let stream = match stream {
                    Ok(s) => s,
                    Err(e) => {
                        eprintln!("accept failed: {e}");
                        continue;
                    }
                };
                let peer = stream.peer_addr().map(|a| a.to_string()).unwrap_or_default();
                let mut reader = BufReader::new(stream.try_clone().map_err(HarnessError::io("cloning socket"))?);
                let mut writer = BufWriter::new(stream);
                let mut session = Session::new(presentation.clone());
                match session.serve(&mut reader, &mut writer) {
                    SessionEnd::Closed => eprintln!("{peer}: closed"),
                    SessionEnd::TransportLost(kind) => eprintln!("{peer}: connection lost ({kind})"),
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
