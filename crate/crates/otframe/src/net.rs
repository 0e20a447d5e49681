//! Transports and session drivers: an in-memory duplex for self-play and a
//! TCP transport for two-process runs. Frames travel one at a time, in
//! protocol order; a receive timeout is reported as the counterpart's
//! abort, while connection failures surface as transport errors.

use std::collections::BTreeSet;
use std::io::{ErrorKind, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::mpsc;
use std::time::Duration;

use thiserror::Error;

use crate::math::OtRng;
use crate::protocol::{Abort, ProtocolConfig, Receiver, Sender, SetupError, TranscriptFrame};
use crate::sph::Family;
use crate::wire::{self, FlowTag, FRAME_HEADER_LEN, MAX_BODY_LEN};

pub const DEFAULT_FLOW_TIMEOUT: Duration = Duration::from_secs(30);

#[derive(Debug, Error)]
pub enum NetError {
    #[error(transparent)]
    Setup(#[from] SetupError),
    #[error("transport error: {0}")]
    Transport(String),
}

/// How a driven session ended.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SessionOutcome {
    /// Receiver completed and holds its h messages.
    Received(Vec<Vec<u8>>),
    /// Sender completed.
    Sent,
    /// This party detected a failure and aborted.
    LocalAbort(Abort),
    /// The counterpart aborted (or timed out).
    PeerAbort,
}

impl SessionOutcome {
    pub fn is_abort(&self) -> bool {
        matches!(
            self,
            SessionOutcome::LocalAbort(_) | SessionOutcome::PeerAbort
        )
    }
}

#[derive(Debug)]
pub struct SessionReport {
    pub outcome: SessionOutcome,
    pub transcript: Vec<TranscriptFrame>,
}

/// A reliable, ordered frame pipe.
pub trait FrameLink {
    fn send_frame(&mut self, frame: &[u8]) -> Result<(), NetError>;
    /// `Ok(None)` means the peer did not produce a frame within the
    /// timeout.
    fn recv_frame(&mut self) -> Result<Option<Vec<u8>>, NetError>;
}

/// In-process duplex built on channels.
pub struct MemLink {
    tx: mpsc::Sender<Vec<u8>>,
    rx: mpsc::Receiver<Vec<u8>>,
    timeout: Duration,
}

/// Paired in-process endpoints.
pub fn mem_pair(timeout: Duration) -> (MemLink, MemLink) {
    let (tx_a, rx_b) = mpsc::channel();
    let (tx_b, rx_a) = mpsc::channel();
    (
        MemLink {
            tx: tx_a,
            rx: rx_a,
            timeout,
        },
        MemLink {
            tx: tx_b,
            rx: rx_b,
            timeout,
        },
    )
}

impl FrameLink for MemLink {
    fn send_frame(&mut self, frame: &[u8]) -> Result<(), NetError> {
        self.tx
            .send(frame.to_vec())
            .map_err(|_| NetError::Transport("peer hung up".into()))
    }

    fn recv_frame(&mut self) -> Result<Option<Vec<u8>>, NetError> {
        match self.rx.recv_timeout(self.timeout) {
            Ok(frame) => Ok(Some(frame)),
            Err(mpsc::RecvTimeoutError::Timeout) => Ok(None),
            Err(mpsc::RecvTimeoutError::Disconnected) => {
                Err(NetError::Transport("peer hung up".into()))
            }
        }
    }
}

/// Length-framed TCP transport.
pub struct TcpLink {
    stream: TcpStream,
    timeout: Duration,
}

impl TcpLink {
    pub fn new(stream: TcpStream, timeout: Duration) -> Result<Self, NetError> {
        stream
            .set_read_timeout(Some(timeout))
            .map_err(|e| NetError::Transport(e.to_string()))?;
        stream
            .set_nodelay(true)
            .map_err(|e| NetError::Transport(e.to_string()))?;
        Ok(TcpLink { stream, timeout })
    }

    pub fn connect(addr: &str, timeout: Duration) -> Result<Self, NetError> {
        let stream = TcpStream::connect(addr)
            .map_err(|e| NetError::Transport(format!("connect {addr}: {e}")))?;
        Self::new(stream, timeout)
    }

    fn read_exact_or_timeout(&mut self, buf: &mut [u8]) -> Result<Option<()>, NetError> {
        let mut read = 0;
        while read < buf.len() {
            match self.stream.read(&mut buf[read..]) {
                Ok(0) => return Err(NetError::Transport("connection closed".into())),
                Ok(k) => read += k,
                Err(e) if e.kind() == ErrorKind::WouldBlock || e.kind() == ErrorKind::TimedOut => {
                    if read == 0 {
                        return Ok(None);
                    }
                    // A frame started arriving and stalled.
                    return Err(NetError::Transport("frame stalled mid-read".into()));
                }
                Err(e) => return Err(NetError::Transport(e.to_string())),
            }
        }
        Ok(Some(()))
    }
}

impl FrameLink for TcpLink {
    fn send_frame(&mut self, frame: &[u8]) -> Result<(), NetError> {
        self.stream
            .write_all(frame)
            .and_then(|_| self.stream.flush())
            .map_err(|e| NetError::Transport(e.to_string()))
    }

    fn recv_frame(&mut self) -> Result<Option<Vec<u8>>, NetError> {
        let _ = self.timeout;
        let mut header = [0u8; FRAME_HEADER_LEN];
        if self.read_exact_or_timeout(&mut header)?.is_none() {
            return Ok(None);
        }
        let len = u32::from_be_bytes([header[6], header[7], header[8], header[9]]) as usize;
        if len > MAX_BODY_LEN {
            return Err(NetError::Transport("frame body too long".into()));
        }
        let mut frame = header.to_vec();
        frame.resize(FRAME_HEADER_LEN + len, 0);
        if self
            .read_exact_or_timeout(&mut frame[FRAME_HEADER_LEN..])?
            .is_none()
        {
            return Err(NetError::Transport("frame stalled mid-read".into()));
        }
        Ok(Some(frame))
    }
}

/// Endpoint notation: `mem:` for paired in-process transport, `tcp:host:port`
/// for sockets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Endpoint {
    Mem,
    Tcp(String),
}

pub fn parse_endpoint(s: &str) -> Result<Endpoint, String> {
    if s == "mem:" {
        return Ok(Endpoint::Mem);
    }
    if let Some(addr) = s.strip_prefix("tcp:") {
        if addr.is_empty() {
            return Err("tcp endpoint needs host:port".into());
        }
        return Ok(Endpoint::Tcp(addr.to_string()));
    }
    // Bare host:port is accepted as TCP.
    if s.contains(':') {
        return Ok(Endpoint::Tcp(s.to_string()));
    }
    Err(format!("unrecognized endpoint {s:?}"))
}

enum Step<T> {
    Done(T),
    Ended(SessionOutcome),
}

struct Driver<'a> {
    link: &'a mut dyn FrameLink,
    transcript: Vec<TranscriptFrame>,
    from_receiver: bool,
}

impl<'a> Driver<'a> {
    fn send(&mut self, frame: Vec<u8>) -> Result<(), NetError> {
        self.link.send_frame(&frame)?;
        self.transcript.push(TranscriptFrame {
            from_receiver: self.from_receiver,
            bytes: frame,
        });
        Ok(())
    }

    fn abort_with(&mut self, abort: Abort) -> Result<SessionOutcome, NetError> {
        // Best effort: tell the peer we gave up.
        let _ = self.send(wire::encode_abort());
        Ok(SessionOutcome::LocalAbort(abort))
    }

    /// Receives one frame and hands back its body when it matches the
    /// expected tag. Timeouts and peer aborts end the session.
    fn expect(
        &mut self,
        tag: FlowTag,
        on_malformed: impl Fn(String) -> Abort,
    ) -> Result<Step<Vec<u8>>, NetError> {
        let frame = match self.link.recv_frame()? {
            Some(f) => f,
            None => return Ok(Step::Ended(SessionOutcome::PeerAbort)),
        };
        self.transcript.push(TranscriptFrame {
            from_receiver: !self.from_receiver,
            bytes: frame.clone(),
        });
        match wire::split_frame(&frame) {
            Ok((FlowTag::Abort, _)) => Ok(Step::Ended(SessionOutcome::PeerAbort)),
            Ok((t, body)) if t == tag => Ok(Step::Done(body.to_vec())),
            Ok((t, _)) => {
                let abort = on_malformed(format!("expected {tag:?}, got {t:?}"));
                Ok(Step::Ended(self.abort_with(abort)?))
            }
            Err(e) => {
                let abort = on_malformed(format!("bad frame: {e}"));
                Ok(Step::Ended(self.abort_with(abort)?))
            }
        }
    }
}

macro_rules! step {
    ($driver:expr, $e:expr) => {
        match $e? {
            Step::Done(v) => v,
            Step::Ended(outcome) => {
                return Ok(SessionReport {
                    outcome,
                    transcript: $driver.transcript,
                })
            }
        }
    };
}

/// Runs the receiver role over a link.
pub fn drive_receiver<F: Family>(
    link: &mut dyn FrameLink,
    cfg: &ProtocolConfig,
    selection: &BTreeSet<usize>,
    rng: &mut OtRng,
) -> Result<SessionReport, NetError> {
    let (state, f1) = Receiver::start::<F>(cfg, selection, rng)?;
    let params = f1.params.clone();
    let chunks = crate::commit::chunk_count(
        &crate::commit::CommitKey::derive(f1.commit_group.clone()),
        cfg.k_cut,
    );
    let mut driver = Driver {
        link,
        transcript: Vec::new(),
        from_receiver: true,
    };
    driver.send(wire::encode_f1::<F>(&f1))?;

    let body = step!(driver, driver.expect(FlowTag::F2, Abort::receiver));
    let f2 = match wire::decode_f2(&body, chunks) {
        Ok(v) => v,
        Err(e) => {
            let outcome = driver.abort_with(Abort::receiver(format!("malformed F2: {e}")))?;
            return Ok(SessionReport {
                outcome,
                transcript: driver.transcript,
            });
        }
    };
    let body = step!(driver, driver.expect(FlowTag::F3, Abort::receiver));
    let f3 = match wire::decode_f3(&body, chunks) {
        Ok(v) => v,
        Err(e) => {
            let outcome = driver.abort_with(Abort::receiver(format!("malformed F3: {e}")))?;
            return Ok(SessionReport {
                outcome,
                transcript: driver.transcript,
            });
        }
    };
    let (state, f4) = match state.on_coins(&f2, &f3, rng) {
        Ok(v) => v,
        Err(abort) => {
            let outcome = driver.abort_with(abort)?;
            return Ok(SessionReport {
                outcome,
                transcript: driver.transcript,
            });
        }
    };
    driver.send(wire::encode_f4::<F>(&f4, &params, cfg))?;
    driver.send(wire::encode_f5())?;

    let body = step!(driver, driver.expect(FlowTag::F6, Abort::receiver));
    let f6 = match wire::decode_f6::<F>(&body, &params, cfg) {
        Ok(v) => v,
        Err(e) => {
            let outcome = driver.abort_with(Abort::receiver(format!("malformed F6: {e}")))?;
            return Ok(SessionReport {
                outcome,
                transcript: driver.transcript,
            });
        }
    };
    match state.on_f6(&f6) {
        Ok(messages) => Ok(SessionReport {
            outcome: SessionOutcome::Received(messages),
            transcript: driver.transcript,
        }),
        Err(abort) => {
            let outcome = driver.abort_with(abort)?;
            Ok(SessionReport {
                outcome,
                transcript: driver.transcript,
            })
        }
    }
}

/// Runs the sender role over a link.
pub fn drive_sender<F: Family>(
    link: &mut dyn FrameLink,
    cfg: &ProtocolConfig,
    messages: Vec<Vec<u8>>,
    rng: &mut OtRng,
) -> Result<SessionReport, NetError> {
    let sender = Sender::new(cfg, messages)?;
    let mut driver = Driver {
        link,
        transcript: Vec::new(),
        from_receiver: false,
    };

    let body = step!(driver, driver.expect(FlowTag::F1, Abort::sender));
    let f1 = match wire::decode_f1::<F>(&body, cfg) {
        Ok(v) => v,
        Err(e) => {
            let outcome = driver.abort_with(Abort::sender(format!("malformed F1: {e}")))?;
            return Ok(SessionReport {
                outcome,
                transcript: driver.transcript,
            });
        }
    };
    let params = f1.params.clone();
    let chunks = crate::commit::chunk_count(
        &crate::commit::CommitKey::derive(f1.commit_group.clone()),
        cfg.k_cut,
    );
    let (state, f2, f3) = match sender.on_f1(f1, rng) {
        Ok(v) => v,
        Err(abort) => {
            let outcome = driver.abort_with(abort)?;
            return Ok(SessionReport {
                outcome,
                transcript: driver.transcript,
            });
        }
    };
    driver.send(wire::encode_f2(&f2))?;
    driver.send(wire::encode_f3(&f3))?;

    let body = step!(driver, driver.expect(FlowTag::F4, Abort::sender));
    let f4 = match wire::decode_f4::<F>(&body, &params, cfg, chunks) {
        Ok(v) => v,
        Err(e) => {
            let outcome = driver.abort_with(Abort::sender(format!("malformed F4: {e}")))?;
            return Ok(SessionReport {
                outcome,
                transcript: driver.transcript,
            });
        }
    };
    let body = step!(driver, driver.expect(FlowTag::F5, Abort::sender));
    if let Err(e) = wire::decode_f5(&body) {
        let outcome = driver.abort_with(Abort::sender(format!("malformed F5: {e}")))?;
        return Ok(SessionReport {
            outcome,
            transcript: driver.transcript,
        });
    }
    let f6 = match state.on_f4(&f4, rng) {
        Ok(v) => v,
        Err(abort) => {
            let outcome = driver.abort_with(abort)?;
            return Ok(SessionReport {
                outcome,
                transcript: driver.transcript,
            });
        }
    };
    driver.send(wire::encode_f6::<F>(&f6, &params, cfg))?;
    Ok(SessionReport {
        outcome: SessionOutcome::Sent,
        transcript: driver.transcript,
    })
}

/// Self-play over the in-memory transport: both roles run in-process on
/// forked generators.
pub fn mem_session<F: Family>(
    cfg: &ProtocolConfig,
    messages: Vec<Vec<u8>>,
    selection: &BTreeSet<usize>,
    receiver_rng: OtRng,
    sender_rng: OtRng,
    timeout: Duration,
) -> Result<(SessionReport, SessionReport), NetError> {
    let (mut link_r, mut link_s) = mem_pair(timeout);
    let cfg_r = *cfg;
    let cfg_s = *cfg;
    let selection = selection.clone();
    let receiver_handle = std::thread::spawn(move || {
        let mut rng = receiver_rng;
        drive_receiver::<F>(&mut link_r, &cfg_r, &selection, &mut rng)
    });
    let sender_handle = std::thread::spawn(move || {
        let mut rng = sender_rng;
        drive_sender::<F>(&mut link_s, &cfg_s, messages, &mut rng)
    });
    let receiver_report = receiver_handle
        .join()
        .map_err(|_| NetError::Transport("receiver thread panicked".into()))??;
    let sender_report = sender_handle
        .join()
        .map_err(|_| NetError::Transport("sender thread panicked".into()))??;
    Ok((receiver_report, sender_report))
}

/// Binds the address, accepts a single session and runs the sender role.
pub fn serve_sender_once<F: Family>(
    addr: &str,
    cfg: &ProtocolConfig,
    messages: Vec<Vec<u8>>,
    rng: &mut OtRng,
    timeout: Duration,
) -> Result<SessionReport, NetError> {
    let listener =
        TcpListener::bind(addr).map_err(|e| NetError::Transport(format!("bind {addr}: {e}")))?;
    let (stream, _) = listener
        .accept()
        .map_err(|e| NetError::Transport(format!("accept: {e}")))?;
    let mut link = TcpLink::new(stream, timeout)?;
    drive_sender::<F>(&mut link, cfg, messages, rng)
}

/// Connects to the sender and runs the receiver role.
pub fn connect_receiver<F: Family>(
    addr: &str,
    cfg: &ProtocolConfig,
    selection: &BTreeSet<usize>,
    rng: &mut OtRng,
    timeout: Duration,
) -> Result<SessionReport, NetError> {
    let mut link = TcpLink::connect(addr, timeout)?;
    drive_receiver::<F>(&mut link, cfg, selection, rng)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoint_parsing() {
        assert_eq!(parse_endpoint("mem:").unwrap(), Endpoint::Mem);
        assert_eq!(
            parse_endpoint("tcp:127.0.0.1:9000").unwrap(),
            Endpoint::Tcp("127.0.0.1:9000".into())
        );
        assert_eq!(
            parse_endpoint("127.0.0.1:9000").unwrap(),
            Endpoint::Tcp("127.0.0.1:9000".into())
        );
        assert!(parse_endpoint("carrier-pigeon").is_err());
    }

    #[test]
    fn unreachable_host_is_a_transport_error() {
        // Port 1 on localhost is essentially never listening.
        let err = TcpLink::connect("127.0.0.1:1", Duration::from_millis(200));
        assert!(matches!(err, Err(NetError::Transport(_))));
    }

    #[test]
    fn mem_link_times_out_quietly() {
        let (mut a, _b) = mem_pair(Duration::from_millis(20));
        assert!(a.recv_frame().unwrap().is_none());
    }
}
