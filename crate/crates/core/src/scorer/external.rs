use std::collections::HashSet;
use std::io::{BufRead, BufReader, Read, Write};
use std::net::{TcpStream, ToSocketAddrs};
use std::process::{Child, Command, Stdio};
use std::str::FromStr;
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::sync::Mutex;
use std::thread;
use std::time::{Duration, Instant};

use super::wire::{parse_boundary, Request, Response, PROTOCOL_VERSION};
use super::{LogProbDistribution, ScorerError, Token, TokenScorer, WordBoundary, DEFAULT_SOURCE_BUDGET};
use crate::text::truncate_front;

/// Where an external scorer lives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Endpoint {
    /// `tcp://host:port`
    Tcp(String),
    /// `exec:<shell command>`; the child speaks the protocol on stdin/stdout.
    Command(String),
}

impl FromStr for Endpoint {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some(addr) = s.strip_prefix("tcp://") {
            if addr.is_empty() {
                return Err("empty tcp address".into());
            }
            Ok(Self::Tcp(addr.to_owned()))
        } else if let Some(cmd) = s.strip_prefix("exec:") {
            if cmd.trim().is_empty() {
                return Err("empty command".into());
            }
            Ok(Self::Command(cmd.to_owned()))
        } else {
            Err(format!("unrecognized scorer endpoint {s:?} (expected tcp://host:port or exec:command)"))
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExternalConfig {
    /// Deadline for connecting and for each response.
    pub timeout: Duration,
    pub top_k: usize,
    /// Conditioning text is cut to its last `source_budget` whitespace tokens.
    pub source_budget: usize,
}

impl Default for ExternalConfig {
    fn default() -> Self {
        Self {
            timeout: Duration::from_secs(30),
            top_k: 64,
            source_budget: DEFAULT_SOURCE_BUDGET,
        }
    }
}

struct Connection {
    writer: Box<dyn Write + Send>,
    lines: Receiver<std::io::Result<String>>,
    next_id: u64,
}

/// Client side of the scorer wire protocol. Requests are serialized over one
/// connection, so the scorer reports itself as non-concurrent.
pub struct ExternalScorer {
    conn: Mutex<Connection>,
    child: Option<Mutex<Child>>,
    socket: Option<TcpStream>,
    end_token: String,
    boundary: WordBoundary,
    vocab_size: Option<usize>,
    config: ExternalConfig,
}

pub fn connect_external_scorer(
    endpoint: &Endpoint,
    config: ExternalConfig,
) -> Result<ExternalScorer, ScorerError> {
    match endpoint {
        Endpoint::Tcp(addr) => {
            let addrs: Vec<_> = addr
                .to_socket_addrs()
                .map_err(|e| ScorerError::Unavailable(format!("cannot resolve {addr}: {e}")))?
                .collect();
            let mut last_err = None;
            for sock in addrs {
                match TcpStream::connect_timeout(&sock, config.timeout) {
                    Ok(stream) => {
                        stream
                            .set_write_timeout(Some(config.timeout))
                            .map_err(|e| ScorerError::Unavailable(e.to_string()))?;
                        let _ = stream.set_nodelay(true);
                        let reader = stream
                            .try_clone()
                            .map_err(|e| ScorerError::Unavailable(e.to_string()))?;
                        let socket = stream
                            .try_clone()
                            .map_err(|e| ScorerError::Unavailable(e.to_string()))?;
                        let mut scorer = ExternalScorer::from_streams(reader, stream, config)?;
                        scorer.socket = Some(socket);
                        return Ok(scorer);
                    }
                    Err(e) => last_err = Some(e),
                }
            }
            Err(ScorerError::Unavailable(match last_err {
                Some(e) => format!("cannot connect to {addr}: {e}"),
                None => format!("{addr} resolved to no address"),
            }))
        }
        Endpoint::Command(cmd) => {
            let mut child = Command::new("sh")
                .arg("-c")
                .arg(cmd)
                .stdin(Stdio::piped())
                .stdout(Stdio::piped())
                .stderr(Stdio::inherit())
                .spawn()
                .map_err(|e| ScorerError::Unavailable(format!("cannot start {cmd:?}: {e}")))?;
            let stdin = child.stdin.take().expect("piped stdin");
            let stdout = child.stdout.take().expect("piped stdout");
            let mut scorer = match ExternalScorer::from_streams(stdout, stdin, config) {
                Ok(s) => s,
                Err(e) => {
                    let _ = child.kill();
                    let _ = child.wait();
                    return Err(e);
                }
            };
            scorer.child = Some(Mutex::new(child));
            Ok(scorer)
        }
    }
}

impl ExternalScorer {
    /// Performs the handshake over an arbitrary byte stream pair.
    pub fn from_streams<R, W>(reader: R, writer: W, config: ExternalConfig) -> Result<Self, ScorerError>
    where
        R: Read + Send + 'static,
        W: Write + Send + 'static,
    {
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(reader).lines() {
                let stop = line.is_err();
                if tx.send(line).is_err() || stop {
                    break;
                }
            }
        });
        let mut conn = Connection {
            writer: Box::new(writer),
            lines: rx,
            next_id: 1,
        };

        send(&mut conn, &Request::Hello { version: PROTOCOL_VERSION })
            .map_err(|e| ScorerError::HandshakeFailure(e.to_string()))?;
        let line = recv_line(&conn, Instant::now() + config.timeout).map_err(|e| match e {
            ScorerError::Timeout(d) => ScorerError::Timeout(d),
            other => ScorerError::HandshakeFailure(other.to_string()),
        })?;
        let response: Response = serde_json::from_str(&line)
            .map_err(|e| ScorerError::HandshakeFailure(format!("bad hello response {line:?}: {e}")))?;
        match response {
            Response::Hello {
                version,
                end_token,
                vocab_size,
                word_boundary,
                ..
            } => {
                if version != PROTOCOL_VERSION {
                    return Err(ScorerError::HandshakeFailure(format!(
                        "server speaks version {version}"
                    )));
                }
                if end_token.is_empty() {
                    return Err(ScorerError::HandshakeFailure("empty end token".into()));
                }
                let boundary = parse_boundary(word_boundary.as_deref()).ok_or_else(|| {
                    ScorerError::HandshakeFailure(format!("unknown word boundary {word_boundary:?}"))
                })?;
                Ok(Self {
                    conn: Mutex::new(conn),
                    child: None,
                    socket: None,
                    end_token,
                    boundary,
                    vocab_size,
                    config,
                })
            }
            Response::Error { message, .. } => Err(ScorerError::HandshakeFailure(message)),
            other => Err(ScorerError::HandshakeFailure(format!(
                "expected hello, got {other:?}"
            ))),
        }
    }

    /// Vocabulary size announced during the handshake, if any.
    pub fn vocab_size(&self) -> Option<usize> {
        self.vocab_size
    }
}

fn send(conn: &mut Connection, request: &Request) -> Result<(), ScorerError> {
    let mut line = serde_json::to_vec(request).expect("requests always serialize");
    line.push(b'\n');
    conn.writer
        .write_all(&line)
        .and_then(|_| conn.writer.flush())
        .map_err(|e| ScorerError::Unavailable(format!("write failed: {e}")))
}

fn recv_line(conn: &Connection, deadline: Instant) -> Result<String, ScorerError> {
    let now = Instant::now();
    let wait = deadline.saturating_duration_since(now);
    match conn.lines.recv_timeout(wait) {
        Ok(Ok(line)) => Ok(line),
        Ok(Err(e)) => Err(ScorerError::Unavailable(format!("read failed: {e}"))),
        Err(RecvTimeoutError::Timeout) => Err(ScorerError::Timeout(wait)),
        Err(RecvTimeoutError::Disconnected) => {
            Err(ScorerError::Unavailable("scorer closed the connection".into()))
        }
    }
}

impl Drop for ExternalScorer {
    fn drop(&mut self) {
        if let Some(socket) = &self.socket {
            let _ = socket.shutdown(std::net::Shutdown::Both);
        }
        if let Some(child) = &self.child {
            if let Ok(mut child) = child.lock() {
                let _ = child.kill();
                let _ = child.wait();
            }
        }
    }
}

impl TokenScorer for ExternalScorer {
    fn vocabulary(&self) -> Option<&[Token]> {
        None
    }

    fn end_token(&self) -> &str {
        &self.end_token
    }

    fn word_boundary(&self) -> WordBoundary {
        self.boundary
    }

    fn is_concurrent(&self) -> bool {
        false
    }

    fn score_next(&self, source: &str, prefix: &[Token]) -> Result<LogProbDistribution, ScorerError> {
        let mut conn = self
            .conn
            .lock()
            .map_err(|_| ScorerError::Unavailable("connection poisoned".into()))?;
        let id = conn.next_id;
        conn.next_id += 1;
        let request = Request::Score {
            id,
            source: truncate_front(source, self.config.source_budget).to_owned(),
            prefix: prefix.iter().map(|t| t.to_string()).collect(),
            top_k: self.config.top_k,
        };
        send(&mut conn, &request)?;

        let deadline = Instant::now() + self.config.timeout;
        loop {
            let line = recv_line(&conn, deadline)?;
            let response: Response = serde_json::from_str(&line)
                .map_err(|e| ScorerError::ProtocolViolation(format!("{line:?}: {e}")))?;
            match response {
                // late answers to requests that already timed out
                Response::Score { id: old, .. } | Response::Error { id: Some(old), .. } if old < id => continue,
                Response::Score { id: got, tokens } if got == id => {
                    return to_distribution(tokens);
                }
                Response::Error { id: Some(got), message } if got == id => {
                    return Err(ScorerError::Unavailable(message));
                }
                Response::Error { id: None, message } => {
                    return Err(ScorerError::Unavailable(message));
                }
                other => {
                    return Err(ScorerError::ProtocolViolation(format!(
                        "unexpected response to request {id}: {other:?}"
                    )))
                }
            }
        }
    }
}

fn to_distribution(tokens: Vec<super::wire::TokenLogProb>) -> Result<LogProbDistribution, ScorerError> {
    if tokens.is_empty() {
        return Err(ScorerError::ProtocolViolation("empty token list".into()));
    }
    let mut seen = HashSet::new();
    let mut entries = Vec::with_capacity(tokens.len());
    for entry in tokens {
        if !entry.lp.is_finite() || entry.lp > 1e-9 {
            return Err(ScorerError::ProtocolViolation(format!(
                "token {:?} has log probability {}",
                entry.t, entry.lp
            )));
        }
        if !seen.insert(entry.t.clone()) {
            return Err(ScorerError::ProtocolViolation(format!(
                "token {:?} listed twice",
                entry.t
            )));
        }
        entries.push((Token::from(entry.t), entry.lp));
    }
    // top-k truncation: unlisted tokens get probability zero
    LogProbDistribution::from_log_weights(entries)
}
