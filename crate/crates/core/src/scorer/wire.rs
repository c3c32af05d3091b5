//! Newline-delimited JSON messages for external scorers, plus a server loop
//! that exposes any [`TokenScorer`] over a byte stream.
//!
//! ```text
//! -> {"op":"hello","version":1}
//! <- {"op":"hello","version":1,"end_token":"<end>"}
//! -> {"op":"score","id":7,"source":"...","prefix":["a","b"],"top_k":32}
//! <- {"op":"score","id":7,"tokens":[{"t":"c","lp":-0.1},...]}
//! <- {"op":"error","id":7,"message":"..."}
//! ```

use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{Token, TokenScorer, WordBoundary};

pub const PROTOCOL_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum Request {
    Hello {
        version: u32,
    },
    Score {
        id: u64,
        source: String,
        prefix: Vec<String>,
        top_k: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum Response {
    Hello {
        version: u32,
        end_token: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        vocab_size: Option<usize>,
        /// `"words"` or `"marker"`; absent means marker-prefixed subwords.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        word_boundary: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        concurrent: Option<bool>,
    },
    Score {
        id: u64,
        tokens: Vec<TokenLogProb>,
    },
    Error {
        #[serde(default)]
        id: Option<u64>,
        message: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TokenLogProb {
    pub t: String,
    pub lp: f64,
}

pub(crate) fn boundary_name(boundary: WordBoundary) -> &'static str {
    match boundary {
        WordBoundary::WholeWords => "words",
        WordBoundary::LeadingMarker => "marker",
    }
}

pub(crate) fn parse_boundary(name: Option<&str>) -> Option<WordBoundary> {
    match name {
        None | Some("marker") => Some(WordBoundary::LeadingMarker),
        Some("words") => Some(WordBoundary::WholeWords),
        Some(_) => None,
    }
}

/// Answers one request. Never fails; scorer errors become error responses.
pub fn respond<S: TokenScorer + ?Sized>(scorer: &S, request: Request) -> Response {
    match request {
        Request::Hello { version } if version == PROTOCOL_VERSION => Response::Hello {
            version: PROTOCOL_VERSION,
            end_token: scorer.end_token().to_owned(),
            vocab_size: scorer.vocabulary().map(<[Token]>::len),
            word_boundary: Some(boundary_name(scorer.word_boundary()).to_owned()),
            concurrent: Some(false),
        },
        Request::Hello { version } => Response::Error {
            id: None,
            message: format!("unsupported protocol version {version}"),
        },
        Request::Score {
            id,
            source,
            prefix,
            top_k,
        } => {
            let prefix: Vec<Token> = prefix.iter().map(|t| Token::from(t.as_str())).collect();
            match scorer.score_next(&source, &prefix) {
                Ok(dist) => {
                    let mut entries: Vec<&(Token, f64)> = dist.entries().iter().collect();
                    entries.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
                    entries.truncate(top_k.max(1));
                    Response::Score {
                        id,
                        tokens: entries
                            .into_iter()
                            .filter(|(_, lp)| lp.is_finite())
                            .map(|(t, lp)| TokenLogProb {
                                t: t.to_string(),
                                lp: *lp,
                            })
                            .collect(),
                    }
                }
                Err(e) => Response::Error {
                    id: Some(id),
                    message: e.to_string(),
                },
            }
        }
    }
}

/// Serves requests line by line until the reader is exhausted.
pub fn serve<S, R, W>(scorer: &S, reader: R, mut writer: W) -> io::Result<()>
where
    S: TokenScorer + ?Sized,
    R: BufRead,
    W: Write,
{
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let response = match serde_json::from_str::<Request>(&line) {
            Ok(request) => respond(scorer, request),
            Err(e) => Response::Error {
                id: None,
                message: format!("bad request: {e}"),
            },
        };
        let mut encoded = serde_json::to_vec(&response)?;
        encoded.push(b'\n');
        writer.write_all(&encoded)?;
        writer.flush()?;
    }
    Ok(())
}
