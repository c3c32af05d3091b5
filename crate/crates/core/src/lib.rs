//! Hospital-course generation for discharge summaries.
//!
//! Notes from one admission are split into three streams (HPI, daily
//! narrative, follow-ups), each stream is summarized with beam search
//! constrained to the medical terms its sources actually mention, and the
//! pieces are assembled in chronological order. [`metrics`] holds the
//! evaluation suite: ROUGE recall, word-count statistics, classification
//! reports and consistency ICC.

pub mod corpus;
pub mod decode;
pub mod metrics;
pub mod scorer;
pub mod text;
pub mod vocab;
