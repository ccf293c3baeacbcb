//! The `sigma-scope/1` JSON report: serializable documents for every
//! command, and conversions between certificates and their documents.
//!
//! Trees inside documents use the text format, so a stored report is
//! self-contained: `verify` rebuilds the input and the certificate from it.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::format::{ideal_to_text, ntree_to_text, pairtree_to_text, parse_definitions, Definition};
use crate::dichotomy::derive::{DerivativeTrace, RemovalReason};
use crate::dichotomy::{Classification, Diagnostics, Method, Verdict};
use crate::error::{Error, Result};
use crate::ideal::Ideal;
use crate::ntree::NTree;
use crate::pairtree::PairTree;
use crate::witness::cover::BoundedMoves;
use crate::witness::{CoverMode, CoverPiece, CoverScheme, Report, WitnessPairTree};

pub const SCHEMA: &str = "sigma-scope/1";

/// Echo of the command line that produced a report.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommandEcho {
    pub command: String,
    pub name: Option<String>,
    pub all: bool,
    pub ideal: String,
    pub method: Method,
    pub depth: usize,
    pub letters: u64,
    pub nmax: u64,
    pub point: Option<String>,
    pub trace: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorDoc {
    pub kind: String,
    pub message: String,
}

impl From<&Error> for ErrorDoc {
    fn from(e: &Error) -> Self {
        let kind = match e {
            Error::NotInTree => "NotInTree",
            Error::EmptyTree => "EmptyTree",
            Error::BoundsTooLarge(_) => "BoundsTooLarge",
            Error::ImproperIdeal => "ImproperIdeal",
            Error::NotPositive => "NotPositive",
            Error::NotSmall => "NotSmall",
            Error::MethodMismatch => "MethodMismatch",
            Error::EmptySection => "EmptySection",
            Error::InternalSoundness(_) => "InternalSoundnessError",
            Error::Parse { .. } => "ParseError",
            Error::Validation(_) => "ValidationError",
        };
        ErrorDoc {
            kind: kind.into(),
            message: e.to_string(),
        }
    }
}

/// Top-level report. Exactly one of `results` (success) and `error` is
/// meaningful.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDoc {
    pub schema: String,
    pub command: CommandEcho,
    pub exit_code: i32,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub results: Vec<serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PieceDoc {
    pub stage: usize,
    pub state: String,
    pub tree: String,
    pub bounded: BoundedMoves,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverTreeDoc {
    pub n: u64,
    pub states: usize,
    pub compact: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CertificateDoc {
    Witness {
        tree: String,
        projection: String,
        embedding: BTreeMap<String, String>,
    },
    LetterBound {
        base: String,
        bounded: BoundedMoves,
        trees: Vec<CoverTreeDoc>,
    },
    DerivedPieces {
        base: String,
        pieces: Vec<PieceDoc>,
        trees: Vec<CoverTreeDoc>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameDoc {
    pub stage: usize,
    pub state: String,
    pub contained: bool,
    pub counterexample: Option<String>,
    pub positions: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceDoc {
    pub stages: Vec<Vec<String>>,
    /// Per stage: `(state, reason)` for every state leaving it.
    pub removals: Vec<Vec<(String, RemovalReason)>>,
    pub lambda: usize,
    pub games: Vec<GameDoc>,
}

impl TraceDoc {
    pub fn new(trace: &DerivativeTrace) -> Self {
        let name = |q: usize| trace.tree.name(q).to_string();
        TraceDoc {
            stages: trace
                .stages
                .iter()
                .map(|st| st.iter().map(|&q| name(q)).collect())
                .collect(),
            removals: trace
                .removals
                .iter()
                .map(|rs| rs.iter().map(|r| (name(r.state), r.reason)).collect())
                .collect(),
            lambda: trace.lambda,
            games: trace
                .games
                .iter()
                .map(|g| GameDoc {
                    stage: g.stage,
                    state: name(g.state),
                    contained: g.result.contained,
                    counterexample: g.result.counterexample.as_ref().map(|x| x.to_string()),
                    positions: g.result.positions,
                })
                .collect(),
        }
    }
}

/// One certified verdict, with everything needed to re-verify it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictDoc {
    pub target: String,
    pub ideal: String,
    pub method: Method,
    pub verdict: String,
    /// The input presentation, as text.
    pub source: String,
    /// The ideal, as text.
    pub ideal_source: String,
    pub certificate: CertificateDoc,
    pub verification: Report,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<Diagnostics>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<TraceDoc>,
}

pub const POSITIVE: &str = "Positive";
pub const SMALL_COVER: &str = "SmallCover";

pub fn witness_doc(w: &WitnessPairTree) -> CertificateDoc {
    CertificateDoc::Witness {
        tree: pairtree_to_text("W", &w.tree),
        projection: ntree_to_text("Tx", &w.projection),
        embedding: w.embedding.clone(),
    }
}

pub fn cover_doc(scheme: &CoverScheme, nmax: u64) -> CertificateDoc {
    let trees = (0..=nmax)
        .map(|n| {
            let t = crate::witness::cover_tree(scheme, n);
            CoverTreeDoc {
                n,
                states: t.len(),
                compact: t.is_compact_tree(),
            }
        })
        .collect();
    let base = pairtree_to_text("S", &scheme.base);
    match &scheme.mode {
        CoverMode::LetterBound { bounded } => CertificateDoc::LetterBound {
            base,
            bounded: bounded.clone(),
            trees,
        },
        CoverMode::DerivedPieces { pieces } => CertificateDoc::DerivedPieces {
            base,
            pieces: pieces
                .iter()
                .map(|p| PieceDoc {
                    stage: p.stage,
                    state: p.state.clone(),
                    tree: pairtree_to_text("P", &p.tree),
                    bounded: p.bounded.clone(),
                })
                .collect(),
            trees,
        },
    }
}

pub fn verdict_doc(
    target: &str,
    ideal_name: &str,
    s: &PairTree,
    c: &Classification,
    verification: Report,
    nmax: u64,
    with_trace: bool,
) -> VerdictDoc {
    let (verdict, certificate) = match &c.verdict {
        Verdict::Positive(w) => (POSITIVE, witness_doc(w)),
        Verdict::SmallCover(scheme) => (SMALL_COVER, cover_doc(scheme, nmax)),
    };
    VerdictDoc {
        target: target.into(),
        ideal: ideal_name.into(),
        method: c.method,
        verdict: verdict.into(),
        source: pairtree_to_text(target, s),
        ideal_source: ideal_to_text("I", &c.ideal),
        certificate,
        verification,
        diagnostics: Some(c.diagnostics.clone()),
        trace: if with_trace {
            c.trace.as_ref().map(TraceDoc::new)
        } else {
            None
        },
    }
}

fn single(text: &str) -> Result<Definition> {
    parse_definitions(text)?
        .entries
        .into_iter()
        .next()
        .map(|(_, d)| d)
        .ok_or_else(|| Error::Validation("empty definition in report".into()))
}

pub fn read_pairtree(text: &str) -> Result<PairTree> {
    match single(text)? {
        Definition::PairTree(s) => Ok(s),
        _ => Err(Error::Validation("expected a pairtree in report".into())),
    }
}

pub fn read_ntree(text: &str) -> Result<NTree> {
    match single(text)? {
        Definition::NTree(t) => Ok(t),
        _ => Err(Error::Validation("expected an ntree in report".into())),
    }
}

pub fn read_ideal(text: &str) -> Result<Ideal> {
    // `I` is never reserved, so the stored block always parses
    match single(text)? {
        Definition::Ideal(i) => Ok(i),
        _ => Err(Error::Validation("expected an ideal in report".into())),
    }
}

/// Rebuilds the certificate of a stored verdict.
pub enum StoredCertificate {
    Witness(WitnessPairTree),
    Cover(CoverScheme),
}

pub fn read_certificate(doc: &CertificateDoc, ideal: &Ideal) -> Result<StoredCertificate> {
    Ok(match doc {
        CertificateDoc::Witness {
            tree,
            projection,
            embedding,
        } => StoredCertificate::Witness(WitnessPairTree {
            tree: read_pairtree(tree)?,
            projection: read_ntree(projection)?,
            embedding: embedding.clone(),
        }),
        CertificateDoc::LetterBound { base, bounded, .. } => StoredCertificate::Cover(CoverScheme {
            base: read_pairtree(base)?,
            ideal: ideal.clone(),
            mode: CoverMode::LetterBound {
                bounded: bounded.clone(),
            },
        }),
        CertificateDoc::DerivedPieces { base, pieces, .. } => StoredCertificate::Cover(CoverScheme {
            base: read_pairtree(base)?,
            ideal: ideal.clone(),
            mode: CoverMode::DerivedPieces {
                pieces: pieces
                    .iter()
                    .map(|p| {
                        Ok(CoverPiece {
                            stage: p.stage,
                            state: p.state.clone(),
                            tree: read_pairtree(&p.tree)?,
                            bounded: p.bounded.clone(),
                        })
                    })
                    .collect::<Result<_>>()?,
            },
        }),
    })
}
