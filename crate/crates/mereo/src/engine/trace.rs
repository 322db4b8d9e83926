//! Auditable record of the elimination stages.

use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::formula::Formula;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    AtomNormalization,
    Positivization,
    Cellification,
    SizeRewriting,
    Dnf,
    QuantifierElimination,
    GroundEvaluation,
}

impl Stage {
    pub fn label(self) -> &'static str {
        match self {
            Stage::AtomNormalization => "atom-normalization",
            Stage::Positivization => "positivization",
            Stage::Cellification => "cellification",
            Stage::SizeRewriting => "size-rewriting",
            Stage::Dnf => "dnf",
            Stage::QuantifierElimination => "quantifier-elimination",
            Stage::GroundEvaluation => "ground-evaluation",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// One recorded rewrite. `before` and `after` are equivalent over the
/// theory; the oracle suite samples assignments to check this.
#[derive(Debug, Clone)]
pub struct TraceEntry {
    pub stage: Stage,
    pub before: Formula,
    pub after: Formula,
}

impl Serialize for TraceEntry {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("TraceEntry", 3)?;
        s.serialize_field("stage", self.stage.label())?;
        s.serialize_field("before", &self.before.to_string())?;
        s.serialize_field("after", &self.after.to_string())?;
        s.end()
    }
}

#[derive(Debug, Clone, Default, Serialize)]
#[serde(transparent)]
pub struct EliminationTrace {
    entries: Vec<TraceEntry>,
}

impl EliminationTrace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, stage: Stage, before: Formula, after: Formula) {
        self.entries.push(TraceEntry { stage, before, after });
    }

    pub fn entries(&self) -> &[TraceEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl<'a> IntoIterator for &'a EliminationTrace {
    type Item = &'a TraceEntry;
    type IntoIter = std::slice::Iter<'a, TraceEntry>;

    fn into_iter(self) -> Self::IntoIter {
        self.entries.iter()
    }
}
