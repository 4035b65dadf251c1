use std::collections::BTreeMap;

use serde::Serialize;

use crate::field::FieldElement;

/// Phase 1: helper to new node. Phase 2: new node to new node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Phase {
    Download,
    Exchange,
}

impl Phase {
    pub fn number(self) -> u8 {
        match self {
            Phase::Download => 1,
            Phase::Exchange => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranscriptEntry {
    pub phase: Phase,
    pub from: usize,
    pub to: usize,
    pub symbols: Vec<FieldElement>,
}

/// Every message exchanged during one cooperative repair session, in the
/// order it was produced.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RepairTranscript {
    entries: Vec<TranscriptEntry>,
}

impl RepairTranscript {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, phase: Phase, from: usize, to: usize, symbols: Vec<FieldElement>) {
        self.entries.push(TranscriptEntry {
            phase,
            from,
            to,
            symbols,
        });
    }

    pub fn entries(&self) -> &[TranscriptEntry] {
        &self.entries
    }

    pub fn grand_total(&self) -> usize {
        self.entries.iter().map(|e| e.symbols.len()).sum()
    }

    pub fn phase_total(&self, phase: Phase) -> usize {
        self.entries
            .iter()
            .filter(|e| e.phase == phase)
            .map(|e| e.symbols.len())
            .sum()
    }

    /// Symbols received per destination node; for a repair this is the
    /// bandwidth spent on each new node.
    pub fn per_node_totals(&self) -> BTreeMap<usize, usize> {
        let mut totals = BTreeMap::new();
        for e in &self.entries {
            *totals.entry(e.to).or_insert(0) += e.symbols.len();
        }
        totals
    }

    /// Message sizes only, which do not depend on the stored data.
    pub fn shape(&self) -> Vec<(Phase, usize, usize, usize)> {
        self.entries
            .iter()
            .map(|e| (e.phase, e.from, e.to, e.symbols.len()))
            .collect()
    }
}
