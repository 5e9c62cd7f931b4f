//! Known misprints in the published formulas and what the code uses instead.

use std::sync::LazyLock;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Entry {
    pub id: String,
    pub location: String,
    pub displayed: String,
    pub derived: String,
    pub note: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Ledger {
    pub version: String,
    pub entries: Vec<Entry>,
}

static LEDGER: LazyLock<Ledger> = LazyLock::new(|| {
    serde_json::from_str(include_str!("../data/typos.json")).expect("typo ledger is valid json")
});

pub fn ledger() -> &'static Ledger {
    &LEDGER
}

pub fn version() -> &'static str {
    &LEDGER.version
}

pub fn entry(id: &str) -> Option<&'static Entry> {
    LEDGER.entries.iter().find(|e| e.id == id)
}
