//! Machine-checkable records of verified finite claims.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::coefficients::TripleIndex;
use crate::numerics::Rational;

/// Version string stamped into every certificate.
pub const TOOL_VERSION: &str = concat!("fanocoeff-core ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Param {
    Int(u64),
    Text(String),
}

impl From<usize> for Param {
    fn from(n: usize) -> Self {
        Param::Int(n as u64)
    }
}

impl From<&str> for Param {
    fn from(s: &str) -> Self {
        Param::Text(s.into())
    }
}

/// What was checked, over which finite range.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Claim {
    pub property: String,
    pub params: BTreeMap<String, Param>,
}

impl Claim {
    pub fn new(property: &str) -> Self {
        Claim {
            property: property.into(),
            params: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl Into<Param>) -> Self {
        self.params.insert(key.into(), value.into());
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

/// One index where the claim did not hold.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Witness {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub value: Rational,
    pub reason: String,
}

impl Witness {
    pub fn new(idx: TripleIndex, value: Rational, reason: impl Into<String>) -> Self {
        Witness {
            i: idx.i(),
            j: idx.j(),
            k: idx.k(),
            value,
            reason: reason.into(),
        }
    }

    pub fn index(&self) -> (usize, usize, usize) {
        (self.i, self.j, self.k)
    }
}

/// Verdict is `pass` exactly when there are no witnesses; `checked_count`
/// is the size of the declared range.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub claim: Claim,
    pub verdict: Verdict,
    pub checked_count: u64,
    pub witnesses: Vec<Witness>,
    pub produced_at: String,
    pub tool_version: String,
}

impl Certificate {
    /// Witnesses are sorted by index so the result does not depend on the
    /// order in which they were found. `produced_at` is left empty for the
    /// caller to stamp.
    pub fn new(claim: Claim, checked_count: u64, mut witnesses: Vec<Witness>) -> Self {
        witnesses.sort();
        let verdict = if witnesses.is_empty() {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        Certificate {
            claim,
            verdict,
            checked_count,
            witnesses,
            produced_at: String::new(),
            tool_version: TOOL_VERSION.into(),
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn stamped(mut self, produced_at: impl Into<String>) -> Self {
        self.produced_at = produced_at.into();
        self
    }

    /// Combines partial certificates over disjoint pieces of one range.
    pub fn merge(claim: Claim, parts: impl IntoIterator<Item = Certificate>) -> Self {
        let mut count = 0;
        let mut witnesses = Vec::new();
        for part in parts {
            count += part.checked_count;
            witnesses.extend(part.witnesses);
        }
        Certificate::new(claim, count, witnesses)
    }

    /// Combines certificates for different properties, prefixing each
    /// witness reason with the property it came from.
    pub fn aggregate(claim: Claim, parts: &[Certificate]) -> Self {
        let mut count = 0;
        let mut witnesses = Vec::new();
        for part in parts {
            count += part.checked_count;
            for w in &part.witnesses {
                let mut w = w.clone();
                w.reason = alloc::format!("{}: {}", part.claim.property, w.reason);
                witnesses.push(w);
            }
        }
        Certificate::new(claim, count, witnesses)
    }
}
