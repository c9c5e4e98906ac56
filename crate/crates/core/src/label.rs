//! Prefix labels: the per-level addresses nodes carry in a labeled tree.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// A node address made of one symbol per tree level.
///
/// The root carries a single symbol and every other node carries its parent's
/// label with exactly one symbol appended. Symbols are unbounded integers, so
/// fan-out is not limited to ten children; the textual form is dot-separated
/// (`0.2.2.1`).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PrefixLabel(Vec<u32>);

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LabelParseError {
    #[error("empty prefix label")]
    Empty,
    #[error("invalid label symbol {0:?}")]
    BadSymbol(String),
}

impl PrefixLabel {
    /// The label of a root node.
    pub fn root(symbol: u32) -> Self {
        PrefixLabel(vec![symbol])
    }

    /// Builds a label from raw symbols; `None` if `symbols` is empty.
    pub fn from_symbols(symbols: Vec<u32>) -> Option<Self> {
        if symbols.is_empty() {
            None
        } else {
            Some(PrefixLabel(symbols))
        }
    }

    pub fn symbols(&self) -> &[u32] {
        &self.0
    }

    /// Number of symbols; the root label has length 1.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// `self ⊙ suffix`.
    pub fn child(&self, suffix: u32) -> Self {
        let mut symbols = Vec::with_capacity(self.0.len() + 1);
        symbols.extend_from_slice(&self.0);
        symbols.push(suffix);
        PrefixLabel(symbols)
    }

    /// The label with its last symbol removed, or `None` for a root label.
    pub fn parent(&self) -> Option<Self> {
        if self.0.len() <= 1 {
            None
        } else {
            Some(PrefixLabel(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    /// The final symbol (the suffix that distinguishes siblings).
    pub fn last(&self) -> u32 {
        *self.0.last().expect("labels are non-empty")
    }

    /// Leading `len` symbols; `None` if `len` is zero or exceeds this label.
    pub fn truncated(&self, len: usize) -> Option<Self> {
        if len == 0 || len > self.0.len() {
            None
        } else {
            Some(PrefixLabel(self.0[..len].to_vec()))
        }
    }

    pub fn is_prefix_of(&self, other: &PrefixLabel) -> bool {
        other.0.starts_with(&self.0)
    }

    /// Hop count between the nodes carrying these labels in a consistently
    /// labeled tree: both climb to their longest common prefix.
    pub fn distance(&self, other: &PrefixLabel) -> usize {
        let common = common_prefix_length(self, other);
        (self.len() - common) + (other.len() - common)
    }
}

/// Length of the longest common prefix of two labels.
pub fn common_prefix_length(a: &PrefixLabel, b: &PrefixLabel) -> usize {
    a.0.iter()
        .zip(b.0.iter())
        .take_while(|(x, y)| x == y)
        .count()
}

impl fmt::Display for PrefixLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for PrefixLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PrefixLabel({self})")
    }
}

impl FromStr for PrefixLabel {
    type Err = LabelParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.is_empty() {
            return Err(LabelParseError::Empty);
        }
        let symbols = s
            .split('.')
            .map(|part| {
                // u32::from_str accepts a leading '+', which would break the
                // Display round trip.
                if part.is_empty() || !part.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(LabelParseError::BadSymbol(part.to_string()));
                }
                part.parse::<u32>()
                    .map_err(|_| LabelParseError::BadSymbol(part.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(PrefixLabel(symbols))
    }
}

impl Serialize for PrefixLabel {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PrefixLabel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
