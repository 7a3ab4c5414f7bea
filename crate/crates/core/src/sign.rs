//! Sign sequences: the combinatorial names of cells.
//!
//! Entries are indexed by `(layer, neuron)` flattened in lexicographic order,
//! so index 0 is the first neuron of the first hidden layer. The derived
//! ordering on [`Sign`] is `Neg < Zero < Pos`, and sequences compare
//! lexicographically in that index order. All deterministic outputs of the
//! crate are sorted this way.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Neg,
    Zero,
    Pos,
}

impl Sign {
    pub fn from_value(value: f64, tol: f64) -> Sign {
        if value.abs() < tol {
            Sign::Zero
        } else if value > 0.0 {
            Sign::Pos
        } else {
            Sign::Neg
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Neg => -1.0,
            Sign::Zero => 0.0,
            Sign::Pos => 1.0,
        }
    }

    pub fn opposite(self) -> Sign {
        match self {
            Sign::Neg => Sign::Pos,
            Sign::Zero => Sign::Zero,
            Sign::Pos => Sign::Neg,
        }
    }

    pub fn is_zero(self) -> bool {
        self == Sign::Zero
    }

    pub fn as_char(self) -> char {
        match self {
            Sign::Neg => '-',
            Sign::Zero => '0',
            Sign::Pos => '+',
        }
    }

    fn from_char(c: char) -> Option<Sign> {
        match c {
            '-' | '\u{2212}' => Some(Sign::Neg),
            '0' => Some(Sign::Zero),
            '+' => Some(Sign::Pos),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignSequence(Vec<Sign>);

impl SignSequence {
    pub fn new(entries: Vec<Sign>) -> Self {
        SignSequence(entries)
    }

    pub fn filled(len: usize, sign: Sign) -> Self {
        SignSequence(vec![sign; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[Sign] {
        &self.0
    }

    pub fn get(&self, index: usize) -> Sign {
        self.0[index]
    }

    pub fn num_zeros(&self) -> usize {
        self.0.iter().filter(|s| s.is_zero()).count()
    }

    /// Flat indices of the zero entries, in order.
    pub fn zero_positions(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, s)| s.is_zero())
            .map(|(i, _)| i)
            .collect()
    }

    pub fn with(&self, index: usize, sign: Sign) -> SignSequence {
        let mut entries = self.0.clone();
        entries[index] = sign;
        SignSequence(entries)
    }

    /// Entrywise product: `self`'s entry where nonzero, otherwise `other`'s.
    pub fn compose(&self, other: &SignSequence) -> Result<SignSequence> {
        if self.len() != other.len() {
            return Err(Error::Shape(format!(
                "cannot compose sign sequences of lengths {} and {}",
                self.len(),
                other.len()
            )));
        }
        Ok(SignSequence(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(&a, &b)| if a.is_zero() { b } else { a })
                .collect(),
        ))
    }

    /// Face relation: `self` is a face of `other` iff composing leaves
    /// `other` unchanged. Sequences of different lengths are never faces.
    pub fn is_face_of(&self, other: &SignSequence) -> bool {
        self.len() == other.len()
            && self
                .0
                .iter()
                .zip(&other.0)
                .all(|(&a, &b)| a.is_zero() || a == b)
    }

    /// The index where two sequences differ, when they differ in exactly one entry.
    pub fn single_difference(&self, other: &SignSequence) -> Option<usize> {
        if self.len() != other.len() {
            return None;
        }
        let mut diff = self.0.iter().zip(&other.0).enumerate().filter(|(_, (a, b))| a != b);
        let first = diff.next()?.0;
        if diff.next().is_some() {
            None
        } else {
            Some(first)
        }
    }
}

/// Free-function form of [`SignSequence::compose`].
pub fn compose_signs(a: &SignSequence, b: &SignSequence) -> Result<SignSequence> {
    a.compose(b)
}

impl fmt::Display for SignSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            write!(f, "{}", s.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for SignSequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let entries = s
            .chars()
            .filter(|c| !matches!(c, ',' | ' ' | '(' | ')'))
            .map(|c| {
                Sign::from_char(c)
                    .ok_or_else(|| Error::Shape(format!("invalid sign character {c:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SignSequence(entries))
    }
}

impl Serialize for Sign {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_char(self.as_char())
    }
}

impl Serialize for SignSequence {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for SignSequence {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = String::deserialize(deserializer)?;
        raw.parse().map_err(serde::de::Error::custom)
    }
}
