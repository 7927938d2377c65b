//! Symmetric finitely supported sequences on `Z^d`, index sets in the
//! positive half-lattice, and sign-support cone membership.
//!
//! A sequence is stored by canonical representatives only: the value at `-n`
//! is defined to be the value at `n`, so symmetry cannot be broken by
//! construction. The canonical half is `{0} ∪ Z₊^d`, where `Z₊^d` is the set
//! of multi-indices whose first nonzero coordinate is positive.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::de::Error as SerdeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::ConeDualError;

/// A point of `Z^d`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(pub Vec<i64>);

impl MultiIndex {
    pub fn new(coords: Vec<i64>) -> Self {
        assert!(!coords.is_empty(), "dimension must be at least 1");
        MultiIndex(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// True iff the first nonzero coordinate is strictly positive.
    pub fn is_positive(&self) -> bool {
        match self.0.iter().find(|&&c| c != 0) {
            Some(&c) => c > 0,
            None => false,
        }
    }

    pub fn negate(&self) -> MultiIndex {
        MultiIndex(self.0.iter().map(|&c| -c).collect())
    }

    /// Canonical representative of `{n, -n}`: the one in `{0} ∪ Z₊^d`.
    pub fn canonical(&self) -> MultiIndex {
        if self.is_zero() || self.is_positive() {
            self.clone()
        } else {
            self.negate()
        }
    }

    pub fn norm2(&self) -> f64 {
        self.0.iter().map(|&c| (c as f64) * (c as f64)).sum::<f64>().sqrt()
    }

    /// `n · x` for a torus point `x`.
    pub fn dot(&self, x: &[f64]) -> f64 {
        self.0.iter().zip(x).map(|(&n, &xi)| n as f64 * xi).sum()
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// A finite subset of `Z₊^d`. The zero index is never a member.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IndexSet {
    elements: BTreeSet<MultiIndex>,
}

impl IndexSet {
    pub fn empty() -> Self {
        IndexSet::default()
    }

    pub fn new(elements: impl IntoIterator<Item = MultiIndex>) -> Result<Self, ConeDualError> {
        let mut set = BTreeSet::new();
        for n in elements {
            if !n.is_positive() {
                return Err(ConeDualError::InvalidIndexSet(format!(
                    "index ({n}) is not in the positive half-lattice"
                )));
            }
            set.insert(n);
        }
        Ok(IndexSet { elements: set })
    }

    pub fn contains(&self, n: &MultiIndex) -> bool {
        self.elements.contains(n)
    }

    pub fn iter(&self) -> impl Iterator<Item = &MultiIndex> {
        self.elements.iter()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn union(&self, other: &IndexSet) -> IndexSet {
        IndexSet {
            elements: self.elements.union(&other.elements).cloned().collect(),
        }
    }
}

/// Where an index sits relative to a sign-support pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignRegion {
    /// `n ∈ M ∩ L`: both supports allowed, value free.
    Free,
    /// `n ∈ M \ L`: only the positive support allowed.
    Nonnegative,
    /// `n ∈ L \ M`: only the negative support allowed.
    Nonpositive,
    /// `n ∉ M ∪ L`: not in either allowed support.
    Forbidden,
}

/// The pair `(M, L)` of allowed supports for the positive and negative parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignSupportPattern {
    pub m: IndexSet,
    pub l: IndexSet,
}

impl SignSupportPattern {
    pub fn new(m: IndexSet, l: IndexSet) -> Self {
        SignSupportPattern { m, l }
    }

    /// Classifies a canonical nonzero index.
    pub fn region(&self, n: &MultiIndex) -> SignRegion {
        match (self.m.contains(n), self.l.contains(n)) {
            (true, true) => SignRegion::Free,
            (true, false) => SignRegion::Nonnegative,
            (false, true) => SignRegion::Nonpositive,
            (false, false) => SignRegion::Forbidden,
        }
    }

    pub fn support_union(&self) -> IndexSet {
        self.m.union(&self.l)
    }
}

/// Finitely supported symmetric real sequence on `Z^d`.
///
/// Entries are keyed by canonical representatives; `value_at` resolves `-n`
/// to `n` and returns 0 outside the stored support.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricSequence {
    dim: usize,
    entries: BTreeMap<MultiIndex, f64>,
}

impl SymmetricSequence {
    pub fn zero(dim: usize) -> Self {
        assert!(dim >= 1);
        SymmetricSequence {
            dim,
            entries: BTreeMap::new(),
        }
    }

    /// The indicator of the origin, `χ_{{0}}`.
    pub fn delta(dim: usize) -> Self {
        let mut s = SymmetricSequence::zero(dim);
        s.set(MultiIndex::new(vec![0; dim]), 1.0);
        s
    }

    /// Convenience constructor for `d = 1` from values at `0, 1, ..., m`.
    pub fn from_half_values(values: &[f64]) -> Self {
        let mut s = SymmetricSequence::zero(1);
        for (k, &v) in values.iter().enumerate() {
            s.set(MultiIndex::new(vec![k as i64]), v);
        }
        s
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Sets the value at `n` (and implicitly at `-n`). A zero value removes
    /// the entry so the stored support stays minimal.
    pub fn set(&mut self, n: MultiIndex, value: f64) {
        assert_eq!(n.dim(), self.dim, "index dimension mismatch");
        let key = n.canonical();
        if value == 0.0 {
            self.entries.remove(&key);
        } else {
            self.entries.insert(key, value);
        }
    }

    pub fn value_at(&self, n: &MultiIndex) -> f64 {
        self.entries.get(&n.canonical()).copied().unwrap_or(0.0)
    }

    pub fn value_at_origin(&self) -> f64 {
        self.entries
            .get(&MultiIndex::new(vec![0; self.dim]))
            .copied()
            .unwrap_or(0.0)
    }

    /// Canonical support entries, origin included when present.
    pub fn entries(&self) -> impl Iterator<Item = (&MultiIndex, f64)> {
        self.entries.iter().map(|(n, &v)| (n, v))
    }

    /// Canonical support entries with the origin excluded.
    pub fn positive_entries(&self) -> impl Iterator<Item = (&MultiIndex, f64)> {
        self.entries().filter(|(n, _)| !n.is_zero())
    }

    pub fn support_radius(&self) -> i64 {
        self.entries
            .keys()
            .flat_map(|n| n.0.iter().map(|c| c.abs()))
            .max()
            .unwrap_or(0)
    }

    /// `Σ_{n∈Z^d} |f(n)|`.
    pub fn l1_norm(&self) -> f64 {
        let mut norm = self.value_at_origin().abs();
        for (_, v) in self.positive_entries() {
            norm += 2.0 * v.abs();
        }
        norm
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entrywise sum; dimensions must agree.
    pub fn add(&self, other: &SymmetricSequence) -> Result<SymmetricSequence, ConeDualError> {
        check_dim(self, other)?;
        let mut out = self.clone();
        for (n, v) in other.entries() {
            out.set(n.clone(), out.value_at(n) + v);
        }
        Ok(out)
    }

    pub fn scale(&self, c: f64) -> SymmetricSequence {
        let mut out = SymmetricSequence::zero(self.dim);
        for (n, v) in self.entries() {
            out.set(n.clone(), c * v);
        }
        out
    }
}

fn check_dim(a: &SymmetricSequence, b: &SymmetricSequence) -> Result<(), ConeDualError> {
    if a.dim() != b.dim() {
        Err(ConeDualError::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        })
    } else {
        Ok(())
    }
}

/// The duality pairing `Σ_{n∈Z^d} f(n) h(n)`, evaluated over canonical
/// representatives as `f(0)h(0) + 2 Σ_{n∈Z₊^d} f(n)h(n)`.
pub fn pairing(f: &SymmetricSequence, h: &SymmetricSequence) -> Result<f64, ConeDualError> {
    check_dim(f, h)?;
    let mut sum = f.value_at_origin() * h.value_at_origin();
    for (n, v) in f.positive_entries() {
        sum += 2.0 * v * h.value_at(n);
    }
    Ok(sum)
}

/// Membership in the sign-support cone `C`: the positive part of `f` is
/// supported in `{0} ∪ ±M` and the negative part in `{0} ∪ ±L`.
pub fn in_cone_c(
    f: &SymmetricSequence,
    pattern: &SignSupportPattern,
) -> Result<bool, ConeDualError> {
    check_pattern_dim(f, pattern)?;
    for (n, v) in f.positive_entries() {
        let ok = match pattern.region(n) {
            SignRegion::Free => true,
            SignRegion::Nonnegative => v >= 0.0,
            SignRegion::Nonpositive => v <= 0.0,
            SignRegion::Forbidden => v == 0.0,
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Membership in the polar cone `C⁻`: positive values must avoid `±M`,
/// negative values must avoid `±L`, and the origin value must vanish.
pub fn in_polar_cone_c_minus(
    t: &SymmetricSequence,
    pattern: &SignSupportPattern,
) -> Result<bool, ConeDualError> {
    check_pattern_dim(t, pattern)?;
    if t.value_at_origin() != 0.0 {
        return Ok(false);
    }
    for (n, v) in t.positive_entries() {
        let ok = match pattern.region(n) {
            SignRegion::Free => v == 0.0,
            SignRegion::Nonnegative => v <= 0.0,
            SignRegion::Nonpositive => v >= 0.0,
            SignRegion::Forbidden => true,
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

fn check_pattern_dim(
    f: &SymmetricSequence,
    pattern: &SignSupportPattern,
) -> Result<(), ConeDualError> {
    for n in pattern.m.iter().chain(pattern.l.iter()) {
        if n.dim() != f.dim() {
            return Err(ConeDualError::DimensionMismatch {
                expected: f.dim(),
                found: n.dim(),
            });
        }
    }
    Ok(())
}

// Sequence literal format: {"dim": 1, "entries": {"0": 1.0, "1": 0.5}} with
// comma-joined canonical index keys; symmetry implied.

#[derive(Serialize, Deserialize)]
struct SequenceLiteral {
    dim: usize,
    entries: BTreeMap<String, f64>,
}

impl Serialize for SymmetricSequence {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let entries = self
            .entries()
            .map(|(n, v)| (n.to_string(), v))
            .collect::<BTreeMap<_, _>>();
        SequenceLiteral {
            dim: self.dim,
            entries,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SymmetricSequence {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let lit = SequenceLiteral::deserialize(deserializer)?;
        if lit.dim == 0 {
            return Err(D::Error::custom("sequence dimension must be at least 1"));
        }
        let mut s = SymmetricSequence::zero(lit.dim);
        for (key, value) in lit.entries {
            let coords: Result<Vec<i64>, _> =
                key.split(',').map(|p| p.trim().parse::<i64>()).collect();
            let coords = coords.map_err(|e| D::Error::custom(format!("bad index `{key}`: {e}")))?;
            if coords.len() != lit.dim {
                return Err(D::Error::custom(format!(
                    "index `{key}` has {} coordinates, expected {}",
                    coords.len(),
                    lit.dim
                )));
            }
            let n = MultiIndex::new(coords);
            if !(n.is_zero() || n.is_positive()) {
                return Err(D::Error::custom(format!(
                    "index `{key}` is not a canonical representative"
                )));
            }
            s.set(n, value);
        }
        Ok(s)
    }
}
