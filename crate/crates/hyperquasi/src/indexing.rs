//! Partitions of the uniformity `k`, flat/multi tensor index codecs, and the
//! pairwise interleaving permutation used by the star-power symmetry checks.
//!
//! Flattening is row-major everywhere: the most significant digit comes
//! first. Every module converts between flat indices and digit tuples through
//! [`IndexCodec`] so the convention is fixed in exactly one place.

use crate::error::{Error, Result};

/// Unordered partition of `k` into at least two positive parts.
///
/// Canonical form is non-increasing, e.g. `2+1` for `k = 3`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    /// Builds a partition from parts in any order; stores them non-increasing.
    pub fn new(parts: impl Into<Vec<usize>>) -> Result<Self> {
        let mut parts = parts.into();
        if parts.len() < 2 {
            return Err(Error::InvalidPartition(format!(
                "needs at least 2 parts, got {}",
                parts.len()
            )));
        }
        if parts.contains(&0) {
            return Err(Error::InvalidPartition("parts must be positive".into()));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Partition { parts })
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// Sum of the parts.
    pub fn k(&self) -> usize {
        self.parts.iter().sum()
    }

    /// Number of parts.
    pub fn t(&self) -> usize {
        self.parts.len()
    }

    /// The canonical (non-increasing) ordering.
    pub fn canonical_ordering(&self) -> OrderedPartition {
        OrderedPartition { parts: self.parts.clone() }
    }

    /// All distinct orderings of the parts, deduplicated, in descending
    /// lexicographic order so the canonical ordering comes first.
    pub fn orderings(&self) -> Vec<OrderedPartition> {
        let mut pool = self.parts.clone();
        let mut prefix = Vec::with_capacity(pool.len());
        let mut out = Vec::new();
        distinct_permutations(&mut pool, &mut prefix, &mut out);
        out.into_iter().map(|parts| OrderedPartition { parts }).collect()
    }

    /// Renders as `k1+k2+...`, e.g. `2+1`.
    pub fn label(&self) -> String {
        join_plus(&self.parts)
    }
}

/// Ordered partition `(k1, ..., kt)` of `k`, `t >= 2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrderedPartition {
    parts: Vec<usize>,
}

impl OrderedPartition {
    pub fn new(parts: impl Into<Vec<usize>>) -> Result<Self> {
        let parts = parts.into();
        // Partition::new validates; order is preserved here.
        Partition::new(parts.clone())?;
        Ok(OrderedPartition { parts })
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn k(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn t(&self) -> usize {
        self.parts.len()
    }

    /// Forgets the order.
    pub fn unordered(&self) -> Partition {
        Partition::new(self.parts.clone()).expect("ordered partition is valid")
    }

    /// Mode dimensions `(n^k1, ..., n^kt)` of the flattened map over an
    /// `n`-dimensional base space.
    pub fn mode_dims(&self, n: usize) -> Result<Vec<usize>> {
        self.parts
            .iter()
            .map(|&ki| checked_pow(n, ki).ok_or(Error::DimOverflow { base: n, exp: ki }))
            .collect()
    }

    pub fn label(&self) -> String {
        join_plus(&self.parts)
    }
}

fn join_plus(parts: &[usize]) -> String {
    parts.iter().map(|p| p.to_string()).collect::<Vec<_>>().join("+")
}

/// `base^exp` without overflow, as usize.
pub fn checked_pow(base: usize, exp: usize) -> Option<usize> {
    let mut acc: usize = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

fn distinct_permutations(pool: &mut Vec<usize>, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if pool.is_empty() {
        out.push(prefix.clone());
        return;
    }
    // Pool is kept sorted descending, so trying positions left to right
    // emits permutations in descending lexicographic order.
    let mut last: Option<usize> = None;
    for i in 0..pool.len() {
        if last == Some(pool[i]) {
            continue;
        }
        last = Some(pool[i]);
        let v = pool.remove(i);
        prefix.push(v);
        distinct_permutations(pool, prefix, out);
        prefix.pop();
        pool.insert(i, v);
    }
}

/// All partitions of `k` into at least two parts, canonical non-increasing,
/// in descending lexicographic order.
pub fn proper_partitions(k: usize) -> Vec<Partition> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn rec(remaining: usize, max_part: usize, current: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if remaining == 0 {
            if current.len() >= 2 {
                out.push(Partition { parts: current.clone() });
            }
            return;
        }
        let hi = remaining.min(max_part);
        for part in (1..=hi).rev() {
            current.push(part);
            rec(remaining - part, part, current, out);
            current.pop();
        }
    }
    rec(k, k, &mut current, &mut out);
    out
}

/// Parses a comma-separated list of partitions like `"2+1,1+1+1"`.
pub fn parse_partition_list(s: &str) -> Result<Vec<Partition>> {
    let mut out = Vec::new();
    for (i, item) in s.split(',').enumerate() {
        let item = item.trim();
        if item.is_empty() {
            return Err(Error::Parse { line: i + 1, msg: "empty partition entry".into() });
        }
        let mut parts = Vec::new();
        for tok in item.split('+') {
            let part: usize = tok.trim().parse().map_err(|_| Error::Parse {
                line: i + 1,
                msg: format!("bad partition part {tok:?}"),
            })?;
            parts.push(part);
        }
        out.push(Partition::new(parts)?);
    }
    Ok(out)
}

/// Parses a single partition label like "2+1".
pub fn parse_partition(s: &str) -> Result<Partition> {
    let list = parse_partition_list(s)?;
    if list.len() != 1 {
        return Err(Error::InvalidPartition(format!("expected one partition, got {s:?}")));
    }
    Ok(list.into_iter().next().unwrap())
}

/// Row-major codec between flat indices in `[0, base^arity)` and digit
/// tuples of length `arity`, most significant digit first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexCodec {
    base: usize,
    arity: usize,
}

impl IndexCodec {
    pub fn new(base: usize, arity: usize) -> Result<Self> {
        checked_pow(base, arity).ok_or(Error::DimOverflow { base, exp: arity })?;
        Ok(IndexCodec { base, arity })
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Total number of flat indices, `base^arity`.
    pub fn len(&self) -> usize {
        checked_pow(self.base, self.arity).expect("validated in new")
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn encode(&self, digits: &[usize]) -> Result<usize> {
        if digits.len() != self.arity {
            return Err(Error::ArityMismatch(format!(
                "codec arity {} got {} digits",
                self.arity,
                digits.len()
            )));
        }
        let mut flat = 0usize;
        for &d in digits {
            if d >= self.base {
                return Err(Error::IndexOutOfRange { index: d as u128, dim: self.base as u128 });
            }
            flat = flat * self.base + d;
        }
        Ok(flat)
    }

    pub fn decode(&self, mut flat: usize) -> Result<Vec<usize>> {
        if flat >= self.len() {
            return Err(Error::IndexOutOfRange { index: flat as u128, dim: self.len() as u128 });
        }
        let mut digits = vec![0usize; self.arity];
        for slot in digits.iter_mut().rev() {
            *slot = flat % self.base;
            flat /= self.base;
        }
        Ok(digits)
    }

    /// Decode into a caller-provided buffer of length `arity`.
    pub fn decode_into(&self, mut flat: usize, digits: &mut [usize]) {
        debug_assert_eq!(digits.len(), self.arity);
        for slot in digits.iter_mut().rev() {
            *slot = flat % self.base;
            flat /= self.base;
        }
    }
}

/// Row-major codec between flat indices and digit tuples with per-position
/// dimensions, most significant digit first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixedCodec {
    dims: Vec<usize>,
    len: usize,
}

impl MixedCodec {
    pub fn new(dims: impl Into<Vec<usize>>) -> Result<Self> {
        let dims = dims.into();
        let mut len: usize = 1;
        for &d in &dims {
            len = len
                .checked_mul(d)
                .ok_or(Error::DimOverflow { base: d, exp: dims.len() })?;
        }
        Ok(MixedCodec { dims, len })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn encode(&self, digits: &[usize]) -> Result<usize> {
        if digits.len() != self.dims.len() {
            return Err(Error::ArityMismatch(format!(
                "codec has {} positions, got {} digits",
                self.dims.len(),
                digits.len()
            )));
        }
        let mut flat = 0usize;
        for (&d, &dim) in digits.iter().zip(&self.dims) {
            if d >= dim {
                return Err(Error::IndexOutOfRange { index: d as u128, dim: dim as u128 });
            }
            flat = flat * dim + d;
        }
        Ok(flat)
    }

    pub fn decode(&self, flat: usize) -> Result<Vec<usize>> {
        if flat >= self.len {
            return Err(Error::IndexOutOfRange { index: flat as u128, dim: self.len as u128 });
        }
        let mut digits = vec![0usize; self.dims.len()];
        self.decode_into(flat, &mut digits);
        Ok(digits)
    }

    pub fn decode_into(&self, mut flat: usize, digits: &mut [usize]) {
        debug_assert_eq!(digits.len(), self.dims.len());
        for (slot, &dim) in digits.iter_mut().zip(&self.dims).rev() {
            *slot = flat % dim;
            flat /= dim;
        }
    }
}

/// Applies the level-`s` interleaving swap to a flat index over
/// `mode_dim^(2^s)`: the digit string `(i1, j1, ..., i_{2^{s-1}}, j_{2^{s-1}})`
/// becomes `(j1, i1, ..., j_{2^{s-1}}, i_{2^{s-1}})`. Level 0 is the identity.
pub fn gamma_apply(s: usize, mode_dim: usize, x: usize) -> Result<usize> {
    if s == 0 {
        let dim = mode_dim;
        if x >= dim {
            return Err(Error::IndexOutOfRange { index: x as u128, dim: dim as u128 });
        }
        return Ok(x);
    }
    let order = 1usize << s;
    let codec = IndexCodec::new(mode_dim, order)?;
    let mut digits = codec.decode(x)?;
    for pair in digits.chunks_exact_mut(2) {
        pair.swap(0, 1);
    }
    codec.encode(&digits)
}
