//! Cycle gadgets: step, path, and glued cycle hypergraphs for a partition shape.
//!
//! Vertex layout of a step for ordering (k1, ..., kt):
//!   class A: 2^(t-1) code slots (binary codes of length t-1, MSB first), k1 copies each;
//!   class B_j for j = 2..=t: 2^(t-2) code slots (codes of length t-2), k_j copies each.
//! Ids are dense: A block first (code-major, copy-minor), then B_2, ..., B_t blocks.
//! One edge per A code `a`: all copies of `a` plus, for each j, all copies of the
//! B_j slot whose code is `a` with bit j-1 removed (bits counted from the MSB).
//! Attachment tuples list A slots whose code ends in 0 (resp. 1), codes ascending,
//! copies in index order; both tuples have length k1 * 2^(t-2) and are disjoint.

use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::indexing::{OrderedPartition, Partition};

/// A hypergraph with two equal-length, disjoint tuples of boundary vertices.
#[derive(Debug, Clone)]
pub struct Gadget {
    pub hypergraph: Hypergraph,
    pub attach0: Vec<u32>,
    pub attach1: Vec<u32>,
}

impl Gadget {
    /// Checks the boundary-tuple invariants; construction keeps them true.
    pub fn check(&self) -> Result<()> {
        if self.attach0.len() != self.attach1.len() {
            return Err(Error::DimMismatch(format!(
                "attachment tuples have lengths {} and {}",
                self.attach0.len(),
                self.attach1.len()
            )));
        }
        let n = self.hypergraph.n() as u32;
        let mut seen = vec![false; n as usize];
        for &v in self.attach0.iter().chain(self.attach1.iter()) {
            if v >= n {
                return Err(Error::OutOfRangeVertex { vertex: v, n: self.hypergraph.n() as u32 });
            }
            if seen[v as usize] {
                return Err(Error::DimMismatch(format!("attachment vertex {v} repeated")));
            }
            seen[v as usize] = true;
        }
        Ok(())
    }
}

/// Removes the 1-indexed `pos`-th bit (from the MSB) of a `width`-bit code.
fn drop_bit(code: usize, width: usize, pos: usize) -> usize {
    debug_assert!(pos >= 1 && pos <= width);
    let low_bits = width - pos;
    let lower = code & ((1usize << low_bits) - 1);
    let upper = code >> (low_bits + 1);
    (upper << low_bits) | lower
}

/// Single step gadget for an ordering; 2^(t-1) edges of size k.
pub fn step(pi: &OrderedPartition) -> Result<Gadget> {
    let t = pi.t();
    let parts = pi.parts();
    let k1 = parts[0];
    let a_codes = 1usize << (t - 1);
    let b_codes = 1usize << (t - 2);

    let a_id = |code: usize, copy: usize| (code * k1 + copy) as u32;
    let mut class_offsets = Vec::with_capacity(t);
    let mut next = a_codes * k1;
    for &kj in &parts[1..] {
        class_offsets.push(next);
        next += b_codes * kj;
    }
    let n = next;

    let mut edges = Vec::with_capacity(a_codes);
    for code in 0..a_codes {
        let mut edge: Vec<u32> = (0..k1).map(|c| a_id(code, c)).collect();
        for (j, &kj) in parts[1..].iter().enumerate() {
            let b_code = drop_bit(code, t - 1, j + 1);
            let base = class_offsets[j] + b_code * kj;
            edge.extend((0..kj).map(|c| (base + c) as u32));
        }
        edges.push(edge);
    }

    let boundary = |parity: usize| -> Vec<u32> {
        (0..a_codes)
            .filter(|c| c & 1 == parity)
            .flat_map(|c| (0..k1).map(move |copy| a_id(c, copy)))
            .collect()
    };

    let gadget = Gadget {
        hypergraph: Hypergraph::new(n, pi.k(), edges)?,
        attach0: boundary(0),
        attach1: boundary(1),
    };
    debug_assert!(gadget.check().is_ok());
    Ok(gadget)
}

/// Chain of `ell` steps; step i+1's attach0 tuple is glued onto step i's attach1.
pub fn path(pi: &OrderedPartition, ell: usize) -> Result<Gadget> {
    if ell < 1 {
        return Err(Error::LengthTooShort { got: ell, min: 1 });
    }
    let s = step(pi)?;
    let step_n = s.hypergraph.n();
    let mut n = step_n;
    let mut edges: Vec<Vec<u32>> = s.hypergraph.edges().to_vec();
    let attach0 = s.attach0.clone();
    let mut attach1 = s.attach1.clone();

    for _ in 1..ell {
        let mut map = vec![u32::MAX; step_n];
        for (i, &v) in s.attach0.iter().enumerate() {
            map[v as usize] = attach1[i];
        }
        let mut fresh = n as u32;
        for slot in map.iter_mut() {
            if *slot == u32::MAX {
                *slot = fresh;
                fresh += 1;
            }
        }
        for e in s.hypergraph.edges() {
            edges.push(e.iter().map(|&v| map[v as usize]).collect());
        }
        attach1 = s.attach1.iter().map(|&v| map[v as usize]).collect();
        n = fresh as usize;
    }

    let gadget = Gadget { hypergraph: Hypergraph::new(n, pi.k(), edges)?, attach0, attach1 };
    debug_assert!(gadget.check().is_ok());
    Ok(gadget)
}

/// Cycle of even length 2*ell >= 4 built by gluing the two ends of a path.
/// Every vertex lies in exactly two edges; |E| = ell * 2^(t-1), |V| = |E| * k / 2.
pub fn cycle_of_ordering(pi: &OrderedPartition, length: usize) -> Result<Hypergraph> {
    if !length.is_multiple_of(2) {
        return Err(Error::OddLength(length));
    }
    if length < 4 {
        return Err(Error::LengthTooShort { got: length, min: 4 });
    }
    let p = path(pi, length / 2)?;
    let n = p.hypergraph.n();

    let mut map: Vec<u32> = (0..n as u32).collect();
    for (i, &v) in p.attach1.iter().enumerate() {
        map[v as usize] = p.attach0[i];
    }
    let mut dense = vec![u32::MAX; n];
    let mut kept = 0u32;
    for v in 0..n {
        if map[v] == v as u32 {
            dense[v] = kept;
            kept += 1;
        }
    }
    let edges: Vec<Vec<u32>> = p
        .hypergraph
        .edges()
        .iter()
        .map(|e| e.iter().map(|&v| dense[map[v as usize] as usize]).collect())
        .collect();
    Hypergraph::new(kept as usize, pi.k(), edges)
}

/// Cycle gadget for an unordered partition, using its canonical ordering.
pub fn cycle(pi: &Partition, length: usize) -> Result<Hypergraph> {
    cycle_of_ordering(&pi.canonical_ordering(), length)
}
