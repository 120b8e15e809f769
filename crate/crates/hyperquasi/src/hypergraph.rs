//! Uniform hypergraphs with loops: canonical representation, seeded random
//! and planted-bias generators, and bit-exact text I/O.
//!
//! Generator contract, fixed for fixture reproducibility: ChaCha8 seeded via
//! `seed_from_u64`, admissible k-(multi)sets visited in lexicographic order,
//! exactly one uniform f64 drawn per set.

use std::collections::HashSet;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// A k-uniform hypergraph with loops. Edges are k-multisets of vertex ids,
/// stored as non-decreasing sequences, with the edge list itself sorted
/// lexicographically and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph {
    n: usize,
    k: usize,
    edges: Vec<Vec<u32>>,
    edge_set: HashSet<Vec<u32>>,
}

impl Hypergraph {
    pub fn new(n: usize, k: usize, edges: impl IntoIterator<Item = Vec<u32>>) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidUniformity(k));
        }
        let mut canon: Vec<Vec<u32>> = Vec::new();
        for mut edge in edges {
            if edge.len() != k {
                return Err(Error::WrongArity { got: edge.len(), expected: k });
            }
            for &v in &edge {
                if v as usize >= n {
                    return Err(Error::OutOfRangeVertex { vertex: v, n: n as u32 });
                }
            }
            edge.sort_unstable();
            canon.push(edge);
        }
        canon.sort_unstable();
        canon.dedup();
        let edge_set = canon.iter().cloned().collect();
        Ok(Hypergraph { n, k, edges: canon, edge_set })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Edges in lexicographic order, each sorted non-decreasing.
    pub fn edges(&self) -> &[Vec<u32>] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Membership test for an already-sorted edge.
    pub fn contains_edge(&self, edge: &[u32]) -> bool {
        debug_assert!(edge.windows(2).all(|w| w[0] <= w[1]));
        self.edge_set.contains(edge)
    }

    /// Adjacency indicator on an ordered vertex tuple: 1 exactly when the
    /// multiset of entries is an edge. `scratch` avoids per-call allocation.
    pub fn is_adjacent(&self, tuple: &[u32], scratch: &mut Vec<u32>) -> bool {
        scratch.clear();
        scratch.extend_from_slice(tuple);
        scratch.sort_unstable();
        self.edge_set.contains(scratch.as_slice())
    }

    /// |E| / (number of admissible sets), the empirical density.
    pub fn density(&self, allow_loops: bool) -> f64 {
        let total = admissible_count(self.n, self.k, allow_loops)
            .expect("admissible count fits u128 for constructed hypergraphs");
        self.edges.len() as f64 / total as f64
    }

    /// True when some edge repeats a vertex.
    pub fn has_loops(&self) -> bool {
        self.edges.iter().any(|e| e.windows(2).any(|w| w[0] == w[1]))
    }
}

/// Parameters for the seeded generators.
#[derive(Debug, Clone, PartialEq)]
pub struct GenSpec {
    pub n: usize,
    pub k: usize,
    pub p: f64,
    pub seed: u64,
    pub allow_loops: bool,
    pub bias: Option<f64>,
}

impl GenSpec {
    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::InvalidUniformity(self.k));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::InvalidGenSpec(format!("p = {} outside [0, 1]", self.p)));
        }
        if !self.allow_loops && self.n < self.k {
            return Err(Error::InvalidGenSpec(format!(
                "n = {} < k = {} without loops",
                self.n, self.k
            )));
        }
        if let Some(delta) = self.bias {
            if delta < 0.0 {
                return Err(Error::InvalidGenSpec(format!("bias = {delta} negative")));
            }
        }
        Ok(())
    }
}

/// Binomial coefficient C(n, k) in u128, None on overflow.
pub fn binomial(n: usize, k: usize) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k {
        acc = acc.checked_mul((n - k + i) as u128)?;
        acc /= i as u128;
    }
    Some(acc)
}

/// Number of admissible edges: C(n, k) plain, C(n+k-1, k) with loops.
pub fn admissible_count(n: usize, k: usize, allow_loops: bool) -> Option<u128> {
    if allow_loops {
        binomial(n + k - 1, k)
    } else {
        binomial(n, k)
    }
}

/// Visits admissible k-(multi)sets over [0, n) in lexicographic order.
fn for_each_admissible(
    n: usize,
    k: usize,
    allow_loops: bool,
    mut f: impl FnMut(&[u32]),
) {
    if allow_loops {
        if n == 0 {
            return;
        }
        let mut cur: Vec<u32> = vec![0; k];
        loop {
            f(&cur);
            let mut i = k;
            while i > 0 && cur[i - 1] as usize == n - 1 {
                i -= 1;
            }
            if i == 0 {
                return;
            }
            let v = cur[i - 1] + 1;
            for slot in &mut cur[i - 1..] {
                *slot = v;
            }
        }
    } else {
        if n < k {
            return;
        }
        let mut cur: Vec<u32> = (0..k as u32).collect();
        loop {
            f(&cur);
            let mut i = k;
            while i > 0 && cur[i - 1] as usize == n - k + i - 1 {
                i -= 1;
            }
            if i == 0 {
                return;
            }
            cur[i - 1] += 1;
            for j in i..k {
                cur[j] = cur[j - 1] + 1;
            }
        }
    }
}

/// Binomial random hypergraph: each admissible set kept independently with
/// probability p. Deterministic under the seed.
pub fn gen_random(spec: &GenSpec) -> Result<Hypergraph> {
    spec.validate()?;
    if spec.bias.is_some() {
        return Err(Error::InvalidGenSpec("bias set; use gen_planted_bias".into()));
    }
    gen_with_probability(spec, |_| spec.p)
}

/// Planted-bias hypergraph: vertices split into halves L = [0, ceil(n/2))
/// and R; sets within a half kept with probability p + delta, crossing sets
/// with p - delta*c where c is the within/crossing count ratio, so the
/// expected overall density stays p.
pub fn gen_planted_bias(spec: &GenSpec) -> Result<Hypergraph> {
    spec.validate()?;
    let delta = spec
        .bias
        .ok_or_else(|| Error::InvalidGenSpec("bias absent; use gen_random".into()))?;
    if spec.p + delta > 1.0 || spec.p - delta < 0.0 {
        return Err(Error::BiasOutOfRange(format!(
            "p = {}, delta = {delta}",
            spec.p
        )));
    }
    let half = spec.n.div_ceil(2);
    let within = {
        let left = admissible_count(half, spec.k, spec.allow_loops).unwrap_or(u128::MAX);
        let right =
            admissible_count(spec.n - half, spec.k, spec.allow_loops).unwrap_or(u128::MAX);
        left + right
    };
    let total = admissible_count(spec.n, spec.k, spec.allow_loops)
        .ok_or_else(|| Error::InvalidGenSpec("admissible set count overflows".into()))?;
    let crossing = total - within;
    if crossing == 0 {
        return Err(Error::InvalidGenSpec("no crossing sets to bias against".into()));
    }
    let c = within as f64 / crossing as f64;
    let p_within = spec.p + delta;
    let p_cross = spec.p - delta * c;
    if !(0.0..=1.0).contains(&p_cross) {
        return Err(Error::BiasOutOfRange(format!(
            "crossing probability {p_cross} outside [0, 1]"
        )));
    }
    let boundary = half as u32;
    gen_with_probability(spec, move |set: &[u32]| {
        let first_in_l = set[0] < boundary;
        if set.iter().all(|&v| (v < boundary) == first_in_l) {
            p_within
        } else {
            p_cross
        }
    })
}

/// Loop-free complete graph K_n.
pub fn complete_graph(n: usize) -> Hypergraph {
    let mut edges = Vec::new();
    for i in 0..n as u32 {
        for j in i + 1..n as u32 {
            edges.push(vec![i, j]);
        }
    }
    Hypergraph::new(n, 2, edges).expect("complete graph edges are valid")
}

/// Dispatches on presence of bias.
pub fn generate(spec: &GenSpec) -> Result<Hypergraph> {
    if spec.bias.is_some() {
        gen_planted_bias(spec)
    } else {
        gen_random(spec)
    }
}

fn gen_with_probability(spec: &GenSpec, prob: impl Fn(&[u32]) -> f64) -> Result<Hypergraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut edges = Vec::new();
    for_each_admissible(spec.n, spec.k, spec.allow_loops, |set| {
        let u: f64 = rng.random();
        if u < prob(set) {
            edges.push(set.to_vec());
        }
    });
    Hypergraph::new(spec.n, spec.k, edges)
}

/// Renders the text format: header "k n", then one sorted edge per line,
/// lines in lexicographic order.
pub fn write_hypergraph(h: &Hypergraph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", h.k, h.n);
    for edge in &h.edges {
        let mut first = true;
        for v in edge {
            if !first {
                out.push(' ');
            }
            let _ = write!(out, "{v}");
            first = false;
        }
        out.push('\n');
    }
    out
}

/// Parses the text format. Lines starting with '#' and blank lines are
/// ignored; edge entries need not be pre-sorted.
pub fn read_hypergraph(text: &str) -> Result<Hypergraph> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges: Vec<Vec<u32>> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match header {
            None => {
                if tokens.len() != 2 {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: format!("header needs \"k n\", got {} tokens", tokens.len()),
                    });
                }
                let k: usize = tokens[0].parse().map_err(|_| Error::Parse {
                    line: line_no,
                    msg: format!("bad uniformity {:?}", tokens[0]),
                })?;
                let n: usize = tokens[1].parse().map_err(|_| Error::Parse {
                    line: line_no,
                    msg: format!("bad vertex count {:?}", tokens[1]),
                })?;
                if k < 2 {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: format!("uniformity must be at least 2, got {k}"),
                    });
                }
                header = Some((k, n));
            }
            Some((k, n)) => {
                if tokens.len() != k {
                    return Err(Error::HeaderMismatch {
                        line: line_no,
                        msg: format!("edge has {} entries, header declares k = {k}", tokens.len()),
                    });
                }
                let mut edge = Vec::with_capacity(k);
                for tok in tokens {
                    let v: u32 = tok.parse().map_err(|_| Error::Parse {
                        line: line_no,
                        msg: format!("bad vertex id {tok:?}"),
                    })?;
                    if v as usize >= n {
                        return Err(Error::HeaderMismatch {
                            line: line_no,
                            msg: format!("vertex {v} outside declared n = {n}"),
                        });
                    }
                    edge.push(v);
                }
                edges.push(edge);
            }
        }
    }
    let (k, n) = header.ok_or(Error::Parse { line: 1, msg: "missing header".into() })?;
    Hypergraph::new(n, k, edges)
}
