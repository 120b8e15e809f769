//! Exact circuit counting: traces of powers of the symmetric flattening on one
//! side, brute-force homomorphism enumeration on the other. All counts are
//! checked i128 arithmetic; overflow surfaces as an error, never wraps.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::indexing::{OrderedPartition, Partition};
use crate::multilinear::{a_values, flatten_as, Budget};

/// Circuit census for one cycle shape against a null-model expectation.
/// `length` is the cycle length 2*l; `m = l * 2^(t-1)` is its edge count.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CountReport {
    pub circuits: i128,
    pub expected: f64,
    pub ratio: f64,
    pub m: usize,
    pub length: usize,
}

fn checked_dot(a: &[i128], b: &[i128]) -> Result<i128> {
    let mut acc: i128 = 0;
    for (&x, &y) in a.iter().zip(b) {
        acc = x.checked_mul(y).and_then(|p| acc.checked_add(p)).ok_or(Error::CountOverflow)?;
    }
    Ok(acc)
}

/// Checked product of two symmetric dim x dim matrices stored row-major.
fn sym_mat_mul(dim: usize, a: &[i128], b: &[i128]) -> Result<Vec<i128>> {
    let mut out = vec![0i128; dim * dim];
    out.par_chunks_mut(dim)
        .enumerate()
        .try_for_each(|(r, row)| -> Result<()> {
            for c in 0..dim {
                let mut acc: i128 = 0;
                for j in 0..dim {
                    acc = a[r * dim + j]
                        .checked_mul(b[c * dim + j])
                        .and_then(|p| acc.checked_add(p))
                        .ok_or(Error::CountOverflow)?;
                }
                row[c] = acc;
            }
            Ok(())
        })?;
    Ok(out)
}

/// tr(A^l) for the symmetric matrix of the 2^(t-1)-th power map; counts labeled
/// circuits of length 2l. Budget covers the power tensors plus work matrices.
pub fn circuit_count_trace(
    h: &Hypergraph,
    pi: &OrderedPartition,
    ell: usize,
    budget: &Budget,
) -> Result<i128> {
    if ell < 2 {
        return Err(Error::LengthTooShort { got: ell, min: 2 });
    }
    let tau = flatten_as::<i128>(h, pi)?;
    let (dim, a) = a_values::<i128>(&tau, budget)?;
    budget.charge((dim as u128).saturating_mul(dim as u128).saturating_mul(2))?;

    let half = ell / 2;
    let mut b = a.clone();
    for _ in 1..half {
        b = sym_mat_mul(dim, &b, &a)?;
    }
    if ell.is_multiple_of(2) {
        checked_dot(&b, &b)
    } else {
        let c = sym_mat_mul(dim, &b, &a)?;
        checked_dot(&b, &c)
    }
}

/// Vertex order that completes edges as early as possible, plus for each
/// position the edges whose last vertex lands there.
fn elimination_order(f: &Hypergraph) -> (Vec<usize>, Vec<Vec<usize>>) {
    let nf = f.n();
    let mut position = vec![usize::MAX; nf];
    let mut order = Vec::with_capacity(nf);
    let mut edge_done = vec![false; f.edge_count()];
    let place = |v: usize, position: &mut Vec<usize>, order: &mut Vec<usize>| {
        if position[v] == usize::MAX {
            position[v] = order.len();
            order.push(v);
        }
    };
    loop {
        let mut best: Option<(usize, usize)> = None;
        for (i, e) in f.edges().iter().enumerate() {
            if edge_done[i] {
                continue;
            }
            let placed = e.iter().filter(|&&v| position[v as usize] != usize::MAX).count();
            if best.is_none_or(|(bp, _)| placed > bp) {
                best = Some((placed, i));
            }
        }
        match best {
            Some((_, i)) => {
                for &v in &f.edges()[i] {
                    place(v as usize, &mut position, &mut order);
                }
                edge_done[i] = true;
            }
            None => break,
        }
    }
    for v in 0..nf {
        place(v, &mut position, &mut order);
    }
    let mut check_at = vec![Vec::new(); nf];
    for (i, e) in f.edges().iter().enumerate() {
        let last = e.iter().map(|&v| position[v as usize]).max().unwrap();
        check_at[last].push(i);
    }
    (order, check_at)
}

struct MapSearch<'a> {
    f: &'a Hypergraph,
    h: &'a Hypergraph,
    order: Vec<usize>,
    check_at: Vec<Vec<usize>>,
    injective: bool,
}

impl MapSearch<'_> {
    fn edges_ok(&self, pos: usize, image: &[u32], scratch: &mut Vec<u32>) -> bool {
        self.check_at[pos].iter().all(|&i| {
            scratch.clear();
            scratch.extend(self.f.edges()[i].iter().map(|&v| image[v as usize]));
            scratch.sort_unstable();
            self.h.contains_edge(scratch)
        })
    }

    fn dfs(
        &self,
        pos: usize,
        image: &mut Vec<u32>,
        used: &mut Vec<bool>,
        scratch: &mut Vec<u32>,
    ) -> Result<i128> {
        if pos == self.order.len() {
            return Ok(1);
        }
        let mut total: i128 = 0;
        let v = self.order[pos];
        for img in 0..self.h.n() as u32 {
            if self.injective && used[img as usize] {
                continue;
            }
            image[v] = img;
            if self.edges_ok(pos, image, scratch) {
                if self.injective {
                    used[img as usize] = true;
                }
                let sub = self.dfs(pos + 1, image, used, scratch)?;
                total = total.checked_add(sub).ok_or(Error::CountOverflow)?;
                if self.injective {
                    used[img as usize] = false;
                }
            }
        }
        Ok(total)
    }

    fn run(&self) -> Result<i128> {
        if self.order.is_empty() {
            return Ok(1);
        }
        let first = self.order[0];
        let parts: Vec<Result<i128>> = (0..self.h.n() as u32)
            .into_par_iter()
            .map(|img| {
                let mut image = vec![0u32; self.f.n()];
                let mut used = vec![false; self.h.n()];
                let mut scratch = Vec::with_capacity(self.f.k());
                image[first] = img;
                if !self.edges_ok(0, &image, &mut scratch) {
                    return Ok(0);
                }
                if self.injective {
                    used[img as usize] = true;
                }
                self.dfs(1, &mut image, &mut used, &mut scratch)
            })
            .collect();
        let mut total: i128 = 0;
        for p in parts {
            total = total.checked_add(p?).ok_or(Error::CountOverflow)?;
        }
        Ok(total)
    }
}

fn charge_map_space(f: &Hypergraph, h: &Hypergraph, budget: &Budget) -> Result<()> {
    let mut space: u128 = 1;
    for _ in 0..f.n() {
        space = space.saturating_mul(h.n() as u128);
    }
    budget.charge(space)
}

/// Number of edge-preserving vertex maps V(F) -> V(H), by pruned enumeration.
/// The budget is charged with n(H)^|V(F)| candidate maps up front.
pub fn hom_count_bruteforce(f: &Hypergraph, h: &Hypergraph, budget: &Budget) -> Result<i128> {
    charge_map_space(f, h, budget)?;
    let (order, check_at) = elimination_order(f);
    MapSearch { f, h, order, check_at, injective: false }.run()
}

/// Number of injective edge-preserving maps V(F) -> V(H).
pub fn labeled_copy_count_bruteforce(
    f: &Hypergraph,
    h: &Hypergraph,
    budget: &Budget,
) -> Result<i128> {
    if f.n() > h.n() {
        return Ok(0);
    }
    charge_map_space(f, h, budget)?;
    let (order, check_at) = elimination_order(f);
    MapSearch { f, h, order, check_at, injective: true }.run()
}

/// Circuits of length 4l for the canonical ordering of `pi`, compared with the
/// null expectation p^m * n^(m*k/2) where m = 2l * 2^(t-1) edges.
pub fn cycle_deviation(
    h: &Hypergraph,
    pi: &Partition,
    ell: usize,
    p: f64,
    budget: &Budget,
) -> Result<CountReport> {
    if ell < 1 {
        return Err(Error::LengthTooShort { got: ell, min: 1 });
    }
    let ordering = pi.canonical_ordering();
    let circuits = circuit_count_trace(h, &ordering, 2 * ell, budget)?;
    let t = pi.t();
    let m = 2 * ell * (1usize << (t - 1));
    let expected = p.powi(m as i32) * (h.n() as f64).powf(m as f64 * h.k() as f64 / 2.0);
    let ratio = if expected > 0.0 {
        circuits as f64 / expected
    } else if circuits == 0 {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(CountReport { circuits, expected, ratio, m, length: 4 * ell })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadgets::cycle;
    use crate::hypergraph::{generate, GenSpec};

    fn triangle() -> Hypergraph {
        Hypergraph::new(3, 2, vec![vec![0, 1], vec![0, 2], vec![1, 2]]).unwrap()
    }

    fn four_cycle() -> Hypergraph {
        Hypergraph::new(4, 2, vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]]).unwrap()
    }

    fn pair() -> OrderedPartition {
        OrderedPartition::new(vec![1, 1]).unwrap()
    }

    #[test]
    fn trace_triangle_length_four() {
        let b = Budget::default();
        assert_eq!(circuit_count_trace(&triangle(), &pair(), 2, &b).unwrap(), 18);
    }

    #[test]
    fn trace_single_edge() {
        let h = Hypergraph::new(2, 2, vec![vec![0, 1]]).unwrap();
        let b = Budget::default();
        assert_eq!(circuit_count_trace(&h, &pair(), 2, &b).unwrap(), 2);
    }

    #[test]
    fn trace_empty_hypergraph() {
        let h = Hypergraph::new(4, 2, vec![]).unwrap();
        let b = Budget::default();
        assert_eq!(circuit_count_trace(&h, &pair(), 2, &b).unwrap(), 0);
        assert_eq!(circuit_count_trace(&h, &pair(), 3, &b).unwrap(), 0);
    }

    #[test]
    fn trace_odd_exponent_matches_walk_count() {
        // tr(M^6) for the triangle: closed 6-walks in K3 = 2^6 + 2*(-1)^6 = 66.
        // With A = M^2 the exponent 3 trace equals that.
        let b = Budget::default();
        assert_eq!(circuit_count_trace(&triangle(), &pair(), 3, &b).unwrap(), 66);
    }

    #[test]
    fn trace_rejects_short_length() {
        let b = Budget::default();
        assert!(matches!(
            circuit_count_trace(&triangle(), &pair(), 1, &b),
            Err(Error::LengthTooShort { got: 1, min: 2 })
        ));
    }

    #[test]
    fn hom_edge_into_triangle() {
        let f = Hypergraph::new(2, 2, vec![vec![0, 1]]).unwrap();
        let b = Budget::default();
        assert_eq!(hom_count_bruteforce(&f, &triangle(), &b).unwrap(), 6);
    }

    #[test]
    fn hom_four_cycle_into_triangle_matches_trace() {
        let b = Budget::default();
        let homs = hom_count_bruteforce(&four_cycle(), &triangle(), &b).unwrap();
        assert_eq!(homs, 18);
        assert_eq!(homs, circuit_count_trace(&triangle(), &pair(), 2, &b).unwrap());
    }

    #[test]
    fn hom_edgeless_pattern_counts_all_maps() {
        let f = Hypergraph::new(3, 2, vec![]).unwrap();
        let h = Hypergraph::new(4, 2, vec![]).unwrap();
        let b = Budget::default();
        assert_eq!(hom_count_bruteforce(&f, &h, &b).unwrap(), 64);
    }

    #[test]
    fn hom_budget_counts_map_space() {
        let f = Hypergraph::new(3, 2, vec![]).unwrap();
        let b = Budget::new(26);
        assert!(matches!(
            hom_count_bruteforce(&f, &triangle(), &b),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn labeled_copies_examples() {
        let b = Budget::default();
        let edge = Hypergraph::new(2, 2, vec![vec![0, 1]]).unwrap();
        assert_eq!(labeled_copy_count_bruteforce(&edge, &triangle(), &b).unwrap(), 6);
        assert_eq!(labeled_copy_count_bruteforce(&four_cycle(), &four_cycle(), &b).unwrap(), 8);
        assert_eq!(labeled_copy_count_bruteforce(&triangle(), &four_cycle(), &b).unwrap(), 0);
        assert_eq!(labeled_copy_count_bruteforce(&four_cycle(), &triangle(), &b).unwrap(), 0);
    }

    #[test]
    fn labeled_at_most_hom() {
        let spec = GenSpec { n: 5, k: 2, p: 0.6, seed: 9, allow_loops: false, bias: None };
        let h = generate(&spec).unwrap();
        let b = Budget::default();
        let f = four_cycle();
        let inj = labeled_copy_count_bruteforce(&f, &h, &b).unwrap();
        let hom = hom_count_bruteforce(&f, &h, &b).unwrap();
        assert!(inj <= hom);
    }

    #[test]
    fn hom_monotone_in_target_edges() {
        let f = four_cycle();
        let b = Budget::default();
        let sparse = Hypergraph::new(4, 2, vec![vec![0, 1], vec![1, 2]]).unwrap();
        let denser = Hypergraph::new(4, 2, vec![vec![0, 1], vec![1, 2], vec![2, 3]]).unwrap();
        let lo = hom_count_bruteforce(&f, &sparse, &b).unwrap();
        let hi = hom_count_bruteforce(&f, &denser, &b).unwrap();
        assert!(lo <= hi);
    }

    #[test]
    fn trace_equals_cycle_hom_for_three_uniform() {
        let spec = GenSpec { n: 4, k: 3, p: 0.5, seed: 3, allow_loops: false, bias: None };
        let h = generate(&spec).unwrap();
        let b = Budget::default();
        for pi in crate::indexing::proper_partitions(3) {
            for ordering in pi.orderings() {
                let trace = circuit_count_trace(&h, &ordering, 2, &b).unwrap();
                let gadget = crate::gadgets::cycle_of_ordering(&ordering, 4).unwrap();
                let homs = hom_count_bruteforce(&gadget, &h, &b).unwrap();
                assert_eq!(trace, homs, "ordering {:?}", ordering.parts());
            }
        }
    }

    #[test]
    fn deviation_complete_graph_thirty() {
        let h = crate::hypergraph::complete_graph(30);
        let b = Budget::default();
        let pi = Partition::new(vec![1, 1]).unwrap();
        let rep = cycle_deviation(&h, &pi, 1, 1.0, &b).unwrap();
        assert_eq!(rep.m, 4);
        assert_eq!(rep.length, 4);
        assert_eq!(rep.circuits, 29i128.pow(4) + 29);
        assert!(rep.ratio >= 0.85 && rep.ratio <= 1.0, "ratio {}", rep.ratio);
    }

    #[test]
    fn deviation_empty_graph_is_zero() {
        let h = Hypergraph::new(10, 2, vec![]).unwrap();
        let b = Budget::default();
        let pi = Partition::new(vec![1, 1]).unwrap();
        let rep = cycle_deviation(&h, &pi, 1, 0.5, &b).unwrap();
        assert_eq!(rep.circuits, 0);
        assert_eq!(rep.ratio, 0.0);
    }

    #[test]
    fn deviation_rejects_zero_length() {
        let h = triangle();
        let b = Budget::default();
        let pi = Partition::new(vec![1, 1]).unwrap();
        assert!(matches!(
            cycle_deviation(&h, &pi, 0, 0.5, &b),
            Err(Error::LengthTooShort { got: 0, min: 1 })
        ));
    }

    #[test]
    fn cycle_gadget_homs_agree_across_orderings() {
        let pi = Partition::new(vec![2, 1]).unwrap();
        let b = Budget::default();
        for seed in 0..2u64 {
            let spec = GenSpec { n: 4, k: 3, p: 0.5, seed, allow_loops: false, bias: None };
            let h = generate(&spec).unwrap();
            let counts: Vec<i128> = pi
                .orderings()
                .iter()
                .map(|o| {
                    let c = cycle(&pi, 4).unwrap();
                    let via_ordering = crate::gadgets::cycle_of_ordering(o, 4).unwrap();
                    let a = hom_count_bruteforce(&c, &h, &b).unwrap();
                    let bb = hom_count_bruteforce(&via_ordering, &h, &b).unwrap();
                    assert_eq!(a, bb);
                    a
                })
                .collect();
            assert!(counts.windows(2).all(|w| w[0] == w[1]));
        }
    }

    #[test]
    fn count_overflow_reported() {
        assert!(matches!(checked_dot(&[i128::MAX], &[2]), Err(Error::CountOverflow)));
    }
}
