//! Named verification suites: numbered-claim checks, oracle equivalences,
//! and closed-form fixtures. Deterministic (fixed seeds), machine-readable
//! outcomes. The CLI's verify command runs `run_all`; the acceptance tests
//! call individual suites.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::counting::{circuit_count_trace, hom_count_bruteforce};
use crate::error::Result;
use crate::gadgets::{cycle_of_ordering, path, step};
use crate::hypergraph::{complete_graph, generate, GenSpec, Hypergraph};
use crate::indexing::{proper_partitions, OrderedPartition, Partition};
use crate::multilinear::{
    a_matrix_with_asym, all_ones_map, flatten, gamma_permute, j_eval, kron, kron_power, power,
    Budget, DeviationMap, DeviationSpec, MultiForm, MultiMap,
};
use crate::spectral::{
    a_spectrum, lambda1_pi, lambda2_pi, random_orthogonal, random_unit, HopmOptions,
    PartitionNorm,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VerifyLevel {
    Quick,
    Full,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteOutcome {
    pub suite: String,
    pub passed: bool,
    pub checks: usize,
    pub failed: usize,
    /// First few failure descriptions.
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub level: VerifyLevel,
    pub outcomes: Vec<SuiteOutcome>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }
}

struct Checker {
    suite: &'static str,
    checks: usize,
    failed: usize,
    failures: Vec<String>,
}

impl Checker {
    fn new(suite: &'static str) -> Self {
        Checker { suite, checks: 0, failed: 0, failures: Vec::new() }
    }

    fn check(&mut self, cond: bool, msg: impl FnOnce() -> String) {
        self.checks += 1;
        if !cond {
            self.failed += 1;
            if self.failures.len() < 8 {
                self.failures.push(msg());
            }
        }
    }

    /// Unwraps a result; an error counts as a failed check.
    fn must<T>(&mut self, r: Result<T>, what: &str) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.check(false, || format!("{what}: {e}"));
                None
            }
        }
    }

    fn finish(self) -> SuiteOutcome {
        SuiteOutcome {
            suite: self.suite.to_string(),
            passed: self.failed == 0,
            checks: self.checks,
            failed: self.failed,
            failures: self.failures,
        }
    }
}

fn op(parts: &[usize]) -> OrderedPartition {
    OrderedPartition::new(parts.to_vec()).unwrap()
}

fn random_h(n: usize, k: usize, seed: u64, allow_loops: bool) -> Hypergraph {
    generate(&GenSpec { n, k, p: 0.5, seed, allow_loops, bias: None }).unwrap()
}

fn random_vec(dim: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..dim).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect()
}

fn random_map(dims: &[usize], seed: u64) -> MultiMap<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len: usize = dims.iter().product();
    let values = (0..len).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
    MultiMap::from_values(dims.to_vec(), values, false).unwrap()
}

fn refs(xs: &[Vec<f64>]) -> Vec<&[f64]> {
    xs.iter().map(|v| v.as_slice()).collect()
}

/// Representation claim: fixing all but the last mode, the values of the map
/// on the last mode's standard basis form a vector w with eval = <w, y>.
pub fn last_mode_representation() -> SuiteOutcome {
    let mut c = Checker::new("last-mode-representation");
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut cases = vec![
        random_map(&[3, 4], 12),
        random_map(&[2, 3, 2], 13),
        random_map(&[2, 2, 2, 2], 14),
    ];
    cases.push(flatten(&random_h(4, 3, 15, false), &op(&[2, 1])).unwrap());
    for phi in &cases {
        let t = phi.t();
        let d_last = *phi.mode_dims().last().unwrap();
        let mut xs: Vec<Vec<f64>> =
            phi.mode_dims().iter().map(|&d| random_vec(d, &mut rng)).collect();

        let mut w_basis = vec![0.0; d_last];
        for (j, w) in w_basis.iter_mut().enumerate() {
            let mut basis = vec![0.0; d_last];
            basis[j] = 1.0;
            xs[t - 1] = basis;
            *w = phi.eval(&refs(&xs)).unwrap();
        }
        let w_contract = {
            let r = refs(&xs);
            phi.contract_all_but(t - 1, &r).unwrap()
        };
        for (j, (&a, &b)) in w_basis.iter().zip(&w_contract).enumerate() {
            c.check((a - b).abs() <= 1e-10, || {
                format!("basis/contraction mismatch at {j}: {a} vs {b}")
            });
        }
        for draw in 0..20 {
            let y = random_vec(d_last, &mut rng);
            let inner: f64 = w_basis.iter().zip(&y).map(|(a, b)| a * b).sum();
            xs[t - 1] = y;
            let direct = phi.eval(&refs(&xs)).unwrap();
            c.check((direct - inner).abs() <= 1e-10, || {
                format!("draw {draw}: eval {direct} vs <w,y> {inner}")
            });
        }
    }
    c.finish()
}

fn conjugate_last_mode(phi: &MultiMap<f64>, q: &[f64]) -> MultiMap<f64> {
    let d = *phi.mode_dims().last().unwrap();
    let mut values = Vec::with_capacity(phi.len());
    for chunk in phi.values().chunks_exact(d) {
        for jp in 0..d {
            let mut acc = 0.0;
            for (j, &v) in chunk.iter().enumerate() {
                acc += v * q[j * d + jp];
            }
            values.push(acc);
        }
    }
    MultiMap::from_values(phi.mode_dims().to_vec(), values, false).unwrap()
}

/// Basis independence of the last-mode contraction: rotating the contracted
/// mode by an orthogonal matrix leaves the star product unchanged.
pub fn basis_independence() -> SuiteOutcome {
    let mut c = Checker::new("basis-independence");
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut cases = vec![random_map(&[3, 4], 22), random_map(&[2, 3, 3], 23)];
    cases.push(flatten(&random_h(3, 3, 24, false), &op(&[1, 1, 1])).unwrap());
    for phi in &cases {
        let d = *phi.mode_dims().last().unwrap();
        let q = random_orthogonal(d, &mut rng);
        let psi = conjugate_last_mode(phi, &q);
        let plain = crate::multilinear::star_product(phi, phi).unwrap();
        let rotated = crate::multilinear::star_product(&psi, &psi).unwrap();
        let scale = plain.values().iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let worst = plain
            .values()
            .iter()
            .zip(rotated.values())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        c.check(worst <= 1e-8 * scale, || {
            format!("star product moved by {worst} under conjugation (scale {scale})")
        });
    }
    c.finish()
}

/// Signature of the digit-pair swap used by the invariance suite, so a test
/// can inject a broken permutation and watch the suite fail by name.
pub type GammaFn = dyn Fn(usize, usize, &[f64]) -> Result<Vec<f64>>;

/// Pair-swap invariance of power maps on simple tensors.
pub fn pair_swap_invariance_with(gamma: &GammaFn) -> SuiteOutcome {
    let mut c = Checker::new("pair-swap-invariance");
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let budget = Budget::default();
    let cases = vec![
        flatten(&random_h(3, 2, 32, false), &op(&[1, 1])).unwrap(),
        flatten(&random_h(3, 3, 33, true), &op(&[1, 1, 1])).unwrap(),
        flatten(&random_h(3, 3, 34, false), &op(&[2, 1])).unwrap(),
    ];
    for phi in &cases {
        let t = phi.t();
        let base_dims = phi.mode_dims().to_vec();
        for s in 0..t {
            let pow = power(phi, s, &budget).unwrap();
            for draw in 0..5 {
                let xs: Vec<Vec<f64>> = base_dims[..t - s]
                    .iter()
                    .map(|&d| {
                        let mut x = random_vec(d, &mut rng);
                        for _ in 1..(1usize << s) {
                            x = kron(&x, &random_vec(d, &mut rng));
                        }
                        x
                    })
                    .collect();
                let mut gxs = Vec::with_capacity(xs.len());
                for (i, x) in xs.iter().enumerate() {
                    gxs.push(gamma(s, base_dims[i], x).unwrap());
                }
                let lhs = pow.eval(&refs(&xs)).unwrap();
                let rhs = pow.eval(&refs(&gxs)).unwrap();
                c.check((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(1.0), || {
                    format!("s={s} draw={draw}: {lhs} vs permuted {rhs}")
                });
            }
        }
    }
    c.finish()
}

pub fn pair_swap_invariance() -> SuiteOutcome {
    pair_swap_invariance_with(&|s, base, x| gamma_permute(s, base, x))
}

/// Exact symmetry of the power matrix built from 0/1 flattenings.
pub fn power_matrix_symmetry(level: VerifyLevel) -> SuiteOutcome {
    let mut c = Checker::new("power-matrix-symmetry");
    let budget = Budget::default();
    let mut cases: Vec<(usize, usize, u64, bool)> = vec![
        (4, 2, 41, false),
        (6, 2, 42, true),
        (3, 3, 43, false),
        (4, 3, 44, true),
    ];
    if level == VerifyLevel::Full {
        cases.push((4, 4, 45, false));
        cases.push((3, 4, 46, true));
    }
    for &(n, k, seed, loops) in &cases {
        let h = random_h(n, k, seed, loops);
        for pi in proper_partitions(k) {
            for ordering in pi.orderings() {
                let tau = flatten(&h, &ordering).unwrap();
                if let Some((_, asym)) =
                    c.must(a_matrix_with_asym(&tau, &budget), "a_matrix")
                {
                    c.check(asym == 0.0, || {
                        format!(
                            "n={n} k={k} ordering {}: asymmetry {asym}",
                            ordering.label()
                        )
                    });
                }
            }
        }
    }
    c.finish()
}

/// Power chain upper bounds: |phi(x..)|^(2^s) never exceeds the s-th power
/// map at the kron-powered arguments (unit vectors), up to 1e-10 slack.
pub fn power_chain_upper_bounds() -> SuiteOutcome {
    let mut c = Checker::new("power-chain-upper-bounds");
    let mut rng = ChaCha8Rng::seed_from_u64(51);
    let budget = Budget::default();
    let cases = vec![
        flatten(&random_h(4, 2, 52, false), &op(&[1, 1])).unwrap(),
        flatten(&random_h(4, 3, 53, false), &op(&[1, 1, 1])).unwrap(),
        flatten(&random_h(4, 3, 54, true), &op(&[2, 1])).unwrap(),
    ];
    for phi in &cases {
        let t = phi.t();
        for s in 0..t {
            let pow = power(phi, s, &budget).unwrap();
            for draw in 0..100 {
                let xs: Vec<Vec<f64>> = phi
                    .mode_dims()
                    .iter()
                    .map(|&d| random_unit(d, &mut rng))
                    .collect();
                let base = phi.eval(&refs(&xs)).unwrap();
                let lhs = base.abs().powi(1 << s);
                let powered: Vec<Vec<f64>> =
                    xs[..t - s].iter().map(|x| kron_power(x, s)).collect();
                let rhs = pow.eval(&refs(&powered)).unwrap().abs();
                c.check(lhs <= rhs + 1e-10, || {
                    format!("s={s} draw={draw}: {lhs} > {rhs}")
                });
            }
        }
    }
    c.finish()
}

fn bracket_checks(
    c: &mut Checker,
    pn: &PartitionNorm,
    h: &Hypergraph,
    deviation: bool,
    what: &str,
) {
    let spec = DeviationSpec::for_hypergraph(h);
    for (ordering, bracket) in &pn.per_ordering {
        c.check(bracket.lower >= 0.0, || {
            format!("{what} {}: negative lower {}", ordering.label(), bracket.lower)
        });
        if let Some(u) = bracket.upper {
            c.check(bracket.lower <= u + 1e-9 * u.max(1.0), || {
                format!("{what} {}: lower {} above upper {u}", ordering.label(), bracket.lower)
            });
        }
        let tau = flatten(h, ordering).unwrap();
        let witness_refs: Vec<&[f64]> =
            bracket.witness.iter().map(|v| v.as_slice()).collect();
        for (m, w) in bracket.witness.iter().enumerate() {
            let nrm: f64 = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            c.check((nrm - 1.0).abs() <= 1e-10, || {
                format!("{what} {}: witness mode {m} norm {nrm}", ordering.label())
            });
        }
        let value = if deviation {
            DeviationMap::new(&tau, spec).eval(&witness_refs).unwrap()
        } else {
            tau.eval(&witness_refs).unwrap()
        };
        c.check((value.abs() - bracket.lower).abs() <= 1e-9 * bracket.lower.max(1.0), || {
            format!(
                "{what} {}: witness value {} vs lower {}",
                ordering.label(),
                value,
                bracket.lower
            )
        });
    }
}

/// Bracket sanity on every computed norm: 0 <= lower <= upper, unit
/// witnesses, and the witness value reproducing the lower bound.
pub fn bracket_order() -> SuiteOutcome {
    let mut c = Checker::new("bracket-order");
    let opts = HopmOptions::default();
    let budget = Budget::default();
    let cases =
        vec![(5, 2, 81, false), (5, 2, 82, true), (4, 3, 83, false), (4, 3, 84, true)];
    for &(n, k, seed, loops) in &cases {
        let h = random_h(n, k, seed, loops);
        for pi in proper_partitions(k) {
            let what = format!("n={n} k={k} seed={seed} pi={}", pi.label());
            if let Some(pn) = c.must(lambda1_pi(&h, &pi, &opts, &budget), "lambda1") {
                bracket_checks(&mut c, &pn, &h, false, &format!("{what} lambda1"));
            }
            if let Some(pn) = c.must(lambda2_pi(&h, &pi, &opts, &budget), "lambda2") {
                bracket_checks(&mut c, &pn, &h, true, &format!("{what} lambda2"));
            }
        }
    }
    c.finish()
}

/// All-ones map factorization: dense evaluation equals the product of
/// coordinate sums; orthogonal-to-ones inputs annihilate it.
pub fn all_ones_factorization() -> SuiteOutcome {
    let mut c = Checker::new("all-ones-factorization");
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for dims in [vec![3, 3], vec![4, 2, 2], vec![9, 3]] {
        let dense = all_ones_map(dims.clone()).unwrap();
        for draw in 0..20 {
            let xs: Vec<Vec<f64>> = dims.iter().map(|&d| random_vec(d, &mut rng)).collect();
            let direct = dense.eval(&refs(&xs)).unwrap();
            let product = j_eval(&dims, &refs(&xs)).unwrap();
            c.check((direct - product).abs() <= 1e-12 * product.abs().max(1.0), || {
                format!("dims {dims:?} draw {draw}: {direct} vs {product}")
            });
        }

        let ones: Vec<Vec<f64>> =
            dims.iter().map(|&d| vec![1.0 / (d as f64).sqrt(); d]).collect();
        let total: f64 = dims.iter().map(|&d| (d as f64).sqrt()).product();
        let at_ones = j_eval(&dims, &refs(&ones)).unwrap();
        c.check((at_ones - total).abs() <= 1e-12 * total, || {
            format!("dims {dims:?}: all-ones value {at_ones} vs {total}")
        });

        let mut perp: Vec<Vec<f64>> = ones.clone();
        let d0 = dims[0];
        if d0 >= 2 {
            let mut x = vec![0.0; d0];
            x[0] = std::f64::consts::FRAC_1_SQRT_2;
            x[1] = -std::f64::consts::FRAC_1_SQRT_2;
            perp[0] = x;
            let killed = j_eval(&dims, &refs(&perp)).unwrap();
            c.check(killed.abs() <= 1e-12, || {
                format!("dims {dims:?}: perp input gave {killed}")
            });
        }
    }
    c.finish()
}

/// Circuit-count equivalence: the trace of the power-matrix equals the
/// brute-force count of cycle-gadget homomorphisms, integer-exact.
/// Quick: k in {2,3}, 10 instances each, traces of exponent 2.
/// Full: adds k=4 partitions with at most 3 modes, and exponent-3 traces for
/// k in {2,3}. The 4-mode partition of k=4 is excluded: its length-4 cycle
/// has 32 vertices, so the map-space budget precondition cannot hold.
pub fn circuit_oracle_equivalence(level: VerifyLevel) -> SuiteOutcome {
    let mut c = Checker::new("circuit-oracle-equivalence");
    let quick_budget = Budget::default();
    let full_budget = Budget::new(100_000_000_000);

    let mut jobs: Vec<(usize, u64, bool, usize, Budget)> = Vec::new();
    for k in [2usize, 3] {
        for seed in 0..5u64 {
            for loops in [false, true] {
                jobs.push((k, seed, loops, 2, quick_budget));
                if level == VerifyLevel::Full {
                    jobs.push((k, seed, loops, 3, full_budget));
                }
            }
        }
    }
    if level == VerifyLevel::Full {
        for seed in 0..3u64 {
            for loops in [false, true] {
                jobs.push((4, seed, loops, 2, full_budget));
            }
        }
    }

    for &(k, seed, loops, ell, budget) in &jobs {
        let h = random_h(4, k, seed, loops);
        for pi in proper_partitions(k) {
            if pi.t() > 3 {
                continue;
            }
            for ordering in pi.orderings() {
                let trace =
                    c.must(circuit_count_trace(&h, &ordering, ell, &budget), "trace");
                let gadget = cycle_of_ordering(&ordering, 2 * ell).unwrap();
                let homs =
                    c.must(hom_count_bruteforce(&gadget, &h, &budget), "hom count");
                if let (Some(a), Some(b)) = (trace, homs) {
                    c.check(a == b, || {
                        format!(
                            "k={k} seed={seed} loops={loops} ell={ell} ordering {}: trace {a} != homs {b}",
                            ordering.label()
                        )
                    });
                }
            }
        }
    }
    c.finish()
}

/// Structural census of all gadgets: step and path sizes, cycle
/// 2-regularity, and the |E|, |V| formulas for k <= 4, ell <= 3.
pub fn gadget_census() -> SuiteOutcome {
    let mut c = Checker::new("gadget-census");

    let c4 = cycle_of_ordering(&op(&[1, 1]), 4).unwrap();
    c.check(c4.n() == 4 && c4.edge_count() == 4, || {
        format!("pair-partition length-4 cycle: {}V {}E", c4.n(), c4.edge_count())
    });
    let mut deg = vec![0usize; c4.n()];
    for e in c4.edges() {
        for &v in e {
            deg[v as usize] += 1;
        }
    }
    c.check(deg.iter().all(|&d| d == 2), || "length-4 cycle not 2-regular".into());

    let c111 = cycle_of_ordering(&op(&[1, 1, 1]), 4).unwrap();
    c.check(c111.n() == 12 && c111.edge_count() == 8, || {
        format!("three-singleton length-4 cycle: {}V {}E", c111.n(), c111.edge_count())
    });

    for k in 2..=4usize {
        for pi in proper_partitions(k) {
            let t = pi.t();
            for ordering in pi.orderings() {
                let s = step(&ordering).unwrap();
                c.check(s.hypergraph.edge_count() == 1 << (t - 1), || {
                    format!("step {} edge count", ordering.label())
                });
                c.check(
                    s.hypergraph.edges().iter().all(|e| e.len() == k),
                    || format!("step {} edge sizes", ordering.label()),
                );
                c.check(s.check().is_ok(), || {
                    format!("step {} attach invariants", ordering.label())
                });
                for ell in 1..=3usize {
                    let p = path(&ordering, ell).unwrap();
                    c.check(p.hypergraph.edge_count() == ell << (t - 1), || {
                        format!("path {} ell={ell} edge count", ordering.label())
                    });
                    if ell < 2 {
                        continue;
                    }
                    let cyc = cycle_of_ordering(&ordering, 2 * ell).unwrap();
                    let edges = ell << (t - 1);
                    c.check(cyc.edge_count() == edges, || {
                        format!("cycle {} ell={ell} edge count", ordering.label())
                    });
                    c.check(cyc.n() == edges * k / 2, || {
                        format!("cycle {} ell={ell} vertex count", ordering.label())
                    });
                    let mut deg = vec![0usize; cyc.n()];
                    for e in cyc.edges() {
                        for &v in e {
                            deg[v as usize] += 1;
                        }
                    }
                    c.check(deg.iter().all(|&d| d == 2), || {
                        format!("cycle {} ell={ell} not 2-regular", ordering.label())
                    });
                }
            }
        }
    }
    c.finish()
}

/// Hom counts of length-4 cycles agree across all orderings of a partition.
pub fn gadget_ordering_robustness(level: VerifyLevel) -> SuiteOutcome {
    let mut c = Checker::new("gadget-ordering-robustness");
    let quick_budget = Budget::default();
    let full_budget = Budget::new(100_000_000_000);
    let mut jobs: Vec<(Partition, bool, Budget)> = vec![
        (Partition::new(vec![2, 1]).unwrap(), false, quick_budget),
        (Partition::new(vec![1, 1]).unwrap(), false, quick_budget),
    ];
    if level == VerifyLevel::Full {
        jobs.push((Partition::new(vec![3, 1]).unwrap(), true, full_budget));
        jobs.push((Partition::new(vec![2, 2]).unwrap(), true, full_budget));
        jobs.push((Partition::new(vec![2, 1, 1]).unwrap(), true, full_budget));
    }
    for (pi, loops, budget) in &jobs {
        let k = pi.k();
        for seed in 100..105u64 {
            let h = random_h(4, k, seed, *loops);
            let counts: Vec<i128> = pi
                .orderings()
                .iter()
                .filter_map(|ordering| {
                    let gadget = cycle_of_ordering(ordering, 4).unwrap();
                    c.must(hom_count_bruteforce(&gadget, &h, budget), "hom count")
                })
                .collect();
            c.check(counts.windows(2).all(|w| w[0] == w[1]), || {
                format!("pi={} seed={seed}: ordering counts {counts:?}", pi.label())
            });
        }
    }
    c.finish()
}

fn closed_4_walks(h: &Hypergraph) -> i128 {
    let n = h.n() as u32;
    let mut scratch = Vec::new();
    let mut count: i128 = 0;
    for a in 0..n {
        for b in 0..n {
            if !h.is_adjacent(&[a, b], &mut scratch) {
                continue;
            }
            for d in 0..n {
                if !h.is_adjacent(&[d, a], &mut scratch) {
                    continue;
                }
                for x in 0..n {
                    if h.is_adjacent(&[b, x], &mut scratch)
                        && h.is_adjacent(&[x, d], &mut scratch)
                    {
                        count += 1;
                    }
                }
            }
        }
    }
    count
}

/// Graph specialization: the power matrix of a graph flattening is the
/// adjacency matrix squared, and the exponent-2 trace counts closed 4-walks.
pub fn graph_specialization() -> SuiteOutcome {
    let mut c = Checker::new("graph-specialization");
    let budget = Budget::default();
    let pair = op(&[1, 1]);

    let k3 = complete_graph(3);
    let trace = circuit_count_trace(&k3, &pair, 2, &budget).unwrap();
    c.check(trace == 18, || format!("complete-3 trace {trace} != 18"));

    for seed in 0..20u64 {
        let n = 4 + (seed as usize % 7);
        let h = random_h(n, 2, 500 + seed, false);
        let tau = flatten(&h, &pair).unwrap();
        let (a, asym) = a_matrix_with_asym(&tau, &budget).unwrap();
        c.check(asym == 0.0, || format!("seed {seed}: asymmetry {asym}"));

        let m = tau.values();
        let mut m2 = vec![0.0f64; n * n];
        for r in 0..n {
            for col in 0..n {
                let mut acc = 0.0;
                for j in 0..n {
                    acc += m[r * n + j] * m[j * n + col];
                }
                m2[r * n + col] = acc;
            }
        }
        c.check(a.values() == m2.as_slice(), || {
            format!("seed {seed}: power matrix differs from adjacency squared")
        });

        let trace = circuit_count_trace(&h, &pair, 2, &budget).unwrap();
        let walks = closed_4_walks(&h);
        c.check(trace == walks, || {
            format!("seed {seed}: trace {trace} vs walks {walks}")
        });
    }
    c.finish()
}

/// Complete graphs: lambda1 = n-1 and lambda2 = 1 within 1e-6; empty
/// hypergraphs give zero brackets.
pub fn closed_form_spectra() -> SuiteOutcome {
    let mut c = Checker::new("closed-form-spectra");
    let opts = HopmOptions::default();
    let budget = Budget::default();
    let pi2 = Partition::new(vec![1, 1]).unwrap();
    for n in [3usize, 10, 30] {
        let h = complete_graph(n);
        let l1 = lambda1_pi(&h, &pi2, &opts, &budget).unwrap();
        let l2 = lambda2_pi(&h, &pi2, &opts, &budget).unwrap();
        let want = (n - 1) as f64;
        c.check((l1.combined.lower - want).abs() <= 1e-6, || {
            format!("complete n={n}: lambda1 lower {}", l1.combined.lower)
        });
        c.check(
            l1.combined.upper.is_some_and(|u| (u - want).abs() <= 1e-6),
            || format!("complete n={n}: lambda1 upper {:?}", l1.combined.upper),
        );
        c.check((l2.combined.lower - 1.0).abs() <= 1e-6, || {
            format!("complete n={n}: lambda2 lower {}", l2.combined.lower)
        });
        c.check(
            l2.combined.upper.is_some_and(|u| (u - 1.0).abs() <= 1e-6),
            || format!("complete n={n}: lambda2 upper {:?}", l2.combined.upper),
        );
    }
    for (n, k) in [(5usize, 2usize), (4, 3)] {
        let h = Hypergraph::new(n, k, vec![]).unwrap();
        for pi in proper_partitions(k) {
            let l1 = lambda1_pi(&h, &pi, &opts, &budget).unwrap();
            let l2 = lambda2_pi(&h, &pi, &opts, &budget).unwrap();
            c.check(l1.combined.lower == 0.0 && l1.combined.upper == Some(0.0), || {
                format!("empty n={n} k={k} pi={}: lambda1 nonzero", pi.label())
            });
            c.check(l2.combined.lower == 0.0 && l2.combined.upper == Some(0.0), || {
                format!("empty n={n} k={k} pi={}: lambda2 nonzero", pi.label())
            });
        }
    }
    c.finish()
}

/// Finite-scale norm chain on loop-free instances, per partition ordering:
/// k!|E|/n^(k/2) = tau(all-ones) <= lower <= upper = mu1^(1/2^(t-1)).
pub fn norm_chain() -> SuiteOutcome {
    let mut c = Checker::new("norm-chain");
    let opts = HopmOptions::default();
    let budget = Budget::default();
    for k in [2usize, 3] {
        for pi in proper_partitions(k) {
            for seed in 0..20u64 {
                let n = 5 + (seed as usize % 2);
                let h = random_h(n, k, 600 + seed, false);
                let target = crate::multilinear::factorial(k) as f64
                    * h.edge_count() as f64
                    / (n as f64).powf(k as f64 / 2.0);
                let slack = 1e-8 * target.max(1.0);
                let pn = lambda1_pi(&h, &pi, &opts, &budget).unwrap();
                for (ordering, bracket) in &pn.per_ordering {
                    let tau = flatten(&h, ordering).unwrap();
                    let ones = crate::analysis::tau_all_ones(&tau).unwrap();
                    c.check((ones - target).abs() <= slack, || {
                        format!(
                            "seed {seed} {}: tau(1) {ones} vs k!|E|/n^(k/2) {target}",
                            ordering.label()
                        )
                    });
                    c.check(ones <= bracket.lower + slack, || {
                        format!(
                            "seed {seed} {}: tau(1) {ones} above lower {}",
                            ordering.label(),
                            bracket.lower
                        )
                    });
                    let upper = bracket.upper.unwrap_or(f64::NAN);
                    c.check(bracket.lower <= upper + slack, || {
                        format!(
                            "seed {seed} {}: lower {} above upper {upper}",
                            ordering.label(),
                            bracket.lower
                        )
                    });
                    let spectrum = a_spectrum(&tau, &budget).unwrap();
                    let t = ordering.t();
                    let from_mu = spectrum.mu1.max(0.0).powf(1.0 / (1u32 << (t - 1)) as f64);
                    c.check((upper - from_mu).abs() <= slack, || {
                        format!(
                            "seed {seed} {}: upper {upper} vs mu1 root {from_mu}",
                            ordering.label()
                        )
                    });
                }
            }
        }
    }
    c.finish()
}

/// Positive semidefiniteness of two-mode power matrices across the instance
/// families the other suites use.
pub fn t2_psd() -> SuiteOutcome {
    let mut c = Checker::new("t2-psd");
    let budget = Budget::default();
    let mut taus: Vec<(String, MultiMap<f64>)> = Vec::new();

    let pair = op(&[1, 1]);
    for seed in 0..20u64 {
        let n = 4 + (seed as usize % 7);
        let h = random_h(n, 2, 500 + seed, false);
        taus.push((format!("graph seed {seed}"), flatten(&h, &pair).unwrap()));
    }
    for n in [3usize, 10, 30] {
        taus.push((format!("complete {n}"), flatten(&complete_graph(n), &pair).unwrap()));
    }
    taus.push((
        "binomial 40".into(),
        flatten(&random_h(40, 2, 1, false), &pair).unwrap(),
    ));
    let planted = generate(&GenSpec {
        n: 20,
        k: 2,
        p: 0.5,
        seed: 7,
        allow_loops: false,
        bias: Some(0.4),
    })
    .unwrap();
    taus.push(("planted 20".into(), flatten(&planted, &pair).unwrap()));
    for seed in 0..4u64 {
        let h = random_h(5, 3, 700 + seed, seed % 2 == 0);
        for ordering in [op(&[2, 1]), op(&[1, 2])] {
            taus.push((
                format!("three-uniform seed {seed} {}", ordering.label()),
                flatten(&h, &ordering).unwrap(),
            ));
        }
    }

    for (what, tau) in &taus {
        let s = a_spectrum(tau, &budget).unwrap();
        c.check(s.min_eig >= -1e-9 * s.mu1.abs(), || {
            format!("{what}: min eig {} vs mu1 {}", s.min_eig, s.mu1)
        });
    }
    c.finish()
}

/// Runs every suite at the given level.
pub fn run_all(level: VerifyLevel) -> SuiteReport {
    let outcomes = vec![
        last_mode_representation(),
        basis_independence(),
        pair_swap_invariance(),
        power_matrix_symmetry(level),
        power_chain_upper_bounds(),
        bracket_order(),
        all_ones_factorization(),
        circuit_oracle_equivalence(level),
        gadget_census(),
        gadget_ordering_robustness(level),
        graph_specialization(),
        closed_form_spectra(),
        norm_chain(),
        t2_psd(),
    ];
    SuiteReport { level, outcomes }
}
