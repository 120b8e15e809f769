//! Symmetric eigendecomposition, exact bilinear spectral norms, bracketed
//! multilinear spectral norms, and the per-partition eigenvalues.
//!
//! Spectral norms of t-linear maps with t >= 3 are reported as brackets:
//! alternating maximization certifies the lower end, the top eigenvalue of
//! the interleaved power matrix certifies the upper end.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::indexing::{OrderedPartition, Partition};
use crate::multilinear::{
    a_matrix, flatten, Budget, DeviationMap, DeviationSpec, MultiForm, MultiMap,
};

const JACOBI_SWEEP_CAP: usize = 100;

/// Dense square symmetric real matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    dim: usize,
    values: Vec<f64>,
}

impl SymMatrix {
    pub fn new(dim: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != dim * dim {
            return Err(Error::DimMismatch(format!(
                "{} values for a {dim}x{dim} matrix",
                values.len()
            )));
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFiniteValue);
        }
        for r in 0..dim {
            for c in r + 1..dim {
                if values[r * dim + c] != values[c * dim + r] {
                    return Err(Error::DimMismatch(format!(
                        "entry ({r}, {c}) breaks symmetry"
                    )));
                }
            }
        }
        Ok(SymMatrix { dim, values })
    }

    /// Builds from possibly slightly asymmetric dense values by averaging,
    /// returning the largest asymmetry found.
    pub fn from_dense_symmetrized(dim: usize, mut values: Vec<f64>) -> (Self, f64) {
        assert_eq!(values.len(), dim * dim);
        let mut max_asym = 0.0f64;
        for r in 0..dim {
            for c in r + 1..dim {
                let a = values[r * dim + c];
                let b = values[c * dim + r];
                max_asym = max_asym.max((a - b).abs());
                let avg = 0.5 * (a + b);
                values[r * dim + c] = avg;
                values[c * dim + r] = avg;
            }
        }
        (SymMatrix { dim, values }, max_asym)
    }

    pub fn zeros(dim: usize) -> Self {
        SymMatrix { dim, values: vec![0.0; dim * dim] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.values[r * self.dim + c]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Matrix-vector product.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim);
        self.values.chunks_exact(self.dim).map(|row| dot(row, x)).collect()
    }
}

/// Full spectrum sorted by descending absolute value; at equal magnitude the
/// non-negative eigenvalue comes first, then ascending original position.
#[derive(Debug, Clone)]
pub struct EigenDecomp {
    pub eigenvalues: Vec<f64>,
    vectors: Vec<f64>,
    pub residual: f64,
}

impl EigenDecomp {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Eigenvector aligned with eigenvalues[j], unit length.
    pub fn eigenvector(&self, j: usize) -> &[f64] {
        let d = self.dim();
        &self.vectors[j * d..(j + 1) * d]
    }

    /// Largest eigenvalue in signed order.
    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Smallest eigenvalue in signed order.
    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn l2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Cyclic Jacobi eigendecomposition. Deterministic; fails with NoConvergence
/// after the sweep cap.
pub fn eig(m: &SymMatrix) -> Result<EigenDecomp> {
    let dim = m.dim;
    if dim == 0 {
        return Err(Error::DimMismatch("eig needs a nonempty matrix".into()));
    }
    let mut a = m.values.clone();
    let mut v = vec![0.0; dim * dim];
    for i in 0..dim {
        v[i * dim + i] = 1.0;
    }
    let frob = l2(&a);
    let tol = f64::EPSILON * frob * dim as f64;
    let skip = tol / (dim * dim) as f64;
    let mut converged = false;
    for _sweep in 0..JACOBI_SWEEP_CAP {
        let off: f64 = {
            let mut s = 0.0;
            for p in 0..dim {
                for q in p + 1..dim {
                    s += a[p * dim + q] * a[p * dim + q];
                }
            }
            s.sqrt()
        };
        if off <= tol {
            converged = true;
            break;
        }
        for p in 0..dim {
            for q in p + 1..dim {
                let apq = a[p * dim + q];
                if apq.abs() <= skip {
                    continue;
                }
                let app = a[p * dim + p];
                let aqq = a[q * dim + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                a[p * dim + p] = app - t * apq;
                a[q * dim + q] = aqq + t * apq;
                a[p * dim + q] = 0.0;
                a[q * dim + p] = 0.0;
                for i in 0..dim {
                    if i != p && i != q {
                        let aip = a[i * dim + p];
                        let aiq = a[i * dim + q];
                        let new_p = c * aip - s * aiq;
                        let new_q = s * aip + c * aiq;
                        a[i * dim + p] = new_p;
                        a[p * dim + i] = new_p;
                        a[i * dim + q] = new_q;
                        a[q * dim + i] = new_q;
                    }
                }
                for i in 0..dim {
                    let vip = v[i * dim + p];
                    let viq = v[i * dim + q];
                    v[i * dim + p] = c * vip - s * viq;
                    v[i * dim + q] = s * vip + c * viq;
                }
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence { sweeps: JACOBI_SWEEP_CAP });
    }
    let raw: Vec<f64> = (0..dim).map(|i| a[i * dim + i]).collect();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| {
        raw[j]
            .abs()
            .partial_cmp(&raw[i].abs())
            .unwrap()
            .then_with(|| (raw[i] < 0.0).cmp(&(raw[j] < 0.0)))
            .then_with(|| i.cmp(&j))
    });
    let eigenvalues: Vec<f64> = order.iter().map(|&i| raw[i]).collect();
    let mut vectors = vec![0.0; dim * dim];
    for (j, &src) in order.iter().enumerate() {
        for i in 0..dim {
            vectors[j * dim + i] = v[i * dim + src];
        }
    }
    let mut residual = 0.0f64;
    for j in 0..dim {
        let vec_j = &vectors[j * dim..(j + 1) * dim];
        let mv = m.apply(vec_j);
        let r: f64 = mv
            .iter()
            .zip(vec_j)
            .map(|(&y, &x)| (y - eigenvalues[j] * x) * (y - eigenvalues[j] * x))
            .sum::<f64>()
            .sqrt();
        residual = residual.max(r);
    }
    let decomp = EigenDecomp { eigenvalues, vectors, residual };
    let mu1 = decomp.eigenvalues[0].abs();
    if decomp.residual > 1e-8 * mu1.max(1.0) {
        return Err(Error::NoConvergence { sweeps: JACOBI_SWEEP_CAP });
    }
    Ok(decomp)
}

/// Certified two-sided estimate of a spectral norm, with the arg-max unit
/// vectors that realize the lower end.
#[derive(Debug, Clone)]
pub struct NormBracket {
    pub lower: f64,
    /// Absent only when the power matrix exceeded the budget.
    pub upper: Option<f64>,
    pub upper_budget_exceeded: bool,
    pub witness: Vec<Vec<f64>>,
}

impl NormBracket {
    fn enforce(mut self) -> Result<Self> {
        if let Some(u) = self.upper {
            if self.lower > u {
                if self.lower - u <= 1e-9 * self.lower.max(1.0) {
                    self.lower = u;
                } else {
                    return Err(Error::BracketInverted { lower: self.lower, upper: u });
                }
            }
        }
        Ok(self)
    }
}

/// Gram matrix of the smaller side of a d1 x d2 matricization: M M^T when
/// d1 <= d2, else M^T M. Both share the nonzero spectrum of the power
/// matrix M M^T.
fn gram_small_side(d1: usize, d2: usize, values: &[f64]) -> SymMatrix {
    if d1 <= d2 {
        let mut g = vec![0.0; d1 * d1];
        for r in 0..d1 {
            for c in r..d1 {
                let v = dot(&values[r * d2..(r + 1) * d2], &values[c * d2..(c + 1) * d2]);
                g[r * d1 + c] = v;
                g[c * d1 + r] = v;
            }
        }
        SymMatrix { dim: d1, values: g }
    } else {
        let mut g = vec![0.0; d2 * d2];
        for r in 0..d1 {
            let row = &values[r * d2..(r + 1) * d2];
            for i in 0..d2 {
                if row[i] != 0.0 {
                    for j in i..d2 {
                        g[i * d2 + j] += row[i] * row[j];
                    }
                }
            }
        }
        for i in 0..d2 {
            for j in 0..i {
                g[i * d2 + j] = g[j * d2 + i];
            }
        }
        SymMatrix { dim: d2, values: g }
    }
}

fn basis_vec(dim: usize, j: usize) -> Vec<f64> {
    let mut v = vec![0.0; dim];
    v[j] = 1.0;
    v
}

/// Exact bilinear bracket from a dense d1 x d2 matricization: lower = upper
/// = top singular value, witness = top singular pair.
fn bilinear_bracket_from(d1: usize, d2: usize, values: &[f64]) -> Result<NormBracket> {
    let gram = gram_small_side(d1, d2, values);
    let decomp = eig(&gram)?;
    let sigma = decomp.max_eigenvalue().max(0.0).sqrt();
    let (u, v) = if sigma == 0.0 {
        (basis_vec(d1, 0), basis_vec(d2, 0))
    } else if d1 <= d2 {
        let u = decomp.eigenvector(0).to_vec();
        // v = M^T u / sigma
        let mut v = vec![0.0; d2];
        for (r, row) in values.chunks_exact(d2).enumerate() {
            let ur = u[r];
            if ur != 0.0 {
                for (slot, &m) in v.iter_mut().zip(row) {
                    *slot += ur * m;
                }
            }
        }
        let nrm = l2(&v);
        let v = if nrm > 0.0 { v.iter().map(|x| x / nrm).collect() } else { basis_vec(d2, 0) };
        (u, v)
    } else {
        let v = decomp.eigenvector(0).to_vec();
        let mut u: Vec<f64> = values.chunks_exact(d2).map(|row| dot(row, &v)).collect();
        let nrm = l2(&u);
        if nrm > 0.0 {
            for x in &mut u {
                *x /= nrm;
            }
        } else {
            u = basis_vec(d1, 0);
        }
        (u, v)
    };
    // The witness realizes sigma up to eigensolver accuracy; take the
    // realized value so the bracket invariant holds exactly.
    let realized = {
        let mut acc = 0.0;
        for (r, row) in values.chunks_exact(d2).enumerate() {
            if u[r] != 0.0 {
                acc += u[r] * dot(row, &v);
            }
        }
        acc.abs()
    };
    NormBracket {
        lower: realized.min(sigma),
        upper: Some(sigma),
        upper_budget_exceeded: false,
        witness: vec![u, v],
    }
    .enforce()
}

/// Exact spectral norm of a bilinear map via the small-side Gram matrix.
pub fn spectral_norm_bilinear(phi: &MultiMap<f64>) -> Result<NormBracket> {
    if phi.t() != 2 {
        return Err(Error::ArityMismatch(format!(
            "bilinear norm on a {}-mode map",
            phi.t()
        )));
    }
    let d = phi.mode_dims();
    bilinear_bracket_from(d[0], d[1], phi.values())
}

/// Settings for alternating maximization.
#[derive(Debug, Clone, Copy)]
pub struct HopmOptions {
    pub restarts: usize,
    pub max_iter: usize,
    /// Convergence threshold on the per-cycle value change, relative to
    /// max(1, value).
    pub tol: f64,
    pub seed: u64,
}

impl Default for HopmOptions {
    fn default() -> Self {
        HopmOptions { restarts: 16, max_iter: 500, tol: 1e-10, seed: 0 }
    }
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.random::<f64>().max(1e-300);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Random unit vector, Gaussian direction.
pub fn random_unit(dim: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| gaussian(rng)).collect();
        let n = l2(&v);
        if n > 1e-9 {
            return v.iter().map(|x| x / n).collect();
        }
    }
}

/// Random orthogonal matrix (row-major), Gram-Schmidt on Gaussian rows.
pub fn random_orthogonal(dim: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(dim);
    while rows.len() < dim {
        let mut v: Vec<f64> = (0..dim).map(|_| gaussian(rng)).collect();
        for r in &rows {
            let proj = dot(&v, r);
            for (x, y) in v.iter_mut().zip(r) {
                *x -= proj * y;
            }
        }
        let n = l2(&v);
        if n > 1e-6 {
            rows.push(v.iter().map(|x| x / n).collect());
        }
    }
    rows.concat()
}

fn hopm_single(form: &dyn MultiForm, start: &[Vec<f64>], opts: &HopmOptions) -> Result<(f64, Vec<Vec<f64>>)> {
    let t = form.mode_dims().len();
    let mut xs: Vec<Vec<f64>> = start.to_vec();
    let mut prev = {
        let refs: Vec<&[f64]> = xs.iter().map(|v| v.as_slice()).collect();
        form.eval(&refs)?.abs()
    };
    for _ in 0..opts.max_iter {
        for m in 0..t {
            let w = {
                let refs: Vec<&[f64]> = xs.iter().map(|v| v.as_slice()).collect();
                form.contract_all_but(m, &refs)?
            };
            let nrm = l2(&w);
            if nrm > 0.0 {
                xs[m] = w.iter().map(|x| x / nrm).collect();
            }
        }
        let val = {
            let refs: Vec<&[f64]> = xs.iter().map(|v| v.as_slice()).collect();
            form.eval(&refs)?.abs()
        };
        if (val - prev).abs() <= opts.tol * val.max(1.0) {
            prev = val;
            break;
        }
        prev = val;
    }
    Ok((prev, xs))
}

/// Best certified lower bound on the spectral norm by alternating
/// maximization from the all-ones start plus seeded random restarts.
/// Monotone per cycle, so the result is at least |form(all-ones start)|.
pub fn hopm_lower(form: &dyn MultiForm, opts: &HopmOptions) -> Result<(f64, Vec<Vec<f64>>)> {
    let dims = form.mode_dims().to_vec();
    let mut starts: Vec<Vec<Vec<f64>>> = Vec::with_capacity(opts.restarts + 1);
    starts.push(
        dims.iter().map(|&d| vec![1.0 / (d as f64).sqrt(); d]).collect(),
    );
    for r in 0..opts.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(r as u64));
        starts.push(dims.iter().map(|&d| random_unit(d, &mut rng)).collect());
    }
    let runs: Vec<Result<(f64, Vec<Vec<f64>>)>> = starts
        .par_iter()
        .map(|start| hopm_single(form, start, opts))
        .collect();
    let mut best: Option<(f64, Vec<Vec<f64>>)> = None;
    for run in runs {
        let (val, xs) = run?;
        let better = match &best {
            None => true,
            Some((b, _)) => val > *b,
        };
        if better {
            best = Some((val, xs));
        }
    }
    Ok(best.expect("at least the all-ones start ran"))
}

fn upper_exponent(t: usize) -> f64 {
    1.0 / (1u64 << (t - 1)) as f64
}

/// Bracketed spectral norm for t >= 2: alternating-maximization lower bound
/// and the power-matrix eigenvalue upper bound.
pub fn spectral_norm_hopm(
    phi: &MultiMap<f64>,
    opts: &HopmOptions,
    budget: &Budget,
) -> Result<NormBracket> {
    let t = phi.t();
    if t < 2 {
        return Err(Error::ArityTooSmall(t));
    }
    let (lower, witness) = hopm_lower(phi, opts)?;
    let (upper, flagged) = match a_matrix(phi, budget) {
        Ok(a) => {
            let decomp = eig(&a)?;
            (Some(decomp.max_eigenvalue().max(0.0).powf(upper_exponent(t))), false)
        }
        Err(Error::BudgetExceeded { .. }) => (None, true),
        Err(e) => return Err(e),
    };
    NormBracket { lower, upper, upper_budget_exceeded: flagged, witness }.enforce()
}

/// Per-partition norm: the combined bracket across orderings plus each
/// ordering's own bracket.
#[derive(Debug, Clone)]
pub struct PartitionNorm {
    pub combined: NormBracket,
    pub per_ordering: Vec<(OrderedPartition, NormBracket)>,
}

fn combine_orderings(
    per_ordering: Vec<(OrderedPartition, NormBracket)>,
) -> Result<PartitionNorm> {
    let mut best_lower = f64::NEG_INFINITY;
    let mut witness = Vec::new();
    let mut upper: Option<f64> = None;
    let mut flagged = false;
    for (_, b) in &per_ordering {
        if b.lower > best_lower {
            best_lower = b.lower;
            witness = b.witness.clone();
        }
        flagged |= b.upper_budget_exceeded;
        if let Some(u) = b.upper {
            upper = Some(match upper {
                None => u,
                Some(cur) => cur.min(u),
            });
        }
    }
    if let Some(u) = upper {
        if best_lower > u && best_lower - u > 1e-6 * best_lower.max(1.0) {
            return Err(Error::OrderingDisagreement(format!(
                "max lower {best_lower} exceeds min upper {u} across {:?}",
                per_ordering.iter().map(|(o, _)| o.label()).collect::<Vec<_>>()
            )));
        }
    }
    let combined = NormBracket {
        lower: match upper {
            Some(u) => best_lower.min(u),
            None => best_lower,
        },
        upper,
        upper_budget_exceeded: flagged,
        witness,
    }
    .enforce()?;
    Ok(PartitionNorm { combined, per_ordering })
}

fn tau_bracket(
    tau: &MultiMap<f64>,
    opts: &HopmOptions,
    budget: &Budget,
) -> Result<NormBracket> {
    if tau.t() == 2 {
        spectral_norm_bilinear(tau)
    } else {
        spectral_norm_hopm(tau, opts, budget)
    }
}

/// Largest eigenvalue of `h` with respect to `pi`: the spectral norm of the
/// flattened adjacency map, bracketed over all orderings.
pub fn lambda1_pi(
    h: &Hypergraph,
    pi: &Partition,
    opts: &HopmOptions,
    budget: &Budget,
) -> Result<PartitionNorm> {
    let mut per = Vec::new();
    for ordering in pi.orderings() {
        let tau = flatten(h, &ordering)?;
        let bracket = tau_bracket(&tau, opts, budget)?;
        per.push((ordering, bracket));
    }
    combine_orderings(per)
}

/// Dense shifted copy tau - q on every entry (J is all-ones on the basis),
/// used for the exact bilinear path and the power-matrix upper bound.
fn deviation_dense(tau: &MultiMap<f64>, q: f64) -> Result<MultiMap<f64>> {
    let values: Vec<f64> = tau.values().iter().map(|v| v - q).collect();
    MultiMap::from_values(tau.mode_dims().to_vec(), values, tau.symmetric_hint())
}

/// Second eigenvalue of `h` with respect to `pi`: the spectral norm of
/// tau - q J with q = k! |E| / n^k, bracketed over all orderings.
pub fn lambda2_pi(
    h: &Hypergraph,
    pi: &Partition,
    opts: &HopmOptions,
    budget: &Budget,
) -> Result<PartitionNorm> {
    let spec = DeviationSpec::for_hypergraph(h);
    let mut per = Vec::new();
    for ordering in pi.orderings() {
        let tau = flatten(h, &ordering)?;
        let bracket = if tau.t() == 2 {
            let dense = deviation_dense(&tau, spec.q)?;
            spectral_norm_bilinear(&dense)?
        } else {
            let lazy = DeviationMap::new(&tau, spec);
            let (lower, witness) = hopm_lower(&lazy, opts)?;
            let (upper, flagged) = match deviation_dense(&tau, spec.q)
                .and_then(|dense| a_matrix(&dense, budget))
            {
                Ok(a) => {
                    let decomp = eig(&a)?;
                    (
                        Some(decomp.max_eigenvalue().max(0.0).powf(upper_exponent(tau.t()))),
                        false,
                    )
                }
                Err(Error::BudgetExceeded { .. }) => (None, true),
                Err(e) => return Err(e),
            };
            NormBracket { lower, upper, upper_budget_exceeded: flagged, witness }.enforce()?
        };
        per.push((ordering, bracket));
    }
    combine_orderings(per)
}

/// Spectrum summary of the power matrix A of a flattening, for reports and
/// the positive-semidefiniteness check. For t = 2 the spectrum comes from
/// the small Gram side padded with exact zeros, so A itself is never formed.
#[derive(Debug, Clone, PartialEq)]
pub struct ASpectrum {
    pub dim: usize,
    pub mu1: f64,
    pub mu2: f64,
    pub min_eig: f64,
}

pub fn a_spectrum(phi: &MultiMap<f64>, budget: &Budget) -> Result<ASpectrum> {
    let t = phi.t();
    if t < 2 {
        return Err(Error::ArityTooSmall(t));
    }
    if t == 2 {
        let d = phi.mode_dims();
        let (d1, d2) = (d[0], d[1]);
        let gram = gram_small_side(d1, d2, phi.values());
        let decomp = eig(&gram)?;
        let padding = d1.saturating_sub(gram.dim());
        let mut mu: Vec<f64> = decomp.eigenvalues.clone();
        mu.extend(std::iter::repeat_n(0.0, padding));
        let mu2 = if mu.len() > 1 { mu[1] } else { 0.0 };
        let min_eig = mu.iter().cloned().fold(f64::INFINITY, f64::min);
        Ok(ASpectrum { dim: d1, mu1: mu[0], mu2, min_eig })
    } else {
        let a = a_matrix(phi, budget)?;
        let decomp = eig(&a)?;
        let mu2 = if decomp.dim() > 1 { decomp.eigenvalues[1] } else { 0.0 };
        Ok(ASpectrum {
            dim: decomp.dim(),
            mu1: decomp.eigenvalues[0],
            mu2,
            min_eig: decomp.min_eigenvalue(),
        })
    }
}

/// Leading-eigenvector alignment report: gap ratio, distance from x to the
/// leading eigenvector (closest sign), and the largest sampled quadratic
/// form orthogonal to x.
///
/// Contract, enforced by tests on constructed instances: if the quadratic
/// form at x is at least (1 - eps) mu1 and |mu2| <= eps mu1, then
/// alignment <= 3 sqrt(eps).
#[derive(Debug, Clone, PartialEq)]
pub struct Alignment {
    pub gap_ratio: f64,
    pub alignment: f64,
    pub max_perp_quadratic: f64,
}

pub fn alignment_check(m: &SymMatrix, x: &[f64]) -> Result<Alignment> {
    if x.len() != m.dim() {
        return Err(Error::DimMismatch(format!(
            "vector length {} for a {} x {} matrix",
            x.len(),
            m.dim(),
            m.dim()
        )));
    }
    let nrm = l2(x);
    if nrm == 0.0 {
        return Err(Error::DimMismatch("alignment_check needs a nonzero vector".into()));
    }
    let x: Vec<f64> = x.iter().map(|v| v / nrm).collect();
    let decomp = eig(m)?;
    let mu1 = decomp.eigenvalues[0].abs();
    if mu1 == 0.0 {
        return Err(Error::DegenerateSpectrum);
    }
    let gap_ratio = if decomp.dim() > 1 { decomp.eigenvalues[1].abs() / mu1 } else { 0.0 };
    let u = decomp.eigenvector(0);
    let d_plus: f64 = u.iter().zip(&x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    let d_minus: f64 = u.iter().zip(&x).map(|(a, b)| (a + b) * (a + b)).sum::<f64>().sqrt();
    let alignment = d_plus.min(d_minus);
    let mut max_perp = {
        // The projection of u away from x is the extremal orthogonal
        // direction; include it alongside random samples.
        let ux = dot(u, &x);
        let mut y: Vec<f64> = u.iter().zip(&x).map(|(a, b)| a - ux * b).collect();
        let n = l2(&y);
        if n > 1e-12 {
            for v in &mut y {
                *v /= n;
            }
            let my = m.apply(&y);
            (dot(&y, &my) / mu1).abs()
        } else {
            0.0
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0x414C4947);
    for _ in 0..32 {
        let mut y = random_unit(x.len(), &mut rng);
        let yx = dot(&y, &x);
        for (v, &b) in y.iter_mut().zip(&x) {
            *v -= yx * b;
        }
        let n = l2(&y);
        if n <= 1e-12 {
            continue;
        }
        for v in &mut y {
            *v /= n;
        }
        let my = m.apply(&y);
        max_perp = max_perp.max((dot(&y, &my) / mu1).abs());
    }
    Ok(Alignment { gap_ratio, alignment, max_perp_quadratic: max_perp })
}
