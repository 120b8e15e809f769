//! Dense multilinear maps: flattened adjacency maps, the all-ones map, the
//! star product and its 2^s powers, the interleaved square matrix of the top
//! power, and the lazy deviation form.
//!
//! Maps are stored on the standard basis, row-major over modes, and extended
//! by linearity through [`MultiForm::eval`]. The scalar type is generic so
//! the same pipeline runs in f64 for spectral work and in checked i128 for
//! exact counting.

use std::sync::atomic::{AtomicBool, Ordering};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::indexing::{checked_pow, IndexCodec, MixedCodec, OrderedPartition};
use crate::spectral::SymMatrix;

/// Entry cap for dense power computations and brute-force enumerations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_entries: u128,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_entries: 100_000_000 }
    }
}

impl Budget {
    pub fn new(max_entries: u128) -> Self {
        Budget { max_entries }
    }

    pub fn charge(&self, required: u128) -> Result<()> {
        if required > self.max_entries {
            Err(Error::BudgetExceeded { required, cap: self.max_entries })
        } else {
            Ok(())
        }
    }
}

/// Scalar admitted in a [`MultiMap`]. Integer scalars report overflow.
pub trait Scalar: Copy + PartialEq + Send + Sync + std::fmt::Debug + 'static {
    const ZERO: Self;
    const ONE: Self;
    fn is_finite_scalar(self) -> bool;
    /// Dot product of equal-length slices; None on overflow.
    fn dot(a: &[Self], b: &[Self]) -> Option<Self>;
}

impl Scalar for f64 {
    const ZERO: Self = 0.0;
    const ONE: Self = 1.0;

    fn is_finite_scalar(self) -> bool {
        self.is_finite()
    }

    fn dot(a: &[Self], b: &[Self]) -> Option<Self> {
        debug_assert_eq!(a.len(), b.len());
        let mut acc = 0.0;
        for (&x, &y) in a.iter().zip(b) {
            acc += x * y;
        }
        Some(acc)
    }
}

impl Scalar for i128 {
    const ZERO: Self = 0;
    const ONE: Self = 1;

    fn is_finite_scalar(self) -> bool {
        true
    }

    fn dot(a: &[Self], b: &[Self]) -> Option<Self> {
        debug_assert_eq!(a.len(), b.len());
        let mut acc: i128 = 0;
        for (&x, &y) in a.iter().zip(b) {
            acc = acc.checked_add(x.checked_mul(y)?)?;
        }
        Some(acc)
    }
}

/// Dense t-linear map stored on the standard basis.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiMap<T = f64> {
    codec: MixedCodec,
    values: Vec<T>,
    symmetric_hint: bool,
}

impl<T: Scalar> MultiMap<T> {
    pub fn from_values(
        mode_dims: impl Into<Vec<usize>>,
        values: Vec<T>,
        symmetric_hint: bool,
    ) -> Result<Self> {
        let codec = MixedCodec::new(mode_dims)?;
        if values.len() != codec.len() {
            return Err(Error::DimMismatch(format!(
                "{} values for mode dims {:?} (need {})",
                values.len(),
                codec.dims(),
                codec.len()
            )));
        }
        if !values.iter().all(|v| v.is_finite_scalar()) {
            return Err(Error::NonFiniteValue);
        }
        Ok(MultiMap { codec, values, symmetric_hint })
    }

    pub fn zeros(mode_dims: impl Into<Vec<usize>>) -> Result<Self> {
        let codec = MixedCodec::new(mode_dims)?;
        let values = vec![T::ZERO; codec.len()];
        Ok(MultiMap { codec, values, symmetric_hint: false })
    }

    pub fn mode_dims(&self) -> &[usize] {
        self.codec.dims()
    }

    /// Number of modes.
    pub fn t(&self) -> usize {
        self.codec.dims().len()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn symmetric_hint(&self) -> bool {
        self.symmetric_hint
    }

    /// Value on the basis tuple with one flat index per mode.
    pub fn value_at(&self, idx: &[usize]) -> Result<T> {
        Ok(self.values[self.codec.encode(idx)?])
    }
}

/// Adjacency indicator on an ordered k-tuple: 1 exactly when the entry
/// multiset is an edge.
pub fn adjacency_eval(h: &Hypergraph, tuple: &[u32]) -> Result<f64> {
    if tuple.len() != h.k() {
        return Err(Error::WrongArity { got: tuple.len(), expected: h.k() });
    }
    for &v in tuple {
        if v as usize >= h.n() {
            return Err(Error::OutOfRangeVertex { vertex: v, n: h.n() as u32 });
        }
    }
    let mut scratch = Vec::with_capacity(tuple.len());
    Ok(if h.is_adjacent(tuple, &mut scratch) { 1.0 } else { 0.0 })
}

/// Flattens the adjacency map of `h` along `pi`: the t-linear map with mode
/// dims (n^k1, ..., n^kt) whose basis values are adjacency indicators of the
/// concatenated vertex tuple.
pub fn flatten(h: &Hypergraph, pi: &OrderedPartition) -> Result<MultiMap<f64>> {
    flatten_as(h, pi)
}

/// [`flatten`] with a caller-chosen scalar (i128 for exact counting).
pub fn flatten_as<T: Scalar>(h: &Hypergraph, pi: &OrderedPartition) -> Result<MultiMap<T>> {
    if pi.k() != h.k() {
        return Err(Error::ArityMismatch(format!(
            "partition sums to {}, hypergraph uniformity is {}",
            pi.k(),
            h.k()
        )));
    }
    let dims = pi.mode_dims(h.n())?;
    let k = h.k();
    // Modes are base-n blocks, so the global row-major index over the modes
    // is the base-n index over all k vertex digits at once.
    let codec = IndexCodec::new(h.n(), k)?;
    let values: Vec<T> = (0..codec.len())
        .into_par_iter()
        .map_init(
            || (vec![0usize; k], vec![0u32; k], Vec::with_capacity(k)),
            |(digits, tuple, scratch), flat| {
                codec.decode_into(flat, digits);
                for (t, &d) in tuple.iter_mut().zip(digits.iter()) {
                    *t = d as u32;
                }
                if h.is_adjacent(tuple, scratch) {
                    T::ONE
                } else {
                    T::ZERO
                }
            },
        )
        .collect();
    let equal_parts = pi.parts().windows(2).all(|w| w[0] == w[1]);
    MultiMap::from_values(dims, values, equal_parts)
}

/// Dense all-ones map on the given mode dims.
pub fn all_ones_map(mode_dims: impl Into<Vec<usize>>) -> Result<MultiMap<f64>> {
    let codec = MixedCodec::new(mode_dims)?;
    let equal = codec.dims().windows(2).all(|w| w[0] == w[1]);
    let values = vec![1.0; codec.len()];
    Ok(MultiMap { codec, values, symmetric_hint: equal })
}

/// Evaluates the all-ones map without materializing it: the product of the
/// coordinate sums of the inputs.
pub fn j_eval(mode_dims: &[usize], xs: &[&[f64]]) -> Result<f64> {
    check_inputs(mode_dims, xs)?;
    Ok(xs.iter().map(|x| x.iter().sum::<f64>()).product())
}

fn check_inputs(mode_dims: &[usize], xs: &[&[f64]]) -> Result<()> {
    if xs.len() != mode_dims.len() {
        return Err(Error::DimMismatch(format!(
            "{} input vectors for {} modes",
            xs.len(),
            mode_dims.len()
        )));
    }
    for (i, (x, &d)) in xs.iter().zip(mode_dims).enumerate() {
        if x.len() != d {
            return Err(Error::DimMismatch(format!(
                "input {} has length {}, mode dim is {}",
                i,
                x.len(),
                d
            )));
        }
    }
    Ok(())
}

/// Contraction of two t-linear maps over their shared last mode, yielding a
/// (t-1)-linear map on squared modes: out[(u1 v1), ...] = sum_j
/// phi[u..., j] psi[v..., j].
pub fn star_product<T: Scalar>(phi: &MultiMap<T>, psi: &MultiMap<T>) -> Result<MultiMap<T>> {
    if phi.mode_dims() != psi.mode_dims() {
        return Err(Error::DimMismatch(format!(
            "{:?} vs {:?}",
            phi.mode_dims(),
            psi.mode_dims()
        )));
    }
    let t = phi.t();
    if t < 2 {
        return Err(Error::ArityTooSmall(t));
    }
    let dims = phi.mode_dims();
    let last = dims[t - 1];
    let lead: Vec<usize> = dims[..t - 1].to_vec();
    let out_dims: Vec<usize> = lead
        .iter()
        .map(|&d| d.checked_mul(d).ok_or(Error::DimOverflow { base: d, exp: 2 }))
        .collect::<Result<_>>()?;
    let out_codec = MixedCodec::new(out_dims.clone())?;
    let mut values = vec![T::ZERO; out_codec.len()];
    let overflow = AtomicBool::new(false);
    values.par_iter_mut().enumerate().for_each_init(
        || vec![0usize; t - 1],
        |digits, (flat, slot)| {
            out_codec.decode_into(flat, digits);
            // Each output digit g over d^2 splits as g = u*d + v with u from
            // phi's side and v from psi's.
            let mut a = 0usize;
            let mut b = 0usize;
            for (&g, &d) in digits.iter().zip(&lead) {
                a = a * d + g / d;
                b = b * d + g % d;
            }
            let ra = &phi.values[a * last..(a + 1) * last];
            let rb = &psi.values[b * last..(b + 1) * last];
            match T::dot(ra, rb) {
                Some(v) => *slot = v,
                None => overflow.store(true, Ordering::Relaxed),
            }
        },
    );
    if overflow.load(Ordering::Relaxed) {
        return Err(Error::CountOverflow);
    }
    MultiMap::from_values(out_dims, values, phi.symmetric_hint && psi.symmetric_hint)
}

/// Entries allocated by `power(phi, s)` across all levels; u128::MAX when
/// the count itself overflows.
pub fn power_entries(mode_dims: &[usize], s: usize) -> u128 {
    let mut total: u128 = 0;
    for r in 1..=s {
        let mut prod: u128 = 1;
        for &d in &mode_dims[..mode_dims.len() - r] {
            let mut p = d as u128;
            for _ in 0..r {
                p = match p.checked_mul(p) {
                    Some(v) => v,
                    None => return u128::MAX,
                };
            }
            prod = match prod.checked_mul(p) {
                Some(v) => v,
                None => return u128::MAX,
            };
        }
        total = match total.checked_add(prod) {
            Some(v) => v,
            None => return u128::MAX,
        };
    }
    total
}

/// 2^s-th star power: phi, phi * phi, (phi*phi) * (phi*phi), ... Level 0 is
/// phi itself; level s has mode dims (d1^{2^s}, ..., d_{t-s}^{2^s}).
pub fn power<T: Scalar>(phi: &MultiMap<T>, s: usize, budget: &Budget) -> Result<MultiMap<T>> {
    let t = phi.t();
    if s >= t {
        return Err(Error::LevelOutOfRange { level: s, modes: t });
    }
    budget.charge(power_entries(phi.mode_dims(), s))?;
    let mut cur = phi.clone();
    for _ in 0..s {
        cur = star_product(&cur, &cur)?;
    }
    Ok(cur)
}

/// Raw entries of the interleaved square matrix of phi^{2^{t-1}}: dimension
/// d1^{2^{t-2}}, entry (r, c) read off at the digit string (r1, c1, r2, c2,
/// ...) over base d1.
pub fn a_values<T: Scalar>(phi: &MultiMap<T>, budget: &Budget) -> Result<(usize, Vec<T>)> {
    let t = phi.t();
    if t < 2 {
        return Err(Error::ArityTooSmall(t));
    }
    let d1 = phi.mode_dims()[0];
    let half = 1usize << (t - 2);
    let dim = checked_pow(d1, half).ok_or(Error::DimOverflow { base: d1, exp: half })?;
    let matrix_entries = (dim as u128) * (dim as u128);
    budget.charge(power_entries(phi.mode_dims(), t - 1).saturating_add(matrix_entries))?;
    let top = power(phi, t - 1, budget)?;
    let side_codec = IndexCodec::new(d1, half)?;
    let full_codec = IndexCodec::new(d1, 2 * half)?;
    let mut values = vec![T::ZERO; dim * dim];
    values.par_chunks_mut(dim).enumerate().for_each_init(
        || (vec![0usize; half], vec![0usize; half], vec![0usize; 2 * half]),
        |(rd, cd, inter), (r, row)| {
            side_codec.decode_into(r, rd);
            for (c, slot) in row.iter_mut().enumerate() {
                side_codec.decode_into(c, cd);
                for i in 0..half {
                    inter[2 * i] = rd[i];
                    inter[2 * i + 1] = cd[i];
                }
                let flat = full_codec.encode(inter).expect("digits in range");
                *slot = top.values[flat];
            }
        },
    );
    Ok((dim, values))
}

/// Symmetric matrix of the top power, with the residual asymmetry of the raw
/// entries (exactly 0 for integer-valued flattenings).
pub fn a_matrix_with_asym(phi: &MultiMap<f64>, budget: &Budget) -> Result<(SymMatrix, f64)> {
    let (dim, values) = a_values(phi, budget)?;
    Ok(SymMatrix::from_dense_symmetrized(dim, values))
}

pub fn a_matrix(phi: &MultiMap<f64>, budget: &Budget) -> Result<SymMatrix> {
    Ok(a_matrix_with_asym(phi, budget)?.0)
}

/// Density scalar q = k! |E| / n^k for the deviation form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviationSpec {
    pub q: f64,
}

pub fn factorial(k: usize) -> u128 {
    (1..=k as u128).product()
}

impl DeviationSpec {
    pub fn for_hypergraph(h: &Hypergraph) -> Self {
        let nk = (h.n() as f64).powi(h.k() as i32);
        DeviationSpec { q: factorial(h.k()) as f64 * h.edge_count() as f64 / nk }
    }
}

/// Multilinear form interface shared by dense maps and the lazy deviation
/// form; enough for alternating maximization.
pub trait MultiForm: Sync {
    fn mode_dims(&self) -> &[usize];
    /// Full evaluation at one vector per mode.
    fn eval(&self, xs: &[&[f64]]) -> Result<f64>;
    /// Representing vector of the partial map with every mode but `mode`
    /// fixed: eval(xs with xs[mode] = y) = <w, y>. Input `xs[mode]` is
    /// ignored.
    fn contract_all_but(&self, mode: usize, xs: &[&[f64]]) -> Result<Vec<f64>>;
}

fn contract_right(buf: &[f64], x: &[f64]) -> Vec<f64> {
    buf.chunks_exact(x.len()).map(|row| f64::dot(row, x).unwrap()).collect()
}

fn contract_left(buf: &[f64], x: &[f64]) -> Vec<f64> {
    let rest = buf.len() / x.len();
    let mut out = vec![0.0; rest];
    for (&xa, chunk) in x.iter().zip(buf.chunks_exact(rest)) {
        if xa != 0.0 {
            for (o, &c) in out.iter_mut().zip(chunk) {
                *o += xa * c;
            }
        }
    }
    out
}

impl MultiForm for MultiMap<f64> {
    fn mode_dims(&self) -> &[usize] {
        self.codec.dims()
    }

    fn eval(&self, xs: &[&[f64]]) -> Result<f64> {
        check_inputs(self.mode_dims(), xs)?;
        let mut buf: Vec<f64> = self.values.clone();
        for x in xs.iter().rev() {
            buf = contract_right(&buf, x);
        }
        Ok(buf[0])
    }

    fn contract_all_but(&self, mode: usize, xs: &[&[f64]]) -> Result<Vec<f64>> {
        let dims = self.mode_dims();
        if mode >= dims.len() {
            return Err(Error::DimMismatch(format!(
                "mode {mode} out of range for {} modes",
                dims.len()
            )));
        }
        if xs.len() != dims.len() {
            return Err(Error::DimMismatch(format!(
                "{} input vectors for {} modes",
                xs.len(),
                dims.len()
            )));
        }
        for (i, (x, &d)) in xs.iter().zip(dims).enumerate() {
            if i != mode && x.len() != d {
                return Err(Error::DimMismatch(format!(
                    "input {} has length {}, mode dim is {}",
                    i,
                    x.len(),
                    d
                )));
            }
        }
        let mut buf: Vec<f64> = self.values.clone();
        for x in xs[mode + 1..].iter().rev() {
            buf = contract_right(&buf, x);
        }
        for x in &xs[..mode] {
            buf = contract_left(&buf, x);
        }
        Ok(buf)
    }
}

/// Lazy deviation form tau - q J: never materializes J.
pub struct DeviationMap<'a> {
    tau: &'a MultiMap<f64>,
    pub q: f64,
}

impl<'a> DeviationMap<'a> {
    pub fn new(tau: &'a MultiMap<f64>, spec: DeviationSpec) -> Self {
        DeviationMap { tau, q: spec.q }
    }
}

impl MultiForm for DeviationMap<'_> {
    fn mode_dims(&self) -> &[usize] {
        self.tau.mode_dims()
    }

    fn eval(&self, xs: &[&[f64]]) -> Result<f64> {
        let tau_val = self.tau.eval(xs)?;
        Ok(tau_val - self.q * xs.iter().map(|x| x.iter().sum::<f64>()).product::<f64>())
    }

    fn contract_all_but(&self, mode: usize, xs: &[&[f64]]) -> Result<Vec<f64>> {
        let mut w = self.tau.contract_all_but(mode, xs)?;
        let others: f64 = xs
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != mode)
            .map(|(_, x)| x.iter().sum::<f64>())
            .product();
        let shift = self.q * others;
        for slot in &mut w {
            *slot -= shift;
        }
        Ok(w)
    }
}

/// Kronecker product a (x) b, row-major: out[i*|b| + j] = a[i] b[j].
pub fn kron(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for &x in a {
        for &y in b {
            out.push(x * y);
        }
    }
    out
}

/// 2^s-fold Kronecker power of x.
pub fn kron_power(x: &[f64], s: usize) -> Vec<f64> {
    let mut out = x.to_vec();
    for _ in 0..s {
        out = kron(&out, &out);
    }
    out
}

/// Coordinate action of the level-s interleaving swap on a vector over
/// base_dim^(2^s).
pub fn gamma_permute(s: usize, base_dim: usize, x: &[f64]) -> Result<Vec<f64>> {
    let mut out = vec![0.0; x.len()];
    for (i, slot) in out.iter_mut().enumerate() {
        *slot = x[crate::indexing::gamma_apply(s, base_dim, i)?];
    }
    Ok(out)
}

/// Binary fixture dump: u32 LE mode count, u64 LE mode dims, f64 LE values
/// row-major.
pub fn write_multimap_dump(map: &MultiMap<f64>) -> Vec<u8> {
    let dims = map.mode_dims();
    let mut out = Vec::with_capacity(4 + 8 * dims.len() + 8 * map.len());
    out.extend_from_slice(&(dims.len() as u32).to_le_bytes());
    for &d in dims {
        out.extend_from_slice(&(d as u64).to_le_bytes());
    }
    for &v in map.values() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn read_multimap_dump(bytes: &[u8]) -> Result<MultiMap<f64>> {
    let header = bytes
        .get(..4)
        .ok_or_else(|| Error::MalformedDump("shorter than the mode count field".into()))?;
    let t = u32::from_le_bytes(header.try_into().unwrap()) as usize;
    if t == 0 {
        return Err(Error::MalformedDump("zero modes".into()));
    }
    let dims_end = 4 + 8 * t;
    let dim_bytes = bytes
        .get(4..dims_end)
        .ok_or_else(|| Error::MalformedDump(format!("truncated dim list for {t} modes")))?;
    let mut dims = Vec::with_capacity(t);
    let mut total: u128 = 1;
    for chunk in dim_bytes.chunks_exact(8) {
        let d = u64::from_le_bytes(chunk.try_into().unwrap());
        total = total
            .checked_mul(d as u128)
            .ok_or_else(|| Error::MalformedDump("mode dim product overflows".into()))?;
        dims.push(usize::try_from(d).map_err(|_| {
            Error::MalformedDump(format!("mode dim {d} exceeds the address space"))
        })?);
    }
    let expected = (8u128)
        .checked_mul(total)
        .and_then(|b| b.checked_add(dims_end as u128))
        .ok_or_else(|| Error::MalformedDump("value section size overflows".into()))?;
    if bytes.len() as u128 != expected {
        return Err(Error::MalformedDump(format!(
            "{} bytes, dims {:?} require {expected}",
            bytes.len(),
            dims
        )));
    }
    let values: Vec<f64> = bytes[dims_end..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    if !values.iter().all(|v| v.is_finite()) {
        return Err(Error::MalformedDump("non-finite value".into()));
    }
    MultiMap::from_values(dims, values, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::{gen_random, GenSpec};
    use crate::indexing::gamma_apply;

    fn triangle() -> Hypergraph {
        Hypergraph::new(3, 2, vec![vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap()
    }

    fn pi(parts: &[usize]) -> OrderedPartition {
        OrderedPartition::new(parts.to_vec()).unwrap()
    }

    #[test]
    fn adjacency_eval_is_symmetric_and_checked() {
        let h = triangle();
        assert_eq!(adjacency_eval(&h, &[0, 1]).unwrap(), 1.0);
        assert_eq!(adjacency_eval(&h, &[1, 0]).unwrap(), 1.0);
        assert_eq!(adjacency_eval(&h, &[0, 0]).unwrap(), 0.0);
        assert!(matches!(
            adjacency_eval(&h, &[0, 3]),
            Err(Error::OutOfRangeVertex { vertex: 3, n: 3 })
        ));
        let loopy = Hypergraph::new(2, 3, vec![vec![0, 0, 1]]).unwrap();
        assert_eq!(adjacency_eval(&loopy, &[0, 1, 0]).unwrap(), 1.0);
    }

    #[test]
    fn flatten_triangle_is_adjacency_matrix() {
        let tau = flatten(&triangle(), &pi(&[1, 1])).unwrap();
        assert_eq!(tau.mode_dims(), &[3, 3]);
        #[rustfmt::skip]
        let expect = vec![
            0.0, 1.0, 1.0,
            1.0, 0.0, 1.0,
            1.0, 1.0, 0.0,
        ];
        assert_eq!(tau.values(), expect.as_slice());
        assert!(tau.symmetric_hint());
    }

    #[test]
    fn flatten_single_edge_split_1_2() {
        let h = Hypergraph::new(3, 3, vec![vec![0, 1, 2]]).unwrap();
        let tau = flatten(&h, &pi(&[1, 2])).unwrap();
        assert_eq!(tau.mode_dims(), &[3, 9]);
        let nonzero = tau.values().iter().filter(|&&v| v != 0.0).count();
        assert_eq!(nonzero, 6);
        assert!(!tau.symmetric_hint());
    }

    #[test]
    fn flatten_empty_is_zero() {
        let h = Hypergraph::new(4, 2, Vec::<Vec<u32>>::new()).unwrap();
        let tau = flatten(&h, &pi(&[1, 1])).unwrap();
        assert!(tau.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn flatten_rejects_wrong_partition_sum() {
        assert!(matches!(
            flatten(&triangle(), &pi(&[1, 2])),
            Err(Error::ArityMismatch(_))
        ));
    }

    #[test]
    fn j_eval_examples() {
        let dims = [3usize, 3];
        // Standard basis inputs hit a single all-ones entry.
        let e0 = [1.0, 0.0, 0.0];
        let e2 = [0.0, 0.0, 1.0];
        assert_eq!(j_eval(&dims, &[&e0, &e2]).unwrap(), 1.0);
        // Unit-scaled all-ones inputs give dim^{t/2} = 3 here.
        let hat = [1.0 / 3f64.sqrt(); 3];
        assert!((j_eval(&dims, &[&hat, &hat]).unwrap() - 3.0).abs() < 1e-12);
        // Anything orthogonal to all-ones kills the product.
        let perp = [1.0, -1.0, 0.0];
        assert!(j_eval(&dims, &[&hat, &perp]).unwrap().abs() < 1e-12);
        assert!(matches!(j_eval(&dims, &[&e0]), Err(Error::DimMismatch(_))));
        // Dense map agrees with the lazy product form.
        let dense = all_ones_map(vec![3, 3]).unwrap();
        let x = [0.3, -1.2, 2.0];
        let y = [1.5, 0.25, -0.75];
        let lazy = j_eval(&dims, &[&x, &y]).unwrap();
        assert!((dense.eval(&[&x, &y]).unwrap() - lazy).abs() < 1e-12);
    }

    #[test]
    fn star_product_bilinear_is_gram() {
        let id = MultiMap::from_values(vec![2, 2], vec![1.0, 0.0, 0.0, 1.0], true).unwrap();
        let g = star_product(&id, &id).unwrap();
        assert_eq!(g.mode_dims(), &[4]);
        assert_eq!(g.values(), &[1.0, 0.0, 0.0, 1.0]);

        let m = MultiMap::from_values(vec![2, 2], vec![1.0, 0.0, 0.0, 0.0], false).unwrap();
        let g = star_product(&m, &m).unwrap();
        assert_eq!(g.values(), &[1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn star_product_matches_eval_oracle() {
        // Independent path: evaluate phi on basis vectors via linear
        // extension and contract by hand.
        let h = gen_random(&GenSpec { n: 2, k: 3, p: 0.7, seed: 3, allow_loops: true, bias: None })
            .unwrap();
        let phi = flatten(&h, &pi(&[1, 1, 1])).unwrap();
        let st = star_product(&phi, &phi).unwrap();
        let basis: Vec<Vec<f64>> = (0..2)
            .map(|i| (0..2).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        for u1 in 0..2 {
            for v1 in 0..2 {
                for u2 in 0..2 {
                    for v2 in 0..2 {
                        let mut expect = 0.0;
                        for j in 0..2 {
                            let a = phi
                                .eval(&[&basis[u1], &basis[u2], &basis[j]])
                                .unwrap();
                            let b = phi
                                .eval(&[&basis[v1], &basis[v2], &basis[j]])
                                .unwrap();
                            expect += a * b;
                        }
                        let got = st.value_at(&[u1 * 2 + v1, u2 * 2 + v2]).unwrap();
                        assert!((got - expect).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn star_product_errors() {
        let a = MultiMap::<f64>::zeros(vec![2, 2]).unwrap();
        let b = MultiMap::<f64>::zeros(vec![2, 3]).unwrap();
        assert!(matches!(star_product(&a, &b), Err(Error::DimMismatch(_))));
        let single = MultiMap::<f64>::zeros(vec![4]).unwrap();
        assert!(matches!(star_product(&single, &single), Err(Error::ArityTooSmall(1))));
    }

    #[test]
    fn power_levels() {
        let budget = Budget::default();
        let tau = flatten(&triangle(), &pi(&[1, 1])).unwrap();
        let p0 = power(&tau, 0, &budget).unwrap();
        assert_eq!(p0, tau);
        // K3 squared: diagonal 2, off-diagonal 1, read through the
        // interleaved single mode of dim 9.
        let p1 = power(&tau, 1, &budget).unwrap();
        assert_eq!(p1.mode_dims(), &[9]);
        for u in 0..3 {
            for v in 0..3 {
                let expect = if u == v { 2.0 } else { 1.0 };
                assert_eq!(p1.value_at(&[u * 3 + v]).unwrap(), expect);
            }
        }
        assert!(matches!(
            power(&tau, 2, &budget),
            Err(Error::LevelOutOfRange { level: 2, modes: 2 })
        ));
    }

    #[test]
    fn power_recursion_matches_explicit_star_tree() {
        let budget = Budget::default();
        let h = gen_random(&GenSpec { n: 2, k: 3, p: 0.6, seed: 11, allow_loops: true, bias: None })
            .unwrap();
        let phi = flatten(&h, &pi(&[1, 1, 1])).unwrap();
        let via_power = power(&phi, 2, &budget).unwrap();
        let sq = star_product(&phi, &phi).unwrap();
        let explicit = star_product(&sq, &sq).unwrap();
        assert_eq!(via_power, explicit);
    }

    #[test]
    fn power_respects_budget() {
        let tau = flatten(&triangle(), &pi(&[1, 1])).unwrap();
        let tiny = Budget::new(4);
        assert!(matches!(
            power(&tau, 1, &tiny),
            Err(Error::BudgetExceeded { required: 9, cap: 4 })
        ));
    }

    #[test]
    fn a_matrix_graph_case_is_m_squared() {
        let budget = Budget::default();
        let tau = flatten(&triangle(), &pi(&[1, 1])).unwrap();
        let (a, asym) = a_matrix_with_asym(&tau, &budget).unwrap();
        assert_eq!(asym, 0.0);
        assert_eq!(a.dim(), 3);
        // Integer oracle: square the adjacency matrix directly.
        let m = [[0i64, 1, 1], [1, 0, 1], [1, 1, 0]];
        for r in 0..3 {
            for c in 0..3 {
                let expect: i64 = (0..3).map(|j| m[r][j] * m[j][c]).sum();
                assert_eq!(a.get(r, c), expect as f64);
            }
        }
    }

    #[test]
    fn a_matrix_empty_is_zero() {
        let h = Hypergraph::new(3, 2, Vec::<Vec<u32>>::new()).unwrap();
        let tau = flatten(&h, &pi(&[1, 1])).unwrap();
        let a = a_matrix(&tau, &Budget::default()).unwrap();
        for r in 0..3 {
            for c in 0..3 {
                assert_eq!(a.get(r, c), 0.0);
            }
        }
    }

    #[test]
    fn a_matrix_symmetric_exactly_for_integer_data() {
        for seed in 0..3 {
            let h = gen_random(&GenSpec {
                n: 3,
                k: 3,
                p: 0.5,
                seed,
                allow_loops: false,
                bias: None,
            })
            .unwrap();
            let tau = flatten(&h, &pi(&[1, 1, 1])).unwrap();
            let (dim, raw) = a_values(&tau, &Budget::default()).unwrap();
            assert_eq!(dim, 9);
            for r in 0..dim {
                for c in 0..dim {
                    assert_eq!(raw[r * dim + c], raw[c * dim + r]);
                }
            }
        }
    }

    #[test]
    fn deviation_map_cancels_all_ones_direction() {
        let h = gen_random(&GenSpec { n: 5, k: 2, p: 0.6, seed: 2, allow_loops: false, bias: None })
            .unwrap();
        let tau = flatten(&h, &pi(&[1, 1])).unwrap();
        let spec = DeviationSpec::for_hypergraph(&h);
        let dev = DeviationMap::new(&tau, spec);
        let hat = vec![1.0 / 5f64.sqrt(); 5];
        let v = dev.eval(&[&hat, &hat]).unwrap();
        assert!(v.abs() < 1e-10, "deviation at all-ones: {v}");
    }

    #[test]
    fn deviation_map_with_q_zero_is_tau() {
        let tau = flatten(&triangle(), &pi(&[1, 1])).unwrap();
        let dev = DeviationMap::new(&tau, DeviationSpec { q: 0.0 });
        let x = [0.2, -0.4, 0.9];
        let y = [1.0, 0.5, -0.25];
        assert_eq!(dev.eval(&[&x, &y]).unwrap(), tau.eval(&[&x, &y]).unwrap());
    }

    #[test]
    fn deviation_matrix_entries_for_triangle() {
        // q = 2*3/9 = 2/3; entries are M - (2/3) J.
        let tau = flatten(&triangle(), &pi(&[1, 1])).unwrap();
        let spec = DeviationSpec::for_hypergraph(&triangle());
        assert!((spec.q - 2.0 / 3.0).abs() < 1e-15);
        let dev = DeviationMap::new(&tau, spec);
        let basis: Vec<Vec<f64>> = (0..3)
            .map(|i| (0..3).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        for r in 0..3 {
            for c in 0..3 {
                let m = if r == c { 0.0 } else { 1.0 };
                let got = dev.eval(&[&basis[r], &basis[c]]).unwrap();
                assert!((got - (m - 2.0 / 3.0)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn contract_all_but_matches_basis_evaluation() {
        let h = gen_random(&GenSpec { n: 3, k: 3, p: 0.6, seed: 5, allow_loops: true, bias: None })
            .unwrap();
        let phi = flatten(&h, &pi(&[1, 2])).unwrap();
        let x0 = vec![0.3, -0.1, 0.8];
        let x1 = vec![0.2, 0.9, -0.5, 0.1, 0.0, 0.4, -0.2, 0.6, 0.7];
        let xs: Vec<&[f64]> = vec![&x0, &x1];
        for mode in 0..2 {
            let w = phi.contract_all_but(mode, &xs).unwrap();
            let d = phi.mode_dims()[mode];
            assert_eq!(w.len(), d);
            for j in 0..d {
                let mut basis = vec![0.0; d];
                basis[j] = 1.0;
                let mut probe = xs.clone();
                probe[mode] = &basis;
                let direct = phi.eval(&probe).unwrap();
                assert!((w[j] - direct).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn deviation_contraction_matches_basis_evaluation() {
        let h = gen_random(&GenSpec { n: 4, k: 2, p: 0.5, seed: 8, allow_loops: false, bias: None })
            .unwrap();
        let tau = flatten(&h, &pi(&[1, 1])).unwrap();
        let dev = DeviationMap::new(&tau, DeviationSpec::for_hypergraph(&h));
        let x0 = vec![0.1, 0.2, -0.3, 0.4];
        let x1 = vec![-0.5, 0.6, 0.7, 0.8];
        let xs: Vec<&[f64]> = vec![&x0, &x1];
        for mode in 0..2 {
            let w = dev.contract_all_but(mode, &xs).unwrap();
            for j in 0..4 {
                let mut basis = vec![0.0; 4];
                basis[j] = 1.0;
                let mut probe = xs.clone();
                probe[mode] = &basis;
                let direct = dev.eval(&probe).unwrap();
                assert!((w[j] - direct).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn kron_and_gamma_helpers() {
        let a = [1.0, 2.0];
        let b = [3.0, 5.0];
        assert_eq!(kron(&a, &b), vec![3.0, 5.0, 6.0, 10.0]);
        let kp = kron_power(&a, 1);
        assert_eq!(kp, vec![1.0, 2.0, 2.0, 4.0]);

        let x: Vec<f64> = (0..9).map(|i| i as f64).collect();
        let y = gamma_permute(1, 3, &x).unwrap();
        for i in 0..9 {
            assert_eq!(y[i], x[gamma_apply(1, 3, i).unwrap()]);
        }
    }

    #[test]
    fn dump_roundtrip_and_malformed_inputs() {
        let tau = flatten(&triangle(), &pi(&[1, 1])).unwrap();
        let bytes = write_multimap_dump(&tau);
        let back = read_multimap_dump(&bytes).unwrap();
        assert_eq!(back.mode_dims(), tau.mode_dims());
        assert_eq!(back.values(), tau.values());
        assert_eq!(write_multimap_dump(&back), bytes);

        assert!(matches!(read_multimap_dump(&[]), Err(Error::MalformedDump(_))));
        assert!(matches!(read_multimap_dump(&[0, 0, 0, 0]), Err(Error::MalformedDump(_))));
        // Truncated value section.
        assert!(matches!(
            read_multimap_dump(&bytes[..bytes.len() - 1]),
            Err(Error::MalformedDump(_))
        ));
        // Trailing garbage.
        let mut long = bytes.clone();
        long.push(0);
        assert!(matches!(read_multimap_dump(&long), Err(Error::MalformedDump(_))));
        // Giant dim claim must fail before allocating.
        let mut huge = Vec::new();
        huge.extend_from_slice(&2u32.to_le_bytes());
        huge.extend_from_slice(&u64::MAX.to_le_bytes());
        huge.extend_from_slice(&u64::MAX.to_le_bytes());
        assert!(matches!(read_multimap_dump(&huge), Err(Error::MalformedDump(_))));
        // Non-finite value.
        let nan_map =
            MultiMap::from_values(vec![2], vec![1.0, 2.0], false).unwrap();
        let mut nan_bytes = write_multimap_dump(&nan_map);
        let len = nan_bytes.len();
        nan_bytes[len - 8..].copy_from_slice(&f64::NAN.to_le_bytes());
        assert!(matches!(read_multimap_dump(&nan_bytes), Err(Error::MalformedDump(_))));
    }

    #[test]
    fn from_values_validates() {
        assert!(matches!(
            MultiMap::from_values(vec![2, 2], vec![0.0; 3], false),
            Err(Error::DimMismatch(_))
        ));
        assert!(matches!(
            MultiMap::from_values(vec![2], vec![f64::INFINITY, 0.0], false),
            Err(Error::NonFiniteValue)
        ));
    }

    #[test]
    fn integer_star_overflow_is_reported() {
        let big = i128::MAX / 2 + 1;
        let m = MultiMap::from_values(vec![1, 2], vec![big, big], false).unwrap();
        assert!(matches!(star_product(&m, &m), Err(Error::CountOverflow)));
    }
}
