//! The smooth bump, quarks, synthesis and the counterexample coefficients.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::admissible::AdmissibleFn;
use crate::error::{check_exponent, Error, Result};
use crate::math;
use crate::normest::{BesovParams, GridFunction, GridSpec};
use crate::seqspace::{lp_norm_unchecked, DyadicSequence};

/// Largest coefficient set [`counterexample_coeffs`] will materialize.
pub const MAX_ENTRIES: u64 = 1 << 24;

/// `log v(t) = -1/(1+t)² - 1/(1-t)²` on `(-1, 1)`.
fn log_v(t: f64) -> f64 {
    let a = 1.0 + t;
    let b = 1.0 - t;
    -1.0 / (a * a) - 1.0 / (b * b)
}

/// `ψ₀(t) = v(t) / (v(t-1) + v(t) + v(t+1))`, supported in `(-1, 1)`.
///
/// On `0 < |t| < 1` only `v(t)` and `v(t - sgn t)` survive, and the ratio is
/// evaluated as a logistic function of their log difference, which never
/// underflows.
pub fn profile(t: f64) -> f64 {
    if t == 0.0 {
        1.0
    } else if !(t.abs() < 1.0) {
        0.0
    } else {
        let other = t - t.signum();
        1.0 / (1.0 + math::exp(log_v(other) - log_v(t)))
    }
}

/// `ψ(x) = Π_i ½ ψ₀(x_i / 2)`: smooth, supported in `(-2, 2)^N`, with
/// integer translates summing to one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BumpFn {
    dim: usize,
}

impl BumpFn {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::param("N", "dimension must be at least 1"));
        }
        Ok(BumpFn { dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The one-dimensional factor `½ ψ₀(x/2)`.
    pub fn factor(x: f64) -> f64 {
        0.5 * profile(0.5 * x)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        x.iter().map(|xi| Self::factor(*xi)).product()
    }

    /// `x^β ψ(x)`.
    pub fn eval_moment(&self, beta: &[u32], x: &[f64]) -> f64 {
        x.iter()
            .zip(beta)
            .map(|(xi, b)| powi(*xi, *b) * Self::factor(*xi))
            .product()
    }

    /// `inf_{[0,1]^N} ψ = 4^{-N}`, attained at the far corner.
    pub fn c0(&self) -> f64 {
        math::exp2i(-2 * self.dim as i32)
    }

    /// Smallest `r` with `supp ψ ⊂ {|y| < 2^r}`: `1 + log₂√N`.
    pub fn support_exponent(&self) -> f64 {
        1.0 + 0.5 * math::log2(self.dim as f64)
    }
}

fn powi(x: f64, e: u32) -> f64 {
    let mut acc = 1.0;
    for _ in 0..e {
        acc *= x;
    }
    acc
}

/// `2^{-ν(s-N/p)} Ψ(2^{-ν})^{-1}` (`2^{-νs}` when `p = ∞`).
pub fn quark_amplitude(nu: u32, s: f64, p: f64, n: usize, psi_w: &AdmissibleFn) -> f64 {
    let expo = if p == f64::INFINITY { s } else { s - n as f64 / p };
    let base = math::exp2(-(nu as f64) * expo);
    if psi_w.is_unit() {
        base
    } else {
        base / psi_w.eval_dyadic(nu)
    }
}

/// `(βqu)_{ν,m}(x) = 2^{-ν(s-N/p)} Ψ(2^{-ν})^{-1} (2^ν x - m)^β ψ(2^ν x - m)`.
#[allow(clippy::too_many_arguments)]
pub fn quark_eval(
    bump: &BumpFn,
    beta: &[u32],
    nu: u32,
    m: &[i64],
    s: f64,
    p: f64,
    psi_w: &AdmissibleFn,
    x: &[f64],
) -> f64 {
    let scale = math::exp2i(nu as i32);
    let y: Vec<f64> = x.iter().zip(m).map(|(xi, mi)| scale * xi - *mi as f64).collect();
    let shape = bump.eval_moment(beta, &y);
    if shape == 0.0 {
        0.0
    } else {
        quark_amplitude(nu, s, p, bump.dim(), psi_w) * shape
    }
}

/// Position of one quark: moment `β`, level `ν`, translation `m`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QuarkIndex {
    pub beta: Vec<u32>,
    pub nu: u32,
    pub m: Vec<i64>,
}

type Block = BTreeMap<Vec<i64>, f64>;

/// Sparse `λ^β_{ν,m}` grouped by `(β, ν)`, with decay exponent `ϱ`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuarkCoeffs {
    dim: usize,
    rho: f64,
    blocks: BTreeMap<(Vec<u32>, u32), Block>,
}

impl QuarkCoeffs {
    /// Empty set with the default `ϱ = r + 1`.
    pub fn new(dim: usize) -> Self {
        let rho = 2.0 + 0.5 * math::log2(dim.max(1) as f64);
        QuarkCoeffs {
            dim,
            rho,
            blocks: BTreeMap::new(),
        }
    }

    /// Sets `ϱ`; it must exceed `r = 1 + log₂√N`.
    pub fn with_rho(mut self, rho: f64) -> Result<Self> {
        let r = 1.0 + 0.5 * math::log2(self.dim.max(1) as f64);
        if !(rho > r) || !rho.is_finite() {
            return Err(Error::param("rho", format!("must exceed r = {r}, got {rho}")));
        }
        self.rho = rho;
        Ok(self)
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn len(&self) -> usize {
        self.blocks.values().map(|b| b.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Stores `λ^β_{ν,m} = value`; zero removes the entry.
    pub fn insert(&mut self, beta: &[u32], nu: u32, m: &[i64], value: f64) -> Result<()> {
        if beta.len() != self.dim || m.len() != self.dim {
            return Err(Error::param(
                "index",
                format!("beta and m must have {} components, got {} and {}", self.dim, beta.len(), m.len()),
            ));
        }
        if !value.is_finite() {
            return Err(Error::param("value", format!("{value} is not finite")));
        }
        let key = (beta.to_vec(), nu);
        if value == 0.0 {
            if let Some(b) = self.blocks.get_mut(&key) {
                b.remove(m);
                if b.is_empty() {
                    self.blocks.remove(&key);
                }
            }
        } else {
            self.blocks.entry(key).or_default().insert(m.to_vec(), value);
        }
        Ok(())
    }

    pub fn get(&self, beta: &[u32], nu: u32, m: &[i64]) -> f64 {
        // BTreeMap lookups need an owned key of the tuple type
        self.blocks
            .get(&(beta.to_vec(), nu))
            .and_then(|b| b.get(m))
            .copied()
            .unwrap_or(0.0)
    }

    /// `(β, ν, block)` in ascending order.
    pub fn blocks(&self) -> impl Iterator<Item = (&[u32], u32, &BTreeMap<Vec<i64>, f64>)> {
        self.blocks.iter().map(|((b, nu), blk)| (b.as_slice(), *nu, blk))
    }

    pub fn iter(&self) -> impl Iterator<Item = (QuarkIndex, f64)> + '_ {
        self.blocks.iter().flat_map(|((beta, nu), blk)| {
            blk.iter().map(move |(m, v)| {
                (
                    QuarkIndex {
                        beta: beta.clone(),
                        nu: *nu,
                        m: m.clone(),
                    },
                    *v,
                )
            })
        })
    }

    pub fn max_nu(&self) -> Option<u32> {
        self.blocks.keys().map(|(_, nu)| *nu).max()
    }

    /// Entries `λ^0_{j,k}` of a one-dimensional sequence.
    pub fn from_sequence(seq: &DyadicSequence) -> Result<Self> {
        check_cap(seq)?;
        let mut out = QuarkCoeffs::new(1);
        for r in seq.runs().iter().filter(|r| !r.is_empty()) {
            for k in r.start..r.start + r.length {
                out.insert(&[0], r.level, &[k as i64], r.value)?;
            }
        }
        Ok(out)
    }
}

fn check_cap(seq: &DyadicSequence) -> Result<()> {
    let size = seq.support_size();
    if size > MAX_ENTRIES {
        return Err(Error::param(
            "sequence",
            format!("{size} nonzero entries exceed the materialization cap {MAX_ENTRIES}; lower jmax"),
        ));
    }
    Ok(())
}

/// Grid produced by [`synthesize`].
#[derive(Debug, Clone, PartialEq)]
pub struct Synthesis {
    pub grid: GridFunction,
    /// Set when some level is finer than half the grid spacing.
    pub aliasing: bool,
}

/// `f = Σ λ^β_{ν,m} (βqu)_{ν,m}` sampled on `grid`.
///
/// Each entry only touches the nodes inside its support box; the bump is a
/// tensor product, so the per-axis factors are computed once per entry.
pub fn synthesize(coeffs: &QuarkCoeffs, bump: &BumpFn, params: &BesovParams, grid: &GridSpec) -> Result<Synthesis> {
    let n = grid.dim();
    if coeffs.dimension() != n || bump.dim() != n || params.n != n {
        return Err(Error::param("dimension", "coefficients, bump, parameters and grid disagree"));
    }
    let shape = grid.shape();
    let mut values = vec![0.0; grid.len()];
    let h = grid.spacing();
    let mut aliasing = false;
    let mut ranges: Vec<(usize, Vec<f64>)> = Vec::with_capacity(n);
    for (index, value) in coeffs.iter() {
        aliasing |= index.nu + 1 > grid.level();
        let amp = value * quark_amplitude(index.nu, params.s, params.p, n, &params.psi);
        let scale = math::exp2i(index.nu as i32);
        ranges.clear();
        let mut empty = false;
        #[allow(clippy::needless_range_loop)] // several per-axis arrays
        for axis in 0..n {
            let centre = index.m[axis] as f64 / scale;
            let radius = 2.0 / scale;
            let lo = math::ceil((centre - radius - grid.lower()[axis]) / h).max(0.0);
            let hi = math::floor((centre + radius - grid.lower()[axis]) / h).min((shape[axis] - 1) as f64);
            if lo > hi {
                empty = true;
                break;
            }
            let (lo, hi) = (lo as usize, hi as usize);
            let fac: Vec<f64> = (lo..=hi)
                .map(|i| {
                    let y = scale * grid.coord(axis, i) - index.m[axis] as f64;
                    powi(y, index.beta[axis]) * BumpFn::factor(y)
                })
                .collect();
            ranges.push((lo, fac));
        }
        if empty {
            continue;
        }
        accumulate(&mut values, shape, &ranges, amp);
    }
    Ok(Synthesis {
        grid: GridFunction::from_values(grid.clone(), values)?,
        aliasing,
    })
}

/// Adds `amp · Π_axis fac_axis` over the product of index ranges.
pub(crate) fn accumulate(values: &mut [f64], shape: &[usize], ranges: &[(usize, Vec<f64>)], amp: f64) {
    let n = shape.len();
    let mut strides = vec![1usize; n];
    for a in (0..n.saturating_sub(1)).rev() {
        strides[a] = strides[a + 1] * shape[a + 1];
    }
    let mut counter = vec![0usize; n];
    loop {
        let mut w = amp;
        let mut off = 0;
        for a in 0..n {
            w *= ranges[a].1[counter[a]];
            off += (ranges[a].0 + counter[a]) * strides[a];
        }
        values[off] += w;
        let mut a = n;
        loop {
            if a == 0 {
                return;
            }
            a -= 1;
            counter[a] += 1;
            if counter[a] < ranges[a].1.len() {
                break;
            }
            counter[a] = 0;
        }
    }
}

/// Parameters of the hyperplane counterexample `f`.
#[derive(Debug, Clone, PartialEq)]
pub struct CounterexampleSpec {
    pub n: usize,
    pub s: f64,
    pub p: f64,
    pub q: f64,
    pub psi: AdmissibleFn,
    pub sequence: DyadicSequence,
}

impl CounterexampleSpec {
    /// Validates `s > σ_p`, `p < q` and `N ≥ 2`.
    pub fn new(n: usize, s: f64, p: f64, q: f64, psi: AdmissibleFn, sequence: DyadicSequence) -> Result<Self> {
        if n < 2 {
            return Err(Error::param("N", "the counterexample lives in dimension N >= 2"));
        }
        check_exponent("p", p)?;
        check_exponent("q", q)?;
        if p >= q {
            return Err(Error::param("q", format!("needs p < q, got p = {p}, q = {q}")));
        }
        let sigma = if p < 1.0 { n as f64 * (1.0 / p - 1.0) } else { 0.0 };
        if !(s > sigma) || !s.is_finite() {
            return Err(Error::param("s", format!("needs s > sigma_p = {sigma}, got {s}")));
        }
        Ok(CounterexampleSpec {
            n,
            s,
            p,
            q,
            psi,
            sequence,
        })
    }

    /// `M = ⌊s⌋ + 1`.
    pub fn order(&self) -> u32 {
        math::floor(self.s) as u32 + 1
    }

    /// `C_M = 2(M + 2)`.
    pub fn c_m(&self) -> f64 {
        2.0 * (self.order() as f64 + 2.0)
    }

    pub fn jmax(&self) -> u32 {
        self.sequence.max_level()
    }

    /// `2^{-j(s-(N-1)/p)} Ψ(2^{-j})^{-1}`, the amplitude of level `j` on a slice.
    pub fn slice_amplitude(&self, j: u32) -> f64 {
        let d = (self.n - 1) as f64;
        let expo = if self.p == f64::INFINITY { self.s } else { self.s - d / self.p };
        let base = math::exp2(-(j as f64) * expo);
        if self.psi.is_unit() {
            base
        } else {
            base / self.psi.eval_dyadic(j)
        }
    }
}

/// `β = 0` coefficients `λ_{j,k}` at `m = (C_M 2^j j, …, C_M 2^j j, k)`.
pub fn counterexample_coeffs(spec: &CounterexampleSpec) -> Result<QuarkCoeffs> {
    check_cap(&spec.sequence)?;
    let n = spec.n;
    let c_m = spec.c_m() as i64;
    let beta = vec![0u32; n];
    let mut out = QuarkCoeffs::new(n);
    let mut m = vec![0i64; n];
    for r in spec.sequence.runs().iter().filter(|r| !r.is_empty()) {
        let j = r.level as i64;
        let centre = c_m * (1i64 << j) * j;
        for slot in m.iter_mut().take(n - 1) {
            *slot = centre;
        }
        for k in r.start..r.start + r.length {
            m[n - 1] = k as i64;
            out.insert(&beta, r.level, &m, r.value)?;
        }
    }
    Ok(out)
}

/// `Λ_j(x) = Σ_k λ_{j,k} 2^{j/p} ψ(2^j x − k)`.
pub fn lambda_profile(spec: &CounterexampleSpec, x_last: f64, j: u32) -> f64 {
    let Some(run) = spec.sequence.run(j) else {
        return 0.0;
    };
    if run.is_empty() {
        return 0.0;
    }
    let y = x_last * math::exp2i(j as i32);
    let base = math::floor(y);
    let mut sum = 0.0;
    for off in -1..=2i64 {
        let k = base + off as f64;
        if k < 0.0 {
            continue;
        }
        let lam = spec.sequence.lookup(j, k as u64);
        if lam != 0.0 {
            sum += lam * BumpFn::factor(y - k);
        }
    }
    if spec.p == f64::INFINITY {
        sum
    } else {
        sum * math::exp2(j as f64 / spec.p)
    }
}

/// `sup_β 2^{ϱ|β|} ‖λ^β‖_{b_{p,q}}`.
pub fn coeff_norm(coeffs: &QuarkCoeffs, p: f64, q: f64, rho: f64) -> Result<f64> {
    check_exponent("p", p)?;
    check_exponent("q", q)?;
    if !(rho > 0.0) {
        return Err(Error::param("rho", format!("must be positive, got {rho}")));
    }
    let mut per_beta: BTreeMap<&[u32], Vec<f64>> = BTreeMap::new();
    for (beta, _nu, block) in coeffs.blocks() {
        let level = lp_norm_unchecked(block.values().copied(), p);
        per_beta.entry(beta).or_default().push(level);
    }
    let mut sup: f64 = 0.0;
    for (beta, levels) in per_beta {
        let size: u32 = beta.iter().sum();
        let norm = lp_norm_unchecked(levels, q);
        sup = sup.max(math::exp2(rho * size as f64) * norm);
    }
    Ok(sup)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqspace::construct_lambda;

    fn spec_half() -> CounterexampleSpec {
        let seq = construct_lambda(1.0, f64::INFINITY, 12).unwrap();
        CounterexampleSpec::new(2, 0.5, 1.0, f64::INFINITY, AdmissibleFn::constant(1.0).unwrap(), seq).unwrap()
    }

    #[test]
    fn bump_values() {
        let b1 = BumpFn::new(1).unwrap();
        assert_eq!(b1.eval(&[0.0]), 0.5);
        assert_eq!(b1.eval(&[1.0]), 0.25);
        assert_eq!(b1.eval(&[-1.0]), 0.25);
        assert_eq!(profile(0.5), 0.5);
        let sum: f64 = (-3..=3).map(|m| b1.eval(&[0.37 - m as f64])).sum();
        assert!((sum - 1.0).abs() < 1e-12);
        let b2 = BumpFn::new(2).unwrap();
        assert_eq!(b2.eval(&[0.0, 0.0]), 0.25);
        assert_eq!(b2.eval(&[2.0, 0.0]), 0.0);
        assert_eq!(b2.eval(&[0.3, -2.5]), 0.0);
        assert!(b2.eval(&[1.999, 0.0]) >= 0.0);
        assert_eq!(b2.c0(), 1.0 / 16.0);
    }

    #[test]
    fn c0_is_the_infimum() {
        for i in 0..=1000 {
            let x = i as f64 / 1000.0;
            assert!(BumpFn::factor(x) >= 0.25 - 1e-15);
        }
    }

    #[test]
    fn quark_examples() {
        let b = BumpFn::new(1).unwrap();
        let one = AdmissibleFn::constant(1.0).unwrap();
        for x in [-1.5, -0.3, 0.0, 0.7, 1.9] {
            assert_eq!(quark_eval(&b, &[0], 0, &[0], 0.5, 1.0, &one, &[x]), b.eval(&[x]));
            let q = quark_eval(&b, &[0], 2, &[0], 0.5, 1.0, &one, &[x / 4.0]);
            assert!((q - 2.0 * b.eval(&[x])).abs() < 1e-15);
            assert_eq!(quark_eval(&b, &[1], 0, &[0], 0.5, 1.0, &one, &[x]), x * b.eval(&[x]));
        }
        assert_eq!(quark_eval(&b, &[1], 0, &[0], 0.5, 1.0, &one, &[0.0]), 0.0);
    }

    #[test]
    fn counterexample_centres() {
        let spec = spec_half();
        assert_eq!(spec.order(), 1);
        assert_eq!(spec.c_m(), 6.0);
        let c = counterexample_coeffs(&spec).unwrap();
        assert_eq!(c.get(&[0, 0], 1, &[12, 2]), 0.5);
        assert_eq!(c.get(&[0, 0], 1, &[12, 3]), 0.5);
        assert_eq!(c.get(&[0, 0], 1, &[12, 4]), 0.0);
        assert!(coeff_norm(&c, 1.0, f64::INFINITY, c.rho()).unwrap() <= 1.0);
    }

    #[test]
    fn profile_values() {
        let spec = spec_half();
        for x in [0.5, 1.0, 1.7, 2.5] {
            assert_eq!(lambda_profile(&spec, x, 0), 0.0);
        }
        assert_eq!(lambda_profile(&spec, 1.0, 1), 0.75);
        for i in 0..400 {
            let x = 1.0 + i as f64 / 400.0;
            for j in 1..=12 {
                let k = math::floor(x * math::exp2i(j as i32)) as u64;
                let lower = 0.25 * spec.sequence.lookup(j, k) * math::exp2i(j as i32);
                assert!(lambda_profile(&spec, x, j) >= lower * (1.0 - 1e-12));
            }
        }
    }

    #[test]
    fn coeff_norm_examples() {
        let mut a = QuarkCoeffs::new(1);
        a.insert(&[0], 0, &[0], 1.0).unwrap();
        assert_eq!(coeff_norm(&a, 1.0, 1.0, 3.0).unwrap(), 1.0);
        let mut b = QuarkCoeffs::new(1);
        b.insert(&[2], 0, &[0], 1.0).unwrap();
        assert_eq!(coeff_norm(&b, 1.0, 1.0, 1.0).unwrap(), 4.0);
    }

    #[test]
    fn rho_must_exceed_r() {
        assert!(QuarkCoeffs::new(4).with_rho(2.0).is_err());
        assert!(QuarkCoeffs::new(4).with_rho(2.5).is_ok());
        assert_eq!(QuarkCoeffs::new(1).rho(), 2.0);
    }
}
