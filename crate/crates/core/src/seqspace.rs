//! Dyadic two-index sequences and the `b_{p,q}` machinery.
//!
//! A [`DyadicSequence`] stores `λ_{j,k}` as at most one constant run per
//! level `j`, always inside `T_j = [2^j, 2^{j+1})`. Every sequence built
//! here is of that shape, which keeps levels up to ~60 affordable.
//!
//! Plain slices passed to the one-index routines follow the convention
//! `lambda[i] = λ_i`; slot 0 holds `λ_0`.

use alloc::format;
use alloc::vec::Vec;

use crate::admissible::{AdmissibleFn, Direction, Verdict};
use crate::error::{check_exponent, Error, Result};
use crate::math;
use crate::quark::QuarkCoeffs;

/// Largest level whose index range `T_j` fits in a `u64`.
pub const MAX_LEVEL: u32 = 62;

/// A constant block `λ_{level,k} = value` for `k ∈ [start, start + length)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelRun {
    pub level: u32,
    pub start: u64,
    pub length: u64,
    pub value: f64,
}

impl LevelRun {
    pub fn empty(level: u32) -> Self {
        LevelRun {
            level,
            start: 1u64 << level,
            length: 0,
            value: 0.0,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.length == 0 || self.value == 0.0
    }

    pub fn contains(&self, k: u64) -> bool {
        k >= self.start && k - self.start < self.length
    }

    /// Right edge of the run in `x`-coordinates, `(start + length) / 2^level`.
    pub fn right_edge(&self) -> f64 {
        math::exp2i(-(self.level as i32)) * (self.start + self.length) as f64
    }

    /// Whether the run ends at the last index of `T_level`.
    pub fn reaches_end(&self) -> bool {
        self.length > 0 && self.start + self.length == 2u64 << self.level
    }

    fn validate(&self) -> Result<()> {
        if self.level > MAX_LEVEL {
            return Err(Error::param("level", format!("{} exceeds {MAX_LEVEL}", self.level)));
        }
        let lo = 1u64 << self.level;
        let hi = 2u64 << self.level;
        if self.start < lo || self.start > hi || self.length > hi - self.start {
            return Err(Error::param(
                "run",
                format!(
                    "level {} run [{}, {}) leaves [{lo}, {hi})",
                    self.level,
                    self.start,
                    self.start as u128 + self.length as u128
                ),
            ));
        }
        if !(self.value >= 0.0) || !self.value.is_finite() {
            return Err(Error::param("value", format!("{} is not a finite nonnegative number", self.value)));
        }
        Ok(())
    }
}

/// Sparse sequence `λ_{j,k}`, one run per level `0..=max_level`.
#[derive(Debug, Clone, PartialEq)]
pub struct DyadicSequence {
    runs: Vec<LevelRun>,
}

impl DyadicSequence {
    /// All-zero sequence with levels `0..=max_level`.
    pub fn zero(max_level: u32) -> Result<Self> {
        Self::from_runs(Vec::new(), max_level)
    }

    /// Builds a sequence from runs given in any order; missing levels are empty.
    pub fn from_runs(runs: Vec<LevelRun>, max_level: u32) -> Result<Self> {
        if max_level > MAX_LEVEL {
            return Err(Error::param("max_level", format!("{max_level} exceeds {MAX_LEVEL}")));
        }
        let mut slots: Vec<Option<LevelRun>> = (0..=max_level).map(|_| None).collect();
        for run in runs {
            run.validate()?;
            let slot = slots
                .get_mut(run.level as usize)
                .ok_or_else(|| Error::param("run", format!("level {} exceeds max_level {max_level}", run.level)))?;
            if slot.is_some() {
                return Err(Error::param("run", format!("two runs at level {}", run.level)));
            }
            *slot = Some(run);
        }
        let runs = slots
            .into_iter()
            .enumerate()
            .map(|(j, r)| r.unwrap_or_else(|| LevelRun::empty(j as u32)))
            .collect();
        Ok(DyadicSequence { runs })
    }

    pub fn max_level(&self) -> u32 {
        self.runs.len() as u32 - 1
    }

    /// One run per level, ascending; empty levels have `length == 0`.
    pub fn runs(&self) -> &[LevelRun] {
        &self.runs
    }

    pub fn run(&self, level: u32) -> Option<&LevelRun> {
        self.runs.get(level as usize)
    }

    pub fn lookup(&self, level: u32, k: u64) -> f64 {
        match self.run(level) {
            Some(r) if r.contains(k) => r.value,
            _ => 0.0,
        }
    }

    /// Number of nonzero entries.
    pub fn support_size(&self) -> u64 {
        self.runs.iter().filter(|r| !r.is_empty()).map(|r| r.length).sum()
    }

    /// Levels whose run ends flush with `x = 2`; each closes one sweep of `[1, 2)`.
    pub fn sweep_ends(&self) -> Vec<u32> {
        self.runs.iter().filter(|r| !r.is_empty() && r.reaches_end()).map(|r| r.level).collect()
    }

    /// `2^{-j} Σ_{k∈T_j} λ_{j,k}` for every level.
    pub fn block_means(&self) -> Vec<f64> {
        self.runs
            .iter()
            .map(|r| r.value * r.length as f64 * math::exp2i(-(r.level as i32)))
            .collect()
    }

    /// Entrywise map of the run values, keeping positions.
    pub fn map_values(&self, mut f: impl FnMut(&LevelRun) -> f64) -> Self {
        let runs = self
            .runs
            .iter()
            .map(|r| {
                let mut out = *r;
                out.value = if r.length == 0 { 0.0 } else { f(r) };
                out
            })
            .collect();
        DyadicSequence { runs }
    }
}

/// Level norms and the aggregated `b_{p,q}` value.
#[derive(Debug, Clone, PartialEq)]
pub struct BpqNormResult {
    pub per_level: Vec<f64>,
    pub total: f64,
}

/// `(Σ|v_i|^p)^{1/p}`, or `max|v_i|` for `p = ∞`.
pub fn lp_norm(values: &[f64], p: f64) -> Result<f64> {
    check_exponent("p", p)?;
    Ok(lp_norm_unchecked(values.iter().copied(), p))
}

pub(crate) fn lp_norm_unchecked(values: impl IntoIterator<Item = f64>, p: f64) -> f64 {
    if p == f64::INFINITY {
        values.into_iter().fold(0.0, |m, v| m.max(v.abs()))
    } else {
        let s: f64 = values.into_iter().map(|v| math::abs_pow(v, p)).sum();
        math::root(s, p)
    }
}

/// `b_{p,q}` norm of a sequence given level by level.
pub fn bpq_norm_levels(levels: &[Vec<f64>], p: f64, q: f64) -> Result<BpqNormResult> {
    check_exponent("p", p)?;
    check_exponent("q", q)?;
    let per_level: Vec<f64> = levels.iter().map(|l| lp_norm_unchecked(l.iter().copied(), p)).collect();
    let total = lp_norm_unchecked(per_level.iter().copied(), q);
    Ok(BpqNormResult { per_level, total })
}

/// `b_{p,q}` norm of a run-encoded sequence.
pub fn bpq_norm(seq: &DyadicSequence, p: f64, q: f64) -> Result<BpqNormResult> {
    check_exponent("p", p)?;
    check_exponent("q", q)?;
    let per_level: Vec<f64> = seq
        .runs()
        .iter()
        .map(|r| {
            if r.is_empty() {
                0.0
            } else if p == f64::INFINITY {
                r.value
            } else {
                math::root(r.length as f64, p) * r.value
            }
        })
        .collect();
    let total = lp_norm_unchecked(per_level.iter().copied(), q);
    Ok(BpqNormResult { per_level, total })
}

/// Whether the one-index routines verify monotonicity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Monotonicity {
    #[default]
    Strict,
    Unchecked,
}

fn check_nonincreasing(lambda: &[f64], mode: Monotonicity) -> Result<()> {
    if let Some(i) = lambda.iter().position(|v| !(*v >= 0.0) || !v.is_finite()) {
        return Err(Error::param("lambda", format!("entry {i} is not finite and nonnegative")));
    }
    if mode == Monotonicity::Strict {
        for i in 2..lambda.len() {
            if lambda[i] > lambda[i - 1] {
                return Err(Error::NotMonotone { index: i });
            }
        }
    }
    Ok(())
}

fn at(lambda: &[f64], i: u64) -> f64 {
    usize::try_from(i).ok().and_then(|i| lambda.get(i)).copied().unwrap_or(0.0)
}

/// Result of the truncated condensation comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Condensation {
    pub lower: f64,
    pub condensed: f64,
    pub upper: f64,
    pub holds: bool,
}

/// Compares `Σ_{i≥1} λ_i`, `Σ_{j≤jmax} 2^j λ_{2^j}` and `2 Σ_{i≥1} λ_i`.
///
/// Both series are truncated consistently: the plain sums run over
/// `1 ≤ i < 2^{jmax+1}`, which is exactly the range the condensed sum
/// controls, so `holds` is a finite identity rather than a limit statement.
pub fn condensation_check(lambda: &[f64], jmax: u32, mode: Monotonicity) -> Result<Condensation> {
    if jmax > MAX_LEVEL {
        return Err(Error::param("jmax", format!("{jmax} exceeds {MAX_LEVEL}")));
    }
    check_nonincreasing(lambda, mode)?;
    let end = (2u64 << jmax).min(lambda.len() as u64);
    let lower: f64 = (1..end).map(|i| at(lambda, i)).sum();
    let condensed: f64 = (0..=jmax).map(|j| math::exp2i(j as i32) * at(lambda, 1u64 << j)).sum();
    let upper = 2.0 * lower;
    Ok(Condensation {
        lower,
        condensed,
        upper,
        holds: lower <= condensed && condensed <= upper,
    })
}

/// `φ(x) = (4/x)(1_{[1,∞)}(x) + (1 − log₂x)1_{(0,1)}(x))`.
pub fn phi_bound(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain {
            what: "x",
            value: x,
            domain: "(0, inf)",
        });
    }
    Ok(if x >= 1.0 {
        4.0 / x
    } else {
        4.0 / x * (1.0 - math::log2(x))
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// `Σ_{j≤jmax} 2^j λ_{⌊2^j x⌋}` against `φ(x) Σ_{i≥1} λ_i`.
///
/// For `x < 1` the first terms read `λ_0` from slot 0.
pub fn lemma32_check(lambda: &[f64], x: f64, jmax: u32, mode: Monotonicity) -> Result<BoundCheck> {
    let phi = phi_bound(x)?;
    check_nonincreasing(lambda, mode)?;
    let mut lhs = 0.0;
    for j in 0..=jmax.min(1023) {
        let k = math::floor(x * math::exp2i(j as i32));
        if k >= lambda.len() as f64 {
            break;
        }
        lhs += math::exp2i(j as i32) * lambda[k as usize];
    }
    let rhs = phi * lambda.iter().skip(1).sum::<f64>();
    Ok(BoundCheck {
        lhs,
        rhs,
        holds: lhs <= rhs,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Amalgam {
    pub lhs: f64,
    pub rhs: f64,
}

/// Both sides of the `ℓ^p` / `L^p(1,2)` amalgam identity.
///
/// The right side integrates `x ↦ Σ_k 2^k |λ_{⌊2^k x⌋}|^p` over `[1, 2)`
/// cell by cell: with `2^K ≤ n` the largest relevant scale, the integrand
/// is constant on each `[1 + i 2^{-K}, 1 + (i+1) 2^{-K})`.
pub fn amalgam_integral(lambda: &[f64], p: f64) -> Result<Amalgam> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::param("p", format!("must lie in (0, inf), got {p}")));
    }
    let lhs_pow: f64 = lambda.iter().skip(1).map(|v| math::abs_pow(*v, p)).sum();
    let n = lambda.len().saturating_sub(1);
    if n == 0 {
        return Ok(Amalgam { lhs: 0.0, rhs: 0.0 });
    }
    let top = usize::BITS - 1 - n.leading_zeros();
    let cells = 1usize << top;
    let width = math::exp2i(-(top as i32));
    let mut rhs_pow = 0.0;
    for i in 0..cells {
        let mid = 1.0 + (i as f64 + 0.5) * width;
        let mut value = 0.0;
        for k in 0..=top {
            let idx = math::floor(mid * math::exp2i(k as i32)) as usize;
            if let Some(v) = lambda.get(idx) {
                value += math::exp2i(k as i32) * math::abs_pow(*v, p);
            }
        }
        rhs_pow += value * width;
    }
    Ok(Amalgam {
        lhs: math::root(lhs_pow, p),
        rhs: math::root(rhs_pow, p),
    })
}

/// Places level blocks by the sweeping rule.
///
/// `blocks[j] = (length, value)` for `j = 0..=jmax`. A nonempty block starts
/// where the previous nonempty block ended, in `x`-coordinates; a block that
/// would pass `x = 2` is set flush right instead, and the block after a run
/// ending at `x = 2` restarts at `x = 1`. Zero-length levels keep the anchor.
pub fn arrange_sweeps(blocks: &[(u64, f64)]) -> Result<DyadicSequence> {
    if blocks.is_empty() {
        return Err(Error::param("blocks", "need at least level 0"));
    }
    let jmax = (blocks.len() - 1) as u32;
    if jmax > MAX_LEVEL {
        return Err(Error::param("jmax", format!("{jmax} exceeds {MAX_LEVEL}")));
    }
    // Right edge of the last nonempty run as (numerator, level).
    let mut edge: Option<(u64, u32)> = None;
    let mut runs = Vec::with_capacity(blocks.len());
    for (j, &(length, value)) in blocks.iter().enumerate() {
        let j = j as u32;
        let lo = 1u64 << j;
        let hi = 2u64 << j;
        if length > lo {
            return Err(Error::param("blocks", format!("level {j} block of length {length} exceeds {lo}")));
        }
        if length == 0 || value == 0.0 {
            runs.push(LevelRun::empty(j));
            continue;
        }
        let mut start = match edge {
            Some((num, lvl)) if num < 2u64 << lvl => num << (j - lvl),
            _ => lo,
        };
        if start + length > hi {
            start = hi - length;
        }
        edge = Some((start + length, j));
        runs.push(LevelRun {
            level: j,
            start,
            length,
            value,
        });
    }
    DyadicSequence::from_runs(runs, jmax)
}

fn check_jmax(jmax: u32) -> Result<()> {
    if !(1..=MAX_LEVEL).contains(&jmax) {
        return Err(Error::param("jmax", format!("must lie in 1..={MAX_LEVEL}, got {jmax}")));
    }
    Ok(())
}

/// The sequence `ζ`: level `j ≥ 1` holds `⌊2^j/j⌋` entries of value `j`, swept.
pub fn construct_zeta(jmax: u32) -> Result<DyadicSequence> {
    check_jmax(jmax)?;
    let blocks: Vec<(u64, f64)> = (0..=jmax)
        .map(|j| if j == 0 { (0, 0.0) } else { ((1u64 << j) / j as u64, j as f64) })
        .collect();
    arrange_sweeps(&blocks)
}

fn check_p_below_q(p: f64, q: f64) -> Result<()> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::param("p", format!("must lie in (0, inf), got {p}")));
    }
    check_exponent("q", q)?;
    if p >= q {
        return Err(Error::param("q", format!("the construction needs p < q, got p = {p}, q = {q}")));
    }
    Ok(())
}

/// `λ_{j,k} = 2^{-j/p} ζ_k^{1/p}` (`q = ∞`) or `2^{-j/p} (j^{-√(p/q)} ζ_k)^{1/p}`.
pub fn construct_lambda(p: f64, q: f64, jmax: u32) -> Result<DyadicSequence> {
    check_p_below_q(p, q)?;
    let zeta = construct_zeta(jmax)?;
    let damp = if q == f64::INFINITY { 0.0 } else { math::sqrt(p / q) };
    Ok(zeta.map_values(|r| {
        let j = r.level as f64;
        let xi = if damp == 0.0 { r.value } else { r.value * math::pow(j, -damp) };
        // 2^{-j} is exact for j ≤ MAX_LEVEL, so block sums stay ≤ 1 exactly for p = 1
        math::root(math::exp2i(-(r.level as i32)) * xi, p)
    }))
}

/// The per-level quantities behind the weighted construction.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedLevels {
    /// `β_j = Ψ(2^{-j})^p`.
    pub beta: Vec<f64>,
    /// `γ_j` for `q = ∞`, `γ̃_j` for `q < ∞`.
    pub gamma: Vec<f64>,
    /// `τ_j = γ̃_j / β_j` for `q < ∞`, all ones for `q = ∞`.
    pub tau: Vec<f64>,
}

/// Precondition and level data for [`construct_weighted_lambda`].
pub fn weighted_levels(p: f64, q: f64, psi: &AdmissibleFn, jmax: u32) -> Result<WeightedLevels> {
    check_p_below_q(p, q)?;
    check_jmax(jmax)?;
    let chi = if q == f64::INFINITY { p } else { q * p / (q - p) };
    let series = crate::admissible::weight_series(psi, chi, jmax.max(64))?;
    if series.verdict == Verdict::Converges {
        return Err(Error::Precondition(format!(
            "sum of psi(2^-j)^chi converges for chi = {chi}; the weighted construction needs divergence"
        )));
    }
    if q < f64::INFINITY && psi.direction() == Direction::Increasing {
        let c_inf = crate::admissible::c_infinity(psi, crate::admissible::DEFAULT_GRID)?;
        if !(chi * c_inf < 1.0) {
            return Err(Error::Precondition(format!(
                "increasing psi needs chi < 1/c_inf, got chi = {chi}, c_inf = {c_inf}"
            )));
        }
    }
    let beta: Vec<f64> = (0..=jmax)
        .map(|j| math::pow(psi.eval_dyadic(j), p))
        .collect();
    let expo = if q == f64::INFINITY { 1.0 } else { q / (q - p) };
    let mut partial = 0.0;
    let mut gamma = Vec::with_capacity(beta.len());
    let mut tau = Vec::with_capacity(beta.len());
    for &b in &beta {
        let bt = math::pow(b, expo);
        partial += bt;
        let g = bt / partial;
        gamma.push(g);
        tau.push(if q == f64::INFINITY { 1.0 } else { g / b });
    }
    Ok(WeightedLevels { beta, gamma, tau })
}

/// Weighted construction: `⌊2^j γ_j⌋` entries of `1/γ_j` per level, swept,
/// then `λ = τ_j^{1/p} 2^{-j/p} (ϱ*_k)^{1/p}`.
pub fn construct_weighted_lambda(p: f64, q: f64, psi: &AdmissibleFn, jmax: u32) -> Result<DyadicSequence> {
    let lv = weighted_levels(p, q, psi, jmax)?;
    let blocks: Vec<(u64, f64)> = lv
        .gamma
        .iter()
        .enumerate()
        .map(|(j, &g)| {
            if j == 0 {
                (0, 0.0)
            } else {
                let len = math::floor(math::exp2i(j as i32) * g) as u64;
                (len.min(1u64 << j), 1.0 / g)
            }
        })
        .collect();
    let rho = arrange_sweeps(&blocks)?;
    Ok(rho.map_values(|r| {
        let j = r.level as usize;
        let scale = math::exp2i(-(r.level as i32)) * r.value * lv.tau[j];
        math::pow(scale, 1.0 / p)
    }))
}

/// `(2^{j/p} λ_{j,⌊2^j x⌋})_{j=0..=jmax}`.
pub fn witness_profile(seq: &DyadicSequence, x: f64, p: f64, jmax: u32) -> Vec<f64> {
    (0..=jmax)
        .map(|j| {
            let k = math::floor(x * math::exp2i(j as i32));
            if !(k >= 0.0) || k >= 18446744073709551615.0 {
                return 0.0;
            }
            let v = seq.lookup(j, k as u64);
            if v == 0.0 {
                0.0
            } else {
                math::exp2(j as f64 / p) * v
            }
        })
        .collect()
}

/// Smallest `C` with
/// `2^{jN}|λ^β_{j,⌊2^j x⌋}|^p ≤ C max{1,|β|^{N+1}} α_j^{-1} Σ_k|λ^β_{j,k}|^p`
/// over all samples and all `(j, β)` present in `lambda`.
pub fn techlemma_constant(lambda: &QuarkCoeffs, alpha: &[f64], p: f64, samples: &[Vec<f64>]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::param("samples", "need at least one sample point"));
    }
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::param("p", format!("must lie in (0, inf), got {p}")));
    }
    let n = lambda.dimension();
    if let Some(s) = samples.iter().find(|s| s.len() != n) {
        return Err(Error::param("samples", format!("point of dimension {} for N = {n}", s.len())));
    }
    let mut c: f64 = 0.0;
    for (beta, nu, block) in lambda.blocks() {
        let Some(&a) = alpha.get(nu as usize) else {
            return Err(Error::param("alpha", format!("no weight for level {nu}")));
        };
        if !(a > 0.0) {
            return Err(Error::param("alpha", format!("alpha_{nu} = {a} is not positive")));
        }
        let mass: f64 = block.values().map(|v| math::abs_pow(*v, p)).sum();
        if mass == 0.0 {
            continue;
        }
        let bn: u32 = beta.iter().sum();
        let weight = math::pow(bn as f64, (n + 1) as f64).max(1.0);
        let scale = math::exp2i((nu as i32) * n as i32);
        for x in samples {
            let m: Vec<i64> = x
                .iter()
                .map(|xi| math::floor(xi * math::exp2i(nu as i32)) as i64)
                .collect();
            let v = lambda.get(beta, nu, &m);
            if v != 0.0 {
                c = c.max(scale * math::abs_pow(v, p) * a / (weight * mass));
            }
        }
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn lp_examples() {
        assert_eq!(lp_norm(&[], 1.0).unwrap(), 0.0);
        assert_eq!(lp_norm(&[3.0, 4.0], 2.0).unwrap(), 5.0);
        assert_eq!(lp_norm(&[1.0, -2.0, 3.0], f64::INFINITY).unwrap(), 3.0);
        assert!(lp_norm(&[1.0], 0.0).is_err());
        assert!(lp_norm(&[1.0], -1.0).is_err());
    }

    #[test]
    fn bpq_examples() {
        let zero = DyadicSequence::zero(5).unwrap();
        assert_eq!(bpq_norm(&zero, 1.0, 1.0).unwrap().total, 0.0);
        let one = DyadicSequence::from_runs(
            vec![LevelRun {
                level: 0,
                start: 1,
                length: 1,
                value: 1.0,
            }],
            0,
        )
        .unwrap();
        for (p, q) in [(0.5, 0.5), (1.0, f64::INFINITY), (2.0, 3.0), (f64::INFINITY, 1.0)] {
            assert_eq!(bpq_norm(&one, p, q).unwrap().total, 1.0);
        }
        let r = bpq_norm_levels(&[vec![3.0, 4.0], vec![5.0]], 2.0, 2.0).unwrap();
        assert!((r.total - 50f64.sqrt()).abs() < 1e-12);
        assert_eq!(r.per_level, vec![5.0, 5.0]);
    }

    #[test]
    fn runs_outside_their_level_are_rejected() {
        let bad = LevelRun {
            level: 2,
            start: 6,
            length: 3,
            value: 1.0,
        };
        assert!(DyadicSequence::from_runs(vec![bad], 3).is_err());
    }

    #[test]
    fn zeta_first_terms() {
        let z = construct_zeta(34).unwrap();
        assert_eq!(z.lookup(1, 2), 1.0);
        assert_eq!(z.lookup(1, 3), 1.0);
        assert_eq!(z.lookup(3, 12), 3.0);
        assert_eq!(z.lookup(3, 13), 3.0);
        assert_eq!(z.lookup(3, 11), 0.0);
        for k in 28..32 {
            assert_eq!(z.lookup(4, k), 4.0);
        }
        let r5 = z.run(5).unwrap();
        assert_eq!((r5.start, r5.length), (32, 6));
        let r13 = z.run(13).unwrap();
        assert_eq!((r13.start, r13.length), (15754, 630));
        assert_eq!(z.sweep_ends(), vec![1, 4, 13]);
    }

    #[test]
    fn profile_at_one() {
        let l = construct_lambda(1.0, f64::INFINITY, 10).unwrap();
        let prof = witness_profile(&l, 1.0, 1.0, 5);
        assert_eq!(prof, vec![0.0, 1.0, 2.0, 0.0, 0.0, 5.0]);
        let zero = DyadicSequence::zero(8).unwrap();
        assert!(witness_profile(&zero, 1.3, 1.0, 8).iter().all(|v| *v == 0.0));
    }

    #[test]
    fn lambda_examples() {
        let a = construct_lambda(1.0, f64::INFINITY, 20).unwrap();
        assert_eq!(a.lookup(1, 2), 0.5);
        let b = construct_lambda(1.0, 2.0, 20).unwrap();
        assert!((b.lookup(1, 2) - 0.5).abs() < 1e-15);
        assert!(bpq_norm(&a, 1.0, f64::INFINITY).unwrap().total <= 1.0);
        assert!(construct_lambda(2.0, 1.0, 5).is_err());
        assert!(construct_lambda(1.0, 1.0, 5).is_err());
    }

    #[test]
    fn condensation_examples() {
        let geo: Vec<f64> = (0..(1usize << 21)).map(|j| math::exp2i(-(j.min(1100) as i32))).collect();
        let c = condensation_check(&geo, 20, Monotonicity::Strict).unwrap();
        assert!((c.lower - 1.0).abs() < 1e-12);
        assert!((c.upper - 2.0).abs() < 1e-12);
        assert!((c.condensed - 1.281_494_148_075_580_6).abs() < 1e-9, "{}", c.condensed);
        assert!(c.holds);

        let remark: Vec<f64> = (0..(1usize << 21))
            .map(|j| {
                if j > 1 && j.is_power_of_two() {
                    let k = j.trailing_zeros() as f64;
                    1.0 / (k * k)
                } else {
                    math::exp2i(-(j.min(1100) as i32))
                }
            })
            .collect();
        assert_eq!(condensation_check(&remark, 20, Monotonicity::Strict), Err(Error::NotMonotone { index: 2 }));
        let r = condensation_check(&remark, 20, Monotonicity::Unchecked).unwrap();
        assert!(r.condensed > r.upper && !r.holds);
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi_bound(1.0).unwrap(), 4.0);
        assert_eq!(phi_bound(2.0).unwrap(), 2.0);
        assert_eq!(phi_bound(0.5).unwrap(), 16.0);
        assert!(phi_bound(0.0).is_err());
        assert!(phi_bound(-1.0).is_err());
    }

    #[test]
    fn lemma32_examples() {
        let spike = [0.0, 1.0];
        let s = lemma32_check(&spike, 1.0, 20, Monotonicity::Strict).unwrap();
        assert_eq!((s.lhs, s.rhs, s.holds), (1.0, 4.0, true));
        let mut geo = vec![0.0; 1 << 21];
        for (j, v) in geo.iter_mut().enumerate().skip(1) {
            *v = math::exp2i(-(j.min(1100) as i32));
        }
        let a = lemma32_check(&geo, 1.0, 20, Monotonicity::Strict).unwrap();
        assert!((a.lhs - 1.281_494_148_075_580_6).abs() < 1e-9 && a.holds);
        let b = lemma32_check(&geo, 0.5, 20, Monotonicity::Strict).unwrap();
        assert!(b.holds && (b.rhs - 16.0).abs() < 1e-12);
    }

    #[test]
    fn amalgam_examples() {
        let a = amalgam_integral(&[0.0, 1.0], 1.0).unwrap();
        assert_eq!((a.lhs, a.rhs), (1.0, 1.0));
        let b = amalgam_integral(&[0.0, 0.0, 1.0, 1.0], 1.0).unwrap();
        assert_eq!((b.lhs, b.rhs), (2.0, 2.0));
        let c = amalgam_integral(&[], 2.0).unwrap();
        assert_eq!((c.lhs, c.rhs), (0.0, 0.0));
        assert!(amalgam_integral(&[1.0], f64::INFINITY).is_err());
    }

    #[test]
    fn block_means_bounded() {
        let z = construct_zeta(40).unwrap();
        for (j, m) in z.block_means().into_iter().enumerate() {
            assert!(m <= 1.0, "level {j}: {m}");
        }
        for r in z.runs().iter().skip(1) {
            assert_eq!(r.length, (1u64 << r.level) / r.level as u64);
        }
    }

    #[test]
    fn weighted_constant_psi() {
        let psi = AdmissibleFn::constant(1.0).unwrap();
        let w = construct_weighted_lambda(1.0, f64::INFINITY, &psi, 20).unwrap();
        for r in w.runs().iter().skip(1) {
            let j = r.level as u64;
            assert_eq!(r.length, (1u64 << j) / (j + 1));
            let expect = (j + 1) as f64 * math::exp2i(-(j as i32));
            assert!((r.value - expect).abs() <= 1e-15 * expect);
        }
    }

    #[test]
    fn weighted_preconditions() {
        let psi = AdmissibleFn::log_power(0.25, -1.0).unwrap();
        assert!(construct_weighted_lambda(1.0, f64::INFINITY, &psi, 30).is_ok());
        // chi = 2 > 1: the series converges
        assert!(matches!(
            construct_weighted_lambda(2.0, f64::INFINITY, &psi, 30),
            Err(Error::Precondition(_))
        ));
        assert!(construct_weighted_lambda(1.0, 0.5, &psi, 30).is_err());
    }

    #[test]
    fn techlemma_examples() {
        let mut one = QuarkCoeffs::new(1);
        one.insert(&[0], 0, &[1], 1.0).unwrap();
        let samples: Vec<Vec<f64>> = (0..50).map(|i| vec![1.0 + i as f64 / 50.0]).collect();
        assert_eq!(techlemma_constant(&one, &[1.0], 1.0, &samples).unwrap(), 1.0);
        let mut off = QuarkCoeffs::new(1);
        off.insert(&[0], 0, &[5], 1.0).unwrap();
        assert_eq!(techlemma_constant(&off, &[1.0], 1.0, &samples).unwrap(), 0.0);
        assert!(techlemma_constant(&one, &[1.0], 1.0, &[]).is_err());
    }
}
