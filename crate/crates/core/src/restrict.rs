//! Slices of quark expansions and the restriction experiments.
//!
//! For `x = (x', x'')` with `x' ∈ R^d`, a quark expansion restricted to the
//! hyperplane `{x'' = const}` is again a quark expansion in `d` variables,
//! with coefficients `b^{β'}_{ν,m'}(λ, x'')`. The scans here compare the
//! analytic lower bounds on the slice norms with grid estimates.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::admissible::{ratio_series, AdmissibleFn, Verdict, WeightSeries};
use crate::error::{check_exponent, Error, Result};
use crate::math;
use crate::normest::{
    all_shells, besov_seminorm, bmo_norm, weak_lp_norm, BesovParams, GridFunction, GridSpec, Modulus,
};
use crate::quark::{accumulate, coeff_norm, lambda_profile, synthesize, BumpFn, CounterexampleSpec, QuarkCoeffs};
use crate::seqspace::{lp_norm_unchecked, witness_profile};

/// Number of terms used for the convergence precondition of the weighted
/// membership check.
pub const SERIES_TERMS: u32 = 1_000_000;

/// A sampled slice together with resolution warnings.
#[derive(Debug, Clone, PartialEq)]
pub struct Slice {
    pub grid: GridFunction,
    pub warnings: Vec<String>,
}

/// `Π_i y_i^{β_i} ψ₁(y_i)` for `y = 2^ν x - m`.
fn moment_weight(beta: &[u32], nu: u32, m: &[i64], x: &[f64]) -> f64 {
    let scale = math::exp2i(nu as i32);
    let mut w = 1.0;
    for ((b, mi), xi) in beta.iter().zip(m).zip(x) {
        let y = scale * xi - *mi as f64;
        let f = BumpFn::factor(y);
        if f == 0.0 {
            return 0.0;
        }
        w *= math::pow(y, *b as f64) * f;
    }
    w
}

fn floor_index(nu: u32, x: f64) -> i64 {
    math::floor(math::exp2i(nu as i32) * x) as i64
}

fn split_dim(lambda: &QuarkCoeffs, x_fixed: &[f64]) -> Result<usize> {
    let n = lambda.dimension();
    let k = x_fixed.len();
    if k == 0 || k >= n {
        return Err(Error::param(
            "x_fixed",
            format!("needs between 1 and N-1 = {} fixed coordinates, got {k}", n.saturating_sub(1)),
        ));
    }
    if x_fixed.iter().any(|x| !x.is_finite()) {
        return Err(Error::param("x_fixed", "coordinates must be finite"));
    }
    Ok(n - k)
}

/// `b^{β'}_{ν,m'}(λ, x'') = 2^{ν(N-d)/p} Σ_{β'',m''} λ^β_{ν,m} ψ^{β''}(2^ν x'' - m'')`.
pub fn b_coefficient(
    lambda: &QuarkCoeffs,
    beta_prime: &[u32],
    nu: u32,
    m_prime: &[i64],
    x_fixed: &[f64],
    p: f64,
) -> Result<f64> {
    check_exponent("p", p)?;
    let d = split_dim(lambda, x_fixed)?;
    if beta_prime.len() != d || m_prime.len() != d {
        return Err(Error::param("beta_prime", format!("indices must have length d = {d}")));
    }
    let mut sum = 0.0;
    for (beta, level, block) in lambda.blocks() {
        if level != nu || &beta[..d] != beta_prime {
            continue;
        }
        for (m, v) in block {
            if &m[..d] == m_prime {
                sum += v * moment_weight(&beta[d..], nu, &m[d..], x_fixed);
            }
        }
    }
    Ok(sum * level_factor(nu, lambda.dimension() - d, p))
}

/// `2^{ν(N-d)/p}` (one when `p = ∞`).
fn level_factor(nu: u32, codim: usize, p: f64) -> f64 {
    if p == f64::INFINITY {
        1.0
    } else {
        math::exp2(nu as f64 * codim as f64 / p)
    }
}

/// All nonzero `b^{β'}_{ν,m'}(λ, x'')`, as a coefficient set in `d` variables.
pub fn restricted_coeffs(lambda: &QuarkCoeffs, x_fixed: &[f64], p: f64) -> Result<QuarkCoeffs> {
    check_exponent("p", p)?;
    let d = split_dim(lambda, x_fixed)?;
    let codim = lambda.dimension() - d;
    let mut acc: BTreeMap<(Vec<u32>, u32, Vec<i64>), f64> = BTreeMap::new();
    for (beta, nu, block) in lambda.blocks() {
        let fac = level_factor(nu, codim, p);
        for (m, v) in block {
            let w = moment_weight(&beta[d..], nu, &m[d..], x_fixed);
            if w != 0.0 {
                *acc.entry((beta[..d].to_vec(), nu, m[..d].to_vec())).or_insert(0.0) += fac * v * w;
            }
        }
    }
    let mut out = QuarkCoeffs::new(d).with_rho(lambda.rho())?;
    for ((beta, nu, m), v) in acc {
        out.insert(&beta, nu, &m, v)?;
    }
    Ok(out)
}

fn check_delta(delta: &[u8], codim: usize) -> Result<()> {
    if delta.len() != codim || delta.iter().any(|d| *d > 1) {
        return Err(Error::param("delta", format!("must be a vector in {{0,1}}^{codim}")));
    }
    Ok(())
}

/// Whether `m'' = ⌊2^ν x''⌋ + δ`.
fn on_shifted_floor(m_fixed: &[i64], nu: u32, x_fixed: &[f64], delta: &[u8]) -> bool {
    m_fixed
        .iter()
        .zip(x_fixed)
        .zip(delta)
        .all(|((m, x), dl)| *m == floor_index(nu, *x) + *dl as i64)
}

/// `J^{ϱ,δ}_{p,q}(λ, x'') = sup_{β'} 2^{ϱ|β'|} ‖(b^{β',δ}_{ν,m'})‖_{b_{p,q}}` with
/// `b^{β',δ}_{ν,m'} = 2^{ν(N-d)/p} Σ_{β''} |λ^β_{ν,m',⌊2^ν x''⌋+δ}|`.
pub fn j_functional(lambda: &QuarkCoeffs, x_fixed: &[f64], p: f64, q: f64, rho: f64, delta: &[u8]) -> Result<f64> {
    check_exponent("p", p)?;
    check_exponent("q", q)?;
    if !(rho > 0.0) {
        return Err(Error::param("rho", format!("must be positive, got {rho}")));
    }
    let d = split_dim(lambda, x_fixed)?;
    let codim = lambda.dimension() - d;
    check_delta(delta, codim)?;
    let mut b: BTreeMap<(Vec<u32>, u32), BTreeMap<Vec<i64>, f64>> = BTreeMap::new();
    for (beta, nu, block) in lambda.blocks() {
        let fac = level_factor(nu, codim, p);
        for (m, v) in block {
            if on_shifted_floor(&m[d..], nu, x_fixed, delta) {
                *b.entry((beta[..d].to_vec(), nu)).or_default().entry(m[..d].to_vec()).or_insert(0.0) += fac * v.abs();
            }
        }
    }
    let mut per_beta: BTreeMap<Vec<u32>, Vec<f64>> = BTreeMap::new();
    for ((beta, _nu), block) in b {
        let level = lp_norm_unchecked(block.into_values(), p);
        per_beta.entry(beta).or_default().push(level);
    }
    Ok(per_beta
        .into_iter()
        .map(|(beta, levels)| {
            let size: u32 = beta.iter().sum();
            math::exp2(rho * size as f64) * lp_norm_unchecked(levels, q)
        })
        .fold(0.0, f64::max))
}

/// `sup_β 2^{ϱ₀|β|} (Σ_ν (Σ_{m'} |λ^β_{ν,m',⌊2^ν x''⌋+δ}|^p 2^{ν(N-d)})^{q/p})^{1/q}`.
pub fn lemma41_rhs(lambda: &QuarkCoeffs, x_fixed: &[f64], p: f64, q: f64, rho0: f64, delta: &[u8]) -> Result<f64> {
    check_exponent("p", p)?;
    check_exponent("q", q)?;
    let d = split_dim(lambda, x_fixed)?;
    let codim = lambda.dimension() - d;
    check_delta(delta, codim)?;
    let mut per_beta: BTreeMap<&[u32], Vec<f64>> = BTreeMap::new();
    for (beta, nu, block) in lambda.blocks() {
        let hits = block
            .iter()
            .filter(|(m, _)| on_shifted_floor(&m[d..], nu, x_fixed, delta))
            .map(|(_, v)| *v);
        let level = level_factor(nu, codim, p) * lp_norm_unchecked(hits, p);
        per_beta.entry(beta).or_default().push(level);
    }
    Ok(per_beta
        .into_iter()
        .map(|(beta, levels)| {
            let size: u32 = beta.iter().sum();
            math::exp2(rho0 * size as f64) * lp_norm_unchecked(levels, q)
        })
        .fold(0.0, f64::max))
}

/// `K_{a,p,q} = K_{a/2} K_{pa/4}^{1/p} K_{qa/4}^{1/q}` with
/// `K_α = Σ_{β ∈ N^k} 2^{-α|β|} = (1 - 2^{-α})^{-k}`; infinite exponents
/// contribute a factor one.
pub fn lemma41_constant(a: f64, p: f64, q: f64, codim: usize) -> Result<f64> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::param("a", format!("needs 0 < a < inf, got {a}")));
    }
    check_exponent("p", p)?;
    check_exponent("q", q)?;
    let k = |alpha: f64| math::pow(1.0 - math::exp2(-alpha), -(codim as f64));
    let root = |e: f64| if e == f64::INFINITY { 1.0 } else { math::pow(k(e * a / 4.0), 1.0 / e) };
    Ok(k(a / 2.0) * root(p) * root(q))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma41Check {
    pub lhs: f64,
    pub rhs: f64,
    pub constant: f64,
    pub holds: bool,
}

/// Both sides of `J^{ϱ',δ} ≤ K_{a,p,q} · (right side at ϱ₀)`, `a = ϱ₀ - ϱ'`.
#[allow(clippy::too_many_arguments)]
pub fn lemma41_check(
    lambda: &QuarkCoeffs,
    x_fixed: &[f64],
    p: f64,
    q: f64,
    rho_prime: f64,
    rho0: f64,
    delta: &[u8],
) -> Result<Lemma41Check> {
    if !(rho0 > rho_prime) {
        return Err(Error::param("rho0", format!("needs rho0 > rho' = {rho_prime}, got {rho0}")));
    }
    let lhs = j_functional(lambda, x_fixed, p, q, rho_prime, delta)?;
    let constant = lemma41_constant(rho0 - rho_prime, p, q, x_fixed.len())?;
    let rhs = constant * lemma41_rhs(lambda, x_fixed, p, q, rho0, delta)?;
    Ok(Lemma41Check {
        lhs,
        rhs,
        constant,
        holds: lhs <= rhs * (1.0 + 1e-12),
    })
}

/// Box `[-2, ⌈C_M·top⌉ + 2]^d` holding every counterexample block up to
/// level `top`.
pub fn strip_grid(spec: &CounterexampleSpec, top: u32, level: u32) -> Result<GridSpec> {
    let d = spec.n - 1;
    let hi = math::ceil(spec.c_m() * top as f64) + 2.0;
    GridSpec::new(vec![-2.0; d], vec![hi; d], level)
}

/// `f(x', x'')` of the counterexample summed over levels `1..=top`.
///
/// Level `j` contributes `Λ_j(x'') 2^{-j(s-(N-1)/p)} Ψ(2^{-j})^{-1}
/// Π_i ψ₁(2^j(x_i - C_M j))`.
pub fn slice_truncated(spec: &CounterexampleSpec, x_last: f64, grid: &GridSpec, top: u32) -> Result<Slice> {
    let d = spec.n - 1;
    if grid.dim() != d {
        return Err(Error::param("grid", format!("slice grid must have dimension N-1 = {d}")));
    }
    if !x_last.is_finite() {
        return Err(Error::param("x_fixed", "coordinate must be finite"));
    }
    let shape = grid.shape().to_vec();
    let h = grid.spacing();
    let mut values = vec![0.0; grid.len()];
    let mut warnings = Vec::new();
    let mut ranges: Vec<(usize, Vec<f64>)> = Vec::with_capacity(d);
    for j in 1..=top.min(spec.jmax()) {
        let lam = lambda_profile(spec, x_last, j);
        if lam == 0.0 {
            continue;
        }
        if j + 1 > grid.level() {
            warnings.push(format!("level {j} is finer than the grid level {}", grid.level()));
        }
        let amp = lam * spec.slice_amplitude(j);
        let scale = math::exp2i(j as i32);
        let centre = spec.c_m() * j as f64;
        let radius = 2.0 / scale;
        ranges.clear();
        let mut missed = false;
        #[allow(clippy::needless_range_loop)] // several per-axis arrays
        for axis in 0..d {
            let lo_edge = centre - radius - grid.lower()[axis];
            let hi_edge = centre + radius - grid.lower()[axis];
            if lo_edge < 0.0 || centre + radius > grid.upper()[axis] {
                missed = true;
            }
            let lo = math::ceil(lo_edge / h).max(0.0);
            let hi = math::floor(hi_edge / h).min((shape[axis] - 1) as f64);
            if lo > hi {
                ranges.clear();
                break;
            }
            let (lo, hi) = (lo as usize, hi as usize);
            let fac = (lo..=hi)
                .map(|i| BumpFn::factor(scale * (grid.coord(axis, i) - centre)))
                .collect();
            ranges.push((lo, fac));
        }
        if missed {
            warnings.push(format!("grid does not cover the support of level {j}"));
        }
        if ranges.len() == d {
            accumulate(&mut values, &shape, &ranges, amp);
        }
    }
    Ok(Slice {
        grid: GridFunction::from_values(grid.clone(), values)?,
        warnings,
    })
}

/// The full counterexample slice, every level up to `spec.jmax()`.
pub fn slice(spec: &CounterexampleSpec, x_last: f64, grid: &GridSpec) -> Result<Slice> {
    slice_truncated(spec, x_last, grid, spec.jmax())
}

/// Point value `f(x', x'')` of the counterexample.
pub fn slice_value(spec: &CounterexampleSpec, x_prime: &[f64], x_last: f64) -> f64 {
    (1..=spec.jmax())
        .map(|j| {
            let scale = math::exp2i(j as i32);
            let centre = spec.c_m() * j as f64;
            let shape: f64 = x_prime.iter().map(|x| BumpFn::factor(scale * (x - centre))).product();
            if shape == 0.0 {
                0.0
            } else {
                lambda_profile(spec, x_last, j) * spec.slice_amplitude(j) * shape
            }
        })
        .sum()
}

/// Slice of a general expansion: synthesis of [`restricted_coeffs`] in `d`
/// variables with the `d`-dimensional quarks of `params`.
pub fn slice_coeffs(coeffs: &QuarkCoeffs, params: &BesovParams, x_fixed: &[f64], grid: &GridSpec) -> Result<Slice> {
    let sliced = slice_params(params, coeffs.dimension() - x_fixed.len().min(coeffs.dimension()))?;
    let b = restricted_coeffs(coeffs, x_fixed, params.p)?;
    let bump = BumpFn::new(sliced.n)?;
    let syn = synthesize(&b, &bump, &sliced, grid)?;
    let warnings = if syn.aliasing {
        vec![String::from("some level is finer than half the grid spacing")]
    } else {
        Vec::new()
    };
    Ok(Slice {
        grid: syn.grid,
        warnings,
    })
}

fn slice_params(params: &BesovParams, d: usize) -> Result<BesovParams> {
    if d == 0 {
        return Err(Error::param("d", "slices need at least one free variable"));
    }
    Ok(BesovParams {
        n: d,
        d: d.saturating_sub(1).max(1),
        ..params.clone()
    })
}

/// Outcome of the `q ≤ p` restriction bound.
#[derive(Debug, Clone, PartialEq)]
pub struct RestrictionBound {
    /// `(∫_K ‖f(·,x'')‖^q dx'')^{1/q}` by the midpoint rule.
    pub lhs: f64,
    /// `sup_β 2^{ϱ|β|} ‖λ^β‖_{b_{p,q}}`.
    pub rhs: f64,
    pub ratio: f64,
    pub per_sample: Vec<f64>,
}

/// Midpoints of an `n^k` tensor grid on the box `strip`.
pub fn midpoints(strip: &[(f64, f64)], n_per_axis: usize) -> Result<Vec<Vec<f64>>> {
    if n_per_axis == 0 {
        return Err(Error::param("n_samples", "sampling budget must be positive"));
    }
    if strip.is_empty() || strip.iter().any(|(a, b)| !(b > a) || !a.is_finite() || !b.is_finite()) {
        return Err(Error::param("strip", "needs a nonempty box with finite sides"));
    }
    let k = strip.len();
    let total = n_per_axis
        .checked_pow(k as u32)
        .ok_or_else(|| Error::param("n_samples", "sample count overflows"))?;
    let mut out = Vec::with_capacity(total);
    let mut idx = vec![0usize; k];
    for _ in 0..total {
        out.push(
            idx.iter()
                .zip(strip)
                .map(|(i, (a, b))| a + (b - a) * (*i as f64 + 0.5) / n_per_axis as f64)
                .collect(),
        );
        for a in (0..k).rev() {
            idx[a] += 1;
            if idx[a] < n_per_axis {
                break;
            }
            idx[a] = 0;
        }
    }
    Ok(out)
}

fn check_bound_params(coeffs: &QuarkCoeffs, params: &BesovParams, codim: usize) -> Result<()> {
    if params.n != coeffs.dimension() {
        return Err(Error::param("N", "parameters and coefficients disagree on the dimension"));
    }
    if params.q > params.p {
        return Err(Error::param(
            "q",
            format!("the restriction bound needs q <= p, got p = {}, q = {}", params.p, params.q),
        ));
    }
    if codim == 0 || codim >= params.n {
        return Err(Error::param("strip", "the strip must fix between 1 and N-1 coordinates"));
    }
    Ok(())
}

/// Discretized `B^{(s,Ψ)}_{p,q}(R^d)` norm (`L^p` plus seminorm over every
/// resolvable shell) of one slice.
pub fn slice_norm(coeffs: &QuarkCoeffs, params: &BesovParams, x_fixed: &[f64], grid: &GridSpec) -> Result<f64> {
    check_bound_params(coeffs, params, x_fixed.len())?;
    let sl = slice_coeffs(coeffs, params, x_fixed, grid)?;
    let sliced = slice_params(params, grid.dim())?;
    Ok(besov_seminorm(&sl.grid, &sliced, all_shells(&sl.grid), Modulus::Shell)?.total)
}

/// Combines per-sample slice norms into [`RestrictionBound`].
pub fn combine_bound(per_sample: Vec<f64>, volume: f64, q: f64, rhs: f64) -> Result<RestrictionBound> {
    if per_sample.is_empty() {
        return Err(Error::param("n_samples", "sampling budget must be positive"));
    }
    let lhs = if q == f64::INFINITY {
        per_sample.iter().copied().fold(0.0, f64::max)
    } else {
        let mean = per_sample.iter().map(|v| math::pow(*v, q)).sum::<f64>() / per_sample.len() as f64;
        math::pow(volume * mean, 1.0 / q)
    };
    let ratio = if rhs > 0.0 { lhs / rhs } else { f64::NAN };
    Ok(RestrictionBound {
        lhs,
        rhs,
        ratio,
        per_sample,
    })
}

/// `(∫_K ‖f(·,x'')‖^q dx'')^{1/q}` against the coefficient norm, for `q ≤ p`.
pub fn restriction_bound_check(
    coeffs: &QuarkCoeffs,
    params: &BesovParams,
    strip: &[(f64, f64)],
    n_per_axis: usize,
    grid: &GridSpec,
) -> Result<RestrictionBound> {
    check_bound_params(coeffs, params, strip.len())?;
    let points = midpoints(strip, n_per_axis)?;
    let volume: f64 = strip.iter().map(|(a, b)| b - a).product();
    let per_sample = points
        .iter()
        .map(|x| slice_norm(coeffs, params, x, grid))
        .collect::<Result<Vec<_>>>()?;
    let rhs = coeff_norm(coeffs, params.p, params.q, coeffs.rho())?;
    combine_bound(per_sample, volume, params.q, rhs)
}

/// `n` seeded uniform points of `[1, 2)`, none of them a multiple of
/// `2^{-(jmax+1)}`.
pub fn sample_strip<R: Rng + ?Sized>(rng: &mut R, n: usize, jmax: u32) -> Vec<f64> {
    let scale = math::exp2i(jmax as i32 + 1);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let x = 1.0 + rng.gen::<f64>();
        let y = x * scale;
        if x < 2.0 && y != math::floor(y) {
            out.push(x);
        }
    }
    out
}

/// Which lower bound a scan evaluates.
#[derive(Debug, Clone, PartialEq)]
pub enum ScanKind {
    /// `2^{j/p} λ_{j,⌊2^j x⌋}` against `B^{(s,Ψ)}_{p,∞}` with the spec's `Ψ`.
    Restriction,
    /// `Ψ(2^{-j}) 2^{j/p} λ_{j,⌊2^j x⌋}` aggregated in `ℓ^q`, for an unweighted `f`.
    Weighted(AdmissibleFn),
    /// Hölder regime `sp > d`, same witness as [`ScanKind::Restriction`].
    Holder,
    /// `sp = d`: `c' Λ_j(x)` with the double-average constant of `ψ`.
    Bmo,
    /// `sp < d`: `Λ_j(x) ‖ψ‖_{L^{r,∞}}` with `r = p/(1 - sp)`.
    WeakLp,
}

impl ScanKind {
    pub fn name(&self) -> &'static str {
        match self {
            ScanKind::Restriction => "restriction",
            ScanKind::Weighted(_) => "weighted",
            ScanKind::Holder => "holder",
            ScanKind::Bmo => "bmo",
            ScanKind::WeakLp => "weaklp",
        }
    }
}

/// Grid side of a scan: slices truncated at `top`, sampled at `level`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridOptions {
    pub level: u32,
    /// Largest shell (or truncation level) compared with the witness.
    pub top: u32,
    /// How many of the samples get a grid evaluation.
    pub samples: usize,
    /// Relative discretization slack allowed before a comparison counts as
    /// a violation.
    pub slack: f64,
}

/// Slack used when callers have no preference: blocks at level 6 on a level
/// 10 grid carry 16 nodes per unit of `ψ`'s argument, and norm estimates move
/// by a few tenths of a percent between levels.
pub const DEFAULT_SLACK: f64 = 0.01;

/// One grid-versus-witness comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    pub sample: usize,
    pub level: u32,
    pub grid: f64,
    pub witness: f64,
}

/// `c'` fitted at the smallest level and the comparisons that break it.
#[derive(Debug, Clone, PartialEq)]
pub struct Dominance {
    pub fit_level: u32,
    pub constant: f64,
    pub checked: usize,
    pub violations: usize,
    /// Smallest `grid / (c' · witness)` over every comparison.
    pub worst: f64,
}

/// Fits `c' = min grid/witness` over the observations at the smallest level
/// with a positive witness, then counts observations with
/// `grid < (1 - slack) c' · witness`.
pub fn fit_dominance(obs: &[Observation], slack: f64) -> Result<Dominance> {
    if !(0.0..1.0).contains(&slack) {
        return Err(Error::param("slack", format!("must lie in [0, 1), got {slack}")));
    }
    let live: Vec<&Observation> = obs.iter().filter(|o| o.witness > 0.0).collect();
    let Some(fit_level) = live.iter().map(|o| o.level).min() else {
        return Err(Error::Precondition(String::from("no observation has a positive witness")));
    };
    let constant = live
        .iter()
        .filter(|o| o.level == fit_level)
        .map(|o| o.grid / o.witness)
        .fold(f64::INFINITY, f64::min);
    if !(constant > 0.0) {
        return Err(Error::Precondition(format!(
            "grid norm vanishes where the witness is positive at level {fit_level}"
        )));
    }
    let mut violations = 0;
    let mut worst = f64::INFINITY;
    for o in &live {
        let r = o.grid / (constant * o.witness);
        worst = worst.min(r);
        if r < 1.0 - slack.max(1e-12) {
            violations += 1;
        }
    }
    Ok(Dominance {
        fit_level,
        constant,
        checked: live.len(),
        violations,
        worst,
    })
}

/// Witness curves of a scan for every sample.
#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceReport {
    pub kind: &'static str,
    pub samples: Vec<f64>,
    /// Levels at which reports are tabulated.
    pub j_list: Vec<u32>,
    /// `curves[i][J]` for `J = 0..=max(j_list)`; nondecreasing in `J`.
    pub curves: Vec<Vec<f64>>,
    /// Number of levels `j ≤ J_max` with `λ_{j,⌊2^j x⌋} ≠ 0`.
    pub covered: Vec<u32>,
    /// Sweep ends up to `J_max`.
    pub boundaries: Vec<u32>,
    pub divergent: Vec<bool>,
    pub dominance: Option<Dominance>,
}

impl DivergenceReport {
    pub fn fraction_divergent(&self) -> f64 {
        if self.divergent.is_empty() {
            return 0.0;
        }
        self.divergent.iter().filter(|d| **d).count() as f64 / self.divergent.len() as f64
    }

    /// `min_i curves[i][J_max]`.
    pub fn min_final(&self) -> f64 {
        self.curves
            .iter()
            .filter_map(|c| c.last().copied())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn curve_at(&self, sample: usize, j: u32) -> f64 {
        self.curves[sample][j as usize]
    }
}

/// Whether the curve strictly increases across each of the last two
/// boundaries, the one before them (or `J = 0`) serving as reference.
pub fn grows_across(curve: &[f64], boundaries: &[u32]) -> bool {
    let k = boundaries.len();
    if k < 2 {
        return false;
    }
    let at = |j: u32| curve.get(j as usize).copied().unwrap_or(f64::NAN);
    let base = if k >= 3 { at(boundaries[k - 3]) } else { at(0) };
    let mid = at(boundaries[k - 2]);
    let last = at(boundaries[k - 1]);
    mid > base && last > mid
}

/// `⨍_{-1}^1 |⨍_{-1}^1 (ψ₁(x) - ψ₁(z)) dz| dx` by the midpoint rule.
pub fn bmo_constant() -> f64 {
    const N: usize = 4096;
    let vals: Vec<f64> = (0..N)
        .map(|i| BumpFn::factor(-1.0 + 2.0 * (i as f64 + 0.5) / N as f64))
        .collect();
    let mean = vals.iter().sum::<f64>() / N as f64;
    vals.iter().map(|v| (v - mean).abs()).sum::<f64>() / N as f64
}

/// `‖ψ₁‖_{L^{r,∞}(R)}` from a fine-grid rearrangement.
pub fn bump_weak_norm(r: f64) -> Result<f64> {
    let grid = GridSpec::new(vec![-2.0], vec![2.0], 14)?;
    let g = GridFunction::sample(grid, |x| BumpFn::factor(x[0]))?;
    weak_lp_norm(&g, r)
}

/// A validated scan: spec, kind and the constants the kind needs.
#[derive(Debug, Clone)]
pub struct Scan<'a> {
    spec: &'a CounterexampleSpec,
    kind: ScanKind,
    /// Multiplies `Λ_j` in the BMO and weak-`L^r` witnesses.
    profile_const: f64,
}

impl<'a> Scan<'a> {
    pub fn new(spec: &'a CounterexampleSpec, kind: ScanKind) -> Result<Self> {
        let d = (spec.n - 1) as f64;
        let sp = spec.s * spec.p;
        let tol = 1e-12 * d.max(1.0);
        let unit = spec.psi.is_unit();
        let mut profile_const = 1.0;
        match &kind {
            ScanKind::Restriction => {}
            ScanKind::Weighted(_) => {
                if !unit {
                    return Err(Error::param("psi", "the weighted scan expects an unweighted f (psi = 1)"));
                }
            }
            ScanKind::Holder | ScanKind::Bmo | ScanKind::WeakLp => {
                if !unit {
                    return Err(Error::param("psi", "embedding scans need psi = 1"));
                }
                let ok = match kind {
                    ScanKind::Holder => sp > d + tol,
                    ScanKind::Bmo => (sp - d).abs() <= tol,
                    _ => sp < d - tol,
                };
                if !ok {
                    return Err(Error::param(
                        "mode",
                        format!("{} does not match the regime sp = {sp}, d = {d}", kind.name()),
                    ));
                }
                if kind == ScanKind::Bmo {
                    profile_const = bmo_constant();
                } else if kind == ScanKind::WeakLp {
                    profile_const = bump_weak_norm(weak_exponent(spec))?;
                }
            }
        }
        Ok(Scan {
            spec,
            kind,
            profile_const,
        })
    }

    pub fn kind(&self) -> &ScanKind {
        &self.kind
    }

    /// Per-level witness terms `t_j`, `j = 0..=jmax`.
    pub fn terms(&self, x: f64, jmax: u32) -> Vec<f64> {
        let spec = self.spec;
        match &self.kind {
            ScanKind::Restriction | ScanKind::Holder => witness_profile(&spec.sequence, x, spec.p, jmax),
            ScanKind::Weighted(psi) => {
                let mut t = witness_profile(&spec.sequence, x, spec.p, jmax);
                for (j, v) in t.iter_mut().enumerate() {
                    *v *= psi.eval_dyadic(j as u32);
                }
                t
            }
            ScanKind::Bmo | ScanKind::WeakLp => (0..=jmax)
                .map(|j| self.profile_const * lambda_profile(spec, x, j))
                .collect(),
        }
    }

    /// Running maximum of the terms, or `ℓ^q` partial sums in the weighted
    /// mode with `q < ∞`.
    pub fn curve(&self, x: f64, jmax: u32) -> Vec<f64> {
        let terms = self.terms(x, jmax);
        let q = self.spec.q;
        let mut out = Vec::with_capacity(terms.len());
        let mut acc = 0.0f64;
        for t in terms {
            match self.kind {
                ScanKind::Weighted(_) if q != f64::INFINITY => {
                    acc += math::pow(t, q);
                    out.push(math::pow(acc, 1.0 / q));
                }
                _ => {
                    acc = acc.max(t);
                    out.push(acc);
                }
            }
        }
        out
    }

    fn shell_params(&self, psi: AdmissibleFn) -> Result<BesovParams> {
        let spec = self.spec;
        Ok(BesovParams {
            n: spec.n - 1,
            d: (spec.n - 1).max(1),
            s: spec.s,
            p: spec.p,
            q: spec.q,
            order: spec.order(),
            psi,
        })
    }

    /// `B^α_{∞,∞}` with `α = s - d/p`, the shell part of [`crate::normest::holder_norm`].
    fn holder_params(&self) -> Result<BesovParams> {
        let spec = self.spec;
        let alpha = spec.s - (spec.n - 1) as f64 / spec.p;
        Ok(BesovParams {
            s: alpha,
            p: f64::INFINITY,
            q: f64::INFINITY,
            ..self.shell_params(AdmissibleFn::constant(1.0)?)?
        })
    }

    /// Grid-versus-witness comparisons on the slice through `x`.
    pub fn observations(&self, sample: usize, x: f64, opts: &GridOptions) -> Result<Vec<Observation>> {
        let spec = self.spec;
        let top = opts.top.min(spec.jmax());
        if top == 0 {
            return Err(Error::param("top", "grid comparisons need at least level 1"));
        }
        let grid = strip_grid(spec, top, opts.level)?;
        let terms = self.terms(x, top);
        let mut out = Vec::new();
        match &self.kind {
            ScanKind::Restriction | ScanKind::Weighted(_) | ScanKind::Holder => {
                // Shell j is read off the slice truncated at level j: blocks
                // have disjoint supports farther apart than M|h|, so the full
                // slice can only have larger shell values.
                for j in 1..=top {
                    let f = slice_truncated(spec, x, &grid, j)?.grid;
                    let report = match &self.kind {
                        ScanKind::Holder => besov_seminorm(&f, &self.holder_params()?, j..=j, Modulus::Shell)?,
                        ScanKind::Weighted(psi) => {
                            besov_seminorm(&f, &self.shell_params(psi.clone())?, j..=j, Modulus::Shell)?
                        }
                        _ => besov_seminorm(&f, &self.shell_params(spec.psi.clone())?, j..=j, Modulus::Shell)?,
                    };
                    if let Some(e) = report.per_shell.iter().find(|e| e.j == j) {
                        out.push(Observation {
                            sample,
                            level: j,
                            grid: e.value,
                            witness: terms[j as usize],
                        });
                    }
                }
            }
            ScanKind::Bmo | ScanKind::WeakLp => {
                let mut witness = 0.0f64;
                for jc in 1..=top {
                    witness = witness.max(terms[jc as usize]);
                    let f = slice_truncated(spec, x, &grid, jc)?.grid;
                    let g = if self.kind == ScanKind::Bmo {
                        bmo_norm(&f, opts.level as i32 - 1)?
                    } else {
                        weak_lp_norm(&f, weak_exponent(spec))?
                    };
                    out.push(Observation {
                        sample,
                        level: jc,
                        grid: g,
                        witness,
                    });
                }
            }
        }
        Ok(out)
    }

    /// Curves, verdicts and (optionally) grid dominance over `samples`.
    pub fn run(&self, samples: &[f64], j_list: &[u32], grid: Option<&GridOptions>) -> Result<DivergenceReport> {
        let jmax = check_j_list(self.spec, j_list)?;
        let mut obs = Vec::new();
        if let Some(opts) = grid {
            for (i, x) in samples.iter().take(opts.samples).enumerate() {
                obs.extend(self.observations(i, *x, opts)?);
            }
        }
        let curves: Vec<Vec<f64>> = samples.iter().map(|x| self.curve(*x, jmax)).collect();
        self.assemble(samples, j_list, curves, grid.map(|g| (obs, g.slack)))
    }

    /// Builds the report from precomputed curves and observations.
    pub fn assemble(
        &self,
        samples: &[f64],
        j_list: &[u32],
        curves: Vec<Vec<f64>>,
        obs: Option<(Vec<Observation>, f64)>,
    ) -> Result<DivergenceReport> {
        let jmax = check_j_list(self.spec, j_list)?;
        let boundaries: Vec<u32> = self.spec.sequence.sweep_ends().into_iter().filter(|b| *b <= jmax).collect();
        let divergent = curves.iter().map(|c| grows_across(c, &boundaries)).collect();
        let covered = samples
            .iter()
            .map(|x| {
                witness_profile(&self.spec.sequence, *x, self.spec.p, jmax)
                    .iter()
                    .filter(|v| **v > 0.0)
                    .count() as u32
            })
            .collect();
        let dominance = match obs {
            Some((o, slack)) => Some(fit_dominance(&o, slack)?),
            None => None,
        };
        Ok(DivergenceReport {
            kind: self.kind.name(),
            samples: samples.to_vec(),
            j_list: j_list.to_vec(),
            curves,
            covered,
            boundaries,
            divergent,
            dominance,
        })
    }
}

/// `r = p/(1 - sp)` for a one-dimensional slice (`p/(d - sp)·d` in general).
pub fn weak_exponent(spec: &CounterexampleSpec) -> f64 {
    let d = (spec.n - 1) as f64;
    d * spec.p / (d - spec.s * spec.p)
}

fn check_j_list(spec: &CounterexampleSpec, j_list: &[u32]) -> Result<u32> {
    let Some(&jmax) = j_list.iter().max() else {
        return Err(Error::param("j_list", "needs at least one level"));
    };
    if jmax > spec.jmax() {
        return Err(Error::param(
            "j_list",
            format!("level {jmax} exceeds the sequence depth {}", spec.jmax()),
        ));
    }
    Ok(jmax)
}

/// Divergence scan of the counterexample slices (restriction or weighted kind).
pub fn restriction_divergence_scan(
    spec: &CounterexampleSpec,
    kind: ScanKind,
    samples: &[f64],
    j_list: &[u32],
    grid: Option<&GridOptions>,
) -> Result<DivergenceReport> {
    if !matches!(kind, ScanKind::Restriction | ScanKind::Weighted(_)) {
        return Err(Error::param("mode", "use embedding_failure_scan for the embedding regimes"));
    }
    Scan::new(spec, kind)?.run(samples, j_list, grid)
}

/// Hölder, BMO or weak-`L^r` failure scan of the slices.
pub fn embedding_failure_scan(
    spec: &CounterexampleSpec,
    kind: ScanKind,
    samples: &[f64],
    j_list: &[u32],
    grid: Option<&GridOptions>,
) -> Result<DivergenceReport> {
    if !matches!(kind, ScanKind::Holder | ScanKind::Bmo | ScanKind::WeakLp) {
        return Err(Error::param("mode", "expected one of holder, bmo, weaklp"));
    }
    Scan::new(spec, kind)?.run(samples, j_list, grid)
}

/// `χ = qp/(q - p)`, or `p` when `q = ∞`.
pub fn weight_exponent(p: f64, q: f64) -> f64 {
    if q == f64::INFINITY {
        p
    } else {
        q * p / (q - p)
    }
}

/// Bounded weighted witnesses of an unweighted `f` below the threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct MembershipReport {
    pub chi: f64,
    pub series: WeightSeries,
    /// The weighted scan: `ℓ^q` partial sums of `Ψ(2^{-j}) 2^{j/p} λ_{j,⌊2^j x⌋}`.
    pub weighted: DivergenceReport,
    /// `sup_j Ψ(2^{-j}) 2^{j/p} λ_{j,⌊2^j x⌋}` per sample.
    pub max_term: Vec<f64>,
    /// The same samples with `Ψ ≡ 1`.
    pub contrast: DivergenceReport,
    /// `B^{(s,Ψ)}_{p,q}` seminorms of slices truncated at `1..=top`, per
    /// grid sample.
    pub plateau: Vec<Vec<f64>>,
}

impl MembershipReport {
    pub fn bounded_by(&self, c: f64) -> bool {
        self.max_term.iter().all(|t| *t <= c)
    }
}

/// Checks that the weighted witnesses stay bounded when `Σ Ψ(2^{-j})^χ`
/// converges, and contrasts them with the unweighted run.
pub fn weighted_membership_check(
    spec: &CounterexampleSpec,
    psi: &AdmissibleFn,
    samples: &[f64],
    j_list: &[u32],
    grid: Option<&GridOptions>,
) -> Result<MembershipReport> {
    let chi = weight_exponent(spec.p, spec.q);
    let series = ratio_series(psi, None, chi, SERIES_TERMS)?;
    if series.verdict != Verdict::Converges {
        return Err(Error::Precondition(format!("sum of Psi(2^-j)^{chi} diverges for {psi}")));
    }
    let scan = Scan::new(spec, ScanKind::Weighted(psi.clone()))?;
    let weighted = scan.run(samples, j_list, None)?;
    let jmax = check_j_list(spec, j_list)?;
    let max_term = samples
        .iter()
        .map(|x| scan.terms(*x, jmax).into_iter().fold(0.0, f64::max))
        .collect();
    let contrast = Scan::new(spec, ScanKind::Restriction)?.run(samples, j_list, None)?;
    let mut plateau = Vec::new();
    if let Some(opts) = grid {
        let params = scan.shell_params(psi.clone())?;
        let top = opts.top.min(spec.jmax());
        let g = strip_grid(spec, top, opts.level)?;
        for x in samples.iter().take(opts.samples) {
            let mut row = Vec::with_capacity(top as usize);
            for jc in 1..=top {
                let f = slice_truncated(spec, *x, &g, jc)?.grid;
                row.push(besov_seminorm(&f, &params, 1..=top, Modulus::Shell)?.seminorm);
            }
            plateau.push(row);
        }
    }
    Ok(MembershipReport {
        chi,
        series,
        weighted,
        max_term,
        contrast,
        plateau,
    })
}

/// Both sides of `‖f‖_{B^{(s,Ψ)}_{p,r}} ≤ (Σ_j (Ψ/Φ)(2^{-j})^χ)^{1/χ} ‖f‖_{B^{(s,Φ)}_{p,q}}`
/// on coefficients, `χ = qr/(q - r)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmbeddingCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub factor: f64,
    pub holds: bool,
}

/// `η` are the `Φ`-quark coefficients of `f`; as `Ψ`-quark coefficients they
/// become `(Ψ/Φ)(2^{-ν}) η`. The sum defining the factor runs over the
/// levels present in `η`.
pub fn embedding_inequality_check(
    eta: &QuarkCoeffs,
    p: f64,
    q: f64,
    r: f64,
    phi: &AdmissibleFn,
    psi: &AdmissibleFn,
) -> Result<EmbeddingCheck> {
    check_exponent("p", p)?;
    check_exponent("q", q)?;
    check_exponent("r", r)?;
    if !(r <= p && p < q) {
        return Err(Error::param("r", format!("needs r <= p < q, got r = {r}, p = {p}, q = {q}")));
    }
    let chi = weight_exponent(r, q);
    let ratio = |nu: u32| psi.eval_dyadic(nu) / phi.eval_dyadic(nu);
    let top = eta.max_nu().unwrap_or(0);
    let factor = math::pow((0..=top).rev().map(|nu| math::pow(ratio(nu), chi)).sum::<f64>(), 1.0 / chi);
    let rho = eta.rho();
    let mut per_beta: BTreeMap<&[u32], Vec<f64>> = BTreeMap::new();
    for (beta, nu, block) in eta.blocks() {
        per_beta
            .entry(beta)
            .or_default()
            .push(ratio(nu) * lp_norm_unchecked(block.values().copied(), p));
    }
    let lhs = per_beta
        .into_iter()
        .map(|(beta, levels)| {
            let size: u32 = beta.iter().sum();
            math::exp2(rho * size as f64) * lp_norm_unchecked(levels, r)
        })
        .fold(0.0, f64::max);
    let rhs = factor * coeff_norm(eta, p, q, rho)?;
    Ok(EmbeddingCheck {
        lhs,
        rhs,
        factor,
        holds: lhs <= rhs * (1.0 + 1e-12),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqspace::{construct_lambda, construct_weighted_lambda};

    fn unit() -> AdmissibleFn {
        AdmissibleFn::constant(1.0).unwrap()
    }

    fn spec(s: f64, jmax: u32) -> CounterexampleSpec {
        let seq = construct_lambda(1.0, f64::INFINITY, jmax).unwrap();
        CounterexampleSpec::new(2, s, 1.0, f64::INFINITY, unit(), seq).unwrap()
    }

    #[test]
    fn slice_point_value() {
        let sp = spec(0.5, 12);
        let grid = strip_grid(&sp, 12, 6).unwrap();
        let sl = slice(&sp, 1.0, &grid).unwrap();
        let expected = 3.0 * math::sqrt(2.0) / 8.0;
        assert!((slice_value(&sp, &[6.0], 1.0) - expected).abs() < 1e-15);
        let idx = ((6.0 + 2.0) * 64.0) as usize;
        assert!((sl.grid.values()[idx] - expected).abs() < 1e-15);
        let empty = slice(&sp, 5.0, &grid).unwrap();
        assert!(empty.grid.values().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn slice_matches_restricted_synthesis() {
        let sp = spec(0.5, 6);
        let coeffs = crate::quark::counterexample_coeffs(&sp).unwrap();
        let params = BesovParams::new(2, 0.5, 1.0, f64::INFINITY).unwrap();
        let grid = strip_grid(&sp, 6, 8).unwrap();
        for x in [1.0, 1.3, 1.77, 1.999] {
            let a = slice(&sp, x, &grid).unwrap();
            let b = slice_coeffs(&coeffs, &params, &[x], &grid).unwrap();
            for (u, v) in a.grid.values().iter().zip(b.grid.values()) {
                assert!((u - v).abs() < 1e-10, "{u} vs {v} at x = {x}");
            }
        }
    }

    #[test]
    fn b_coefficient_examples() {
        let mut c = QuarkCoeffs::new(2);
        let x = 1.3;
        c.insert(&[0, 0], 0, &[0, 1], 2.0).unwrap();
        let b = b_coefficient(&c, &[0], 0, &[0], &[x], 1.0).unwrap();
        assert!((b - 2.0 * BumpFn::factor(x - 1.0)).abs() < 1e-15);
        c.insert(&[0, 0], 0, &[0, 1], 1.0).unwrap();
        c.insert(&[0, 0], 0, &[0, 2], 1.0).unwrap();
        let b = b_coefficient(&c, &[0], 0, &[0], &[x], 1.0).unwrap();
        let frac = x - 1.0;
        assert!((b - BumpFn::factor(frac) - BumpFn::factor(frac - 1.0)).abs() < 1e-15);
        assert!(b > 0.0 && b <= 1.0);
        let empty = QuarkCoeffs::new(2);
        assert_eq!(b_coefficient(&empty, &[0], 0, &[0], &[x], 1.0).unwrap(), 0.0);
    }

    #[test]
    fn j_functional_examples() {
        let mut c = QuarkCoeffs::new(2);
        c.insert(&[0, 0], 0, &[0, 1], 1.0).unwrap();
        assert_eq!(j_functional(&c, &[1.4], 1.0, 2.0, 2.0, &[0]).unwrap(), 1.0);
        assert_eq!(j_functional(&c, &[1.4], 1.0, 2.0, 2.0, &[1]).unwrap(), 0.0);
        assert!(j_functional(&c, &[1.4], 1.0, 2.0, 2.0, &[2]).is_err());
        let chk = lemma41_check(&c, &[1.4], 1.0, 2.0, 1.0, 2.0, &[0]).unwrap();
        assert!(chk.holds);
    }

    #[test]
    fn lemma41_constant_values() {
        // K_α = 1/(1-2^{-α}) for one fixed coordinate
        let k = lemma41_constant(2.0, 1.0, f64::INFINITY, 1).unwrap();
        let expected = (1.0 / (1.0 - 0.5)) * (1.0 / (1.0 - math::exp2(-0.5)));
        assert!((k - expected).abs() < 1e-14);
    }

    #[test]
    fn grows_across_rules() {
        let c = [0.0, 1.0, 1.0, 1.0, 2.0, 2.0, 5.0];
        assert!(grows_across(&c, &[1, 4, 6]));
        assert!(!grows_across(&c, &[1, 2, 3]));
        assert!(grows_across(&c, &[1, 4]));
        assert!(!grows_across(&c, &[4]));
    }

    #[test]
    fn divergence_scan_small() {
        let sp = spec(0.5, 20);
        let samples: Vec<f64> = (0..50).map(|i| 1.0 + (i as f64 + 0.37) / 50.0).collect();
        let rep = restriction_divergence_scan(&sp, ScanKind::Restriction, &samples, &[4, 13, 20], None).unwrap();
        assert_eq!(rep.boundaries, vec![1, 4, 13]);
        assert_eq!(rep.fraction_divergent(), 1.0);
        for c in &rep.curves {
            assert!(c.windows(2).all(|w| w[1] >= w[0]));
        }
        assert!(rep.min_final() >= 5.0);
    }

    #[test]
    fn mode_mismatch_is_rejected() {
        let sp = spec(0.5, 8);
        assert!(Scan::new(&sp, ScanKind::Bmo).is_err());
        assert!(Scan::new(&sp, ScanKind::Holder).is_err());
        assert!(Scan::new(&sp, ScanKind::WeakLp).is_ok());
        assert!(Scan::new(&spec(1.0, 8), ScanKind::Bmo).is_ok());
        assert!(restriction_divergence_scan(&sp, ScanKind::WeakLp, &[1.5], &[4], None).is_err());
        assert!(restriction_divergence_scan(&sp, ScanKind::Restriction, &[1.5], &[9], None).is_err());
    }

    #[test]
    fn weak_exponent_and_bump_norm() {
        let sp = spec(0.5, 8);
        assert_eq!(weak_exponent(&sp), 2.0);
        let w = bump_weak_norm(2.0).unwrap();
        // ‖ψ‖_{L^{2,∞}} lies between sup_t t^{1/2}ψ*(t) at t = 2 and the L^2 norm bound
        assert!(w > 0.25 * math::sqrt(2.0) && w < 1.0);
        let c = bmo_constant();
        assert!(c > 0.0 && c < 0.25);
    }

    #[test]
    fn weighted_terms_identity() {
        let psi = AdmissibleFn::log_power(0.25, -1.0).unwrap();
        let seq = construct_weighted_lambda(1.0, f64::INFINITY, &psi, 60).unwrap();
        let sp = CounterexampleSpec::new(2, 0.5, 1.0, f64::INFINITY, unit(), seq).unwrap();
        let scan = Scan::new(&sp, ScanKind::Weighted(psi.clone())).unwrap();
        let mut cum = 0.0;
        let terms = scan.terms(1.95, 60);
        for (j, t) in terms.iter().enumerate() {
            cum += psi.eval_dyadic(j as u32);
            if *t > 0.0 {
                assert!((t - cum).abs() < 1e-9 * cum, "level {j}: {t} vs {cum}");
            }
        }
    }

    #[test]
    fn embedding_inequality_holds() {
        let mut eta = QuarkCoeffs::new(2);
        for nu in 0..8u32 {
            eta.insert(&[0, 0], nu, &[nu as i64, 1], 1.0 / (nu as f64 + 1.0)).unwrap();
            eta.insert(&[1, 0], nu, &[0, 0], 0.1).unwrap();
        }
        let psi = AdmissibleFn::log_power(0.25, -1.0).unwrap();
        let chk = embedding_inequality_check(&eta, 1.0, 2.0, 1.0, &unit(), &psi).unwrap();
        assert!(chk.holds, "{chk:?}");
        assert!(embedding_inequality_check(&eta, 1.0, 2.0, 3.0, &unit(), &psi).is_err());
    }

    #[test]
    fn restriction_bound_single_quark() {
        let mut c = QuarkCoeffs::new(2);
        c.insert(&[0, 0], 0, &[0, 0], 1.0).unwrap();
        let params = BesovParams::new(2, 0.5, 1.0, 1.0).unwrap();
        let grid = GridSpec::new(vec![-3.0], vec![3.0], 6).unwrap();
        let rb = restriction_bound_check(&c, &params, &[(-1.0, 1.0)], 8, &grid).unwrap();
        assert!(rb.lhs > 0.0 && rb.ratio.is_finite());
        let zero = QuarkCoeffs::new(2);
        let rz = restriction_bound_check(&zero, &params, &[(1.0, 2.0)], 4, &grid).unwrap();
        assert_eq!(rz.lhs, 0.0);
        assert!(restriction_bound_check(&c, &params, &[(1.0, 2.0)], 0, &grid).is_err());
        let bad = BesovParams::new(2, 0.5, 1.0, 2.0).unwrap();
        assert!(restriction_bound_check(&c, &bad, &[(1.0, 2.0)], 4, &grid).is_err());
    }
}
