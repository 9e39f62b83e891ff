//! Grid functions and finite-difference norm estimators.
//!
//! A [`GridFunction`] holds node values on a box whose corners are multiples
//! of the spacing `2^{-J}`. Integrals use trapezoid weights, so constants and
//! affine functions integrate exactly.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::RangeInclusive;

use crate::admissible::AdmissibleFn;
use crate::error::{check_exponent, Error, Result};
use crate::math;

/// Deepest grid level accepted.
pub const MAX_GRID_LEVEL: u32 = 30;

/// Axis-aligned box sampled at spacing `2^{-level}`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    lower: Vec<f64>,
    upper: Vec<f64>,
    level: u32,
    shape: Vec<usize>,
}

impl GridSpec {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>, level: u32) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::param("box", "lower and upper corners must have the same nonzero dimension"));
        }
        if level > MAX_GRID_LEVEL {
            return Err(Error::param("level", format!("{level} exceeds {MAX_GRID_LEVEL}")));
        }
        let scale = math::exp2i(level as i32);
        let mut shape = Vec::with_capacity(lower.len());
        for (a, b) in lower.iter().zip(&upper) {
            let (ia, ib) = (a * scale, b * scale);
            if !(ia.is_finite() && ib.is_finite()) || ia != math::floor(ia) || ib != math::floor(ib) {
                return Err(Error::param("box", format!("corners {a}, {b} are not multiples of 2^-{level}")));
            }
            if !(ib > ia) {
                return Err(Error::param("box", format!("empty axis [{a}, {b}]")));
            }
            shape.push((ib - ia) as usize + 1);
        }
        let total = shape.iter().try_fold(1usize, |acc, n| acc.checked_mul(*n));
        if total.is_none_or(|t| t > 1 << 31) {
            return Err(Error::param("box", "grid has more than 2^31 nodes"));
        }
        Ok(GridSpec {
            lower,
            upper,
            level,
            shape,
        })
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// Nodes per axis, `extent · 2^J + 1`.
    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        math::exp2i(-(self.level as i32))
    }

    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        self.lower[axis] + i as f64 * self.spacing()
    }

    /// Row-major strides, last axis fastest.
    pub fn strides(&self) -> Vec<usize> {
        let n = self.dim();
        let mut s = vec![1usize; n];
        for a in (0..n.saturating_sub(1)).rev() {
            s[a] = s[a + 1] * self.shape[a + 1];
        }
        s
    }

    /// Coordinates of a flat node index.
    pub fn point(&self, flat: usize) -> Vec<f64> {
        let strides = self.strides();
        let mut rest = flat;
        strides
            .iter()
            .enumerate()
            .map(|(a, st)| {
                let i = rest / st;
                rest %= st;
                self.coord(a, i)
            })
            .collect()
    }
}

/// Node values on a [`GridSpec`], row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    spec: GridSpec,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn from_values(spec: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::param(
                "values",
                format!("expected {} values, got {}", spec.len(), values.len()),
            ));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::param("values", format!("value {i} is not finite")));
        }
        Ok(GridFunction { spec, values })
    }

    pub fn sample(spec: GridSpec, mut f: impl FnMut(&[f64]) -> f64) -> Result<Self> {
        let n = spec.dim();
        let mut x = vec![0.0; n];
        let mut values = Vec::with_capacity(spec.len());
        let mut idx = vec![0usize; n];
        for _ in 0..spec.len() {
            for a in 0..n {
                x[a] = spec.coord(a, idx[a]);
            }
            values.push(f(&x));
            increment(&mut idx, spec.shape());
        }
        Self::from_values(spec, values)
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn level(&self) -> u32 {
        self.spec.level
    }

    pub fn scaled(&self, c: f64) -> Self {
        GridFunction {
            spec: self.spec.clone(),
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    /// Trapezoid weight of every node.
    pub fn weights(&self) -> Vec<f64> {
        let ranges: Vec<(usize, usize)> = self.spec.shape.iter().map(|n| (0, n - 1)).collect();
        let h = self.spec.spacing();
        let mut out = Vec::with_capacity(self.values.len());
        let mut idx = vec![0usize; self.spec.dim()];
        for _ in 0..self.values.len() {
            out.push(node_weight(&idx, &ranges, h));
            increment(&mut idx, &self.spec.shape);
        }
        out
    }
}

fn increment(idx: &mut [usize], shape: &[usize]) {
    for a in (0..idx.len()).rev() {
        idx[a] += 1;
        if idx[a] < shape[a] {
            return;
        }
        idx[a] = 0;
    }
}

/// Trapezoid weight of `idx` inside the closed index box `ranges`.
fn node_weight(idx: &[usize], ranges: &[(usize, usize)], h: f64) -> f64 {
    let mut w = 1.0;
    for (i, (lo, hi)) in idx.iter().zip(ranges) {
        if lo == hi {
            // a degenerate axis carries no length
            return 0.0;
        }
        w *= if i == lo || i == hi { 0.5 * h } else { h };
    }
    w
}

/// Smoothness parameters `(N, d, s, p, q, M, Ψ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BesovParams {
    pub n: usize,
    pub d: usize,
    pub s: f64,
    pub p: f64,
    pub q: f64,
    /// Difference order `M`.
    pub order: u32,
    pub psi: AdmissibleFn,
}

impl BesovParams {
    /// `d = N - 1`, `M = ⌊s⌋ + 1`, `Ψ ≡ 1`.
    pub fn new(n: usize, s: f64, p: f64, q: f64) -> Result<Self> {
        let order = math::floor(s) as u32 + 1;
        let psi = AdmissibleFn::constant(1.0)?;
        Self {
            n,
            d: n.saturating_sub(1).max(1),
            s,
            p,
            q,
            order,
            psi,
        }
        .validated()
    }

    pub fn with_order(mut self, order: u32) -> Result<Self> {
        self.order = order;
        self.validated()
    }

    pub fn with_psi(mut self, psi: AdmissibleFn) -> Self {
        self.psi = psi;
        self
    }

    pub fn with_d(mut self, d: usize) -> Result<Self> {
        self.d = d;
        self.validated()
    }

    /// `σ_p = N (1/p - 1)_+`.
    pub fn sigma_p(&self) -> f64 {
        if self.p < 1.0 {
            self.n as f64 * (1.0 / self.p - 1.0)
        } else {
            0.0
        }
    }

    fn validated(self) -> Result<Self> {
        if self.n == 0 || self.d == 0 || self.d > self.n {
            return Err(Error::param("d", format!("need 1 <= d <= N, got d = {}, N = {}", self.d, self.n)));
        }
        check_exponent("p", self.p)?;
        check_exponent("q", self.q)?;
        if !(self.s > self.sigma_p()) || !self.s.is_finite() {
            return Err(Error::param("s", format!("needs s > sigma_p = {}, got {}", self.sigma_p(), self.s)));
        }
        if !(self.s < self.order as f64) {
            return Err(Error::param("M", format!("needs s < M, got s = {}, M = {}", self.s, self.order)));
        }
        Ok(self)
    }
}

fn binomial_signs(order: u32) -> Vec<f64> {
    // (-1)^{M-t} C(M, t), t = 0..=M
    let m = order as usize;
    let mut c = vec![1.0f64; m + 1];
    for t in 1..=m {
        c[t] = c[t - 1] * (m + 1 - t) as f64 / t as f64;
    }
    for (t, v) in c.iter_mut().enumerate() {
        if (m - t) % 2 == 1 {
            *v = -*v;
        }
    }
    c
}

/// Converts a shift vector to whole grid steps.
pub fn align_shift(spec: &GridSpec, h: &[f64]) -> Result<Vec<i64>> {
    if h.len() != spec.dim() {
        return Err(Error::param("h", format!("shift has {} components for a {}-d grid", h.len(), spec.dim())));
    }
    let scale = math::exp2i(spec.level as i32);
    h.iter()
        .map(|x| {
            let steps = x * scale;
            let r = math::round(steps);
            if (steps - r).abs() > 1e-9 || !steps.is_finite() {
                Err(Error::Misaligned)
            } else {
                Ok(r as i64)
            }
        })
        .collect()
}

/// Index box of base points whose whole stencil `x, x+h, …, x+Mh` is in the grid.
fn shrunken(spec: &GridSpec, steps: &[i64], order: u32) -> Option<Vec<(usize, usize)>> {
    let m = order as i64;
    spec.shape
        .iter()
        .zip(steps)
        .map(|(&n, &s)| {
            let span = m * s.abs();
            if span > n as i64 - 1 {
                return None;
            }
            if s >= 0 {
                Some((0, (n as i64 - 1 - span) as usize))
            } else {
                Some((span as usize, n - 1))
            }
        })
        .collect()
}

/// `Δ^M_h f` on the shrunken domain; `None` when no stencil fits.
pub fn iterated_difference(f: &GridFunction, h: &[f64], order: u32) -> Result<Option<GridFunction>> {
    let steps = align_shift(&f.spec, h)?;
    let Some(ranges) = shrunken(&f.spec, &steps, order) else {
        return Ok(None);
    };
    let lower: Vec<f64> = ranges.iter().enumerate().map(|(a, r)| f.spec.coord(a, r.0)).collect();
    let upper: Vec<f64> = ranges.iter().enumerate().map(|(a, r)| f.spec.coord(a, r.1)).collect();
    if ranges.iter().any(|(lo, hi)| lo == hi) {
        return Ok(None);
    }
    let out_spec = GridSpec::new(lower, upper, f.spec.level)?;
    let strides = f.spec.strides();
    let step_off: i64 = steps.iter().zip(&strides).map(|(s, st)| s * *st as i64).sum();
    let coefs = binomial_signs(order);
    let mut values = Vec::with_capacity(out_spec.len());
    let mut idx: Vec<usize> = vec![0; ranges.len()];
    for _ in 0..out_spec.len() {
        let base: usize = idx.iter().zip(&ranges).zip(&strides).map(|((i, r), st)| (i + r.0) * st).sum();
        values.push(stencil(&f.values, base, step_off, &coefs));
        increment(&mut idx, out_spec.shape());
    }
    Ok(Some(GridFunction::from_values(out_spec, values)?))
}

#[inline]
fn stencil(values: &[f64], base: usize, step: i64, coefs: &[f64]) -> f64 {
    let mut acc = 0.0;
    let mut pos = base as i64;
    for c in coefs {
        acc += c * values[pos as usize];
        pos += step;
    }
    acc
}

/// Accumulates `Σ w|v|^p` (or `max|v|` for `p = ∞`).
#[derive(Clone, Copy)]
struct Acc {
    p: f64,
    sum: f64,
}

impl Acc {
    fn new(p: f64) -> Self {
        Acc { p, sum: 0.0 }
    }

    #[inline]
    fn add(&mut self, w: f64, v: f64) {
        if self.p == f64::INFINITY {
            // the sup sees every node, including those of degenerate boxes
            self.sum = self.sum.max(v.abs());
        } else if v != 0.0 {
            self.sum += w * math::abs_pow(v, self.p);
        }
    }

    fn finish(self) -> f64 {
        if self.p == f64::INFINITY {
            self.sum
        } else {
            math::root(self.sum, self.p)
        }
    }
}

/// `‖f‖_{L^p}` with trapezoid weights, `max|f|` for `p = ∞`.
pub fn lp_norm_grid(f: &GridFunction, p: f64) -> Result<f64> {
    check_exponent("p", p)?;
    let mut acc = Acc::new(p);
    for (w, v) in f.weights().into_iter().zip(&f.values) {
        acc.add(w, *v);
    }
    Ok(acc.finish())
}

/// Precomputed nonzero pattern for the sparse difference path.
struct Support {
    coords: Vec<Vec<usize>>,
}

impl Support {
    fn of(f: &GridFunction) -> Self {
        let strides = f.spec.strides();
        let coords = (0..f.values.len())
            .filter(|&z| f.values[z] != 0.0)
            .map(|z| {
                let mut rest = z;
                strides
                    .iter()
                    .map(|st| {
                        let i = rest / st;
                        rest %= st;
                        i
                    })
                    .collect()
            })
            .collect();
        Support { coords }
    }
}

/// Difference-norm kernel shared by all shell scans.
struct DiffKernel<'a> {
    f: &'a GridFunction,
    strides: Vec<usize>,
    coefs: Vec<f64>,
    order: u32,
    support: Option<Support>,
    stamp: Vec<u32>,
    epoch: u32,
}

impl<'a> DiffKernel<'a> {
    fn new(f: &'a GridFunction, order: u32) -> Self {
        let nnz = f.values.iter().filter(|v| **v != 0.0).count();
        let sparse = nnz * (order as usize + 1) * 4 < f.values.len();
        DiffKernel {
            f,
            strides: f.spec.strides(),
            coefs: binomial_signs(order),
            order,
            support: if sparse { Some(Support::of(f)) } else { None },
            stamp: if sparse { vec![0; f.values.len()] } else { Vec::new() },
            epoch: 0,
        }
    }

    /// `‖Δ^M_h f‖_p` over the shrunken domain; `None` if it is empty.
    fn norm(&mut self, steps: &[i64], p: f64) -> Option<f64> {
        let ranges = shrunken(&self.f.spec, steps, self.order)?;
        let h = self.f.spec.spacing();
        let step_off: i64 = steps.iter().zip(&self.strides).map(|(s, st)| s * *st as i64).sum();
        let mut acc = Acc::new(p);
        if let Some(support) = &self.support {
            self.epoch = self.epoch.wrapping_add(1);
            if self.epoch == 0 {
                self.stamp.iter_mut().for_each(|s| *s = 0);
                self.epoch = 1;
            }
            let mut base = vec![0usize; ranges.len()];
            for c in &support.coords {
                'shift: for t in 0..=self.order as i64 {
                    for a in 0..ranges.len() {
                        let b = c[a] as i64 - t * steps[a];
                        if b < ranges[a].0 as i64 || b > ranges[a].1 as i64 {
                            continue 'shift;
                        }
                        base[a] = b as usize;
                    }
                    let flat: usize = base.iter().zip(&self.strides).map(|(i, st)| i * st).sum();
                    if self.stamp[flat] == self.epoch {
                        continue;
                    }
                    self.stamp[flat] = self.epoch;
                    let v = stencil(&self.f.values, flat, step_off, &self.coefs);
                    acc.add(node_weight(&base, &ranges, h), v);
                }
            }
        } else {
            let mut idx: Vec<usize> = ranges.iter().map(|r| r.0).collect();
            let count: usize = ranges.iter().map(|r| r.1 - r.0 + 1).product();
            for _ in 0..count {
                let flat: usize = idx.iter().zip(&self.strides).map(|(i, st)| i * st).sum();
                let v = stencil(&self.f.values, flat, step_off, &self.coefs);
                acc.add(node_weight(&idx, &ranges, h), v);
                for a in (0..idx.len()).rev() {
                    idx[a] += 1;
                    if idx[a] <= ranges[a].1 {
                        break;
                    }
                    idx[a] = ranges[a].0;
                }
            }
        }
        Some(acc.finish())
    }
}

/// Grid shifts (in steps of `2^{-J}`) with `2^{-(j+1)} ≤ |h| ≤ 2^{-j}`.
///
/// Axis shifts point in the positive direction only: `‖Δ^M_{-h} f‖_p` equals
/// `‖Δ^M_h f‖_p` on the shrunken domains. Diagonals fix the first sign.
pub fn shell_shifts(dim: usize, grid_level: u32, j: u32) -> Vec<Vec<i64>> {
    if j + 1 > grid_level {
        return Vec::new();
    }
    let lo = 1i64 << (grid_level - j - 1);
    let hi = 1i64 << (grid_level - j);
    let mut out = Vec::new();
    for axis in 0..dim {
        for i in lo..=hi {
            let mut s = vec![0i64; dim];
            s[axis] = i;
            out.push(s);
        }
    }
    if dim >= 2 {
        let root = math::sqrt(dim as f64);
        let first = math::ceil(lo as f64 / root) as i64;
        let last = math::floor(hi as f64 / root) as i64;
        for i in first.max(1)..=last {
            for signs in 0..(1u32 << (dim - 1)) {
                let mut s = vec![i; dim];
                for (a, slot) in s.iter_mut().enumerate().skip(1) {
                    if signs >> (a - 1) & 1 == 1 {
                        *slot = -i;
                    }
                }
                out.push(s);
            }
        }
    }
    out
}

/// How shell moduli enter the seminorm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Modulus {
    /// `sup_{h∈K_j} ‖Δ^M_h f‖_p` per shell.
    #[default]
    Shell,
    /// `sup_{|h|≤2^{-j}} ‖Δ^M_h f‖_p`, the running max over finer shells.
    Cumulative,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShellEntry {
    pub j: u32,
    /// Unweighted modulus of the shell.
    pub raw: f64,
    /// `2^{js} Ψ(2^{-j})` times the modulus.
    pub value: f64,
    /// Whether `value` exceeds the previous shell's.
    pub growing: bool,
}

/// `‖f‖_p` plus weighted shell moduli, combined by `ℓ^q`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormReport {
    pub lp: f64,
    pub per_shell: Vec<ShellEntry>,
    pub seminorm: f64,
    /// `lp + seminorm`.
    pub total: f64,
    pub flags: Vec<String>,
}

/// Discretized (generalized) Besov quasi-norm over the shells `j_range`.
pub fn besov_seminorm(
    f: &GridFunction,
    params: &BesovParams,
    j_range: RangeInclusive<u32>,
    modulus: Modulus,
) -> Result<NormReport> {
    let grid_level = f.level();
    let (first, last) = (*j_range.start(), *j_range.end());
    if first > last {
        return Err(Error::param("j_range", format!("empty range {first}..={last}")));
    }
    if first + 1 > grid_level {
        return Err(Error::Resolution {
            first,
            last,
            level: grid_level,
        });
    }
    let lp = lp_norm_grid(f, params.p)?;
    let mut flags = Vec::new();
    let top = last.min(grid_level - 1);
    if top < last {
        flags.push(format!("shells {}..={last} unresolvable at grid level {grid_level}", top + 1));
    }
    let mut kernel = DiffKernel::new(f, params.order);
    let mut raws = Vec::with_capacity((top - first + 1) as usize);
    for j in first..=top {
        let mut sup: Option<f64> = None;
        for s in shell_shifts(f.spec.dim(), grid_level, j) {
            if let Some(v) = kernel.norm(&s, params.p) {
                sup = Some(sup.map_or(v, |m: f64| m.max(v)));
            }
        }
        if sup.is_none() {
            flags.push(format!("shell {j}: no difference stencil fits in the box"));
        }
        raws.push(sup.unwrap_or(0.0));
    }
    if modulus == Modulus::Cumulative {
        for i in (0..raws.len().saturating_sub(1)).rev() {
            raws[i] = raws[i].max(raws[i + 1]);
        }
    }
    let mut per_shell: Vec<ShellEntry> = Vec::with_capacity(raws.len());
    for (i, raw) in raws.into_iter().enumerate() {
        let j = first + i as u32;
        let weight = math::exp2(j as f64 * params.s) * params.psi.eval_dyadic(j);
        let value = weight * raw;
        let growing = per_shell.last().is_some_and(|prev| value > prev.value);
        per_shell.push(ShellEntry { j, raw, value, growing });
    }
    let seminorm = crate::seqspace::lp_norm_unchecked(per_shell.iter().map(|e| e.value), params.q);
    Ok(NormReport {
        lp,
        seminorm,
        total: lp + seminorm,
        per_shell,
        flags,
    })
}

/// Every resolvable shell, `0..=J-1`.
pub fn all_shells(f: &GridFunction) -> RangeInclusive<u32> {
    0..=f.level().saturating_sub(1)
}

/// Largest mean oscillation `⨍_Q |f - f_Q|` over dyadic-sized cubes.
///
/// Node `i` stands for the cell `[x_i, x_i + h)`, so the last node of each
/// axis is not used. Cubes have side `2^{-ℓ}` for every `ℓ ≤ floor_level`
/// that fits in the box, placed at half-side steps from the lower corner;
/// cubes on which `f` vanishes identically are skipped.
pub fn bmo_norm(f: &GridFunction, floor_level: i32) -> Result<f64> {
    let spec = &f.spec;
    let n = spec.dim();
    let cells: Vec<usize> = spec.shape.iter().map(|s| s - 1).collect();
    let min_cells = *cells.iter().min().unwrap_or(&0);
    if min_cells < 2 {
        return Err(Error::param("grid", "needs at least two cells per axis"));
    }
    let j = spec.level as i32;
    let finest = floor_level.min(j - 1);
    let coarsest_cells_log = usize::BITS - 1 - min_cells.leading_zeros();
    let coarsest = j - coarsest_cells_log as i32;
    if finest < coarsest {
        return Err(Error::param("floor_level", format!("no window of side 2^-{floor_level} fits")));
    }
    let strides = spec.strides();
    let prefix = abs_prefix(f, &cells);
    let mut best: f64 = 0.0;
    let mut idx = vec![0usize; n];
    let mut buf = Vec::new();
    for level in coarsest..=finest {
        let side = 1usize << (j - level);
        let step = (side / 2).max(1);
        let counts: Vec<usize> = cells.iter().map(|c| (c - side) / step + 1).collect();
        let windows: usize = counts.iter().product();
        let mut w = vec![0usize; n];
        for _ in 0..windows {
            let origin: Vec<usize> = w.iter().map(|k| k * step).collect();
            if box_sum(&prefix, &cells, &origin, side) > 0.0 {
                buf.clear();
                idx.iter_mut().for_each(|i| *i = 0);
                let total = side.pow(n as u32);
                for _ in 0..total {
                    let flat: usize = (0..n).map(|a| (origin[a] + idx[a]) * strides[a]).sum();
                    buf.push(f.values[flat]);
                    for a in (0..n).rev() {
                        idx[a] += 1;
                        if idx[a] < side {
                            break;
                        }
                        idx[a] = 0;
                    }
                }
                let mean = buf.iter().sum::<f64>() / buf.len() as f64;
                let osc = buf.iter().map(|v| (v - mean).abs()).sum::<f64>() / buf.len() as f64;
                best = best.max(osc);
            }
            for a in (0..n).rev() {
                w[a] += 1;
                if w[a] < counts[a] {
                    break;
                }
                w[a] = 0;
            }
        }
    }
    Ok(best)
}

/// Summed-area table of `|f|` over cells, with a zero border.
fn abs_prefix(f: &GridFunction, cells: &[usize]) -> Vec<f64> {
    let n = cells.len();
    let ext: Vec<usize> = cells.iter().map(|c| c + 1).collect();
    let mut ext_strides = vec![1usize; n];
    for a in (0..n.saturating_sub(1)).rev() {
        ext_strides[a] = ext_strides[a + 1] * ext[a + 1];
    }
    let strides = f.spec.strides();
    let total: usize = ext.iter().product();
    let mut table = vec![0.0; total];
    let mut idx = vec![0usize; n];
    for slot in table.iter_mut() {
        if idx.iter().all(|i| *i > 0) {
            let src: usize = idx.iter().zip(&strides).map(|(i, st)| (i - 1) * st).sum();
            *slot = f.values[src].abs();
        }
        for a in (0..n).rev() {
            idx[a] += 1;
            if idx[a] < ext[a] {
                break;
            }
            idx[a] = 0;
        }
    }
    for a in 0..n {
        let st = ext_strides[a];
        for flat in 0..total {
            let i = (flat / st) % ext[a];
            if i > 0 {
                table[flat] += table[flat - st];
            }
        }
    }
    table
}

fn box_sum(prefix: &[f64], cells: &[usize], origin: &[usize], side: usize) -> f64 {
    let n = cells.len();
    let ext: Vec<usize> = cells.iter().map(|c| c + 1).collect();
    let mut ext_strides = vec![1usize; n];
    for a in (0..n.saturating_sub(1)).rev() {
        ext_strides[a] = ext_strides[a + 1] * ext[a + 1];
    }
    let mut sum = 0.0;
    for corner in 0..(1usize << n) {
        let mut flat = 0;
        let mut sign = 1.0;
        for a in 0..n {
            let hi = corner >> a & 1 == 1;
            let i = if hi { origin[a] + side } else { origin[a] };
            if !hi {
                sign = -sign;
            }
            flat += i * ext_strides[a];
        }
        sum += sign * prefix[flat];
    }
    sum
}

/// One level of `f*`: value `value` on `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plateau {
    pub start: f64,
    pub end: f64,
    pub value: f64,
}

/// `f*` of a step function with cell values `values` and measures `weights`.
pub fn rearrange_weighted(values: &[f64], weights: &[f64]) -> Vec<Plateau> {
    let mut cells: Vec<(f64, f64)> = values
        .iter()
        .zip(weights)
        .filter(|(_, w)| **w > 0.0)
        .map(|(v, w)| (v.abs(), *w))
        .collect();
    cells.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut out: Vec<Plateau> = Vec::new();
    let mut t = 0.0;
    for (v, w) in cells {
        match out.last_mut() {
            Some(last) if last.value == v => {
                t += w;
                last.end = t;
            }
            _ => {
                let start = t;
                t += w;
                out.push(Plateau { start, end: t, value: v });
            }
        }
    }
    out
}

/// Decreasing rearrangement of `|f|` under the trapezoid node measures.
pub fn decreasing_rearrangement(f: &GridFunction) -> Vec<Plateau> {
    rearrange_weighted(&f.values, &f.weights())
}

/// `sup_t t^{1/r} f*(t)` of a rearrangement, read at plateau right ends.
pub fn weak_norm_of(plateaus: &[Plateau], r: f64) -> f64 {
    plateaus
        .iter()
        .map(|pl| math::pow(pl.end, 1.0 / r) * pl.value)
        .fold(0.0, f64::max)
}

/// Weak-`L^r` quasi-norm `sup_t t^{1/r} f*(t)`.
pub fn weak_lp_norm(f: &GridFunction, r: f64) -> Result<f64> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::param("r", format!("must lie in (0, inf), got {r}")));
    }
    Ok(weak_norm_of(&decreasing_rearrangement(f), r))
}

/// `‖f‖_∞` plus the `B^α_{∞,∞}` seminorm with differences of order `M`.
pub fn holder_norm(f: &GridFunction, alpha: f64, order: u32) -> Result<NormReport> {
    if !(alpha > 0.0 && alpha < order as f64) {
        return Err(Error::param("alpha", format!("needs 0 < alpha < M = {order}, got {alpha}")));
    }
    let n = f.spec.dim();
    let params = BesovParams {
        n,
        d: n,
        s: alpha,
        p: f64::INFINITY,
        q: f64::INFINITY,
        order,
        psi: AdmissibleFn::constant(1.0)?,
    };
    besov_seminorm(f, &params, all_shells(f), Modulus::Shell)
}
