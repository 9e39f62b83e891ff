//! Admissible weights `Ψ` on `(0, 1]`.
//!
//! Every weight is evaluated through `u = -log₂ t ≥ 0`, so `Ψ(2^{-j})` stays
//! exact for levels far below the smallest positive double.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::math;

/// Grid size used by [`c_infinity`] when callers have no preference.
pub const DEFAULT_GRID: usize = 4096;

/// Range of `u = -log₂ t` covered by the `c_∞` grid.
const GRID_SPAN: f64 = 64.0;

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// `Ψ ≡ a`.
    Constant { a: f64 },
    /// `Ψ(t) = |log₂(c t)|^b`, `0 < c < 1`.
    LogPower { c: f64, b: f64 },
    /// `Ψ(t) = (log₂|log₂(c t)|)^b`, `0 < c < 1/2`.
    LogLogPower { c: f64, b: f64 },
    /// Monotone samples `Ψ(2^{-u_i})`, linear in `u` between nodes and
    /// power-law extrapolated past the last node.
    Tabulated { u: Vec<f64>, values: Vec<f64>, tail: f64 },
}

/// Monotonicity of `t ↦ Ψ(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Constant,
    Increasing,
    Decreasing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Converges,
    Diverges,
}

/// A positive monotone weight, optionally multiplied by a positive constant.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibleFn {
    family: Family,
    scale: f64,
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be finite and positive, got {v}")))
    }
}

impl AdmissibleFn {
    pub fn constant(a: f64) -> Result<Self> {
        positive("a", a)?;
        Ok(AdmissibleFn {
            family: Family::Constant { a },
            scale: 1.0,
        })
    }

    pub fn log_power(c: f64, b: f64) -> Result<Self> {
        if !(c > 0.0 && c < 1.0) {
            return Err(Error::param("c", format!("log-power weights need 0 < c < 1, got {c}")));
        }
        if !b.is_finite() {
            return Err(Error::param("b", "must be finite"));
        }
        Ok(AdmissibleFn {
            family: Family::LogPower { c, b },
            scale: 1.0,
        })
    }

    /// Requires `|log₂(c t)| > 1` on `(0, 1]`, that is `c < 1/2`.
    pub fn log_log_power(c: f64, b: f64) -> Result<Self> {
        if !(c > 0.0 && c < 0.5) {
            return Err(Error::param(
                "c",
                format!("log-log-power weights need 0 < c < 1/2 so that |log2(ct)| > 1, got {c}"),
            ));
        }
        if !b.is_finite() {
            return Err(Error::param("b", "must be finite"));
        }
        Ok(AdmissibleFn {
            family: Family::LogLogPower { c, b },
            scale: 1.0,
        })
    }

    /// Tabulated weight from samples at `t = 2^{-u_i}`; `u` must start at 0.
    pub fn tabulated(u: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if u.len() < 3 || u.len() != values.len() {
            return Err(Error::param("table", "need at least three (u, value) pairs of equal count"));
        }
        if u[0] != 0.0 {
            return Err(Error::param("table", "the first node must be u = 0 (t = 1)"));
        }
        if u.windows(2).any(|w| !(w[1] > w[0])) || !u.iter().all(|x| x.is_finite()) {
            return Err(Error::param("table", "nodes must be finite and strictly increasing"));
        }
        for &v in &values {
            positive("table value", v)?;
        }
        let up = values.windows(2).all(|w| w[1] >= w[0]);
        let down = values.windows(2).all(|w| w[1] <= w[0]);
        if !up && !down {
            return Err(Error::param("table", "values are not monotone"));
        }
        let tail = tail_exponent(&u, &values);
        Ok(AdmissibleFn {
            family: Family::Tabulated { u, values, tail },
            scale: 1.0,
        })
    }

    /// `a·Ψ`.
    pub fn scaled(&self, a: f64) -> Result<Self> {
        positive("scale", a)?;
        Ok(AdmissibleFn {
            family: self.family.clone(),
            scale: self.scale * a,
        })
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn is_unit(&self) -> bool {
        matches!(self.family, Family::Constant { a } if a * self.scale == 1.0)
    }

    pub fn direction(&self) -> Direction {
        let sign = match &self.family {
            Family::Constant { .. } => 0.0,
            Family::LogPower { b, .. } | Family::LogLogPower { b, .. } => *b,
            Family::Tabulated { values, .. } => values[values.len() - 1] - values[0],
        };
        // u grows as t shrinks, so a positive exponent means decreasing in t
        if sign > 0.0 {
            Direction::Decreasing
        } else if sign < 0.0 {
            Direction::Increasing
        } else {
            Direction::Constant
        }
    }

    /// `Ψ(t)` for `t ∈ (0, 1]`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t > 0.0 && t <= 1.0) {
            return Err(Error::Domain {
                what: "t",
                value: t,
                domain: "(0, 1]",
            });
        }
        Ok(self.eval_log(-math::log2(t)))
    }

    /// `Ψ(2^{-j})`.
    pub fn eval_dyadic(&self, j: u32) -> f64 {
        self.eval_log(j as f64)
    }

    /// `Ψ(2^{-u})` for `u ≥ 0`.
    pub fn eval_log(&self, u: f64) -> f64 {
        let raw = match &self.family {
            Family::Constant { a } => *a,
            Family::LogPower { c, b } => math::pow(u - math::log2(*c), *b),
            Family::LogLogPower { c, b } => math::pow(math::log2(u - math::log2(*c)), *b),
            Family::Tabulated { u: nodes, values, tail } => interpolate(nodes, values, *tail, u),
        };
        self.scale * raw
    }

    /// Leading behaviour `Ψ(2^{-u}) ≍ u^e (log u)^g` as `u → ∞`, for closed forms.
    pub fn asymptotics(&self) -> Option<(f64, f64)> {
        match &self.family {
            Family::Constant { .. } => Some((0.0, 0.0)),
            Family::LogPower { b, .. } => Some((*b, 0.0)),
            Family::LogLogPower { b, .. } => Some((0.0, *b)),
            Family::Tabulated { .. } => None,
        }
    }

    fn tail_estimate(&self) -> f64 {
        match &self.family {
            Family::Tabulated { tail, .. } => *tail,
            _ => self.asymptotics().map(|(e, _)| e).unwrap_or(0.0),
        }
    }
}

fn interpolate(nodes: &[f64], values: &[f64], tail: f64, u: f64) -> f64 {
    let last = nodes.len() - 1;
    if u >= nodes[last] {
        return values[last] * math::pow((1.0 + u) / (1.0 + nodes[last]), tail);
    }
    let i = nodes.partition_point(|x| *x <= u).max(1) - 1;
    let w = (u - nodes[i]) / (nodes[i + 1] - nodes[i]);
    values[i] + w * (values[i + 1] - values[i])
}

/// Least-squares slope of `log Ψ` against `log(1 + u)` over the last two thirds.
fn tail_exponent(u: &[f64], values: &[f64]) -> f64 {
    let from = u.len() / 3;
    let pts: Vec<(f64, f64)> = u[from..]
        .iter()
        .zip(&values[from..])
        .map(|(x, v)| (math::ln(1.0 + x), math::ln(*v)))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

impl fmt::Display for AdmissibleFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.family {
            Family::Constant { a } => write!(f, "constant:{}", a * self.scale)?,
            Family::LogPower { c, b } => write!(f, "logpow:c={c},b={b}")?,
            Family::LogLogPower { c, b } => write!(f, "loglogpow:c={c},b={b}")?,
            Family::Tabulated { u, .. } => write!(f, "tabulated:{}", u.len())?,
        }
        if self.scale != 1.0 && !matches!(self.family, Family::Constant { .. }) {
            write!(f, ",scale={}", self.scale)?;
        }
        Ok(())
    }
}

impl FromStr for AdmissibleFn {
    type Err = Error;

    /// Parses `constant:1.0`, `logpow:c=0.25,b=-1` or `loglogpow:c=0.25,b=-1`,
    /// optionally followed by `,scale=a`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::param("psi", format!("`{s}`: {why}"));
        let (kind, rest) = s.trim().split_once(':').ok_or_else(|| bad("expected `family:arguments`"))?;
        let mut c = None;
        let mut b = None;
        let mut scale = 1.0;
        let mut value = None;
        for part in rest.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, num) = match part.split_once('=') {
                Some((k, v)) => (k.trim(), v.trim()),
                None => ("", part),
            };
            let num: f64 = parse_number(num).ok_or_else(|| bad("unreadable number"))?;
            match key {
                "c" => c = Some(num),
                "b" => b = Some(num),
                "scale" => scale = num,
                "" | "a" => value = Some(num),
                _ => return Err(bad("unknown key")),
            }
        }
        let base = match kind.trim() {
            "constant" | "const" => AdmissibleFn::constant(value.ok_or_else(|| bad("missing value"))?)?,
            "logpow" => AdmissibleFn::log_power(c.ok_or_else(|| bad("missing c"))?, b.ok_or_else(|| bad("missing b"))?)?,
            "loglogpow" => {
                AdmissibleFn::log_log_power(c.ok_or_else(|| bad("missing c"))?, b.ok_or_else(|| bad("missing b"))?)?
            }
            _ => return Err(bad("unknown family")),
        };
        if scale == 1.0 {
            Ok(base)
        } else {
            base.scaled(scale)
        }
    }
}

/// Reads a decimal or a simple fraction `a/b`.
pub fn parse_number(s: &str) -> Option<f64> {
    let s = s.trim();
    match s {
        "inf" | "+inf" | "infinity" => return Some(f64::INFINITY),
        _ => {}
    }
    if let Some((a, b)) = s.split_once('/') {
        let a: f64 = a.trim().parse().ok()?;
        let b: f64 = b.trim().parse().ok()?;
        return if b == 0.0 { None } else { Some(a / b) };
    }
    s.parse().ok()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Admissibility {
    pub max_ratio: f64,
    pub monotone: bool,
}

/// `max_{j≤jmax} max(Ψ(2^{-j})/Ψ(2^{-2j}), reciprocal)` and a sampled
/// monotonicity test against the declared direction.
pub fn admissibility_check(psi: &AdmissibleFn, jmax: u32) -> Result<Admissibility> {
    if jmax < 1 {
        return Err(Error::param("jmax", "must be at least 1"));
    }
    let mut max_ratio: f64 = 1.0;
    for j in 0..=jmax {
        let r = psi.eval_log(j as f64) / psi.eval_log(2.0 * j as f64);
        max_ratio = max_ratio.max(r).max(1.0 / r);
    }
    let dir = psi.direction();
    let steps = 8 * jmax as usize;
    let mut monotone = true;
    let mut prev = psi.eval_log(0.0);
    for i in 1..=steps {
        let v = psi.eval_log(i as f64 / 8.0);
        // u increases along the loop, t decreases
        let ok = match dir {
            Direction::Constant => v == prev,
            Direction::Increasing => v <= prev,
            Direction::Decreasing => v >= prev,
        };
        monotone &= ok && v > 0.0 && v.is_finite();
        prev = v;
    }
    Ok(Admissibility { max_ratio, monotone })
}

/// `c_∞ = sup_{0<t≤1} log₂(Ψ(t)/Ψ(t²))` on a logarithmic grid plus the
/// `t → 0` limit of the closed forms.
pub fn c_infinity(psi: &AdmissibleFn, grid_size: usize) -> Result<f64> {
    if grid_size < 2 {
        return Err(Error::param("grid_size", "must be at least 2"));
    }
    let mut sup = f64::NEG_INFINITY;
    for i in 0..grid_size {
        let u = GRID_SPAN * i as f64 / (grid_size - 1) as f64;
        sup = sup.max(math::log2(psi.eval_log(u) / psi.eval_log(2.0 * u)));
    }
    if let Some((e, _)) = psi.asymptotics() {
        // (u + L)/(2u + L) → 1/2 and log(u+L)/log(2u+L) → 1
        sup = sup.max(-e);
    }
    Ok(sup)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightSeries {
    pub partial_sum: f64,
    pub verdict: Verdict,
    pub analytic: bool,
}

/// `Σ_{j≤jmax} Ψ(2^{-j})^χ` with a convergence verdict.
pub fn weight_series(psi: &AdmissibleFn, chi: f64, jmax: u32) -> Result<WeightSeries> {
    ratio_series(psi, None, chi, jmax)
}

/// `Σ_{j≤jmax} (Ψ(2^{-j})/Φ(2^{-j}))^χ`; `phi = None` means `Φ ≡ 1`.
///
/// Closed forms behave like `u^e (log u)^g`; the series converges iff
/// `eχ < -1`, or `eχ = -1` and `gχ < -1`. Tabulated weights fall back to the
/// fitted tail exponent and report `analytic = false`.
pub fn ratio_series(psi: &AdmissibleFn, phi: Option<&AdmissibleFn>, chi: f64, jmax: u32) -> Result<WeightSeries> {
    if !(chi > 0.0) || !chi.is_finite() {
        return Err(Error::param("chi", format!("must be finite and positive, got {chi}")));
    }
    let term = |j: u32| {
        let num = psi.eval_dyadic(j);
        let den = phi.map_or(1.0, |f| f.eval_dyadic(j));
        math::pow(num / den, chi)
    };
    // smallest terms first
    let partial_sum = (0..=jmax).rev().map(term).sum();
    let closed = match phi {
        None => psi.asymptotics().map(|a| (a, true)),
        Some(f) => psi
            .asymptotics()
            .zip(f.asymptotics())
            .map(|((e1, g1), (e2, g2))| ((e1 - e2, g1 - g2), true)),
    };
    let ((e, g), analytic) = closed.unwrap_or_else(|| {
        let e = psi.tail_estimate() - phi.map_or(0.0, |f| f.tail_estimate());
        ((e, 0.0), false)
    });
    let converges = if analytic {
        e * chi < -1.0 || (e * chi == -1.0 && g * chi < -1.0)
    } else {
        e * chi < -1.0
    };
    Ok(WeightSeries {
        partial_sum,
        verdict: if converges { Verdict::Converges } else { Verdict::Diverges },
        analytic,
    })
}

/// Human-readable summary used in reports.
pub fn describe(psi: &AdmissibleFn) -> String {
    format!("{psi}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    #[test]
    fn eval_examples() {
        let one = AdmissibleFn::constant(1.0).unwrap();
        assert_eq!(one.eval(0.3).unwrap(), 1.0);
        let lp = AdmissibleFn::log_power(0.5, 1.0).unwrap();
        assert_eq!(lp.eval(0.5).unwrap(), 2.0);
        let inv = AdmissibleFn::log_power(0.25, -1.0).unwrap();
        for j in 0..200u32 {
            let expect = 1.0 / (j as f64 + 2.0);
            assert!((inv.eval_dyadic(j) - expect).abs() <= 1e-15 * expect);
        }
        assert_eq!(inv.eval(1.0 / 8.0).unwrap(), 0.2);
        assert!(one.eval(0.0).is_err());
        assert!(one.eval(1.5).is_err());
        assert!(AdmissibleFn::log_log_power(0.5, 1.0).is_err());
        assert!(AdmissibleFn::log_power(1.0, 1.0).is_err());
    }

    #[test]
    fn admissibility_examples() {
        let a = admissibility_check(&AdmissibleFn::constant(3.0).unwrap(), 64).unwrap();
        assert_eq!(a.max_ratio, 1.0);
        assert!(a.monotone);
        let b = admissibility_check(&AdmissibleFn::log_power(0.5, 1.0).unwrap(), 64).unwrap();
        assert!(b.max_ratio < 2.0 && b.max_ratio > 1.95 && b.monotone);
        let c = admissibility_check(&AdmissibleFn::log_power(0.5, -3.0).unwrap(), 64).unwrap();
        assert!(c.max_ratio < 8.0 && c.max_ratio > 7.5 && c.monotone);
    }

    #[test]
    fn c_infinity_examples() {
        assert_eq!(c_infinity(&AdmissibleFn::constant(2.0).unwrap(), DEFAULT_GRID).unwrap(), 0.0);
        let inv = AdmissibleFn::log_power(0.25, -1.0).unwrap();
        assert_eq!(c_infinity(&inv, DEFAULT_GRID).unwrap(), 1.0);
        let up = AdmissibleFn::log_power(0.5, 1.0).unwrap();
        assert_eq!(c_infinity(&up, DEFAULT_GRID).unwrap(), 0.0);
        let scaled = inv.scaled(7.5).unwrap();
        assert_eq!(c_infinity(&scaled, DEFAULT_GRID).unwrap(), 1.0);
        let ll = AdmissibleFn::log_log_power(0.25, -1.0).unwrap();
        let v = c_infinity(&ll, DEFAULT_GRID).unwrap();
        assert!(v > 0.0 && v < 1.0);
    }

    #[test]
    fn series_examples() {
        let inv = AdmissibleFn::log_power(0.25, -1.0).unwrap();
        let s2 = weight_series(&inv, 2.0, 1_000_000).unwrap();
        assert_eq!(s2.verdict, Verdict::Converges);
        assert!(s2.analytic);
        let full = core::f64::consts::PI * core::f64::consts::PI / 6.0 - 1.0;
        assert!((s2.partial_sum - full).abs() < 1.1e-6);
        let s1 = weight_series(&inv, 1.0, 1000).unwrap();
        assert_eq!(s1.verdict, Verdict::Diverges);
        let one = AdmissibleFn::constant(1.0).unwrap();
        assert_eq!(weight_series(&one, 5.0, 10).unwrap().verdict, Verdict::Diverges);
        let ll = AdmissibleFn::log_log_power(0.25, -4.0).unwrap();
        assert_eq!(weight_series(&ll, 3.0, 10).unwrap().verdict, Verdict::Diverges);
        assert!(weight_series(&one, 0.0, 10).is_err());
    }

    #[test]
    fn verdict_matches_c_infinity() {
        for b in [-0.25, -0.5, -1.0, -2.0, -3.0] {
            let psi = AdmissibleFn::log_power(0.25, b).unwrap();
            let c = c_infinity(&psi, DEFAULT_GRID).unwrap();
            for chi in [0.5, 1.5, 2.5, 5.0] {
                let v = weight_series(&psi, chi, 10).unwrap().verdict;
                assert_eq!(v == Verdict::Converges, chi > 1.0 / c, "b = {b}, chi = {chi}");
            }
        }
    }

    #[test]
    fn ratio_series_mixed() {
        let psi = AdmissibleFn::log_power(0.25, -1.0).unwrap();
        let phi = AdmissibleFn::log_power(0.25, 1.0).unwrap();
        // ratio ~ u^{-2}
        assert_eq!(ratio_series(&psi, Some(&phi), 1.0, 10).unwrap().verdict, Verdict::Converges);
        let ll = AdmissibleFn::log_log_power(0.25, -2.0).unwrap();
        let h = AdmissibleFn::log_power(0.25, -1.0).unwrap();
        let prod = ratio_series(&h, Some(&ll.scaled(1.0).unwrap()), 1.0, 10).unwrap();
        // u^{-1} (log u)^{2}
        assert_eq!(prod.verdict, Verdict::Diverges);
    }

    #[test]
    fn tabulated_behaves_like_its_source() {
        let src = AdmissibleFn::log_power(0.25, -1.5).unwrap();
        let u: Vec<f64> = (0..=256).map(|i| i as f64 / 4.0).collect();
        let v: Vec<f64> = u.iter().map(|x| src.eval_log(*x)).collect();
        let tab = AdmissibleFn::tabulated(u, v).unwrap();
        assert_eq!(tab.direction(), Direction::Increasing);
        let s = weight_series(&tab, 1.0, 100).unwrap();
        assert!(!s.analytic);
        assert_eq!(s.verdict, Verdict::Converges);
        assert!(AdmissibleFn::tabulated(vec![0.0, 1.0, 2.0], vec![1.0, 2.0, 1.0]).is_err());
    }

    #[test]
    fn parse_roundtrip() {
        for s in ["constant:1", "logpow:c=0.25,b=-1", "loglogpow:c=0.25,b=-1"] {
            let psi: AdmissibleFn = s.parse().unwrap();
            let again: AdmissibleFn = psi.to_string().parse().unwrap();
            assert_eq!(psi, again);
        }
        assert!("logpow:c=2,b=1".parse::<AdmissibleFn>().is_err());
        assert!("cubic:1".parse::<AdmissibleFn>().is_err());
        assert_eq!(parse_number("1/2"), Some(0.5));
        assert_eq!(parse_number("inf"), Some(f64::INFINITY));
    }
}
