//! Sample loops fanned out over rayon; results are collected in sample
//! order, so reports do not depend on scheduling.

use besov_core::normest::GridSpec;
use besov_core::quark::{coeff_norm, QuarkCoeffs};
use besov_core::restrict::{
    combine_bound, midpoints, slice_norm, DivergenceReport, GridOptions, RestrictionBound, Scan,
};
use besov_core::{BesovParams, Result};
use rayon::prelude::*;

/// Parallel counterpart of [`Scan::run`].
pub fn run_scan(scan: &Scan<'_>, samples: &[f64], j_list: &[u32], grid: Option<&GridOptions>) -> Result<DivergenceReport> {
    let jmax = j_list.iter().copied().max().unwrap_or(0);
    let curves: Vec<Vec<f64>> = samples.par_iter().map(|x| scan.curve(*x, jmax)).collect();
    let obs = match grid {
        Some(opts) => {
            let per: Vec<_> = samples[..opts.samples.min(samples.len())]
                .par_iter()
                .enumerate()
                .map(|(i, x)| scan.observations(i, *x, opts))
                .collect::<Result<Vec<_>>>()?;
            Some((per.into_iter().flatten().collect(), opts.slack))
        }
        None => None,
    };
    scan.assemble(samples, j_list, curves, obs)
}

/// Parallel counterpart of `restriction_bound_check`.
pub fn restriction_bound(
    coeffs: &QuarkCoeffs,
    params: &BesovParams,
    strip: &[(f64, f64)],
    n_per_axis: usize,
    grid: &GridSpec,
) -> Result<RestrictionBound> {
    let points = midpoints(strip, n_per_axis)?;
    let volume: f64 = strip.iter().map(|(a, b)| b - a).product();
    let per_sample = points
        .par_iter()
        .map(|x| slice_norm(coeffs, params, x, grid))
        .collect::<Result<Vec<_>>>()?;
    let rhs = coeff_norm(coeffs, params.p, params.q, coeffs.rho())?;
    combine_bound(per_sample, volume, params.q, rhs)
}
