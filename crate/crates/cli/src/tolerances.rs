//! Every threshold the criteria compare against, in one place.

/// Amalgam identity: both sides are exact finite sums, so only summation
/// roundoff separates them.
pub const AMALGAM_REL: f64 = 1e-10;

/// Partition of unity: at most a handful of overlapping bumps, each a
/// product of `exp` evaluations.
pub const PARTITION_ABS: f64 = 1e-10;

/// Lemma-4.1 style comparisons carry a relative tolerance inside the core
/// check; this is the same value, reported in the criterion line.
pub const LEMMA41_REL: f64 = 1e-12;

/// Rearrangement against direct `L^p`: equal up to summation order.
pub const REARRANGE_REL: f64 = 1e-12;

/// Weak norm never exceeds the strong one beyond roundoff.
pub const WEAK_REL: f64 = 1e-12;

/// The hat function `|x - 1/2|` has `B^1_{∞,∞}` seminorm 2.
pub const HAT_TARGET: f64 = 2.0;
pub const HAT_REL: f64 = 0.10;

/// The analytic witness of the `(2,1,1/2,1,∞)` dichotomy reaches this value
/// by `J_max = 34`.
pub const WITNESS_FLOOR: f64 = 13.0;

/// Allowed relative drift of the `q ≤ p` restriction ratio between grid
/// levels 8 and 10.
pub const CONTROL_DRIFT: f64 = 0.25;

/// Identity `weighted term = 1` at covered levels.
pub const IDENTITY_ABS: f64 = 1e-9;

/// Partial sums of `Σ_{j≥1} (j+2)^{-2}` at `J_max = 10^6` against the tail
/// `π²/6 - 5/4`.
pub const TAIL_TARGET: f64 = 0.3949;
pub const TAIL_ABS: f64 = 1e-3;

/// Bound on the weighted witness below the threshold.
pub const MEMBERSHIP_BOUND: f64 = 1.0;

/// Sweep ends the construction is expected to reach, after the level-1 sweep.
pub const STATED_SWEEP_ENDS: [u32; 3] = [4, 12, 34];
