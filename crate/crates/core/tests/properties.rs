use besov_core::admissible::AdmissibleFn;
use besov_core::normest::{
    all_shells, besov_seminorm, decreasing_rearrangement, iterated_difference, lp_norm_grid, weak_lp_norm,
    BesovParams, GridFunction, GridSpec, Modulus,
};
use besov_core::quark::{counterexample_coeffs, BumpFn, CounterexampleSpec, QuarkCoeffs};
use besov_core::restrict::{
    embedding_inequality_check, lemma41_check, slice, slice_coeffs, strip_grid, Scan, ScanKind,
};
use besov_core::seqspace::{
    amalgam_integral, condensation_check, construct_lambda, construct_weighted_lambda, lemma32_check,
    weighted_levels, Monotonicity,
};
use proptest::prelude::*;

fn unit() -> AdmissibleFn {
    AdmissibleFn::constant(1.0).unwrap()
}

fn nonincreasing(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, len).prop_map(|mut v| {
        v.sort_by(|a, b| b.total_cmp(a));
        v[0] = 0.0;
        v
    })
}

fn line(level: u32, values: Vec<f64>) -> GridFunction {
    let n = values.len();
    let spec = GridSpec::new(vec![0.0], vec![(n - 1) as f64 / (1u64 << level) as f64], level).unwrap();
    GridFunction::from_values(spec, values).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn amalgam_identity(v in prop::collection::vec(-3.0f64..3.0, 1..300), pi in 0usize..3) {
        let p = [0.5, 1.0, 2.0][pi];
        let a = amalgam_integral(&v, p).unwrap();
        prop_assert!((a.lhs - a.rhs).abs() <= 1e-10 * a.lhs.max(1e-300));
    }

    #[test]
    fn condensation_brackets(v in nonincreasing(1 << 9)) {
        let c = condensation_check(&v, 7, Monotonicity::Strict).unwrap();
        prop_assert!(c.holds, "{:?}", c);
    }

    #[test]
    fn phi_bound_holds(v in nonincreasing(1 << 10), x in 0.01f64..8.0) {
        let b = lemma32_check(&v, x, 20, Monotonicity::Strict).unwrap();
        prop_assert!(b.holds, "{:?}", b);
    }

    #[test]
    fn partition_of_unity(x in prop::collection::vec(-50.0f64..50.0, 1..=3)) {
        let n = x.len();
        let bump = BumpFn::new(n).unwrap();
        let mut total = 0.0;
        let mut m = vec![-3i64; n];
        let base: Vec<i64> = x.iter().map(|v| v.floor() as i64).collect();
        loop {
            let y: Vec<f64> = x.iter().zip(&base).zip(&m).map(|((xi, b), o)| xi - (b + o) as f64).collect();
            total += bump.eval(&y);
            let mut a = 0;
            while a < n {
                m[a] += 1;
                if m[a] <= 3 { break; }
                m[a] = -3;
                a += 1;
            }
            if a == n { break; }
        }
        prop_assert!((total - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn differences_are_linear(a in prop::collection::vec(-1.0f64..1.0, 65), b in prop::collection::vec(-1.0f64..1.0, 65), c in -4.0f64..4.0, order in 1u32..4) {
        let fa = line(6, a.clone());
        let fb = line(6, b.clone());
        let mix: Vec<f64> = a.iter().zip(&b).map(|(x, y)| c * x + y).collect();
        let fm = line(6, mix);
        let h = [4.0 / 64.0];
        let da = iterated_difference(&fa, &h, order).unwrap().unwrap();
        let db = iterated_difference(&fb, &h, order).unwrap().unwrap();
        let dm = iterated_difference(&fm, &h, order).unwrap().unwrap();
        for ((x, y), z) in da.values().iter().zip(db.values()).zip(dm.values()) {
            prop_assert!((c * x + y - z).abs() <= 1e-12 * (1.0 + z.abs()) * 8.0);
        }
    }

    #[test]
    fn seminorm_is_homogeneous(v in prop::collection::vec(-1.0f64..1.0, 129), c in -3.0f64..3.0) {
        let f = line(7, v);
        let params = BesovParams::new(1, 0.5, 1.0, 2.0).unwrap();
        let r = besov_seminorm(&f, &params, all_shells(&f), Modulus::Shell).unwrap();
        let rc = besov_seminorm(&f.scaled(c), &params, all_shells(&f), Modulus::Shell).unwrap();
        prop_assert!((rc.seminorm - c.abs() * r.seminorm).abs() <= 1e-12 * (1.0 + r.seminorm));
    }

    #[test]
    fn weak_below_strong(v in prop::collection::vec(-5.0f64..5.0, 33..300), r in 0.5f64..4.0) {
        let f = line(5, v);
        let weak = weak_lp_norm(&f, r).unwrap();
        let strong = lp_norm_grid(&f, r).unwrap();
        prop_assert!(weak <= strong * (1.0 + 1e-12));
    }

    #[test]
    fn rearrangement_keeps_lp(v in prop::collection::vec(-5.0f64..5.0, 33..300), p in 0.5f64..4.0) {
        let f = line(5, v);
        let plateaus = decreasing_rearrangement(&f);
        let re: f64 = plateaus.iter().map(|pl| (pl.end - pl.start) * pl.value.powf(p)).sum::<f64>().powf(1.0 / p);
        let direct = lp_norm_grid(&f, p).unwrap();
        prop_assert!((re - direct).abs() <= 1e-12 * direct.max(1e-300));
    }

    #[test]
    fn lemma41_random(
        entries in prop::collection::vec((0u32..3, 0u32..3, 0u32..5, -3i64..4, 0i64..40, 0i64..40, 0.01f64..2.0), 1..40),
        x in prop::collection::vec(1.0f64..2.0, 2),
        codim in 1usize..=2,
        case in 0usize..3,
        delta_bits in 0u8..4,
    ) {
        let (p, q) = [(1.0, 2.0), (0.5, 1.0), (2.0, f64::INFINITY)][case];
        let n = 3;
        let mut c = QuarkCoeffs::new(n);
        for (b0, b1, nu, m0, m1, m2, v) in entries {
            let beta = [b0, b1, b0.min(b1)];
            // push some mass onto the floor neighbours so the hits are nonempty
            let fl = |xi: f64, off: i64| (xi * (1u64 << nu) as f64).floor() as i64 + off % 2;
            let m = if codim == 1 { [m0, m1 % 8, fl(x[0], m2)] } else { [m0, fl(x[0], m1), fl(x[1], m2)] };
            c.insert(&beta, nu, &m, v).unwrap();
        }
        let xf = &x[..codim];
        let delta: Vec<u8> = (0..codim).map(|i| (delta_bits >> i) & 1).collect();
        let chk = lemma41_check(&c, xf, p, q, 1.0, 2.5, &delta).unwrap();
        prop_assert!(chk.holds, "{:?}", chk);
    }

    #[test]
    fn slice_agrees_with_restricted_synthesis(x in 1.0f64..2.0) {
        let seq = construct_lambda(1.0, f64::INFINITY, 5).unwrap();
        let spec = CounterexampleSpec::new(2, 0.5, 1.0, f64::INFINITY, unit(), seq).unwrap();
        let coeffs = counterexample_coeffs(&spec).unwrap();
        let params = BesovParams::new(2, 0.5, 1.0, f64::INFINITY).unwrap();
        let grid = strip_grid(&spec, 5, 7).unwrap();
        let a = slice(&spec, x, &grid).unwrap();
        let b = slice_coeffs(&coeffs, &params, &[x], &grid).unwrap();
        for (u, v) in a.grid.values().iter().zip(b.grid.values()) {
            prop_assert!((u - v).abs() <= 1e-10);
        }
    }

    #[test]
    fn witness_curves_nondecreasing(x in 1.0f64..2.0) {
        let seq = construct_lambda(1.0, 3.0, 30).unwrap();
        let spec = CounterexampleSpec::new(2, 0.5, 1.0, 3.0, unit(), seq).unwrap();
        for kind in [ScanKind::Restriction, ScanKind::WeakLp, ScanKind::Weighted(AdmissibleFn::log_power(0.25, -1.0).unwrap())] {
            let c = Scan::new(&spec, kind).unwrap().curve(x, 30);
            prop_assert!(c.windows(2).all(|w| w[1] >= w[0]));
        }
    }

    #[test]
    fn embedding_inequality_random(
        entries in prop::collection::vec((0u32..2, 0u32..12, -5i64..5, 0.0f64..3.0), 1..60),
        b in -3.0f64..-0.6,
        r in 0.3f64..1.0,
    ) {
        let mut eta = QuarkCoeffs::new(1);
        for (beta, nu, m, v) in entries {
            eta.insert(&[beta], nu, &[m], v).unwrap();
        }
        let psi = AdmissibleFn::log_power(0.25, b).unwrap();
        let chk = embedding_inequality_check(&eta, 1.0, 2.0, r, &unit(), &psi).unwrap();
        prop_assert!(chk.holds, "{:?}", chk);
    }
}

#[test]
fn weighted_identity_for_finite_q() {
    // 2^{j/p} λ_{j,⌊2^j x⌋} β_j^{1/p} = 1 at covered levels when q < ∞
    let psi = AdmissibleFn::log_log_power(0.25, -0.5).unwrap();
    let (p, q) = (1.0, 4.0);
    let seq = construct_weighted_lambda(p, q, &psi, 40).unwrap();
    let lv = weighted_levels(p, q, &psi, 40).unwrap();
    let mut hits = 0;
    for i in 0..400 {
        let x = 1.0 + (i as f64 + 0.5) / 400.0;
        for j in 1..=40u32 {
            let k = (x * (1u64 << j) as f64).floor() as u64;
            let v = seq.lookup(j, k);
            if v > 0.0 {
                let w = 2f64.powf(j as f64 / p) * v * lv.beta[j as usize].powf(1.0 / p);
                assert!((w - 1.0).abs() < 1e-9, "level {j}: {w}");
                hits += 1;
            }
        }
    }
    assert!(hits > 0);
}

#[test]
fn seminorm_ignores_coarse_grid_shift() {
    let spec = GridSpec::new(vec![-2.0], vec![2.0], 8).unwrap();
    let f = GridFunction::sample(spec, |x| BumpFn::factor(x[0])).unwrap();
    let params = BesovParams::new(1, 0.5, 1.0, 1.0).unwrap();
    let r = besov_seminorm(&f, &params, all_shells(&f), Modulus::Shell).unwrap();
    assert!(r.seminorm.is_finite() && r.seminorm > 0.0);
    assert!(r.per_shell.iter().all(|e| e.value.is_finite()));
}
