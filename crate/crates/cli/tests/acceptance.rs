//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Tolerances live in `besov_cli::tolerances`. Criteria listed in
//! `EXPECTED_FAIL` are implemented literally and cannot hold (see the
//! decisions ledger); the suite exits nonzero if any other criterion fails,
//! or if an expected failure starts passing.

use std::process::ExitCode;
use std::time::Instant;

use besov_cli::config::ExperimentConfig;
use besov_cli::criteria::{run_scenario, scenario_defaults, Criterion};

const ORDER: &[&str] = &["1", "2", "3", "4", "5", "6", "6-holder", "7a", "7b", "8", "9", "10"];

/// Sweep ends 4, 13, 37 (not 4, 12, 34); the weighted runs through level 34
/// cover each sample at most once.
const EXPECTED_FAIL: &[&str] = &["3", "7a"];

/// Independent oracle for the `χ = 2` tail: `Σ_{j=1}^{10^6} (j+2)^{-2}`.
fn tail_oracle() -> f64 {
    (1..=1_000_000u64).rev().map(|j| 1.0 / ((j + 2) * (j + 2)) as f64).sum()
}

fn main() -> ExitCode {
    let t0 = Instant::now();
    let mut all: Vec<Criterion> = Vec::new();
    for scenario in ["lemmas", "lemma35", "thm1_1", "thm1_2", "thm1_4", "thm1_3"] {
        let layer = scenario_defaults(scenario).expect("known scenario");
        let cfg = ExperimentConfig::resolve(&[&layer]).expect("default configuration");
        match run_scenario(scenario, &cfg) {
            Ok(out) => all.extend(out.criteria),
            Err(e) => {
                println!("FAIL {scenario}: scenario aborted: {e}");
                return ExitCode::FAILURE;
            }
        }
    }
    all.sort_by_key(|c| ORDER.iter().position(|id| *id == c.id).unwrap_or(usize::MAX));

    let tail = tail_oracle();
    let oracle_ok = (tail - besov_cli::tolerances::TAIL_TARGET).abs() <= besov_cli::tolerances::TAIL_ABS;
    all.push(Criterion {
        id: String::from("7b-oracle"),
        pass: oracle_ok,
        detail: format!("direct sum of (j+2)^-2 over 1..=10^6 is {tail:.6}"),
    });

    let mut unexpected = Vec::new();
    for c in &all {
        println!("{}", c.line());
        let expected_fail = EXPECTED_FAIL.contains(&c.id.as_str());
        if c.pass == expected_fail {
            unexpected.push(c.id.clone());
        }
    }
    for id in ORDER {
        if !all.iter().any(|c| c.id == *id) {
            println!("FAIL {id}: not reported");
            unexpected.push(id.to_string());
        }
    }
    let passed = all.iter().filter(|c| c.pass).count();
    println!(
        "acceptance: {passed}/{} criteria passed, expected failures {:?}, {:.1}s",
        all.len(),
        EXPECTED_FAIL,
        t0.elapsed().as_secs_f64()
    );
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("acceptance: unexpected outcome for {unexpected:?}");
        ExitCode::FAILURE
    }
}
