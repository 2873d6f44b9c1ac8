//! End-to-end acceptance checks. Each test prints a single pass/fail line
//! (visible with `cargo test --test acceptance -- --nocapture`).

mod common;

use std::sync::OnceLock;

use common::{oracle_signs, Lcg};
use mfo_core::chain::{approximate_in_interval, build_alpha_chain, ChainConfig};
use mfo_core::oscillation::{
    count_sign_changes, integral_sigma, locate_sign_change, pigeonhole_agreement_witness,
    short_interval_mean, sigma,
};
use mfo_core::rat::{rat, rat_abs, rat_u};
use mfo_core::ratio::{in_rx, prefix_check, reorder_prefix};
use mfo_core::{
    sieve_signs, ExperimentParams, Interval, PrimeSignAssignment, Rat, RatioFactor, RatioProduct,
    SignTable,
};
use num_traits::{One, ToPrimitive};

fn verdict(num: u32, name: &str, pass: bool) {
    println!(
        "criterion {num:>2} {name}: {}",
        if pass { "pass" } else { "FAIL" }
    );
    assert!(pass, "criterion {num} ({name}) failed");
}

fn liouville_1e6() -> &'static SignTable {
    static T: OnceLock<SignTable> = OnceLock::new();
    T.get_or_init(|| sieve_signs(&PrimeSignAssignment::Liouville, 1_000_000).unwrap())
}

#[test]
fn criterion_01_sieve_matches_factorization_oracle() {
    let limit = 100_000u64;
    let table = sieve_signs(&PrimeSignAssignment::Liouville, limit).unwrap();
    let oracle = oracle_signs(&PrimeSignAssignment::Liouville, limit);
    let pass = (1..=limit).all(|n| table.sign(n) == oracle[n as usize]);
    verdict(1, "sieve vs factorization oracle, n <= 1e5", pass);
}

#[test]
fn criterion_02_complete_multiplicativity() {
    let rules = [
        PrimeSignAssignment::Liouville,
        PrimeSignAssignment::SeededRandom { seed: 11 },
        PrimeSignAssignment::SeededRandom { seed: 22 },
        PrimeSignAssignment::SeededRandom { seed: 33 },
    ];
    let mut pass = true;
    for rule in &rules {
        let t = sieve_signs(rule, 1_000).unwrap();
        for m in 2..=500u64 {
            for n in 2..=1_000 / m {
                if t.sign(m * n) != t.sign(m) * t.sign(n) {
                    pass = false;
                }
            }
        }
    }
    verdict(2, "f(mn) = f(m)f(n) exhaustive, mn <= 1e3, 4 rules", pass);
}

#[test]
fn criterion_03_sign_change_witness_soundness() {
    let rules = [
        PrimeSignAssignment::Liouville,
        PrimeSignAssignment::SeededRandom { seed: 11 },
        PrimeSignAssignment::SeededRandom { seed: 22 },
        PrimeSignAssignment::SeededRandom { seed: 33 },
    ];
    let mut pass = true;
    let mut checked = 0u64;
    for rule in &rules {
        let t = sieve_signs(rule, 70_100).unwrap();
        for (p, q) in [(3u64, 2u64), (7, 5), (5, 7)] {
            if t.sign(p) != t.sign(q) {
                continue; // witness lemma needs matched endpoint signs
            }
            for n in 1..=10_000u64 {
                let pn = p * n;
                let m0 = pn / q;
                if m0 < 1 || t.sign(n) != -t.sign(m0) {
                    continue;
                }
                checked += 1;
                match locate_sign_change(&t, n, p, q) {
                    Ok(m) => {
                        if !(m > pn.saturating_sub(q) && m <= pn && t.sign(m) == -t.sign(m + 1)) {
                            pass = false;
                        }
                    }
                    Err(_) => pass = false,
                }
            }
        }
    }
    verdict(
        3,
        "sign-change witness in (pn-q, pn], n <= 1e4, 4 rules",
        pass && checked > 10_000,
    );
}

#[test]
fn criterion_04_pigeonhole_bound() {
    let x = 10_000u64;
    let floor = (x / 2 - 1).div_ceil(3);
    let pass = (0..50u64).all(|i| {
        let t = sieve_signs(
            &PrimeSignAssignment::SeededRandom { seed: 1_000 + i },
            2 * x,
        )
        .unwrap();
        let (_, _, count) = pigeonhole_agreement_witness(&t, x).unwrap();
        count >= floor
    });
    verdict(
        4,
        "pigeonhole witness count >= ceil((x/2-1)/3), 50 rules",
        pass,
    );
}

#[test]
fn criterion_05_sigma_identity_and_stability() {
    let t = sieve_signs(&PrimeSignAssignment::Liouville, 10_000).unwrap();
    let mut rng = Lcg(2024);
    let mut pass = true;
    for _ in 0..20 {
        let lo = 1 + rng.below(3_000);
        let i = Interval::new(lo, lo + rng.below(500)).unwrap();
        if sigma(&t, &i, &Rat::one()).unwrap() != 0 {
            pass = false;
        }
    }
    for _ in 0..20 {
        let lo = 200 + rng.below(1_000);
        let hi = lo + rng.below(300);
        let i = Interval::new(lo, hi).unwrap();
        // Denominator <= lo keeps every floor clear of the nudge window.
        let b = 1 + rng.below(lo);
        let a = 1 + rng.below(2 * b);
        let alpha = rat_u(a, b);
        let nudged = &alpha + rat_u(1, 4 * hi * hi);
        if sigma(&t, &i, &alpha).unwrap() != sigma(&t, &i, &nudged).unwrap() {
            pass = false;
        }
    }
    verdict(5, "sigma(I,1) = 0 and sigma stable under +1/(4 hi^2)", pass);
}

#[test]
fn criterion_06_exact_integral_vs_riemann() {
    let t = sieve_signs(&PrimeSignAssignment::Liouville, 2_048).unwrap();
    let fixture =
        integral_sigma(&t, &Interval::new(4, 8).unwrap(), &rat(1, 2), &rat(3, 4)).unwrap();
    let fixture_ok = fixture == rat(115, 168);

    // I = [1e3, 2e3], window [1/2, 9/16] of width 1/16, 1e6-node midpoint
    // sum with t_j = (16e6 + 2j + 1)/(32e6).
    let i = Interval::new(1_000, 2_000).unwrap();
    let exact = integral_sigma(&t, &i, &rat(1, 2), &rat(9, 16))
        .unwrap()
        .to_f64()
        .unwrap();
    let grid = 1_000_000u64;
    let den = 32_000_000u64;
    let mut total = 0u64;
    for n in i.iter() {
        let sn = t.sign(n);
        let mut prod = (16_000_000 + 1) * n;
        let step = 2 * n;
        for _ in 0..grid {
            if t.sign(prod / den) == -sn {
                total += 1;
            }
            prod += step;
        }
    }
    let width = 1.0 / 16.0;
    let riemann = total as f64 * width / grid as f64;
    let slack = 2.0 * width * i.len() as f64 / grid as f64 + width * i.len() as f64 * 1e-3;
    let riemann_ok = (exact - riemann).abs() < slack;
    verdict(
        6,
        "exact integral: frozen 115/168 fixture and 1e6-node Riemann oracle",
        fixture_ok && riemann_ok,
    );
}

#[test]
fn criterion_07_approximation_soundness() {
    let params = ExperimentParams::desk(
        20.0,
        10_000.0,
        1024.0,
        Interval::new(1, 10).unwrap(),
        10_000,
    )
    .unwrap();
    let rule = PrimeSignAssignment::Liouville;
    let chain = build_alpha_chain(&rule, &params, &ChainConfig::desk(10.0, 1000.0, 2)).unwrap();
    let mut rng = Lcg(777);
    let mut pass = true;
    for _ in 0..100 {
        // Centers c/3200 across (1/2, 1), width exactly 1/(2x²) = 1/800.
        let c = 1_603 + rng.below(3_197 - 1_603 + 1);
        let y1 = rat_u(c - 2, 3_200);
        let y2 = rat_u(c + 2, 3_200);
        match approximate_in_interval(&chain, &y1, &y2, 10_000) {
            Ok(theta) => {
                if !(theta.value() >= &y1 && theta.value() <= &y2 && in_rx(&theta, &params, &rule))
                {
                    pass = false;
                }
            }
            Err(_) => pass = false,
        }
    }
    verdict(7, "100 approximation targets at x = 20, rho_max = 10", pass);
}

#[test]
fn criterion_08_chain_validity_across_configs() {
    let rule = PrimeSignAssignment::Liouville;
    let configs: [(f64, f64, f64); 10] = [
        (10.0, 10.0, 1000.0),
        (15.0, 10.0, 1000.0),
        (20.0, 10.0, 1000.0),
        (20.0, 8.0, 800.0),
        (25.0, 10.0, 1000.0),
        (30.0, 10.0, 1000.0),
        (35.0, 10.0, 1200.0),
        (40.0, 10.0, 1000.0),
        (45.0, 12.0, 1500.0),
        (50.0, 10.0, 1000.0),
    ];
    let mut pass = true;
    for &(x, rho, c) in &configs {
        let params =
            ExperimentParams::desk(x, 10_000.0, 1024.0, Interval::new(1, 10).unwrap(), 10_000)
                .unwrap();
        match build_alpha_chain(&rule, &params, &ChainConfig::desk(rho, c, 2)) {
            Ok(chain) => {
                if chain.verify().is_err() || (chain.t() as f64) > (4.0 * x * x).log2() {
                    pass = false;
                }
            }
            Err(e) => {
                println!("  config (x={x}, rho={rho}, c={c}) failed: {e}");
                pass = false;
            }
        }
    }
    verdict(8, "chain invariants across 10 desk configurations", pass);
}

#[test]
fn criterion_09_prefix_reorder() {
    let rule = PrimeSignAssignment::Liouville;
    let params =
        ExperimentParams::desk(1e6, 50.0, 64.0, Interval::new(1, 10).unwrap(), 1_000).unwrap();
    let pool: Vec<RatioFactor> = [
        (3u64, 2u64),
        (2, 3),
        (5, 3),
        (3, 5),
        (7, 5),
        (5, 7),
        (11, 7),
        (7, 11),
        (13, 11),
        (11, 13),
        (19, 11),
        (11, 19),
        (23, 13),
        (13, 23),
        (37, 19),
        (19, 37),
        (43, 23),
        (23, 43),
        (47, 29),
        (29, 47),
    ]
    .iter()
    .map(|&(p, q)| RatioFactor::new(p, q, &rule).unwrap())
    .collect();
    let half = rat(1, 2);
    let two = rat(2, 1);
    let mut rng = Lcg(31337);
    let mut pass = true;
    for _ in 0..1_000 {
        // Grow a product staying in (1/2, 2), then shuffle the factors so
        // prefixes may leave the range.
        let k = 1 + rng.below(20) as usize;
        let mut factors: Vec<RatioFactor> = Vec::with_capacity(k);
        let mut value = Rat::one();
        while factors.len() < k {
            let f = pool[rng.below(pool.len() as u64) as usize];
            let next = &value * f.ratio();
            if next > half && next < two {
                value = next;
                factors.push(f);
            }
        }
        for j in (1..factors.len()).rev() {
            factors.swap(j, rng.below(j as u64 + 1) as usize);
        }
        let input = RatioProduct::from_factors(factors);
        if !in_rx(&input, &params, &rule) {
            pass = false;
            continue;
        }
        match reorder_prefix(&input) {
            Ok(out) => {
                let mut a: Vec<_> = input.factors().iter().map(|f| (f.p, f.q)).collect();
                let mut b: Vec<_> = out.factors().iter().map(|f| (f.p, f.q)).collect();
                a.sort_unstable();
                b.sort_unstable();
                if !(prefix_check(&out) && a == b) {
                    pass = false;
                }
            }
            Err(_) => pass = false,
        }
    }
    verdict(
        9,
        "1000 random products reordered, prefixes in (1/2,2)",
        pass,
    );
}

#[test]
fn criterion_10_mean_value_hypothesis() {
    let t = liouville_1e6();
    let mean = t.mean_value(1_000_000).unwrap();
    let short = short_interval_mean(t, 1_000_000, 10_000).unwrap();
    // Frozen exact values recorded from the oracle run.
    let pass = mean == rat(-53, 100_000)
        && short == rat(-11, 10_000)
        && rat_abs(&mean) < rat(1, 100)
        && rat_abs(&short) < rat(1, 20);
    verdict(
        10,
        "mean -53/100000 (<0.01), short mean -11/10000 (<0.05)",
        pass,
    );
}

#[test]
fn criterion_11_vacuous_bound_report() {
    let report = count_sign_changes(liouville_1e6(), 1_000_000).unwrap();
    println!(
        "  x/L(x)^7 at x = 1e6: {:.6e} (changes = {})",
        report.paper_lower_bound, report.changes
    );
    verdict(
        11,
        "bound_satisfied = true with x/L(x)^7 < 1",
        report.bound_satisfied && report.paper_lower_bound < 1.0,
    );
}
