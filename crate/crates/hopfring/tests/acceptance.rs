//! Acceptance criteria, one pass/fail line each. Runs without the libtest harness
//! so the lines always show up in `cargo test` output.

use std::time::Instant;

use hopfring::verify::{run_named, Report, Status, VerifyConfig};

fn p3() -> VerifyConfig {
    VerifyConfig::default()
}

fn criterion(n: u32, what: &str, runs: &[(&str, VerifyConfig)]) -> bool {
    let t = Instant::now();
    let mut reports: Vec<Report> = Vec::new();
    for (suite, cfg) in runs {
        reports.extend(run_named(suite, cfg).unwrap_or_else(|e| panic!("{suite}: {e}")));
    }
    let checks: usize = reports.iter().map(|r| r.checks.len()).sum();
    let bad: Vec<String> = reports
        .iter()
        .flat_map(|r| r.failures().map(move |c| format!("{}/{}: {}", r.suite, c.name, c.detail.as_deref().unwrap_or(""))))
        .collect();
    let skipped: usize = reports.iter().map(|r| r.count(Status::Skipped)).sum();
    let ok = bad.is_empty() && checks > 0;
    println!(
        "criterion {n}: {} {what} ({checks} checks, {skipped} skipped, {:.2}s)",
        if ok { "PASS" } else { "FAIL" },
        t.elapsed().as_secs_f64()
    );
    for b in bad.iter().take(5) {
        println!("    {b}");
    }
    ok
}

fn c1() -> bool {
    criterion(1, "invariant relations, n=2,3 at p=3", &[("relations", p3())])
}

fn c2() -> bool {
    criterion(2, "leading terms and dual-basis triangularity, degree <= 30", &[("leading-terms", p3()), ("dual-basis", p3())])
}

fn c3() -> bool {
    criterion(3, "basis dimensions, n <= 3, k <= 4, degree <= 30", &[("dimensions", p3())])
}

fn c4() -> bool {
    criterion(4, "Adem confluence on 500 seeded words", &[("confluence", VerifyConfig { samples: 500, ..p3() })])
}

fn c5() -> bool {
    criterion(5, "Nishida migration vs adjoint action, n=1,2, degree <= 24", &[("nishida", p3())])
}

fn c6() -> bool {
    criterion(6, "E-product leading terms, residual excess, bijection, worked example", &[("e-products", p3()), ("bijection", p3())])
}

fn c7() -> bool {
    criterion(7, "E-series relations by both paths, truncation 12", &[("e-relations", p3())])
}

fn c8() -> bool {
    criterion(8, "vanishing of low-excess circle products, degree <= 24", &[("vanishing", p3())])
}

fn c9() -> bool {
    criterion(9, "change-of-basis triangularity, k <= 2, degree <= 24", &[("change-of-basis", p3())])
}

fn c10() -> bool {
    let p3 = VerifyConfig { trunc: 10, ..p3() };
    let p5 = VerifyConfig { prime: 5, trunc: 6, ..VerifyConfig::default() };
    criterion(
        10,
        "operation and series identities, p=3 truncation 10, p=5 truncation 6",
        &[("operations", p3.clone()), ("series-identities", p3), ("operations", p5.clone()), ("series-identities", p5)],
    )
}

fn main() {
    let results = [c1(), c2(), c3(), c4(), c5(), c6(), c7(), c8(), c9(), c10()];
    let passed = results.iter().filter(|&&r| r).count();
    println!("acceptance: {passed}/10 criteria pass");
    if passed != results.len() {
        std::process::exit(1);
    }
}
