//! The acceptance gate: runs every built-in criterion and prints one
//! pass/fail line per criterion. `findim check-all` runs the same suite.

use findim_core::suite;

#[test]
fn acceptance() {
    let results = suite::run_all();
    let mut ok = true;
    for r in &results {
        let status = if r.pass { "PASS" } else { "FAIL" };
        println!("criterion {:2} [{status}] {}: {}", r.index, r.name, r.details);
        ok &= r.pass;
    }
    assert!(ok, "at least one acceptance criterion failed");
}
