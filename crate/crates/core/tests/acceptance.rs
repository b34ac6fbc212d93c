//! One line per acceptance criterion; known deviations are reported but not asserted.

use hypercox::acceptance::{all_passed, run_checks};

#[test]
fn acceptance() {
    let checks = run_checks(None);
    for c in &checks {
        println!("{}", c.line());
    }
    assert_eq!(checks.len(), 9);
    assert!(all_passed(&checks), "acceptance failures above");
}
