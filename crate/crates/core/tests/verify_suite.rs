use sfkahler::verify::{run_suite, SuiteScale};

#[test]
fn fast_suite_passes() {
    let checks = run_suite(SuiteScale::fast());
    for c in &checks {
        println!("{}", c.line());
    }
    assert!(checks.iter().all(|c| c.passed));
}
