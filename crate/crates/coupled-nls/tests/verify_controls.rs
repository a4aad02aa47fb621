use coupled_nls::cli::verify::{fiber_laws, fiber_laws_with};

#[test]
fn fiber_suite_passes_with_the_correct_formula() {
    assert!(fiber_laws().passed());
}

#[test]
fn wrong_pohozaev_coefficient_fails_the_formula_check() {
    // (θ − 2)/2 replaced by (θ − 1)/2
    let s = fiber_laws_with(|it, p| {
        let th = p.thetas();
        let c = [p.mu1 / p.p * it.pow_u, p.mu2 / p.q * it.pow_v, p.beta * it.mixed];
        (0..3).map(|i| 0.5 * (th[i] - 1.0) * c[i]).sum()
    });
    assert!(!s.passed());
    assert!(!s.check("reduced energy formula").unwrap().passed);
    assert!(s.check("sign law").unwrap().passed);
}
