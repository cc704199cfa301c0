use proptest::prelude::*;
use scalefn_core::{LevySpec, ScaleFunction};

fn catalogue() -> Vec<(LevySpec, f64)> {
    vec![
        (LevySpec::brownian(0.5, 1.0), 0.3),
        (LevySpec::brownian(0.0, 1.0), 0.0),
        (LevySpec::brownian(-1.0, 1.0), 0.0),
        (LevySpec::brownian(0.0, 2.0), 1.5),
        (LevySpec::brownian(0.3, 0.7).with_jumps(2.0, 1.5), 0.1),
        (LevySpec::brownian(1.0, 1.0).with_jumps(1.0, 1.0), 0.0),
        (LevySpec::brownian(2.0, 0.0).with_jumps(1.0, 1.0), 0.5),
        (LevySpec::brownian(1.0, 0.0).with_jumps(3.0, 2.0), 0.0),
        (LevySpec::pure_drift(2.0), 0.7),
    ]
}

#[test]
fn increasing_on_a_fine_grid() {
    for (spec, q) in catalogue() {
        let w = ScaleFunction::closed_form(&spec, q).unwrap();
        let mut prev = w.eval(0.0);
        for i in 1..=1000 {
            let x = i as f64 * 0.005;
            let v = w.eval(x);
            assert!(v >= prev, "{spec:?} q={q}: W({x}) = {v} < {prev}");
            prev = v;
        }
    }
}

#[test]
fn imaginary_parts_cancel() {
    for (spec, q) in catalogue() {
        let w = ScaleFunction::closed_form(&spec, q).unwrap();
        for i in 1..=200 {
            let x = i as f64 * 0.025;
            let z = w.eval_complex(x);
            assert!(z.im.abs() <= 1e-12 * z.re.abs().max(1.0), "{spec:?} x={x}: {z}");
        }
    }
}

#[test]
fn vanishes_on_negative_half_line() {
    let w = ScaleFunction::closed_form(&LevySpec::brownian(0.5, 1.0), 0.3).unwrap();
    assert_eq!(w.eval(-1e-12), 0.0);
    assert_eq!(w.eval(-5.0), 0.0);
    assert_eq!(w.eval(0.0), 0.0);
    assert_eq!(w.eval_two_arg(1.0, 2.0), 0.0);
}

#[test]
fn bounded_variation_starts_at_inverse_drift() {
    let spec = LevySpec::brownian(2.0, 0.0).with_jumps(1.0, 1.0);
    let w = ScaleFunction::closed_form(&spec, 0.25).unwrap();
    assert_eq!(w.w_at_zero, 0.5);
    assert!((w.eval(1e-9) - 0.5).abs() < 1e-8);
}

#[test]
fn cramer_lundberg_ruin_probability() {
    // Ruin probability from level x is 1 − ψ'(0+)·W(x).
    let (c, rho, mu) = (2.0, 1.0, 1.0);
    let spec = LevySpec::brownian(c, 0.0).with_jumps(rho, mu);
    let w = ScaleFunction::closed_form(&spec, 0.0).unwrap();
    let drift = c - rho / mu;
    for x in [0.0, 0.5, 1.0, 3.0] {
        let ruin = rho / (mu * c) * (-(mu - rho / c) * x).exp();
        assert!((1.0 - drift * w.eval(x) - ruin).abs() < 1e-12, "x={x}");
    }
}

fn spec_strategy() -> impl Strategy<Value = LevySpec> {
    (-1.0..1.0f64, 0.2..2.0f64, 0.0..3.0f64, 0.3..3.0f64)
        .prop_map(|(a, s, rho, mu)| LevySpec::brownian(a, s).with_jumps(rho, mu))
}

proptest! {
    #[test]
    fn phi_solves_and_is_monotone(spec in spec_strategy(), q1 in 0.0..5.0f64, dq in 0.0..5.0f64) {
        let p1 = spec.phi(q1).unwrap();
        let p2 = spec.phi(q1 + dq).unwrap();
        prop_assert!(p2 >= p1);
        prop_assert!((spec.psi(p1) - q1).abs() <= 1e-9 * (1.0 + q1));
    }

    #[test]
    fn transform_matches_exponent(spec in spec_strategy(), q in 0.0..3.0f64, shift in 0.1..4.0f64) {
        let w = ScaleFunction::closed_form(&spec, q).unwrap();
        let beta = w.phi + shift;
        let want = 1.0 / (spec.psi(beta) - q);
        prop_assert!((w.laplace(beta) - want).abs() <= 1e-9 * want.abs());
    }

    #[test]
    fn increasing_in_q(spec in spec_strategy(), q in 0.0..2.0f64, x in 0.01..3.0f64) {
        let lo = ScaleFunction::closed_form(&spec, q).unwrap().eval(x);
        let hi = ScaleFunction::closed_form(&spec, q + 0.5).unwrap().eval(x);
        prop_assert!(hi >= lo * (1.0 - 1e-12));
    }
}
