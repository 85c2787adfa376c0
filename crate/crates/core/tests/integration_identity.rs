//! Reduced integrals against independently known values: Frobenius-Schur
//! indicators and tensor invariant counts on groups, Gaussian moments on
//! linear targets, and elementary areas on the model spaces.

use std::f64::consts::PI;

use weylreduce::actions::{action_by_id, AmbientPoint, PolarAction};
use weylreduce::cli::registry::function_by_id;
use weylreduce::quadrature::{
    calibrate_c, mc_integrate_full, reduced_integrate, reduced_integrate_general,
    reduced_integrate_with_rule, truncated_rule, Calibration, DeltaMethod, Estimate,
};

const SEED: u64 = 4242;

fn calibrated(id: &str) -> (PolarAction, Calibration) {
    let a = action_by_id(id).unwrap();
    let cal = calibrate_c(&a, 64).unwrap();
    (a, cal)
}

fn reduce(a: &PolarAction, cal: &Calibration, fid: &str, order: usize) -> f64 {
    let f = function_by_id(fid).unwrap().bind_section(a).unwrap();
    reduced_integrate(a, cal, &f, order, DeltaMethod::Numeric).unwrap()
}

fn full(a: &PolarAction, fid: &str, n: usize, seed: u64) -> Estimate {
    let f = function_by_id(fid).unwrap().bind(a).unwrap();
    mc_integrate_full(a, &f, n, seed).unwrap()
}

fn within(est: &Estimate, exact: f64) -> bool {
    (est.value - exact).abs() <= 4.0 * est.stderr + 1e-12 * (1.0 + exact.abs())
}

#[test]
fn class_function_integrals_on_compact_groups() {
    // |tr|^2 counts invariants in V (x) V*, |tr|^4 in V^(x)2 (x) V*^(x)2,
    // Re tr(g^2) is the Frobenius-Schur indicator of V, and |chi_2|^2 counts
    // the irreducible summands of Sym^2 V.
    let table: [(&str, [(&str, f64); 5]); 3] = [
        (
            "conj-su2",
            [("const1", 1.0), ("abs_trace_sq", 1.0), ("abs_trace_4", 2.0), ("re_trace_gsq", -1.0), ("char2_sq", 1.0)],
        ),
        (
            "conj-su3",
            [("const1", 1.0), ("abs_trace_sq", 1.0), ("abs_trace_4", 2.0), ("re_trace_gsq", 0.0), ("char2_sq", 1.0)],
        ),
        (
            "conj-so3",
            [("const1", 1.0), ("abs_trace_sq", 1.0), ("abs_trace_4", 3.0), ("re_trace_gsq", 1.0), ("char2_sq", 2.0)],
        ),
    ];
    for (id, rows) in table {
        let (a, cal) = calibrated(id);
        for (fid, exact) in rows {
            let v = reduce(&a, &cal, fid, 64);
            assert!((v - exact).abs() < 1e-10, "{id} {fid}: {v} vs {exact}");
        }
    }
}

#[test]
fn conj_so3_matches_monte_carlo() {
    let (a, cal) = calibrated("conj-so3");
    for (k, fid) in ["abs_trace_sq", "abs_trace_4", "char2_sq"].iter().enumerate() {
        let red = reduce(&a, &cal, fid, 64);
        let mc = full(&a, fid, 200_000, SEED + k as u64);
        assert!(within(&mc, red), "{fid}: MC {mc:?} vs reduced {red}");
    }
}

#[test]
fn trapezoid_is_exact_on_trigonometric_integrands() {
    // Once the trapezoid resolves the highest frequency of f delta, raising
    // the order changes nothing beyond rounding.
    for (id, order) in [("conj-su2", 12), ("conj-su3", 16)] {
        let (a, cal) = calibrated(id);
        for fid in ["abs_trace_sq", "abs_trace_4", "char2_sq"] {
            let low = reduce(&a, &cal, fid, order);
            let high = reduce(&a, &cal, fid, 96);
            assert!((low - high).abs() < 1e-12, "{id} {fid}: order {order} {low} vs {high}");
        }
    }
}

#[test]
fn numeric_and_closed_form_delta_give_the_same_integral() {
    for (id, fid) in [
        ("conj-su3", "abs_trace_4"),
        ("adj-su3", "quartic_gauss"),
        ("srep-su3so3", "quartic_gauss"),
        ("sym-s3", "cos_r_sq"),
    ] {
        let (a, cal) = calibrated(id);
        let f = function_by_id(fid).unwrap().bind_section(&a).unwrap();
        let num = reduced_integrate(&a, &cal, &f, 48, DeltaMethod::Numeric).unwrap();
        let closed = reduced_integrate(&a, &cal, &f, 48, DeltaMethod::ClosedForm).unwrap();
        assert!((num - closed).abs() < 1e-10 * (1.0 + closed.abs()), "{id}: {num} vs {closed}");
    }
}

#[test]
fn gaussian_moments_on_linear_targets() {
    // E|x|^4 = d(d + 2) for the standard Gaussian on R^d.
    for id in ["adj-su2", "adj-su3", "srep-su2so2", "srep-su3so3"] {
        let (a, cal) = calibrated(id);
        let d = a.ambient_dim as f64;
        let mass = (2.0 * PI).powf(d / 2.0);
        let g = reduce(&a, &cal, "gaussian", 64);
        let q = reduce(&a, &cal, "quartic_gauss", 64);
        assert!((g / mass - 1.0).abs() < 1e-9, "{id}: gaussian {g}");
        assert!((q / (mass * d * (d + 2.0)) - 1.0).abs() < 1e-9, "{id}: quartic {q}");
    }
}

#[test]
fn sphere_and_hermann_integrals() {
    let cases: [(&str, &str, f64); 6] = [
        ("sym-s2", "harmonic_deg1", 0.0),
        ("sym-s3", "const1", 2.0 * PI * PI),
        ("sym-s3", "cos_r_sq", PI * PI / 2.0),
        ("sym-s3", "harmonic_deg1", 0.0),
        ("hermann-s2", "const1", 4.0 * PI),
        ("hermann-s2", "x_coord_sq", 4.0 * PI / 3.0),
    ];
    for (id, fid, exact) in cases {
        let (a, cal) = calibrated(id);
        let v = reduce(&a, &cal, fid, 64);
        assert!((v - exact).abs() < 1e-10, "{id} {fid}: {v} vs {exact}");
    }
}

#[test]
fn sphere_integrals_match_monte_carlo() {
    for (k, (id, fid)) in [("sym-s3", "cos_r_sq"), ("hermann-s2", "x_coord_sq")].iter().enumerate() {
        let (a, cal) = calibrated(id);
        let red = reduce(&a, &cal, fid, 64);
        let mc = full(&a, fid, 200_000, SEED + 10 + k as u64);
        assert!(within(&mc, red), "{id} {fid}: MC {mc:?} vs reduced {red}");
    }
}

#[test]
fn hyperbolic_disk_integrals() {
    // In polar coordinates the area element is sinh r dr dphi.
    let (a, cal) = calibrated("sym-h2");
    let sech = function_by_id("sech_r").unwrap().bind_section(&a).unwrap();
    let cosh2 = function_by_id("cosh_r_sq").unwrap().bind_section(&a).unwrap();
    for r in [0.5, 1.5, 3.0] {
        let rule = truncated_rule(&a, 48, r).unwrap();
        let v1 = reduced_integrate_with_rule(&a, &cal, &sech, &rule, DeltaMethod::Numeric).unwrap();
        let v2 = reduced_integrate_with_rule(&a, &cal, &cosh2, &rule, DeltaMethod::Numeric).unwrap();
        let e1 = 2.0 * PI * r.cosh().ln();
        let e2 = 2.0 * PI * (r.cosh().powi(3) - 1.0) / 3.0;
        assert!((v1 / e1 - 1.0).abs() < 1e-9, "R = {r}: {v1} vs {e1}");
        assert!((v2 / e2 - 1.0).abs() < 1e-9, "R = {r}: {v2} vs {e2}");
    }
    let mc = full(&a, "sech_r", 200_000, SEED + 20);
    assert!(within(&mc, reduce(&a, &cal, "sech_r", 64)), "{mc:?}");
}

#[test]
fn general_reduction_of_non_invariant_functions() {
    let cases: [(&str, &str, f64); 3] = [
        ("conj-su2", "abs_g12_sq", 0.5),
        ("conj-su3", "abs_g12_sq", 1.0 / 3.0),
        ("adj-su2", "coord_poly", (2.0 * PI).powf(1.5)),
    ];
    for (k, (id, fid, exact)) in cases.into_iter().enumerate() {
        let (a, cal) = calibrated(id);
        let f = function_by_id(fid).unwrap().bind(&a).unwrap();
        let est =
            reduced_integrate_general(&a, &cal, &f, 32, 2_000, SEED + 30 + k as u64, DeltaMethod::Numeric)
                .unwrap();
        assert!(within(&est, exact), "{id} {fid}: {est:?} vs {exact}");
    }
}

#[test]
fn non_invariant_functions_are_refused_on_the_section() {
    let a = action_by_id("conj-su2").unwrap();
    assert!(function_by_id("abs_g12_sq").unwrap().bind_section(&a).is_err());
    let s2 = action_by_id("sym-s2").unwrap();
    assert!(function_by_id("x_coord_sq").unwrap().bind_section(&s2).is_err());
}

#[test]
fn monte_carlo_stderr_scales_like_inverse_square_root() {
    let a = action_by_id("conj-su2").unwrap();
    let ses: Vec<f64> = [10_000, 100_000, 1_000_000]
        .iter()
        .map(|&n| full(&a, "abs_trace_sq", n, SEED + 40).stderr)
        .collect();
    let expected = 10f64.sqrt();
    for w in ses.windows(2) {
        let ratio = w[0] / w[1];
        assert!(ratio > expected / 2.0 && ratio < expected * 2.0, "{ses:?}");
    }
}

#[test]
fn monte_carlo_is_reproducible_across_thread_counts() {
    let a = action_by_id("conj-su3").unwrap();
    let f = function_by_id("abs_trace_sq").unwrap().bind(&a).unwrap();
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| mc_integrate_full(&a, &f, 50_000, SEED).unwrap())
    };
    let one = run(1);
    let four = run(4);
    assert_eq!(one.value.to_bits(), four.value.to_bits());
    assert_eq!(one.stderr.to_bits(), four.stderr.to_bits());
    let other = mc_integrate_full(&a, &f, 50_000, SEED + 1).unwrap();
    assert_ne!(one.value, other.value);
}

#[test]
fn ambient_points_from_section_are_on_the_target() {
    // f(g s) = f(s) for invariant functions along random acting elements.
    let mut rng = weylreduce::rng::stream_rng(SEED, 50);
    for (id, fid) in [("conj-su3", "char2_sq"), ("adj-su3", "quartic_gauss"), ("sym-h2", "cosh_r_sq")] {
        let a = action_by_id(id).unwrap();
        let f = function_by_id(fid).unwrap().bind(&a).unwrap();
        for _ in 0..20 {
            let s = a.sample_section_point(&mut rng);
            let p: AmbientPoint = a.section_embed(&s).unwrap();
            let g = a.sample_acting(&mut rng);
            let q = a.act(&g, &p);
            let (x, y) = (f(&p), f(&q));
            assert!((x - y).abs() < 1e-9 * (1.0 + x.abs()), "{id}: {x} vs {y}");
        }
    }
}
