//! Acceptance gate: one line per criterion, all must pass.

use entropometer_core::entropy::{irreversible_bound, QuadratureConfig};
use entropometer_core::harness::{run_suite, SuiteConfig};
use entropometer_core::interconnect::{SePoint, TemperatureScale, TRIPLE_POINT_KELVIN};
use entropometer_core::processes::{vn_entropy, ModelState};
use entropometer_core::spectra::{builtin, Builtin};
use entropometer_core::thermo;

struct Criterion {
    number: usize,
    label: &'static str,
    check_name: &'static str,
}

const CRITERIA: &[Criterion] = &[
    Criterion { number: 1, label: "interconnection map strictly increasing", check_name: "f11_monotonicity" },
    Criterion { number: 2, label: "composition through an intermediate system", check_name: "composition_identity" },
    Criterion { number: 3, label: "anchor-shift invariance", check_name: "shift_invariance" },
    Criterion { number: 4, label: "analytic vs finite-difference derivative", check_name: "derivative_consistency" },
    Criterion { number: 5, label: "temperature ratios independent of reference scale", check_name: "reference_independence" },
    Criterion { number: 6, label: "entropy difference independent of auxiliary", check_name: "auxiliary_independence" },
    Criterion { number: 7, label: "operational entropy matches von Neumann entropy", check_name: "vn_compatibility" },
    Criterion { number: 8, label: "entropy non-decrease in standard processes", check_name: "entropy_nondecrease" },
    Criterion { number: 9, label: "entropy additivity over composed systems", check_name: "entropy_additivity" },
    Criterion { number: 10, label: "canonical state maximizes entropy at fixed energy", check_name: "max_entropy_principle" },
    Criterion { number: 11, label: "irreversibility brackets the entropy difference", check_name: "irreversible_bracketing" },
    Criterion { number: 12, label: "graph extension ranges and verdicts", check_name: "extension_ranges" },
];

#[test]
fn acceptance() {
    let cfg = SuiteConfig {
        seed: 1,
        n_instances: 50,
        ..SuiteConfig::default()
    };
    let reports = run_suite(&cfg);
    let mut all_pass = true;

    for c in CRITERIA {
        let report = reports
            .iter()
            .find(|r| r.name == c.check_name)
            .unwrap_or_else(|| panic!("missing check {}", c.check_name));
        let verdict = if report.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {:>2} [{}] {} — max residual {:.3e} vs tolerance {:.3e} over {} instances",
            c.number, verdict, c.label, report.max_residual, report.tolerance, report.instances
        );
        all_pass &= report.pass;
    }

    // criterion 11 also pins a concrete two-level bracket
    let two_level = builtin(Builtin::TwoLevel { gap: 1.0 }).unwrap();
    let a1 = ModelState::canonical(two_level.clone(), 1.0).unwrap();
    let a2 = ModelState::canonical(two_level.clone(), 0.5).unwrap();
    let aux = {
        let s = builtin(Builtin::Harmonic { omega: 1.0, n_levels: 32 }).unwrap();
        SePoint::at_beta(s, 1.0).unwrap()
    };
    let scale = TemperatureScale::triple_point();
    let quad = QuadratureConfig::default();
    let bracket =
        irreversible_bound(&a1, &a2, &aux, 0.01, &aux, 0.01, &scale, &quad).unwrap();
    let delta_s = vn_entropy(&a2) - vn_entropy(&a1);
    let two_level_ok = (delta_s - 0.080645).abs() <= 1e-6
        && (bracket.lower - 0.070645).abs() <= 1e-6
        && (bracket.upper - 0.090645).abs() <= 1e-6
        && bracket.lower < delta_s
        && delta_s < bracket.upper;
    println!(
        "criterion 11b [{}] two-level bracket ({:.6}, {:.6}) around ΔS = {:.6}",
        if two_level_ok { "PASS" } else { "FAIL" },
        bracket.lower,
        bracket.upper,
        delta_s
    );
    all_pass &= two_level_ok;

    let constant_ok = TRIPLE_POINT_KELVIN == 273.16
        && scale.t_ref() == 273.16;
    println!(
        "criterion 13 [{}] triple-point preset constant equals 273.16 exactly",
        if constant_ok { "PASS" } else { "FAIL" }
    );
    all_pass &= constant_ok;

    // sanity: the frozen two-level thermodynamics behind the bracket example
    let s1 = thermo::entropy_se(&two_level, 1.0).unwrap();
    let s2 = thermo::entropy_se(&two_level, 0.5).unwrap();
    assert!((s1 - 0.582203).abs() <= 1e-6 && (s2 - 0.662847).abs() <= 1e-6);

    assert!(all_pass, "at least one acceptance criterion failed");
}
