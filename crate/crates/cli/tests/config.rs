use fnell_cli::config::{Expr, Mode};
use fnell_cli::parse_config;
use fnell_torus::solver::PathKind;

const MINIMAL: &str = r#"
[grid]
mode = "complex"
dimension = 1
points_per_axis = 64

[operator]
kind = "monge_ampere"
"#;

fn errors(text: &str) -> Vec<String> {
    parse_config(text).expect_err("config should be rejected").0
}

#[test]
fn minimal_monge_ampere_config_parses_with_defaults() {
    let cfg = parse_config(MINIMAL).unwrap();
    assert_eq!(cfg.grid.mode, Mode::Complex);
    assert_eq!(cfg.grid.periods, vec![1.0, 1.0]);
    assert_eq!(cfg.path.kind, PathKind::Hessian);
    assert_eq!(cfg.path.schedule.len(), 11);
    assert_eq!(cfg.rhs.to_string(), "zero");
    assert_eq!(cfg.solver.tolerance, 1e-10);
    assert!(cfg.certify.subsolution);
}

#[test]
fn quotient_degrees_must_satisfy_l_below_k() {
    let text = r#"
[grid]
dimension = 2
points_per_axis = 16
[operator]
kind = "hessian_quotient"
k = 2
l = 2
"#;
    let errs = errors(text);
    assert!(errs.iter().any(|e| e.contains("require l < k")), "{errs:?}");
}

#[test]
fn missing_grid_section_names_the_key() {
    let errs = errors("[operator]\nkind = \"monge_ampere\"\n");
    assert!(errs.iter().any(|e| e.contains("grid.points_per_axis")), "{errs:?}");
    assert!(errs.iter().any(|e| e.contains("grid.dimension")), "{errs:?}");
}

#[test]
fn all_errors_are_reported_together() {
    let text = r#"
colour = "blue"
[grid]
dimension = 4
points_per_axis = 15
periods = [1.0]
wobble = 1
[operator]
kind = "sigma_7"
[background]
chi = "chi_perturbed(2, 0.1)"
[rhs]
h = "smooth(2"
[path]
kind = "quotient"
intervals = 4
schedule = [0.0, 1.0]
"#;
    let errs = errors(text);
    for needle in [
        "unknown key 'colour'",
        "unknown key 'grid.wobble'",
        "grid.dimension must be 1, 2 or 3",
        "even and at least 4",
        "'sigma_7'",
        "chi_perturbed takes 3",
        "rhs.h",
        "mutually exclusive",
        "needs operator.kind = \"hessian_quotient\"",
    ] {
        assert!(errs.iter().any(|e| e.contains(needle)), "missing {needle:?} in {errs:?}");
    }
}

#[test]
fn dimension_dependent_checks() {
    let text = r#"
[grid]
mode = "real"
dimension = 1
points_per_axis = 8
periods = [1.0, 2.0]
[operator]
kind = "log_sigma_k"
k = 2
[background]
chi = "nminus1_background(chi_scaled(1))"
"#;
    let errs = errors(text);
    assert!(errs.iter().any(|e| e.contains("grid.periods needs 1")), "{errs:?}");
    assert!(errs.iter().any(|e| e.contains("operator.k = 2 must lie in 1..=1")), "{errs:?}");
    assert!(errs.iter().any(|e| e.contains("nminus1_background needs dimension")), "{errs:?}");
}

#[test]
fn schedules_and_generators() {
    let text = format!("{MINIMAL}\n[path]\nkind = \"fixed\"\nschedule = [0.0, 0.5, 1.0]\n[rhs]\nh = \"smooth(2, 0.1, 9)\"\n");
    let cfg = parse_config(&text).unwrap();
    assert_eq!(cfg.path.schedule, vec![0.0, 0.5, 1.0]);
    assert_eq!(cfg.rhs, Expr::parse("smooth(2, 0.1, 9)").unwrap());
    let bad = format!("{MINIMAL}\n[path]\nschedule = [0.0, 0.7, 0.5, 1.0]\n");
    assert!(errors(&bad).iter().any(|e| e.contains("increase strictly")));
    assert!(errors("not toml = = 1").iter().any(|e| e.contains("not valid TOML")));
}
