use std::f64::consts::PI;
use std::sync::Arc;

use fracwave::basis::{interval_basis, rectangle_basis, sturm_liouville_basis};
use fracwave::decay::{classify_initial_value, log_grid, DecaySamples, Verdict};
use fracwave::experiment::{run, ExperimentConfig};
use fracwave::observe::{ObservationMap, ObservationSpec, Side, Target};
use fracwave::solver::{FractionalProblem, InitialData, Quantity};
use fracwave::Execution;

const SUBDOMAIN: &str = r#"
[problem]
alpha = 0.6
modes = 32
initial_a = { kind = "polynomial_bump" }
sign_definite_a = true

[problem.domain]
kind = "interval"
length = 1.0

[observation]
target = { kind = "subdomain", lower = [0.2], upper = [0.4] }

[time_grid]
t_min = 100.0
t_max = 1e6
points = 33
"#;

#[test]
fn config_run_writes_three_files() {
    let cfg = ExperimentConfig::from_toml(SUBDOMAIN, std::path::Path::new(".")).unwrap();
    let out = run(&cfg, Execution::Parallel).unwrap();
    let dir = tempfile::tempdir().unwrap();
    out.write(dir.path(), "sub").unwrap();
    for name in ["sub_series.csv", "sub_expansion.csv", "sub_verdict.txt"] {
        let text = std::fs::read_to_string(dir.path().join(name)).unwrap();
        assert!(!text.is_empty(), "{name}");
    }
    let fit = out.fit.as_ref().unwrap();
    assert!((fit.exponent + 0.6).abs() < 0.02, "{}", fit.exponent);
    assert!(out.verdict.any(Verdict::Nonzero));
    assert!(!out.verdict.any(Verdict::Vanishes));
}

#[test]
fn sequential_and_parallel_agree_bitwise() {
    let basis = Arc::new(rectangle_basis(PI, 2.0, 10).unwrap());
    let data = InitialData::SmoothBump { center: vec![1.0, 0.8], radius: 0.6, amplitude: 1.0 };
    let times = log_grid(1e-2, 1e4, 25).unwrap();
    let spec = ObservationSpec {
        target: Target::BoundaryFlux { side: Side::Left, range: None },
        quantity: Quantity::Field,
    };
    let map = ObservationMap::new(spec, &basis).unwrap();
    let series = |exec| {
        let p = FractionalProblem::from_data(0.4, basis.clone(), &data, None, exec).unwrap();
        map.series(&p, &times, exec).unwrap().iter().map(|o| o.values.clone()).collect::<Vec<_>>()
    };
    assert_eq!(series(Execution::Parallel), series(Execution::Sequential));
}

#[test]
fn mesh_basis_tracks_the_closed_form_interval() {
    let cells = 400;
    let ones = vec![1.0; cells + 1];
    let zeros = vec![0.0; cells + 1];
    let mesh = Arc::new(sturm_liouville_basis(&ones, &zeros, PI, 12).unwrap());
    let exact = Arc::new(interval_basis(PI, 12).unwrap());
    for (k, (a, b)) in mesh.eigenvalues().iter().zip(exact.eigenvalues()).enumerate() {
        assert!((a / b - 1.0).abs() < 1e-3, "mode {k}: {a} vs {b}");
    }
    let data = InitialData::PolynomialBump { amplitude: 1.0 };
    let pm = FractionalProblem::from_data(0.5, mesh, &data, None, Execution::Parallel).unwrap();
    let pe = FractionalProblem::from_data(0.5, exact, &data, None, Execution::Parallel).unwrap();
    for t in [0.1, 10.0, 1e4] {
        let a = pm.field(&[1.0], t).unwrap().value;
        let b = pe.field(&[1.0], t).unwrap().value;
        assert!((a - b).abs() < 1e-3 * b.abs(), "t {t}: {a} vs {b}");
    }
}

#[test]
fn wave_velocity_at_a_point_is_classified() {
    let basis = Arc::new(interval_basis(PI, 16).unwrap());
    let p = FractionalProblem::from_data(
        1.5,
        basis.clone(),
        &InitialData::Zero,
        Some(&InitialData::sin_mode(1)),
        Execution::Parallel,
    )
    .unwrap();
    let spec = ObservationSpec::point(vec![PI / 2.0], Quantity::OperatorImage);
    let times = log_grid(1e2, 1e6, 41).unwrap();
    let map = ObservationMap::new(spec.clone(), &basis).unwrap();
    let values = map.series(&p, &times, Execution::Parallel).unwrap().iter().map(|o| o.scalar()).collect();
    let verdict = classify_initial_value(&p, &spec, &DecaySamples::new(times, values).unwrap()).unwrap();
    // the slower velocity rate masks the value branch
    assert!(verdict.claim("u(x0,0)").is_none(), "{verdict}");
    assert_eq!(verdict.claim("∂t u(x0,0)").map(|c| c.verdict), Some(Verdict::Nonzero), "{verdict}");
}
