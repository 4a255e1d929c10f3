use std::fs::File;
use std::io::{BufReader, BufWriter};

use signorini_core::classifier::{classify_all, ClassifierConfig, PointClass, PointSelection};
use signorini_core::functionals::{radial_profile, write_profile_csv, PROFILE_HEADER, PROFILE_VERSION};
use signorini_core::geometry::io::{read_field, write_field};
use signorini_core::geometry::Grid;
use signorini_core::poly::{HatSolution, Obstacle};
use signorini_core::solver::{complementarity_check, psor_solve, Boundary, Omega, SignoriniProblem};

fn solve_hat(m: usize) -> signorini_core::geometry::ScalarField {
    let hat = HatSolution::standard(1.5, 2).unwrap();
    let problem = SignoriniProblem::new(Grid::new(2, m).unwrap(), Obstacle::Zero, Boundary::hat(hat))
        .unwrap()
        .with_omega(Omega::Auto)
        .unwrap();
    let (u, stats) = psor_solve(&problem);
    assert!(stats.converged, "{stats:?}");
    assert!(stats.energy_monotone());
    u
}

#[test]
fn constant_data_gives_no_contact() {
    let problem = SignoriniProblem::new(Grid::new(2, 33).unwrap(), Obstacle::Zero, Boundary::constant(2, 1.0))
        .unwrap()
        .with_omega(Omega::Auto)
        .unwrap();
    let (u, stats) = psor_solve(&problem);
    assert!(stats.converged);
    assert!(u.values().iter().all(|v| (v - 1.0).abs() < 1e-6));
    assert!(complementarity_check(&u, &Obstacle::Zero).pass);
    let report = classify_all(&u, &Obstacle::Zero, 0, &ClassifierConfig::default(), &PointSelection::Auto).unwrap();
    assert_eq!(report.coincidence_nodes, 0);
    assert!(report.points.is_empty());
}

#[test]
fn solved_hat_is_regular_at_origin() {
    let u = solve_hat(257);
    assert!(complementarity_check(&u, &Obstacle::Zero).pass);
    let cfg = ClassifierConfig::default();
    let report = classify_all(&u, &Obstacle::Zero, 0, &cfg, &PointSelection::Auto).unwrap();
    assert_eq!(report.free_boundary_nodes, 1);
    assert_eq!(report.count(PointClass::Regular), 1);
    let p = report.nearest(&[0.0, 0.0]).unwrap();
    assert_eq!(p.kappa_snapped, Some(1.5));
    let json: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
    assert_eq!(json["version"], "fbreport/1");
    assert_eq!(json["points"][0]["class"], "regular");
}

#[test]
fn field_file_and_profile_csv() {
    let u = solve_hat(129);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("u.field");
    write_field(&u, BufWriter::new(File::create(&path).unwrap())).unwrap();
    let back = read_field(BufReader::new(File::open(&path).unwrap())).unwrap();
    assert_eq!(back.values(), u.values());

    let radii = [0.1, 0.2, 0.3, 0.4];
    let prof = radial_profile(&back, &[0.0, 0.0], &radii).unwrap();
    for n in prof.frequency() {
        assert!((n - 1.5).abs() < 0.05, "{n}");
    }
    let mut buf = Vec::new();
    write_profile_csv(&mut buf, "field = u.field", &prof, 1.5, None, None).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), format!("# version = {PROFILE_VERSION}"));
    assert_eq!(lines.next().unwrap(), "# field = u.field");
    assert_eq!(lines.next().unwrap(), PROFILE_HEADER);
    assert_eq!(lines.count(), radii.len());
}
