//! Replays the fuzz corpus seeds through the fuzz-target assertions, and
//! throws random text at every parser.

use std::fs;
use std::path::PathBuf;

use proptest::prelude::*;

use signorini_core::classifier::ClassifierConfig;
use signorini_core::geometry::io::{field_to_string, parse_field};
use signorini_core::poly::text::{parse_poly, parse_poly_infer, write_poly};
use signorini_core::poly::Obstacle;
use signorini_core::solver::{Boundary, SignoriniProblem};

fn field_dump(text: &str) {
    if let Ok(field) = parse_field(text) {
        let again = parse_field(&field_to_string(&field)).expect("dump reparses");
        assert_eq!(again.values(), field.values());
    }
}

fn poly_text(text: &str) {
    let _ = parse_poly(text, 3);
    if let Ok(p) = parse_poly_infer(text) {
        let back = parse_poly(&write_poly(&p), p.nvars()).expect("written polynomial reparses");
        assert_eq!(back, p);
    }
}

fn problem_config(text: &str) {
    if let Ok(p) = SignoriniProblem::from_config_str(text) {
        let resolved = p.to_config_string();
        let again = SignoriniProblem::from_config_str(&resolved).expect("resolved config reparses");
        assert_eq!(again.to_config_string(), resolved);
    }
}

fn boundary_obstacle(text: &str) {
    for n in [2, 3] {
        if let Ok(b) = Boundary::parse(text, n) {
            let again = Boundary::parse(&b.to_text(), n).expect("boundary text reparses");
            assert_eq!(again.to_text(), b.to_text());
        }
        if let Ok(o) = Obstacle::parse(text, n - 1) {
            let again = Obstacle::parse(&o.to_text(), n - 1).expect("obstacle text reparses");
            assert_eq!(again, o);
        }
    }
}

fn classifier_config(text: &str) {
    if let Ok(cfg) = ClassifierConfig::from_config_str(text) {
        let again = ClassifierConfig::from_config_str(&cfg.to_config_string()).expect("config reparses");
        assert_eq!(again, cfg);
    }
}

fn seeds(target: &str) -> Vec<(PathBuf, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| e.unwrap().path())
        .map(|p| {
            let text = fs::read_to_string(&p).unwrap();
            (p, text)
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn corpus_seeds() {
    let targets: [(&str, fn(&str)); 5] = [
        ("field_dump", field_dump),
        ("poly_text", poly_text),
        ("problem_config", problem_config),
        ("boundary_obstacle", boundary_obstacle),
        ("classifier_config", classifier_config),
    ];
    for (name, check) in targets {
        for (_, text) in seeds(name) {
            check(&text);
        }
    }
}

#[test]
fn seeds_include_valid_inputs() {
    assert!(seeds("field_dump").iter().any(|(_, t)| parse_field(t).is_ok()));
    assert!(seeds("problem_config").iter().any(|(_, t)| SignoriniProblem::from_config_str(t).is_ok()));
    assert!(seeds("problem_config").iter().any(|(_, t)| SignoriniProblem::from_config_str(t).is_err()));
    assert!(seeds("classifier_config").iter().any(|(_, t)| ClassifierConfig::from_config_str(t).is_ok()));
}

const LINE: &str = "[ 0-9a-z/;=+*().#\\-\n]{0,120}";

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn random_text_never_panics(s in LINE) {
        field_dump(&s);
        poly_text(&s);
        problem_config(&s);
        boundary_obstacle(&s);
        classifier_config(&s);
    }

    #[test]
    fn random_config_lines_never_panic(
        keys in prop::collection::vec(prop::sample::select(vec!["n", "m", "omega", "tol", "max_iters", "obstacle", "boundary", "theta", "snap_tol"]), 0..6),
        vals in prop::collection::vec("[0-9a-z .;/()+*-]{0,24}", 6),
    ) {
        let text: String = keys.iter().zip(&vals).map(|(k, v)| format!("{k} = {v}\n")).collect();
        problem_config(&text);
        classifier_config(&text);
    }
}
