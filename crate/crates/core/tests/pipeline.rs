use std::path::PathBuf;

use belltest::workbench::{cmd_facets, cmd_test, cmd_vertices, parse_class_arg, ExitStatus, Format, Mode, RunConfig};
use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn json(artifact: &str) -> Value {
    serde_json::from_str(artifact).unwrap()
}

#[test]
fn singlet_certificate_is_a_listed_facet() {
    let mut test = RunConfig::new(Mode::Test);
    test.data = Some(data("singlet.json"));
    let outcome = cmd_test(&test).unwrap();
    assert_eq!(outcome.status, ExitStatus::Nonlocal);
    let verdict = json(&outcome.artifact);
    assert_eq!(verdict["verdict"], "nonlocal");

    let mut facets = RunConfig::new(Mode::Facets);
    facets.class = Some(parse_class_arg("1,1,2").unwrap());
    let listing = json(&cmd_facets(&facets).unwrap().artifact);
    assert_eq!(listing["verified"], true);
    let found = listing["facets"].as_array().unwrap().iter().any(|f| {
        f["coeffs"] == verdict["certificate"]["coeffs"] && f["bound"] == verdict["certificate"]["bound"]
    });
    assert!(found, "certificate {} not among the facets", verdict["certificate"]["text"]);
}

#[test]
fn vertex_listing_matches_facet_summary() {
    let mut config = RunConfig::new(Mode::Vertices);
    config.class = Some(parse_class_arg("2,2,2").unwrap());
    config.pairs = Some(vec![(0, 0), (0, 1), (1, 1)]);
    let vertices = json(&cmd_vertices(&config).unwrap().artifact);
    config.mode = Mode::Facets;
    let facets = json(&cmd_facets(&config).unwrap().artifact);
    assert_eq!(vertices["vertex_count"], 256);
    assert_eq!(facets["vertex_count"], vertices["vertex_count"]);
    assert_eq!(facets["facet_count"], 48);
    assert_eq!(facets["dimension"], 39);
}

#[test]
fn text_and_json_tell_the_same_story() {
    let mut config = RunConfig::new(Mode::Test);
    config.data = Some(data("singlet.json"));
    let as_json = json(&cmd_test(&config).unwrap().artifact);
    config.format = Format::Text;
    let as_text = cmd_test(&config).unwrap().artifact;
    assert!(as_text.contains("nonlocal"), "{as_text}");
    assert!(as_text.contains(as_json["certificate"]["text"].as_str().unwrap()), "{as_text}");
}
