use std::path::PathBuf;

use birkhoff::io::{load_spec, parse_spec, spec_to_json};
use birkhoff::problems::{builtin, NAMES};

fn specs_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../specs")
}

#[test]
fn shipped_files_match_builtins() {
    for name in NAMES {
        let from_file = load_spec(specs_dir().join(format!("{name}.json"))).unwrap();
        assert_eq!(from_file, builtin(name).unwrap(), "{name}");
    }
}

#[test]
fn shipped_files_round_trip() {
    for name in NAMES {
        let a = load_spec(specs_dir().join(format!("{name}.json"))).unwrap();
        let b = parse_spec(&spec_to_json(&a).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn schema_lists_every_kind() {
    let text = std::fs::read_to_string(specs_dir().join("schema.json")).unwrap();
    let schema: serde_json::Value = serde_json::from_str(&text).unwrap();
    let kinds: Vec<&str> = schema["oneOf"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v["properties"]["kind"]["const"].as_str().unwrap())
        .collect();
    assert_eq!(kinds, ["nth_order", "system", "nth_order_param"]);
    for name in NAMES {
        assert!(kinds.contains(&builtin(name).unwrap().kind()));
    }
}
