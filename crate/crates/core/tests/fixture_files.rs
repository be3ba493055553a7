use std::path::PathBuf;

use hfzero::format::{parse, serialize, FormatError};
use hfzero::fixtures;

fn dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn read(name: &str) -> String {
    std::fs::read_to_string(dir().join(format!("{name}.cfk"))).unwrap()
}

#[test]
fn files_match_in_memory_fixtures() {
    for (name, c) in fixtures::all() {
        let doc = parse(&read(name)).unwrap();
        assert_eq!(doc.complexes.len(), 1, "{name}");
        assert_eq!(doc.complexes[0].id, name);
        assert_eq!(doc.complexes[0].complex, c, "{name}");
    }
}

#[test]
fn files_round_trip_byte_identically() {
    for entry in std::fs::read_dir(dir()).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_stem().unwrap().to_str().unwrap().to_string();
        if name.starts_with("bad") {
            continue;
        }
        let text = read(&name);
        assert_eq!(serialize(&parse(&text).unwrap()), text, "{name}");
    }
}

#[test]
fn explicit_flip_equals_derived() {
    let given = parse(&read("trefoil_flip")).unwrap().knot_complexes();
    let derived = fixtures::trefoil().with_flip().unwrap();
    assert_eq!(given[0].flip, derived.flip);
}

#[test]
fn bad_file_is_rejected() {
    match parse(&read("bad_negative_power")) {
        Err(FormatError::Validation { complex, .. }) => assert_eq!(complex, "bad"),
        other => panic!("unexpected {other:?}"),
    }
}
