use std::path::Path;
use std::process::Command;

const PROBE: &str = r#"
#include "omniscope.h"
int probe(void) {
    OmniscopeFormula *f = NULL;
    OmniscopeVerdict *v = NULL;
    OmniscopeStructure *s = NULL;
    char *world = NULL;
    bool held = false;
    if (omniscope_formula_parse("K p", &f) != OMNISCOPE_STATUS_OK) return 1;
    if (omniscope_decide(f, "kd45-awareness", &v) != OMNISCOPE_STATUS_OK) return 2;
    omniscope_verdict_witness(v, &s, &world);
    omniscope_holds(s, world, f, &held);
    omniscope_string_free(world);
    omniscope_structure_free(s);
    omniscope_verdict_free(v);
    omniscope_formula_free(f);
    return held ? 0 : (int)omniscope_last_error()[0];
}
"#;

fn compiles(compiler: &str, lang: &str) -> Option<bool> {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("probe.c");
    std::fs::write(&src, PROBE).unwrap();
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let status = Command::new(compiler)
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", lang])
        .arg("-I")
        .arg(include)
        .arg(&src)
        .status()
        .ok()?;
    Some(status.success())
}

#[test]
fn header_is_valid_c_and_cpp() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/omniscope.h");
    let text = std::fs::read_to_string(header).unwrap();
    for name in ["omniscope_decide", "omniscope_last_error", "OMNISCOPE_STATUS_SCHEMA_ERROR"] {
        assert!(text.contains(name), "{name} missing from header");
    }
    match compiles("cc", "c") {
        Some(ok) => assert!(ok, "header does not compile as C"),
        None => eprintln!("no C compiler; skipping syntax check"),
    }
    if let Some(ok) = compiles("c++", "c++") {
        assert!(ok, "header does not compile as C++");
    }
}
