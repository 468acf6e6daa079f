use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include "temporal_lab.h"

int main(void) {
    TlScenario *sc = NULL;
    if (tl_scenario_preset("tsirelson-qubit", &sc) != TL_STATUS_OK) return 1;
    double c[4];
    if (tl_scenario_correlators(sc, c, 4) != TL_STATUS_OK) return 2;
    tl_scenario_free(sc);
    if (fabs(fabs(c[0] + c[1] + c[2] - c[3]) - 2.0 * sqrt(2.0)) > 1e-9) return 3;
    if (tl_scenario_preset("missing", &sc) != TL_STATUS_UNKNOWN_PRESET) return 4;
    printf("%s\n", tl_last_error());
    return 0;
}
"#;

// The static library sits next to the deps directory holding this test.
fn static_lib() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent()
        .unwrap()
        .parent()
        .unwrap()
        .join("libtemporal_lab_ffi.a")
}

#[test]
fn c_program_links_against_the_static_library() {
    let lib = static_lib();
    assert!(lib.exists(), "{} not built", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    let exe = dir.path().join("main");
    std::fs::write(&src, PROGRAM).unwrap();
    let include = concat!(env!("CARGO_MANIFEST_DIR"), "/include");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let status = Command::new(cc)
        .args(["-std=c99", "-Wall", "-Werror", "-I", include])
        .arg(&src)
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&exe)
        .status()
        .expect("C compiler runs");
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("missing"));
}
