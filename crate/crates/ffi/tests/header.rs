//! The generated header compiles as C and C++, and a C program linked
//! against the static library runs.

use std::path::{Path, PathBuf};
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "fashion_abm.h"

int main(void) {
    double p = 0.0;
    double attrs[9] = {0};
    if (fabm_purchase_probability(attrs, &p) != FABM_STATUS_OK) return 1;
    if (p < 0.744 || p > 0.746) return 2;
    if (fabm_blend(2.0, 0.5, 0.5, 2.0, &p) != FABM_STATUS_OUT_OF_RANGE) return 3;
    if (strlen(fabm_last_error()) == 0) return 4;
    if (fabm_preset_count() != 13) return 5;

    FabmSimulation *sim = NULL;
    if (fabm_simulation_from_config("[engine]\nticks = 3\n", 0, &sim) != FABM_STATUS_OK) return 6;
    if (fabm_simulation_run(sim) != FABM_STATUS_OK) return 7;
    uint64_t tick = 0;
    fabm_simulation_tick(sim, &tick);
    double mean = -1.0;
    fabm_simulation_mean(sim, FABM_TRACKED_WCA, &mean);
    fabm_simulation_free(sim);
    printf("tick=%llu wca=%f\n", (unsigned long long)tick, mean);
    return tick == 3 && mean >= 0.0 && mean <= 1.0 ? 0 : 8;
}
"#;

fn include_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include")
}

fn have(tool: &str) -> bool {
    Command::new(tool).arg("--version").output().is_ok()
}

#[test]
fn header_is_valid_c_and_cpp() {
    let header = include_dir().join("fashion_abm.h");
    assert!(header.is_file(), "header was not generated");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in ["FabmStatus", "FabmSimulation", "fabm_simulation_free", "fabm_last_error"] {
        assert!(text.contains(name), "{name} missing from header");
    }
    if !have("cc") {
        eprintln!("no C compiler; skipping compile check");
        return;
    }
    for (compiler, lang) in [("cc", "c"), ("c++", "c++")] {
        if !have(compiler) {
            continue;
        }
        let status = Command::new(compiler)
            .args(["-fsyntax-only", "-Wall", "-Werror", "-x", lang])
            .arg(&header)
            .status()
            .unwrap();
        assert!(status.success(), "{compiler} rejected the header");
    }
}

/// Static library produced alongside this test binary, if cargo built one.
fn static_lib() -> Option<PathBuf> {
    let exe = std::env::current_exe().ok()?;
    let profile_dir = exe.parent()?.parent()?;
    let lib = profile_dir.join("libfashion_abm_ffi.a");
    lib.is_file().then_some(lib)
}

#[test]
fn c_program_links_and_runs() {
    let Some(lib) = static_lib() else {
        eprintln!("static library not found; skipping link check");
        return;
    };
    if !have("cc") {
        eprintln!("no C compiler; skipping link check");
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    let bin = dir.path().join("main");
    std::fs::write(&src, PROGRAM).unwrap();
    let status = Command::new("cc")
        .arg("-I")
        .arg(include_dir())
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "link failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "program failed: {:?}", out);
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("tick=3 "));
}
