// Compiles a C program against include/stein.h, links it to the static library and runs it.

use std::path::{Path, PathBuf};
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "stein.h"

int main(void) {
    SteinPmf *bin = NULL, *po = NULL;
    if (stein_pmf_binomial(2, 0.5, &bin) != STEIN_STATUS_OK) return 1;
    if (stein_pmf_poisson(1.0, 1e-16, &po) != STEIN_STATUS_OK) return 2;
    double d = 0.0;
    if (stein_pmf_distance(bin, po, STEIN_METRIC_TOTAL_VARIATION, &d) != STEIN_STATUS_OK) return 3;
    stein_pmf_free(bin);
    stein_pmf_free(po);

    SteinBound *b = NULL;
    if (stein_bound_evaluate("tv_uniform_attachment", "n = 100", &b) != STEIN_STATUS_OK) return 4;
    double v, r;
    SteinMetric m;
    stein_bound_value(b, &v, &r, &m);
    stein_bound_free(b);

    SteinVerifyResult res;
    if (stein_verify("coupon", NULL, 42, &res) != STEIN_STATUS_OK || !res.sound) return 5;

    char msg[128];
    if (stein_bound_evaluate("missing", "", &b) != STEIN_STATUS_CONFIG) return 6;
    stein_last_error_message(msg, sizeof msg);
    if (strstr(msg, "unknown theorem") == NULL) return 7;

    printf("%s %.12f %.6f %d\n", stein_version(), d, v, (int)m);
    return 0;
}
"#;

fn target_dir() -> PathBuf {
    // <target>/<profile>/deps/c_header-<hash>
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_and_runs() {
    let lib = target_dir().join("libstein_ffi.a");
    assert!(lib.exists(), "{} missing", lib.display());
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let work = std::env::temp_dir().join(format!("stein-ffi-c-{}", std::process::id()));
    std::fs::create_dir_all(&work).unwrap();
    let src = work.join("main.c");
    let exe = work.join("main");
    std::fs::write(&src, PROGRAM).unwrap();
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let status = Command::new(&cc)
        .args(["-std=c99", "-Wall", "-Werror", "-o"])
        .arg(&exe)
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .status()
        .unwrap_or_else(|e| panic!("cannot run {cc}: {e}"));
    assert!(status.success(), "C compilation failed");
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "C program exited {:?}", out.status.code());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.trim(), format!("{} 0.198180838243 0.112103 0", env!("CARGO_PKG_VERSION")));
    std::fs::remove_dir_all(&work).unwrap();
}
