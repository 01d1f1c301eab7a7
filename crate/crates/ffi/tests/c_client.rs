//! Compiles a C program against the generated header and the static
//! library. Skipped when no C compiler is on the path.

use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "chatelet.h"

int main(void) {
    struct ChateletSurface *s = NULL;
    if (chatelet_surface_new(1, -2, -1, 3, &s) != CHATELET_STATUS_OK) return 1;
    struct ChateletDecision d;
    if (chatelet_decide(s, &d) != CHATELET_STATUS_OK) return 2;
    chatelet_surface_free(s);
    if (d.verdict != CHATELET_VERDICT_HASSE_FAILURE) return 3;
    int64_t n, q;
    if (chatelet_tau_loc2(&n, &q) != CHATELET_STATUS_OK || n != 4751 || q != 9216) return 4;
    if (chatelet_surface_new(0, 1, 1, 1, &s) != CHATELET_STATUS_ZERO_COEFFICIENT) return 5;
    if (strlen(chatelet_last_error()) == 0) return 6;
    printf("ok\n");
    return 0;
}
"#;

fn have(cmd: &str) -> bool {
    Command::new(cmd).arg("--version").output().is_ok_and(|o| o.status.success())
}

#[test]
fn c_program_links_and_runs() {
    if !have("cc") {
        eprintln!("no C compiler; skipping");
        return;
    }
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // target/<profile>/deps/<test binary>
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(|p| p.parent()).unwrap().to_path_buf();
    // cargo test refreshes the copy in deps/; the uplifted one can be stale
    let lib = [profile_dir.join("deps"), profile_dir]
        .into_iter()
        .map(|d| d.join("libchatelet_ffi.a"))
        .find(|p| p.exists())
        .unwrap_or_default();
    if !lib.exists() {
        eprintln!("static library not built at {}; skipping", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("client.c");
    std::fs::write(&src, PROGRAM).unwrap();
    let bin = dir.path().join("client");
    let status = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "client exited with {:?}", out.status.code());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok");
}
