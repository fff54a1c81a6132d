use std::path::PathBuf;
use std::process::Command;

// `cargo test` does not emit the staticlib, so build it into a separate
// target directory next to the one running this test.
fn staticlib() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    let target = exe.ancestors().nth(3).unwrap().join("c-smoke");
    let cargo = std::env::var("CARGO").unwrap_or_else(|_| "cargo".into());
    let status = Command::new(cargo)
        .args(["build", "--quiet", "-p", "phimod-ffi", "--target-dir"])
        .arg(&target)
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .status()
        .expect("cargo");
    assert!(status.success(), "building the static library failed");
    target.join("debug/libphimod_ffi.a")
}

#[test]
fn header_compiles_and_links() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let lib = staticlib();
    assert!(lib.exists(), "{}", lib.display());
    let out = std::env::temp_dir().join(format!("phimod-smoke-{}", std::process::id()));
    let status = Command::new(std::env::var("CC").unwrap_or_else(|_| "cc".into()))
        .arg("-std=c11")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(dir.join("include"))
        .arg(dir.join("tests/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .arg("-o")
        .arg(&out)
        .status()
        .expect("C compiler");
    assert!(status.success());
    let run = Command::new(&out).output().unwrap();
    let _ = std::fs::remove_file(&out);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert_eq!(String::from_utf8_lossy(&run.stdout), "ok\n");
}
