use std::path::{Path, PathBuf};
use std::process::Command;

fn compiler() -> Option<String> {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    Command::new(&cc).arg("--version").output().ok()?.status.success().then_some(cc)
}

/// Directory holding `libtncb_ffi.a`: the test binary lives in `<profile>/deps`.
fn lib_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

fn run(exe: &Path, bag: &str) -> (i32, String) {
    let fixtures = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures");
    let out = Command::new(exe)
        .arg(fixtures.join("english.grammar"))
        .arg(fixtures.join(bag))
        .output()
        .unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

#[test]
fn c_program_links_against_the_static_library() {
    let Some(cc) = compiler() else {
        eprintln!("no C compiler found, skipping");
        return;
    };
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let lib = lib_dir();
    assert!(lib.join("libtncb_ffi.a").exists(), "{}", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let status = Command::new(cc)
        .args(["-std=c99", "-Wall", "-Werror", "-o"])
        .arg(&exe)
        .arg(manifest.join("tests/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(lib.join("libtncb_ffi.a"))
        .args(["-lpthread", "-ldl", "-lm"])
        .status()
        .unwrap();
    assert!(status.success());
    assert_eq!(run(&exe, "dog.bag.json"), (0, "the big brown dog barked\nrewrites 4\n".into()));
    assert_eq!(run(&exe, "the_the.bag.json"), (0, "fragment the\nfragment the\nrewrites 0\n".into()));
}
