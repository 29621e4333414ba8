use std::path::{Path, PathBuf};
use std::process::Command;

fn static_lib() -> Option<PathBuf> {
    let tmp = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let target = tmp.parent()?;
    ["debug", "release"].iter().map(|p| target.join(p).join("libslglue_ffi.a")).find(|p| p.exists())
}

#[test]
fn header_compiles_and_links() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let lib = static_lib().expect("static library next to the test binary");
    let exe = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("slglue_smoke");
    let status = Command::new("cc")
        .arg(dir.join("tests/smoke.c"))
        .arg("-I")
        .arg(dir.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("C compiler");
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    assert_eq!(String::from_utf8_lossy(&out.stdout), "ok\n");
}
