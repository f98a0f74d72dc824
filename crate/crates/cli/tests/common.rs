#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn grn_eval(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_grn-eval"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

pub fn ok(dir: &Path, args: &[&str]) -> Output {
    let out = grn_eval(dir, args);
    assert!(
        out.status.success(),
        "grn-eval {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Every file under `root`, relative path to contents.
pub fn snapshot(root: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    fn walk(root: &Path, dir: &Path, out: &mut Vec<(PathBuf, Vec<u8>)>) {
        let mut entries: Vec<_> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
        entries.sort();
        for p in entries {
            if p.is_dir() {
                walk(root, &p, out);
            } else {
                out.push((p.strip_prefix(root).unwrap().to_path_buf(), fs::read(&p).unwrap()));
            }
        }
    }
    let mut out = Vec::new();
    walk(root, root, &mut out);
    out
}

/// A 50-gene synthetic export with train/ and test/ splits under `dir/synth`.
pub fn synthetic_fixture(dir: &Path) -> PathBuf {
    ok(dir, &["synth", "--export-only", "--d", "50", "--seed", "7", "--out", "synth"]);
    dir.join("synth")
}

/// First file that is missing from one snapshot or differs between them.
pub fn first_difference(a: &[(PathBuf, Vec<u8>)], b: &[(PathBuf, Vec<u8>)]) -> Option<String> {
    let names = |s: &[(PathBuf, Vec<u8>)]| s.iter().map(|(p, _)| p.clone()).collect::<Vec<_>>();
    if names(a) != names(b) {
        return Some(format!("file sets differ: {:?} vs {:?}", names(a), names(b)));
    }
    a.iter().zip(b).find(|((_, x), (_, y))| x != y).map(|((p, _), _)| format!("{} differs", p.display()))
}

pub fn assert_same_files(a: &[(PathBuf, Vec<u8>)], b: &[(PathBuf, Vec<u8>)]) {
    if let Some(diff) = first_difference(a, b) {
        panic!("{diff}");
    }
}
