//! Locks the full event trace of a small network. Regenerate with
//! `UPDATE_GOLDEN=1 cargo test --test golden_trace` after an intended change.

mod common;

use common::{golden_path, render};

#[test]
fn five_node_trace_matches_golden() {
    let path = golden_path();
    let got = render();
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &got).unwrap();
    }
    let want = std::fs::read_to_string(&path).expect("golden file missing; run with UPDATE_GOLDEN=1");
    assert!(got == want, "trace differs from {}", path.display());
}

#[test]
fn trace_is_reproducible_in_process() {
    assert_eq!(render(), render());
}
