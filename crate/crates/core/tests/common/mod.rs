//! Fixture loading shared by the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

/// Signatures of the census sample.
pub fn census() -> Vec<String> {
    std::fs::read_to_string(data_path("census.txt"))
        .unwrap()
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(String::from)
        .collect()
}

pub fn tet_count(sig: &str) -> usize {
    sig.split('_').nth(1).unwrap().len()
}

/// Reference data computed by independent software for each census entry.
pub struct OracleRow {
    pub sig: String,
    pub strongly_connected: bool,
    pub ladder_counts: Vec<usize>,
    pub type_counts: [usize; 3],
}

fn int_list(s: &str) -> Vec<usize> {
    s.trim_matches(|c| c == '[' || c == ']')
        .split(',')
        .filter(|x| !x.is_empty())
        .map(|x| x.trim().parse().unwrap())
        .collect()
}

pub fn oracle() -> Vec<OracleRow> {
    std::fs::read_to_string(data_path("census_oracle.txt"))
        .unwrap()
        .lines()
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            let p: Vec<&str> = l.split_whitespace().collect();
            let tc = int_list(p[3]);
            OracleRow {
                sig: p[0].to_string(),
                strongly_connected: p[1] == "S",
                ladder_counts: int_list(p[2]),
                type_counts: [tc[0], tc[1], tc[2]],
            }
        })
        .collect()
}
