//! Benchmarks live in `benches/`; this crate only shares their inputs.

/// Census codes of increasing size used by the benchmarks.
pub const SIGNATURES: [&str; 4] =
    ["cPcbbbdxm_10", "eLAkbbcdddhwqj_2102", "fLAMcaccdeejsnaxk_20010", "gLLAQbddeeffennmann_011200"];

/// The census sample shipped with the core crate's tests.
pub fn census() -> Vec<String> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/tests/data/census.txt");
    std::fs::read_to_string(path)
        .expect("census fixture")
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(String::from)
        .collect()
}
