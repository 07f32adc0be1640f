//! Census files: one signature per line, `#` comments and blank lines ignored.
//! Anything after the first whitespace-separated token is ignored, so files
//! carrying extra columns can be fed in directly.

use std::path::Path;

pub fn parse_census(text: &str) -> Vec<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .filter_map(|l| l.split_whitespace().next())
        .map(String::from)
        .collect()
}

pub fn read_census(path: &Path) -> std::io::Result<Vec<String>> {
    Ok(parse_census(&std::fs::read_to_string(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_blanks_and_extra_columns() {
        let text = "# header\n\ncPcbbbdxm_10\n  # indented comment\neLAkbbcdddhwqj_2102 S [2]\n";
        assert_eq!(parse_census(text), vec!["cPcbbbdxm_10", "eLAkbbcdddhwqj_2102"]);
        assert!(parse_census("").is_empty());
    }
}
