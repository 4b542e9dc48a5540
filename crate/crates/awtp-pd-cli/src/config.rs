//! Flag and config-file parsing: exact rationals, index sets, message
//! values, and the JSON experiment description.

use std::collections::BTreeSet;
use std::path::Path;

use num_rational::Ratio;
use serde::Deserialize;

/// Parses `"p/q"` fractions or plain decimals into exact rationals, so
/// `⌊ρ·N⌋` never depends on float rounding.
pub fn parse_ratio(s: &str) -> Result<Ratio<u64>, String> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let num: u64 = num.trim().parse().map_err(|_| bad_ratio(s))?;
        let den: u64 = den.trim().parse().map_err(|_| bad_ratio(s))?;
        if den == 0 {
            return Err(format!("zero denominator in {s:?}"));
        }
        return Ok(Ratio::new(num, den));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let whole: u64 = if whole.is_empty() {
            0
        } else {
            whole.parse().map_err(|_| bad_ratio(s))?
        };
        if frac.is_empty() || frac.len() > 18 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad_ratio(s));
        }
        let digits: u64 = frac.parse().map_err(|_| bad_ratio(s))?;
        let scale = 10u64.pow(frac.len() as u32);
        return Ok(Ratio::new(
            whole.checked_mul(scale).ok_or_else(|| bad_ratio(s))? + digits,
            scale,
        ));
    }
    let whole: u64 = s.parse().map_err(|_| bad_ratio(s))?;
    Ok(Ratio::from_integer(whole))
}

fn bad_ratio(s: &str) -> String {
    format!("cannot parse {s:?} as a rational (use p/q or a decimal)")
}

/// Parses `"0,2,5"` into an index set; empty input means the empty set.
pub fn parse_index_set(s: &str) -> Result<BTreeSet<usize>, String> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(BTreeSet::new());
    }
    s.split(',')
        .map(|part| {
            part.trim()
                .parse::<usize>()
                .map_err(|_| format!("invalid index {:?} in set", part.trim()))
        })
        .collect()
}

/// Parses `"3,1,4"` into message element values.
pub fn parse_values(s: &str) -> Result<Vec<u64>, String> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|part| {
            part.trim()
                .parse::<u64>()
                .map_err(|_| format!("invalid element {:?} in message", part.trim()))
        })
        .collect()
}

/// JSON experiment description; any field a flag can set. Flags take
/// precedence over file values.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(rename = "N")]
    pub n: Option<usize>,
    pub u: Option<usize>,
    pub rho_r: Option<String>,
    pub rho_w: Option<String>,
    pub rho: Option<String>,
    pub q: Option<u64>,
    pub ell: Option<usize>,
    pub adversary: Option<String>,
    pub sets: Option<String>,
    pub read_set: Option<String>,
    pub write_set: Option<String>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub budget: Option<u128>,
    pub m1: Option<String>,
    pub m2: Option<String>,
}

pub fn load_file_config(path: &Path) -> Result<FileConfig, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("bad config {}: {e}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratios_parse_exactly() {
        assert_eq!(parse_ratio("1/2").unwrap(), Ratio::new(1, 2));
        assert_eq!(parse_ratio("0.5").unwrap(), Ratio::new(1, 2));
        assert_eq!(parse_ratio("0.25").unwrap(), Ratio::new(1, 4));
        assert_eq!(parse_ratio("1").unwrap(), Ratio::from_integer(1));
        assert_eq!(parse_ratio(".75").unwrap(), Ratio::new(3, 4));
        assert!(parse_ratio("1/0").is_err());
        assert!(parse_ratio("x").is_err());
    }

    #[test]
    fn sets_and_values_parse() {
        assert_eq!(
            parse_index_set("0, 2,5").unwrap(),
            [0usize, 2, 5].into_iter().collect()
        );
        assert!(parse_index_set("").unwrap().is_empty());
        assert!(parse_index_set("a").is_err());
        assert_eq!(parse_values("3,1").unwrap(), vec![3, 1]);
    }
}
