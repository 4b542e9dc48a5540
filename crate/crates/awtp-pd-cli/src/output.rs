//! Result rows and their CSV/JSON encodings.
//!
//! The CSV header line is versioned so downstream golden files fail loudly
//! on schema drift. Given one master seed, output bytes are identical
//! across runs; wall-clock timings therefore go to standard error, never
//! into result files.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

pub const VERSION_TAG: &str = "awtp-pd v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// One experiment, one row.
#[derive(Debug, Clone, Serialize)]
pub struct ResultRow {
    pub kind: &'static str,
    pub n: usize,
    pub u: usize,
    pub q: u64,
    pub rho_r: String,
    pub rho_w: String,
    pub rho: String,
    pub ell: usize,
    pub adversary: String,
    pub representation: &'static str,
    pub seed: u64,
    pub trials: Option<u64>,
    pub enumeration_size: Option<String>,
    pub measured_sd: Option<f64>,
    pub sd_exact_numer: Option<String>,
    pub sd_exact_denom: Option<String>,
    pub measured_failure_rate: Option<f64>,
    pub failures: Option<u64>,
    pub bound_sd: Option<f64>,
    pub bound_failure_rate: Option<f64>,
    pub rate: String,
    pub rc_awtp: usize,
    pub rc_pd: usize,
    pub status: String,
}

const RESULT_HEADER: &str = "kind,n,u,q,rho_r,rho_w,rho,ell,adversary,representation,seed,\
trials,enumeration_size,measured_sd,sd_exact_numer,sd_exact_denom,measured_failure_rate,\
failures,bound_sd,bound_failure_rate,rate,rc_awtp,rc_pd,status";

impl ResultRow {
    fn to_csv(&self) -> String {
        [
            self.kind.to_string(),
            self.n.to_string(),
            self.u.to_string(),
            self.q.to_string(),
            self.rho_r.clone(),
            self.rho_w.clone(),
            self.rho.clone(),
            self.ell.to_string(),
            self.adversary.clone(),
            self.representation.to_string(),
            self.seed.to_string(),
            opt(self.trials),
            self.enumeration_size.clone().unwrap_or_default(),
            opt(self.measured_sd),
            self.sd_exact_numer.clone().unwrap_or_default(),
            self.sd_exact_denom.clone().unwrap_or_default(),
            opt(self.measured_failure_rate),
            opt(self.failures),
            opt(self.bound_sd),
            opt(self.bound_failure_rate),
            self.rate.clone(),
            self.rc_awtp.to_string(),
            self.rc_pd.to_string(),
            self.status.clone(),
        ]
        .join(",")
    }
}

/// One evaluated bound, one row.
#[derive(Debug, Clone, Serialize)]
pub struct BoundRow {
    pub bound: String,
    pub params: String,
    pub value: f64,
}

const BOUND_HEADER: &str = "bound,params,value";

impl BoundRow {
    fn to_csv(&self) -> String {
        format!("{},{},{}", self.bound, self.params, self.value)
    }
}

pub fn render_results(rows: &[ResultRow], format: Format) -> String {
    render(rows, RESULT_HEADER, ResultRow::to_csv, format)
}

pub fn render_bounds(rows: &[BoundRow], format: Format) -> String {
    render(rows, BOUND_HEADER, BoundRow::to_csv, format)
}

fn render<T: Serialize>(
    rows: &[T],
    header: &str,
    to_csv: impl Fn(&T) -> String,
    format: Format,
) -> String {
    match format {
        Format::Csv => {
            let mut out = format!("# {VERSION_TAG}\n{header}\n");
            for row in rows {
                out.push_str(&to_csv(row));
                out.push('\n');
            }
            out
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Document<'a, T> {
                version: &'static str,
                rows: &'a [T],
            }
            let mut out = serde_json::to_string_pretty(&Document {
                version: VERSION_TAG,
                rows,
            })
            .expect("rows serialize");
            out.push('\n');
            out
        }
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes to the path, or to standard output when no path is given.
pub fn emit(path: Option<&Path>, content: &str) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, content),
        None => std::io::stdout().write_all(content.as_bytes()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_is_versioned_and_aligned() {
        let row = ResultRow {
            kind: "run",
            n: 4,
            u: 2,
            q: 67,
            rho_r: "1/2".into(),
            rho_w: "1/2".into(),
            rho: "1/2".into(),
            ell: 2,
            adversary: "substitution".into(),
            representation: "native",
            seed: 42,
            trials: Some(1000),
            enumeration_size: None,
            measured_sd: None,
            sd_exact_numer: None,
            sd_exact_denom: None,
            measured_failure_rate: Some(0.5),
            failures: Some(500),
            bound_sd: None,
            bound_failure_rate: Some(8.0 / 67.0),
            rate: "1/4".into(),
            rc_awtp: 1,
            rc_pd: 2,
            status: "ok".into(),
        };
        let text = render_results(&[row], Format::Csv);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# awtp-pd v1");
        assert_eq!(
            lines[1].split(',').count(),
            lines[2].split(',').count(),
            "row column count must match the header"
        );
    }
}
