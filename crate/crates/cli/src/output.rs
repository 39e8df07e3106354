//! results.csv rows and manifest.txt.

use std::fmt::Write as _;

use sha2::{Digest, Sha256};

pub const CSV_HEADER: &str =
    "#schema=1\nexperiment,eps,n,statistic_name,statistic,threshold,pass,attempts,detail\n";

/// One line of results.csv.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub experiment: String,
    /// `None` for experiments that do not depend on ε.
    pub eps: Option<f64>,
    pub n: usize,
    pub statistic_name: String,
    pub statistic: f64,
    pub threshold: f64,
    pub pass: bool,
    /// Rejection attempts or h-transform integrations; 0 when nothing is rejected.
    pub attempts: u64,
    /// `key=value` pairs separated by `;`.
    pub detail: String,
}

/// Scientific notation with 17 significant digits.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:.16e}")
    }
}

impl ResultRow {
    pub fn to_csv_line(&self) -> String {
        let eps = self.eps.map_or_else(|| "NA".to_string(), format_float);
        format!(
            "{},{},{},{},{},{},{},{},{}\n",
            self.experiment,
            eps,
            self.n,
            self.statistic_name,
            format_float(self.statistic),
            format_float(self.threshold),
            if self.pass { "true" } else { "false" },
            self.attempts,
            self.detail.replace([',', '\n'], ";"),
        )
    }
}

pub fn render_csv(rows: &[ResultRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    for r in rows {
        out.push_str(&r.to_csv_line());
    }
    out
}

/// Hash of `content` the way git names a blob: `sha256("blob <len>\0" + content)`.
pub fn content_hash(content: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(format!("blob {}\0", content.len()).as_bytes());
    hasher.update(content.as_bytes());
    let digest = hasher.finalize();
    let mut hex = String::with_capacity(64);
    for b in digest.iter() {
        let _ = write!(hex, "{b:02x}");
    }
    hex
}

pub fn render_manifest(
    canonical_config: &str,
    seed: u64,
    workers: usize,
    wall_clock_secs: f64,
) -> String {
    format!(
        "seed={seed}\nworkers={workers}\ninput_hash=sha256:{}\nwall_clock_seconds={wall_clock_secs:.3}\n\n[config]\n{canonical_config}",
        content_hash(canonical_config)
    )
}
