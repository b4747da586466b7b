//! Run manifests: a `#`-prefixed summary block followed by the sampled
//! diagnostics as CSV.

use std::fmt::Write as _;
use std::path::Path;

use super::config::RunConfig;
use crate::diagnostics::{ErrorMeasures, Measure, RunSeries};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct ManifestSummary {
    pub steps: usize,
    pub transforms_per_step: usize,
    pub wall_seconds: f64,
    pub final_measures: Option<ErrorMeasures>,
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

pub fn format_manifest(series: &RunSeries, config: &RunConfig, summary: &ManifestSummary) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# nonsep {}", env!("CARGO_PKG_VERSION"));
    s.push_str("# [config]\n");
    for line in config.to_text().lines() {
        let _ = writeln!(s, "# {line}");
    }
    s.push_str("# [summary]\n");
    let _ = writeln!(s, "# steps = {}", summary.steps);
    let _ = writeln!(s, "# fft_per_step = {}", summary.transforms_per_step);
    let _ = writeln!(s, "# fft_total = {}", series.fft_count);
    let _ = writeln!(s, "# wall_seconds = {:.3}", summary.wall_seconds);
    let _ = writeln!(s, "# norm_drift = {:e}", series.norm_drift());
    let _ = writeln!(s, "# energy_drift = {:e}", series.energy_drift());
    if let Some(m) = &summary.final_measures {
        for k in [Measure::WOverlap, Measure::PsiOverlap, Measure::L2, Measure::MaxDiff] {
            if let Some(v) = m.get(k) {
                let _ = writeln!(s, "# final_{} = {v:e}", k.name());
            }
        }
    }
    s.push_str("t,norm,energy,w_overlap,psi_overlap,l2,max_diff\n");
    let cols: Vec<Option<&[f64]>> = [Measure::WOverlap, Measure::PsiOverlap, Measure::L2, Measure::MaxDiff]
        .iter()
        .map(|m| series.measure(*m))
        .collect();
    for i in 0..series.len() {
        let _ = write!(s, "{:e},{:e},{:e}", series.times[i], series.norm[i], series.energy[i]);
        for c in &cols {
            let _ = write!(s, ",{}", opt(c.and_then(|v| v.get(i).copied())));
        }
        s.push('\n');
    }
    s
}

pub fn write_manifest(path: &Path, series: &RunSeries, config: &RunConfig, summary: &ManifestSummary) -> Result<()> {
    std::fs::write(path, format_manifest(series, config, summary))
        .map_err(|e| Error::io(format!("writing manifest {}", path.display()), e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn summary() -> ManifestSummary {
        ManifestSummary {
            steps: 10,
            transforms_per_step: 10,
            wall_seconds: 0.5,
            final_measures: None,
        }
    }

    #[test]
    fn empty_series_has_header_only() {
        let cfg = RunConfig::with_step(1e-3, 0.0);
        let text = format_manifest(&RunSeries::default(), &cfg, &summary());
        let csv: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(csv, vec!["t,norm,energy,w_overlap,psi_overlap,l2,max_diff"]);
        assert!(text.contains("# fft_per_step = 10"));
        assert!(text.contains("# dt = 0.001"));
    }

    #[test]
    fn populated_series_rows() {
        let cfg = RunConfig::with_step(1e-3, 1.0);
        let mut s = RunSeries::default();
        let m = ErrorMeasures {
            w_overlap: 1e-3,
            psi_overlap: None,
            l2: 2e-3,
            max_diff: 3e-3,
        };
        s.push(0.0, 1.0, 5.0, &m).unwrap();
        s.push(0.5, 1.0, 5.1, &m).unwrap();
        s.fft_count = 42;
        let mut sum = summary();
        sum.final_measures = Some(m);
        let text = format_manifest(&s, &cfg, &sum);
        let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[2].split(',').count(), 7);
        assert!(rows[2].split(',').nth(4).unwrap().is_empty());
        assert!(text.contains("# fft_total = 42"));
        assert!(text.contains("# final_l2 = 2e-3"));
        // identical inputs, identical bytes
        assert_eq!(text, format_manifest(&s, &cfg, &sum));
    }

    #[test]
    fn writes_to_disk() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("manifest.csv");
        write_manifest(&p, &RunSeries::default(), &RunConfig::with_step(1e-3, 0.0), &summary()).unwrap();
        assert!(std::fs::read_to_string(&p).unwrap().starts_with("# nonsep"));
    }
}
