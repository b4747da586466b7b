//! `key = value` run configuration.
//!
//! ```text
//! # amplitude-3 coherent state, one revival period
//! dt = 1e-4
//! t_final = pi
//! snapshots = pi/3, 2pi/3, pi
//! scheme = u9
//! output = runs/revival
//! ```
//!
//! `dt` and `t_final` are required; every other key has a default. Reals
//! accept multiples and fractions of `pi` (`pi`, `2pi/3`, `-pi/2`).

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::grid::{make_phase_grid, LineGrid, PhaseGrid};
use crate::moyal::{parse_polynomial, PolynomialXP};
use crate::schemes::{default_t2, KerrOptions, OuterSplitting, SchemeKind};

/// Environment variable that relocates relative output directories.
pub const OUTPUT_ROOT_ENV: &str = "NONSEP_OUTPUT_ROOT";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Picture {
    Wigner,
    Schrodinger,
}

impl Picture {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "wigner" => Ok(Picture::Wigner),
            "schrodinger" | "schroedinger" | "schrödinger" => Ok(Picture::Schrodinger),
            other => Err(Error::InvalidParameter(format!(
                "unknown picture '{other}' (expected wigner or schrodinger)"
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Picture::Wigner => "wigner",
            Picture::Schrodinger => "schrodinger",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub nx: usize,
    pub ntheta: usize,
    pub x_extent: f64,
    pub theta_extent: f64,
    pub hbar: f64,
    pub x0: f64,
    pub p0: f64,
    pub scheme: SchemeKind,
    pub t2: f64,
    pub splitting: OuterSplitting,
    pub dt: f64,
    pub t_final: f64,
    pub snapshots: Vec<f64>,
    pub output: PathBuf,
    pub picture: Picture,
    pub classical_limit: bool,
    /// Replaces the Kerr Hamiltonian; propagated through the generic schedule.
    pub hamiltonian: Option<String>,
    /// Step sizes for `scaling`.
    pub dts: Vec<f64>,
    /// Diagnostic samples along a run.
    pub samples: usize,
    /// Write PNG heatmaps next to snapshots.
    pub render: bool,
}

impl RunConfig {
    /// Defaults for everything but the step and the duration.
    pub fn with_step(dt: f64, t_final: f64) -> Self {
        let x0 = 3.0 / 2f64.sqrt();
        RunConfig {
            nx: 256,
            ntheta: 256,
            x_extent: 20.0,
            theta_extent: 36.0,
            hbar: 1.0,
            x0,
            p0: x0,
            scheme: SchemeKind::U9,
            t2: default_t2(),
            splitting: OuterSplitting::Symmetric,
            dt,
            t_final,
            snapshots: Vec::new(),
            output: PathBuf::from("nonsep-out"),
            picture: Picture::Wigner,
            classical_limit: false,
            hamiltonian: None,
            dts: vec![1e-3, 2e-3, 4e-3, 8e-3],
            samples: 40,
            render: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config { line: 0, message: m });
        for (name, n) in [("nx", self.nx), ("ntheta", self.ntheta)] {
            if n < 2 || !n.is_power_of_two() {
                return bad(format!("{name} = {n} must be a power of two >= 2"));
            }
        }
        for (name, v) in [
            ("x_extent", self.x_extent),
            ("theta_extent", self.theta_extent),
            ("hbar", self.hbar),
            ("dt", self.dt),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} = {v} must be positive"));
            }
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return bad(format!("t_final = {} must be non-negative", self.t_final));
        }
        if !(self.x0.is_finite() && self.p0.is_finite()) {
            return bad("x0 and p0 must be finite".into());
        }
        if !(self.t2.is_finite() && self.t2 != 0.0) {
            return bad(format!("t2 = {} must be finite and nonzero", self.t2));
        }
        let slack = 1e-9 * self.t_final.max(1.0);
        for &s in &self.snapshots {
            if !(s >= 0.0 && s <= self.t_final + slack) {
                return bad(format!("snapshot time {s} outside [0, t_final = {}]", self.t_final));
            }
        }
        if self.snapshots.windows(2).any(|w| w[1] <= w[0]) {
            return bad("snapshot times must be strictly increasing".into());
        }
        if self.dts.iter().any(|d| !(*d > 0.0 && d.is_finite())) {
            return bad("every entry of dts must be positive".into());
        }
        if self.samples == 0 {
            return bad("samples must be at least 1".into());
        }
        if self.classical_limit && self.picture == Picture::Schrodinger {
            return bad("classical_limit needs picture = wigner".into());
        }
        if self.scheme == SchemeKind::Strang && self.hamiltonian.is_none() {
            return bad("the Kerr Hamiltonian needs scheme u9 or u7".into());
        }
        if let Some(h) = &self.hamiltonian {
            parse_polynomial(h).map_err(|e| Error::Config {
                line: 0,
                message: format!("hamiltonian: {e}"),
            })?;
        }
        Ok(())
    }

    pub fn kerr_options(&self) -> KerrOptions {
        KerrOptions {
            kind: self.scheme,
            t2: self.t2,
            splitting: self.splitting,
            classical: self.classical_limit,
        }
    }

    pub fn phase_grid(&self) -> Result<PhaseGrid> {
        make_phase_grid(self.nx, self.ntheta, self.x_extent, self.theta_extent, self.hbar)
    }

    /// Line grid sharing the phase grid's x axis.
    pub fn line_grid(&self) -> Result<LineGrid> {
        LineGrid::centered(self.nx, self.x_extent, self.hbar)
    }

    pub fn hamiltonian_symbol(&self) -> Result<Option<PolynomialXP>> {
        self.hamiltonian.as_deref().map(parse_polynomial).transpose()
    }

    /// `output`, placed under `$NONSEP_OUTPUT_ROOT` when that is set and the
    /// path is relative.
    pub fn output_dir(&self) -> PathBuf {
        resolve_output(&self.output)
    }

    /// Canonical text that [`parse_config`] reads back to an equal config.
    pub fn to_text(&self) -> String {
        let list = |v: &[f64]| v.iter().map(|d| format!("{d:?}")).collect::<Vec<_>>().join(", ");
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            s.push_str(k);
            s.push_str(" = ");
            s.push_str(&v);
            s.push('\n');
        };
        kv("nx", self.nx.to_string());
        kv("ntheta", self.ntheta.to_string());
        kv("x_extent", format!("{:?}", self.x_extent));
        kv("theta_extent", format!("{:?}", self.theta_extent));
        kv("hbar", format!("{:?}", self.hbar));
        kv("x0", format!("{:?}", self.x0));
        kv("p0", format!("{:?}", self.p0));
        kv("scheme", self.scheme.name().into());
        kv("t2", format!("{:?}", self.t2));
        kv("splitting", self.splitting.name().into());
        kv("dt", format!("{:?}", self.dt));
        kv("t_final", format!("{:?}", self.t_final));
        kv("snapshots", list(&self.snapshots));
        kv("output", self.output.display().to_string());
        kv("picture", self.picture.name().into());
        kv("classical_limit", self.classical_limit.to_string());
        if let Some(h) = &self.hamiltonian {
            kv("hamiltonian", h.clone());
        }
        kv("dts", list(&self.dts));
        kv("samples", self.samples.to_string());
        kv("render", self.render.to_string());
        s
    }
}

pub fn resolve_output(path: &Path) -> PathBuf {
    match std::env::var_os(OUTPUT_ROOT_ENV) {
        Some(root) if path.is_relative() && !root.is_empty() => PathBuf::from(root).join(path),
        _ => path.to_path_buf(),
    }
}

/// Reads a real, allowing `pi` with an optional integer or decimal multiplier
/// and divisor: `pi`, `-pi`, `2pi/3`, `2*pi/3`, `0.5*pi`.
pub fn parse_real(s: &str) -> Option<f64> {
    let s = s.trim();
    if let Ok(v) = s.parse::<f64>() {
        return Some(v);
    }
    let lower = s.to_ascii_lowercase();
    let (pre, post) = lower.split_once("pi")?;
    let pre = pre.trim().trim_end_matches('*').trim();
    let mult = match pre {
        "" => 1.0,
        "-" => -1.0,
        "+" => 1.0,
        other => other.parse::<f64>().ok()?,
    };
    let post = post.trim();
    let div = if post.is_empty() {
        1.0
    } else {
        let d = post.strip_prefix('/')?.trim().parse::<f64>().ok()?;
        if d == 0.0 {
            return None;
        }
        d
    };
    Some(mult * PI / div)
}

fn parse_bool(s: &str) -> Option<bool> {
    match s.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Some(true),
        "false" | "no" | "off" | "0" => Some(false),
        _ => None,
    }
}

fn parse_list(s: &str) -> Option<Vec<f64>> {
    if s.trim().is_empty() {
        return Some(Vec::new());
    }
    s.split(',').map(parse_real).collect()
}

const KEYS: &[&str] = &[
    "nx",
    "ntheta",
    "x_extent",
    "theta_extent",
    "hbar",
    "x0",
    "p0",
    "scheme",
    "t2",
    "splitting",
    "dt",
    "t_final",
    "snapshots",
    "output",
    "picture",
    "classical_limit",
    "hamiltonian",
    "dts",
    "samples",
    "render",
];

/// Parses and validates a configuration file body.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut cfg = RunConfig::with_step(f64::NAN, f64::NAN);
    let mut seen = BTreeSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let cerr = |message: String| Error::Config { line, message };
        let (key, value) = body
            .split_once('=')
            .ok_or_else(|| cerr(format!("expected 'key = value', got '{body}'")))?;
        let key = key.trim();
        let value = value.trim();
        if !KEYS.contains(&key) {
            return Err(cerr(format!("unknown key '{key}'")));
        }
        if !seen.insert(key.to_string()) {
            return Err(cerr(format!("duplicate key '{key}'")));
        }
        let real = || parse_real(value).ok_or_else(|| cerr(format!("{key}: '{value}' is not a real number")));
        let count = || {
            value
                .parse::<usize>()
                .map_err(|_| cerr(format!("{key}: '{value}' is not a non-negative integer")))
        };
        let flag = || parse_bool(value).ok_or_else(|| cerr(format!("{key}: '{value}' is not true or false")));
        let list = || parse_list(value).ok_or_else(|| cerr(format!("{key}: '{value}' is not a list of reals")));
        let named = |e: Error| cerr(format!("{key}: {e}"));
        match key {
            "nx" => cfg.nx = count()?,
            "ntheta" => cfg.ntheta = count()?,
            "x_extent" => cfg.x_extent = real()?,
            "theta_extent" => cfg.theta_extent = real()?,
            "hbar" => cfg.hbar = real()?,
            "x0" => cfg.x0 = real()?,
            "p0" => cfg.p0 = real()?,
            "scheme" => cfg.scheme = SchemeKind::parse(value).map_err(named)?,
            "t2" => cfg.t2 = real()?,
            "splitting" => cfg.splitting = OuterSplitting::parse(value).map_err(named)?,
            "dt" => cfg.dt = real()?,
            "t_final" => cfg.t_final = real()?,
            "snapshots" => cfg.snapshots = list()?,
            "output" => {
                if value.is_empty() {
                    return Err(cerr("output: empty path".into()));
                }
                cfg.output = PathBuf::from(value)
            }
            "picture" => cfg.picture = Picture::parse(value).map_err(named)?,
            "classical_limit" => cfg.classical_limit = flag()?,
            "hamiltonian" => cfg.hamiltonian = Some(value.to_string()),
            "dts" => cfg.dts = list()?,
            "samples" => cfg.samples = count()?,
            "render" => cfg.render = flag()?,
            _ => unreachable!("key list and match arms agree"),
        }
    }
    for required in ["dt", "t_final"] {
        if !seen.contains(required) {
            return Err(Error::Config {
                line: 0,
                message: format!("missing required key '{required}'"),
            });
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn read_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::io(format!("reading config {}", path.display()), e))?;
    parse_config(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file_takes_defaults() {
        let c = parse_config("dt = 1e-3\nt_final = 0.5\n").unwrap();
        assert_eq!(c.scheme, SchemeKind::U9);
        assert!((c.t2 + 6f64.cbrt()).abs() < 1e-15);
        assert_eq!(c.picture, Picture::Wigner);
        assert_eq!((c.nx, c.ntheta), (256, 256));
        assert!(c.snapshots.is_empty());
    }

    #[test]
    fn comments_pi_and_lists() {
        let text = "# header\n dt = 1e-4  # trailing\nt_final = pi\nsnapshots = pi/3, 2pi/3, pi\n\nscheme = u7\n";
        let c = parse_config(text).unwrap();
        assert_eq!(c.scheme, SchemeKind::U7);
        assert_eq!(c.snapshots.len(), 3);
        assert!((c.snapshots[1] - 2.0 * PI / 3.0).abs() < 1e-15);
        assert!((c.snapshots[0] - 1.047).abs() < 1e-3);
    }

    #[test]
    fn u7_enables_compensation() {
        let c = parse_config("dt = 1e-3\nt_final = 1\nscheme = u7\n").unwrap();
        let s = crate::schemes::scheme_for(c.scheme, c.t2).unwrap();
        assert!(s.compensation.is_some());
    }

    #[test]
    fn rejections() {
        let cases = [
            ("dt = -0.001\nt_final = 1\n", 0),
            ("dt = 0\nt_final = 1\n", 0),
            ("t_final = 1\n", 0),
            ("dt = 1e-3\nt_final = 1\ncolour = red\n", 3),
            ("dt = 1e-3\nt_final = 1\nnx = many\n", 3),
            ("dt = 1e-3\ndt = 2e-3\nt_final = 1\n", 2),
            ("dt = 1e-3\nt_final = 1\nsnapshots = 2\n", 0),
            ("dt = 1e-3\nt_final = 1\nnx = 100\n", 0),
            ("dt = 1e-3\nt_final = 1\nscheme = rk4\n", 3),
            ("dt = 1e-3\nt_final = 1\nbogus line\n", 3),
            ("dt = 1e-3\nt_final = 1\nt2 = 0\n", 0),
            ("dt = 1e-3\nt_final = 1\nclassical_limit = yes\npicture = schrodinger\n", 0),
        ];
        for (text, want) in cases {
            match parse_config(text) {
                Err(Error::Config { line, .. }) => assert_eq!(line, want, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn canonical_text_round_trips() {
        let mut c = RunConfig::with_step(2.5e-4, PI);
        c.snapshots = vec![PI / 3.0, PI];
        c.hamiltonian = Some("p^2/2 + x^2/2".into());
        c.classical_limit = true;
        let back = parse_config(&c.to_text()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn real_forms() {
        assert_eq!(parse_real("2pi/3"), Some(2.0 * PI / 3.0));
        assert_eq!(parse_real("-pi"), Some(-PI));
        assert_eq!(parse_real("0.5*pi"), Some(0.5 * PI));
        assert_eq!(parse_real("1e-3"), Some(1e-3));
        assert_eq!(parse_real("pi/0"), None);
        assert_eq!(parse_real("pie"), None);
    }

    #[test]
    fn output_root_override() {
        let c = RunConfig::with_step(1e-3, 1.0);
        // only this test touches the variable
        std::env::set_var(OUTPUT_ROOT_ENV, "/tmp/nonsep-root");
        assert_eq!(c.output_dir(), PathBuf::from("/tmp/nonsep-root/nonsep-out"));
        let mut abs = c.clone();
        abs.output = PathBuf::from("/abs/dir");
        assert_eq!(abs.output_dir(), PathBuf::from("/abs/dir"));
        std::env::remove_var(OUTPUT_ROOT_ENV);
        assert_eq!(c.output_dir(), PathBuf::from("nonsep-out"));
    }
}
