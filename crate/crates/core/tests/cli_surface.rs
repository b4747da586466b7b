use std::path::Path;
use std::process::{Command, Output};

use nonsep::io::{read_schedule, read_snapshot};

fn nonsep(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nonsep"))
        .args(args)
        .current_dir(dir)
        .env_remove("NONSEP_OUTPUT_ROOT")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const SMALL: &str = "nx = 64
ntheta = 64
x_extent = 16
theta_extent = 24
x0 = 1
p0 = 0.5
samples = 4
";

fn write_config(dir: &Path, name: &str, extra: &str) -> String {
    std::fs::write(dir.join(name), format!("{SMALL}{extra}")).unwrap();
    name.to_string()
}

fn snapshots(dir: &Path) -> Vec<std::path::PathBuf> {
    let mut v: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "bin"))
        .collect();
    v.sort();
    v
}

#[test]
fn decompose_kerr_monomial() {
    let tmp = tempfile::tempdir().unwrap();
    let o = nonsep(tmp.path(), &["decompose", "x^2 p^2", "--output", "kerr.txt"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("PXP(4,2)  coefficient -1/48"), "{}", stdout(&o));
    let s = read_schedule(&tmp.path().join("kerr.txt")).unwrap();
    assert_eq!(s.items.len(), 1);
}

#[test]
fn decompose_position() {
    let tmp = tempfile::tempdir().unwrap();
    let o = nonsep(tmp.path(), &["decompose", "x"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("PXP(3,1)  coefficient -1/6"), "{}", stdout(&o));
    assert!(tmp.path().join("schedule.txt").exists());
}

#[test]
fn decompose_zero_gives_empty_schedule() {
    let tmp = tempfile::tempdir().unwrap();
    let o = nonsep(tmp.path(), &["decompose", "0"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(read_schedule(&tmp.path().join("schedule.txt")).unwrap().items.is_empty());
}

#[test]
fn decompose_unreachable_is_a_numerical_failure() {
    let tmp = tempfile::tempdir().unwrap();
    let o = nonsep(tmp.path(), &["decompose", "x p + x^2"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("unreachable monomials: x^1 p^1"), "{}", stderr(&o));
    assert!(!tmp.path().join("schedule.txt").exists());
}

#[test]
fn usage_and_parse_errors_are_config_failures() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(nonsep(tmp.path(), &["decompose", "x^^2"]).status.code(), Some(2));
    assert_eq!(nonsep(tmp.path(), &["frobnicate"]).status.code(), Some(2));
    let cfg = write_config(tmp.path(), "bad.conf", "dt = 1e-3\nt_final = 1\nwobble = 3\n");
    let o = nonsep(tmp.path(), &["propagate", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 10"), "{}", stderr(&o));
    let cfg = write_config(tmp.path(), "pow.conf", "dt = 1e-3\nt_final = 1\nnx = 100\n");
    assert_eq!(nonsep(tmp.path(), &["propagate", &cfg]).status.code(), Some(2));
}

#[test]
fn missing_config_is_an_io_failure() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(nonsep(tmp.path(), &["propagate", "nowhere.conf"]).status.code(), Some(4));
}

#[test]
fn zero_duration_propagation() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "zero.conf", "dt = 1e-3\nt_final = 0\noutput = zero\n");
    let o = nonsep(tmp.path(), &["propagate", &cfg]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = tmp.path().join("zero");
    let manifest = std::fs::read_to_string(out.join("manifest.csv")).unwrap();
    let rows: Vec<&str> = manifest.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 2, "{manifest}");
    assert!(manifest.contains("# steps = 0"));
    let snaps = snapshots(&out);
    assert_eq!(snaps.len(), 1);
    let w = read_snapshot(&snaps[0]).unwrap().to_wigner_state().unwrap();
    assert!((w.norm() - 1.0).abs() < 1e-12);
}

#[test]
fn propagate_then_render() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "short.conf",
        "dt = 1e-3\nt_final = 0.02\nsnapshots = 0.01\noutput = short\n",
    );
    let o = nonsep(tmp.path(), &["propagate", &cfg, "--render"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = tmp.path().join("short");
    let snaps = snapshots(&out);
    assert_eq!(snaps.len(), 3, "{snaps:?}");
    for s in &snaps {
        assert!(s.with_extension("png").exists());
    }
    let last = read_snapshot(snaps.last().unwrap()).unwrap();
    assert!((last.header.time - 0.02).abs() < 1e-12);
    assert_eq!(last.header.shape, vec![64, 64]);

    let manifest = std::fs::read_to_string(out.join("manifest.csv")).unwrap();
    let rows: Vec<&str> = manifest.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "t,norm,energy,w_overlap,psi_overlap,l2,max_diff");
    let final_overlap: f64 = rows.last().unwrap().split(',').nth(3).unwrap().parse().unwrap();
    assert!(final_overlap.abs() < 1e-4, "{manifest}");

    let rendered = tmp.path().join("rendered");
    let o = nonsep(
        tmp.path(),
        &["render", snaps[0].to_str().unwrap(), "--output", rendered.to_str().unwrap()],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(std::fs::read_dir(&rendered).unwrap().count(), 1);
}

#[test]
fn propagation_is_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "r.conf", "dt = 1e-3\nt_final = 0.01\npicture = schrodinger\n");
    for out in ["a", "b"] {
        let o = nonsep(tmp.path(), &["propagate", &cfg, "--output", out]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let a = snapshots(&tmp.path().join("a"));
    let b = snapshots(&tmp.path().join("b"));
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(std::fs::read(x).unwrap(), std::fs::read(y).unwrap());
    }
}

#[test]
fn boundary_alarm_exit_code() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "edge.conf", "dt = 1e-3\nt_final = 0.01\n");
    let o = nonsep(tmp.path(), &["propagate", &cfg, "--output", "edge"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    // a state sitting on the edge of the box
    std::fs::write(
        tmp.path().join("edge.conf"),
        SMALL.replace("x0 = 1", "x0 = 7.5") + "dt = 1e-3\nt_final = 0.01\n",
    )
    .unwrap();
    let o = nonsep(tmp.path(), &["propagate", &cfg, "--output", "edge2"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn corrupt_snapshot_render_is_an_io_failure() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(tmp.path().join("junk.bin"), b"NONSEPSN\x01\x00").unwrap();
    let o = nonsep(tmp.path(), &["render", "junk.bin"]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
    std::fs::write(tmp.path().join("text.bin"), b"not a snapshot at all").unwrap();
    assert_eq!(nonsep(tmp.path(), &["render", "text.bin"]).status.code(), Some(4));
}

#[test]
fn scaling_sweep_writes_fits() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "sweep.conf",
        "dt = 1e-3\nt_final = 0.1\npicture = schrodinger\noutput = sweep\n",
    );
    let o = nonsep(tmp.path(), &["sweep", &cfg, "--dts", "1e-3,2e-3,4e-3,8e-3", "--jobs", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = tmp.path().join("sweep");
    let table = std::fs::read_to_string(out.join("scaling.csv")).unwrap();
    assert_eq!(table.lines().filter(|l| !l.starts_with('#')).count(), 5, "{table}");
    let fits = std::fs::read_to_string(out.join("fits.csv")).unwrap();
    assert!(fits.contains("psi_overlap"), "{fits}");
}
