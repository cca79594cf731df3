use std::path::Path;
use std::process::{Command, Output};

fn fiberlab(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fiberlab"))
        .arg("--out")
        .arg(out)
        .args(args)
        .env_remove("FIBERLAB_OUT")
        .output()
        .expect("binary runs")
}

fn ok(out: &Path, args: &[&str]) -> String {
    let o = fiberlab(out, args);
    assert!(o.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout).unwrap()
}

fn records(path: &Path) -> (csv::StringRecord, Vec<csv::StringRecord>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let h = r.headers().unwrap().clone();
    (h, r.records().map(Result::unwrap).collect())
}

fn col(h: &csv::StringRecord, name: &str) -> usize {
    h.iter().position(|x| x == name).unwrap_or_else(|| panic!("no column {name}"))
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn bounds_table() {
    let dir = tempfile::tempdir().unwrap();
    let stdout = ok(dir.path(), &["bounds", "--g", "1", "--d", "1", "--h", "0"]);
    assert!(stdout.contains("164308.9"));
    let (h, rows) = records(&dir.path().join("bounds.csv"));
    let row = rows.iter().find(|r| &r[0] == "torsion_order_bound").unwrap();
    let log10: f64 = row[col(&h, "log10")].parse().unwrap();
    assert!((log10 - 164308.9).abs() < 0.5);
    let v = json(&dir.path().join("bounds.json"));
    assert_eq!(v["schema"], "fiberlab.bounds/1");
    assert_eq!(v["c_rem"], 6720);
}

#[test]
fn trivial_orbit_is_the_input_point() {
    let dir = tempfile::tempdir().unwrap();
    // a point of the line L1 ⊂ S
    ok(dir.path(), &["orbit", "--exact", "--point", "1,2,0,0", "--r1max", "0", "--r2max", "0"]);
    let (_, rows) = records(&dir.path().join("orbit.csv"));
    assert_eq!(rows.len(), 1);
    let c: Vec<f64> = (2..10).step_by(2).map(|i| rows[0][i].parse().unwrap()).collect();
    assert_eq!(c[0] * 2.0, c[1]);
    assert_eq!((c[2], c[3]), (0.0, 0.0));
}

#[test]
fn numeric_orbit_round_trip_through_point() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["orbit", "--params", "0.3,0.7,0", "--r1max", "0", "--r2max", "0"]);
    let (_, rows) = records(&dir.path().join("orbit.csv"));
    assert_eq!(rows.len(), 1);
    let p: Vec<String> = (2..10).step_by(2).map(|i| rows[0][i].to_string()).collect();
    ok(dir.path(), &["orbit", "--point", &p.join(","), "--r1max", "0", "--r2max", "0"]);
    let (_, again) = records(&dir.path().join("orbit.csv"));
    assert_eq!(again.len(), 1);
    for i in 2..10 {
        let (a, b): (f64, f64) = (rows[0][i].parse().unwrap(), again[0][i].parse().unwrap());
        assert!((a - b).abs() < 1e-12, "coordinate {i}: {a} vs {b}");
    }
    // f₁ = z/w = 0.3 and f₂ = x/y = 0.7
    let v: Vec<f64> = (2..10).step_by(2).map(|i| rows[0][i].parse().unwrap()).collect();
    assert!((v[2] / v[3] - 0.3).abs() < 1e-10);
    assert!((v[0] / v[1] - 0.7).abs() < 1e-10);
}

#[test]
fn orbit_grid_shape() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["orbit", "--params", "0.3,0.7,1", "--r1max", "2", "--r2max", "1"]);
    let (h, rows) = records(&dir.path().join("orbit.csv"));
    assert_eq!(rows.len(), 6);
    let pairs: Vec<(String, String)> =
        rows.iter().map(|r| (r[col(&h, "r1")].to_string(), r[col(&h, "r2")].to_string())).collect();
    assert_eq!(pairs[0], ("0".into(), "0".into()));
    assert_eq!(pairs[5], ("2".into(), "1".into()));
}

#[test]
fn search_catalog_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    ok(a.path(), &["--workers", "1", "finite-orbit-search"]);
    ok(b.path(), &["--workers", "3", "finite-orbit-search"]);
    let x = std::fs::read(a.path().join("catalog.json")).unwrap();
    let y = std::fs::read(b.path().join("catalog.json")).unwrap();
    assert_eq!(x, y);
    let v: serde_json::Value = serde_json::from_slice(&x).unwrap();
    assert_eq!(v["schema"], "fiberlab.catalog/1");
    assert!(v["examined"].as_u64().unwrap() > 0);
}

#[test]
fn torsion_values_match_betti_hits() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["torsion-values", "--m", "2"]);
    let (h, tv) = records(&dir.path().join("torsion_values.csv"));
    let roots: Vec<(f64, f64)> = tv
        .iter()
        .map(|r| (r[col(&h, "t_real")].parse().unwrap(), r[col(&h, "t_imag")].parse().unwrap()))
        .collect();
    ok(dir.path(), &["betti-scan", "--qmax", "2", "--half", "1"]);
    let (h, hits) = records(&dir.path().join("betti_scan.csv"));
    let hits: Vec<(f64, f64)> = hits
        .iter()
        .map(|r| (r[col(&h, "t_real")].parse().unwrap(), r[col(&h, "t_imag")].parse().unwrap()))
        .collect();
    let inside = |z: &(f64, f64)| z.0.abs() < 0.99 && z.1.abs() < 0.99;
    let near = |a: &(f64, f64), b: &(f64, f64)| (a.0 - b.0).hypot(a.1 - b.1) < 1e-6;
    let expected: Vec<_> = roots.iter().filter(|z| inside(z)).collect();
    assert!(!expected.is_empty());
    for z in &expected {
        assert!(hits.iter().any(|w| near(z, w)), "torsion value {z:?} not found by the scan");
    }
    for w in hits.iter().filter(|w| inside(w)) {
        assert!(roots.iter().any(|z| near(z, w)), "scan hit {w:?} is not a torsion value");
    }
}

#[test]
fn bezout_check_passes() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["--seed", "1", "bezout-check", "--count", "2"]);
    let v = json(&dir.path().join("bezout.json"));
    let fibers = v["fibers"].as_array().unwrap();
    assert_eq!(fibers.len(), 2);
    assert!(fibers.iter().all(|f| f["pass"] == true));
}

#[test]
fn saved_surface_reloads() {
    let dir = tempfile::tempdir().unwrap();
    let first = ok(dir.path(), &["build-surface"]);
    let file = dir.path().join("surface.txt");
    let other = tempfile::tempdir().unwrap();
    let second = ok(other.path(), &["--surface", file.to_str().unwrap(), "build-surface"]);
    assert_eq!(first.lines().next(), second.lines().next());
    assert_eq!(std::fs::read(&file).unwrap(), std::fs::read(other.path().join("surface.txt")).unwrap());
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "[surface]\nseed = 5\n\n[caps]\nqmax = 3\n").unwrap();
    ok(dir.path(), &["--config", cfg.to_str().unwrap(), "--seed", "9", "bounds"]);
    let saved = std::fs::read_to_string(dir.path().join("run_config.toml")).unwrap();
    assert!(saved.contains("seed = 9"));
    assert!(saved.contains("qmax = 3"));
}

#[test]
fn bad_input_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[caps]\nm_max = 0\n").unwrap();
    let o = fiberlab(dir.path(), &["--config", cfg.to_str().unwrap(), "bounds"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("m_max"));
    let o = fiberlab(dir.path(), &["no-such-command"]);
    assert_eq!(o.status.code(), Some(2));
    // not on the surface
    let o = fiberlab(dir.path(), &["orbit", "--exact", "--point", "1,1,1,2"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn out_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("from-env");
    let o = Command::new(env!("CARGO_BIN_EXE_fiberlab"))
        .args(["bounds", "--g", "1"])
        .env("FIBERLAB_OUT", &target)
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(target.join("bounds.csv").exists());
}
