use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn tdd(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tdd")).arg("--out").arg(dir).args(args).output().unwrap()
}

fn write_config(dir: &TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Rows of a CSV as header-indexed columns.
fn table(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    (header, rows)
}

fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap()
}

#[test]
fn fig4_slice_initial_values() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "slice.ini",
        "[state]\nfamily = ewl\nkind = psi\nr = 2/3\ntheta = pi/2\nphi = 0\n[model]\ng = 1/2\n[grid]\nt_max = 10\n",
    );
    let o = tdd(dir.path(), &["evolve", "--config", &cfg]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (header, rows) = table(&dir.path().join("slice.csv"));
    assert_eq!(rows.len(), 512);
    assert!((rows[0][column(&header, "tdd")] - 2.0 / 3.0).abs() <= 1e-12);
    assert!((rows[0][column(&header, "concurrence")] - 0.5).abs() <= 1e-12);
    assert!(dir.path().join("slice_events.csv").exists());
}

#[test]
fn fig1b_kink_in_events_sidecar() {
    let dir = TempDir::new().unwrap();
    let o = tdd(dir.path(), &["figure", "--preset", "fig1b"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let events = fs::read_to_string(dir.path().join("fig1b_events.csv")).unwrap();
    let kinks: Vec<f64> = events
        .lines()
        .filter(|l| l.starts_with("kink,"))
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(kinks.len(), 1);
    assert!((kinks[0] - 1.1536).abs() <= 3.0 / 511.0);
    let note = fs::read_to_string(dir.path().join("fig1b_provenance.txt")).unwrap();
    assert!(note.contains("c1=c3=0.4, c2=0.8"));

    let o = tdd(dir.path(), &["figure", "--preset", "fig1a"]);
    assert!(o.status.success());
    let events = fs::read_to_string(dir.path().join("fig1a_events.csv")).unwrap();
    assert!(!events.contains("kink,"));
}

#[test]
fn fig7_phi_zero_matches_fig4_r_two_thirds() {
    let dir = TempDir::new().unwrap();
    for id in ["fig4", "fig7"] {
        assert!(tdd(dir.path(), &["figure", "--preset", id]).status.success());
    }
    let (h4, r4) = table(&dir.path().join("fig4.csv"));
    let (h7, r7) = table(&dir.path().join("fig7.csv"));
    let slice4: Vec<&Vec<f64>> = r4.iter().filter(|r| r[column(&h4, "r")] == 2.0 / 3.0).collect();
    let slice7: Vec<&Vec<f64>> = r7.iter().filter(|r| r[column(&h7, "phi")] == 0.0).collect();
    assert_eq!(slice4.len(), 512);
    assert_eq!(slice7.len(), 512);
    for (a, b) in slice4.iter().zip(&slice7) {
        for name in ["t", "tdd", "concurrence"] {
            assert_eq!(a[column(&h4, name)], b[column(&h7, name)], "{name}");
        }
    }
}

#[test]
fn fig5_revivals_away_from_half_pi() {
    let dir = TempDir::new().unwrap();
    assert!(tdd(dir.path(), &["figure", "--preset", "fig5"]).status.success());
    let (h, rows) = table(&dir.path().join("fig5.csv"));
    let (ti, di) = (column(&h, "theta"), column(&h, "tdd"));
    let revivals = |theta: f64| {
        let d: Vec<f64> = rows.iter().filter(|r| r[ti] == theta).map(|r| r[di]).collect();
        d.windows(3).filter(|w| w[1] < w[0] && w[1] < w[2]).count()
    };
    let thetas: Vec<f64> = {
        let mut t: Vec<f64> = rows.iter().map(|r| r[ti]).collect();
        t.dedup();
        t
    };
    assert_eq!(thetas.len(), 101);
    assert!(revivals(thetas[10]) >= 1, "theta = {}", thetas[10]);
    assert!(revivals(thetas[90]) >= 1, "theta = {}", thetas[90]);
}

#[test]
fn sweep_rows_are_complete() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "map.ini",
        "[state]\nfamily = mmm\nc1 = 0.8\nc2 = 0.4\nc3 = 0.2\n[grid]\nt_max = 3\nsamples = 32\n[sweep]\naxis1 = c3 0 1 5\naxis2 = g 0 1 3\n",
    );
    let o = tdd(dir.path(), &["sweep", "--config", &cfg, "--samples", "40"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (header, rows) = table(&dir.path().join("map.csv"));
    assert_eq!(header, ["c3", "g", "t", "tdd", "concurrence", "physical"]);
    assert_eq!(rows.len(), 5 * 3 * 40);
}

#[test]
fn config_errors_exit_1_and_name_the_field() {
    let dir = TempDir::new().unwrap();
    let base = "[state]\nfamily = mmm\nc1 = 0.8\nc2 = 0.4\nc3 = 0.2\n[grid]\nt_max = 3\n";
    let cfg = write_config(&dir, "base.ini", base);
    let o = tdd(dir.path(), &["evolve", "--config", &cfg, "--t-max", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("grid.t_max"), "{}", stderr(&o));

    let cfg = write_config(&dir, "point.ini", &format!("{base}[sweep]\naxis1 = g 0.5 0.5 2\n"));
    let o = tdd(dir.path(), &["sweep", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("sweep.axis1"), "{}", stderr(&o));

    let o = tdd(dir.path(), &["figure", "--preset", "fig9"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("fig1a, fig1b"), "{}", stderr(&o));

    let o = tdd(dir.path(), &["evolve", "--config", "/nonexistent/x.ini"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn physicality_failure_exits_2_after_writing() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "edge.ini",
        "[state]\nfamily = ewl\nr = 1\ntheta = 0\n[model]\ng = 1/2\n[grid]\nt_max = 2\nsamples = 64\n",
    );
    let o = tdd(dir.path(), &["evolve", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("physical = 0"));
    let (header, rows) = table(&dir.path().join("edge.csv"));
    assert_eq!(rows.len(), 64);
    let p = column(&header, "physical");
    assert_eq!(rows[0][p], 1.0);
    assert!(rows.iter().any(|r| r[p] == 0.0));
}

#[test]
fn oracle_on_bell_state() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "bell.ini",
        "[state]\nfamily = x\nrho11 = 0.5\nrho22 = 0\nrho33 = 0\nrho44 = 0.5\nre14 = 0.5\n",
    );
    let o = tdd(dir.path(), &["--seed", "3", "oracle", "--config", &cfg]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("oracle.csv")).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let (closed, gap): (f64, f64) = (row[1].parse().unwrap(), row[3].parse().unwrap());
    assert!((closed - 1.0).abs() <= 1e-12);
    assert!((-1e-6..=5e-3).contains(&gap), "{gap}");
    assert!(text.lines().last().unwrap().starts_with("summary,,,"));
}

#[test]
fn oracle_runs_repeat_byte_for_byte() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    for dir in [&a, &b] {
        let o = tdd(dir.path(), &["--seed", "9", "oracle", "--count", "4", "--restarts", "2"]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let x = fs::read(a.path().join("oracle.csv")).unwrap();
    let y = fs::read(b.path().join("oracle.csv")).unwrap();
    assert_eq!(x, y);
    assert_eq!(String::from_utf8(x).unwrap().lines().count(), 6);
}

#[test]
fn classify_prints_regime_and_times() {
    let dir = TempDir::new().unwrap();
    let o = tdd(dir.path(), &["classify", "0.8", "0.4", "0.4"]);
    assert!(o.status.success());
    let out = String::from_utf8(o.stdout).unwrap();
    assert!(out.contains("regime: SuddenTransition"));
    let t: f64 = out.lines().last().unwrap().trim_start_matches("transition time: ").parse().unwrap();
    assert!((t - 2f64.ln()).abs() < 1e-12);
    let o = tdd(dir.path(), &["classify", "0.4", "-0.8", "0.3", "--t-s", "4"]);
    assert!(String::from_utf8(o.stdout).unwrap().contains("DoubleSuddenChanges"));
}
