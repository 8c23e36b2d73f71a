//! End-to-end runs of the command line through `main_with_args`.

use serde_json::Value;
use tempfile::TempDir;
use wgm_qed::analysis::rabi_splitting_from;
use wgm_qed_cli::{main_with_args, presets};

struct Outcome {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run(args: &[&str]) -> Outcome {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let mut argv = vec!["wgm-qed"];
    argv.extend_from_slice(args);
    let code = main_with_args(argv, &mut out, &mut err);
    Outcome {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

/// Header row and numeric body of a CSV produced by the tool.
fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<Option<f64>>>) {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|c| if c.is_empty() { None } else { Some(c.parse().unwrap()) }).collect())
        .collect();
    (header, rows)
}

fn column(text: &str, name: &str) -> Vec<f64> {
    let (header, rows) = parse_csv(text);
    let k = header.iter().position(|h| h == name).unwrap();
    rows.iter().map(|r| r[k].unwrap()).collect()
}

/// Positions of the `n` deepest local minima of `y(x)`, sorted by position.
fn deepest_minima(x: &[f64], y: &[f64], n: usize) -> Vec<f64> {
    let mut mins: Vec<usize> = (1..y.len() - 1).filter(|&k| y[k] < y[k - 1] && y[k] <= y[k + 1]).collect();
    mins.sort_by(|&i, &j| y[i].total_cmp(&y[j]));
    mins.truncate(n);
    let mut out: Vec<f64> = mins.into_iter().map(|k| x[k]).collect();
    out.sort_by(f64::total_cmp);
    out
}

#[test]
fn empty_config_names_mode() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "empty.cfg", "");
    let o = run(&["--config", &cfg]);
    assert_eq!(o.code, 1);
    assert!(o.stderr.contains("mode"), "{}", o.stderr);
}

#[test]
fn unknown_key_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "typo.cfg", "mode = spectrum\nkappa_tt_ghz = 1.2\n");
    let o = run(&["--config", &cfg]);
    assert_eq!(o.code, 1);
    assert!(o.stderr.contains("kappa_tt_ghz"), "{}", o.stderr);
}

#[test]
fn missing_config_file_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("absent.cfg");
    let o = run(&["spectrum", "--config", missing.to_str().unwrap()]);
    assert_eq!(o.code, 1);
    assert!(o.stderr.contains("absent.cfg"));
}

#[test]
fn zero_threads_names_the_flag() {
    let o = run(&["classical", "--threads", "0"]);
    assert_eq!(o.code, 1);
    assert!(o.stderr.contains("threads"));
}

#[test]
fn list_presets_shows_caption_sets() {
    let o = run(&["list-presets"]);
    assert_eq!(o.code, 0);
    let line = |name: &str| {
        o.stdout
            .lines()
            .find(|l| l.split_whitespace().next() == Some(name))
            .unwrap_or_else(|| panic!("{name} missing"))
            .to_string()
    };
    assert!(line("fig7_anticrossing").contains("{6, i9.6, 1.2, 0.44, 0.16, 2.4}"));
    assert!(line("fig10_beta0_g2").contains("{6, 0, 1.2, 0.44, 0.16, 0.7}"));
    for p in presets::all() {
        line(p.name);
    }
}

#[test]
fn presets_cover_every_figure() {
    let figures: Vec<&str> = presets::all().iter().map(|p| p.figure).collect();
    for fig in ["Fig. 2", "Fig. 4", "Fig. 5", "Fig. 6", "Fig. 7", "Fig. 8", "Fig. 9", "Fig. 10", "Fig. 11", "Fig. 12", "Fig. 13"] {
        assert!(
            figures.iter().any(|f| f.starts_with(fig) && !f[fig.len()..].starts_with(char::is_numeric)),
            "{fig}"
        );
    }
}

#[test]
fn every_preset_runs_on_a_coarse_grid() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "coarse.cfg",
        "delta_lc_points = 5\ndelta_ac_points = 2\ntau_points = 3\nt_points = 3\n",
    );
    for p in presets::all() {
        let o = run(&["--config", &cfg, "--preset", p.name]);
        assert_eq!(o.code, 0, "{}: {}", p.name, o.stderr);
        let (header, rows) = parse_csv(&o.stdout);
        assert!(!rows.is_empty(), "{}", p.name);
        assert!(rows.iter().all(|r| r.len() == header.len()));
    }
}

#[test]
fn spectrum_columns_are_documented_schema() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "s.cfg", "delta_lc_points = 3\n");
    let o = run(&["--config", &cfg, "--preset", "fig4a"]);
    let (header, _) = parse_csv(&o.stdout);
    assert_eq!(header.join(","), "delta_lc_ghz,T,R,T_coh,n_cw,n_ccw,qd_excitation");
    let o = run(&["--config", &cfg, "--preset", "fig12a_cauchy_schwarz"]);
    let (header, _) = parse_csv(&o.stdout);
    assert_eq!(
        header.join(","),
        "omega_l_ghz,q_cw,q_ccw,q_sw1,q_sw2,qx1_cw,qx2_cw,qx1_ccw,qx2_ccw,cs_lhs,cs_rhs"
    );
}

#[test]
fn fig4c_dips_are_split_by_about_twice_root2_g0() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "fine.cfg", "delta_lc_min_ghz = -30\ndelta_lc_max_ghz = 10\ndelta_lc_points = 801\n");
    let o = run(&["--config", &cfg, "--preset", "fig4c", "--threads", "2"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    // the standing mode at +β is not coupled to the dot
    let split = rabi_splitting_from(&column(&o.stdout, "delta_lc_ghz"), &column(&o.stdout, "T"), (-30.0, 5.0)).unwrap();
    assert!((split - 16.97).abs() < 0.5, "split {split} GHz");
}

#[test]
fn fig2a_is_a_classical_doublet() {
    let o = run(&["--preset", "fig2a"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let x = column(&o.stdout, "delta_lc_ghz");
    let t = column(&o.stdout, "T");
    let dips = deepest_minima(&x, &t, 3);
    assert_eq!(dips.len(), 2, "{dips:?}");
    assert!((dips[0] + 9.6).abs() < 0.06 && (dips[1] - 9.6).abs() < 0.06, "{dips:?}");
}

#[test]
fn json_metadata_reruns_to_identical_csv() {
    let dir = TempDir::new().unwrap();
    let json_path = dir.path().join("run.json");
    let cfg = write(&dir, "g2.cfg", "tau_points = 9\ntau_max_ns = 2\n");
    let o = run(&["--config", &cfg, "--preset", "fig10_beta0_g2", "--format", "json", "--out", json_path.to_str().unwrap()]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert!(o.stdout.is_empty());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    assert_eq!(doc["metadata"]["truncation"]["n_max_cw"], 3);
    assert_eq!(doc["columns"], serde_json::json!(["tau_ns", "g2"]));
    let kappa_t = doc["metadata"]["params_rad_per_ns"]["kappa_t"].as_f64().unwrap();
    assert!((kappa_t - 7.539_822_368_615_503).abs() < 1e-12);

    let echoed = write(&dir, "echo.cfg", doc["metadata"]["config_text"].as_str().unwrap());
    let first = run(&["--config", &cfg, "--preset", "fig10_beta0_g2"]);
    let again = run(&["--config", &echoed]);
    assert_eq!(again.code, 0, "{}", again.stderr);
    assert_eq!(first.stdout, again.stdout);

    let rows = doc["rows"].as_array().unwrap();
    let g2 = column(&first.stdout, "g2");
    assert_eq!(rows.len(), g2.len());
    for (r, g) in rows.iter().zip(&g2) {
        assert!((r[1].as_f64().unwrap() - g).abs() <= 1e-12 * g.abs());
    }
}

#[test]
fn output_is_independent_of_thread_count() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "s.cfg", "delta_lc_points = 24\n");
    let one = run(&["--config", &cfg, "--preset", "fig6b", "--threads", "1"]);
    let four = run(&["--config", &cfg, "--preset", "fig6b", "--threads", "4"]);
    assert_eq!(one.code, 0);
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn command_line_overrides_config_file() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "c.cfg", "mode = spectrum\ndelta_lc_points = 2\nformat = json\n");
    let out = dir.path().join("t.csv");
    let o = run(&["classical", "--config", &cfg, "--format", "csv", "--out", out.to_str().unwrap()]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("# mode = classical\n"));
    assert_eq!(parse_csv(&text).0.join(","), "delta_lc_ghz,T,R");
}

#[test]
fn solver_failure_exits_2_and_names_the_grid_point() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "closed.cfg",
        "mode = spectrum\nkappa_t_ghz = 0\nkappa_e_ghz = 0\ngamma_par_ghz = 0\ngamma_p_ghz = 0\np_in = 0\n\
         delta_lc_min_ghz = -1\ndelta_lc_max_ghz = 1\ndelta_lc_points = 3\n",
    );
    let o = run(&["--config", &cfg, "--threads", "1"]);
    assert_eq!(o.code, 2, "{}", o.stderr);
    assert!(o.stderr.contains("grid point"), "{}", o.stderr);
}

#[test]
fn binary_writes_to_stdout() {
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_wgm-qed"))
        .args(["classical", "--preset", "fig2b"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(column(&text, "T").len(), 1201);

    let bad = std::process::Command::new(env!("CARGO_BIN_EXE_wgm-qed"))
        .args(["spectra"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
}
