use std::f64::consts::FRAC_PI_3;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use ratchet_cli::figure::{reproduce_figure, FigureId};
use ratchet_core::pendulum::ScalingCurve;
use tempfile::TempDir;

fn ratchet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ratchet"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

/// Data rows (header and `#` lines dropped), split on commas.
fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn header(text: &str) -> String {
    text.lines()
        .find(|l| !l.starts_with('#'))
        .unwrap()
        .to_string()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn resonant_run_matches_closed_form() {
    let dir = TempDir::new().unwrap();
    let gamma = -FRAC_PI_3;
    let cfg = write_config(
        dir.path(),
        "res.toml",
        &format!("model = \"quantum\"\n[params]\nphi_d = 2.6\nkicks = 12\ngamma = {gamma:?}\n"),
    );
    let out_dir = dir.path().join("out");
    let out = ratchet(&["run", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));

    let text = fs::read_to_string(out_dir.join("current.csv")).unwrap();
    assert_eq!(header(&text), "kick,mean_p,current,energy");
    let last = rows(&text).pop().unwrap();
    assert_eq!(last[0], "12");
    let current: f64 = last[2].parse().unwrap();
    let want = -(2.6 * 12.0 / 2.0) * gamma.sin();
    assert!((current - want).abs() < 1e-6, "{current} vs {want}");

    let dist = fs::read_to_string(out_dir.join("distribution.csv")).unwrap();
    assert_eq!(header(&dist), "kick,n,beta,probability");
    let total: f64 = rows(&dist)
        .iter()
        .filter(|r| r[0] == "12")
        .map(|r| r[3].parse::<f64>().unwrap())
        .sum();
    assert!((total - 1.0).abs() < 1e-10);
    assert!(out_dir.join("metadata.toml").exists());
}

#[test]
fn eps_classical_at_resonance_is_rejected_with_guidance() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.toml",
        "model = \"eps_classical\"\n[params]\nphi_d = 2.6\nkicks = 5\neps = 0.0\n",
    );
    let out = ratchet(&[
        "run",
        "--config",
        &cfg,
        "--out",
        dir.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(
        stderr(&out).contains("use the quantum model"),
        "{}",
        stderr(&out)
    );
}

#[test]
fn invalid_config_names_the_field() {
    let dir = TempDir::new().unwrap();
    let cases = [
        (
            "model = \"quantum\"\n[params]\nphi_d = 2.6\nkicks = 5\nbeta = 1.2\n",
            "params.beta",
        ),
        (
            "model = \"quantum\"\n[params]\nphi_d = 2.6\nkicks = 5\ngama = 1.0\n",
            "gama",
        ),
        ("model = \"quantum\"\n[params]\nkicks = 5\n", "params.phi_d"),
    ];
    for (i, (text, field)) in cases.iter().enumerate() {
        let cfg = write_config(dir.path(), &format!("bad{i}.toml"), text);
        let out = ratchet(&[
            "run",
            "--config",
            &cfg,
            "--out",
            dir.path().join("o").to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(1), "{text}");
        assert!(stderr(&out).contains(field), "{field}: {}", stderr(&out));
    }
    assert!(!dir.path().join("o").exists());
}

#[test]
fn reruns_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let configs = [
        "model = \"eps_classical\"\nseed = 42\n[params]\nphi_d = 2.6\nkicks = 10\neps = 0.035\n\
         [numerics]\nmode = \"sampled\"\nn_points = 4000\n",
        "model = \"quantum\"\n[params]\nphi_d = 1.3\nkicks = 20\neps = 0.04\ngamma = -1.0\n",
        "model = \"beta_spread\"\n[params]\nphi_d = 1.3\nkicks = 8\n[spread]\ndelta_beta = 0.02\nn_beta = 8\n",
        "model = \"pendulum\"\n[params]\nphi_d = 3.0\nkicks = 8\neps = 0.1\n",
    ];
    for (i, text) in configs.iter().enumerate() {
        let cfg = write_config(dir.path(), &format!("c{i}.toml"), text);
        let a = dir.path().join(format!("a{i}"));
        let b = dir.path().join(format!("b{i}"));
        assert!(
            ratchet(&["run", "--config", &cfg, "--out", a.to_str().unwrap()])
                .status
                .success()
        );
        let single = [
            "--threads",
            "1",
            "run",
            "--config",
            &cfg,
            "--out",
            b.to_str().unwrap(),
        ];
        assert!(ratchet(&single).status.success());
        for entry in fs::read_dir(&a).unwrap() {
            let name = entry.unwrap().file_name();
            assert_eq!(
                fs::read(a.join(&name)).unwrap(),
                fs::read(b.join(&name)).unwrap(),
                "{text}: {name:?} differs"
            );
        }
    }
}

#[test]
fn seed_flag_changes_sampled_runs() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "s.toml",
        "model = \"eps_classical\"\n[params]\nphi_d = 2.6\nkicks = 4\neps = 0.1\n\
         [numerics]\nmode = \"sampled\"\nn_points = 500\n",
    );
    let read = |seed: &str| {
        let out = dir.path().join(format!("s{seed}"));
        assert!(ratchet(&[
            "run",
            "--config",
            &cfg,
            "--seed",
            seed,
            "--out",
            out.to_str().unwrap()
        ])
        .status
        .success());
        fs::read_to_string(out.join("current.csv")).unwrap()
    };
    let (a, b) = (read("1"), read("2"));
    assert_ne!(rows(&a), rows(&b));
    assert!(a.contains("# seed=1"));
}

#[test]
fn metadata_record_reruns_the_same_output() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "m.toml",
        "model = \"quantum\"\n[params]\nphi_d = 1.8\nkicks = 6\noffset_us = -1.2\n",
    );
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert!(
        ratchet(&["run", "--config", &cfg, "--out", a.to_str().unwrap()])
            .status
            .success()
    );
    let record = a.join("metadata.toml");
    assert!(ratchet(&[
        "run",
        "--config",
        record.to_str().unwrap(),
        "--out",
        b.to_str().unwrap()
    ])
    .status
    .success());
    assert_eq!(
        fs::read(a.join("current.csv")).unwrap(),
        fs::read(b.join("current.csv")).unwrap()
    );
}

#[test]
fn sweep_is_written_in_axis_order_and_records_failures() {
    let dir = TempDir::new().unwrap();
    // descending grid through resonance: the eps = 0 point fails, the rest run
    let cfg = write_config(
        dir.path(),
        "sw.toml",
        "model = \"eps_classical\"\n[params]\nphi_d = 2.6\nkicks = 3\n\
         [sweep]\naxis = \"eps\"\nfrom = 0.1\nto = -0.1\nstep = -0.02\n\
         [numerics]\nn_points = 256\n",
    );
    let out_dir = dir.path().join("sw");
    let out = ratchet(&[
        "sweep",
        "--config",
        &cfg,
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stderr(&out).contains("1 of 11 sweep points failed"));

    let text = fs::read_to_string(out_dir.join("sweep.csv")).unwrap();
    assert_eq!(header(&text), "axis_value,kick,current,scaled_current,x");
    let values: Vec<f64> = rows(&text)
        .iter()
        .filter(|r| r[1] == "0")
        .map(|r| r[0].parse().unwrap())
        .collect();
    assert_eq!(values.len(), 10);
    assert!(values.windows(2).all(|w| w[1] < w[0]), "{values:?}");
    assert!(!values.contains(&0.0));

    let failures = rows(&fs::read_to_string(out_dir.join("failures.csv")).unwrap());
    assert_eq!(failures.len(), 1);
    assert_eq!(failures[0][0], "0");
    assert!(failures[0][1].contains("resonance"));
}

#[test]
fn quantum_sweep_writes_heatmap() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "h.toml",
        "model = \"quantum\"\n[params]\nphi_d = 2.6\nkicks = 10\n\
         [sweep]\naxis = \"offset_us\"\nvalues = [-1.0, 0.0, 1.0]\n",
    );
    let out_dir = dir.path().join("h");
    assert!(ratchet(&[
        "sweep",
        "--config",
        &cfg,
        "--out",
        out_dir.to_str().unwrap()
    ])
    .status
    .success());
    let heat = fs::read_to_string(out_dir.join("heatmap.csv")).unwrap();
    assert_eq!(header(&heat), "axis_value,n,probability");
    for v in ["-1", "0", "1"] {
        let total: f64 = rows(&heat)
            .iter()
            .filter(|r| r[0] == v)
            .map(|r| r[2].parse::<f64>().unwrap())
            .sum();
        assert!((total - 1.0).abs() < 1e-10, "{v}: {total}");
    }
    // at offset 0 the scaled current is exactly the resonant value 1/2
    let sweep = rows(&fs::read_to_string(out_dir.join("sweep.csv")).unwrap());
    let mid = sweep.iter().find(|r| r[0] == "0" && r[1] == "10").unwrap();
    assert!((mid[3].parse::<f64>().unwrap() - 0.5).abs() < 1e-9);
}

#[test]
fn sweep_without_section_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "n.toml",
        "model = \"quantum\"\n[params]\nphi_d = 2.6\nkicks = 2\n",
    );
    let out = ratchet(&[
        "sweep",
        "--config",
        &cfg,
        "--out",
        dir.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("sweep"));
}

#[test]
fn figure_bundles_match_their_manifests() {
    for id in FigureId::ALL {
        let art = reproduce_figure(id).unwrap();
        let manifest = art.get("manifest.csv").unwrap();
        assert!(manifest.contains(&format!("# figure={}", id.as_str())));
        let members = rows(manifest);
        assert!(!members.is_empty());
        assert_eq!(
            art.files.len(),
            members.len() + 1,
            "{}: stray files",
            id.as_str()
        );
        for m in members {
            let text = art
                .get(&m[0])
                .unwrap_or_else(|| panic!("{} missing {}", id.as_str(), m[0]));
            assert_eq!(header(text).replace(',', " "), m[1]);
            assert_eq!(rows(text).len().to_string(), m[2]);
            assert!(text.contains(&format!("# member={}", m[0])));
        }
    }
}

#[test]
fn figure_overlays_present() {
    let fig3 = reproduce_figure(FigureId::Fig3).unwrap();
    let eps: Vec<String> = rows(fig3.get("curves.csv").unwrap())
        .iter()
        .map(|r| r[0].clone())
        .collect();
    for e in ["0.006", "0.04", "0.07", "0.09", "0.19"] {
        assert!(eps.iter().any(|v| v == e), "{e}");
    }
    let overlay = rows(fig3.get("overlay.csv").unwrap());
    let last = overlay.last().unwrap();
    let (ramp, spread): (f64, f64) = (last[1].parse().unwrap(), last[2].parse().unwrap());
    assert!(spread < ramp);

    let fig1a = reproduce_figure(FigureId::Fig1a).unwrap();
    let cur = rows(fig1a.get("current.csv").unwrap());
    assert_eq!(cur.len(), 61);
    assert_eq!(cur[0][0], "-3");
    assert_eq!(cur[60][0], "3");
}

#[test]
fn unknown_figure_is_rejected() {
    let dir = TempDir::new().unwrap();
    let out = ratchet(&["figure", "fig9", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("fig9"));
}

#[test]
fn scaling_cache_round_trips() {
    let dir = TempDir::new().unwrap();
    let out = ratchet(&[
        "scaling-cache",
        "--out",
        dir.path().to_str().unwrap(),
        "--x-max",
        "2",
        "--dx",
        "0.1",
        "--n-theta",
        "256",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = fs::read_to_string(dir.path().join("scaling_cache.csv")).unwrap();
    let curve = ScalingCurve::from_csv(&text).unwrap();
    assert_eq!(curve.n_theta(), 256);
    assert!((curve.f_over_x(0.0).unwrap() - 0.5).abs() < 1e-12);
}
