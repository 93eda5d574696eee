use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use diffneuro::cli::{self, SweepSpec};
use diffneuro::config::{validate, SystemConfig};
use diffneuro::link::simulate;
use diffneuro::{derive_stream, Bits, StreamLabel};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_diffneuro"))
}

fn config_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("configs")
        .join(name)
}

fn acceptance() -> SystemConfig {
    cli::load_config(Some(&config_path("acceptance.cfg")), &[] as &[&str], None).unwrap()
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn header(csv: &str) -> Vec<String> {
    csv.lines()
        .find(|l| !l.starts_with('#'))
        .unwrap()
        .split(',')
        .map(str::to_string)
        .collect()
}

#[test]
fn trace_defaults_have_one_column_per_device() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let res = run(&["trace", "--bits", "1011", "--out", out]);
    assert!(
        res.status.success(),
        "{}",
        String::from_utf8_lossy(&res.stderr)
    );
    let conc = std::fs::read_to_string(dir.path().join("concentration.csv")).unwrap();
    assert!(conc.starts_with("# diffneuro-csv v1"));
    assert_eq!(
        header(&conc),
        ["t_ms", "cnd0", "cnd1", "cnd2", "cnd3", "cnd4", "cnd5"]
    );
    let cur = std::fs::read_to_string(dir.path().join("current.csv")).unwrap();
    assert_eq!(header(&cur).len(), 8);
    for f in ["membrane.csv", "spikes.txt", "decoded.txt"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let decoded = std::fs::read_to_string(dir.path().join("decoded.txt")).unwrap();
    assert_eq!(decoded.trim().len(), 4);
}

#[test]
fn trace_decodes_1011_on_acceptance_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config_path("acceptance.cfg");
    let res = run(&[
        "--config",
        cfg.to_str().unwrap(),
        "trace",
        "--bits",
        "1011",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(res.status.success());
    let decoded = std::fs::read_to_string(dir.path().join("decoded.txt")).unwrap();
    assert_eq!(decoded, "1011\n");
}

#[test]
fn silent_bit_without_channel_noise_is_silent() {
    let dir = tempfile::tempdir().unwrap();
    let res = run(&[
        "--set",
        "diffusion.sigma1=0",
        "trace",
        "--bits",
        "0",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(res.status.success());
    let cur = std::fs::read_to_string(dir.path().join("current.csv")).unwrap();
    for row in data_rows(&cur) {
        assert!(row[1..].iter().all(|v| v.parse::<f64>().unwrap() == 0.0));
    }
    assert_eq!(
        std::fs::read_to_string(dir.path().join("spikes.txt")).unwrap(),
        ""
    );
}

fn dir_bytes(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|p| {
            (
                PathBuf::from(p.file_name().unwrap()),
                std::fs::read(&p).unwrap(),
            )
        })
        .collect()
}

#[test]
fn trace_reruns_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        let res = run(&[
            "--seed",
            "9",
            "trace",
            "--bits",
            "110",
            "--out",
            d.path().to_str().unwrap(),
        ]);
        assert!(res.status.success());
    }
    assert_eq!(dir_bytes(a.path()), dir_bytes(b.path()));
}

#[test]
fn ber_json_is_reproducible() {
    let a = run(&["ber", "--trials", "100"]);
    let b = run(&["ber", "--trials", "100"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    for key in [
        "pe",
        "trials",
        "bits_total",
        "bit_errors",
        "ci95_lo",
        "ci95_hi",
        "p_y0_given_x1",
        "p_y1_given_x0",
        "p_z0_given_y1",
        "p_z1_given_y0",
    ] {
        assert!(v.get(key).is_some(), "{key}");
    }
    assert_eq!(v["trials"], 100);
    assert_eq!(v["bits_total"], 1600);
}

#[test]
fn exit_codes() {
    // usage errors (clap) and config errors share code 2
    assert_eq!(run(&["ber", "--trials", "0"]).status.code(), Some(2));
    assert_eq!(
        run(&["--set", "cnd.M=7", "ber", "--trials", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["--set", "nope.key=1", "ber", "--trials", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["trace", "--bits", "10x1", "--out", "/tmp"])
            .status
            .code(),
        Some(2)
    );
    // a runaway HH drive
    let cfg = config_path("acceptance.cfg");
    let res = run(&[
        "--config",
        cfg.to_str().unwrap(),
        "--set",
        "neuron.backend=HH",
        "--set",
        "cnd.Vr=1e9",
        "ber",
        "--trials",
        "1",
    ]);
    assert_eq!(
        res.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&res.stderr)
    );
    // unwritable output location
    let file = tempfile::NamedTempFile::new().unwrap();
    let out = file.path().join("sub");
    let res = run(&["trace", "--bits", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(4));
    assert_eq!(
        run(&["--config", "/nonexistent/x.cfg", "ber", "--trials", "1"])
            .status
            .code(),
        Some(4)
    );
}

#[test]
fn sweep_grid_has_one_row_per_point() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config_path("acceptance.cfg");
    let res = run(&[
        "--config",
        cfg.to_str().unwrap(),
        "--set",
        "tx.nbits=4",
        "sweep",
        "--param",
        "cnd.M",
        "--values",
        "5,6,7,8,9,10,11,12",
        "--param2",
        "cnd.mu",
        "--values2",
        "20,30,40",
        "--trials",
        "2",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(
        res.status.success(),
        "{}",
        String::from_utf8_lossy(&res.stderr)
    );
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(
        header(&csv),
        ["param1", "param2", "pe", "ci_lo", "ci_hi", "trials"]
    );
    let rows = data_rows(&csv);
    assert_eq!(rows.len(), 24);
    assert_eq!(rows[0][..2], ["5".to_string(), "20".to_string()]);
    assert_eq!(rows[23][..2], ["12".to_string(), "40".to_string()]);
    assert!(rows.iter().all(|r| r[5] == "2"));
}

#[test]
fn sweep_rejects_bad_specs() {
    let cfg = acceptance();
    for spec in [
        SweepSpec::one("cnd.M", &[]),
        SweepSpec::one("cnd.mu", &[f64::NAN]),
        SweepSpec::one("cnd.nothing", &[1.0]),
        SweepSpec::one("relay.q_dist", &[1.0]),
    ] {
        assert!(
            cli::sweep_to(&cfg, &spec, 1, std::io::sink(), |_, _| {}).is_err(),
            "{spec:?}"
        );
    }
    assert!(cli::parse_values("1,2,x").is_err());
    assert_eq!(cli::parse_values("1, 2.5,3").unwrap(), [1.0, 2.5, 3.0]);
}

#[test]
fn single_point_sweep_equals_ber() {
    let cfg = acceptance();
    let rows = cli::sweep_to(
        &cfg,
        &SweepSpec::one("cnd.mu", &[20.0]),
        30,
        std::io::sink(),
        |_, _| {},
    )
    .unwrap();
    let ber = cli::cmd_ber(&cfg, 30).unwrap();
    assert_eq!(rows[0].estimate, ber);
}

#[test]
fn t_sweep_does_not_get_worse_at_defaults() {
    let cfg = SystemConfig::default().with_param("tx.nbits", 8.0).unwrap();
    let rows = cli::sweep_to(
        &cfg,
        &SweepSpec::one("tx.T", &[100.0, 200.0, 300.0]),
        10,
        std::io::sink(),
        |_, _| {},
    )
    .unwrap();
    let pe: Vec<f64> = rows.iter().map(|r| r.estimate.pe).collect();
    assert!(pe.windows(2).all(|w| w[1] <= w[0]), "{pe:?}");
}

#[test]
fn noise_free_strong_link_is_error_free() {
    let mut cfg = acceptance();
    cfg.tx.slot_ms = 300.0;
    cfg.diffusion.sigma1 = 0.0;
    cfg.relay.sigma2 = 0.0;
    cfg.relay.q_dist = "point(1)".into();
    cfg.rx.theta2 = 0.5;
    let est = cli::cmd_ber(&cfg, 100).unwrap();
    assert_eq!(est.bit_errors, 0);
    assert_eq!(est.pe, 0.0);
}

#[test]
fn silent_transmitter_decodes_zeros() {
    let mut cfg = acceptance();
    cfg.diffusion.sigma1 = 0.0;
    let cfg = validate(cfg).unwrap();
    let zeros = Bits::zeros(cfg.tx.nbits);
    for trial in 0..5 {
        let out = simulate(
            &cfg,
            &zeros,
            &derive_stream(3, &[StreamLabel::Trial(trial)]),
        )
        .unwrap();
        assert_eq!(out.decoded, zeros);
        assert!(out.cnd.spikes.is_empty());
    }
}
