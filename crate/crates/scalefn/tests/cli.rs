use std::fs;
use std::process::Command;

use proptest::prelude::*;
use scalefn::cli::run;
use scalefn::config::JobConfig;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_scalefn"))
}

#[test]
fn scale_curve_writes_csv_and_reports_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("w.csv");
    let o = bin()
        .args(["scale-curve", "--model", "csbp", "--drift", "0", "--sigma", "1", "--q", "0.5"])
        .args(["--a", "-0.5", "--lower", "-3", "--n", "4096", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary = String::from_utf8(o.stdout).unwrap();
    assert!(summary.contains("est_error="), "{summary}");
    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("u,y,value"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 4097);
    assert!(rows[0].starts_with("-3,-3,"));
    assert!(rows[4096].starts_with("-0.5,-0.5,0"));
    // Only the requested file is written.
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn levy_scale_prints_value() {
    let o = bin()
        .args(["levy-scale", "--drift", "0", "--sigma", "1", "--q", "0", "--x", "3"])
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(String::from_utf8(o.stdout).unwrap().trim(), "6.0");
}

#[test]
fn json_curve_from_config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let job = dir.path().join("job.cfg");
    let out = dir.path().join("curve.json");
    fs::write(
        &job,
        "# pssmp curve\nmodel = pssmp\nalpha = 2\nkill_rate = 0.2\nhd = y\nq = 0.4\na = 2\nlower = 0.5\nn = 16\n",
    )
    .unwrap();
    let code = run([
        "scalefn",
        "scale-curve",
        "--config",
        job.to_str().unwrap(),
        "--n",
        "32",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["grid"]["n"], 32);
    assert_eq!(v["q"], 0.4);
    assert_eq!(v["value"].as_array().unwrap().len(), 33);
}

#[test]
fn exit_codes() {
    assert_eq!(run(["scalefn", "--help"]), 0);
    assert_eq!(run(["scalefn", "exit-ratio", "--model", "bogus"]), 4);
    assert_eq!(run(["scalefn", "exit-ratio", "--q", "0"]), 4);
    assert_eq!(run(["scalefn", "exit-ratio", "--a", "1", "--x", "0.5", "--b", "2"]), 4);
    assert_eq!(run(["scalefn", "scale-curve", "--a", "1", "--lower", "0", "--n", "1"]), 4);
    assert_eq!(run(["scalefn", "scale-curve", "--model", "pssmp", "--a", "1", "--lower", "0.5"]), 4);
    assert_eq!(run(["scalefn", "levy-scale", "--sigma", "0", "--drift", "0", "--x", "1"]), 4);
    assert_eq!(run(["scalefn", "exit-ratio", "--a", "0", "--x", "0.5", "--b", "1"]), 0);
    // An essentially unbounded rate keeps the step too large after every halving.
    assert_eq!(
        run([
            "scalefn", "scale-curve", "--drift", "1", "--sigma", "0", "--allow-monotone",
            "--q", "1e12", "--a", "1", "--lower", "0", "--n", "2",
        ]),
        3
    );
}

#[test]
fn validate_fail_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    // A coarse step without the bridge correction overshoots the barriers and
    // delays discounted exits well beyond 3 standard errors.
    let code = run([
        "scalefn", "validate", "--q", "2", "--drift", "1", "--a", "0", "--x", "0.5", "--b", "1",
        "--paths", "20000", "--dt", "0.05", "--bridge", "false", "--allowance", "0",
        "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(code, 2);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["verdict"], "FAIL");
    assert!(v.get("wall_clock_seconds").is_none());
}

#[test]
fn validate_reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let mut reports = Vec::new();
    for (i, workers) in ["1", "3", "1"].iter().enumerate() {
        let out = dir.path().join(format!("r{i}.json"));
        let code = run([
            "scalefn", "validate", "--model", "pssmp", "--alpha", "2", "--kill-rate", "0.2",
            "--q", "0.3", "--a", "0.5", "--x", "1", "--b", "2", "--paths", "4000",
            "--dt", "1e-3", "--seed", "7", "--allowance", "0.02", "--workers", workers,
            "--out", out.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        reports.push(fs::read(&out).unwrap());
    }
    assert_eq!(reports[0], reports[1]);
    assert_eq!(reports[0], reports[2]);
}

fn config_strategy() -> impl Strategy<Value = JobConfig> {
    (
        (0usize..4, prop::option::of(0.1..4.0f64), -2.0..2.0f64, 0.0..3.0f64, 0.0..2.0f64, 0.1..5.0f64),
        (0.0..1.0f64, any::<bool>(), 0usize..4, 0.0..3.0f64),
        (prop::option::of(-5.0..5.0f64), prop::option::of(-5.0..5.0f64), prop::option::of(-5.0..5.0f64)),
        (2usize..10000, 1usize..1000000, 1e-6..1e-1f64, any::<u64>(), any::<bool>()),
        (prop::option::of(1usize..64), any::<bool>(), 0.0..0.1f64, any::<bool>(), prop::option::of(0usize..2)),
    )
        .prop_map(|(m, d, p, grid, mc)| {
            let mut c = JobConfig::default();
            let models = ["generic", "pssmp", "nssmp", "csbp"];
            c.set("model", models[m.0]).unwrap();
            c.alpha = m.1;
            c.drift = m.2;
            c.sigma = m.3;
            c.jump_rate = m.4;
            c.jump_decay = m.5;
            c.kill_rate = d.0;
            c.allow_monotone = d.1;
            let hd = ["1", "y", "-y", "2.5*abs(y)^0.5"];
            c.set("hd", hd[d.2]).unwrap();
            c.q = d.3;
            c.a = p.0;
            c.b = p.1;
            c.x = p.2;
            c.xp = p.0.map(|v| v * 0.5);
            c.lower = p.1.map(|v| v - 1.0);
            c.n = grid.0;
            c.paths = grid.1;
            c.dt = grid.2;
            c.seed = grid.3;
            c.bridge = grid.4;
            c.workers = mc.0;
            c.timing = mc.1;
            c.allowance = mc.2;
            if mc.3 {
                c.set("functional", "occupation").unwrap();
                c.set("command", "validate").unwrap();
                c.set("out", "report.json").unwrap();
            }
            c.format = mc.4.map(|i| [scalefn::config::Format::Csv, scalefn::config::Format::Json][i]);
            c
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn config_text_round_trips(cfg in config_strategy()) {
        let text = cfg.to_string();
        let back = JobConfig::from_text(&text).unwrap();
        prop_assert_eq!(back, cfg);
    }
}
