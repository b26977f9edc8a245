use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn qmaze(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmaze")).current_dir(dir).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const MAZE3: &str = "3\nS..\n##.\nE..\n";

fn setup() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("maze3.txt"), MAZE3).unwrap();
    fs::write(
        dir.path().join("run.cfg"),
        "# short deterministic run\nmodel = hybrid\nmaze = maze3.txt\nepisodes = 30\nseed = 1\nrecord_timing = false\n",
    )
    .unwrap();
    dir
}

#[test]
fn train_writes_artifacts() {
    let dir = setup();
    let o = qmaze(dir.path(), &["--config", "run.cfg", "train", "--out", "a"]);
    assert!(o.status.success(), "{}", stderr(&o));
    for f in ["model.json", "history.csv", "summary.json"] {
        assert!(dir.path().join("a").join(f).exists(), "{f}");
    }
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("a/summary.json")).unwrap()).unwrap();
    assert_eq!(summary["model"], "hybrid");
    assert_eq!(summary["seed"], 1);
    let csv = fs::read_to_string(dir.path().join("a/history.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 30);
    let wins = rows.iter().filter(|r| r.split(',').nth(4) == Some("1")).count();
    assert_eq!(summary["win_rate_pct"].as_f64().unwrap(), 100.0 * wins as f64 / 30.0);
}

#[test]
fn identical_runs_are_byte_identical() {
    let dir = setup();
    for out in ["a", "b"] {
        assert!(qmaze(dir.path(), &["--config", "run.cfg", "train", "--out", out]).status.success());
    }
    for f in ["model.json", "history.csv", "summary.json"] {
        assert_eq!(fs::read(dir.path().join("a").join(f)).unwrap(), fs::read(dir.path().join("b").join(f)).unwrap(), "{f}");
    }
}

#[test]
fn seed_flag_overrides_config() {
    let dir = setup();
    assert!(qmaze(dir.path(), &["--config", "run.cfg", "--seed", "7", "train", "--out", "s"]).status.success());
    let summary = fs::read_to_string(dir.path().join("s/summary.json")).unwrap();
    assert!(summary.contains("\"seed\": 7"), "{summary}");
}

#[test]
fn config_errors_exit_2() {
    let dir = setup();
    let o = qmaze(dir.path(), &["train", "--maze", "missing.txt"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("missing.txt"));
    fs::write(dir.path().join("bad.cfg"), "episodes = 10\nfoo = 1\n").unwrap();
    let o = qmaze(dir.path(), &["--config", "bad.cfg", "train"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unknown key `foo`"));
    fs::write(dir.path().join("zero.cfg"), "batch_size = 0\n").unwrap();
    assert_eq!(qmaze(dir.path(), &["--config", "zero.cfg", "train"]).status.code(), Some(2));
}

#[test]
fn unsolvable_maze_exits_3() {
    let dir = setup();
    fs::write(dir.path().join("closed.txt"), "3\nS#.\n##.\n..E\n").unwrap();
    let o = qmaze(dir.path(), &["train", "--maze", "closed.txt"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn eval_prints_policy_map() {
    let dir = setup();
    assert!(qmaze(dir.path(), &["--config", "run.cfg", "train", "--out", "m"]).status.success());
    let o = qmaze(dir.path(), &["eval", "m/model.json", "maze3.txt", "--output", "policy.txt"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("success "));
    let map: Vec<&str> = lines.collect();
    assert_eq!(map.len(), 3);
    assert!(map.iter().all(|l| l.chars().count() == 3));
    assert_eq!(map[1].chars().take(2).collect::<String>(), "##");
    assert_eq!(map[2].chars().next(), Some('E'));
    assert!(map.concat().chars().all(|c| "←↑→↓#E".contains(c)));
    assert_eq!(fs::read_to_string(dir.path().join("policy.txt")).unwrap(), text);
    assert_eq!(stdout(&qmaze(dir.path(), &["eval", "m/model.json", "maze3.txt"])), text);
}

#[test]
fn eval_rejects_incompatible_checkpoint() {
    let dir = setup();
    assert!(qmaze(dir.path(), &["--config", "run.cfg", "train", "--out", "m"]).status.success());
    fs::write(dir.path().join("maze4.txt"), "4\nS...\n.##.\n...#\n#..E\n").unwrap();
    assert_eq!(qmaze(dir.path(), &["eval", "m/model.json", "maze4.txt"]).status.code(), Some(3));
    fs::write(dir.path().join("junk.json"), "{}").unwrap();
    assert_eq!(qmaze(dir.path(), &["eval", "junk.json", "maze3.txt"]).status.code(), Some(2));
}

#[test]
fn benchmark_table() {
    let dir = setup();
    fs::write(dir.path().join("short.cfg"), "episodes = 2\n").unwrap();
    let o = qmaze(dir.path(), &["--config", "short.cfg", "benchmark", "--maze-size", "4", "--models", "classical,hybrid", "--seeds", "1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let table = stdout(&o);
    assert!(table.starts_with("| Model | Model Size | Win Rate | Training Runtime |"));
    assert!(table.contains("| Classical CNN | 6588 |"));
    assert!(table.contains("| Hybrid QNN | 2442 |"));
    assert!(dir.path().join("out/classical-seed1.csv").exists());
    assert!(dir.path().join("out/hybrid-seed1.csv").exists());

    let o = qmaze(dir.path(), &["--config", "short.cfg", "benchmark", "--maze-size", "3", "--models", "hybrid", "--seeds", "1,2"]);
    assert!(o.status.success());
    assert!(stdout(&o).lines().nth(2).unwrap().matches('±').count() == 2, "{}", stdout(&o));
}

#[test]
fn benchmark_usage_errors() {
    let dir = setup();
    assert_eq!(qmaze(dir.path(), &["benchmark", "--models", ""]).status.code(), Some(2));
    assert_eq!(qmaze(dir.path(), &["benchmark", "--models", "quantum"]).status.code(), Some(2));
    assert_eq!(qmaze(dir.path(), &["benchmark", "--maze-size", "9"]).status.code(), Some(2));
}

#[test]
fn plot_writes_svgs() {
    let dir = setup();
    assert!(qmaze(dir.path(), &["--config", "run.cfg", "train", "--out", "p"]).status.success());
    let o = qmaze(dir.path(), &["plot", "p/history.csv", "--out", "charts"]);
    assert!(o.status.success(), "{}", stderr(&o));
    for f in ["history-epsilon.svg", "history-reward.svg"] {
        let svg = fs::read_to_string(dir.path().join("charts").join(f)).unwrap();
        assert!(svg.starts_with("<svg") && svg.contains("<polyline"));
    }
    fs::write(dir.path().join("bad.csv"), "episode,reward\n1,2\n").unwrap();
    assert_eq!(qmaze(dir.path(), &["plot", "bad.csv"]).status.code(), Some(2));
}
