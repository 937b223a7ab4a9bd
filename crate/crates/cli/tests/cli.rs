use std::path::PathBuf;
use std::process::{Command, Output};

fn starload(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_starload"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write_config(name: &str, json: &str) -> PathBuf {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, json).unwrap();
    path
}

const INFEASIBLE: &str = r#"{
  "t_cp": 1, "t_cm": 1,
  "root": {"omega": 1},
  "children": [{"omega": 1, "z": 2, "label": "slowlink"}, {"omega": 1, "z": 0.5}],
  "protocol": "sequential"
}"#;

#[test]
fn solve_homo_simultaneous() {
    let o = starload(&[
        "solve",
        "--preset",
        "homo",
        "--mode",
        "local",
        "--protocol",
        "simultaneous",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("finish_time,,1.200"), "{out}");
    assert_eq!(out.matches(",0.200").count(), 5, "{out}");
}

#[test]
fn solve_trace_lists_ratios() {
    let o = starload(&["solve", "--preset", "het", "--trace", "--precision", "4"]);
    let out = stdout(&o);
    assert!(out.contains("finish_time,,1.8416"), "{out}");
    for key in ["k1,,", "q2,,", "q3,,", "q4,,", "definition,,"] {
        assert!(out.contains(key), "missing {key}: {out}");
    }
}

#[test]
fn infeasible_config_names_the_child() {
    let path = write_config("infeasible.json", INFEASIBLE);
    let o = starload(&["solve", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("child 1 (slowlink)"), "{err}");
    assert!(o.stdout.is_empty());
}

#[test]
fn validate_reports_violations_per_protocol() {
    let path = write_config("validate.json", INFEASIBLE);
    let o = starload(&["validate", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let out = stdout(&o);
    assert!(
        out.starts_with("protocol,child,label,rule,omega_t_cp,z_t_cm\n"),
        "{out}"
    );
    assert!(out.contains("sequential,1,slowlink"), "{out}");

    let ok = starload(&["validate", "--preset", "homo", "--mode", "combined"]);
    assert_eq!(ok.status.code(), Some(0), "{}", stderr(&ok));
}

#[test]
fn config_errors_exit_one() {
    let bad = write_config(
        "bad-omega.json",
        r#"{"t_cp": 1, "t_cm": 1, "root": {"omega": 1}, "children": [{"omega": 0, "z": 1}]}"#,
    );
    let o = starload(&["solve", "--config", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("children[0].omega"), "{}", stderr(&o));

    let unknown = write_config(
        "unknown.json",
        r#"{"t_cp": 1, "t_cm": 1, "root": {"omega": 1}, "colour": 3}"#,
    );
    assert_eq!(
        starload(&["solve", "--config", unknown.to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );

    assert_eq!(
        starload(&["solve", "--config", "/nonexistent/x.json"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        starload(&["solve", "--preset", "mesh"]).status.code(),
        Some(1)
    );
    assert_eq!(starload(&["solve"]).status.code(), Some(1));
    assert_eq!(starload(&["frobnicate"]).status.code(), Some(1));
}

#[test]
fn speedup_and_sweep() {
    let o = starload(&[
        "speedup",
        "--preset",
        "homo",
        "--mode",
        "cloud",
        "--protocol",
        "sequential",
    ]);
    assert_eq!(stdout(&o), "protocol,mode,s_dlt\nsequential,cloud,11.000\n");

    let o = starload(&[
        "sweep", "--preset", "homo", "--mode", "cloud", "--f-grid", "0:1:0.5",
    ]);
    assert_eq!(
        stdout(&o),
        "f,1-f,f/sp,Ss\n0.000,1.000,0.000,1.000\n0.500,0.500,0.045,1.833\n1.000,0.000,0.091,11.000\n"
    );

    let o = starload(&["sweep", "--preset", "homo", "--f-grid", "0:2:0.5"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn simulate_uniform_split() {
    let o = starload(&[
        "simulate",
        "--preset",
        "het-reconstructed",
        "--alphas",
        "0.2,0.2,0.2,0.2,0.2",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(
        out.starts_with("node,phase,start,end\nP0,compute,0.000,0.800\n"),
        "{out}"
    );
    assert!(out.contains("P4,compute,1.340,4.140"), "{out}");

    let bad = starload(&["simulate", "--preset", "homo", "--alphas", "0.5,0.6,0,0,0"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn verify_passes_on_presets() {
    let o = starload(&["verify", "--preset", "homo", "--protocol", "staggered"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("replay,pass"), "{out}");
    assert!(out.contains("search,pass"), "{out}");
}

#[test]
fn reproduce_is_deterministic() {
    let a = starload(&["reproduce"]);
    let b = starload(&["reproduce"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let out = stdout(&a);
    assert!(
        out.contains("# total=216 match=201 rounding_deviation=0 inconsistent=15 unexplained=0"),
        "{out}"
    );
}

#[test]
fn out_writes_file_and_markdown_format() {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("speedup.md");
    let o = starload(&[
        "speedup",
        "--preset",
        "homo",
        "--format",
        "markdown",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("| protocol | mode | s_dlt |"), "{text}");
}
