use std::fs;
use std::process::{Command, Output};

fn mldc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mldc"))
        .args(args)
        .env_remove("MLDC_THREADS")
        .output()
        .expect("run mldc")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn ord2_prints_the_order() {
    assert_eq!(stdout(&mldc(&["ord2", "73"])).trim(), "9");
    assert_eq!(stdout(&mldc(&["ord2", "13264529"])).trim(), "47");
    assert!(!mldc(&["ord2", "8"]).status.success());
}

#[test]
fn deps_find_prints_canonical_witness() {
    let text = stdout(&mldc(&["deps", "find", "7"]));
    let line = text.lines().last().unwrap();
    assert!(
        line.starts_with("7 3 3 ") && line.ends_with(" 0,1,3"),
        "{line}"
    );
    let text = stdout(&mldc(&["deps", "find", "11"]));
    assert_eq!(text.lines().last(), Some("none"));
}

#[test]
fn nice_build_prints_fixture() {
    assert_eq!(
        stdout(&mldc(&["nice", "build", "7"])),
        "7 3 4\n0,1,3\n0,2,3,4\n"
    );
}

#[test]
fn ldc_demo_refuses_without_dependency() {
    let out = mldc(&["ldc", "demo", "--p", "5", "--m", "3"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("t = 4 is even"));
}

#[test]
fn ldc_demo_zero_noise() {
    let text = stdout(&mldc(&[
        "ldc", "demo", "--p", "3", "--m", "5", "--delta", "0", "--trials", "1000",
    ]));
    assert!(text.contains("N = 243"), "{text}");
    assert!(text.contains("\n0,1000,0,"), "{text}");
}

#[test]
fn bounds_t23() {
    let text = stdout(&mldc(&["bounds", "--t-lo", "23", "--t-hi", "23"]));
    let row = text.lines().nth(1).unwrap();
    assert!(
        row.starts_with("23,8388607,178481,true,155871.8,true,"),
        "{row}"
    );
}

#[test]
fn search_export_and_convert() {
    let dir = tempfile::tempdir().unwrap();
    let jsonl = dir.path().join("run.jsonl");
    let csv = dir.path().join("run.csv");
    let text = stdout(&mldc(&[
        "search",
        "--lo",
        "3",
        "--hi",
        "200000",
        "--threads",
        "2",
        "--out",
        jsonl.to_str().unwrap(),
        "--checkpoint",
        dir.path().join("run.ckpt").to_str().unwrap(),
    ]));
    assert!(text.contains("(p, t) = (121369, 39)"), "{text}");
    assert!(
        text.contains("converse check on 9 dependencies: ok"),
        "{text}"
    );
    stdout(&mldc(&[
        "export",
        jsonl.to_str().unwrap(),
        csv.to_str().unwrap(),
    ]));
    let csv_text = fs::read_to_string(&csv).unwrap();
    assert!(csv_text.starts_with("p,t,nec3,odd_t,weil,dep,method,witness,ms\n"));
    assert!(csv_text.contains("\n73,9,true,true,false,true,class,\"[0,1,9]\",0\n"));
    let back = dir.path().join("back.jsonl");
    stdout(&mldc(&[
        "export",
        csv.to_str().unwrap(),
        back.to_str().unwrap(),
    ]));
    assert_eq!(fs::read(&jsonl).unwrap(), fs::read(&back).unwrap());
}

#[test]
fn thread_override_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_mldc"))
        .args(["search", "--hi", "1000"])
        .env("MLDC_THREADS", "1")
        .output()
        .unwrap();
    assert!(out.status.success());
}
