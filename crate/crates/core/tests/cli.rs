use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_schreier")).args(args).output().expect("spawn schreier")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn temp(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("schreier-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn cert(name: &str, xi: &str) -> PathBuf {
    temp(name, &format!(r#"{{"xi":"{xi}","M":[1,2,3],"L":[1,2,3],"C":"1","N":3,"g_space":"C0","rho":"basis(L1;3)"}}"#))
}

#[test]
fn norm_eval_prints_the_exact_value() {
    let v = temp("v.json", r#"{"entries":[[1,"1"],[2,"1"],[3,"1"]]}"#);
    let o = run(&["norm", "eval", "X[S[1]]", v.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "2");
}

#[test]
fn out_flag_writes_the_result() {
    let v = temp("w.json", "[1, 1, 1]");
    let out = v.with_file_name("result.txt");
    let o = run(&["--out", out.to_str().unwrap(), "norm", "eval", "X[S[1]]", v.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(std::fs::read_to_string(&out).unwrap().trim(), "2");
}

#[test]
fn membership() {
    let o = run(&["fam", "member", "F[w]", "3 5 7"]);
    assert_eq!((code(&o), stdout(&o).trim().to_string()), (0, "true".to_string()));
    let o = run(&["fam", "member", "S[1]", "{2,3,4}"]);
    assert_eq!((code(&o), stdout(&o).trim().to_string()), (0, "false".to_string()));
}

#[test]
fn malformed_family_is_a_usage_error_with_location() {
    let o = run(&["fam", "member", "F[w", "1 2"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("byte 3"));
}

#[test]
fn verify_exit_codes() {
    let ok = cert("c0.json", "0");
    let o = run(&["certify", "verify", ok.to_str().unwrap(), "basis(L1;3)"]);
    assert_eq!(code(&o), 0);
    let bad = cert("c2.json", "2");
    let o = run(&["certify", "verify", bad.to_str().unwrap(), "basis(L1;3)"]);
    assert_eq!(code(&o), 2);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["violation"]["ratio"], "2");
}

#[test]
fn search_outcomes() {
    let base = ["certify", "search", "--xi", "2", "--depth", "3", "--g-space", "C0", "--c", "1", "basis(L1;3)"];
    let o = run(&base);
    assert_eq!(code(&o), 2);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["refuted"], true);

    let mut tight = vec!["--budget", "1"];
    tight.extend(base);
    assert_eq!(code(&run(&tight)), 3);

    let found = ["certify", "search", "--xi", "1", "--depth", "3", "--g-space", "C0", "--c", "1", "basis(L1;3)"];
    assert_eq!(code(&run(&found)), 0);
}

#[test]
fn acceptance_listing_and_suites() {
    let o = run(&["acceptance", "--list"]);
    assert_eq!(code(&o), 0);
    let names: Vec<String> = stdout(&o).lines().map(str::to_string).collect();
    assert!(names.contains(&"families".to_string()) && names.contains(&"all".to_string()));

    let o = run(&["acceptance", "families"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn acceptance_is_deterministic_per_seed() {
    let a = run(&["acceptance", "norms", "--seed", "1"]);
    let b = run(&["acceptance", "norms", "--seed", "1"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}
