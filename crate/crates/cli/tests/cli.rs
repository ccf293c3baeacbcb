use std::path::PathBuf;
use std::process::{Command, Output};

fn sigma_scope(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sigma-scope"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn scratch(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("sigma-scope-{}-{name}", std::process::id()))
}

#[test]
fn exit_codes_follow_the_verdict() {
    assert_eq!(code(&sigma_scope(&["classify", "--name", "COMB"])), 0);
    assert_eq!(code(&sigma_scope(&["classify", "--name", "FULL"])), 10);
    assert_eq!(code(&sigma_scope(&["classify", "--name", "EVEN", "--ideal", "evens"])), 0);
    assert_eq!(code(&sigma_scope(&["classify", "--name", "NOPE"])), 2);
    assert_eq!(code(&sigma_scope(&["classify", "--name", "FULL", "--input", "/no/such/file"])), 2);
    assert_eq!(code(&sigma_scope(&["verify"])), 2);
}

#[test]
fn text_summary_and_json_report() {
    let out = sigma_scope(&["classify", "--name", "DIAG"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("DIAG\tfin\tkernel\tPositive"), "{text}");
    assert!(String::from_utf8(out.stderr).unwrap().contains("elapsed"));

    let out = sigma_scope(&["classify", "--name", "DIAG", "--json"]);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["schema"], "sigma-scope/1");
    assert_eq!(doc["exit_code"], 10);
    assert!(out.stderr.is_empty(), "no timing next to a JSON report");
}

#[test]
fn sequential_flag_gives_the_same_report() {
    let a = sigma_scope(&["classify", "--all", "--json"]).stdout;
    let b = sigma_scope(&["classify", "--all", "--json", "--sequential"]).stdout;
    assert_eq!(a, b);
}

#[test]
fn stored_reports_reverify_and_tampering_is_caught() {
    for (name, expected) in [("HALF", 10), ("BIN_PAIR", 0)] {
        let out = sigma_scope(&["classify", "--name", name, "--json"]);
        assert_eq!(code(&out), expected);
        let path = scratch(&format!("{name}.json"));
        std::fs::write(&path, &out.stdout).unwrap();
        let verified = sigma_scope(&["verify", "--input", path.to_str().unwrap()]);
        assert_eq!(code(&verified), expected, "{}", String::from_utf8_lossy(&verified.stdout));

        // swap the verdict's certificate for one of the wrong kind
        let mut doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        let verdict = &mut doc["results"][0]["verdict"];
        *verdict = serde_json::json!(if expected == 10 { "SmallCover" } else { "Positive" });
        std::fs::write(&path, serde_json::to_vec(&doc).unwrap()).unwrap();
        let tampered = sigma_scope(&["verify", "--input", path.to_str().unwrap()]);
        assert_ne!(code(&tampered), expected);
        std::fs::remove_file(&path).unwrap();
    }
}

#[test]
fn uniformize_and_derive_commands() {
    let out = sigma_scope(&["uniformize", "--name", "HALF", "--point", "2,(7)"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8(out.stdout).unwrap().contains("y = 0,(7)"));

    let out = sigma_scope(&["derive", "--name", "COMB"]);
    assert!(String::from_utf8(out.stdout).unwrap().contains("stages"));
}
