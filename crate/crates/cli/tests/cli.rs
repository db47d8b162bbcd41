use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;
use thompson_homology_cli::{run, Outcome, EXIT_MALFORMED, EXIT_OK, EXIT_RESOURCE, EXIT_UNDERDETERMINED};

fn thomhom(args: &str) -> Outcome {
    run(std::iter::once("thomhom").chain(args.split_whitespace()))
}

fn json(args: &str) -> Value {
    let out = thomhom(args);
    assert_eq!(out.code, EXIT_OK, "{args}: {}", out.stderr);
    serde_json::from_str(&out.stdout).unwrap()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("thomhom-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn zfn_two_sphere() {
    let v = json("zfn --s 2 --arities 2,2 --delta 4");
    let b = &v["result"]["betti"]["reduced_betti"];
    assert_eq!(b["2"], 1);
    assert_eq!(b["0"], 0);
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["config"]["command"]["delta"], 4);
}

#[test]
fn zfn_dichotomy_and_dump() {
    let v = json("zfn --arities 2,2 --delta 6 --dichotomy --dump");
    assert_eq!(v["result"]["dichotomy"]["verdict"], "contractible");
    let poset = serde_json::to_string(&v["result"]["poset"]).unwrap();
    let p = thompson_homology::PosetDump::parse(&poset).unwrap();
    assert_eq!(p.len() as u64, v["result"]["elements"].as_u64().unwrap());
    let complex = serde_json::to_string(&v["result"]["complex"]).unwrap();
    assert!(thompson_homology::ComplexDump::parse(&complex).is_ok());
}

#[test]
fn derive_two_v() {
    let v = json("derive --target 2v");
    let table = &v["result"]["table"];
    let got: Vec<u64> = (0..=8).map(|k| table[k.to_string()].as_u64().unwrap()).collect();
    assert_eq!(got, vec![1, 0, 0, 1, 0, 0, 0, 0, 0]);
    let log = v["result"]["log"].as_array().unwrap();
    assert!(log.iter().all(|s| s["rule"].is_string() && s["citation"].is_string() && s["segment"].is_array()));
    assert!(v["result"]["injected"]["1"].as_str().unwrap().contains("simple"));
}

#[test]
fn derive_vanishing_and_failure() {
    let v = json("derive --vanish --s 2 --arities 2,3 --k 5");
    assert_eq!(v["result"]["value"], 0);
    assert_eq!(thomhom("derive --vanish --arities 2,2 --k 2").code, EXIT_UNDERDETERMINED);
    assert_eq!(thomhom("derive").code, EXIT_MALFORMED);
}

#[test]
fn conj_report() {
    let v = json("conj --n 2 --r 1 --m 2 --report");
    assert_eq!(v["result"]["all_agree"], true);
    for m in v["result"]["primary"].as_array().unwrap() {
        assert_eq!(m["count"], "1");
    }
    let v = json("conj --n 2 --r 1 --m 3 --report");
    assert_eq!(v["result"]["all_agree"], false);
    let v = json("conj --n 3 --r 1 --m 2 --convention proof");
    assert_eq!(v["result"]["count"], "2");
    assert_eq!(thomhom("conj --n 2 --r 1 --m 2 --convention sideways").code, EXIT_MALFORMED);
}

#[test]
fn weyl_orbit() {
    let v = json("weyl --m 4 --orbit k1=1,k2=0,k4=1");
    assert_eq!(v["result"]["centralizer_order"], 4);
    assert_eq!(v["result"]["weyl_order"], 2);
    assert_eq!(thomhom("weyl --m 9 --orbit k9=1").code, EXIT_RESOURCE);
    assert_eq!(thomhom("weyl --m 4 --orbit k3=1").code, EXIT_MALFORMED);
}

#[test]
fn fj_ledger_with_theta() {
    let theta = scratch("theta.json", r#"[{"m":1,"q":0,"dim":1},{"m":1,"q":3,"dim":2},{"m":2,"q":0,"dim":1}]"#);
    let v = json(&format!("fj --degree 3 --s 2 --arities 2,2 --m-max 2 --theta {}", theta.display()));
    let ledger = &v["result"]["ledger"];
    let entries = ledger["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 10);
    // m = 1, p = 3, q = 0: Betti 1, theta 1
    let e = entries.iter().find(|e| e["m"] == 1 && e["p"] == 3).unwrap();
    assert_eq!(e["contribution"], "1");
    assert_eq!(e["exact"], false);
    // m = 1, p = 0, q = 3: Betti 1, theta 2
    let e = entries.iter().find(|e| e["m"] == 1 && e["p"] == 0).unwrap();
    assert_eq!(e["contribution"], "2");
    // m = 1, p = 1, q = 2: theta missing, Betti 0, so zero regardless
    let e = entries.iter().find(|e| e["m"] == 1 && e["p"] == 1).unwrap();
    assert_eq!(e["contribution"], "0");
    assert_eq!(ledger["total"]["known"], "4");
    let unknown = entries.iter().filter(|e| e["contribution"].is_null()).count();
    assert_eq!(ledger["total"]["unknown_entries"], unknown);
    assert!(unknown > 0);
    assert!(v["result"]["group_homology_source"].as_str().unwrap().contains("derived"));
}

#[test]
fn fj_table_mode_and_errors() {
    let theta = scratch("theta2.json", r#"[{"m":1,"q":0,"dim":1}]"#);
    let co = scratch("co.json", r#"[{"m":1,"i":1,"p":0,"q":0,"dim":1}]"#);
    let v = json(&format!(
        "fj --degree 0 --arities 2 --m-max 1 --theta {} --mode table --coinvariants {}",
        theta.display(),
        co.display()
    ));
    assert_eq!(v["result"]["ledger"]["total"]["known"], "1");
    assert_eq!(thomhom("fj --degree 0 --arities 2 --m-max 1 --mode table").code, EXIT_MALFORMED);
    assert_eq!(thomhom("fj --degree 0 --arities 3,3 --m-max 1").code, EXIT_UNDERDETERMINED);
    let v = json("fj --degree -1 --arities 3,3 --m-max 2 --group-betti 1,0,2");
    // classes for n = 3: one of order 1, two of order 2; only p = 0, q = -1
    assert_eq!(v["result"]["ledger"]["entries"].as_array().unwrap().len(), 3);
}

#[test]
fn chains_and_poset_files() {
    let v = json("chains --s 2 --arities 2,2 --sweep");
    assert_eq!(v["result"]["longest_chain"], 4);
    assert_eq!(v["result"]["zfn_dimension"]["4"], 2);
    let square = scratch("square.json", r#"{"elements":["a","b","c","d"],"covers":[[0,2],[0,3],[1,2],[1,3]]}"#);
    let v = json(&format!("chains --poset {} --betti", square.display()));
    assert_eq!(v["result"]["longest_chain"], 1);
    assert_eq!(v["result"]["betti"]["reduced_betti"]["1"], 1);
    let cyclic = scratch("cyclic.json", r#"{"elements":[1,2],"covers":[[0,1],[1,0]]}"#);
    assert_eq!(thomhom(&format!("chains --poset {}", cyclic.display())).code, EXIT_MALFORMED);
}

#[test]
fn quillen_and_stein() {
    let v = json("quillen-check --arities 2,2 --p 4 --delta 1..3");
    assert_eq!(v["result"]["consistent"], true);
    assert_eq!(v["result"]["reports"].as_array().unwrap().len(), 3);
    let v = json("stein-z --arities 2,2 --p 4 --delta 3");
    assert_eq!(v["result"]["betti"]["reduced_betti"]["1"], 1);
    assert_eq!(thomhom("stein-z --arities 2,2 --p 30 --delta 40").code, EXIT_RESOURCE);
    assert_eq!(thomhom("quillen-check --arities 2,2 --p 4 --delta 1..100000").code, EXIT_RESOURCE);
}

#[test]
fn constants_and_signature_file() {
    let path = scratch("sig.json", r#"{"s":3,"arities":[2,2,2]}"#);
    let v = json(&format!("constants --signature {}", path.display()));
    assert_eq!(v["result"]["constants"]["d"], "12");
    assert_eq!(thomhom("constants --s 3 --arities 2,2").code, EXIT_MALFORMED);
    assert_eq!(thomhom("constants").code, EXIT_MALFORMED);
}

#[test]
fn malformed_arguments() {
    assert_eq!(thomhom("").code, EXIT_MALFORMED);
    assert_eq!(thomhom("nonsense").code, EXIT_MALFORMED);
    assert_eq!(thomhom("zfn --arities 2,2").code, EXIT_MALFORMED);
    assert_eq!(thomhom("zfn --arities 2,2 --delta 1 --format xml").code, EXIT_MALFORMED);
    let help = thomhom("--help");
    assert_eq!(help.code, EXIT_OK);
    assert!(help.stdout.contains("quillen-check"));
}

#[test]
fn deterministic_output() {
    for args in [
        "zfn --arities 2,2 --delta 3 --dump",
        "derive --target 2v",
        "conj --n 3 --r 2 --m 6 --report",
        "fj --degree 2 --arities 2,2 --m-max 3 --format md",
        "quillen-check --arities 2,2 --p 4,5 --delta 2",
    ] {
        let a = thomhom(args);
        let b = thomhom(args);
        assert_eq!(a.code, EXIT_OK, "{args}");
        assert_eq!(a.stdout, b.stdout, "{args}");
    }
}

#[test]
fn markdown_and_output_file() {
    let out = thomhom("derive --target 2v --format md");
    assert!(out.stdout.starts_with("# thomhom derive"));
    assert!(out.stdout.contains("| citation | conclusion | rule | segment |"));
    let path = std::env::temp_dir().join(format!("thomhom-out-{}.json", std::process::id()));
    let out = thomhom(&format!("conj --n 2 --r 1 --m 2 --seed 9 --output {}", path.display()));
    assert_eq!(out.code, EXIT_OK);
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["config"]["seed"], 9);
    std::fs::remove_file(path).unwrap();
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_thomhom");
    let ok = Command::new(bin).args(["conj", "--n", "2", "--r", "1", "--m", "2"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(v["result"]["count"], "1");
    let bad = Command::new(bin).args(["zfn"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
    let big = Command::new(bin).args(["weyl", "--m", "9", "--orbit", "k9=1"]).output().unwrap();
    assert_eq!(big.status.code(), Some(2));
}
