use std::io::Write;
use std::process::Command;

use serde_json::Value;

use mwk_cli::{output, run_source, ErrorKind};

fn run_json(src: &str) -> (Vec<Value>, i32) {
    let out = run_source(src);
    let v: Value = serde_json::from_str(&output::render_json(&out)).unwrap();
    (v.as_array().unwrap().clone(), out.exit_code())
}

fn last_result(src: &str) -> String {
    let (recs, code) = run_json(src);
    assert_eq!(code, 0, "{recs:?}");
    recs.last().unwrap()["result"].as_str().unwrap().to_string()
}

#[test]
fn h_from_its_word_presentation() {
    let src = "field F5 = GF(5)\nelem h0 : KMW(0, F5) = 2 + eta*[-1]\neval h0\nequal h0, h";
    let (recs, code) = run_json(src);
    assert_eq!(code, 0);
    assert_eq!(recs[0]["result"], "h");
    assert_eq!(recs[1]["result"], "true");
}

#[test]
fn angle_of_zero_is_a_domain_error() {
    let out = run_source("field F5 = GF(5)\neval <0> in GW(F5)");
    let e = out.error.clone().expect("error expected");
    assert_eq!(e.kind, ErrorKind::Domain);
    assert_eq!(out.exit_code(), 1);
    assert_eq!(e.pos.unwrap().line, 2);
}

#[test]
fn degree_formula_over_f9() {
    let src = "field F3 = GF(3)\next F9 = F3[a]/(a^2+1)\nelem one : KMW(0, F9) @ w = 1\ntransfer one from F9 with w";
    assert_eq!(last_result(src), "h");
    let bt = format!("{src} via bass-tate");
    assert_eq!(last_result(&bt), "h");
}

#[test]
fn degree_formula_for_a_cubic_extension() {
    let src = "field F2 = GF(2)\next F8 = F2[b]/(b^3+b+1)\ntransfer 1 from F8";
    // 3_eps = h + 1 over F2, where <1> = <-1>
    let (recs, _) = run_json(&format!("{src}\nequal 1 + h, 1 + h in KMW(0, F2)"));
    assert_eq!(recs[0]["result"], "h + <1>");
}

#[test]
fn reciprocity_sums_to_zero() {
    let (recs, code) = run_json("reciprocity [t^2-2]*dt over GF(5)");
    assert_eq!(code, 0);
    let r = &recs[0];
    assert_eq!(r["command"], "reciprocity");
    assert_eq!(r["ok"], true);
    assert_eq!(r["sum"], "0");
    assert_eq!(r["perPlace"].as_array().unwrap().len(), 2);
}

#[test]
fn reciprocity_over_q_with_factored_input() {
    let (recs, code) = run_json("reciprocity [(t-1)*(t+2)]*[t]*dt over QQ");
    assert_eq!(code, 0);
    assert_eq!(recs[0]["ok"], true);
}

#[test]
fn addition_law_of_symbols() {
    let src = "field F7 = GF(7)\nequal [3]+[5], [3*5] - eta*[3]*[5] in KMW(1, F7)";
    assert_eq!(last_result(src), "true");
    let q = "equal [2]+[3], [6] - eta*[2]*[3] in KMW(1, QQ)";
    assert_eq!(last_result(q), "true");
}

#[test]
fn residues_and_specializations() {
    let src = "field K = GF(5)(t)\nelem a : KMW(1, K) = [t*(t-1)]\nresidue a at (t)\nspecialize a at (t-2)";
    let (recs, code) = run_json(src);
    assert_eq!(code, 0);
    assert_eq!(recs[0]["result"], "(<1>) @ (t)^*");
    assert_eq!(recs[1]["result"], "[2]");
}

#[test]
fn uniformizer_change_multiplies_by_its_class() {
    let src = "field K = GF(5)(t)\nelem a : KMW(1, K) = [t]\nresidue a at (t) uniformizer (2*t)";
    assert_eq!(last_result(src), "(<2>) @ (2*t)^*");
}

#[test]
fn divisors_and_pb1() {
    let src = "\
field K = GF(3)(t)
elem a : KMW(1, K) = [t^2+1]
divisor D = tdiv a twist O(-2)
tdeg D
pb1 D twist O(1)
divisor P = push <-1> on P1(GF(3)) twist O(0)
pb1 P
divisor Q on P1(K) twist O(-1) = (t): 1, (t^2+1): 1
pb1 Q";
    let (recs, code) = run_json(src);
    assert_eq!(code, 0, "{recs:?}");
    assert_eq!(recs[0]["result"], "0");
    assert_eq!(recs[1]["parity"], "odd");
    assert_eq!(recs[1]["result"], "0");
    assert_eq!(recs[2]["result"], "<2>");
    assert_eq!(recs[3]["result"], "3");
}

#[test]
fn tdiv_serializes_points_and_twists() {
    let src = "field K = GF(5)(t)\nelem a : KMW(1, K) = [t-1]\ntdiv a";
    let (recs, _) = run_json(src);
    let rows = recs[0]["divisor"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["point"], serde_json::json!(["4", "1"]));
    assert_eq!(rows[0]["coefficient"], "<1>");
    assert_eq!(rows[0]["twist"], "(t+4)^*.u");
    assert_eq!(rows[1]["point"], "inf");
}

#[test]
fn invariants_over_q() {
    let src = "gw g : QQ = <1, 1, -3>\ninvariants g";
    let (recs, code) = run_json(src);
    assert_eq!(code, 0);
    let inv = &recs[0]["invariants"];
    assert_eq!(inv["rank"], 3);
    assert_eq!(inv["disc"], "3");
    assert_eq!(inv["signature"], serde_json::json!([2, 1]));
}

#[test]
fn syntax_errors_carry_line_and_column() {
    let out = run_source("field F5 = GF(5)\neval [2] + * [3]");
    let e = out.error.clone().unwrap();
    assert_eq!(e.kind, ErrorKind::Syntax);
    let p = e.pos.unwrap();
    assert_eq!((p.line, p.col), (2, 12));
    assert_eq!(out.exit_code(), 1);
}

#[test]
fn unbound_names_are_reported_where_used() {
    let out = run_source("field F5 = GF(5)\neval [2] + zz in KMW(1, F5)");
    let e = out.error.unwrap();
    assert_eq!(e.kind, ErrorKind::Domain);
    assert_eq!(e.pos.unwrap().col, 12);
    assert!(e.message.contains("zz"));
}

#[test]
fn degree_and_twist_mismatches_are_rejected() {
    assert!(run_source("field F5 = GF(5)\nelem x : KMW(2, F5) = [2]").error.is_some());
    let src = "field F5 = GF(5)\nelem x : KMW(1, F5) @ u = [2]\nelem y : KMW(1, F5) @ v = x";
    assert!(run_source(src).error.is_some());
}

#[test]
fn reducible_stage_is_a_domain_error() {
    let out = run_source("field F5 = GF(5)\next E = F5[x]/(x^2-4)");
    assert_eq!(out.error.unwrap().kind, ErrorKind::Domain);
}

#[test]
fn unsupported_requests_exit_with_two() {
    let src = "ext E = QQ[x]/(x^2-2)\nelem b : KMW(2, E) @ w = [x]*[x+1]\ntransfer b from E";
    let out = run_source(src);
    assert_eq!(out.error.as_ref().map(|e| e.kind), Some(ErrorKind::Capability), "{:?}", out.records);
    assert_eq!(out.exit_code(), 2);
}

#[test]
fn keywords_are_not_names() {
    let out = run_source("field eta = GF(5)");
    assert_eq!(out.error.unwrap().kind, ErrorKind::Syntax);
}

#[test]
fn json_output_is_stable() {
    let src = "field F9 = GF(9)\nfield K = F9(t)\nreciprocity [t^3+a*t+1]*[t-a]*dt over F9\ngw g : F9 = <a> + 3*<1>\neval g";
    let a = output::render_json(&run_source(src));
    let b = output::render_json(&run_source(src));
    assert_eq!(a, b);
    assert!(a.contains("\"ok\": true"));
}

#[test]
fn rules_suite_from_a_script() {
    let (recs, code) = run_json("rules-suite filter R3b\nrules-suite filter R2b instances 3");
    assert_eq!(code, 0);
    assert!(recs[0]["rules"][0]["status"].as_str().unwrap().starts_with("not implemented"));
    assert_eq!(recs[1]["result"], "pass");
}

fn script(contents: &str) -> tempfile_path::Path {
    tempfile_path::Path::new(contents)
}

mod tempfile_path {
    use std::path::PathBuf;

    pub struct Path(pub PathBuf);

    impl Path {
        pub fn new(contents: &str) -> Path {
            use std::sync::atomic::{AtomicUsize, Ordering};
            static N: AtomicUsize = AtomicUsize::new(0);
            let n = N.fetch_add(1, Ordering::SeqCst);
            let p = std::env::temp_dir().join(format!("mwk-cli-{}-{n}.mwk", std::process::id()));
            std::fs::write(&p, contents).unwrap();
            Path(p)
        }
    }

    impl Drop for Path {
        fn drop(&mut self) {
            let _ = std::fs::remove_file(&self.0);
        }
    }
}

fn mwk(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_mwk")).args(args).output().unwrap()
}

#[test]
fn binary_exit_codes() {
    let ok = script("field F3 = GF(3)\next F9 = F3[a]/(a^2+1)\ntransfer 1 from F9 with w\n");
    let o = mwk(&["run", ok.0.to_str().unwrap(), "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v[0]["result"], "h");

    let bad = script("field F5 = GF(5)\neval <0> in GW(F5)\n");
    let o = mwk(&["run", bad.0.to_str().unwrap(), "--json"]);
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v[0]["error"]["kind"], "domain");
    assert!(String::from_utf8_lossy(&o.stderr).contains("2:"));

    let cap = script("ext E = QQ[x]/(x^2-2)\nelem b : KMW(2, E) @ w = [x]*[x+1]\ntransfer b from E\n");
    let o = mwk(&["run", cap.0.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn binary_suite_and_repl() {
    let o = mwk(&["suite", "--filter", "R2c", "--instances", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("R2c"));

    let mut child = Command::new(env!("CARGO_BIN_EXE_mwk"))
        .arg("repl")
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .stderr(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"field F5 = GF(5)\neval bogus +\neval h*h in KMW(0, F5)\n").unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("eval: 2*h"));
    assert!(String::from_utf8_lossy(&o.stderr).contains("syntax error at 2:"));
}
