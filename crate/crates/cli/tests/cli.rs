use std::io::Write;
use std::process::{Command, Output};

use hoca_core::hoca2::parse_hocs2;
use hoca_core::storage::{parse_automaton, print_automaton};
use hoca_core::summaries::reach_state_hocs2;
use hoca_core::transforms::pop_to_invpush;

const PUSH_DEC_POP: &str = "\
storage: P{_,0,1}(C)
states: q0 q1 q2 q3
initial: q0
trans: q0 [top=_] push(1) q1
trans: q1 [top=1] stay(pop) q1
trans: q1 [top=1] pop q2
";

fn file(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().expect("temp file");
    f.write_all(text.as_bytes()).expect("write");
    f
}

fn hoca(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hoca"))
        .args(args)
        .env_remove("HOCA_LOG")
        .output()
        .expect("run hoca")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8")
}

#[test]
fn reach_push_dec_pop() {
    let f = file(PUSH_DEC_POP);
    let path = f.path().to_str().unwrap();
    let o = hoca(&["reach", path, "--target", "q2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "REACHABLE\ntarget: q2\n");
    let o = hoca(&["reach", path, "--target", "q3"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "UNREACHABLE\ntarget: q3\n");
}

#[test]
fn machine_mode_matches_library() {
    let f = file(PUSH_DEC_POP);
    let path = f.path().to_str().unwrap();
    let a = parse_hocs2(PUSH_DEC_POP).unwrap();
    for q in ["q0", "q1", "q2", "q3"] {
        let lib = reach_state_hocs2(&a, a.state(q).unwrap());
        let o = hoca(&["--machine", "reach", path, "--target", q]);
        let want = format!("verdict\t{}\ntarget\t{q}\n", if lib { "REACHABLE" } else { "UNREACHABLE" });
        assert_eq!(stdout(&o), want);
    }
}

#[test]
fn missing_file_is_usage_error() {
    let o = hoca(&["reach", "missing.hoca", "--target", "q"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing.hoca"));
    let o = hoca(&["reach"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn encode_and_decode() {
    let o = hoca(&["encode", "(q,(_,0))"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "q(_(_,-),-)\n");
    let term = "q(_(_(_(a,_(a,-)),-),_(a,_(_(b,-),-))),-)";
    let o = hoca(&["encode", "(q,(a,2)(a,2)(a,0)(b,1))"]);
    assert_eq!(stdout(&o), format!("{term}\n"));
    let o = hoca(&["--machine", "decode", term]);
    assert_eq!(stdout(&o), "verdict\tVALID\nconfig\t(q,(a,2)(a,2)(a,0)(b,1))\n");
    let o = hoca(&["decode", "q(a,-)"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("INVALID\n"));
}

#[test]
fn table_and_summary() {
    let f = file(PUSH_DEC_POP);
    let path = f.path().to_str().unwrap();
    let o = hoca(&["table", path]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("1 q1 q2 0\n"), "{out}");
    assert!(out.contains("1 q0 q2 inf\n"));
    let o = hoca(&["--machine", "summary-dfa", path]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("states\t1\nline\tM0 -> M0:"));
}

#[test]
fn oracle_verdicts() {
    let f = file(PUSH_DEC_POP);
    let path = f.path().to_str().unwrap();
    let o = hoca(&["oracle", path, "--target", "q2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "REACHABLE\nsteps: 2\nq0 (_,0)\nq1 (_,0)(1,0)\nq2 (_,0)\n");
    let pump = file("storage: P{_,0,1}(C)\nstates: q0 q1\ninitial: q0\ntrans: q0 stay(pushsym(_)) q0\n");
    let o = hoca(&["oracle", pump.path().to_str().unwrap(), "--target", "q1", "--max-counter", "3"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stdout(&o), "NOT_FOUND_WITHIN_CAPS\nexhausted: false\n");
    let o = hoca(&["oracle", path, "--target", "q3"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn pre_and_post_star() {
    let f = file(PUSH_DEC_POP);
    let path = f.path().to_str().unwrap();
    let set = file(
        "ta-state leaf z acc\nta-accept acc\nta-leaf _ -> leaf\nta-node _ (leaf, -) -> z\nta-node q2 (z, -) -> acc\n",
    );
    let set = set.path().to_str().unwrap();
    let o = hoca(&["prestar", path, "--set", set, "--query", "(q0,(_,0))", "--max-height", "3", "--max-counter", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert!(out.starts_with("IN\nquery: (q0,(_,0)) IN\n"), "{out}");
    assert!(out.ends_with("q0 (_,0)\nq1 (_,0)(1,0)\nq2 (_,0)\n"), "{out}");
    let o = hoca(&["poststar", path, "--set", set, "--query", "(q0,(_,0))", "--max-height", "3", "--max-counter", "3"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn transform_matches_library() {
    let src = "storage: P{_,0,1}(C)\nstates: q0 q1\ninitial: q0\ntrans: q0 [top=_] push(1) q1\ntrans: q1 [top=1] pop q0\n";
    let f = file(src);
    let o = hoca(&["transform", f.path().to_str().unwrap(), "--pass", "pop-to-invpush"]);
    assert_eq!(o.status.code(), Some(0));
    let want = print_automaton(&pop_to_invpush(&parse_automaton(src).unwrap()).unwrap());
    assert_eq!(stdout(&o), want);
    let o = hoca(&["transform", f.path().to_str().unwrap(), "--pass", "elim-symbols"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn val_sequences() {
    let o = hoca(&["val", "--storage", "Z", "pushsym(_) [empty=false] pop [empty]"]);
    assert_eq!((o.status.code(), stdout(&o)), (Some(0), "VALID\nletters: 4\n".to_string()));
    let o = hoca(&["val", "--storage", "Z", "pop"]);
    assert_eq!(o.status.code(), Some(1));
    let o = hoca(&["val", "--storage", "P{_,0,1}(C)", "push(1) [top=1] pop [top=1]"]);
    assert_eq!(o.status.code(), Some(1));
    let o = hoca(&["val", "--storage", "Z", "push(1)"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn two_store_primes() {
    let f = file(
        "states: s0 s1 s2\nfinal: s2\n\
         afa div5 {\n  states: r0 r1 r2 r3 r4\n  initial: r0\n  accept: r0\n\
           trans: r0 r1\n  trans: r1 r2\n  trans: r2 r3\n  trans: r3 r4\n  trans: r4 r0\n}\n\
         afa div2 {\n  states: r0 r1\n  initial: r0\n  accept: r0\n  trans: r0 r1\n  trans: r1 r0\n}\n\
         trans: s0 (_, div5) s1\ntrans: s1 (_, div2) s2\n",
    );
    let path = f.path().to_str().unwrap();
    let o = hoca(&["two-store", path, "--query", "(s0,(_,6)(_,10))"]);
    assert_eq!((o.status.code(), stdout(&o)), (Some(0), "ACCEPT\n".to_string()));
    let o = hoca(&["two-store", path, "--query", "(s0,(_,5)(_,10))"]);
    assert_eq!((o.status.code(), stdout(&o)), (Some(1), "REJECT\n".to_string()));
    let o = hoca(&["two-store", path, "--query", "(nope,(_,5))"]);
    assert_eq!(o.status.code(), Some(2));
}
