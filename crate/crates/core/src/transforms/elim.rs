//! Elimination of level-2 symbols: a `P_Σ(Z)` automaton is simulated over
//! `P_{⊥}(Z)` by storing the top symbol as the counter value modulo `|Σ|`.
//!
//! An entry `(σ, n)` becomes `(⊥, |Σ|·n + code(σ))` with `code(⊥) = |Σ|−1`
//! and `code(σ_i) = i−1` for the other symbols.

use std::collections::BTreeMap;

use crate::storage::{Alphabet, OpId, StateId, StorageAutomaton, StorageExpr, Sym, TestId};

use super::{check_input, classify, split_bits, split_pushes, Guard, Inner, Out, Step, TransformError, ANY};

fn code(k: usize, s: Sym) -> usize {
    if s.is_bottom() {
        k - 1
    } else {
        s.index() - 1
    }
}

fn repeat(op: OpId, n: usize) -> Vec<OpId> {
    vec![op; n]
}

pub fn eliminate_level2_symbols(a: &StorageAutomaton) -> Result<StorageAutomaton, TransformError> {
    let (k, inner) = check_input(a, false)?;
    if inner != StorageExpr::ZCounter {
        return Err(TransformError::UnsupportedStorage(a.storage().to_string()));
    }
    let a = split_pushes(a)?;
    let inc = Inner::Inc.op();
    let dec = Inner::Dec.op();
    let stay = |op: &OpId| OpId::stay(op.clone());
    let st = StorageExpr::pushdown(Alphabet::bottom_only(), StorageExpr::ZCounter);
    let empty = TestId::Inner(Box::new(TestId::Empty));
    let mut out = Out::like(&a, st)?;

    let q0 = a.initial();
    let init = out.fresh(&format!("{}.init", a.state_name(q0)));
    out.a.set_initial(init);
    out.chain(init, ANY, &repeat(stay(&inc), k - 1), q0, &format!("{}.init", a.state_name(q0)));

    let mut steps = Vec::with_capacity(a.transitions().len());
    for t in a.transitions() {
        steps.push(classify(&a, t.from, &t.op)?);
    }

    for q in 0..a.num_states() {
        if a.outgoing(q).is_empty() {
            continue;
        }
        let name = a.state_name(q).to_string();
        // Program 1: copy the entry, count decrements modulo k until zero,
        // drop the copy. Lands in d[j] where j is the code of the top symbol.
        let r: Vec<StateId> = (0..k).map(|j| out.fresh(&format!("{name}.m{j}"))).collect();
        out.step(q, ANY, OpId::PushPair(Sym::BOTTOM), r[0]);
        let mut d: BTreeMap<usize, StateId> = BTreeMap::new();
        let used: std::collections::BTreeSet<usize> = a
            .outgoing(q)
            .iter()
            .map(|&i| code(k, split_bits(k, a.transitions()[i].tests).0))
            .collect();
        for j in 0..k {
            out.step(r[j], Guard::Partial(&[(empty.clone(), false)]), stay(&dec), r[(j + 1) % k]);
            if used.contains(&j) {
                let dj = out.fresh(&format!("{name}.d{j}"));
                out.step(r[j], Guard::Partial(&[(empty.clone(), true)]), OpId::Pop, dj);
                d.insert(j, dj);
            }
        }
        // Program 2: remove the code, read the zero test, restore.
        let mut z: BTreeMap<(usize, bool), StateId> = BTreeMap::new();
        for (&j, &dj) in &d {
            let ej = if j == 0 {
                dj
            } else {
                let ej = out.fresh(&format!("{name}.e{j}"));
                out.chain(dj, ANY, &repeat(stay(&dec), j), ej, &format!("{name}.e{j}"));
                ej
            };
            for e in [true, false] {
                let zj = out.fresh(&format!("{name}.z{j}{}", if e { "t" } else { "f" }));
                let base = format!("{name}.z{j}{}", if e { "t" } else { "f" });
                out.chain(ej, Guard::Partial(&[(empty.clone(), e)]), &repeat(stay(&inc), j), zj, &base);
                z.insert((j, e), zj);
            }
        }
        for &i in a.outgoing(q) {
            let t = &a.transitions()[i];
            let (sigma, inner_bits) = split_bits(k, t.tests);
            let is_zero = inner_bits & 2 != 0;
            let c = code(k, sigma);
            let from = z[&(c, is_zero)];
            let base = format!("{name}.t{i}");
            let ops: Vec<OpId> = match steps[i] {
                Step::Nop => vec![],
                Step::Pop => vec![OpId::Pop],
                Step::Push(g) => {
                    let mut v = vec![OpId::PushPair(Sym::BOTTOM)];
                    v.extend(repeat(stay(&dec), c));
                    v.extend(repeat(stay(&inc), code(k, g)));
                    v
                }
                Step::Stay(Inner::Inc) => repeat(stay(&inc), k),
                Step::Stay(Inner::Dec) => repeat(stay(&dec), k),
                Step::InvPush(_) => {
                    return Err(TransformError::UnsupportedOp {
                        op: t.op.display(a.storage()),
                        from: name,
                    })
                }
            };
            out.chain(from, ANY, &ops, t.to, &base);
        }
    }
    Ok(out.a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::storage::{parse_automaton, Caps};
    use crate::transforms::testutil::reach_set;

    #[test]
    fn transition_free() {
        let a = parse_automaton("storage: P{_,0,1}(Z)\nstates: q0 q1\ninitial: q0\n").unwrap();
        let b = eliminate_level2_symbols(&a).unwrap();
        let caps = Caps::new(vec![4], 12, 200);
        assert_eq!(reach_set(&b, 2, &caps), [0].into_iter().collect());
    }

    #[test]
    fn single_push() {
        let a = parse_automaton(
            "storage: P{_,0,1}(Z)\nstates: q0 q1\ninitial: q0\ntrans: q0 [top=_] push(1) q1\n",
        )
        .unwrap();
        let b = eliminate_level2_symbols(&a).unwrap();
        let caps = Caps::new(vec![4], 12, 200);
        assert_eq!(reach_set(&b, 2, &caps), [0, 1].into_iter().collect());
    }

    #[test]
    fn symbol_and_zero_tests_are_exact() {
        // q2 needs top=1 with a zero counter, q3 needs top=0 (never pushed).
        let a = parse_automaton(
            "storage: P{_,0,1}(Z)\nstates: q0 q1 q2 q3\ninitial: q0\n\
             trans: q0 [top=_] stay(pushsym(_)) q0\n\
             trans: q0 [top=_, inner(empty=false)] push(1) q1\n\
             trans: q1 [top=1, inner(empty=false)] stay(pop) q1\n\
             trans: q1 [top=1, inner(empty)] id q2\n\
             trans: q1 [top=0] id q3\n",
        )
        .unwrap();
        let b = eliminate_level2_symbols(&a).unwrap();
        let caps = Caps::new(vec![4], 12, 400);
        let want = reach_set(&a, 4, &caps);
        assert_eq!(want, [0, 1, 2].into_iter().collect());
        assert_eq!(reach_set(&b, 4, &caps), want);
    }

    #[test]
    fn rejects_counter_without_zero_test() {
        let a = parse_automaton("storage: P{_,0,1}(C)\nstates: q0\ninitial: q0\n").unwrap();
        assert!(matches!(
            eliminate_level2_symbols(&a),
            Err(TransformError::UnsupportedStorage(_))
        ));
    }
}
