//! Normalization of arbitrary `P_Σ(C)` automata into restricted form.

use crate::storage::{OpId, StateId, StorageAutomaton, StorageError, StorageExpr, Sym};

use super::{Hocs2, Hocs2Error, L2Op};

/// The restricted operation denoted by `op`, if it is one.
pub fn op_to_l2(op: &OpId) -> Option<L2Op> {
    match op {
        OpId::Pop => Some(L2Op::Pop),
        OpId::PushPair(s) => Some(L2Op::Push(*s)),
        OpId::Id => Some(L2Op::Nop),
        OpId::Stay(g) => match **g {
            OpId::PushSym(_) => Some(L2Op::Inc),
            OpId::Pop => Some(L2Op::Dec),
            OpId::Id => Some(L2Op::Nop),
            _ => None,
        },
        _ => None,
    }
}

fn level1_op(g: &OpId) -> Option<L2Op> {
    match g {
        OpId::PushSym(_) => Some(L2Op::Inc),
        OpId::Pop => Some(L2Op::Dec),
        OpId::Id => Some(L2Op::Nop),
        _ => None,
    }
}

/// Restricts the operations of `aut` and adds a drain state `q̂` such that
/// `q` is reachable in `aut` iff `(q̂, (⊥,0))` is reachable in the result.
///
/// Composite pushes `push_{γ,f}` become `push_{γ,id}` followed by `stay_f`
/// through a fresh state. The drain state is the final state of the result.
pub fn normalize(aut: &StorageAutomaton, q: StateId) -> Result<(Hocs2, StateId), Hocs2Error> {
    let alphabet = match aut.storage() {
        StorageExpr::Pushdown { alphabet, inner } if **inner == StorageExpr::Counter => alphabet.clone(),
        other => return Err(Hocs2Error::WrongStorage(other.to_string())),
    };
    let n = alphabet.len();
    let names = aut.state_names();
    let mut out = Hocs2::new(alphabet.clone(), &names[0]);
    for name in &names[1..] {
        out.add_state(name);
    }
    out.set_initial(aut.initial());
    let st = aut.storage().clone();
    for (i, t) in aut.transitions().iter().enumerate() {
        let tops = t.tests & ((1u64 << n) - 1);
        if tops.count_ones() != 1 || t.tests >> n & 1 == 0 {
            // No configuration produces this vector.
            continue;
        }
        let top = Sym(tops.trailing_zeros() as u16);
        if let Some(op) = op_to_l2(&t.op) {
            out.add_transition(t.from, top, op, t.to);
            continue;
        }
        match &t.op {
            OpId::PushWith(s, g) => {
                let g = level1_op(g).ok_or_else(|| StorageError::IllTypedOp(t.op.display(&st)))?;
                let mid = out.fresh_state(&format!("{}.{}", names[t.from], i));
                out.add_transition(t.from, top, L2Op::Push(*s), mid);
                out.add_transition(mid, *s, g, t.to);
            }
            other => return Err(StorageError::IllTypedOp(other.display(&st)).into()),
        }
    }
    let drain = out.fresh_state(&format!("{}^", names[q]));
    for s in alphabet.symbols() {
        out.add_transition(q, s, L2Op::Nop, drain);
    }
    for s in alphabet.symbols() {
        out.add_transition(drain, s, L2Op::Pop, drain);
        out.add_transition(drain, s, L2Op::Dec, drain);
    }
    out.set_final(drain);
    Ok((out, drain))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hoca2::L2Config;
    use crate::storage::{parse_automaton, reach_config_oracle, reach_oracle, Caps};

    #[test]
    fn gadget_only() {
        let a = parse_automaton("storage: P{_,0,1}(C)\nstates: q0 q1\ninitial: q0\ntrans: q0 [top=_] push(1) q1\n")
            .unwrap();
        let (h, drain) = normalize(&a, 1).unwrap();
        assert_eq!(h.num_states(), 3);
        assert_eq!(h.transitions().len(), 1 + 3 * 3);
        assert_eq!(h.state_name(drain), "q1^");
    }

    #[test]
    fn composite_push_is_split() {
        let a = parse_automaton("storage: P{_,0,1}(C)\nstates: q0 q1\ninitial: q0\ntrans: q0 [top=_] push(1,pushsym(_)) q1\n")
            .unwrap();
        let (h, _) = normalize(&a, 1).unwrap();
        let t = h.transitions();
        assert_eq!(t[0].op, L2Op::Push(Sym(2)));
        assert_eq!(t[1].op, L2Op::Inc);
        assert_eq!(t[1].top, Sym(2));
        assert_eq!(t[0].to, t[1].from);
    }

    #[test]
    fn drain_reaches_bottom() {
        let a = parse_automaton(
            "storage: P{_,0,1}(C)\nstates: q0 q1\ninitial: q0\n\
             trans: q0 [top=_] stay(pushsym(_)) q0\ntrans: q0 [top=_] push(1) q1\n",
        )
        .unwrap();
        let caps = Caps::new(vec![4], 6, 30);
        assert!(reach_oracle(&a, 1, &caps).is_reachable());
        let (h, drain) = normalize(&a, 1).unwrap();
        let s = h.to_storage_automaton();
        assert!(reach_config_oracle(&s, drain, &L2Config::initial().to_storage(), &caps).is_reachable());
    }
}
