//! Conversions between pushdowns with `pop` and pushdowns with inverse
//! push, by annotating every entry with the operation that undoes it.
//!
//! Annotated symbols `(γ, a)` use `a = 0` for an entry created by a plain
//! push, `a = 1` for an entry undone by an increment and `a = 2` for an
//! entry undone by a decrement. The bottom entry counts as `(⊥, 0)`. Each
//! annotated symbol is stored as a block of `b` entries over `{⊥, 0, 1}`
//! sharing the same counter, most significant digit lowest.

use std::collections::BTreeMap;

use crate::storage::{Alphabet, OpId, StateId, StorageAutomaton, StorageExpr, Sym, TestId};

use super::{check_input, classify, split_bits, split_pushes, Guard, Inner, Out, Step, TransformError, ANY};

const ANNOTATIONS: usize = 3;

/// Number of annotated symbols over a level-2 alphabet of size `sigma`.
pub fn annotated_alphabet_size(sigma: usize) -> usize {
    sigma * ANNOTATIONS
}

/// Digits per block: the least `b ≥ 1` with `3^b ≥ count`.
pub fn block_width(count: usize) -> usize {
    let mut b = 1;
    let mut cap = 3;
    while cap < count {
        b += 1;
        cap *= 3;
    }
    b
}

fn undo_ann(f: Inner) -> usize {
    match f {
        Inner::Inc => 1,
        Inner::Dec => 2,
    }
}

fn ann_undo(a: usize) -> Option<Inner> {
    match a {
        1 => Some(Inner::Inc),
        2 => Some(Inner::Dec),
        _ => None,
    }
}

#[derive(Copy, Clone, Debug)]
struct Code {
    width: usize,
    count: usize,
}

impl Code {
    fn index(s: Sym, ann: usize) -> usize {
        s.index() * ANNOTATIONS + ann
    }

    fn split(idx: usize) -> (Sym, usize) {
        (Sym((idx / ANNOTATIONS) as u16), idx % ANNOTATIONS)
    }

    /// Digits lowest entry first.
    fn digits(&self, idx: usize) -> Vec<Sym> {
        let mut v = vec![Sym(0); self.width];
        let mut n = idx;
        for d in v.iter_mut().rev() {
            *d = Sym((n % 3) as u16);
            n /= 3;
        }
        v
    }

    fn value(digits_low_first: &[Sym]) -> usize {
        digits_low_first.iter().fold(0, |acc, d| acc * 3 + d.index())
    }
}

/// How a read removes the top entry of a block.
#[derive(Copy, Clone, PartialEq, Eq)]
enum Removal {
    Pop,
    InvPush,
}

impl Removal {
    fn op(self, d: Sym) -> OpId {
        match self {
            Removal::Pop => OpId::Pop,
            Removal::InvPush => OpId::InvPush(d),
        }
    }
}

fn digit_name(d: Sym) -> &'static str {
    ["_", "0", "1"][d.index()]
}

/// Reads the annotated symbol on top. Returns, per valid code, the state
/// reached; with `restore` the block is rebuilt, otherwise only its lowest
/// entry remains.
fn read_block(out: &mut Out, from: StateId, code: Code, removal: Removal, restore: bool, base: &str) -> BTreeMap<usize, StateId> {
    let mut result = BTreeMap::new();
    // Known top digits, topmost first.
    let mut frontier: Vec<(StateId, Vec<Sym>, String)> = vec![(from, Vec::new(), base.to_string())];
    while let Some((state, known, name)) = frontier.pop() {
        let fits = |tail: &[Sym]| -> bool {
            (0..code.count).any(|idx| {
                let ds = code.digits(idx);
                let n = ds.len();
                tail.iter().enumerate().all(|(k, d)| ds[n - 1 - k] == *d)
            })
        };
        for d in (0..3).map(|v| Sym(v as u16)) {
            let mut next = known.clone();
            next.push(d);
            if !fits(&next) {
                continue;
            }
            let top = [(TestId::Top(d), true)];
            let sub = format!("{name}.{}", digit_name(d));
            if next.len() == code.width {
                let low_first: Vec<Sym> = next.iter().rev().copied().collect();
                let idx = Code::value(&low_first);
                let done = out.fresh(&format!("{base}.s{idx}"));
                let ops: Vec<OpId> = if restore {
                    low_first[1..].iter().map(|&x| OpId::PushPair(x)).collect()
                } else {
                    Vec::new()
                };
                out.chain(state, Guard::Partial(&top), &ops, done, &sub);
                result.insert(idx, done);
            } else {
                let s = out.fresh(&sub);
                out.step(state, Guard::Partial(&top), removal.op(d), s);
                frontier.push((s, next, sub));
            }
        }
    }
    result
}

fn push_block(code: Code, idx: usize, f: Option<Inner>) -> Vec<OpId> {
    code.digits(idx)
        .into_iter()
        .enumerate()
        .map(|(k, d)| match (k, f) {
            (0, Some(f)) => OpId::PushWith(d, Box::new(f.op())),
            _ => OpId::PushPair(d),
        })
        .collect()
}

/// Removes every entry of the block above its lowest one.
fn strip_upper(code: Code, idx: usize, removal: Removal) -> Vec<OpId> {
    code.digits(idx)[1..].iter().rev().map(|&d| removal.op(d)).collect()
}

fn build(a: &StorageAutomaton, inverse_input: bool) -> Result<StorageAutomaton, TransformError> {
    let (sigma, inner) = check_input(a, inverse_input)?;
    let a = split_pushes(a)?;
    let count = annotated_alphabet_size(sigma);
    let code = Code {
        width: block_width(count),
        count,
    };
    let (st, removal) = if inverse_input {
        (StorageExpr::pushdown(Alphabet::binary(), inner), Removal::Pop)
    } else {
        (StorageExpr::pushdown_inv(Alphabet::binary(), inner), Removal::InvPush)
    };
    let mut out = Out::like(&a, st)?;
    let q0 = a.initial();
    let init_name = format!("{}.init", a.state_name(q0));
    let init = out.fresh(&init_name);
    out.a.set_initial(init);
    let bottom = code.digits(Code::index(Sym::BOTTOM, 0));
    let ops: Vec<OpId> = bottom[1..].iter().map(|&d| OpId::PushPair(d)).collect();
    out.chain(init, ANY, &ops, q0, &init_name);

    let mut steps = Vec::with_capacity(a.transitions().len());
    for t in a.transitions() {
        steps.push(classify(&a, t.from, &t.op)?);
    }
    for q in 0..a.num_states() {
        if a.outgoing(q).is_empty() {
            continue;
        }
        let name = a.state_name(q).to_string();
        let reads = read_block(&mut out, q, code, removal, true, &format!("{name}.rd"));
        for &i in a.outgoing(q) {
            let t = &a.transitions()[i];
            let (top, inner_bits) = split_bits(sigma, t.tests);
            let unsupported = || TransformError::UnsupportedOp {
                op: t.op.display(a.storage()),
                from: name.clone(),
            };
            let mut unwind: Option<StateId> = None;
            for ann in 0..ANNOTATIONS {
                let idx = Code::index(top, ann);
                let Some(&s) = reads.get(&idx) else { continue };
                let digits = code.digits(idx);
                let guard = Guard::Exact((1u64 << digits[code.width - 1].index()) | (inner_bits << 3));
                let base = format!("{name}.t{i}.a{ann}");
                let whole: Vec<OpId> = digits.iter().rev().map(|&d| removal.op(d)).collect();
                let ops: Vec<OpId> = match steps[i] {
                    Step::Nop => vec![],
                    Step::Push(g) => push_block(code, Code::index(g, 0), None),
                    Step::Stay(f) if ann == undo_ann(f) => {
                        if inverse_input {
                            whole
                        } else {
                            let mut v = strip_upper(code, idx, removal);
                            v.push(OpId::stay(f.op()));
                            v.push(removal.op(digits[0]));
                            v
                        }
                    }
                    Step::Stay(f) => push_block(code, Code::index(top, undo_ann(f.inverse())), Some(f)),
                    Step::InvPush(g) if inverse_input => {
                        if g != top || ann != 0 {
                            continue;
                        }
                        whole
                    }
                    Step::Pop if !inverse_input => match ann_undo(ann) {
                        None => whole,
                        Some(g) => {
                            let u = *unwind.get_or_insert_with(|| out.fresh(&format!("{name}.t{i}.u")));
                            let mut v = strip_upper(code, idx, removal);
                            v.push(OpId::stay(g.op()));
                            v.push(removal.op(digits[0]));
                            out.chain(s, guard, &v, u, &base);
                            continue;
                        }
                    },
                    Step::InvPush(_) | Step::Pop => return Err(unsupported()),
                };
                out.chain(s, guard, &ops, t.to, &base);
            }
            if let Some(u) = unwind {
                // Undo stay-blocks until a push-block is on top, then drop it.
                let ureads = read_block(&mut out, u, code, removal, false, &format!("{name}.t{i}.u"));
                for (idx, s) in ureads {
                    let (_, ann) = Code::split(idx);
                    let low = code.digits(idx)[0];
                    let base = format!("{name}.t{i}.u{idx}");
                    match ann_undo(ann) {
                        None => out.chain(s, ANY, &[removal.op(low)], t.to, &base),
                        Some(g) => out.chain(s, ANY, &[OpId::stay(g.op()), removal.op(low)], u, &base),
                    }
                }
            }
        }
    }
    Ok(out.a)
}

/// Simulates a `P_Σ(S)` automaton (`S` a counter type) by a
/// `Pinv_{⊥,0,1}(S)` automaton.
pub fn pop_to_invpush(a: &StorageAutomaton) -> Result<StorageAutomaton, TransformError> {
    build(a, false)
}

/// Simulates a `Pinv_Σ(S)` automaton (`S` a counter type) by a
/// `P_{⊥,0,1}(S)` automaton.
pub fn invpush_to_pop(a: &StorageAutomaton) -> Result<StorageAutomaton, TransformError> {
    build(a, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::storage::{parse_automaton, Caps};
    use crate::transforms::testutil::reach_set;

    #[test]
    fn widths() {
        assert_eq!(block_width(3), 1);
        assert_eq!(block_width(9), 2);
        assert_eq!(block_width(10), 3);
        let c = Code { width: 2, count: 9 };
        assert_eq!(c.digits(0), vec![Sym(0), Sym(0)]);
        assert_eq!(c.digits(5), vec![Sym(1), Sym(2)]);
        assert_eq!(Code::value(&c.digits(7)), 7);
    }

    #[test]
    fn transition_free() {
        let a = parse_automaton("storage: P{_,0,1}(C)\nstates: q0 q1\ninitial: q0\n").unwrap();
        let b = pop_to_invpush(&a).unwrap();
        let caps = Caps::new(vec![6], 4, 100);
        assert_eq!(reach_set(&b, 2, &caps), [0].into_iter().collect());
        let a = parse_automaton("storage: Pinv{_,0,1}(C)\nstates: q0 q1\ninitial: q0\n").unwrap();
        let b = invpush_to_pop(&a).unwrap();
        assert_eq!(reach_set(&b, 2, &caps), [0].into_iter().collect());
    }

    #[test]
    fn push_then_pop() {
        let a = parse_automaton(
            "storage: P{_,0,1}(C)\nstates: q0 q1 q2 q3\ninitial: q0\n\
             trans: q0 [top=_] push(0) q1\n\
             trans: q1 [top=0] pop q2\n\
             trans: q2 [top=_] pop q3\n",
        )
        .unwrap();
        let b = pop_to_invpush(&a).unwrap();
        let caps = Caps::new(vec![8], 4, 200);
        let want = reach_set(&a, 4, &caps);
        assert_eq!(want, [0, 1, 2].into_iter().collect());
        assert_eq!(reach_set(&b, 4, &caps), want);
    }

    #[test]
    fn pop_after_counter_change_unwinds() {
        // The pop follows an increment on the pushed copy.
        let a = parse_automaton(
            "storage: P{_,0,1}(C)\nstates: q0 q1 q2 q3\ninitial: q0\n\
             trans: q0 [top=_] push(1) q1\n\
             trans: q1 [top=1] stay(pushsym(_)) q2\n\
             trans: q2 [top=1] pop q3\n",
        )
        .unwrap();
        let b = pop_to_invpush(&a).unwrap();
        let caps = Caps::new(vec![8], 4, 200);
        assert_eq!(reach_set(&a, 4, &caps), [0, 1, 2, 3].into_iter().collect());
        assert_eq!(reach_set(&b, 4, &caps), [0, 1, 2, 3].into_iter().collect());
    }

    #[test]
    fn invpush_requires_equal_counters() {
        let a = parse_automaton(
            "storage: Pinv{_,0,1}(C)\nstates: q0 q1 q2 q3 q4\ninitial: q0\n\
             trans: q0 [top=_] push(1) q1\n\
             trans: q1 [top=1] stay(pushsym(_)) q2\n\
             trans: q2 [top=1] invpush(1) q3\n\
             trans: q2 [top=1] stay(pop) q1\n\
             trans: q1 [top=1] invpush(1) q4\n",
        )
        .unwrap();
        let b = invpush_to_pop(&a).unwrap();
        let caps = Caps::new(vec![8], 4, 200);
        let want = reach_set(&a, 5, &caps);
        assert_eq!(want, [0, 1, 2, 4].into_iter().collect());
        assert_eq!(reach_set(&b, 5, &caps), want);
    }

    #[test]
    fn round_trip() {
        let a = parse_automaton(
            "storage: P{_,0,1}(Z)\nstates: q0 q1 q2 q3\ninitial: q0\n\
             trans: q0 [top=_] stay(pushsym(_)) q0\n\
             trans: q0 [top=_] push(0) q1\n\
             trans: q1 [top=0, inner(empty=false)] stay(pop) q1\n\
             trans: q1 [top=0, inner(empty)] pop q2\n\
             trans: q2 [top=_, inner(empty=false)] id q2\n\
             trans: q2 [top=0] id q3\n",
        )
        .unwrap();
        let b = invpush_to_pop(&pop_to_invpush(&a).unwrap()).unwrap();
        let caps = Caps::new(vec![6], 3, 200);
        let want = reach_set(&a, 4, &caps);
        assert_eq!(want, [0, 1, 2].into_iter().collect());
        let caps = Caps::new(vec![12], 3, 400);
        assert_eq!(reach_set(&b, 4, &caps), want);
    }
}
