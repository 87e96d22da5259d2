//! Saturation procedures computing `pre*` and `post*` of regular sets.

use std::collections::{HashMap, VecDeque};

use super::{PAutomaton, Pds};

/// Configurations from which some configuration of `b` is reachable.
pub fn pre_star(pds: &Pds, b: &PAutomaton) -> PAutomaton {
    assert_eq!(b.num_control(), pds.num_states(), "control states must match");
    let mut out = b.without_control_targets();
    // Rules indexed by (target state, first pushed symbol) for |w| = 1, 2.
    let mut by_one: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    let mut by_two: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (i, r) in pds.rules().iter().enumerate() {
        match r.push.len() {
            1 => by_one.entry((r.to, r.push[0])).or_default().push(i),
            2 => by_two.entry((r.to, r.push[0])).or_default().push(i),
            _ => {}
        }
    }
    let mut work: VecDeque<(usize, usize, usize)> = out.transitions().collect();
    // Derived rules (p1,γ1) ↪ (q',γ2) from two-symbol pushes, by (q',γ2).
    let mut derived: HashMap<(usize, usize), Vec<(usize, usize)>> = HashMap::new();
    let rules = pds.rules();
    for r in rules {
        if r.push.is_empty() && out.add_transition(r.from, r.sym, r.to) {
            work.push_back((r.from, r.sym, r.to));
        }
    }
    while let Some((q, g, q2)) = work.pop_front() {
        let mut add = |out: &mut PAutomaton, t: (usize, usize, usize)| {
            if out.add_transition(t.0, t.1, t.2) {
                work.push_back(t);
            }
        };
        if let Some(ids) = by_one.get(&(q, g)) {
            for &i in ids {
                add(&mut out, (rules[i].from, rules[i].sym, q2));
            }
        }
        if let Some(ds) = derived.get(&(q, g)).cloned() {
            for (p1, g1) in ds {
                add(&mut out, (p1, g1, q2));
            }
        }
        if let Some(ids) = by_two.get(&(q, g)) {
            for &i in ids {
                let r = &rules[i];
                let g2 = r.push[1];
                let entry = derived.entry((q2, g2)).or_default();
                if entry.contains(&(r.from, r.sym)) {
                    continue;
                }
                entry.push((r.from, r.sym));
                let targets: Vec<usize> = out.targets(q2, g2).to_vec();
                for q3 in targets {
                    add(&mut out, (r.from, r.sym, q3));
                }
            }
        }
    }
    out
}

/// Configurations reachable from some configuration of `b`.
pub fn post_star(pds: &Pds, b: &PAutomaton) -> PAutomaton {
    assert_eq!(b.num_control(), pds.num_states(), "control states must match");
    let base = b.without_control_targets();
    let mut out = PAutomaton::new(base.num_control());
    for _ in base.num_control()..base.num_states() {
        out.add_state();
    }
    for s in 0..base.num_states() {
        out.set_accepting(s, base.is_accepting(s));
    }
    // Fresh middle states q_{p',γ'} for two-symbol pushes.
    let mut mid: HashMap<(usize, usize), usize> = HashMap::new();
    for r in pds.rules() {
        if r.push.len() == 2 {
            mid.entry((r.to, r.push[0])).or_insert_with(|| out.add_state());
        }
    }
    let n = out.num_states();
    let eps = usize::MAX;
    let mut rel_eps: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut eps_into: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut work: VecDeque<(usize, usize, usize)> = VecDeque::new();
    for (s, g, t) in base.transitions() {
        if s < base.num_control() {
            work.push_back((s, g, t));
        } else {
            out.add_transition(s, g, t);
        }
    }
    let mut by_lhs: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (i, r) in pds.rules().iter().enumerate() {
        by_lhs.entry((r.from, r.sym)).or_default().push(i);
    }
    let rules = pds.rules();
    while let Some((p, g, q)) = work.pop_front() {
        if g == eps {
            if rel_eps[p].contains(&q) {
                continue;
            }
            rel_eps[p].push(q);
            eps_into[q].push(p);
            let outs: Vec<(usize, usize)> = out
                .transitions()
                .filter(|&(s, _, _)| s == q)
                .map(|(_, g2, t)| (g2, t))
                .collect();
            for (g2, t) in outs {
                work.push_back((p, g2, t));
            }
            continue;
        }
        if !out.add_transition(p, g, q) {
            continue;
        }
        // A transition leaving a middle state feeds every ε-edge into it.
        for &p1 in &eps_into[p] {
            work.push_back((p1, g, q));
        }
        if let Some(ids) = by_lhs.get(&(p, g)) {
            for &i in ids {
                let r = &rules[i];
                match r.push.len() {
                    0 => work.push_back((r.to, eps, q)),
                    1 => work.push_back((r.to, r.push[0], q)),
                    _ => {
                        let m = mid[&(r.to, r.push[0])];
                        work.push_back((r.to, r.push[0], m));
                        if out.add_transition(m, r.push[1], q) {
                            for &p1 in &eps_into[m] {
                                work.push_back((p1, r.push[1], q));
                            }
                        }
                    }
                }
            }
        }
    }
    // ε-edges only leave control states and only enter other states, so one
    // round of elimination suffices.
    for p in 0..out.num_control() {
        for &q in &rel_eps[p].clone() {
            if out.is_accepting(q) {
                out.set_accepting(p, true);
            }
            let outs: Vec<(usize, usize)> = out
                .transitions()
                .filter(|&(s, _, _)| s == q)
                .map(|(_, g, t)| (g, t))
                .collect();
            for (g, t) in outs {
                out.add_transition(p, g, t);
            }
        }
    }
    out
}

/// Whether some configuration with control state `target` is reachable
/// from `(p, w)`.
pub fn reach_pda(pds: &Pds, p: usize, w: &[usize], target: usize) -> bool {
    if p == target {
        return true;
    }
    let b = PAutomaton::all_of_control(pds.num_states(), pds.num_symbols(), target);
    pre_star(pds, &b).accepts(p, w)
}

/// Whether `(p2, w2)` is reachable from `(p1, w1)`.
pub fn reach_pda_config(pds: &Pds, p1: usize, w1: &[usize], p2: usize, w2: &[usize]) -> bool {
    let b = PAutomaton::singleton(pds.num_states(), p2, w2);
    pre_star(pds, &b).accepts(p1, w1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_rules_is_identity() {
        let pds = Pds::new(2, 2);
        let b = PAutomaton::singleton(2, 1, &[0, 1]);
        assert_eq!(pre_star(&pds, &b).enumerate(2, 4), b.enumerate(2, 4));
        assert_eq!(post_star(&pds, &b).enumerate(2, 4), b.enumerate(2, 4));
    }

    #[test]
    fn single_pop_rule() {
        let mut pds = Pds::new(2, 1);
        pds.add_rule(0, 0, 1, &[]);
        let b = PAutomaton::singleton(2, 1, &[]);
        let pre = pre_star(&pds, &b);
        assert_eq!(pre.enumerate(1, 3), vec![(0, vec![0]), (1, vec![])]);
        let post = post_star(&pds, &PAutomaton::singleton(2, 0, &[0]));
        assert_eq!(post.enumerate(1, 3), vec![(0, vec![0]), (1, vec![])]);
    }

    #[test]
    fn push_then_pop_cycle() {
        let mut pds = Pds::new(2, 2);
        pds.add_rule(0, 0, 1, &[1, 0]);
        pds.add_rule(1, 1, 0, &[]);
        assert!(reach_pda_config(&pds, 0, &[0], 0, &[0]));
        assert!(reach_pda_config(&pds, 0, &[0], 1, &[1, 0]));
        assert!(!reach_pda_config(&pds, 1, &[0], 0, &[0]));
    }

    #[test]
    fn chain_matrix() {
        // p -a/ε-> q -b/ε-> r consumes "a b".
        let mut pds = Pds::new(3, 2);
        pds.add_rule(0, 0, 1, &[]);
        pds.add_rule(1, 1, 2, &[]);
        pds.add_rule(2, 0, 2, &[0]);
        assert!(reach_pda(&pds, 0, &[0, 1], 2));
        assert!(!reach_pda(&pds, 0, &[0, 0], 2));
        assert!(reach_pda(&pds, 0, &[0, 0], 1));
        assert!(!reach_pda(&pds, 1, &[0], 2));
        assert!(reach_pda(&pds, 1, &[0], 1));
    }
}
