//! Exhaustive enumeration of small trees.

use super::{BinTree, Label};

/// Shape of a tree: each node has an optional left and right child.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Shape {
    Node(Option<Box<Shape>>, Option<Box<Shape>>),
}

/// All shapes with exactly `n` nodes.
pub fn shapes(n: usize) -> Vec<Shape> {
    let mut by_size: Vec<Vec<Shape>> = vec![Vec::new()];
    for size in 1..=n {
        let mut out = Vec::new();
        for l in 0..size {
            let r = size - 1 - l;
            let lefts: Vec<Option<Box<Shape>>> = if l == 0 {
                vec![None]
            } else {
                by_size[l].iter().cloned().map(|s| Some(Box::new(s))).collect()
            };
            let rights: Vec<Option<Box<Shape>>> = if r == 0 {
                vec![None]
            } else {
                by_size[r].iter().cloned().map(|s| Some(Box::new(s))).collect()
            };
            for a in &lefts {
                for b in &rights {
                    out.push(Shape::Node(a.clone(), b.clone()));
                }
            }
        }
        by_size.push(out);
    }
    by_size.pop().unwrap_or_default()
}

fn fill(shape: &Shape, labels: &[Label], digits: &[usize], pos: &mut usize) -> BinTree {
    let Shape::Node(l, r) = shape;
    let label = labels[digits[*pos]];
    *pos += 1;
    let left = l.as_deref().map(|s| fill(s, labels, digits, pos));
    let right = r.as_deref().map(|s| fill(s, labels, digits, pos));
    BinTree::node(label, left, right)
}

/// Calls `f` on every tree with `1..=max_nodes` nodes labelled from
/// `labels`.
pub fn for_each_tree(labels: &[Label], max_nodes: usize, mut f: impl FnMut(&BinTree)) {
    if labels.is_empty() {
        return;
    }
    for n in 1..=max_nodes {
        let all = shapes(n);
        let mut digits = vec![0usize; n];
        loop {
            for s in &all {
                let t = fill(s, labels, &digits, &mut 0);
                f(&t);
            }
            let mut i = 0;
            while i < n {
                digits[i] += 1;
                if digits[i] < labels.len() {
                    break;
                }
                digits[i] = 0;
                i += 1;
            }
            if i == n {
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::storage::Sym;

    #[test]
    fn catalan_counts() {
        let counts: Vec<usize> = (1..=6).map(|n| shapes(n).len()).collect();
        assert_eq!(counts, vec![1, 2, 5, 14, 42, 132]);
    }

    #[test]
    fn labelled_count() {
        let labels = [Label::Sym(Sym(0)), Label::Sym(Sym(1))];
        let mut n = 0;
        for_each_tree(&labels, 3, |_| n += 1);
        assert_eq!(n, 2 + 2 * 4 + 5 * 8);
    }
}
