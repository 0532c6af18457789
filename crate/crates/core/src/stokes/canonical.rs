//! Canonical form of a Stokes graph up to relabelling of rays and branch vertices.
//! Puncture labels and orientation are kept.

use super::graph::StokesGraph;
use std::collections::VecDeque;

/// Half-edge 2r is ray r at its branch vertex, 2r + 1 at its puncture.
fn successor(g: &StokesGraph, h: usize) -> usize {
    let r = h / 2;
    if h % 2 == 0 {
        let rot = &g.branches[g.rays[r].branch];
        let k = rot.iter().position(|&x| x == r).expect("ray at its branch");
        2 * rot[(k + 1) % 3]
    } else {
        let rot = &g.poles[g.rays[r].pole];
        let k = rot.iter().position(|&x| x == r).expect("ray at its pole");
        2 * rot[(k + 1) % rot.len()] + 1
    }
}

fn code_from(g: &StokesGraph, start: usize) -> Vec<usize> {
    let n = 2 * g.rays.len();
    let mut label = vec![usize::MAX; n];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::from([start]);
    label[start] = 0;
    order.push(start);
    while let Some(h) = queue.pop_front() {
        for nb in [h ^ 1, successor(g, h)] {
            if label[nb] == usize::MAX {
                label[nb] = order.len();
                order.push(nb);
                queue.push_back(nb);
            }
        }
    }
    let mut code = Vec::with_capacity(3 * n);
    for &h in &order {
        code.push(label[h ^ 1]);
        code.push(label[successor(g, h)]);
        code.push(if h % 2 == 1 { g.rays[h / 2].pole } else { usize::MAX });
    }
    code
}

/// Lexicographically least code over all branch-side starting half-edges.
pub fn canonical_code(g: &StokesGraph) -> Vec<usize> {
    (0..g.rays.len()).map(|r| code_from(g, 2 * r)).min().unwrap_or_default()
}

pub fn isomorphic(a: &StokesGraph, b: &StokesGraph) -> bool {
    a.rays.len() == b.rays.len() && a.poles.len() == b.poles.len() && canonical_code(a) == canonical_code(b)
}
