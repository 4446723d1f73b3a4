//! Fill-reducing ordering by recursive graph bisection (automatic nested
//! dissection): the middle level set of a breadth-first search from a
//! pseudo-peripheral vertex is taken as separator and numbered last.

use std::collections::VecDeque;

const LEAF_SIZE: usize = 48;

/// Returns `order` with `order[k]` = vertex eliminated at step `k`.
/// `adjacency[v]` lists the neighbours of `v` (self loops are ignored).
pub fn nested_dissection(adjacency: &[Vec<usize>]) -> Vec<usize> {
    let n = adjacency.len();
    let mut order = Vec::with_capacity(n);
    let mut label = vec![usize::MAX; n];
    let mut stamp = vec![usize::MAX; n];
    let mut visited = vec![false; n];
    let all: Vec<usize> = (0..n).collect();
    let mut tag = 0usize;
    // components first
    for comp in components(adjacency, &all, &mut label, &mut tag) {
        dissect(adjacency, comp, &mut order, &mut label, &mut stamp, &mut visited, &mut tag);
    }
    debug_assert_eq!(order.len(), n);
    order
}

/// Nested dissection on the quotient graph of `a` where row `r` belongs to
/// block `block_of[r]`; rows of one block stay consecutive in the result.
pub fn nested_dissection_blocks(a: &crate::sparse::CsrMatrix, block_of: &[usize], n_blocks: usize) -> Vec<usize> {
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n_blocks];
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); n_blocks];
    for r in 0..a.n_rows() {
        let g = block_of[r];
        members[g].push(r);
        adj[g].extend(a.row(r).0.iter().map(|&c| block_of[c]).filter(|&h| h != g));
    }
    for v in adj.iter_mut() {
        v.sort_unstable();
        v.dedup();
    }
    nested_dissection(&adj).into_iter().flat_map(|g| members[g].clone()).collect()
}

fn components(adjacency: &[Vec<usize>], verts: &[usize], label: &mut [usize], tag: &mut usize) -> Vec<Vec<usize>> {
    *tag += 1;
    let member = *tag;
    for &v in verts {
        label[v] = member;
    }
    *tag += 1;
    let seen = *tag;
    let mut out = Vec::new();
    for &s in verts {
        if label[s] != member {
            continue;
        }
        let mut comp = vec![s];
        label[s] = seen;
        let mut head = 0;
        while head < comp.len() {
            let v = comp[head];
            head += 1;
            for &w in &adjacency[v] {
                if label[w] == member {
                    label[w] = seen;
                    comp.push(w);
                }
            }
        }
        out.push(comp);
    }
    out
}

/// BFS levels restricted to vertices carrying `label == member`.
fn levels(adjacency: &[Vec<usize>], root: usize, member: usize, label: &[usize], stamp: &mut [usize], tag: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![vec![root]];
    stamp[root] = tag;
    loop {
        let mut next = Vec::new();
        for &v in out.last().unwrap() {
            for &w in &adjacency[v] {
                if label[w] == member && stamp[w] != tag {
                    stamp[w] = tag;
                    next.push(w);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        out.push(next);
    }
    out
}

fn dissect(
    adjacency: &[Vec<usize>],
    verts: Vec<usize>,
    order: &mut Vec<usize>,
    label: &mut [usize],
    stamp: &mut [usize],
    visited: &mut [bool],
    tag: &mut usize,
) {
    if verts.len() <= LEAF_SIZE {
        order.extend(reverse_cuthill_mckee(adjacency, &verts, label, tag));
        return;
    }
    *tag += 1;
    let member = *tag;
    for &v in &verts {
        label[v] = member;
    }
    // pseudo-peripheral root
    let mut root = verts[0];
    let mut lv = {
        *tag += 1;
        levels(adjacency, root, member, label, stamp, *tag)
    };
    for _ in 0..4 {
        let last = lv.last().unwrap();
        let cand = *last.iter().min_by_key(|&&v| adjacency[v].len()).unwrap();
        *tag += 1;
        let l2 = levels(adjacency, cand, member, label, stamp, *tag);
        if l2.len() > lv.len() {
            root = cand;
            lv = l2;
        } else {
            break;
        }
    }
    let _ = root;
    if lv.len() < 3 {
        order.extend(reverse_cuthill_mckee(adjacency, &verts, label, tag));
        return;
    }
    // split at the level closest to half the vertices
    let half = verts.len() / 2;
    let mut acc = 0;
    let mut mid = 1;
    for (k, l) in lv.iter().enumerate() {
        acc += l.len();
        if acc >= half {
            mid = k.clamp(1, lv.len() - 2);
            break;
        }
    }
    let separator = lv[mid].clone();
    for &v in &separator {
        visited[v] = true;
    }
    let rest: Vec<usize> = verts.iter().copied().filter(|&v| !visited[v]).collect();
    for comp in components(adjacency, &rest, label, tag) {
        dissect(adjacency, comp, order, label, stamp, visited, tag);
    }
    order.extend(separator);
}

fn reverse_cuthill_mckee(adjacency: &[Vec<usize>], verts: &[usize], label: &mut [usize], tag: &mut usize) -> Vec<usize> {
    *tag += 1;
    let member = *tag;
    for &v in verts {
        label[v] = member;
    }
    *tag += 1;
    let seen = *tag;
    let mut out = Vec::with_capacity(verts.len());
    let mut sorted = verts.to_vec();
    sorted.sort_by_key(|&v| adjacency[v].len());
    for &s in &sorted {
        if label[s] != member {
            continue;
        }
        label[s] = seen;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            out.push(v);
            let mut nb: Vec<usize> = adjacency[v].iter().copied().filter(|&w| label[w] == member).collect();
            nb.sort_by_key(|&w| adjacency[w].len());
            for w in nb {
                if label[w] == member {
                    label[w] = seen;
                    queue.push_back(w);
                }
            }
        }
    }
    out.reverse();
    out
}
