//! Reverse Cuthill-McKee bandwidth reduction.

use std::collections::VecDeque;

use super::crs::SparseMatrixCrs;
use crate::error::{Error, Result};

/// Symmetrized adjacency lists without self loops, sorted by vertex.
fn adjacency(m: &SparseMatrixCrs) -> Vec<Vec<usize>> {
    let n = m.n_rows();
    let mut adj = vec![Vec::new(); n];
    for i in 0..n {
        for &c in m.row(i).0 {
            let j = c as usize;
            if i != j {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    for a in &mut adj {
        a.sort_unstable();
        a.dedup();
    }
    adj
}

/// BFS level structure from `root`; returns the levels in order.
fn level_structure(adj: &[Vec<usize>], root: usize, mark: &mut [u32], stamp: u32) -> Vec<Vec<usize>> {
    let mut levels = vec![vec![root]];
    mark[root] = stamp;
    loop {
        let mut next = Vec::new();
        for &v in levels.last().expect("non-empty") {
            for &w in &adj[v] {
                if mark[w] != stamp {
                    mark[w] = stamp;
                    next.push(w);
                }
            }
        }
        if next.is_empty() {
            return levels;
        }
        levels.push(next);
    }
}

/// George-Liu pseudo-peripheral vertex search starting from `start`.
fn pseudo_peripheral(adj: &[Vec<usize>], start: usize, mark: &mut [u32], stamp: &mut u32) -> usize {
    let mut root = start;
    *stamp += 1;
    let mut levels = level_structure(adj, root, mark, *stamp);
    loop {
        let last = levels.last().expect("non-empty");
        let candidate = *last
            .iter()
            .min_by_key(|&&v| (adj[v].len(), v))
            .expect("non-empty level");
        *stamp += 1;
        let cand_levels = level_structure(adj, candidate, mark, *stamp);
        if cand_levels.len() > levels.len() {
            root = candidate;
            levels = cand_levels;
        } else {
            return root;
        }
    }
}

/// RCM ordering as `perm[new] = old`. Each connected component is started
/// from a pseudo-peripheral vertex; neighbors are visited by increasing
/// degree and the final order is reversed.
pub fn rcm_ordering(m: &SparseMatrixCrs) -> Result<Vec<usize>> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.n_rows(),
            cols: m.n_cols(),
        });
    }
    let n = m.n_rows();
    let adj = adjacency(m);
    let mut visited = vec![false; n];
    let mut mark = vec![0u32; n];
    let mut stamp = 0u32;
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::new();
    let mut nbrs: Vec<usize> = Vec::new();

    // components in order of their minimum-degree unvisited vertex
    let mut by_degree: Vec<usize> = (0..n).collect();
    by_degree.sort_by_key(|&v| (adj[v].len(), v));
    for &seed in &by_degree {
        if visited[seed] {
            continue;
        }
        let root = pseudo_peripheral(&adj, seed, &mut mark, &mut stamp);
        visited[root] = true;
        queue.push_back(root);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            nbrs.clear();
            nbrs.extend(adj[v].iter().copied().filter(|&w| !visited[w]));
            nbrs.sort_by_key(|&w| (adj[w].len(), w));
            for &w in &nbrs {
                visited[w] = true;
                queue.push_back(w);
            }
        }
    }
    order.reverse();
    Ok(order)
}

/// Applies RCM symmetrically. If the reordering would not reduce the
/// bandwidth, the identity permutation is returned instead, so the result
/// never has a larger bandwidth than the input.
pub fn rcm_permute(m: &SparseMatrixCrs) -> Result<(SparseMatrixCrs, Vec<usize>)> {
    let perm = rcm_ordering(m)?;
    let permuted = m.permute_symmetric(&perm)?;
    if permuted.bandwidth() <= m.bandwidth() {
        Ok((permuted, perm))
    } else {
        Ok((m.clone(), (0..m.n_rows()).collect()))
    }
}
