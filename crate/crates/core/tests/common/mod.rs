//! Independent reference implementations shared by the integration tests.

#![allow(dead_code)]

use std::collections::VecDeque;

use rand::Rng;
use tourney::{AlternativeId, Tournament};

pub fn random_tournament(n: usize, rng: &mut impl Rng) -> Tournament {
    Tournament::from_orientation(n, |_, _| rng.random::<bool>()).unwrap()
}

/// Shortest-path distances from `src`, `usize::MAX` if unreachable.
pub fn bfs_distances(t: &Tournament, src: AlternativeId) -> Vec<usize> {
    let n = t.n();
    let mut dist = vec![usize::MAX; n];
    dist[src] = 0;
    let mut queue = VecDeque::from([src]);
    while let Some(u) = queue.pop_front() {
        for v in 0..n {
            if v != u && t.dominates(u, v).unwrap() && dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    dist
}

pub fn bfs_kings(t: &Tournament, k: usize) -> Vec<AlternativeId> {
    (0..t.n())
        .filter(|&x| bfs_distances(t, x).iter().all(|&d| d <= k))
        .collect()
}

/// Winner of a bracket by repeated adjacent matches.
pub fn naive_playout(t: &Tournament, leaves: &[AlternativeId]) -> AlternativeId {
    let mut round = leaves.to_vec();
    while round.len() > 1 {
        round = round
            .chunks(2)
            .map(|m| {
                if t.dominates(m[0], m[1]).unwrap() {
                    m[0]
                } else {
                    m[1]
                }
            })
            .collect();
    }
    round[0]
}

/// Single-elimination winners by trying every leaf order.
pub fn brute_force_winners(t: &Tournament) -> Vec<AlternativeId> {
    let n = t.n();
    let mut won = vec![false; n];
    let mut perm: Vec<AlternativeId> = (0..n).collect();
    // Heap's algorithm
    let mut c = vec![0usize; n];
    won[naive_playout(t, &perm)] = true;
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            won[naive_playout(t, &perm)] = true;
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    (0..n).filter(|&x| won[x]).collect()
}

/// Supporters of `x` against each rival, counted directly.
pub fn naive_superking(t: &Tournament, x: AlternativeId) -> bool {
    let n = t.n();
    (0..n)
        .filter(|&r| r != x && t.dominates(r, x).unwrap())
        .all(|r| {
            let support = (0..n)
                .filter(|&w| w != x && w != r)
                .filter(|&w| t.dominates(x, w).unwrap() && t.dominates(w, r).unwrap())
                .count();
            support as f64 >= (n as f64).log2()
        })
}
