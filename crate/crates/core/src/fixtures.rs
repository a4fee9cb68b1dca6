//! Small hand-built tournaments used as worked examples and test fixtures.

use crate::tournament::{AlternativeId, Tournament};

pub const A: AlternativeId = 0;
pub const B: AlternativeId = 1;
pub const C: AlternativeId = 2;
pub const D: AlternativeId = 3;
pub const E: AlternativeId = 4;

/// Five alternatives `a..e` with outdegrees `3, 3, 2, 2, 0`.
///
/// `a`, `b`, `d` are 2-kings, `c` is a 3-king only, `e` is never a king.
pub fn kings_example() -> Tournament {
    let edges = [
        (A, B),
        (A, C),
        (D, A),
        (A, E),
        (B, C),
        (B, D),
        (B, E),
        (C, D),
        (C, E),
        (D, E),
    ];
    from_edges(5, &edges)
}

/// Eight alternatives `a..h` in which the bracket `a b c d e f g h` is won
/// by `c` (index 2). Only seven results matter for that bracket:
/// `b > a`, `c > d`, `f > e`, `h > g`, `c > b`, `h > f`, `c > h`;
/// every other pair goes to the alphabetically earlier alternative.
pub fn bracket_example() -> Tournament {
    let upsets = [(1, 0), (2, 1), (5, 4), (7, 6), (7, 5)];
    Tournament::from_orientation(8, |i, j| !upsets.contains(&(j, i))).expect("eight alternatives")
}

/// Builds a tournament from a complete list of `(winner, loser)` pairs.
///
/// Panics if the list is not a tournament; meant for fixtures only.
pub fn from_edges(n: usize, edges: &[(AlternativeId, AlternativeId)]) -> Tournament {
    let mut rows = vec![vec![false; n]; n];
    for &(w, l) in edges {
        rows[w][l] = true;
    }
    Tournament::from_matrix(n, &rows).expect("fixture edges form a tournament")
}
