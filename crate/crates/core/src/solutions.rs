//! Tournament solutions: bounded-reach kings, the top cycle, and dominating
//! sets.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::bits::{self, BitMatrix};
use crate::tournament::{AlternativeId, Tournament, TournamentError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolutionError {
    #[error("k must be at least 2, got {0}")]
    InvalidK(usize),
    #[error("r must be in 1..={n}, got {r}")]
    InvalidR { r: usize, n: usize },
    #[error(transparent)]
    Tournament(#[from] TournamentError),
}

/// Path-length bound for kings: a fixed `k` or `n - 1` for whatever `n` the
/// tournament has.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum KBound {
    Fixed(usize),
    Max,
}

impl KBound {
    pub fn resolve(self, n: usize) -> usize {
        match self {
            KBound::Fixed(k) => k,
            KBound::Max => n.saturating_sub(1),
        }
    }

    pub fn validate(self) -> Result<(), SolutionError> {
        match self {
            KBound::Fixed(k) if k < 2 => Err(SolutionError::InvalidK(k)),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for KBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KBound::Fixed(k) => write!(f, "{k}"),
            KBound::Max => f.write_str("max"),
        }
    }
}

impl FromStr for KBound {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("max") {
            return Ok(KBound::Max);
        }
        let k: usize = s.parse().map_err(|_| format!("invalid k {s:?}"))?;
        if k < 2 {
            return Err(format!("k must be at least 2 or `max`, got {k}"));
        }
        Ok(KBound::Fixed(k))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KingSet {
    pub k: KBound,
    /// Ascending.
    pub members: Vec<AlternativeId>,
}

impl KingSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, id: AlternativeId) -> bool {
        self.members.binary_search(&id).is_ok()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DominatingSet {
    pub r: usize,
    /// Ascending.
    pub members: Vec<AlternativeId>,
}

/// Everything reachable from `src` along at most `k` edges, `src` included.
pub fn reach_within(
    t: &Tournament,
    src: AlternativeId,
    k: usize,
) -> Result<Vec<AlternativeId>, SolutionError> {
    t.check(src)?;
    let words = bits::words_for(t.n());
    let mut seen = vec![0u64; words];
    bits::set(&mut seen, src);
    let mut frontier = seen.clone();
    for _ in 0..k {
        let mut next = vec![0u64; words];
        for v in bits::ones(&frontier) {
            bits::or_assign(&mut next, t.row(v));
        }
        for (n, s) in next.iter_mut().zip(&seen) {
            *n &= !s;
        }
        if next.iter().all(|&w| w == 0) {
            break;
        }
        bits::or_assign(&mut seen, &next);
        frontier = next;
    }
    Ok(bits::ones(&seen).collect())
}

/// `(I + A)^k` over the boolean semiring: entry `(i, j)` is set iff `j` is
/// reachable from `i` in at most `k` steps.
fn reach_matrix(t: &Tournament, k: usize) -> BitMatrix {
    t.matrix().with_identity().pow(k)
}

/// Alternatives that reach every other alternative within `k` steps.
pub fn k_kings(t: &Tournament, k: KBound) -> Result<KingSet, SolutionError> {
    k.validate()?;
    let reach = reach_matrix(t, k.resolve(t.n()));
    let members = (0..t.n()).filter(|&i| reach.row_is_full(i)).collect();
    Ok(KingSet { k, members })
}

/// King sets for several bounds at once, sharing the squarings between them.
///
/// The result is in the order of `ks`.
pub fn k_kings_many(t: &Tournament, ks: &[KBound]) -> Result<Vec<KingSet>, SolutionError> {
    for k in ks {
        k.validate()?;
    }
    let n = t.n();
    let base = t.matrix().with_identity();
    let mut resolved: Vec<usize> = ks.iter().map(|k| k.resolve(n)).collect();
    resolved.sort_unstable();
    resolved.dedup();
    // walk exponents upward, reusing the previous power
    let mut cache: Vec<(usize, Vec<AlternativeId>)> = Vec::with_capacity(resolved.len());
    let mut cur_exp = 1;
    let mut cur = base.clone();
    for &e in &resolved {
        if e == 0 {
            cache.push((0, if n == 1 { vec![0] } else { Vec::new() }));
            continue;
        }
        if e > cur_exp {
            cur = cur.mul(&base.pow(e - cur_exp));
            cur_exp = e;
        }
        cache.push((e, (0..n).filter(|&i| cur.row_is_full(i)).collect()));
    }
    Ok(ks
        .iter()
        .map(|&k| {
            let e = k.resolve(n);
            let members = cache
                .iter()
                .find(|(ce, _)| *ce == e)
                .map(|(_, m)| m.clone())
                .expect("every resolved exponent is cached");
            KingSet { k, members }
        })
        .collect())
}

/// Number of `k`-kings for each bound in `ks`, without allocating member
/// lists. The hot path of the experiment harness.
pub(crate) fn king_counts(t: &Tournament, ks: &[usize], out: &mut [usize]) {
    debug_assert_eq!(ks.len(), out.len());
    let n = t.n();
    let base = t.matrix().with_identity();
    let mut order: Vec<usize> = (0..ks.len()).collect();
    order.sort_by_key(|&i| ks[i]);
    let mut cur = base.clone();
    let mut cur_exp = 1;
    let mut closed = false;
    for i in order {
        let e = ks[i];
        if e == 0 {
            out[i] = usize::from(n == 1);
            continue;
        }
        if e > cur_exp && !closed {
            // one step at a time while small, squaring for large jumps
            while cur_exp < e {
                let next = if e - cur_exp >= cur_exp {
                    let sq = cur.mul(&cur);
                    cur_exp *= 2;
                    sq
                } else {
                    cur_exp += 1;
                    cur.mul(&base)
                };
                if next == cur {
                    closed = true;
                    cur_exp = e;
                    break;
                }
                cur = next;
            }
        }
        out[i] = (0..n).filter(|&v| cur.row_is_full(v)).count();
    }
}

/// The top cycle, computed as the source strongly connected component of
/// the dominance graph.
///
/// In a tournament the components are totally ordered, so the source
/// component is the unique one with no edge entering from outside; every
/// member reaches every alternative and nobody else does.
pub fn top_cycle(t: &Tournament) -> KingSet {
    let comp = strong_components(t);
    // Tarjan emits components in reverse topological order, so the source
    // component is the last one discovered.
    let source = comp.iter().copied().max().expect("non-empty tournament");
    let members = (0..t.n()).filter(|&v| comp[v] == source).collect();
    KingSet {
        k: KBound::Max,
        members,
    }
}

/// Iterative Tarjan; returns the component index of each vertex, with
/// indices assigned in completion order.
fn strong_components(t: &Tournament) -> Vec<usize> {
    const UNVISITED: usize = usize::MAX;
    let n = t.n();
    let adj: Vec<Vec<AlternativeId>> = (0..n).map(|v| t.out_neighbors(v)).collect();
    let mut index = vec![UNVISITED; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![UNVISITED; n];
    let mut stack = Vec::new();
    let mut next_index = 0;
    let mut next_comp = 0;
    // (vertex, position in its adjacency list)
    let mut call: Vec<(usize, usize)> = Vec::new();
    for root in 0..n {
        if index[root] != UNVISITED {
            continue;
        }
        call.push((root, 0));
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if let Some(&w) = adj[v].get(*pos) {
                *pos += 1;
                if index[w] == UNVISITED {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                loop {
                    let w = stack.pop().expect("component root is on the stack");
                    on_stack[w] = false;
                    comp[w] = next_comp;
                    if w == v {
                        break;
                    }
                }
                next_comp += 1;
            }
        }
    }
    comp
}

/// Greedy dominating set of the sub-tournament on `alive` (a bit row):
/// repeatedly take the alternative beating the most still-undominated
/// alternatives (lowest index on ties) and discard it with everything it
/// beats.
fn greedy_on(t: &Tournament, alive: &[u64]) -> Vec<AlternativeId> {
    let mut residual = alive.to_vec();
    let mut chosen = Vec::new();
    while residual.iter().any(|&w| w != 0) {
        let mut best = None;
        let mut best_deg = 0;
        for v in bits::ones(&residual) {
            let deg = bits::and_count(t.row(v), &residual);
            if best.is_none() || deg > best_deg {
                best = Some(v);
                best_deg = deg;
            }
        }
        let v = best.expect("residual is non-empty");
        chosen.push(v);
        for (r, d) in residual.iter_mut().zip(t.row(v)) {
            *r &= !d;
        }
        residual[v / bits::WORD_BITS] &= !(1 << (v % bits::WORD_BITS));
    }
    chosen
}

/// A dominating set of size at most `max(1, ceil(log2 n))`.
///
/// Each greedy pick beats at least half of the remaining alternatives, which
/// gives the size bound.
pub fn dominating_set_greedy(t: &Tournament) -> Vec<AlternativeId> {
    let mut d = greedy_on(t, &bits::full_row(t.n()));
    d.sort_unstable();
    d
}

/// An `r`-dominating set of size at most `r * ceil(log2 n)`: `r` rounds of
/// the greedy procedure, each on the alternatives not chosen so far.
pub fn r_dominating_set(t: &Tournament, r: usize) -> Result<DominatingSet, SolutionError> {
    let n = t.n();
    if r == 0 || r > n {
        return Err(SolutionError::InvalidR { r, n });
    }
    let mut remaining = bits::full_row(n);
    let mut members = Vec::new();
    for _ in 0..r {
        let round = greedy_on(t, &remaining);
        for &v in &round {
            remaining[v / bits::WORD_BITS] &= !(1 << (v % bits::WORD_BITS));
        }
        members.extend(round);
    }
    members.sort_unstable();
    Ok(DominatingSet { r, members })
}

/// Whether every alternative outside `d` is beaten by at least `r` members
/// of `d`.
pub fn is_r_dominating(
    t: &Tournament,
    d: &[AlternativeId],
    r: usize,
) -> Result<bool, SolutionError> {
    let mut in_d = vec![false; t.n()];
    for &m in d {
        t.check(m)?;
        in_d[m] = true;
    }
    Ok((0..t.n())
        .filter(|&x| !in_d[x])
        .all(|x| d.iter().filter(|&&m| t.beats(m, x)).count() >= r))
}

/// An alternative whose indegree and outdegree both exceed `n/4 - 1`.
///
/// Sorts alternatives by outdegree (stable, so ties keep index order) and
/// takes the one at 1-based position `floor(n/2)`.
pub fn middle_vertex(t: &Tournament) -> AlternativeId {
    let deg = t.outdegrees();
    let mut order: Vec<AlternativeId> = (0..t.n()).collect();
    order.sort_by_key(|&v| deg[v]);
    let pos = (t.n() / 2).max(1);
    order[pos - 1]
}

/// `ceil(log2 n)` for `n >= 1`.
pub fn ceil_log2(n: usize) -> usize {
    assert!(n >= 1);
    (usize::BITS - (n - 1).leading_zeros()) as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{kings_example, A, B, C, D, E};

    #[test]
    fn reach_example_from_c() {
        let t = kings_example();
        assert_eq!(reach_within(&t, C, 2).unwrap(), vec![A, C, D, E]);
        assert_eq!(reach_within(&t, C, 3).unwrap(), vec![A, B, C, D, E]);
        assert_eq!(reach_within(&t, C, 0).unwrap(), vec![C]);
        assert_eq!(reach_within(&t, E, 10).unwrap(), vec![E]);
        assert!(reach_within(&t, 5, 1).is_err());
    }

    #[test]
    fn reach_path_worstcase() {
        let t = Tournament::path_worstcase(6).unwrap();
        let r4 = reach_within(&t, 0, 4).unwrap();
        assert!(!r4.contains(&5));
        assert_eq!(r4.len(), 5);
        assert_eq!(reach_within(&t, 0, 5).unwrap(), (0..6).collect::<Vec<_>>());
    }

    #[test]
    fn kings_of_example() {
        let t = kings_example();
        assert_eq!(
            k_kings(&t, KBound::Fixed(2)).unwrap().members,
            vec![A, B, D]
        );
        assert_eq!(
            k_kings(&t, KBound::Fixed(3)).unwrap().members,
            vec![A, B, C, D]
        );
        assert_eq!(k_kings(&t, KBound::Max).unwrap().members, vec![A, B, C, D]);
        assert_eq!(
            k_kings(&t, KBound::Fixed(1)),
            Err(SolutionError::InvalidK(1))
        );
    }

    #[test]
    fn kings_transitive() {
        let t = Tournament::transitive(7).unwrap();
        for k in [
            KBound::Fixed(2),
            KBound::Fixed(3),
            KBound::Fixed(9),
            KBound::Max,
        ] {
            assert_eq!(k_kings(&t, k).unwrap().members, vec![0]);
        }
        let single = Tournament::transitive(1).unwrap();
        assert_eq!(k_kings(&single, KBound::Max).unwrap().members, vec![0]);
        assert_eq!(k_kings(&single, KBound::Fixed(2)).unwrap().members, vec![0]);
    }

    #[test]
    fn kings_many_matches_single() {
        let t = kings_example();
        let ks = [
            KBound::Max,
            KBound::Fixed(2),
            KBound::Fixed(3),
            KBound::Fixed(2),
        ];
        let many = k_kings_many(&t, &ks).unwrap();
        for (set, &k) in many.iter().zip(&ks) {
            assert_eq!(*set, k_kings(&t, k).unwrap());
        }
        let mut counts = [0; 4];
        king_counts(&t, &[4, 2, 3, 2], &mut counts);
        assert_eq!(counts, [4, 3, 4, 3]);
    }

    #[test]
    fn top_cycle_examples() {
        assert_eq!(top_cycle(&kings_example()).members, vec![A, B, C, D]);
        assert_eq!(
            top_cycle(&Tournament::transitive(6).unwrap()).members,
            vec![0]
        );
        assert_eq!(
            top_cycle(&Tournament::path_worstcase(5).unwrap()).members,
            vec![0, 1, 2, 3, 4]
        );
        assert_eq!(
            top_cycle(&Tournament::transitive(1).unwrap()).members,
            vec![0]
        );
    }

    #[test]
    fn greedy_dominating_examples() {
        assert_eq!(
            dominating_set_greedy(&Tournament::transitive(8).unwrap()),
            vec![0]
        );
        assert_eq!(
            dominating_set_greedy(&Tournament::transitive(1).unwrap()),
            vec![0]
        );
        let t = kings_example();
        let d = dominating_set_greedy(&t);
        assert!(d.len() <= 3);
        assert!(is_r_dominating(&t, &d, 1).unwrap());
        // a has the highest outdegree (tie with b, lower index) and leaves only d
        assert_eq!(d, vec![A, D]);
    }

    #[test]
    fn r_dominating_examples() {
        let t = Tournament::transitive(8).unwrap();
        let d = r_dominating_set(&t, 2).unwrap();
        assert_eq!(d.members, vec![0, 1]);
        assert!(is_r_dominating(&t, &d.members, 2).unwrap());
        assert_eq!(
            r_dominating_set(&t, 0),
            Err(SolutionError::InvalidR { r: 0, n: 8 })
        );
        assert_eq!(
            r_dominating_set(&t, 9),
            Err(SolutionError::InvalidR { r: 9, n: 8 })
        );
        let f = kings_example();
        assert_eq!(
            r_dominating_set(&f, 1).unwrap().members,
            dominating_set_greedy(&f)
        );
        // r = n: every alternative ends up chosen
        assert_eq!(
            r_dominating_set(&f, 5).unwrap().members,
            vec![0, 1, 2, 3, 4]
        );
    }

    #[test]
    fn is_r_dominating_examples() {
        let t = Tournament::transitive(4).unwrap();
        assert!(is_r_dominating(&t, &[0], 1).unwrap());
        assert!(!is_r_dominating(&t, &[3], 1).unwrap());
        assert!(is_r_dominating(&kings_example(), &[A, B], 1).unwrap());
        assert!(!is_r_dominating(&kings_example(), &[A, B], 2).unwrap());
        assert!(is_r_dominating(&t, &[4], 1).is_err());
    }

    #[test]
    fn middle_vertex_examples() {
        let t = kings_example();
        let m = middle_vertex(&t);
        assert_eq!(m, C);
        assert!(t.indegree(m).unwrap() as f64 > 5.0 / 4.0 - 1.0);
        assert!(t.outdegree(m).unwrap() as f64 > 5.0 / 4.0 - 1.0);
        assert_eq!(middle_vertex(&Tournament::transitive(2).unwrap()), 1);
        assert_eq!(middle_vertex(&Tournament::transitive(1).unwrap()), 0);
    }

    #[test]
    fn kbound_parsing() {
        assert_eq!("max".parse::<KBound>(), Ok(KBound::Max));
        assert_eq!("3".parse::<KBound>(), Ok(KBound::Fixed(3)));
        assert!("1".parse::<KBound>().is_err());
        assert!("x".parse::<KBound>().is_err());
        assert_eq!(KBound::Max.to_string(), "max");
        assert_eq!(KBound::Max.resolve(10), 9);
    }

    #[test]
    fn ceil_log2_values() {
        let expected = [
            (1, 0),
            (2, 1),
            (3, 2),
            (4, 2),
            (5, 3),
            (8, 3),
            (9, 4),
            (32, 5),
        ];
        for (n, l) in expected {
            assert_eq!(ceil_log2(n), l, "n = {n}");
        }
    }
}
