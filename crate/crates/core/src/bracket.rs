//! Balanced single-elimination brackets: playout, superkings, winning
//! bracket construction and an exhaustive oracle for small fields.
//!
//! A bracket is a leaf order. `leaves[2m]` meets `leaves[2m + 1]` in the
//! first round and winners of adjacent blocks meet in later rounds, so the
//! block `leaves[b * 2^t .. (b + 1) * 2^t]` is one subtree of height `t`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use thiserror::Error;

use crate::models::RngStream;
use crate::tournament::{AlternativeId, Tournament, TournamentError};

/// Retry budget for [`winning_bracket`].
pub const DEFAULT_RETRIES: usize = 32;

/// Largest field the exhaustive oracle accepts.
pub const ORACLE_MAX_N: usize = 16;

/// Below this size the fixed-fraction sizing of the three largest parts is
/// skipped; the constants only make sense asymptotically.
const LARGE_FIELD: usize = 128;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BracketError {
    #[error("field size {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("bracket is not a permutation of 0..{0}")]
    InvalidPermutation(usize),
    #[error("alternative {0} is not a superking")]
    NotSuperking(AlternativeId),
    #[error("could not build a winning bracket for superking {0}")]
    ConstructionFailed(AlternativeId),
    #[error("exhaustive search supports at most {max} alternatives, got {0}", max = ORACLE_MAX_N)]
    TooLarge(usize),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Tournament(#[from] TournamentError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Bracket {
    leaves: Vec<AlternativeId>,
}

impl Bracket {
    /// Wraps a leaf order without validating it.
    pub fn new(leaves: Vec<AlternativeId>) -> Self {
        Bracket { leaves }
    }

    pub fn leaves(&self) -> &[AlternativeId] {
        &self.leaves
    }

    pub fn len(&self) -> usize {
        self.leaves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.leaves.is_empty()
    }

    fn remap(&self, original: &[AlternativeId]) -> Vec<AlternativeId> {
        self.leaves.iter().map(|&l| original[l]).collect()
    }
}

/// One line of whitespace-separated leaf indices.
impl fmt::Display for Bracket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.leaves.iter().map(|l| l.to_string()).collect();
        writeln!(f, "{}", parts.join(" "))
    }
}

impl FromStr for Bracket {
    type Err = BracketError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut content = s.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let Some((idx, line)) = content.next() else {
            return Ok(Bracket::new(Vec::new()));
        };
        if let Some((extra, _)) = content.next() {
            return Err(BracketError::Parse {
                line: extra + 1,
                msg: "bracket must be a single line".into(),
            });
        }
        let leaves = line
            .split_whitespace()
            .map(|tok| {
                tok.parse().map_err(|_| BracketError::Parse {
                    line: idx + 1,
                    msg: format!("bad alternative index {tok:?}"),
                })
            })
            .collect::<Result<_, _>>()?;
        Ok(Bracket::new(leaves))
    }
}

/// Whether `b` is a permutation of `0..n` and `n` is a power of two.
pub fn validate_bracket(b: &Bracket, n: usize) -> bool {
    if !n.is_power_of_two() || b.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    b.leaves
        .iter()
        .all(|&l| l < n && !std::mem::replace(&mut seen[l], true))
}

fn require_power_of_two(n: usize) -> Result<(), BracketError> {
    if n.is_power_of_two() {
        Ok(())
    } else {
        Err(BracketError::NotPowerOfTwo(n))
    }
}

/// Runs the bracket and returns the champion.
pub fn playout(t: &Tournament, b: &Bracket) -> Result<AlternativeId, BracketError> {
    let n = t.n();
    require_power_of_two(n)?;
    if !validate_bracket(b, n) {
        return Err(BracketError::InvalidPermutation(n));
    }
    let mut round = b.leaves.clone();
    while round.len() > 1 {
        round = round
            .chunks_exact(2)
            .map(|m| if t.beats(m[0], m[1]) { m[0] } else { m[1] })
            .collect();
    }
    Ok(round[0])
}

/// Whether every alternative beating `x` is itself beaten by at least
/// `log2 n` alternatives that `x` beats.
pub fn is_superking(t: &Tournament, x: AlternativeId) -> Result<bool, BracketError> {
    t.check(x)?;
    let threshold = (t.n() as f64).log2();
    let dominated = t.out_neighbors(x);
    Ok(t.in_neighbors(x).into_iter().all(|rival| {
        let support = dominated.iter().filter(|&&w| t.beats(w, rival)).count();
        support as f64 >= threshold
    }))
}

/// All superkings of `t`, ascending.
pub fn superkings(t: &Tournament) -> Vec<AlternativeId> {
    (0..t.n())
        .filter(|&x| is_superking(t, x).unwrap_or(false))
        .collect()
}

/// Maximum matching of `left` into `right` where `left[l]` may take
/// `right[r]` iff `edge(l, r)`. Kuhn's augmenting paths, scanning in index
/// order. Returns the partner index in `right` for every left vertex.
fn max_matching(
    left: usize,
    right: usize,
    edge: impl Fn(usize, usize) -> bool,
) -> Vec<Option<usize>> {
    fn augment(
        l: usize,
        adj: &[Vec<usize>],
        seen: &mut [bool],
        owner: &mut [Option<usize>],
    ) -> bool {
        for &r in &adj[l] {
            if std::mem::replace(&mut seen[r], true) {
                continue;
            }
            if owner[r].is_none_or(|o| augment(o, adj, seen, owner)) {
                owner[r] = Some(l);
                return true;
            }
        }
        false
    }

    let adj: Vec<Vec<usize>> = (0..left)
        .map(|l| (0..right).filter(|&r| edge(l, r)).collect())
        .collect();
    let mut owner: Vec<Option<usize>> = vec![None; right];
    for l in 0..left {
        let mut seen = vec![false; right];
        augment(l, &adj, &mut seen, &mut owner);
    }
    let mut partner = vec![None; left];
    for (r, o) in owner.iter().enumerate() {
        if let Some(l) = *o {
            partner[l] = Some(r);
        }
    }
    partner
}

/// A bracket that `x` wins, for a superking `x`.
///
/// Each round, rivals (survivors beating `x`) are matched to distinct
/// survivors that `x` beats and that beat them. Matched rivals are
/// eliminated. Because the matching is maximum, every supporter of an
/// unmatched rival is itself matched and survives, so an unmatched rival
/// keeps all its supporters except possibly `x`'s own opponent, and the
/// `log2` threshold drops by exactly one per round. `x` meets an unmatched
/// dominated survivor when one exists, unmatched rivals meet each other and
/// everything else pairs lowest index first.
pub fn superking_bracket(t: &Tournament, x: AlternativeId) -> Result<Bracket, BracketError> {
    let n = t.n();
    require_power_of_two(n)?;
    if !is_superking(t, x)? {
        return Err(BracketError::NotSuperking(x));
    }
    // leaf block currently won by each survivor
    let mut blocks: Vec<Vec<AlternativeId>> = (0..n).map(|v| vec![v]).collect();
    let mut survivors: Vec<AlternativeId> = (0..n).collect();
    while survivors.len() > 1 {
        let (dominated, rivals): (Vec<_>, Vec<_>) = survivors
            .iter()
            .copied()
            .filter(|&v| v != x)
            .partition(|&v| t.beats(x, v));
        let partner = max_matching(rivals.len(), dominated.len(), |b, a| {
            t.beats(dominated[a], rivals[b])
        });
        let mut matched_dom = vec![false; dominated.len()];
        let mut pairs: Vec<(AlternativeId, AlternativeId)> = Vec::new();
        let mut free_rivals = Vec::new();
        for (b, p) in partner.iter().enumerate() {
            match p {
                Some(a) => {
                    matched_dom[*a] = true;
                    pairs.push((dominated[*a], rivals[b]));
                }
                None => free_rivals.push(rivals[b]),
            }
        }
        let mut free_dom: Vec<AlternativeId> = dominated
            .iter()
            .zip(&matched_dom)
            .filter(|(_, &m)| !m)
            .map(|(&a, _)| a)
            .collect();
        let opponent = if !free_dom.is_empty() {
            free_dom.remove(0)
        } else {
            // every dominated survivor is matched: break the pair with the
            // lowest-index supporter and free its rival
            let idx = pairs
                .iter()
                .enumerate()
                .min_by_key(|(_, (a, _))| *a)
                .map(|(i, _)| i)
                .ok_or(BracketError::ConstructionFailed(x))?;
            let (a, b) = pairs.remove(idx);
            free_rivals.push(b);
            free_rivals.sort_unstable();
            a
        };
        pairs.push((x, opponent));
        let mut rest_rivals = free_rivals.chunks_exact(2);
        pairs.extend(rest_rivals.by_ref().map(|c| (c[0], c[1])));
        let mut rest_dom = free_dom.chunks_exact(2);
        pairs.extend(rest_dom.by_ref().map(|c| (c[0], c[1])));
        match (rest_rivals.remainder(), rest_dom.remainder()) {
            ([], []) => {}
            ([b], [a]) => pairs.push((*a, *b)),
            _ => return Err(BracketError::ConstructionFailed(x)),
        }

        let mut next = Vec::with_capacity(pairs.len());
        for (u, v) in pairs {
            let (w, l) = if t.beats(u, v) { (u, v) } else { (v, u) };
            let mut block = std::mem::take(&mut blocks[u]);
            block.append(&mut blocks[v]);
            blocks[l].clear();
            blocks[w] = block;
            next.push(w);
        }
        if !next.contains(&x) {
            return Err(BracketError::ConstructionFailed(x));
        }
        next.sort_unstable();
        survivors = next;
    }
    let bracket = Bracket::new(std::mem::take(&mut blocks[x]));
    if playout(t, &bracket)? != x {
        return Err(BracketError::ConstructionFailed(x));
    }
    Ok(bracket)
}

/// Result of [`winning_bracket`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WinningBracket {
    Found(Bracket),
    /// The construction gave up. This does not prove that `x` cannot win.
    InfeasibleByMethod,
}

/// Tries to build a bracket won by `x` by choosing one opponent per round.
///
/// `x` beats `y_1` in round one, `y_2` in round two and so on, where each
/// `y_i` is an alternative `x` beats and wins its own sub-bracket on a part
/// `V_i` of size `2^(i-1)`. The parts are seeded with alternatives `y_i`
/// beats so that `y_i` becomes a superking there; parts of at most
/// [`ORACLE_MAX_N`] alternatives fall back to exhaustive search. Candidate
/// opponents are ranked by outdegree, and later attempts perturb the
/// ranking and the fill order using `stream`.
pub fn winning_bracket(
    t: &Tournament,
    x: AlternativeId,
    stream: RngStream,
    retries: usize,
) -> Result<WinningBracket, BracketError> {
    let n = t.n();
    require_power_of_two(n)?;
    t.check(x)?;
    if n == 1 {
        return Ok(WinningBracket::Found(Bracket::new(vec![x])));
    }
    let rounds = n.trailing_zeros() as usize;
    let beaten = t.out_neighbors(x);
    if beaten.len() < rounds {
        // x must beat a distinct alternative in every round
        return Ok(WinningBracket::InfeasibleByMethod);
    }
    let degree = t.outdegrees();
    let mut rng = stream.rng();
    for attempt in 0..retries.max(1) {
        let jitter = attempt as f64 * 2.0;
        let ys = pick_opponents(&beaten, &degree, rounds, jitter, &mut rng);
        let Some(parts) = partition(t, x, &ys, &degree, jitter, &mut rng) else {
            continue;
        };
        let mut leaves = vec![x];
        let mut complete = true;
        for part in &parts {
            match part_bracket(t, part)? {
                Some(sub) => leaves.extend(sub),
                None => {
                    complete = false;
                    break;
                }
            }
        }
        if !complete {
            continue;
        }
        let bracket = Bracket::new(leaves);
        if playout(t, &bracket)? == x {
            return Ok(WinningBracket::Found(bracket));
        }
    }
    Ok(WinningBracket::InfeasibleByMethod)
}

fn noisy_key(base: f64, jitter: f64, rng: &mut impl Rng) -> f64 {
    if jitter > 0.0 {
        base + rng.random::<f64>() * jitter
    } else {
        base
    }
}

/// `ys[i]` is the opponent for round `i + 1`; the strongest candidates
/// face `x` last, where their sub-bracket is largest.
fn pick_opponents(
    beaten: &[AlternativeId],
    degree: &[usize],
    rounds: usize,
    jitter: f64,
    rng: &mut impl Rng,
) -> Vec<AlternativeId> {
    let mut ranked: Vec<(f64, AlternativeId)> = beaten
        .iter()
        .map(|&v| (noisy_key(degree[v] as f64, jitter, rng), v))
        .collect();
    ranked.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    ranked.truncate(rounds);
    ranked.reverse();
    ranked.into_iter().map(|(_, v)| v).collect()
}

/// Splits everything except `x` into parts of sizes `1, 2, 4, ...`, part
/// `i` headed by `ys[i]`. Returns `None` when a mandatory quota of
/// dominated alternatives cannot be met.
fn partition(
    t: &Tournament,
    x: AlternativeId,
    ys: &[AlternativeId],
    degree: &[usize],
    jitter: f64,
    rng: &mut impl Rng,
) -> Option<Vec<Vec<AlternativeId>>> {
    let n = t.n();
    let rounds = ys.len();
    let mut used = vec![false; n];
    used[x] = true;
    for &y in ys {
        used[y] = true;
    }
    let mut parts: Vec<Vec<AlternativeId>> = ys.iter().map(|&y| vec![y]).collect();
    let cap = |i: usize| 1usize << i;

    // weakest dominated alternatives first; strong ones are worth more as
    // supporters elsewhere
    let mut take_dominated =
        |part: &mut Vec<AlternativeId>, count: usize, used: &mut [bool]| -> usize {
            let y = part[0];
            let mut pool: Vec<(f64, AlternativeId)> = t
                .out_neighbors(y)
                .into_iter()
                .filter(|&v| !used[v])
                .map(|v| (noisy_key(degree[v] as f64, jitter, rng), v))
                .collect();
            pool.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let taken = count.min(pool.len());
            for &(_, v) in &pool[..taken] {
                used[v] = true;
                part.push(v);
            }
            taken
        };

    if n >= LARGE_FIELD && rounds >= 3 {
        let big_quota = ((0.091 * n as f64).floor() as usize).saturating_sub(1);
        for (i, part) in parts.iter_mut().enumerate() {
            let quota = if i + 3 < rounds {
                cap(i) - 1
            } else {
                big_quota.min(cap(i) - 1)
            };
            if take_dominated(part, quota, &mut used) < quota {
                return None;
            }
        }
    } else {
        for (i, part) in parts.iter_mut().enumerate() {
            take_dominated(part, cap(i) - 1, &mut used);
        }
    }

    // Everyone left over. Those beating many heads are placed first while
    // there is still room next to their supporters.
    let mut rest: Vec<(usize, f64, AlternativeId)> = (0..n)
        .filter(|&v| !used[v])
        .map(|v| {
            let threat = ys.iter().filter(|&&y| t.beats(v, y)).count();
            (threat, noisy_key(0.0, jitter, rng), v)
        })
        .collect();
    rest.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.total_cmp(&b.1)).then(a.2.cmp(&b.2)));
    for (_, _, u) in rest {
        let mut best: Option<(i64, usize, usize)> = None;
        for (i, part) in parts.iter().enumerate() {
            let room = cap(i) - part.len();
            if room == 0 {
                continue;
            }
            let y = part[0];
            let score = if t.beats(y, u) {
                i64::MAX
            } else {
                let support = part[1..]
                    .iter()
                    .filter(|&&w| t.beats(y, w) && t.beats(w, u))
                    .count() as i64;
                support - i as i64
            };
            let key = (score, room, i);
            if best.is_none_or(|b| key > b) {
                best = Some(key);
            }
        }
        let (_, _, i) = best.expect("part sizes sum to n - 1");
        parts[i].push(u);
    }
    Some(parts)
}

/// A bracket on `part` won by `part[0]`, in original indices.
fn part_bracket(
    t: &Tournament,
    part: &[AlternativeId],
) -> Result<Option<Vec<AlternativeId>>, BracketError> {
    if part.len() == 1 {
        return Ok(Some(part.to_vec()));
    }
    let sub = t.restrict(part)?;
    let local = &sub.tournament;
    if is_superking(local, 0)? {
        let b = superking_bracket(local, 0)?;
        return Ok(Some(b.remap(&sub.original)));
    }
    if part.len() <= ORACLE_MAX_N {
        let oracle = SeOracle::new(local)?;
        return Ok(oracle.bracket_for(0).map(|b| b.remap(&sub.original)));
    }
    Ok(None)
}

/// Exact single-elimination winners of a field of at most 16, by dynamic
/// programming over subsets whose size is a power of two.
///
/// `winners[S]` is the set of alternatives that win some bracket on `S`.
/// A balanced bracket on `S` splits it into two equal halves, so `v` wins
/// on `S` iff for some split `S = S1 + S2`, `v` wins on `S1` and beats
/// someone who wins on `S2`.
pub struct SeOracle {
    n: usize,
    beats: Vec<u32>,
    winners: Vec<u32>,
}

impl SeOracle {
    pub fn new(t: &Tournament) -> Result<Self, BracketError> {
        let n = t.n();
        require_power_of_two(n)?;
        if n > ORACLE_MAX_N {
            return Err(BracketError::TooLarge(n));
        }
        let beats: Vec<u32> = (0..n)
            .map(|v| t.out_neighbors(v).iter().fold(0, |m, &w| m | 1 << w))
            .collect();
        let mut winners = vec![0u32; 1 << n];
        for mask in 1u32..(1 << n) {
            let size = mask.count_ones() as usize;
            if size == 1 {
                winners[mask as usize] = mask;
                continue;
            }
            if !size.is_power_of_two() {
                continue;
            }
            let mut w = 0u32;
            // fixing the lowest member on the left visits each split once
            for left in halves(mask, true) {
                let right = mask ^ left;
                let wl = winners[left as usize];
                let wr = winners[right as usize];
                w |= filter_bits(wl, |v| beats[v] & wr != 0);
                w |= filter_bits(wr, |v| beats[v] & wl != 0);
            }
            winners[mask as usize] = w;
        }
        Ok(SeOracle { n, beats, winners })
    }

    fn full(&self) -> u32 {
        ((1u64 << self.n) - 1) as u32
    }

    /// Every alternative that wins some bracket, ascending.
    pub fn winners(&self) -> Vec<AlternativeId> {
        let w = self.winners[self.full() as usize];
        (0..self.n).filter(|&v| w >> v & 1 == 1).collect()
    }

    pub fn is_winner(&self, x: AlternativeId) -> bool {
        x < self.n && self.winners[self.full() as usize] >> x & 1 == 1
    }

    /// A witness bracket for `x`, if `x` can win.
    pub fn bracket_for(&self, x: AlternativeId) -> Option<Bracket> {
        if !self.is_winner(x) {
            return None;
        }
        Some(Bracket::new(self.witness(self.full(), x)))
    }

    fn witness(&self, mask: u32, x: AlternativeId) -> Vec<AlternativeId> {
        if mask.count_ones() == 1 {
            return vec![x];
        }
        for left in halves(mask, false) {
            if left >> x & 1 == 0 || self.winners[left as usize] >> x & 1 == 0 {
                continue;
            }
            let right = mask ^ left;
            let targets = self.beats[x] & self.winners[right as usize];
            if targets != 0 {
                let y = targets.trailing_zeros() as usize;
                let mut leaves = self.witness(left, x);
                leaves.extend(self.witness(right, y));
                return leaves;
            }
        }
        unreachable!("winner table promised a split for {x}");
    }
}

fn filter_bits(mask: u32, keep: impl Fn(usize) -> bool) -> u32 {
    let mut out = 0;
    let mut m = mask;
    while m != 0 {
        let v = m.trailing_zeros() as usize;
        m &= m - 1;
        if keep(v) {
            out |= 1 << v;
        }
    }
    out
}

/// Submasks of `mask` holding exactly half its bits. With `anchored`, only
/// those containing the lowest set bit.
fn halves(mask: u32, anchored: bool) -> impl Iterator<Item = u32> {
    let positions: Vec<u32> = (0..32).filter(|&b| mask >> b & 1 == 1).collect();
    let size = positions.len();
    let half = size / 2;
    // Gosper's hack over combinations of `half` positions out of `size`
    let mut combo: u64 = (1u64 << half) - 1;
    let limit: u64 = 1u64 << size;
    std::iter::from_fn(move || loop {
        if combo >= limit {
            return None;
        }
        let current = combo;
        let low = current & current.wrapping_neg();
        let ripple = current + low;
        combo = (((ripple ^ current) >> 2) / low) | ripple;
        if anchored && current & 1 == 0 {
            continue;
        }
        let mut sub = 0u32;
        for (k, &p) in positions.iter().enumerate() {
            if current >> k & 1 == 1 {
                sub |= 1 << p;
            }
        }
        return Some(sub);
    })
}

/// Exact winner set for `n <= 16`.
pub fn se_winners_exhaustive(t: &Tournament) -> Result<Vec<AlternativeId>, BracketError> {
    Ok(SeOracle::new(t)?.winners())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{bracket_example, kings_example, A};

    #[test]
    fn validate_examples() {
        assert!(validate_bracket(&Bracket::new(vec![0, 1, 2, 3]), 4));
        assert!(!validate_bracket(&Bracket::new(vec![0, 0, 2, 3]), 4));
        assert!(!validate_bracket(&Bracket::new(vec![0, 1, 2]), 3));
        assert!(!validate_bracket(&Bracket::new(vec![0, 1, 2, 4]), 4));
        assert!(!validate_bracket(&Bracket::new(vec![0, 1]), 4));
        assert!(validate_bracket(&Bracket::new(vec![0]), 1));
    }

    #[test]
    fn playout_bracket_example() {
        let t = bracket_example();
        let b = Bracket::new((0..8).collect());
        assert_eq!(playout(&t, &b).unwrap(), 2);
    }

    #[test]
    fn playout_small() {
        let t = Tournament::transitive(1).unwrap();
        assert_eq!(playout(&t, &Bracket::new(vec![0])).unwrap(), 0);
        let t = Tournament::from_matrix(2, &[[false, false], [true, false]]).unwrap();
        assert_eq!(playout(&t, &Bracket::new(vec![0, 1])).unwrap(), 1);
        assert_eq!(playout(&t, &Bracket::new(vec![1, 0])).unwrap(), 1);
    }

    #[test]
    fn playout_errors() {
        assert_eq!(
            playout(&kings_example(), &Bracket::new(vec![0, 1, 2, 3, 4])),
            Err(BracketError::NotPowerOfTwo(5))
        );
        let t = Tournament::transitive(4).unwrap();
        assert_eq!(
            playout(&t, &Bracket::new(vec![0, 1, 1, 3])),
            Err(BracketError::InvalidPermutation(4))
        );
    }

    #[test]
    fn superking_examples() {
        let t = Tournament::transitive(8).unwrap();
        assert!(is_superking(&t, 0).unwrap());
        assert!(!is_superking(&t, 1).unwrap());
        let two = Tournament::transitive(2).unwrap();
        assert!(is_superking(&two, 0).unwrap());
        assert!(!is_superking(&two, 1).unwrap());
        // d beats a and only b, c support a against d: 2 < log2(5)
        assert!(!is_superking(&kings_example(), A).unwrap());
        assert!(is_superking(&t, 9).is_err());
    }

    #[test]
    fn superking_bracket_transitive() {
        let t = Tournament::transitive(8).unwrap();
        let b = superking_bracket(&t, 0).unwrap();
        assert!(validate_bracket(&b, 8));
        assert_eq!(playout(&t, &b).unwrap(), 0);
        let two = Tournament::transitive(2).unwrap();
        assert_eq!(superking_bracket(&two, 0).unwrap().leaves(), &[0, 1]);
        assert_eq!(superking_bracket(&t, 3), Err(BracketError::NotSuperking(3)));
        assert_eq!(
            superking_bracket(&kings_example(), 0),
            Err(BracketError::NotPowerOfTwo(5))
        );
    }

    #[test]
    fn winning_bracket_transitive4() {
        let t = Tournament::transitive(4).unwrap();
        let s = RngStream::new(0, 0);
        match winning_bracket(&t, 0, s, DEFAULT_RETRIES).unwrap() {
            WinningBracket::Found(b) => assert_eq!(playout(&t, &b).unwrap(), 0),
            other => panic!("expected a bracket, got {other:?}"),
        }
        assert_eq!(
            winning_bracket(&t, 3, s, DEFAULT_RETRIES).unwrap(),
            WinningBracket::InfeasibleByMethod
        );
        assert_eq!(
            winning_bracket(&t, 1, s, DEFAULT_RETRIES).unwrap(),
            WinningBracket::InfeasibleByMethod
        );
        assert_eq!(se_winners_exhaustive(&t).unwrap(), vec![0]);
    }

    #[test]
    fn winning_bracket_errors() {
        let s = RngStream::new(0, 0);
        assert_eq!(
            winning_bracket(&kings_example(), 0, s, 4),
            Err(BracketError::NotPowerOfTwo(5))
        );
        let t = Tournament::transitive(4).unwrap();
        assert!(matches!(
            winning_bracket(&t, 4, s, 4),
            Err(BracketError::Tournament(TournamentError::OutOfRange { .. }))
        ));
    }

    #[test]
    fn winning_bracket_example_c() {
        let t = bracket_example();
        match winning_bracket(&t, 2, RngStream::new(1, 0), DEFAULT_RETRIES).unwrap() {
            WinningBracket::Found(b) => assert_eq!(playout(&t, &b).unwrap(), 2),
            other => panic!("expected a bracket, got {other:?}"),
        }
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(
            se_winners_exhaustive(&Tournament::transitive(8).unwrap()).unwrap(),
            vec![0]
        );
        let two = Tournament::from_matrix(2, &[[false, false], [true, false]]).unwrap();
        assert_eq!(se_winners_exhaustive(&two).unwrap(), vec![1]);
        let winners = se_winners_exhaustive(&bracket_example()).unwrap();
        assert!(winners.contains(&2));
        assert_eq!(
            se_winners_exhaustive(&kings_example()),
            Err(BracketError::NotPowerOfTwo(5))
        );
        assert_eq!(
            se_winners_exhaustive(&Tournament::transitive(32).unwrap()),
            Err(BracketError::TooLarge(32))
        );
    }

    #[test]
    fn oracle_witnesses_play_out() {
        let t = bracket_example();
        let oracle = SeOracle::new(&t).unwrap();
        for x in 0..8 {
            match oracle.bracket_for(x) {
                Some(b) => {
                    assert!(oracle.is_winner(x));
                    assert_eq!(playout(&t, &b).unwrap(), x);
                }
                None => assert!(!oracle.is_winner(x)),
            }
        }
    }

    #[test]
    fn halves_enumeration() {
        let all: Vec<u32> = halves(0b1111, false).collect();
        assert_eq!(all.len(), 6);
        let anchored: Vec<u32> = halves(0b1111, true).collect();
        assert_eq!(anchored.len(), 3);
        assert!(anchored.iter().all(|m| m & 1 == 1 && m.count_ones() == 2));
        let sparse: Vec<u32> = halves(0b1010_0101, true).collect();
        assert!(sparse
            .iter()
            .all(|m| m & 0b1010_0101 == *m && m.count_ones() == 2 && m & 1 == 1));
        assert_eq!(halves(1 << 15 | 1, false).count(), 2);
        assert_eq!(halves(0xffff, true).count(), 6435);
    }

    #[test]
    fn bracket_text() {
        let b: Bracket = "3 1 0 2\n".parse().unwrap();
        assert_eq!(b.leaves(), &[3, 1, 0, 2]);
        assert_eq!(b.to_string(), "3 1 0 2\n");
        assert!("1 x".parse::<Bracket>().is_err());
        assert!("1 2\n3 4\n".parse::<Bracket>().is_err());
    }
}
