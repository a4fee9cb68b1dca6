//! The immutable tournament type.
//!
//! Alternatives are identified by 0-based indices `0..n`. The alternative
//! written `x_i` in the usual 1-based notation has index `i - 1`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::bits::{self, BitMatrix};

/// Index of an alternative inside one [`Tournament`].
pub type AlternativeId = usize;

/// Upper bound on tournament size.
pub const MAX_ALTERNATIVES: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TournamentError {
    #[error("expected a {expected}x{expected} matrix, row {row} has {found} entries")]
    DimensionMismatch {
        expected: usize,
        row: usize,
        found: usize,
    },
    #[error("expected {expected} rows, found {found}")]
    RowCount { expected: usize, found: usize },
    #[error("pair ({0}, {1}) must have exactly one direction set")]
    NotAntisymmetric(AlternativeId, AlternativeId),
    #[error("alternative {0} dominates itself")]
    SelfLoop(AlternativeId),
    #[error("alternative {id} out of range for n = {n}")]
    OutOfRange { id: AlternativeId, n: usize },
    #[error("dominance between an alternative and itself ({0}) is undefined")]
    SamePair(AlternativeId),
    #[error("subset is empty")]
    EmptySubset,
    #[error("alternative {0} appears more than once")]
    DuplicateId(AlternativeId),
    #[error("tournament size {0} outside 1..={max}", max = MAX_ALTERNATIVES)]
    BadSize(usize),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// A complete, antisymmetric dominance relation on `n` alternatives.
///
/// Rows are bit-packed; `dominates(i, j)` is a single bit test and
/// neighbourhood operations run a word at a time.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Tournament {
    adj: BitMatrix,
}

/// The outcome of [`Tournament::restrict`]: the sub-tournament plus the
/// translation between its indices and the parent's.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Restriction {
    pub tournament: Tournament,
    /// `original[new] = old`
    pub original: Vec<AlternativeId>,
}

impl Restriction {
    pub fn to_original(&self, local: AlternativeId) -> AlternativeId {
        self.original[local]
    }

    pub fn to_local(&self, original: AlternativeId) -> Option<AlternativeId> {
        self.original.iter().position(|&o| o == original)
    }
}

impl Tournament {
    /// Builds a tournament by orienting every pair `i < j`: `i` beats `j`
    /// iff `forward(i, j)`.
    pub fn from_orientation(
        n: usize,
        mut forward: impl FnMut(AlternativeId, AlternativeId) -> bool,
    ) -> Result<Self, TournamentError> {
        check_size(n)?;
        let mut adj = BitMatrix::zeros(n);
        for i in 0..n {
            for j in i + 1..n {
                if forward(i, j) {
                    adj.set(i, j);
                } else {
                    adj.set(j, i);
                }
            }
        }
        Ok(Tournament { adj })
    }

    /// Validates an explicit `n x n` relation.
    pub fn from_matrix<R: AsRef<[bool]>>(n: usize, rows: &[R]) -> Result<Self, TournamentError> {
        check_size(n)?;
        if rows.len() != n {
            return Err(TournamentError::RowCount {
                expected: n,
                found: rows.len(),
            });
        }
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != n {
                return Err(TournamentError::DimensionMismatch {
                    expected: n,
                    row: i,
                    found: row.len(),
                });
            }
            if row[i] {
                return Err(TournamentError::SelfLoop(i));
            }
        }
        let mut adj = BitMatrix::zeros(n);
        for i in 0..n {
            for j in i + 1..n {
                match (rows[i].as_ref()[j], rows[j].as_ref()[i]) {
                    (true, false) => adj.set(i, j),
                    (false, true) => adj.set(j, i),
                    _ => return Err(TournamentError::NotAntisymmetric(i, j)),
                }
            }
        }
        Ok(Tournament { adj })
    }

    /// `x_i` beats `x_j` iff `i < j`.
    pub fn transitive(n: usize) -> Result<Self, TournamentError> {
        Tournament::from_orientation(n, |_, _| true)
    }

    /// The tournament where `x_i` beats `x_j` iff `i - j >= 2` or `j - i == 1`.
    ///
    /// `x_0` is an `(n-1)`-king but needs a path of length `n - 1` to reach
    /// `x_{n-1}`.
    pub fn path_worstcase(n: usize) -> Result<Self, TournamentError> {
        if n < 2 {
            return Err(TournamentError::BadSize(n));
        }
        // for i < j only the j - i == 1 clause can favour i
        Tournament::from_orientation(n, |i, j| j - i == 1)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.adj.n()
    }

    /// Unchecked dominance test; panics if an index is out of range.
    #[inline]
    pub fn beats(&self, i: AlternativeId, j: AlternativeId) -> bool {
        self.adj.get(i, j)
    }

    pub fn dominates(&self, i: AlternativeId, j: AlternativeId) -> Result<bool, TournamentError> {
        self.check(i)?;
        self.check(j)?;
        if i == j {
            return Err(TournamentError::SamePair(i));
        }
        Ok(self.beats(i, j))
    }

    pub fn outdegree(&self, i: AlternativeId) -> Result<usize, TournamentError> {
        self.check(i)?;
        Ok(bits::count(self.adj.row(i)))
    }

    pub fn indegree(&self, i: AlternativeId) -> Result<usize, TournamentError> {
        Ok(self.n() - 1 - self.outdegree(i)?)
    }

    /// Outdegrees of all alternatives.
    pub fn outdegrees(&self) -> Vec<usize> {
        (0..self.n())
            .map(|i| bits::count(self.adj.row(i)))
            .collect()
    }

    /// Alternatives that `i` beats, ascending.
    pub fn out_neighbors(&self, i: AlternativeId) -> Vec<AlternativeId> {
        bits::ones(self.adj.row(i)).collect()
    }

    /// Alternatives that beat `i`, ascending.
    pub fn in_neighbors(&self, i: AlternativeId) -> Vec<AlternativeId> {
        (0..self.n())
            .filter(|&j| j != i && !self.beats(i, j))
            .collect()
    }

    /// Sub-tournament on `subset`; local index `m` corresponds to `subset[m]`.
    pub fn restrict(&self, subset: &[AlternativeId]) -> Result<Restriction, TournamentError> {
        if subset.is_empty() {
            return Err(TournamentError::EmptySubset);
        }
        let mut seen = vec![false; self.n()];
        for &id in subset {
            self.check(id)?;
            if std::mem::replace(&mut seen[id], true) {
                return Err(TournamentError::DuplicateId(id));
            }
        }
        let tournament =
            Tournament::from_orientation(subset.len(), |a, b| self.beats(subset[a], subset[b]))?;
        Ok(Restriction {
            tournament,
            original: subset.to_vec(),
        })
    }

    /// Raw dominance matrix, exposed to the solvers.
    pub(crate) fn matrix(&self) -> &BitMatrix {
        &self.adj
    }

    pub(crate) fn row(&self, i: AlternativeId) -> &[u64] {
        self.adj.row(i)
    }

    pub(crate) fn check(&self, id: AlternativeId) -> Result<(), TournamentError> {
        if id < self.n() {
            Ok(())
        } else {
            Err(TournamentError::OutOfRange { id, n: self.n() })
        }
    }

    /// Boolean rows, `rows[i][j] == beats(i, j)`.
    pub fn to_rows(&self) -> Vec<Vec<bool>> {
        (0..self.n())
            .map(|i| (0..self.n()).map(|j| self.beats(i, j)).collect())
            .collect()
    }
}

fn check_size(n: usize) -> Result<(), TournamentError> {
    if n == 0 || n > MAX_ALTERNATIVES {
        Err(TournamentError::BadSize(n))
    } else {
        Ok(())
    }
}

impl fmt::Debug for Tournament {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tournament(n = {})\n{:?}", self.n(), self.adj)
    }
}

/// Text format: `n` on the first line, then `n` rows of `0`/`1` characters.
impl fmt::Display for Tournament {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.n())?;
        let mut line = String::with_capacity(self.n());
        for i in 0..self.n() {
            line.clear();
            line.extend((0..self.n()).map(|j| if self.beats(i, j) { '1' } else { '0' }));
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

impl FromStr for Tournament {
    type Err = TournamentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse_err = |line: usize, msg: String| TournamentError::Parse { line, msg };
        let mut lines = s.lines();
        let header = lines
            .next()
            .ok_or_else(|| parse_err(1, "missing size line".into()))?;
        let n: usize = header
            .trim()
            .parse()
            .map_err(|e| parse_err(1, format!("bad size {header:?}: {e}")))?;
        check_size(n)?;
        let mut rows = Vec::with_capacity(n);
        for (idx, line) in lines.enumerate() {
            let line_no = idx + 2;
            let line = line.trim_end_matches('\r');
            if line.is_empty() && rows.len() == n {
                continue;
            }
            if rows.len() == n {
                return Err(parse_err(line_no, "unexpected trailing content".into()));
            }
            let row = line
                .chars()
                .map(|c| match c {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    other => Err(parse_err(
                        line_no,
                        format!("unexpected character {other:?}"),
                    )),
                })
                .collect::<Result<Vec<bool>, _>>()?;
            rows.push(row);
        }
        Tournament::from_matrix(n, &rows)
    }
}
