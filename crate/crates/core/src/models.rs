//! Random tournament models and the deterministic randomness they draw from.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::tournament::{Tournament, TournamentError};

/// Tolerance on `P[i][j] + P[j][i] == 1`.
pub const CONSISTENCY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("p must lie in [0, 0.5], got {0}")]
    InvalidP(f64),
    #[error("inconsistent probability matrix: {0}")]
    BadMatrix(String),
    #[error("model needs n >= 2, got {0}")]
    TooSmall(usize),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Tournament(#[from] TournamentError),
}

/// A seeded stream of uniform draws. Equal `(master_seed, substream)` pairs
/// always produce the same sequence; distinct substreams are independent
/// ChaCha streams under the same key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub master_seed: u64,
    pub substream: u64,
}

impl RngStream {
    pub fn new(master_seed: u64, substream: u64) -> Self {
        RngStream {
            master_seed,
            substream,
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.substream);
        rng
    }
}

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Folds several words into one seed, order-sensitively.
pub fn mix_seed(parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(0x243f_6a88_85a3_08d3, |acc, &p| mix64(acc ^ mix64(p)))
}

/// Square matrix of pairwise win probabilities: `get(i, j)` is the
/// probability that `i` beats `j`. The diagonal is ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityMatrix {
    n: usize,
    data: Vec<f64>,
}

impl ProbabilityMatrix {
    /// Builds a matrix from the upper triangle: `upper(i, j)` for `i < j` is
    /// the probability that `i` beats `j`.
    pub fn from_upper(n: usize, mut upper: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let q = upper(i, j);
                data[i * n + j] = q;
                data[j * n + i] = 1.0 - q;
            }
        }
        ProbabilityMatrix { n, data }
    }

    /// Validates a full matrix.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, ModelError> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(ModelError::BadMatrix(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        let m = ProbabilityMatrix { n, data };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        for i in 0..self.n {
            for j in 0..self.n {
                if i == j {
                    continue;
                }
                let q = self.get(i, j);
                if !(0.0..=1.0).contains(&q) {
                    return Err(ModelError::BadMatrix(format!(
                        "entry ({i}, {j}) = {q} is not a probability"
                    )));
                }
                if i < j && (q + self.get(j, i) - 1.0).abs() > CONSISTENCY_TOL {
                    return Err(ModelError::BadMatrix(format!(
                        "entries ({i}, {j}) and ({j}, {i}) sum to {}",
                        q + self.get(j, i)
                    )));
                }
            }
        }
        Ok(())
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Expected outdegree of `i`.
    pub fn row_sum(&self, i: usize) -> f64 {
        (0..self.n)
            .filter(|&j| j != i)
            .map(|j| self.get(i, j))
            .sum()
    }

    /// Smallest off-diagonal entry; the `p` for which every entry lies in
    /// `[p, 1 - p]`.
    pub fn min_entry(&self) -> f64 {
        let mut min = 0.5f64;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    min = min.min(self.get(i, j));
                }
            }
        }
        min
    }
}

/// Text format: `n`, then `n` rows of `n` whitespace-separated decimals.
impl FromStr for ProbabilityMatrix {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut lines = s.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(ModelError::Parse {
            line: 1,
            msg: "missing size line".into(),
        })?;
        let n: usize = header.trim().parse().map_err(|e| ModelError::Parse {
            line: 1,
            msg: format!("bad size {header:?}: {e}"),
        })?;
        let mut rows = Vec::with_capacity(n);
        for (idx, line) in lines {
            let row = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<f64>().map_err(|e| ModelError::Parse {
                        line: idx + 1,
                        msg: format!("bad probability {tok:?}: {e}"),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(row);
        }
        if rows.len() != n {
            return Err(ModelError::BadMatrix(format!(
                "expected {n} rows, found {}",
                rows.len()
            )));
        }
        ProbabilityMatrix::from_rows(&rows)
    }
}

impl fmt::Display for ProbabilityMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.n)?;
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| format!("{}", self.get(i, j))).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// The random models. Alternatives are listed strongest first, so `i < j`
/// means `i` is the favourite.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpec {
    /// Every pair is a fair coin.
    Uniform,
    /// Each upset happens with probability `p`.
    Condorcet { p: f64 },
    /// Upset probability `0.5 - (0.5 - p)(j - i)/(n - 1)`: close ranks are
    /// nearly coin flips, the extreme pair has upset probability `p`.
    Gap { p: f64 },
    /// Arbitrary consistent pairwise probabilities.
    Generalized(ProbabilityMatrix),
}

impl ModelSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ModelSpec::Uniform => "uniform",
            ModelSpec::Condorcet { .. } => "condorcet",
            ModelSpec::Gap { .. } => "gap",
            ModelSpec::Generalized(_) => "generalized",
        }
    }

    /// The model's upset parameter: `0.5` for uniform, the matrix minimum
    /// for generalized.
    pub fn p(&self) -> f64 {
        match self {
            ModelSpec::Uniform => 0.5,
            ModelSpec::Condorcet { p } | ModelSpec::Gap { p } => *p,
            ModelSpec::Generalized(m) => m.min_entry(),
        }
    }
}

pub fn check_p(p: f64) -> Result<(), ModelError> {
    if (0.0..=0.5).contains(&p) {
        Ok(())
    } else {
        Err(ModelError::InvalidP(p))
    }
}

/// Expands a model into its `n x n` probability matrix.
pub fn probability_matrix(spec: &ModelSpec, n: usize) -> Result<ProbabilityMatrix, ModelError> {
    if n < 2 {
        return Err(ModelError::TooSmall(n));
    }
    match spec {
        ModelSpec::Uniform => Ok(ProbabilityMatrix::from_upper(n, |_, _| 0.5)),
        ModelSpec::Condorcet { p } => {
            check_p(*p)?;
            Ok(ProbabilityMatrix::from_upper(n, |_, _| 1.0 - p))
        }
        ModelSpec::Gap { p } => {
            check_p(*p)?;
            let span = (n - 1) as f64;
            Ok(ProbabilityMatrix::from_upper(n, |i, j| {
                let upset = 0.5 - (0.5 - p) * (j - i) as f64 / span;
                1.0 - upset
            }))
        }
        ModelSpec::Generalized(m) => {
            if m.n() != n {
                return Err(ModelError::BadMatrix(format!(
                    "matrix has dimension {}, requested n = {n}",
                    m.n()
                )));
            }
            m.validate()?;
            Ok(m.clone())
        }
    }
}

/// Samples one tournament, one draw per pair in lexicographic `(i, j)`
/// order with `i < j`: `i` beats `j` iff `u < P[i][j]`.
pub fn sample(matrix: &ProbabilityMatrix, stream: RngStream) -> Result<Tournament, ModelError> {
    let mut rng = stream.rng();
    Ok(sample_with(matrix, &mut rng)?)
}

pub(crate) fn sample_with(
    matrix: &ProbabilityMatrix,
    rng: &mut impl Rng,
) -> Result<Tournament, TournamentError> {
    Tournament::from_orientation(matrix.n(), |i, j| rng.random::<f64>() < matrix.get(i, j))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gap_formula_extreme_pair() {
        let m = probability_matrix(&ModelSpec::Gap { p: 0.1 }, 5).unwrap();
        // last alternative upsets the first with probability p
        assert!((m.get(4, 0) - 0.1).abs() < 1e-15);
        assert!((m.get(0, 4) - 0.9).abs() < 1e-15);
        // adjacent ranks: 0.5 - 0.4 * 1/4 = 0.4
        assert!((m.get(1, 0) - 0.4).abs() < 1e-15);
    }

    #[test]
    fn gap_at_half_is_uniform() {
        for n in [2, 3, 7, 20] {
            let gap = probability_matrix(&ModelSpec::Gap { p: 0.5 }, n).unwrap();
            let uni = probability_matrix(&ModelSpec::Uniform, n).unwrap();
            assert_eq!(gap, uni);
        }
    }

    #[test]
    fn condorcet_entries() {
        let m = probability_matrix(&ModelSpec::Condorcet { p: 0.2 }, 3).unwrap();
        assert!((m.get(0, 1) - 0.8).abs() < 1e-15);
        assert!((m.get(2, 0) - 0.2).abs() < 1e-15);
        assert!((m.get(1, 2) - 0.8).abs() < 1e-15);
    }

    #[test]
    fn invalid_p_and_n() {
        assert_eq!(
            probability_matrix(&ModelSpec::Gap { p: 0.6 }, 10),
            Err(ModelError::InvalidP(0.6))
        );
        assert_eq!(
            probability_matrix(&ModelSpec::Condorcet { p: -0.1 }, 10),
            Err(ModelError::InvalidP(-0.1))
        );
        assert!(probability_matrix(&ModelSpec::Condorcet { p: f64::NAN }, 10).is_err());
        assert_eq!(
            probability_matrix(&ModelSpec::Uniform, 1),
            Err(ModelError::TooSmall(1))
        );
    }

    #[test]
    fn generalized_validation() {
        let good = vec![vec![0.0, 0.7], vec![0.3, 0.0]];
        let m = ProbabilityMatrix::from_rows(&good).unwrap();
        assert!(probability_matrix(&ModelSpec::Generalized(m.clone()), 2).is_ok());
        assert!(matches!(
            probability_matrix(&ModelSpec::Generalized(m), 3),
            Err(ModelError::BadMatrix(_))
        ));
        let bad = vec![vec![0.0, 0.7], vec![0.4, 0.0]];
        assert!(matches!(
            ProbabilityMatrix::from_rows(&bad),
            Err(ModelError::BadMatrix(_))
        ));
        let out_of_range = vec![vec![0.0, 1.5], vec![-0.5, 0.0]];
        assert!(ProbabilityMatrix::from_rows(&out_of_range).is_err());
    }

    #[test]
    fn matrix_text_round_trip() {
        let text = "3\n0 0.25 0.5\n0.75 0 1\n0.5 0 0\n";
        let m: ProbabilityMatrix = text.parse().unwrap();
        assert_eq!(m.get(1, 0), 0.75);
        assert_eq!(m.min_entry(), 0.0);
        assert_eq!(m.to_string().parse::<ProbabilityMatrix>().unwrap(), m);
        assert!("2\n0 0.5\n".parse::<ProbabilityMatrix>().is_err());
        assert!("2\n0 x\n1 0\n".parse::<ProbabilityMatrix>().is_err());
    }

    #[test]
    fn condorcet_zero_is_transitive() {
        let m = probability_matrix(&ModelSpec::Condorcet { p: 0.0 }, 12).unwrap();
        for seed in 0..20 {
            let t = sample(&m, RngStream::new(seed, seed * 7)).unwrap();
            assert_eq!(t, Tournament::transitive(12).unwrap());
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let m = probability_matrix(&ModelSpec::Uniform, 30).unwrap();
        let s = RngStream::new(42, 3);
        assert_eq!(sample(&m, s).unwrap(), sample(&m, s).unwrap());
        assert_ne!(
            sample(&m, s).unwrap(),
            sample(&m, RngStream::new(42, 4)).unwrap()
        );
    }

    #[test]
    fn upset_fraction_near_half() {
        let m = probability_matrix(&ModelSpec::Condorcet { p: 0.5 }, 50).unwrap();
        let t = sample(&m, RngStream::new(3, 0)).unwrap();
        let upsets = (0..50)
            .flat_map(|i| (i + 1..50).map(move |j| (i, j)))
            .filter(|&(i, j)| t.beats(j, i))
            .count();
        let frac = upsets as f64 / 1225.0;
        assert!((frac - 0.5).abs() <= 0.05, "upset fraction {frac}");
    }

    #[test]
    fn edge_frequency_converges() {
        let m = ProbabilityMatrix::from_upper(2, |_, _| 0.8);
        let wins = (0..10_000)
            .filter(|&t| sample(&m, RngStream::new(11, t)).unwrap().beats(0, 1))
            .count();
        let freq = wins as f64 / 10_000.0;
        assert!((0.78..=0.82).contains(&freq), "frequency {freq}");
    }

    #[test]
    fn mix_seed_is_order_sensitive() {
        assert_ne!(mix_seed(&[1, 2]), mix_seed(&[2, 1]));
        assert_eq!(mix_seed(&[1, 2]), mix_seed(&[1, 2]));
    }
}
