use std::collections::BTreeSet;

use rand::Rng;

use crate::domain::ServiceId;
use crate::mining::MiningResults;

/// Video-request correlation over 25 services collected from campus users,
/// row `i` lists the services requested together with service `i`.
/// Kept exactly as published, including four cells whose mirror is zero.
const YOUTUBE_ROWS: [&str; 25] = [
    "0000000000000000000000000",
    "0000000000000000000000000",
    "0001101000000000000000000",
    "0010101100000000000000000",
    "0011001100000000000000000",
    "0000001101000000000000000",
    "0011110100000000000000000",
    "0001111000000000000000000",
    "0000000000000000000000000",
    "0000010000000000000000000",
    "0000000000000000000000000",
    "0000000000000000000000000",
    "0000000000000110100000000",
    "0000000000001000110000000",
    "0000000000001000110000000",
    "0000000000000000101000000",
    "0000000000001110000000000",
    "0000000000000111000000000",
    "0000000000000000000000000",
    "0000000000000010000000000",
    "0000000000000000000000000",
    "0000000000000000000000000",
    "0000000000000000000000000",
    "0000000000000000000000000",
    "0000000000000000000000000",
];

/// Square 0/1 service correlation matrix over ids `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorrelationMatrix {
    n: usize,
    cells: Vec<bool>,
}

impl CorrelationMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            cells: vec![false; n * n],
        }
    }

    pub fn youtube() -> Self {
        let n = YOUTUBE_ROWS.len();
        let mut m = Self::zeros(n);
        for (i, row) in YOUTUBE_ROWS.iter().enumerate() {
            for (j, c) in row.bytes().enumerate() {
                m.cells[i * n + j] = c == b'1';
            }
        }
        m
    }

    /// Symmetric matrix where each unordered pair is linked with
    /// probability `eta`.
    pub fn random<R: Rng>(n: usize, eta: f64, rng: &mut R) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in i + 1..n {
                if rng.random::<f64>() < eta {
                    m.cells[i * n + j] = true;
                    m.cells[j * n + i] = true;
                }
            }
        }
        m
    }

    pub fn size(&self) -> usize {
        self.n
    }

    fn index(&self, s: ServiceId) -> Option<usize> {
        let i = s.0 as usize;
        (1..=self.n).contains(&i).then(|| i - 1)
    }

    pub fn get(&self, a: ServiceId, b: ServiceId) -> bool {
        match (self.index(a), self.index(b)) {
            (Some(i), Some(j)) => self.cells[i * self.n + j],
            _ => false,
        }
    }

    pub fn set(&mut self, a: ServiceId, b: ServiceId, v: bool) {
        if let (Some(i), Some(j)) = (self.index(a), self.index(b)) {
            self.cells[i * self.n + j] = v;
        }
    }

    /// Ids marked in row `a`.
    pub fn row(&self, a: ServiceId) -> BTreeSet<ServiceId> {
        (1..=self.n as u32)
            .map(ServiceId)
            .filter(|&b| self.get(a, b))
            .collect()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| self.cells[i * self.n + j] == self.cells[j * self.n + i]))
    }

    /// Union with the transpose.
    pub fn symmetrized(&self) -> Self {
        let mut m = self.clone();
        for i in 0..self.n {
            for j in 0..self.n {
                if self.cells[j * self.n + i] {
                    m.cells[i * self.n + j] = true;
                }
            }
        }
        m
    }

    /// Rows that are entirely zero.
    pub fn isolated(&self) -> BTreeSet<ServiceId> {
        (1..=self.n as u32)
            .map(ServiceId)
            .filter(|&a| self.row(a).is_empty())
            .collect()
    }

    /// The matrix as correlation scores: 1 where marked, 0 elsewhere.
    pub fn as_results(&self, epsilon: f64) -> MiningResults {
        let mut scores = Vec::new();
        for a in 1..=self.n as u32 {
            for b in self.row(ServiceId(a)) {
                scores.push(((ServiceId(a), b), 1.0));
            }
        }
        MiningResults::from_pair_scores(scores, epsilon)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ids(v: &[u32]) -> BTreeSet<ServiceId> {
        v.iter().copied().map(ServiceId).collect()
    }

    #[test]
    fn fixture_rows() {
        let m = CorrelationMatrix::youtube();
        assert_eq!(m.row(ServiceId(3)), ids(&[4, 5, 7]));
        assert_eq!(m.row(ServiceId(6)), ids(&[7, 8, 10]));
        assert_eq!(m.row(ServiceId(13)), ids(&[14, 15, 17]));
        assert!(m.row(ServiceId(1)).is_empty());
        assert_eq!(
            m.isolated(),
            ids(&[1, 2, 9, 11, 12, 19, 21, 22, 23, 24, 25])
        );
    }

    #[test]
    fn fixture_asymmetry_is_preserved() {
        let m = CorrelationMatrix::youtube();
        assert!(!m.is_symmetric());
        assert!(m.get(ServiceId(16), ServiceId(17)) && !m.get(ServiceId(17), ServiceId(16)));
        assert!(m.symmetrized().is_symmetric());
    }

    #[test]
    fn matrix_as_correlation_scores() {
        let r = CorrelationMatrix::youtube().as_results(0.5);
        assert_eq!(r.get_related(ServiceId(6)), ids(&[7, 8, 10]));
        assert!(r.get_related(ServiceId(1)).is_empty());
        assert_eq!(r.get_related(ServiceId(13)), ids(&[14, 15, 17]));
    }

    #[test]
    fn random_matrix_is_symmetric_with_zero_diagonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = CorrelationMatrix::random(30, 0.5, &mut rng);
        assert!(m.is_symmetric());
        assert!((1..=30).all(|i| !m.get(ServiceId(i), ServiceId(i))));
        let edges: usize = (1..=30).map(|i| m.row(ServiceId(i)).len()).sum::<usize>() / 2;
        let pairs = 30 * 29 / 2;
        assert!((edges as f64 / pairs as f64 - 0.5).abs() < 0.1);
    }
}
