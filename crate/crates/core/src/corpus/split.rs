use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::CorpusError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitRatios {
    pub train: f64,
    pub validation: f64,
    pub test: f64,
}

impl Default for SplitRatios {
    fn default() -> Self {
        Self { train: 0.8, validation: 0.1, test: 0.1 }
    }
}

impl SplitRatios {
    fn validate(&self) -> Result<(), CorpusError> {
        let parts = [self.train, self.validation, self.test];
        if parts.iter().any(|r| !r.is_finite() || *r <= 0.0) {
            return Err(CorpusError::InvalidRatios(format!("ratios must be positive, got {parts:?}")));
        }
        let sum: f64 = parts.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(CorpusError::InvalidRatios(format!("ratios sum to {sum}, not 1")));
        }
        Ok(())
    }

    /// Largest-remainder allocation of `n` items; ties go to the earlier part.
    fn sizes(&self, n: usize) -> [usize; 3] {
        let parts = [self.train, self.validation, self.test];
        let exact: Vec<f64> = parts.iter().map(|r| r * n as f64).collect();
        let mut sizes = [0usize; 3];
        for (s, e) in sizes.iter_mut().zip(&exact) {
            *s = e.floor() as usize;
        }
        let mut order = [0usize, 1, 2];
        order.sort_by(|&a, &b| {
            let ra = exact[a] - exact[a].floor();
            let rb = exact[b] - exact[b].floor();
            rb.total_cmp(&ra).then(a.cmp(&b))
        });
        let mut left = n - sizes.iter().sum::<usize>();
        for i in order.iter().cycle() {
            if left == 0 {
                break;
            }
            sizes[*i] += 1;
            left -= 1;
        }
        sizes
    }
}

/// Shuffles with a seeded ChaCha8 stream and cuts into train, validation
/// and test partitions.
pub fn split_corpus<T>(
    items: Vec<T>,
    ratios: SplitRatios,
    seed: u64,
) -> Result<(Vec<T>, Vec<T>, Vec<T>), CorpusError> {
    ratios.validate()?;
    let [n_train, n_val, _] = ratios.sizes(items.len());
    let mut items = items;
    items.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut rest = items.split_off(n_train);
    let test = rest.split_off(n_val);
    Ok((items, rest, test))
}
