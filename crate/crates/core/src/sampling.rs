//! Seeded, index-addressed point clouds on S³ and Monte Carlo estimates.
//!
//! Point `i` of a sample set is a pure function of `(seed, i)`: a ChaCha8
//! stream keyed by the seed with stream id `i` feeds four standard normals,
//! which are then normalized. Parallel generation and evaluation therefore
//! produce bit-identical results for any thread count. Reductions use a
//! fixed pairwise tree so their rounding does not depend on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quat::{Quat, UnitQuat};

/// Default finite-difference step carried by a sample set.
pub const DEFAULT_FD_STEP: f64 = 1e-4;
/// Default sample count for residual sweeps.
pub const DEFAULT_RESIDUAL_SAMPLES: usize = 1000;
/// Default sample count for volume estimates.
pub const DEFAULT_VOLUME_SAMPLES: usize = 20_000;

#[derive(Clone, Debug, PartialEq)]
pub struct SampleSet {
    pub seed: u64,
    pub n: usize,
    pub points: Vec<UnitQuat>,
    pub fd_step: f64,
}

impl SampleSet {
    pub fn with_fd_step(mut self, h: f64) -> Self {
        self.fd_step = h;
        self
    }

    pub fn iter(&self) -> impl Iterator<Item = &UnitQuat> {
        self.points.iter()
    }

    /// A sample set over explicitly given points (seed 0).
    pub fn from_points(points: Vec<UnitQuat>) -> Self {
        SampleSet {
            seed: 0,
            n: points.len(),
            points,
            fd_step: DEFAULT_FD_STEP,
        }
    }
}

/// The `index`-th uniform point of the stream keyed by `seed`.
pub fn point_at(seed: u64, index: u64) -> UnitQuat {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    loop {
        let c: [f64; 4] = std::array::from_fn(|_| StandardNormal.sample(&mut rng));
        let q = Quat::new(c[0], c[1], c[2], c[3]);
        // rejection of a (measure-zero) near-origin draw keeps the map total
        if q.norm() > 1e-9 {
            return UnitQuat::renormalize(q);
        }
    }
}

/// `n` points distributed uniformly on S³ (Haar measure).
pub fn uniform_s3(seed: u64, n: usize) -> SampleSet {
    let n = n.max(1);
    let points = (0..n as u64)
        .into_par_iter()
        .map(|i| point_at(seed, i))
        .collect();
    SampleSet {
        seed,
        n,
        points,
        fd_step: DEFAULT_FD_STEP,
    }
}

/// Mean and standard error of a Monte Carlo average.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MCEstimate {
    pub mean: f64,
    pub standard_error: f64,
    pub n: usize,
}

impl MCEstimate {
    pub fn from_values(values: &[f64]) -> Self {
        let n = values.len();
        let mean = pairwise_sum(values) / n as f64;
        let sq: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
        let var = if n > 1 {
            pairwise_sum(&sq) / (n as f64 - 1.0)
        } else {
            0.0
        };
        MCEstimate {
            mean,
            standard_error: (var / n as f64).sqrt(),
            n,
        }
    }

    /// Whether `value` lies within `k` standard errors (plus an absolute floor).
    pub fn agrees_with(&self, value: f64, k: f64, floor: f64) -> bool {
        (self.mean - value).abs() <= k * self.standard_error + floor
    }
}

/// Average of `f` over the samples. Since the samples are uniform on S³,
/// the mean estimates `∫ f / vol(S³)` directly; no `2π²` factor appears.
pub fn mc_integrate<F>(f: F, samples: &SampleSet) -> Result<MCEstimate>
where
    F: Fn(UnitQuat) -> f64 + Sync,
{
    if samples.points.is_empty() {
        return Err(Error::Domain("empty sample set".into()));
    }
    let values: Vec<f64> = samples.points.par_iter().map(|g| f(*g)).collect();
    if let Some((g, v)) = samples
        .points
        .iter()
        .zip(&values)
        .find(|(_, v)| !v.is_finite())
    {
        return Err(Error::Evaluation {
            point: g.to_string(),
            value: *v,
        });
    }
    Ok(MCEstimate::from_values(&values))
}

/// Sum with a fixed binary tree; the result depends only on the input order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 16;
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Maximum over a parallel map, ignoring nothing: a NaN propagates as NaN.
pub fn par_max<T, F>(items: &[T], f: F) -> f64
where
    T: Sync,
    F: Fn(&T) -> f64 + Sync + Send,
{
    items
        .par_iter()
        .map(f)
        .reduce(|| 0.0, |a, b| if a.is_nan() || b.is_nan() { f64::NAN } else { a.max(b) })
}
