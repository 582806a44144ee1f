//! Point-cloud types, label distributions, and per-cloud preprocessing.
//!
//! Clouds are stored as ordered lists so that assignments can be expressed
//! through point indices; set semantics only ever enter through the EMD
//! (two clouds equal up to permutation are at distance zero).

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vec3::{self, Vec3};

/// A fixed-cardinality set of 3D points.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    points: Vec<Vec3>,
}

impl PointCloud {
    /// Builds a cloud from raw points. Requires at least one point and all
    /// coordinates finite.
    pub fn new(points: Vec<Vec3>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidInput("point cloud must be non-empty".into()));
        }
        for (i, p) in points.iter().enumerate() {
            if !vec3::is_finite(*p) {
                return Err(Error::InvalidInput(format!(
                    "non-finite coordinate at point {i}"
                )));
            }
        }
        Ok(Self { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec3] {
        &self.points
    }

    /// Mean of all points.
    pub fn centroid(&self) -> Vec3 {
        let mut c = [0.0; 3];
        for p in &self.points {
            c = vec3::add(c, *p);
        }
        vec3::scale(c, 1.0 / self.points.len() as f64)
    }

    /// Returns a copy with points reordered as `points[perm[i]]`.
    /// `perm` must be a bijection on `0..len`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.points.len() {
            return Err(Error::InvalidArgument("permutation length mismatch".into()));
        }
        let mut seen = vec![false; perm.len()];
        for &j in perm {
            if j >= perm.len() || seen[j] {
                return Err(Error::InvalidArgument("not a permutation".into()));
            }
            seen[j] = true;
        }
        Ok(Self {
            points: perm.iter().map(|&j| self.points[j]).collect(),
        })
    }
}

/// A coordinate axis, used for rotations and as the up-axis in alignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Discrete label distribution over `C >= 2` classes; entries sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelDistribution {
    probs: Vec<f64>,
}

impl LabelDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.len() < 2 {
            return Err(Error::InvalidInput(
                "label distribution needs at least 2 classes".into(),
            ));
        }
        let mut sum = 0.0;
        for &p in &probs {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::InvalidInput(
                    "label probabilities must be finite and non-negative".into(),
                ));
            }
            sum += p;
        }
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!(
                "label probabilities sum to {sum}, expected 1"
            )));
        }
        Ok(Self { probs })
    }

    pub fn one_hot(class: usize, num_classes: usize) -> Result<Self> {
        if num_classes < 2 || class >= num_classes {
            return Err(Error::InvalidArgument(format!(
                "one-hot class {class} out of range for {num_classes} classes"
            )));
        }
        let mut probs = vec![0.0; num_classes];
        probs[class] = 1.0;
        Ok(Self { probs })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn num_classes(&self) -> usize {
        self.probs.len()
    }

    /// Index of the largest entry (lowest index wins ties).
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &p) in self.probs.iter().enumerate() {
            if p > self.probs[best] {
                best = i;
            }
        }
        best
    }
}

/// Interpolation ratio in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixRatio(f64);

impl MixRatio {
    pub fn new(lambda: f64) -> Result<Self> {
        if !lambda.is_finite() || !(0.0..=1.0).contains(&lambda) {
            return Err(Error::InvalidArgument(format!(
                "mix ratio {lambda} outside [0, 1]"
            )));
        }
        Ok(Self(lambda))
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

/// Which interpolation produced a mixed sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MixStrategy {
    /// Optimal-assignment interpolation along the EMD matching.
    OptimalAssignment,
    /// Interpolation along a uniformly random bijection.
    RandomAssignment,
    /// Union of subsamples drawn from the two sources.
    PointSampling,
}

impl MixStrategy {
    pub fn as_str(&self) -> &'static str {
        match self {
            MixStrategy::OptimalAssignment => "oa",
            MixStrategy::RandomAssignment => "ra",
            MixStrategy::PointSampling => "ps",
        }
    }
}

/// A labelled cloud, the unit the trainer and mixer consume.
#[derive(Debug, Clone)]
pub struct Sample {
    pub cloud: PointCloud,
    pub label: LabelDistribution,
    /// Position in the originating dataset.
    pub id: usize,
}

/// An interpolated cloud with its mixed label and provenance.
#[derive(Debug, Clone)]
pub struct MixedSample {
    pub cloud: PointCloud,
    pub label: LabelDistribution,
    pub lambda: MixRatio,
    pub strategy: MixStrategy,
    pub source_ids: (usize, usize),
}

/// Centers the cloud on its centroid and scales the farthest point to unit
/// norm. A cloud of coincident points maps to all zeros.
pub fn normalize_unit_sphere(cloud: &PointCloud) -> PointCloud {
    let c = cloud.centroid();
    let centered: Vec<Vec3> = cloud.points().iter().map(|p| vec3::sub(*p, c)).collect();
    let max_norm = centered
        .iter()
        .map(|p| vec3::norm(*p))
        .fold(0.0f64, f64::max);
    let points = if max_norm > 0.0 {
        centered
            .into_iter()
            .map(|p| vec3::scale(p, 1.0 / max_norm))
            .collect()
    } else {
        centered
    };
    PointCloud { points }
}

/// Pads the cloud to `target_n` points by appending uniformly sampled
/// duplicates. Every original point is kept, so the shape support is
/// unchanged.
pub fn replicate_to_cardinality(
    cloud: &PointCloud,
    target_n: usize,
    rng: &mut impl Rng,
) -> Result<PointCloud> {
    let n = cloud.len();
    if target_n < n {
        return Err(Error::InvalidArgument(format!(
            "target cardinality {target_n} below current {n}; down-sampling not supported"
        )));
    }
    let mut points = cloud.points().to_vec();
    points.reserve(target_n - n);
    for _ in n..target_n {
        let idx = rng.gen_range(0..n);
        points.push(cloud.points()[idx]);
    }
    Ok(PointCloud { points })
}

/// Adds i.i.d. zero-mean Gaussian noise per coordinate. When `clip` is set,
/// each offset component is clamped to `[-clip, clip]`.
pub fn jitter(
    cloud: &PointCloud,
    sigma: f64,
    clip: Option<f64>,
    rng: &mut impl Rng,
) -> Result<PointCloud> {
    if !sigma.is_finite() || sigma < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "jitter sigma {sigma} must be non-negative"
        )));
    }
    if let Some(c) = clip {
        if !c.is_finite() || c < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "jitter clip {c} must be non-negative"
            )));
        }
    }
    let normal = rand_distr::Normal::new(0.0, sigma)
        .map_err(|e| Error::InvalidArgument(format!("jitter noise: {e}")))?;
    let points = cloud
        .points()
        .iter()
        .map(|p| {
            let mut q = *p;
            for coord in q.iter_mut() {
                let mut off: f64 = rng.sample(normal);
                if let Some(c) = clip {
                    off = off.clamp(-c, c);
                }
                *coord += off;
            }
            q
        })
        .collect();
    Ok(PointCloud { points })
}

/// Rotates every point about the given axis by `radians` (right-handed).
pub fn rotate_cloud(cloud: &PointCloud, axis: Axis, radians: f64) -> PointCloud {
    let (s, c) = radians.sin_cos();
    let points = cloud
        .points()
        .iter()
        .map(|p| rotate_point(*p, axis, s, c))
        .collect();
    PointCloud { points }
}

#[inline]
fn rotate_point(p: Vec3, axis: Axis, s: f64, c: f64) -> Vec3 {
    match axis {
        Axis::X => [p[0], c * p[1] - s * p[2], s * p[1] + c * p[2]],
        Axis::Y => [s * p[2] + c * p[0], p[1], c * p[2] - s * p[0]],
        Axis::Z => [c * p[0] - s * p[1], s * p[0] + c * p[1], p[2]],
    }
}

/// The robustness-evaluation transforms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Perturbation {
    /// Per-coordinate Gaussian noise with the given standard deviation.
    Noise { sigma: f64 },
    /// Rigid rotation about a coordinate axis, in degrees.
    Rotate { axis: Axis, degrees: f64 },
    /// Uniform scaling about the origin.
    Scale { factor: f64 },
    /// Removes `floor(rate * N)` random points, then replicates survivors
    /// back to the original cardinality.
    DropPoint { rate: f64 },
}

/// Applies one robustness transform to a cloud.
pub fn perturb(
    cloud: &PointCloud,
    transform: Perturbation,
    rng: &mut impl Rng,
) -> Result<PointCloud> {
    match transform {
        Perturbation::Noise { sigma } => jitter(cloud, sigma, None, rng),
        Perturbation::Rotate { axis, degrees } => {
            if !degrees.is_finite() {
                return Err(Error::InvalidArgument("rotation angle not finite".into()));
            }
            Ok(rotate_cloud(cloud, axis, degrees.to_radians()))
        }
        Perturbation::Scale { factor } => {
            if !factor.is_finite() || factor <= 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "scale factor {factor} must be positive"
                )));
            }
            let points = cloud
                .points()
                .iter()
                .map(|p| vec3::scale(*p, factor))
                .collect();
            Ok(PointCloud { points })
        }
        Perturbation::DropPoint { rate } => {
            if !rate.is_finite() || !(0.0..1.0).contains(&rate) {
                return Err(Error::InvalidArgument(format!(
                    "drop rate {rate} outside [0, 1)"
                )));
            }
            let n = cloud.len();
            let drop = (rate * n as f64).floor() as usize;
            if drop == 0 {
                return Ok(cloud.clone());
            }
            // Partial Fisher-Yates: the first `drop` slots are the dropped set.
            let mut idx: Vec<usize> = (0..n).collect();
            for i in 0..drop {
                let j = rng.gen_range(i..n);
                idx.swap(i, j);
            }
            let survivors: Vec<Vec3> = idx[drop..].iter().map(|&i| cloud.points()[i]).collect();
            let kept = PointCloud { points: survivors };
            replicate_to_cardinality(&kept, n, rng)
        }
    }
}
