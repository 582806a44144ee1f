//! Interpolation between labelled point clouds.
//!
//! Three strategies produce an interpolant at ratio `lambda`:
//! optimal-assignment mixing moves each point of the first cloud part-way
//! toward its EMD-matched partner in the second; random-assignment mixing
//! does the same along a uniformly random bijection; point-sampling mixing
//! takes the union of subsamples of the two sources with proportions
//! `(1 - lambda, lambda)`. Labels always mix linearly with the same ratio.

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use crate::cloud::{
    replicate_to_cardinality, LabelDistribution, MixRatio, MixStrategy, MixedSample, PointCloud,
    Sample,
};
use crate::emd::{emd, Assignment, SolverConfig};
use crate::error::{Error, Result};
use crate::rng::substream;
use crate::vec3::{self, Vec3};

/// Shape parameter of the symmetric Beta distribution the mix ratio is
/// drawn from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaParams {
    gamma: f64,
}

impl BetaParams {
    pub fn new(gamma: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "beta shape {gamma} must be positive"
            )));
        }
        Ok(Self { gamma })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

/// Draws `lambda ~ Beta(gamma, gamma)`.
pub fn sample_lambda(params: &BetaParams, rng: &mut impl Rng) -> MixRatio {
    let beta = rand_distr::Beta::new(params.gamma, params.gamma)
        .expect("positive shape validated at construction");
    let lambda: f64 = rng.sample(beta);
    MixRatio::new(lambda.clamp(0.0, 1.0)).expect("beta sample lies in [0, 1]")
}

/// `(1 - lambda) * c1 + lambda * c2`.
pub fn mix_labels(
    c1: &LabelDistribution,
    c2: &LabelDistribution,
    lambda: MixRatio,
) -> Result<LabelDistribution> {
    if c1.num_classes() != c2.num_classes() {
        return Err(Error::InvalidArgument(format!(
            "label dimension mismatch: {} vs {}",
            c1.num_classes(),
            c2.num_classes()
        )));
    }
    let l = lambda.value();
    let probs = c1
        .probs()
        .iter()
        .zip(c2.probs())
        .map(|(&p, &q)| (1.0 - l) * p + l * q)
        .collect();
    LabelDistribution::new(probs)
}

/// Optimal-assignment interpolation: point `i` of the result is
/// `(1 - lambda) * a[i] + lambda * b[phi(i)]` for the EMD-optimal bijection
/// `phi`. The assignment is returned so callers can recompute matched costs
/// without re-solving.
pub fn mix_oa(
    a: &PointCloud,
    b: &PointCloud,
    lambda: MixRatio,
    cfg: &SolverConfig,
) -> Result<(PointCloud, Assignment)> {
    let result = emd(a, b, cfg)?;
    let cloud = blend_along(a, b, &result.assignment, lambda);
    Ok((cloud, result.assignment))
}

/// Random-assignment interpolation along a uniformly random bijection.
pub fn mix_ra(
    a: &PointCloud,
    b: &PointCloud,
    lambda: MixRatio,
    rng: &mut impl Rng,
) -> Result<PointCloud> {
    if a.len() != b.len() {
        return Err(Error::InvalidArgument(format!(
            "cardinality mismatch: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let mut perm: Vec<usize> = (0..a.len()).collect();
    perm.shuffle(rng);
    let assignment = Assignment::new(perm).expect("shuffled identity is a bijection");
    Ok(blend_along(a, b, &assignment, lambda))
}

/// Point-sampling interpolation: `N - floor(lambda * N)` points drawn
/// without replacement from `a` followed by `floor(lambda * N)` points from
/// `b`.
pub fn mix_ps(
    a: &PointCloud,
    b: &PointCloud,
    lambda: MixRatio,
    rng: &mut impl Rng,
) -> Result<PointCloud> {
    if a.len() != b.len() {
        return Err(Error::InvalidArgument(format!(
            "cardinality mismatch: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let n = a.len();
    let from_b = (lambda.value() * n as f64).floor() as usize;
    let from_a = n - from_b;
    let mut pick_a: Vec<usize> = (0..n).collect();
    pick_a.shuffle(rng);
    let mut pick_b: Vec<usize> = (0..n).collect();
    pick_b.shuffle(rng);
    let mut points: Vec<Vec3> = Vec::with_capacity(n);
    points.extend(pick_a[..from_a].iter().map(|&i| a.points()[i]));
    points.extend(pick_b[..from_b].iter().map(|&i| b.points()[i]));
    PointCloud::new(points)
}

fn blend_along(
    a: &PointCloud,
    b: &PointCloud,
    assignment: &Assignment,
    lambda: MixRatio,
) -> PointCloud {
    let l = lambda.value();
    let points: Vec<Vec3> = assignment
        .perm()
        .iter()
        .enumerate()
        .map(|(i, &j)| vec3::lerp(a.points()[i], b.points()[j], l))
        .collect();
    PointCloud::new(points).expect("blend of finite points is finite")
}

/// Per-point latent features at some network layer, keyed by the 3D
/// coordinates the features were computed from.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentCloud {
    coords: Vec<Vec3>,
    feats: Vec<Vec<f64>>,
    feat_width: usize,
    layer_id: usize,
}

impl LatentCloud {
    pub fn new(coords: Vec<Vec3>, feats: Vec<Vec<f64>>, layer_id: usize) -> Result<Self> {
        if coords.is_empty() || coords.len() != feats.len() {
            return Err(Error::InvalidInput(
                "latent cloud needs matching non-empty coordinate and feature lists".into(),
            ));
        }
        let feat_width = feats[0].len();
        for f in &feats {
            if f.len() != feat_width {
                return Err(Error::InvalidInput(
                    "latent feature vectors must share one width".into(),
                ));
            }
            if f.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidInput("non-finite latent feature".into()));
            }
        }
        for c in &coords {
            if !vec3::is_finite(*c) {
                return Err(Error::InvalidInput("non-finite latent coordinate".into()));
            }
        }
        Ok(Self {
            coords,
            feats,
            feat_width,
            layer_id,
        })
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[Vec3] {
        &self.coords
    }

    pub fn feats(&self) -> &[Vec<f64>] {
        &self.feats
    }

    pub fn feat_width(&self) -> usize {
        self.feat_width
    }

    pub fn layer_id(&self) -> usize {
        self.layer_id
    }
}

/// Mixes latent clouds: the assignment is solved on the 3D coordinates only,
/// then both coordinates and features blend linearly along it.
pub fn mix_manifold(
    a: &LatentCloud,
    b: &LatentCloud,
    lambda: MixRatio,
    cfg: &SolverConfig,
) -> Result<(LatentCloud, Assignment)> {
    if a.len() != b.len() {
        return Err(Error::InvalidArgument(format!(
            "latent cardinality mismatch: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    if a.feat_width() != b.feat_width() {
        return Err(Error::InvalidArgument(format!(
            "latent width mismatch: {} vs {}",
            a.feat_width(),
            b.feat_width()
        )));
    }
    if a.layer_id() != b.layer_id() {
        return Err(Error::InvalidArgument(format!(
            "latent layer mismatch: {} vs {}",
            a.layer_id(),
            b.layer_id()
        )));
    }
    let ca = PointCloud::new(a.coords().to_vec())?;
    let cb = PointCloud::new(b.coords().to_vec())?;
    let result = emd(&ca, &cb, cfg)?;
    let l = lambda.value();
    let mut coords = Vec::with_capacity(a.len());
    let mut feats = Vec::with_capacity(a.len());
    for (i, &j) in result.assignment.perm().iter().enumerate() {
        coords.push(vec3::lerp(a.coords()[i], b.coords()[j], l));
        feats.push(
            a.feats()[i]
                .iter()
                .zip(&b.feats()[j])
                .map(|(&x, &y)| (1.0 - l) * x + l * y)
                .collect(),
        );
    }
    let mixed = LatentCloud::new(coords, feats, a.layer_id())?;
    Ok((mixed, result.assignment))
}

/// Mixes a batch of sample pairs. One lambda is drawn per pair and shared
/// between the cloud and the label; clouds of unequal cardinality are first
/// replicated up to the larger one. Pair `k` consumes the RNG substream
/// `(seed, k)`, so results do not depend on evaluation order.
pub fn mix_batch(
    pairs: &[(Sample, Sample)],
    strategy: MixStrategy,
    params: &BetaParams,
    cfg: &SolverConfig,
    seed: u64,
) -> Result<Vec<MixedSample>> {
    pairs
        .par_iter()
        .enumerate()
        .map(|(k, (s1, s2))| {
            let mut rng = substream(seed, k as u64);
            let lambda = sample_lambda(params, &mut rng);
            mix_pair(s1, s2, lambda, strategy, cfg, &mut rng)
        })
        .collect()
}

/// Mixes one labelled pair at a fixed ratio.
pub fn mix_pair(
    s1: &Sample,
    s2: &Sample,
    lambda: MixRatio,
    strategy: MixStrategy,
    cfg: &SolverConfig,
    rng: &mut impl Rng,
) -> Result<MixedSample> {
    let target = s1.cloud.len().max(s2.cloud.len());
    let a = replicate_to_cardinality(&s1.cloud, target, rng)?;
    let b = replicate_to_cardinality(&s2.cloud, target, rng)?;
    let cloud = match strategy {
        MixStrategy::OptimalAssignment => mix_oa(&a, &b, lambda, cfg)?.0,
        MixStrategy::RandomAssignment => mix_ra(&a, &b, lambda, rng)?,
        MixStrategy::PointSampling => mix_ps(&a, &b, lambda, rng)?,
    };
    let label = mix_labels(&s1.label, &s2.label, lambda)?;
    Ok(MixedSample {
        cloud,
        label,
        lambda,
        strategy,
        source_ids: (s1.id, s2.id),
    })
}
