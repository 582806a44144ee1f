//! Pre-mix symmetry-axis alignment.
//!
//! Before mixing two clouds whose headings are arbitrary, each cloud is
//! rotated about the up-axis so that its dominant planar axis lands on the
//! first in-plane coordinate axis. The heading estimate is PCA-based: the
//! points are projected onto the plane orthogonal to the up-axis, the
//! dominant eigenvector of the 2x2 covariance gives the axis, and the sign
//! of the third central moment along it resolves the 180-degree ambiguity.
//! Objects whose planar covariance is near-isotropic (rotationally
//! symmetric) report low confidence and are left untouched.

use serde::{Deserialize, Serialize};

use crate::cloud::{rotate_cloud, Axis, PointCloud};
use crate::error::{Error, Result};
use crate::vec3::Vec3;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct AlignmentConfig {
    pub up_axis: Axis,
    /// Relative eigenvalue gap below which the heading is untrusted.
    pub symmetry_tolerance: f64,
}

impl Default for AlignmentConfig {
    fn default() -> Self {
        Self {
            up_axis: Axis::Z,
            symmetry_tolerance: 0.05,
        }
    }
}

impl AlignmentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.symmetry_tolerance > 0.0 && self.symmetry_tolerance < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "symmetry tolerance {} outside (0, 1)",
                self.symmetry_tolerance
            )));
        }
        Ok(())
    }
}

/// An estimated heading correction: rotating the cloud by `angle` about the
/// up-axis brings its dominant planar axis onto the first in-plane axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Heading {
    pub angle: f64,
    pub confident: bool,
}

/// Planar coordinates orthogonal to the up-axis, ordered so that a positive
/// rotation about the up-axis rotates the first toward the second.
#[inline]
fn planar(p: Vec3, up: Axis) -> (f64, f64) {
    match up {
        Axis::Z => (p[0], p[1]),
        Axis::X => (p[1], p[2]),
        Axis::Y => (p[2], p[0]),
    }
}

/// Estimates the heading correction of a single cloud.
pub fn estimate_heading(cloud: &PointCloud, cfg: &AlignmentConfig) -> Result<Heading> {
    cfg.validate()?;
    if cloud.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "heading estimation needs at least 3 points, got {}",
            cloud.len()
        )));
    }
    let n = cloud.len() as f64;
    let pts: Vec<(f64, f64)> = cloud
        .points()
        .iter()
        .map(|p| planar(*p, cfg.up_axis))
        .collect();
    let (mx, my) = pts
        .iter()
        .fold((0.0, 0.0), |(sx, sy), (x, y)| (sx + x, sy + y));
    let (mx, my) = (mx / n, my / n);

    let (mut cxx, mut cxy, mut cyy) = (0.0, 0.0, 0.0);
    for (x, y) in &pts {
        let (dx, dy) = (x - mx, y - my);
        cxx += dx * dx;
        cxy += dx * dy;
        cyy += dy * dy;
    }
    cxx /= n;
    cxy /= n;
    cyy /= n;

    let trace = cxx + cyy;
    let disc = ((cxx - cyy) * (cxx - cyy) + 4.0 * cxy * cxy).sqrt();
    let e_max = 0.5 * (trace + disc);
    let e_min = 0.5 * (trace - disc);

    // Degenerate: all projected points coincide.
    if e_max <= f64::EPSILON * (1.0 + mx.abs() + my.abs()) {
        return Ok(Heading {
            angle: 0.0,
            confident: false,
        });
    }
    let confident = (e_max - e_min) / e_max >= cfg.symmetry_tolerance;

    // Dominant eigenvector direction.
    let mut theta = 0.5 * (2.0 * cxy).atan2(cxx - cyy);
    // Third central moment along the eigenvector picks one of the two
    // opposite directions.
    let (ex, ey) = (theta.cos(), theta.sin());
    let m3: f64 = pts
        .iter()
        .map(|(x, y)| {
            let t = (x - mx) * ex + (y - my) * ey;
            t * t * t
        })
        .sum::<f64>()
        / n;
    if m3 < 0.0 {
        theta += std::f64::consts::PI;
    }
    let mut angle = -theta;
    if angle <= -std::f64::consts::PI {
        angle += 2.0 * std::f64::consts::PI;
    }
    Ok(Heading { angle, confident })
}

/// Canonicalizes both clouds: each is rotated by its own heading correction
/// when the estimate is confident and left alone otherwise. Clouds too small
/// for estimation pass through unchanged.
pub fn align_pair(
    a: &PointCloud,
    b: &PointCloud,
    cfg: &AlignmentConfig,
) -> Result<(PointCloud, PointCloud)> {
    cfg.validate()?;
    Ok((align_one(a, cfg), align_one(b, cfg)))
}

fn align_one(cloud: &PointCloud, cfg: &AlignmentConfig) -> PointCloud {
    if cloud.len() < 3 {
        return cloud.clone();
    }
    let heading = estimate_heading(cloud, cfg).expect("preconditions checked");
    if heading.confident {
        rotate_cloud(cloud, cfg.up_axis, heading.angle)
    } else {
        cloud.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::emd::emd_exact;
    use crate::vec3;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    /// Elongated box sampled on a grid, long in +x, skewed so the third
    /// moment along x is positive.
    fn skewed_box(seed: u64) -> PointCloud {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pts = Vec::new();
        for _ in 0..600 {
            // Denser mass near -x, a long sparse tail toward +x.
            let t: f64 = rng.gen::<f64>();
            let x = 3.0 * t * t - 1.0;
            let y = rng.gen_range(-0.3..0.3);
            let z = rng.gen_range(-0.5..0.5);
            pts.push([x, y, z]);
        }
        PointCloud::new(pts).unwrap()
    }

    #[test]
    fn aligned_box_has_zero_heading() {
        let cloud = skewed_box(1);
        let h = estimate_heading(&cloud, &AlignmentConfig::default()).unwrap();
        assert!(h.confident);
        assert!(h.angle.abs() < 0.02, "angle {}", h.angle);
    }

    #[test]
    fn rotated_box_reports_opposite_correction() {
        let cloud = skewed_box(2);
        let rotated = rotate_cloud(&cloud, Axis::Z, 30f64.to_radians());
        let h = estimate_heading(&rotated, &AlignmentConfig::default()).unwrap();
        assert!(h.confident);
        assert!(
            (h.angle + 30f64.to_radians()).abs() < 1e-3 + 0.02,
            "angle {}",
            h.angle
        );
    }

    #[test]
    fn heading_is_rotation_equivariant() {
        let cloud = skewed_box(3);
        let cfg = AlignmentConfig::default();
        let base = estimate_heading(&cloud, &cfg).unwrap();
        for theta in [0.3, 1.0, -0.7, 2.5] {
            let rotated = rotate_cloud(&cloud, Axis::Z, theta);
            let h = estimate_heading(&rotated, &cfg).unwrap();
            assert!(h.confident);
            // Correction shifts by -theta, modulo a full turn.
            let mut diff = h.angle - (base.angle - theta);
            while diff > PI {
                diff -= 2.0 * PI;
            }
            while diff < -PI {
                diff += 2.0 * PI;
            }
            assert!(diff.abs() < 1e-3, "theta {theta}: residual {diff}");
        }
    }

    #[test]
    fn sphere_sample_is_unconfident() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let pts: Vec<_> = (0..2000)
            .map(|_| {
                let v = [
                    rng.sample::<f64, _>(rand_distr::StandardNormal),
                    rng.sample::<f64, _>(rand_distr::StandardNormal),
                    rng.sample::<f64, _>(rand_distr::StandardNormal),
                ];
                vec3::scale(v, 1.0 / vec3::norm(v))
            })
            .collect();
        let cloud = PointCloud::new(pts).unwrap();
        let h = estimate_heading(&cloud, &AlignmentConfig::default()).unwrap();
        assert!(!h.confident);
    }

    #[test]
    fn coincident_projection_degenerates_gracefully() {
        let cloud = PointCloud::new(vec![[0.0, 0.0, -1.0], [0.0, 0.0, 0.5], [0.0, 0.0, 1.0]]).unwrap();
        let h = estimate_heading(&cloud, &AlignmentConfig::default()).unwrap();
        assert!(!h.confident);
        assert_eq!(h.angle, 0.0);
    }

    #[test]
    fn align_pair_reduces_distance_between_rotated_copies() {
        let cloud = skewed_box(5);
        let a = cloud.clone();
        let b = rotate_cloud(&cloud, Axis::Z, 90f64.to_radians());
        let cfg = AlignmentConfig::default();
        let before = emd_exact(&sub(&a), &sub(&b)).unwrap().distance;
        let (aa, bb) = align_pair(&a, &b, &cfg).unwrap();
        let after = emd_exact(&sub(&aa), &sub(&bb)).unwrap().distance;
        assert!(after < before, "after {after} >= before {before}");
        assert!(after < 0.05 * before, "alignment barely helped: {after} vs {before}");
    }

    /// First 64 points, to keep exact solves cheap.
    fn sub(c: &PointCloud) -> PointCloud {
        PointCloud::new(c.points()[..64].to_vec()).unwrap()
    }

    #[test]
    fn unconfident_pair_passes_through() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let pts: Vec<_> = (0..200)
            .map(|_| {
                let v: Vec3 = [
                    rng.sample::<f64, _>(rand_distr::StandardNormal),
                    rng.sample::<f64, _>(rand_distr::StandardNormal),
                    rng.sample::<f64, _>(rand_distr::StandardNormal),
                ];
                vec3::scale(v, 1.0 / vec3::norm(v))
            })
            .collect();
        let a = PointCloud::new(pts).unwrap();
        let (aa, _) = align_pair(&a, &a, &AlignmentConfig::default()).unwrap();
        assert_eq!(aa.points(), a.points());
    }

    #[test]
    fn already_aligned_pair_rotations_are_tiny() {
        let a = skewed_box(7);
        let b = skewed_box(8);
        let cfg = AlignmentConfig::default();
        let ha = estimate_heading(&a, &cfg).unwrap();
        let hb = estimate_heading(&b, &cfg).unwrap();
        assert!(ha.angle.abs() < 0.05 && hb.angle.abs() < 0.05);
    }

    #[test]
    fn rotation_preserves_norms_and_up_coordinate() {
        let cloud = skewed_box(9);
        let out = rotate_cloud(&cloud, Axis::Z, 1.234);
        for (p, q) in cloud.points().iter().zip(out.points()) {
            assert!((vec3::norm(*p) - vec3::norm(*q)).abs() < 1e-12);
            assert_eq!(p[2], q[2]);
        }
    }

    #[test]
    fn config_validates_tolerance() {
        let cfg = AlignmentConfig {
            up_axis: Axis::Z,
            symmetry_tolerance: 0.0,
        };
        assert!(cfg.validate().is_err());
        let cloud = skewed_box(10);
        assert!(estimate_heading(&cloud, &cfg).is_err());
    }

    #[test]
    fn too_few_points_is_an_error() {
        let cloud = PointCloud::new(vec![[0.0; 3], [1.0, 0.0, 0.0]]).unwrap();
        assert!(estimate_heading(&cloud, &AlignmentConfig::default()).is_err());
    }
}
