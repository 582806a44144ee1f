//! Analytic surface samplers for a small family of primitive shapes.
//!
//! These stand in for CAD meshes wherever a dataset of distinguishable
//! classes is needed: synthetic training sets and cross-class verification
//! pairs. All samplers draw uniformly by surface area.

use rand::Rng;

use crate::cloud::PointCloud;
use crate::error::Result;
use crate::vec3::Vec3;

use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShapeKind {
    Sphere,
    Cube,
    Cylinder,
    Cone,
}

impl ShapeKind {
    pub const ALL: [ShapeKind; 4] = [
        ShapeKind::Sphere,
        ShapeKind::Cube,
        ShapeKind::Cylinder,
        ShapeKind::Cone,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ShapeKind::Sphere => "sphere",
            ShapeKind::Cube => "cube",
            ShapeKind::Cylinder => "cylinder",
            ShapeKind::Cone => "cone",
        }
    }
}

/// A concrete shape instance. `aspect` in `[0, 1]` warps one shape-specific
/// proportion so that samples within a class are not all congruent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeSpec {
    pub kind: ShapeKind,
    pub aspect: f64,
}

impl ShapeSpec {
    pub fn canonical(kind: ShapeKind) -> Self {
        Self { kind, aspect: 0.5 }
    }

    pub fn randomized(kind: ShapeKind, rng: &mut impl Rng) -> Self {
        Self {
            kind,
            aspect: rng.gen(),
        }
    }
}

/// Samples `n` points uniformly on the shape surface. Output is raw
/// (not normalized to the unit sphere).
pub fn sample_shape(spec: &ShapeSpec, n: usize, rng: &mut impl Rng) -> Result<PointCloud> {
    let a = spec.aspect.clamp(0.0, 1.0);
    let points: Vec<Vec3> = match spec.kind {
        ShapeKind::Sphere => (0..n).map(|_| sphere_point(rng)).collect(),
        ShapeKind::Cube => {
            // Half-extents: unit in x, squashed in y and z.
            let hy = 0.4 + 0.5 * a;
            let hz = 0.9 - 0.5 * a;
            (0..n).map(|_| box_point([1.0, hy, hz], rng)).collect()
        }
        ShapeKind::Cylinder => {
            let r = 0.35 + 0.4 * a;
            let h = 1.0;
            (0..n).map(|_| cylinder_point(r, h, rng)).collect()
        }
        ShapeKind::Cone => {
            let r = 0.5 + 0.5 * a;
            let h = 2.0;
            (0..n).map(|_| cone_point(r, h, rng)).collect()
        }
    };
    PointCloud::new(points)
}

fn sphere_point(rng: &mut impl Rng) -> Vec3 {
    loop {
        let v = [
            rng.sample::<f64, _>(rand_distr::StandardNormal),
            rng.sample::<f64, _>(rand_distr::StandardNormal),
            rng.sample::<f64, _>(rand_distr::StandardNormal),
        ];
        let norm = crate::vec3::norm(v);
        if norm > 1e-12 {
            return crate::vec3::scale(v, 1.0 / norm);
        }
    }
}

fn box_point(half: Vec3, rng: &mut impl Rng) -> Vec3 {
    // Pick a face pair by area, then a sign, then a uniform point on it.
    let areas = [
        half[1] * half[2], // +-x faces
        half[0] * half[2],
        half[0] * half[1],
    ];
    let total: f64 = areas.iter().sum();
    let mut t = rng.gen_range(0.0..total);
    let mut axis = 0;
    for (i, &a) in areas.iter().enumerate() {
        if t < a {
            axis = i;
            break;
        }
        t -= a;
        axis = i;
    }
    let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
    let mut p = [0.0; 3];
    p[axis] = sign * half[axis];
    let (u, v) = ((axis + 1) % 3, (axis + 2) % 3);
    p[u] = rng.gen_range(-half[u]..half[u]);
    p[v] = rng.gen_range(-half[v]..half[v]);
    p
}

fn cylinder_point(r: f64, h: f64, rng: &mut impl Rng) -> Vec3 {
    let lateral = 2.0 * PI * r * 2.0 * h;
    let caps = 2.0 * PI * r * r;
    let t = rng.gen_range(0.0..lateral + caps);
    let angle = rng.gen_range(0.0..2.0 * PI);
    if t < lateral {
        let z = rng.gen_range(-h..h);
        [r * angle.cos(), r * angle.sin(), z]
    } else {
        let rho = r * rng.gen::<f64>().sqrt();
        let z = if rng.gen::<bool>() { h } else { -h };
        [rho * angle.cos(), rho * angle.sin(), z]
    }
}

fn cone_point(r: f64, h: f64, rng: &mut impl Rng) -> Vec3 {
    let slant = (r * r + h * h).sqrt();
    let lateral = PI * r * slant;
    let base = PI * r * r;
    let t = rng.gen_range(0.0..lateral + base);
    let angle = rng.gen_range(0.0..2.0 * PI);
    if t < lateral {
        // Area density along the axis is proportional to the local radius.
        let u: f64 = rng.gen();
        let z = h * (1.0 - (1.0 - u).sqrt());
        let rho = r * (1.0 - z / h);
        [rho * angle.cos(), rho * angle.sin(), z]
    } else {
        let rho = r * rng.gen::<f64>().sqrt();
        [rho * angle.cos(), rho * angle.sin(), 0.0]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vec3;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sphere_points_have_unit_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let spec = ShapeSpec::canonical(ShapeKind::Sphere);
        let cloud = sample_shape(&spec, 256, &mut rng).unwrap();
        for p in cloud.points() {
            assert!((vec3::norm(*p) - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn cube_points_lie_on_box_surface() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let spec = ShapeSpec { kind: ShapeKind::Cube, aspect: 0.5 };
        let cloud = sample_shape(&spec, 256, &mut rng).unwrap();
        let half = [1.0, 0.65, 0.65];
        for p in cloud.points() {
            let on_face = (0..3).any(|k| (p[k].abs() - half[k]).abs() < 1e-12);
            assert!(on_face, "{p:?} not on any face");
            for k in 0..3 {
                assert!(p[k].abs() <= half[k] + 1e-12);
            }
        }
    }

    #[test]
    fn cylinder_points_lie_on_surface() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let spec = ShapeSpec { kind: ShapeKind::Cylinder, aspect: 0.5 };
        let r = 0.35 + 0.4 * 0.5;
        let cloud = sample_shape(&spec, 512, &mut rng).unwrap();
        for p in cloud.points() {
            let rho = (p[0] * p[0] + p[1] * p[1]).sqrt();
            let on_lateral = (rho - r).abs() < 1e-12 && p[2].abs() <= 1.0 + 1e-12;
            let on_cap = (p[2].abs() - 1.0).abs() < 1e-12 && rho <= r + 1e-12;
            assert!(on_lateral || on_cap);
        }
    }

    #[test]
    fn cone_points_lie_on_surface() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let spec = ShapeSpec { kind: ShapeKind::Cone, aspect: 0.0 };
        let (r, h) = (0.5, 2.0);
        let cloud = sample_shape(&spec, 512, &mut rng).unwrap();
        for p in cloud.points() {
            let rho = (p[0] * p[0] + p[1] * p[1]).sqrt();
            let on_lateral =
                p[2] >= -1e-12 && p[2] <= h + 1e-12 && (rho - r * (1.0 - p[2] / h)).abs() < 1e-9;
            let on_base = p[2].abs() < 1e-12 && rho <= r + 1e-12;
            assert!(on_lateral || on_base, "{p:?}");
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let spec = ShapeSpec { kind: ShapeKind::Cone, aspect: 0.3 };
        let a = sample_shape(&spec, 64, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = sample_shape(&spec, 64, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a.points(), b.points());
    }
}
