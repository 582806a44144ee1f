//! Triangle meshes: OFF parsing and area-weighted surface sampling.

use std::fs;
use std::path::Path;

use rand::Rng;

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::vec3::{self, Vec3};

/// Indexed triangle soup. Zero-area faces are allowed; they simply carry no
/// sampling weight.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleMesh {
    vertices: Vec<Vec3>,
    faces: Vec<[usize; 3]>,
}

impl TriangleMesh {
    pub fn new(vertices: Vec<Vec3>, faces: Vec<[usize; 3]>) -> Result<Self> {
        if faces.is_empty() {
            return Err(Error::InvalidInput("mesh has no faces".into()));
        }
        for (i, v) in vertices.iter().enumerate() {
            if !vec3::is_finite(*v) {
                return Err(Error::InvalidInput(format!("non-finite vertex {i}")));
            }
        }
        for (i, f) in faces.iter().enumerate() {
            for &vi in f {
                if vi >= vertices.len() {
                    return Err(Error::InvalidInput(format!(
                        "face {i} references vertex {vi} out of {}",
                        vertices.len()
                    )));
                }
            }
        }
        Ok(Self { vertices, faces })
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn face_area(&self, i: usize) -> f64 {
        let [a, b, c] = self.faces[i];
        let u = vec3::sub(self.vertices[b], self.vertices[a]);
        let v = vec3::sub(self.vertices[c], self.vertices[a]);
        0.5 * vec3::norm(vec3::cross(u, v))
    }

    pub fn total_area(&self) -> f64 {
        (0..self.faces.len()).map(|i| self.face_area(i)).sum()
    }
}

struct OffLines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> OffLines<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            inner: text.lines().enumerate(),
        }
    }

    /// Next non-empty line with comments stripped, plus its 1-based number.
    fn next_content(&mut self) -> Option<(usize, &'a str)> {
        for (idx, raw) in self.inner.by_ref() {
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            };
            let line = line.trim();
            if !line.is_empty() {
                return Some((idx + 1, line));
            }
        }
        None
    }
}

fn parse_count(tok: &str, line: usize, what: &str) -> Result<usize> {
    tok.parse::<usize>().map_err(|_| Error::Parse {
        line,
        msg: format!("bad {what} count '{tok}'"),
    })
}

fn parse_coord(tok: &str, line: usize) -> Result<f64> {
    let v = tok.parse::<f64>().map_err(|_| Error::Parse {
        line,
        msg: format!("bad coordinate '{tok}'"),
    })?;
    if !v.is_finite() {
        return Err(Error::Parse {
            line,
            msg: format!("non-finite coordinate '{tok}'"),
        });
    }
    Ok(v)
}

/// Parses OFF text into a triangle mesh. Polygon faces are fan-triangulated.
///
/// Tolerated quirks: an absent "OFF" header, the counts glued to the header
/// token ("OFF490 518 0"), `#` comments, blank lines, and trailing extra
/// fields on vertex or face lines (colors).
pub fn parse_off(bytes: &[u8]) -> Result<TriangleMesh> {
    let text = std::str::from_utf8(bytes).map_err(|e| Error::Parse {
        line: 0,
        msg: format!("not valid UTF-8: {e}"),
    })?;
    let mut lines = OffLines::new(text);

    let (first_no, first) = lines.next_content().ok_or(Error::Parse {
        line: 1,
        msg: "empty file".into(),
    })?;

    // The counts may live on the header line ("OFF 8 6 12"), glued to the
    // header token ("OFF8 6 12"), on the following line, or there may be no
    // header at all.
    let counts_line;
    let counts_no;
    let rest = first.strip_prefix("OFF").unwrap_or(first);
    let rest = rest.trim();
    if first.starts_with("OFF") && rest.is_empty() {
        let (no, line) = lines.next_content().ok_or(Error::Parse {
            line: first_no,
            msg: "missing counts line".into(),
        })?;
        counts_no = no;
        counts_line = line;
    } else {
        counts_no = first_no;
        counts_line = rest;
    }

    let toks: Vec<&str> = counts_line.split_whitespace().collect();
    if toks.len() < 2 {
        return Err(Error::Parse {
            line: counts_no,
            msg: format!("counts line needs vertex and face counts, got '{counts_line}'"),
        });
    }
    let num_vertices = parse_count(toks[0], counts_no, "vertex")?;
    let num_faces = parse_count(toks[1], counts_no, "face")?;
    // A third token (edge count) is ignored when present.

    // Capacity hints are clamped so a bogus counts line cannot force a
    // giant allocation before the truncation check fires.
    let mut vertices = Vec::with_capacity(num_vertices.min(1 << 16));
    for _ in 0..num_vertices {
        let (no, line) = lines.next_content().ok_or(Error::Parse {
            line: counts_no,
            msg: format!("truncated: expected {num_vertices} vertex lines"),
        })?;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() < 3 {
            return Err(Error::Parse {
                line: no,
                msg: "vertex line needs three coordinates".into(),
            });
        }
        vertices.push([
            parse_coord(toks[0], no)?,
            parse_coord(toks[1], no)?,
            parse_coord(toks[2], no)?,
        ]);
    }

    let mut faces = Vec::with_capacity(num_faces.min(1 << 16));
    for _ in 0..num_faces {
        let (no, line) = lines.next_content().ok_or(Error::Parse {
            line: counts_no,
            msg: format!("truncated: expected {num_faces} face lines"),
        })?;
        let toks: Vec<&str> = line.split_whitespace().collect();
        let k = parse_count(toks[0], no, "face-vertex")?;
        if k < 3 {
            return Err(Error::Parse {
                line: no,
                msg: format!("face with {k} vertices"),
            });
        }
        if toks.len() < 1 + k {
            return Err(Error::Parse {
                line: no,
                msg: format!("face line lists {} of {k} indices", toks.len() - 1),
            });
        }
        let mut idx = Vec::with_capacity(k);
        for tok in &toks[1..=k] {
            let vi = parse_count(tok, no, "vertex-index")?;
            if vi >= vertices.len() {
                return Err(Error::Parse {
                    line: no,
                    msg: format!("vertex index {vi} out of range {}", vertices.len()),
                });
            }
            idx.push(vi);
        }
        // Fan triangulation around the first vertex.
        for t in 1..k - 1 {
            faces.push([idx[0], idx[t], idx[t + 1]]);
        }
    }

    if faces.is_empty() {
        return Err(Error::Parse {
            line: counts_no,
            msg: "mesh has no faces".into(),
        });
    }
    TriangleMesh::new(vertices, faces)
}

pub fn load_off(path: impl AsRef<Path>) -> Result<TriangleMesh> {
    let bytes = fs::read(path)?;
    parse_off(&bytes)
}

/// Samples `n` points uniformly over the mesh surface: faces are chosen with
/// probability proportional to area, positions are uniform within each
/// triangle via square-root barycentric coordinates. The output is not
/// normalized; compose with `normalize_unit_sphere` as needed.
pub fn sample_surface(mesh: &TriangleMesh, n: usize, rng: &mut impl Rng) -> Result<PointCloud> {
    if n == 0 {
        return Err(Error::InvalidArgument("sample count must be >= 1".into()));
    }
    let mut cumulative = Vec::with_capacity(mesh.faces().len());
    let mut total = 0.0;
    for i in 0..mesh.faces().len() {
        total += mesh.face_area(i);
        cumulative.push(total);
    }
    if total <= 0.0 {
        return Err(Error::InvalidInput("mesh has zero total area".into()));
    }

    let mut points = Vec::with_capacity(n);
    for _ in 0..n {
        let t = rng.gen_range(0.0..total);
        let face = cumulative.partition_point(|&c| c <= t).min(mesh.faces().len() - 1);
        let [ia, ib, ic] = mesh.faces()[face];
        let (a, b, c) = (mesh.vertices()[ia], mesh.vertices()[ib], mesh.vertices()[ic]);
        let r1: f64 = rng.gen();
        let r2: f64 = rng.gen();
        let s = r1.sqrt();
        let u = 1.0 - s;
        let v = s * (1.0 - r2);
        let w = s * r2;
        points.push([
            u * a[0] + v * b[0] + w * c[0],
            u * a[1] + v * b[1] + w * c[1],
            u * a[2] + v * b[2] + w * c[2],
        ]);
    }
    PointCloud::new(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const TRIANGLE_OFF: &str = "OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n";

    #[test]
    fn parses_single_triangle() {
        let m = parse_off(TRIANGLE_OFF.as_bytes()).unwrap();
        assert_eq!(m.vertices().len(), 3);
        assert_eq!(m.faces(), &[[0, 1, 2]]);
    }

    #[test]
    fn quad_becomes_two_triangles() {
        let off = "OFF\n4 1 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n";
        let m = parse_off(off.as_bytes()).unwrap();
        assert_eq!(m.faces(), &[[0, 1, 2], [0, 2, 3]]);
    }

    #[test]
    fn glued_header_counts_variant() {
        let off = "OFF3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n";
        let m = parse_off(off.as_bytes()).unwrap();
        assert_eq!(m.vertices().len(), 3);
        assert_eq!(m.faces().len(), 1);
    }

    #[test]
    fn headerless_and_commented_files_parse() {
        let off = "# comment\n3 1 0\n0 0 0 # vertex a\n1 0 0\n0 1 0\n\n3 0 1 2\n";
        let m = parse_off(off.as_bytes()).unwrap();
        assert_eq!(m.vertices().len(), 3);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse_off(b"OFF\n3 1 0\n0 0 0\n1 0 x\n0 1 0\n3 0 1 2\n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 4),
            other => panic!("unexpected {other:?}"),
        }
        let err = parse_off(b"OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 9\n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 6),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_off(b"OFF\nnot counts\n").is_err());
        assert!(parse_off(b"OFF\n5 1 0\n0 0 0\n").is_err());
        assert!(parse_off(b"").is_err());
    }

    #[test]
    fn sample_centroid_matches_triangle_centroid() {
        let m = parse_off(TRIANGLE_OFF.as_bytes()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let cloud = sample_surface(&m, 10_000, &mut rng).unwrap();
        let c = cloud.centroid();
        assert!((c[0] - 1.0 / 3.0).abs() < 0.01, "cx {}", c[0]);
        assert!((c[1] - 1.0 / 3.0).abs() < 0.01, "cy {}", c[1]);
        assert!(c[2].abs() < 1e-12);
    }

    #[test]
    fn face_choice_follows_area_ratio() {
        // Two coplanar triangles with area ratio 3:1 along x.
        let off = "OFF\n6 2 0\n0 0 0\n3 0 0\n0 2 0\n10 0 0\n11 0 0\n10 2 0\n3 0 1 2\n3 3 4 5\n";
        let m = parse_off(off.as_bytes()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let cloud = sample_surface(&m, 10_000, &mut rng).unwrap();
        let big = cloud.points().iter().filter(|p| p[0] < 5.0).count();
        let ratio = big as f64 / (10_000 - big) as f64;
        assert!((ratio - 3.0).abs() < 0.15 * 3.0, "ratio {ratio}");
    }

    #[test]
    fn single_sample_lies_on_surface() {
        let m = parse_off(TRIANGLE_OFF.as_bytes()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let cloud = sample_surface(&m, 1, &mut rng).unwrap();
        let p = cloud.points()[0];
        // Inside the unit right triangle in the z=0 plane.
        assert!(p[2].abs() < 1e-9);
        assert!(p[0] >= -1e-9 && p[1] >= -1e-9 && p[0] + p[1] <= 1.0 + 1e-9);
    }

    #[test]
    fn zero_area_mesh_rejected_for_sampling() {
        let off = "OFF\n3 1 0\n0 0 0\n0 0 0\n0 0 0\n3 0 1 2\n";
        let m = parse_off(off.as_bytes()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(sample_surface(&m, 10, &mut rng).is_err());
    }

    #[test]
    fn sampling_is_deterministic_per_seed() {
        let m = parse_off(TRIANGLE_OFF.as_bytes()).unwrap();
        let a = sample_surface(&m, 100, &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
        let b = sample_surface(&m, 100, &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
        assert_eq!(a.points(), b.points());
    }
}
