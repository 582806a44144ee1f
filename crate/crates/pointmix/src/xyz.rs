//! ASCII XYZ point-cloud format: one point per line, three floats separated
//! by single spaces, `\n` line endings, no header. The reader accepts
//! arbitrary float precision; the writer emits nine significant digits.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::vec3::Vec3;

/// Parses XYZ text. Blank lines are rejected (the format has no padding);
/// a trailing final newline is fine.
pub fn parse_xyz(text: &str) -> Result<PointCloud> {
    let mut points: Vec<Vec3> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line_1 = lineno + 1;
        let mut fields = line.split_whitespace();
        let mut p = [0.0f64; 3];
        for coord in p.iter_mut() {
            let tok = fields.next().ok_or_else(|| Error::Parse {
                line: line_1,
                msg: "expected three coordinates".into(),
            })?;
            *coord = tok.parse::<f64>().map_err(|_| Error::Parse {
                line: line_1,
                msg: format!("bad float '{tok}'"),
            })?;
            if !coord.is_finite() {
                return Err(Error::Parse {
                    line: line_1,
                    msg: format!("non-finite coordinate '{tok}'"),
                });
            }
        }
        if fields.next().is_some() {
            return Err(Error::Parse {
                line: line_1,
                msg: "more than three coordinates".into(),
            });
        }
        points.push(p);
    }
    if points.is_empty() {
        return Err(Error::Parse {
            line: 1,
            msg: "empty point cloud".into(),
        });
    }
    PointCloud::new(points)
}

pub fn read_xyz_file(path: impl AsRef<Path>) -> Result<PointCloud> {
    let text = fs::read_to_string(path)?;
    parse_xyz(&text)
}

/// Rounds to nine significant digits and prints the shortest decimal that
/// round-trips to the rounded value.
pub fn format_sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let rounded: f64 = format!("{x:.8e}").parse().expect("rounded float reparses");
    format!("{rounded}")
}

pub fn write_xyz(out: &mut impl Write, cloud: &PointCloud) -> Result<()> {
    for p in cloud.points() {
        writeln!(
            out,
            "{} {} {}",
            format_sig9(p[0]),
            format_sig9(p[1]),
            format_sig9(p[2])
        )?;
    }
    Ok(())
}

pub fn write_xyz_file(path: impl AsRef<Path>, cloud: &PointCloud) -> Result<()> {
    let mut buf = Vec::new();
    write_xyz(&mut buf, cloud)?;
    fs::write(path, buf)?;
    Ok(())
}

/// Writes a label distribution as one probability per line, same number
/// formatting as coordinates.
pub fn write_label(out: &mut impl Write, label: &crate::cloud::LabelDistribution) -> Result<()> {
    for &p in label.probs() {
        writeln!(out, "{}", format_sig9(p))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_roundtrip() {
        let c = PointCloud::new(vec![[0.1, -2.5, 3.0], [1.0 / 3.0, 0.0, 9.87654321e-4]]).unwrap();
        let mut buf = Vec::new();
        write_xyz(&mut buf, &c).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let back = parse_xyz(&text).unwrap();
        assert_eq!(back.len(), 2);
        for (p, q) in c.points().iter().zip(back.points()) {
            for k in 0..3 {
                assert!((p[k] - q[k]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn writer_emits_nine_significant_digits() {
        assert_eq!(format_sig9(1.0 / 3.0), "0.333333333");
        assert_eq!(format_sig9(0.0), "0");
        assert_eq!(format_sig9(-1.23456789012), "-1.23456789");
        assert_eq!(format_sig9(1.0), "1");
    }

    #[test]
    fn parse_accepts_arbitrary_precision() {
        let c = parse_xyz("1e-3 2.00000000000000001 -3\n").unwrap();
        assert_eq!(c.points()[0], [1e-3, 2.0, -3.0]);
    }

    #[test]
    fn parse_reports_line_numbers() {
        let err = parse_xyz("0 0 0\n1 2\n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        let err = parse_xyz("0 0 0\n1 2 x\n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_xyz("").is_err());
        assert!(parse_xyz("1 2 3 4\n").is_err());
        assert!(parse_xyz("1 2 inf\n").is_err());
    }
}
