//! Keypoint records and their projection into working space.
//!
//! Keypoints are stored geodetically (longitude, latitude, height) but all
//! curve math runs on plain Cartesian [`Point3`] values. No wrapping or
//! ellipsoidal correction is applied: a longitude of 200 degrees stays 200.

use std::fmt::Write as _;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A point (or vector) in the working space.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const ZERO: Point3 = Point3 { x: 0.0, y: 0.0, z: 0.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn dot(self, other: Point3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(self, other: Point3) -> Point3 {
        Point3::new(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn distance(self, other: Point3) -> f64 {
        (self - other).norm()
    }

    /// Unit vector in the same direction, or `None` for a zero (or
    /// non-finite) vector.
    pub fn normalized(self) -> Option<Point3> {
        let n = self.norm();
        if n > 0.0 && n.is_finite() {
            Some(self / n)
        } else {
            None
        }
    }

    pub fn lerp(self, other: Point3, t: f64) -> Point3 {
        self + (other - self) * t
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Angle between two directions in `[0, π]`.
    ///
    /// Uses `atan2(|a × b|, a · b)`, which stays accurate for nearly
    /// parallel vectors where `acos` of the cosine loses about half the
    /// available digits.
    pub fn angle_to(self, other: Point3) -> f64 {
        self.cross(other).norm().atan2(self.dot(other))
    }
}

impl From<[f64; 3]> for Point3 {
    fn from(v: [f64; 3]) -> Self {
        Point3::new(v[0], v[1], v[2])
    }
}

impl From<Point3> for [f64; 3] {
    fn from(p: Point3) -> Self {
        [p.x, p.y, p.z]
    }
}

impl Add for Point3 {
    type Output = Point3;
    fn add(self, o: Point3) -> Point3 {
        Point3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Point3 {
    fn add_assign(&mut self, o: Point3) {
        *self = *self + o;
    }
}

impl Sub for Point3 {
    type Output = Point3;
    fn sub(self, o: Point3) -> Point3 {
        Point3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Point3 {
    type Output = Point3;
    fn mul(self, k: f64) -> Point3 {
        Point3::new(self.x * k, self.y * k, self.z * k)
    }
}

impl Mul<Point3> for f64 {
    type Output = Point3;
    fn mul(self, p: Point3) -> Point3 {
        p * self
    }
}

impl Div<f64> for Point3 {
    type Output = Point3;
    fn div(self, k: f64) -> Point3 {
        Point3::new(self.x / k, self.y / k, self.z / k)
    }
}

impl Neg for Point3 {
    type Output = Point3;
    fn neg(self) -> Point3 {
        Point3::new(-self.x, -self.y, -self.z)
    }
}

/// Default traversal speed for keypoint files without a speed column.
pub const DEFAULT_SPEED: f64 = 1.0;

/// One path waypoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KeyPoint {
    /// Degrees, unwrapped.
    pub longitude: f64,
    /// Degrees.
    pub latitude: f64,
    /// Dimensionless length units, non-negative.
    pub height: f64,
    /// Length units per second, strictly positive.
    pub speed: f64,
}

impl KeyPoint {
    pub fn new(longitude: f64, latitude: f64, height: f64, speed: f64) -> Result<Self> {
        let kp = Self { longitude, latitude, height, speed };
        kp.validate()?;
        Ok(kp)
    }

    /// Keypoint with the default speed.
    pub fn at(longitude: f64, latitude: f64, height: f64) -> Result<Self> {
        Self::new(longitude, latitude, height, DEFAULT_SPEED)
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("longitude", self.longitude),
            ("latitude", self.latitude),
            ("height", self.height),
            ("speed", self.speed),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(Error::invalid(format!("{name} is not finite ({v})")));
            }
        }
        if self.height < 0.0 {
            return Err(Error::invalid(format!("height must be >= 0, got {}", self.height)));
        }
        if self.speed <= 0.0 {
            return Err(Error::invalid(format!("speed must be > 0, got {}", self.speed)));
        }
        Ok(())
    }
}

/// How keypoints map into working space.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Projection {
    /// x = longitude, y = latitude, z = height.
    #[default]
    Raw,
    /// Componentwise scaling of the raw mapping.
    Scaled { sx: f64, sy: f64, sz: f64 },
}

impl Projection {
    pub fn scaled(sx: f64, sy: f64, sz: f64) -> Result<Self> {
        let p = Projection::Scaled { sx, sy, sz };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if let Projection::Scaled { sx, sy, sz } = *self {
            for s in [sx, sy, sz] {
                if !(s.is_finite() && s > 0.0) {
                    return Err(Error::invalid(format!(
                        "scale factors must be finite and > 0, got ({sx}, {sy}, {sz})"
                    )));
                }
            }
        }
        Ok(())
    }
}

pub fn project(kp: &KeyPoint, proj: Projection) -> Result<Point3> {
    kp.validate()?;
    proj.validate()?;
    let raw = Point3::new(kp.longitude, kp.latitude, kp.height);
    Ok(match proj {
        Projection::Raw => raw,
        Projection::Scaled { sx, sy, sz } => Point3::new(raw.x * sx, raw.y * sy, raw.z * sz),
    })
}

pub fn project_all(kps: &[KeyPoint], proj: Projection) -> Result<Vec<Point3>> {
    kps.iter().map(|kp| project(kp, proj)).collect()
}

const REQUIRED_COLUMNS: [&str; 3] = ["longitude", "latitude", "height"];

/// Parses keypoint CSV: header `longitude,latitude,height[,speed]`, one
/// keypoint per row, path order = row order.
///
/// Row numbers in errors are 1-based and count data rows only.
pub fn load_keypoints(source: &str) -> Result<Vec<KeyPoint>> {
    let mut reader =
        csv::ReaderBuilder::new().trim(csv::Trim::All).flexible(true).has_headers(false).from_reader(source.as_bytes());
    let mut records = reader.records();

    let header = match records.next() {
        None => return Err(Error::PathTooShort { got: 0 }),
        Some(rec) => rec.map_err(|e| header_error(e.to_string()))?,
    };
    let names: Vec<&str> = header.iter().collect();
    let has_speed = match names.as_slice() {
        [a, b, c] if [*a, *b, *c] == REQUIRED_COLUMNS => false,
        [a, b, c, "speed"] if [*a, *b, *c] == REQUIRED_COLUMNS => true,
        _ => {
            return Err(header_error(format!(
                "expected header 'longitude,latitude,height[,speed]', got '{}'",
                names.join(",")
            )))
        }
    };
    let width = if has_speed { 4 } else { 3 };

    let mut out = Vec::new();
    for (i, rec) in records.enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| Error::Parse { row, column: String::new(), message: e.to_string() })?;
        if rec.iter().all(str::is_empty) {
            continue;
        }
        if rec.len() != width {
            return Err(Error::Parse {
                row,
                column: String::new(),
                message: format!("expected {width} fields, found {}", rec.len()),
            });
        }
        let field = |col: usize, name: &str| -> Result<f64> {
            let raw = &rec[col];
            raw.parse::<f64>().map_err(|_| Error::Parse {
                row,
                column: name.to_string(),
                message: format!("'{raw}' is not a number"),
            })
        };
        let longitude = field(0, "longitude")?;
        let latitude = field(1, "latitude")?;
        let height = field(2, "height")?;
        let speed = if has_speed { field(3, "speed")? } else { DEFAULT_SPEED };
        let kp = KeyPoint::new(longitude, latitude, height, speed).map_err(|e| Error::Parse {
            row,
            column: String::new(),
            message: e.to_string(),
        })?;
        out.push(kp);
    }
    if out.len() < 2 {
        return Err(Error::PathTooShort { got: out.len() });
    }
    Ok(out)
}

fn header_error(message: String) -> Error {
    Error::Parse { row: 0, column: String::new(), message }
}

/// Writes keypoints in the four-column CSV form. `Display` for `f64`
/// prints the shortest round-tripping representation, so
/// `load_keypoints(&serialize_keypoints(k))` returns `k` exactly.
pub fn serialize_keypoints(kps: &[KeyPoint]) -> String {
    let mut out = String::from("longitude,latitude,height,speed\n");
    for kp in kps {
        let _ = writeln!(out, "{},{},{},{}", kp.longitude, kp.latitude, kp.height, kp.speed);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const ROUTE: &str = "longitude,latitude,height
121.47,31.23,10000
123.00,20.00,50000
135.00,10.00,50000
170.00,13.00,50000
180.00,-5.00,50000
200.00,-13.50,50000
";

    #[test]
    fn raw_projection_is_identity() {
        let kp = KeyPoint::at(121.47, 31.23, 10000.0).unwrap();
        assert_eq!(project(&kp, Projection::Raw).unwrap(), Point3::new(121.47, 31.23, 10000.0));
        let origin = KeyPoint::at(0.0, 0.0, 0.0).unwrap();
        assert_eq!(project(&origin, Projection::Raw).unwrap(), Point3::ZERO);
    }

    #[test]
    fn scaled_projection() {
        let kp = KeyPoint::at(123.0, 20.0, 50000.0).unwrap();
        let p = project(&kp, Projection::scaled(1.0, 1.0, 0.001).unwrap()).unwrap();
        assert_eq!(p.x, 123.0);
        assert_eq!(p.y, 20.0);
        assert!((p.z - 50.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_keypoints_and_scales() {
        assert!(KeyPoint::at(f64::NAN, 0.0, 0.0).is_err());
        assert!(KeyPoint::at(0.0, 0.0, -1.0).is_err());
        assert!(KeyPoint::new(0.0, 0.0, 0.0, 0.0).is_err());
        assert!(Projection::scaled(1.0, 0.0, 1.0).is_err());
        let kp = KeyPoint { longitude: f64::INFINITY, latitude: 0.0, height: 0.0, speed: 1.0 };
        assert!(matches!(project(&kp, Projection::Raw), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn loads_route() {
        let kps = load_keypoints(ROUTE).unwrap();
        assert_eq!(kps.len(), 6);
        assert_eq!(kps[0], KeyPoint::at(121.47, 31.23, 10000.0).unwrap());
        assert_eq!(kps[5].longitude, 200.0);
        assert!(kps.iter().all(|k| k.speed == DEFAULT_SPEED));
    }

    #[test]
    fn loads_speed_column() {
        let kps = load_keypoints("longitude,latitude,height,speed\n0,0,0,2\n1,1,1,3.5\n").unwrap();
        assert_eq!(kps[1].speed, 3.5);
    }

    #[test]
    fn empty_and_short_files() {
        assert!(matches!(load_keypoints(""), Err(Error::PathTooShort { got: 0 })));
        assert!(matches!(load_keypoints("longitude,latitude,height\n"), Err(Error::PathTooShort { got: 0 })));
        assert!(matches!(load_keypoints("longitude,latitude,height\n1,2,3\n"), Err(Error::PathTooShort { got: 1 })));
    }

    #[test]
    fn malformed_row_cites_row_number() {
        let src = "longitude,latitude,height\n1,2,3\n4,5,6\nabc,7,8\n";
        match load_keypoints(src) {
            Err(Error::Parse { row, column, .. }) => {
                assert_eq!(row, 3);
                assert_eq!(column, "longitude");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(matches!(load_keypoints("longitude,latitude,height\n1,2\n3,4,5\n"), Err(Error::Parse { row: 1, .. })));
        assert!(matches!(load_keypoints("lon,lat,h\n1,2,3\n"), Err(Error::Parse { row: 0, .. })));
    }

    fn keypoint() -> impl Strategy<Value = KeyPoint> {
        (-1e4..1e4f64, -90.0..90.0f64, 0.0..1e5f64, 1e-3..1e3f64)
            .prop_map(|(lo, la, h, s)| KeyPoint::new(lo, la, h, s).unwrap())
    }

    proptest! {
        #[test]
        fn csv_round_trip(kps in prop::collection::vec(keypoint(), 2..20)) {
            prop_assert_eq!(load_keypoints(&serialize_keypoints(&kps)).unwrap(), kps);
        }

        #[test]
        fn scaled_projection_is_injective(
            a in keypoint(), b in keypoint(),
            sx in 1e-3..1e3f64, sy in 1e-3..1e3f64, sz in 1e-3..1e3f64,
        ) {
            let proj = Projection::scaled(sx, sy, sz).unwrap();
            let (pa, pb) = (project(&a, proj).unwrap(), project(&b, proj).unwrap());
            let same_input = (a.longitude, a.latitude, a.height) == (b.longitude, b.latitude, b.height);
            prop_assert_eq!(pa == pb, same_input);
        }
    }
}
