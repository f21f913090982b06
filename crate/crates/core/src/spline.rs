//! Path curves through keypoints.
//!
//! Three kinds share one global parameter `s ∈ [0, 1]`:
//!
//! * `Polyline`: straight segments between consecutive keypoints.
//! * `Bezier`: one Bézier curve of degree `n - 1` using all `n` keypoints as
//!   its control polygon. It touches only the first and last keypoint.
//! * `CatmullRom`: one cubic per consecutive keypoint pair. Segment `i`
//!   runs from `P_i` to `P_{i+1}` with end tangents `t·(P_{i+1} - P_{i-1})`
//!   and `t·(P_{i+2} - P_i)`, where `t` is the tension.
//!
//! For polyline and Catmull-Rom curves segment `i` of `N - 1` covers
//! `s ∈ [i/(N-1), (i+1)/(N-1)]` with a uniform local parameter `u`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::geo::Point3;
use crate::{Error, Result};

/// Tangent scale for Catmull-Rom segments, in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Tension(f64);

impl Tension {
    /// Classic Catmull-Rom.
    pub const DEFAULT: Tension = Tension(0.5);

    pub fn new(t: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&t) {
            Ok(Tension(t))
        } else {
            Err(Error::Domain { value: t, lo: 0.0, hi: 1.0 })
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl Default for Tension {
    fn default() -> Self {
        Tension::DEFAULT
    }
}

impl TryFrom<f64> for Tension {
    type Error = Error;
    fn try_from(t: f64) -> Result<Self> {
        Tension::new(t)
    }
}

impl From<Tension> for f64 {
    fn from(t: Tension) -> f64 {
        t.0
    }
}

/// One cubic piece `P(u) = a·u³ + b·u² + c·u + d`, `u ∈ [0, 1]`, fixed by
/// `P(0) = p0`, `P(1) = p1`, `P'(0) = t·(p1 - p_minus1)` and
/// `P'(1) = t·(p2 - p0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatmullRomSegment {
    pub p_minus1: Point3,
    pub p0: Point3,
    pub p1: Point3,
    pub p2: Point3,
    pub tension: Tension,
    m0: Point3,
    m1: Point3,
    a: Point3,
    b: Point3,
    c: Point3,
    d: Point3,
}

impl CatmullRomSegment {
    pub fn new(p_minus1: Point3, p0: Point3, p1: Point3, p2: Point3, tension: Tension) -> Result<Self> {
        if ![p_minus1, p0, p1, p2].iter().all(|p| p.is_finite()) {
            return Err(Error::invalid("segment points must be finite"));
        }
        let t = tension.value();
        let m0 = (p1 - p_minus1) * t;
        let m1 = (p2 - p0) * t;
        let a = (p0 - p1) * 2.0 + m0 + m1;
        let b = (p1 - p0) * 3.0 - m0 * 2.0 - m1;
        Ok(Self { p_minus1, p0, p1, p2, tension, m0, m1, a, b, c: m0, d: p0 })
    }

    /// Power-basis coefficients `[a, b, c, d]`.
    pub fn coefficients(&self) -> [Point3; 4] {
        [self.a, self.b, self.c, self.d]
    }

    /// End tangents `[P'(0), P'(1)]`.
    pub fn end_tangents(&self) -> [Point3; 2] {
        [self.m0, self.m1]
    }

    /// Evaluates in the cubic Hermite basis. The basis weights are exactly
    /// `(1, 0, 0, 0)` at `u = 0` and `(0, 0, 1, 0)` at `u = 1`, so the
    /// segment ends reproduce `p0` and `p1` bit for bit.
    pub fn eval(&self, u: f64) -> Point3 {
        let u2 = u * u;
        let u3 = u2 * u;
        let h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
        let h10 = u3 - 2.0 * u2 + u;
        let h01 = -2.0 * u3 + 3.0 * u2;
        let h11 = u3 - u2;
        self.p0 * h00 + self.m0 * h10 + self.p1 * h01 + self.m1 * h11
    }

    /// Evaluates the power form with Horner's rule.
    pub fn eval_power(&self, u: f64) -> Point3 {
        ((self.a * u + self.b) * u + self.c) * u + self.d
    }

    /// `dP/du`, exact at both ends.
    pub fn derivative(&self, u: f64) -> Point3 {
        let u2 = u * u;
        let d00 = 6.0 * u2 - 6.0 * u;
        let d10 = 3.0 * u2 - 4.0 * u + 1.0;
        let d01 = -6.0 * u2 + 6.0 * u;
        let d11 = 3.0 * u2 - 2.0 * u;
        self.p0 * d00 + self.m0 * d10 + self.p1 * d01 + self.m1 * d11
    }
}

/// Supplies the missing outer neighbours by duplicating the first and last
/// keypoints: `[P0, P0, P1, .., Pn-1, Pn-1]`. Window `i..i + 4` of the
/// result feeds segment `i`, giving `n - 1` segments.
pub fn endpoint_policy(points: &[Point3]) -> Result<Vec<Point3>> {
    if points.len() < 2 {
        return Err(Error::PathTooShort { got: points.len() });
    }
    let mut out = Vec::with_capacity(points.len() + 2);
    out.push(points[0]);
    out.extend_from_slice(points);
    out.push(points[points.len() - 1]);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    Polyline,
    Bezier,
    CatmullRom,
}

impl CurveKind {
    pub const ALL: [CurveKind; 3] = [CurveKind::Polyline, CurveKind::Bezier, CurveKind::CatmullRom];

    pub fn as_str(self) -> &'static str {
        match self {
            CurveKind::Polyline => "polyline",
            CurveKind::Bezier => "bezier",
            CurveKind::CatmullRom => "catmull_rom",
        }
    }
}

impl fmt::Display for CurveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CurveKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "polyline" => Ok(CurveKind::Polyline),
            "bezier" => Ok(CurveKind::Bezier),
            "catmull_rom" | "catmull-rom" => Ok(CurveKind::CatmullRom),
            other => Err(Error::invalid(format!("unknown curve kind '{other}'"))),
        }
    }
}

/// Which one-sided limit to take at a knot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// An immutable curve through (or, for Bézier, guided by) keypoints.
#[derive(Debug, Clone, PartialEq)]
pub struct PathCurve {
    kind: CurveKind,
    keypoints: Vec<Point3>,
    tension: Tension,
    segments: Vec<CatmullRomSegment>,
}

impl PathCurve {
    pub fn new(kind: CurveKind, keypoints: Vec<Point3>, tension: Tension) -> Result<Self> {
        if keypoints.len() < 2 {
            return Err(Error::PathTooShort { got: keypoints.len() });
        }
        if !keypoints.iter().all(|p| p.is_finite()) {
            return Err(Error::invalid("keypoints must be finite"));
        }
        let segments = match kind {
            CurveKind::CatmullRom => endpoint_policy(&keypoints)?
                .windows(4)
                .map(|w| CatmullRomSegment::new(w[0], w[1], w[2], w[3], tension))
                .collect::<Result<Vec<_>>>()?,
            _ => Vec::new(),
        };
        Ok(Self { kind, keypoints, tension, segments })
    }

    pub fn polyline(keypoints: Vec<Point3>) -> Result<Self> {
        Self::new(CurveKind::Polyline, keypoints, Tension::DEFAULT)
    }

    pub fn bezier(keypoints: Vec<Point3>) -> Result<Self> {
        Self::new(CurveKind::Bezier, keypoints, Tension::DEFAULT)
    }

    pub fn catmull_rom(keypoints: Vec<Point3>, tension: Tension) -> Result<Self> {
        Self::new(CurveKind::CatmullRom, keypoints, tension)
    }

    pub fn kind(&self) -> CurveKind {
        self.kind
    }

    pub fn keypoints(&self) -> &[Point3] {
        &self.keypoints
    }

    pub fn tension(&self) -> Tension {
        self.tension
    }

    /// Catmull-Rom segments; empty for the other kinds.
    pub fn segments(&self) -> &[CatmullRomSegment] {
        &self.segments
    }

    /// Number of uniform parameter spans between keypoints (`N - 1`).
    /// The Bézier curve is a single span but keeps the same knot grid for
    /// next-node targeting.
    pub fn span_count(&self) -> usize {
        self.keypoints.len() - 1
    }

    /// Global parameter of keypoint `k`.
    pub fn knot_param(&self, k: usize) -> f64 {
        k as f64 / self.span_count() as f64
    }

    /// Parameters where the derivative may jump (interior knots of the
    /// piecewise kinds); empty for Bézier.
    fn breakpoints(&self, s0: f64, s1: f64) -> Vec<f64> {
        let mut pts = vec![s0];
        if self.kind != CurveKind::Bezier {
            for k in 1..self.span_count() {
                let s = self.knot_param(k);
                if s > s0 && s < s1 {
                    pts.push(s);
                }
            }
        }
        pts.push(s1);
        pts
    }

    fn check_param(s: f64) -> Result<()> {
        if (0.0..=1.0).contains(&s) {
            Ok(())
        } else {
            Err(Error::Domain { value: s, lo: 0.0, hi: 1.0 })
        }
    }

    /// Maps `s` to `(span, u)`. Values within a few ulps of a knot snap to
    /// it so that `knot_param(k)` lands exactly on keypoint `k`.
    pub(crate) fn locate(&self, s: f64, side: Side) -> (usize, f64) {
        let n = self.span_count();
        let x = s * n as f64;
        let r = x.round();
        let x = if (x - r).abs() <= 4.0 * f64::EPSILON * r.max(1.0) { r } else { x };
        let mut i = (x.floor() as usize).min(n - 1);
        if side == Side::Left && i > 0 && x == i as f64 {
            i -= 1;
        }
        (i, x - i as f64)
    }

    pub fn eval(&self, s: f64) -> Result<Point3> {
        Self::check_param(s)?;
        Ok(self.eval_unchecked(s))
    }

    pub(crate) fn eval_unchecked(&self, s: f64) -> Point3 {
        match self.kind {
            CurveKind::Bezier => de_casteljau(&self.keypoints, s),
            CurveKind::Polyline => {
                let (i, u) = self.locate(s, Side::Right);
                if u == 0.0 {
                    self.keypoints[i]
                } else if u == 1.0 {
                    self.keypoints[i + 1]
                } else {
                    self.keypoints[i].lerp(self.keypoints[i + 1], u)
                }
            }
            CurveKind::CatmullRom => {
                let (i, u) = self.locate(s, Side::Right);
                self.segments[i].eval(u)
            }
        }
    }

    /// `dP/ds`. At interior knots the right-hand segment is used.
    pub fn tangent(&self, s: f64) -> Result<Point3> {
        self.one_sided_tangent(s, Side::Right)
    }

    /// `dP/ds` taking the given one-sided limit at knots. Away from knots
    /// both sides agree; at `s = 0` the left limit falls back to the right
    /// one and at `s = 1` vice versa.
    pub fn one_sided_tangent(&self, s: f64, side: Side) -> Result<Point3> {
        Self::check_param(s)?;
        Ok(self.tangent_unchecked(s, side))
    }

    pub(crate) fn tangent_unchecked(&self, s: f64, side: Side) -> Point3 {
        let n = self.span_count() as f64;
        match self.kind {
            CurveKind::Bezier => bezier_derivative(&self.keypoints, s),
            CurveKind::Polyline => {
                let (i, _) = self.locate(s, side);
                (self.keypoints[i + 1] - self.keypoints[i]) * n
            }
            CurveKind::CatmullRom => {
                let (i, u) = self.locate(s, side);
                self.segments[i].derivative(u) * n
            }
        }
    }

    fn speed_at(&self, s: f64) -> f64 {
        self.tangent_unchecked(s, Side::Right).norm()
    }

    /// Length of the curve between `s0` and `s1`, by adaptive Gauss-Legendre
    /// quadrature of `|dP/ds|` with relative tolerance 1e-10 on each smooth
    /// piece (well inside the 1e-8 contract).
    pub fn arc_length(&self, s0: f64, s1: f64) -> Result<f64> {
        Self::check_param(s0)?;
        Self::check_param(s1)?;
        if s0 > s1 {
            return Err(Error::invalid(format!("arc_length range reversed: {s0} > {s1}")));
        }
        Ok(self.arc_length_unchecked(s0, s1))
    }

    fn arc_length_unchecked(&self, s0: f64, s1: f64) -> f64 {
        if s0 == s1 {
            return 0.0;
        }
        let pieces = self.breakpoints(s0, s1);
        pieces
            .windows(2)
            .map(|w| {
                let (a, b) = (w[0], w[1]);
                let estimate = chord_estimate(self, a, b);
                if estimate == 0.0 {
                    return 0.0;
                }
                quad::adaptive(&|s| self.speed_at(s), a, b, QUAD_REL_TOL * estimate)
            })
            .sum()
    }

    /// Total length.
    pub fn length(&self) -> f64 {
        self.arc_length_unchecked(0.0, 1.0)
    }
}

const QUAD_REL_TOL: f64 = 1e-10;

fn chord_estimate(curve: &PathCurve, a: f64, b: f64) -> f64 {
    const N: usize = 16;
    let mut prev = curve.eval_unchecked(a);
    let mut total = 0.0;
    for k in 1..=N {
        let p = curve.eval_unchecked(a + (b - a) * k as f64 / N as f64);
        total += p.distance(prev);
        prev = p;
    }
    total
}

/// De Casteljau evaluation of a Bézier curve with the given control points.
pub fn de_casteljau(control: &[Point3], s: f64) -> Point3 {
    let mut work = control.to_vec();
    let n = work.len();
    for level in 1..n {
        for i in 0..n - level {
            work[i] = work[i].lerp(work[i + 1], s);
        }
    }
    work[0]
}

/// Derivative through the hodograph: `(n-1)·Δ` control points evaluated by
/// de Casteljau.
pub fn bezier_derivative(control: &[Point3], s: f64) -> Point3 {
    let degree = (control.len() - 1) as f64;
    let hodograph: Vec<Point3> = control.windows(2).map(|w| (w[1] - w[0]) * degree).collect();
    de_casteljau(&hodograph, s)
}

/// Cumulative arc length over a fine parameter grid, for constant-speed
/// stepping along a curve.
#[derive(Debug, Clone)]
pub struct ArcLengthTable<'a> {
    curve: &'a PathCurve,
    params: Vec<f64>,
    cumulative: Vec<f64>,
}

const CELLS_PER_SPAN: usize = 8;
const BEZIER_CELLS: usize = 64;

impl<'a> ArcLengthTable<'a> {
    pub fn new(curve: &'a PathCurve) -> Self {
        let params: Vec<f64> = match curve.kind {
            CurveKind::Bezier => (0..=BEZIER_CELLS).map(|k| k as f64 / BEZIER_CELLS as f64).collect(),
            _ => {
                let n = curve.span_count();
                let cells = n * CELLS_PER_SPAN;
                (0..=cells)
                    .map(|k| {
                        if k % CELLS_PER_SPAN == 0 {
                            curve.knot_param(k / CELLS_PER_SPAN)
                        } else {
                            k as f64 / cells as f64
                        }
                    })
                    .collect()
            }
        };
        let mut cumulative = Vec::with_capacity(params.len());
        cumulative.push(0.0);
        for w in params.windows(2) {
            let last = *cumulative.last().unwrap();
            cumulative.push(last + curve.arc_length_unchecked(w[0], w[1]));
        }
        Self { curve, params, cumulative }
    }

    pub fn total(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    fn cell_of_param(&self, s: f64) -> usize {
        let idx = self.params.partition_point(|&p| p <= s);
        idx.saturating_sub(1).min(self.params.len() - 2)
    }

    /// Arc length from 0 to `s`.
    pub fn length_at(&self, s: f64) -> f64 {
        let s = s.clamp(0.0, 1.0);
        let j = self.cell_of_param(s);
        self.cumulative[j] + self.curve.arc_length_unchecked(self.params[j], s)
    }

    /// Inverse of [`length_at`](Self::length_at): the parameter whose arc
    /// length from the start is `length` (clamped to the curve).
    pub fn param_at_length(&self, length: f64) -> f64 {
        if length <= 0.0 {
            return 0.0;
        }
        if length >= self.total() {
            return 1.0;
        }
        let idx = self.cumulative.partition_point(|&c| c <= length);
        let j = idx.saturating_sub(1).min(self.params.len() - 2);
        let (mut lo, mut hi) = (self.params[j], self.params[j + 1]);
        let base = self.cumulative[j];
        let cell_len = self.cumulative[j + 1] - base;
        if cell_len <= 0.0 {
            return lo;
        }
        let target = length - base;
        let tol = 1e-12 * self.total().max(f64::MIN_POSITIVE);
        let mut s = lo + (hi - lo) * (target / cell_len);
        for _ in 0..60 {
            let f = self.curve.arc_length_unchecked(self.params[j], s) - target;
            if f.abs() <= tol {
                break;
            }
            if f > 0.0 {
                hi = s;
            } else {
                lo = s;
            }
            let speed = self.curve.speed_at(s);
            let newton = if speed > 0.0 { s - f / speed } else { f64::NAN };
            s = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
            if hi - lo <= f64::EPSILON * hi.max(1.0) {
                break;
            }
        }
        s
    }
}

pub(crate) mod quad {
    //! Adaptive Gauss-Legendre quadrature.

    const NODES: [f64; 5] =
        [0.0, 0.538_469_310_105_683_1, -0.538_469_310_105_683_1, 0.906_179_845_938_664, -0.906_179_845_938_664];
    const WEIGHTS: [f64; 5] = [
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_5,
        0.478_628_670_499_366_5,
        0.236_926_885_056_189_1,
        0.236_926_885_056_189_1,
    ];
    const MAX_DEPTH: u32 = 40;

    fn gauss5(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        NODES.iter().zip(WEIGHTS).map(|(x, w)| w * f(mid + half * x)).sum::<f64>() * half
    }

    /// Integrates `f` over `[a, b]` to absolute tolerance `tol`, comparing
    /// each interval against its two halves.
    pub fn adaptive(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
        let whole = gauss5(f, a, b);
        recurse(f, a, b, whole, tol, MAX_DEPTH)
    }

    fn recurse(f: &dyn Fn(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let left = gauss5(f, a, m);
        let right = gauss5(f, m, b);
        let halves = left + right;
        if depth == 0 || (halves - whole).abs() <= tol || m <= a || m >= b {
            return halves;
        }
        recurse(f, a, m, left, 0.5 * tol, depth - 1) + recurse(f, m, b, right, 0.5 * tol, depth - 1)
    }
}
