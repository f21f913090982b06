//! View-direction models and smoothness metrics.
//!
//! `NextNode` aims the view at the next keypoint not yet reached and snaps
//! to the following one the moment `s` crosses a knot. `Tangent` follows the
//! normalized curve tangent. Only the direction is modelled; roll and
//! up-vector are not.

use serde::{Deserialize, Serialize};

use crate::geo::Point3;
use crate::spline::{PathCurve, Side};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViewModel {
    NextNode,
    Tangent,
}

impl ViewModel {
    pub const ALL: [ViewModel; 2] = [ViewModel::NextNode, ViewModel::Tangent];

    pub fn as_str(self) -> &'static str {
        match self {
            ViewModel::NextNode => "next_node",
            ViewModel::Tangent => "tangent",
        }
    }
}

impl std::fmt::Display for ViewModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Unit view direction at `s`.
///
/// In `NextNode` mode a knot counts as reached once `s` equals its
/// parameter, so at knot `k` the view already points at keypoint `k + 1`.
/// At `s = 1` there is no next node and the view keeps its arrival
/// direction (the end tangent).
pub fn view_direction(curve: &PathCurve, model: ViewModel, s: f64) -> Result<Point3> {
    view_direction_one_sided(curve, model, s, Side::Right)
}

/// Like [`view_direction`] but taking the given one-sided limit at knots.
pub fn view_direction_one_sided(curve: &PathCurve, model: ViewModel, s: f64, side: Side) -> Result<Point3> {
    let position = curve.eval(s)?;
    match model {
        ViewModel::Tangent => unit_tangent(curve, s, side),
        ViewModel::NextNode => {
            let n = curve.span_count();
            if s == 1.0 {
                return unit_tangent(curve, s, Side::Left);
            }
            let (span, u) = curve.locate(s, Side::Right);
            if side == Side::Left && u == 0.0 && span > 0 {
                // approaching keypoint `span` from the left
                let target = curve.keypoints()[span];
                return match (target - position).normalized() {
                    Some(d) => Ok(d),
                    None => unit_tangent(curve, s, Side::Left),
                };
            }
            let target = curve.keypoints()[(span + 1).min(n)];
            (target - position).normalized().ok_or(Error::DegenerateView)
        }
    }
}

fn unit_tangent(curve: &PathCurve, s: f64, side: Side) -> Result<Point3> {
    curve.one_sided_tangent(s, side)?.normalized().ok_or(Error::DegenerateView)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothnessReport {
    /// Angle between the one-sided view directions at each interior knot.
    pub corner_angles: Vec<f64>,
    /// Largest entry of `corner_angles` (0 without interior knots).
    pub max_angular_jump: f64,
    /// Mean of `angle(d_j, d_{j+1}) / Δs` over consecutive samples.
    pub mean_angular_speed: f64,
    pub max_angular_speed: f64,
}

/// Measures how evenly the view turns along `curve`.
///
/// Knot jumps are computed exactly from one-sided directions; angular
/// speeds come from `samples_per_span` evenly spaced samples per span.
pub fn smoothness(curve: &PathCurve, model: ViewModel, samples_per_span: usize) -> Result<SmoothnessReport> {
    if samples_per_span < 2 {
        return Err(Error::invalid(format!("need at least 2 samples per span, got {samples_per_span}")));
    }
    let n = curve.span_count();
    let corner_angles = (1..n)
        .map(|k| {
            let s = curve.knot_param(k);
            let left = view_direction_one_sided(curve, model, s, Side::Left)?;
            let right = view_direction_one_sided(curve, model, s, Side::Right)?;
            Ok(left.angle_to(right))
        })
        .collect::<Result<Vec<_>>>()?;
    let max_angular_jump = corner_angles.iter().copied().fold(0.0, f64::max);

    let total = samples_per_span * n;
    let ds = 1.0 / total as f64;
    let dirs =
        (0..=total).map(|j| view_direction(curve, model, j as f64 / total as f64)).collect::<Result<Vec<_>>>()?;
    let speeds: Vec<f64> = dirs.windows(2).map(|w| w[0].angle_to(w[1]) / ds).collect();
    let mean_angular_speed = speeds.iter().sum::<f64>() / speeds.len() as f64;
    let max_angular_speed = speeds.iter().copied().fold(0.0, f64::max);

    Ok(SmoothnessReport { corner_angles, max_angular_jump, mean_angular_speed, max_angular_speed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spline::{CurveKind, Tension};
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    fn p(x: f64, y: f64, z: f64) -> Point3 {
        Point3::new(x, y, z)
    }

    fn route() -> Vec<Point3> {
        vec![
            p(121.47, 31.23, 10000.0),
            p(123.00, 20.00, 50000.0),
            p(135.00, 10.00, 50000.0),
            p(170.00, 13.00, 50000.0),
            p(180.00, -5.00, 50000.0),
            p(200.00, -13.50, 50000.0),
        ]
    }

    fn square() -> Vec<Point3> {
        vec![p(0., 0., 0.), p(1., 0., 0.), p(1., 1., 0.), p(0., 1., 0.)]
    }

    #[test]
    fn straight_two_point_path() {
        let pts = vec![p(0., 0., 0.), p(3., 4., 0.)];
        let dir = p(0.6, 0.8, 0.0);
        for kind in CurveKind::ALL {
            let curve = PathCurve::new(kind, pts.clone(), Tension::DEFAULT).unwrap();
            for model in ViewModel::ALL {
                for k in 0..=10 {
                    let v = view_direction(&curve, model, k as f64 / 10.0).unwrap();
                    assert!(v.distance(dir) < 1e-12, "{kind} {model} {k}: {v:?}");
                }
            }
        }
    }

    #[test]
    fn next_node_snaps_at_corner() {
        let curve = PathCurve::polyline(vec![p(0., 0., 0.), p(1., 0., 0.), p(1., 1., 0.)]).unwrap();
        let before = view_direction(&curve, ViewModel::NextNode, 0.5 - 1e-9).unwrap();
        let at = view_direction(&curve, ViewModel::NextNode, 0.5).unwrap();
        assert!((before.angle_to(at) - FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn degenerate_view() {
        let curve = PathCurve::polyline(vec![p(0., 0., 0.), p(0., 0., 0.)]).unwrap();
        assert!(matches!(view_direction(&curve, ViewModel::Tangent, 0.3), Err(Error::DegenerateView)));
        assert!(matches!(view_direction(&curve, ViewModel::NextNode, 0.3), Err(Error::DegenerateView)));
        assert!(view_direction(&curve, ViewModel::NextNode, 1.5).is_err());
    }

    #[test]
    fn square_corner_angles() {
        let curve = PathCurve::polyline(square()).unwrap();
        for model in ViewModel::ALL {
            let rep = smoothness(&curve, model, 8).unwrap();
            assert_eq!(rep.corner_angles.len(), 2);
            for a in &rep.corner_angles {
                assert!((a - FRAC_PI_2).abs() < 1e-15, "{model}: {a}");
            }
        }
    }

    #[test]
    fn straight_path_is_smooth() {
        let pts: Vec<_> = (0..4).map(|i| p(i as f64, 0.5 * i as f64, 2.0)).collect();
        let curve = PathCurve::polyline(pts).unwrap();
        let rep = smoothness(&curve, ViewModel::NextNode, 4).unwrap();
        assert_eq!(rep.corner_angles, vec![0.0, 0.0]);
        assert_eq!(rep.max_angular_jump, 0.0);
        assert_eq!(rep.max_angular_speed, 0.0);
    }

    #[test]
    fn route_catmull_rom_vs_polyline() {
        let cr = PathCurve::catmull_rom(route(), Tension::DEFAULT).unwrap();
        let pl = PathCurve::polyline(route()).unwrap();
        let smooth = smoothness(&cr, ViewModel::Tangent, 32).unwrap();
        let stiff = smoothness(&pl, ViewModel::NextNode, 32).unwrap();
        assert!(smooth.max_angular_jump < 1e-9, "{}", smooth.max_angular_jump);
        assert!(stiff.max_angular_jump > 0.1);
        let stiff_tangent = smoothness(&pl, ViewModel::Tangent, 32).unwrap();
        assert_eq!(stiff_tangent.corner_angles, stiff.corner_angles);
    }

    #[test]
    fn catmull_rom_tangent_view_has_no_jump_near_knots() {
        let cr = PathCurve::catmull_rom(route(), Tension::DEFAULT).unwrap();
        for k in 1..5 {
            let s = cr.knot_param(k);
            let l = view_direction_one_sided(&cr, ViewModel::Tangent, s, Side::Left).unwrap();
            let r = view_direction(&cr, ViewModel::Tangent, s).unwrap();
            assert!(l.angle_to(r) < 1e-9);
            // sampled change across the knot shrinks linearly with the offset
            let across = |h: f64| {
                let a = view_direction(&cr, ViewModel::Tangent, s - h).unwrap();
                let b = view_direction(&cr, ViewModel::Tangent, s + h).unwrap();
                a.angle_to(b)
            };
            let (wide, narrow) = (across(1e-5), across(1e-7));
            assert!(narrow < wide / 50.0, "knot {k}: {wide} vs {narrow}");
        }
    }

    #[test]
    fn sampled_jump_converges_to_knot_jump() {
        let pl = PathCurve::polyline(route()).unwrap();
        let bez = PathCurve::bezier(route()).unwrap();
        for (curve, model) in [(&pl, ViewModel::NextNode), (&pl, ViewModel::Tangent), (&bez, ViewModel::NextNode)] {
            let exact = smoothness(curve, model, 2).unwrap();
            for (k, &corner) in exact.corner_angles.iter().enumerate() {
                let s = curve.knot_param(k + 1);
                let err = |h: f64| {
                    let a = view_direction(curve, model, s - h).unwrap();
                    let b = view_direction(curve, model, s).unwrap();
                    (a.angle_to(b) - corner).abs()
                };
                let (coarse, fine) = (err(1e-3), err(1e-8));
                assert!(fine <= coarse + 1e-8 && fine < 1e-5, "{model} knot {}: {coarse} {fine}", k + 1);
            }
        }
    }

    #[test]
    fn too_few_samples() {
        let curve = PathCurve::polyline(square()).unwrap();
        assert!(smoothness(&curve, ViewModel::Tangent, 1).is_err());
    }

    proptest! {
        #[test]
        fn tangent_spline_never_jumps_more_than_next_node_polyline(
            pts in prop::collection::vec(
                (-50.0..50.0f64, -50.0..50.0f64, -50.0..50.0f64).prop_map(|(x, y, z)| p(x, y, z)),
                3..8,
            ),
        ) {
            let cr = PathCurve::catmull_rom(pts.clone(), Tension::DEFAULT).unwrap();
            let pl = PathCurve::polyline(pts).unwrap();
            let smooth = smoothness(&cr, ViewModel::Tangent, 4).unwrap();
            let stiff = smoothness(&pl, ViewModel::NextNode, 4).unwrap();
            prop_assert!(smooth.max_angular_jump < 1e-9);
            prop_assert!(stiff.max_angular_jump > smooth.max_angular_jump);
            for a in smooth.corner_angles.iter().chain(&stiff.corner_angles) {
                prop_assert!((0.0..=std::f64::consts::PI).contains(a));
            }
        }
    }
}
