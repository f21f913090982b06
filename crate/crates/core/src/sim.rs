//! Deterministic roaming simulation.
//!
//! An agent sphere moves along a [`PathCurve`] at the keypoint speeds,
//! advancing a fixed timestep at a time by arc length. Collisions are
//! counted as entry events into obstacle spheres. While roaming the agent
//! fires selection rays at nearby targets with seeded angular aim noise.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::geo::{KeyPoint, Point3};
use crate::spline::{ArcLengthTable, PathCurve};
use crate::{Error, Result};

/// Seconds of roaming before the agent runs out of energy.
pub const DEFAULT_ENERGY_BUDGET: f64 = 300.0;

/// Default distance from a target's surface at which a selection ray is
/// fired.
pub const DEFAULT_TRIGGER_DISTANCE: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Obstacle {
    pub center: Point3,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Target {
    pub id: String,
    pub center: Point3,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneSpec {
    #[serde(default)]
    pub obstacles: Vec<Obstacle>,
    #[serde(default)]
    pub targets: Vec<Target>,
    pub agent_radius: f64,
    #[serde(default = "default_energy_budget")]
    pub energy_budget: f64,
}

fn default_energy_budget() -> f64 {
    DEFAULT_ENERGY_BUDGET
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be finite and > 0, got {v}")))
    }
}

impl SceneSpec {
    pub fn empty(agent_radius: f64) -> Self {
        Self { obstacles: Vec::new(), targets: Vec::new(), agent_radius, energy_budget: DEFAULT_ENERGY_BUDGET }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let scene: SceneSpec = serde_json::from_str(text)?;
        scene.validate()?;
        Ok(scene)
    }

    pub fn validate(&self) -> Result<()> {
        positive("agent_radius", self.agent_radius)?;
        positive("energy_budget", self.energy_budget)?;
        for (i, o) in self.obstacles.iter().enumerate() {
            positive(&format!("obstacles[{i}].radius"), o.radius)?;
            if !o.center.is_finite() {
                return Err(Error::invalid(format!("obstacles[{i}].center is not finite")));
            }
        }
        for (i, t) in self.targets.iter().enumerate() {
            positive(&format!("targets[{i}].radius"), t.radius)?;
            if !t.center.is_finite() {
                return Err(Error::invalid(format!("targets[{i}].center is not finite")));
            }
            if self.targets[..i].iter().any(|other| other.id == t.id) {
                return Err(Error::invalid(format!("duplicate target id '{}'", t.id)));
            }
        }
        Ok(())
    }
}

/// Per-keypoint speeds, linear in the global parameter between knots.
#[derive(Debug, Clone, PartialEq)]
pub struct SpeedProfile {
    speeds: Vec<f64>,
}

impl SpeedProfile {
    pub fn new(speeds: Vec<f64>) -> Result<Self> {
        if speeds.len() < 2 {
            return Err(Error::PathTooShort { got: speeds.len() });
        }
        for (i, &v) in speeds.iter().enumerate() {
            positive(&format!("speed[{i}]"), v)?;
        }
        Ok(Self { speeds })
    }

    pub fn uniform(speed: f64, keypoints: usize) -> Result<Self> {
        Self::new(vec![speed; keypoints])
    }

    pub fn from_keypoints(kps: &[KeyPoint]) -> Result<Self> {
        Self::new(kps.iter().map(|k| k.speed).collect())
    }

    pub fn len(&self) -> usize {
        self.speeds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.speeds.is_empty()
    }

    pub fn speed_at(&self, s: f64) -> f64 {
        let n = self.speeds.len() - 1;
        let x = s.clamp(0.0, 1.0) * n as f64;
        let i = (x.floor() as usize).min(n - 1);
        let u = x - i as f64;
        self.speeds[i] + (self.speeds[i + 1] - self.speeds[i]) * u
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub time_used: f64,
    pub collisions: u32,
    pub ray_attempts: u32,
    pub ray_hits: u32,
    /// `ray_hits / ray_attempts`, 0 without attempts.
    pub accuracy: f64,
    /// False when the energy budget ran out before the end of the path.
    pub completed: bool,
}

impl SimResult {
    pub fn with_rays(mut self, tally: RayTally) -> Self {
        self.ray_attempts = tally.attempts;
        self.ray_hits = tally.hits;
        self.accuracy = tally.accuracy();
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub time: f64,
    pub s: f64,
    pub position: Point3,
}

/// Time-sampled positions along a curve.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<TrajectorySample>,
}

impl Trajectory {
    pub fn positions(&self) -> Vec<Point3> {
        self.samples.iter().map(|p| p.position).collect()
    }

    /// View directions at each sample under `model`.
    pub fn view_directions(&self, curve: &PathCurve, model: crate::camera::ViewModel) -> Result<Vec<Point3>> {
        self.samples.iter().map(|p| crate::camera::view_direction(curve, model, p.s)).collect()
    }
}

pub fn traverse(curve: &PathCurve, profile: &SpeedProfile, scene: &SceneSpec, dt: f64) -> Result<SimResult> {
    traverse_recorded(curve, profile, scene, dt).map(|(r, _)| r)
}

/// Walks `curve` in steps of `dt` seconds, covering `speed · dt` of arc
/// length per step, and returns the metrics together with every visited
/// position. The final step to the end of the path is shortened so that
/// `time_used` is the exact travel time up to quadrature error.
pub fn traverse_recorded(
    curve: &PathCurve,
    profile: &SpeedProfile,
    scene: &SceneSpec,
    dt: f64,
) -> Result<(SimResult, Trajectory)> {
    positive("dt", dt)?;
    scene.validate()?;
    if profile.len() != curve.keypoints().len() {
        return Err(Error::invalid(format!(
            "speed profile has {} entries but the curve has {} keypoints",
            profile.len(),
            curve.keypoints().len()
        )));
    }

    let table = ArcLengthTable::new(curve);
    let total = table.total();
    let budget = scene.energy_budget;
    let mut contacts = ContactTracker::new(scene);
    let mut trajectory = Trajectory::default();

    let (mut s, mut travelled, mut time) = (0.0_f64, 0.0_f64, 0.0_f64);
    let mut visit = |s: f64, time: f64, contacts: &mut ContactTracker| {
        let position = curve.eval_unchecked(s);
        contacts.observe(position);
        trajectory.samples.push(TrajectorySample { time, s, position });
    };
    visit(s, time, &mut contacts);

    let completed = loop {
        if travelled >= total {
            break true;
        }
        let speed = profile.speed_at(s);
        let remaining = total - travelled;
        let (mut step_len, mut step_time) = (speed * dt, dt);
        // absorb float drift so the path does not end with a sliver step
        let finishing = step_len >= remaining - 1e-9 * total;
        if finishing {
            step_len = remaining;
            step_time = remaining / speed;
        }
        if time + step_time > budget {
            let left = (budget - time).max(0.0);
            travelled += speed * left;
            time = budget;
            s = table.param_at_length(travelled);
            visit(s, time, &mut contacts);
            break false;
        }
        time += step_time;
        travelled += step_len;
        s = if finishing { 1.0 } else { table.param_at_length(travelled) };
        visit(s, time, &mut contacts);
        if finishing {
            break true;
        }
    };

    let result = SimResult {
        time_used: time,
        collisions: contacts.entries,
        ray_attempts: 0,
        ray_hits: 0,
        accuracy: 0.0,
        completed,
    };
    Ok((result, trajectory))
}

struct ContactTracker<'a> {
    scene: &'a SceneSpec,
    inside: Vec<bool>,
    entries: u32,
}

impl<'a> ContactTracker<'a> {
    fn new(scene: &'a SceneSpec) -> Self {
        Self { scene, inside: vec![false; scene.obstacles.len()], entries: 0 }
    }

    fn observe(&mut self, position: Point3) {
        for (o, inside) in self.scene.obstacles.iter().zip(self.inside.iter_mut()) {
            let overlapping = position.distance(o.center) <= o.radius + self.scene.agent_radius;
            if overlapping && !*inside {
                self.entries += 1;
            }
            *inside = overlapping;
        }
    }
}

/// Ray-sphere distance along a unit direction: the entry point if the
/// origin is outside, the exit point if inside, `None` for a miss. A ray
/// grazing the sphere (`discriminant == 0`) counts as a hit.
fn ray_sphere(origin: Point3, dir: Point3, center: Point3, radius: f64) -> Option<f64> {
    let oc = origin - center;
    let b = oc.dot(dir);
    let c = oc.dot(oc) - radius * radius;
    let disc = b * b - c;
    if disc < 0.0 {
        return None;
    }
    let root = disc.sqrt();
    let (near, far) = (-b - root, -b + root);
    if far < 0.0 {
        None
    } else if near >= 0.0 {
        Some(near)
    } else {
        Some(far)
    }
}

/// Id of the nearest target hit by the ray, ties going to the earlier
/// target in the scene.
pub fn cast_ray(origin: Point3, direction: Point3, scene: &SceneSpec) -> Result<Option<&str>> {
    let dir = direction.normalized().ok_or_else(|| Error::invalid("ray direction must be non-zero and finite"))?;
    if !origin.is_finite() {
        return Err(Error::invalid("ray origin must be finite"));
    }
    let mut best: Option<(f64, &str)> = None;
    for t in &scene.targets {
        if let Some(d) = ray_sphere(origin, dir, t.center, t.radius) {
            if best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, t.id.as_str()));
            }
        }
    }
    Ok(best.map(|(_, id)| id))
}

/// Synthetic aim: the ideal direction is rotated by an angle whose
/// tangent-plane components are independent `N(0, sigma²)` (radians).
/// `sigma = ∞` draws the direction uniformly from the sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AimModel {
    pub sigma: f64,
    pub trigger_distance: f64,
}

impl AimModel {
    pub fn new(sigma: f64, trigger_distance: f64) -> Result<Self> {
        let aim = Self { sigma, trigger_distance };
        aim.validate()?;
        Ok(aim)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sigma.is_nan() || self.sigma < 0.0 {
            return Err(Error::invalid(format!("sigma must be >= 0, got {}", self.sigma)));
        }
        if !(self.trigger_distance.is_finite() && self.trigger_distance >= 0.0) {
            return Err(Error::invalid(format!("trigger distance must be >= 0, got {}", self.trigger_distance)));
        }
        Ok(())
    }

    fn perturb(&self, ideal: Point3, rng: &mut ChaCha8Rng) -> Point3 {
        if self.sigma == 0.0 {
            return ideal;
        }
        if self.sigma.is_infinite() {
            loop {
                let v = Point3::new(rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal));
                if let Some(u) = v.normalized() {
                    return u;
                }
            }
        }
        let (a, b): (f64, f64) = (rng.sample(StandardNormal), rng.sample(StandardNormal));
        let theta = self.sigma * a.hypot(b);
        let phi = b.atan2(a);
        let (e1, e2) = orthonormal_basis(ideal);
        ideal * theta.cos() + (e1 * phi.cos() + e2 * phi.sin()) * theta.sin()
    }
}

impl Default for AimModel {
    fn default() -> Self {
        Self { sigma: 0.0, trigger_distance: DEFAULT_TRIGGER_DISTANCE }
    }
}

fn orthonormal_basis(d: Point3) -> (Point3, Point3) {
    let helper = if d.x.abs() < 0.9 { Point3::new(1.0, 0.0, 0.0) } else { Point3::new(0.0, 1.0, 0.0) };
    let e1 = d.cross(helper).normalized().expect("helper is not parallel to d");
    let e2 = d.cross(e1);
    (e1, e2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RayTally {
    pub attempts: u32,
    pub hits: u32,
}

impl RayTally {
    pub fn accuracy(&self) -> f64 {
        if self.attempts == 0 {
            0.0
        } else {
            self.hits as f64 / self.attempts as f64
        }
    }
}

/// Fires one ray each time the agent comes within `trigger_distance` of a
/// target's surface. The ray aims at the centre of the nearest target,
/// perturbed by the aim model, and counts as a hit when the first target
/// it meets is that intended one. An agent sitting exactly on the target
/// centre scores a hit without casting.
pub fn run_ray_task(points: &[Point3], aim: &AimModel, seed: u64, scene: &SceneSpec) -> Result<RayTally> {
    aim.validate()?;
    if scene.targets.is_empty() {
        return Err(Error::invalid("ray task needs at least one target"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut armed = vec![false; scene.targets.len()];
    let mut tally = RayTally::default();
    for &pos in points {
        for (t, was_near) in scene.targets.iter().zip(armed.iter_mut()) {
            let near = pos.distance(t.center) <= t.radius + aim.trigger_distance;
            let entered = near && !*was_near;
            *was_near = near;
            if !entered {
                continue;
            }
            tally.attempts += 1;
            let intended = nearest_target(pos, scene);
            let Some(ideal) = (intended.center - pos).normalized() else {
                tally.hits += 1;
                continue;
            };
            let dir = aim.perturb(ideal, &mut rng);
            if cast_ray(pos, dir, scene)? == Some(intended.id.as_str()) {
                tally.hits += 1;
            }
        }
    }
    Ok(tally)
}

fn nearest_target(pos: Point3, scene: &SceneSpec) -> &Target {
    let mut best = &scene.targets[0];
    for t in &scene.targets[1..] {
        if pos.distance(t.center) < pos.distance(best.center) {
            best = t;
        }
    }
    best
}

/// Traversal plus ray task: the full set of roaming metrics for one run.
pub fn simulate(
    curve: &PathCurve,
    profile: &SpeedProfile,
    scene: &SceneSpec,
    dt: f64,
    aim: &AimModel,
    seed: u64,
) -> Result<SimResult> {
    let (result, trajectory) = traverse_recorded(curve, profile, scene, dt)?;
    if scene.targets.is_empty() {
        aim.validate()?;
        return Ok(result);
    }
    let tally = run_ray_task(&trajectory.positions(), aim, seed, scene)?;
    Ok(result.with_rays(tally))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spline::{CurveKind, Tension};

    fn p(x: f64, y: f64, z: f64) -> Point3 {
        Point3::new(x, y, z)
    }

    fn straight() -> PathCurve {
        PathCurve::polyline(vec![p(0., 0., 0.), p(10., 0., 0.)]).unwrap()
    }

    fn one_target(center: Point3, radius: f64) -> SceneSpec {
        SceneSpec { targets: vec![Target { id: "fish".into(), center, radius }], ..SceneSpec::empty(0.5) }
    }

    #[test]
    fn straight_path_time() {
        let profile = SpeedProfile::uniform(2.0, 2).unwrap();
        let r = traverse(&straight(), &profile, &SceneSpec::empty(0.5), 0.01).unwrap();
        assert!((r.time_used - 5.0).abs() <= 0.01, "{}", r.time_used);
        assert_eq!(r.collisions, 0);
        assert!(r.completed);
        assert_eq!((r.ray_attempts, r.accuracy), (0, 0.0));
    }

    #[test]
    fn obstacle_on_midpoint_counts_once() {
        let profile = SpeedProfile::uniform(2.0, 2).unwrap();
        let mut scene = SceneSpec::empty(0.5);
        scene.obstacles.push(Obstacle { center: p(5., 0., 0.), radius: 1.0 });
        assert_eq!(traverse(&straight(), &profile, &scene, 0.01).unwrap().collisions, 1);
    }

    #[test]
    fn reentry_counts_again() {
        let curve = PathCurve::polyline(vec![p(0., 0., 0.), p(10., 0., 0.), p(0., 0., 0.)]).unwrap();
        let profile = SpeedProfile::uniform(1.0, 3).unwrap();
        let mut scene = SceneSpec::empty(0.1);
        scene.obstacles.push(Obstacle { center: p(5., 0., 0.), radius: 1.0 });
        scene.obstacles.push(Obstacle { center: p(20., 0., 0.), radius: 1.0 });
        assert_eq!(traverse(&curve, &profile, &scene, 0.05).unwrap().collisions, 2);
    }

    #[test]
    fn energy_budget_stops_early() {
        let profile = SpeedProfile::uniform(1.0, 2).unwrap();
        let mut scene = SceneSpec::empty(0.5);
        scene.energy_budget = 4.0;
        let r = traverse(&straight(), &profile, &scene, 0.3).unwrap();
        assert!(!r.completed);
        assert_eq!(r.time_used, 4.0);
    }

    #[test]
    fn route_time_matches_arc_length() {
        let pts = vec![
            p(121.47, 31.23, 10000.0),
            p(123.00, 20.00, 50000.0),
            p(135.00, 10.00, 50000.0),
            p(170.00, 13.00, 50000.0),
            p(180.00, -5.00, 50000.0),
            p(200.00, -13.50, 50000.0),
        ];
        let curve = PathCurve::catmull_rom(pts, Tension::DEFAULT).unwrap();
        let mut scene = SceneSpec::empty(1.0);
        scene.energy_budget = 1e6;
        let dt = 1.0;
        let r = traverse(&curve, &SpeedProfile::uniform(1.0, 6).unwrap(), &scene, dt).unwrap();
        // 10^6-chord length of this curve
        let oracle = 46_004.603_481_025_6;
        assert!(r.completed);
        assert!((r.time_used - oracle).abs() <= dt, "{} vs {oracle}", r.time_used);
    }

    #[test]
    fn variable_speed_profile() {
        let profile = SpeedProfile::new(vec![1.0, 3.0]).unwrap();
        assert_eq!(profile.speed_at(0.5), 2.0);
        // dx/dt = 1 + 2x/10 over 10 units: t = 5 ln 3
        let r = traverse(&straight(), &profile, &SceneSpec::empty(0.5), 1e-3).unwrap();
        assert!((r.time_used - 5.0 * 3f64.ln()).abs() < 1e-2, "{}", r.time_used);
    }

    #[test]
    fn input_validation() {
        let profile = SpeedProfile::uniform(1.0, 3).unwrap();
        assert!(traverse(&straight(), &profile, &SceneSpec::empty(0.5), 0.1).is_err());
        let profile = SpeedProfile::uniform(1.0, 2).unwrap();
        assert!(traverse(&straight(), &profile, &SceneSpec::empty(0.5), 0.0).is_err());
        assert!(traverse(&straight(), &profile, &SceneSpec::empty(-1.0), 0.1).is_err());
        assert!(SpeedProfile::new(vec![1.0, 0.0]).is_err());
    }

    #[test]
    fn ray_cases() {
        let scene = one_target(p(10., 0., 0.), 1.0);
        assert_eq!(cast_ray(p(0., 0., 0.), p(1., 0., 0.), &scene).unwrap(), Some("fish"));
        assert_eq!(cast_ray(p(0., 0., 0.), p(-1., 0., 0.), &scene).unwrap(), None);
        // grazing: distance from centre equals the radius
        assert_eq!(cast_ray(p(0., 1., 0.), p(1., 0., 0.), &scene).unwrap(), Some("fish"));
        assert_eq!(cast_ray(p(0., 1.0000001, 0.), p(1., 0., 0.), &scene).unwrap(), None);
        assert!(cast_ray(p(0., 0., 0.), Point3::ZERO, &scene).is_err());
        // from inside the sphere
        assert_eq!(cast_ray(p(10.5, 0., 0.), p(0., 1., 0.), &scene).unwrap(), Some("fish"));
    }

    #[test]
    fn nearest_target_wins() {
        let mut scene = one_target(p(10., 0., 0.), 1.0);
        scene.targets.push(Target { id: "near".into(), center: p(5., 0., 0.), radius: 1.0 });
        assert_eq!(cast_ray(p(0., 0., 0.), p(1., 0., 0.), &scene).unwrap(), Some("near"));
    }

    #[test]
    fn scene_json() {
        let scene = SceneSpec::from_json(
            r#"{"obstacles":[{"center":[1,2,3],"radius":2}],
                "targets":[{"id":"ray","center":[0,0,5],"radius":1}],
                "agent_radius":0.5}"#,
        )
        .unwrap();
        assert_eq!(scene.energy_budget, 300.0);
        assert_eq!(scene.obstacles[0].center, p(1., 2., 3.));
        assert_eq!(scene.targets[0].id, "ray");
        assert!(SceneSpec::from_json(r#"{"agent_radius":0}"#).is_err());
        assert!(SceneSpec::from_json(r#"{"agent_radius":1,"energy_budget":-3}"#).is_err());
        let dup = r#"{"agent_radius":1,"targets":[{"id":"a","center":[0,0,0],"radius":1},{"id":"a","center":[1,0,0],"radius":1}]}"#;
        assert!(SceneSpec::from_json(dup).is_err());
    }

    fn passes(n: usize) -> Vec<Point3> {
        // alternate between a point inside the trigger zone and one far away
        (0..2 * n).map(|i| if i % 2 == 0 { p(0., 0., 0.) } else { p(-1e3, 0., 0.) }).collect()
    }

    #[test]
    fn perfect_aim() {
        let scene = one_target(p(8., 0., 0.), 0.5);
        let aim = AimModel::new(0.0, 10.0).unwrap();
        let tally = run_ray_task(&passes(25), &aim, 7, &scene).unwrap();
        assert_eq!(tally, RayTally { attempts: 25, hits: 25 });
        assert_eq!(tally.accuracy(), 1.0);
    }

    #[test]
    fn ray_task_is_reproducible() {
        let scene = one_target(p(8., 0., 0.), 0.5);
        let aim = AimModel::new(0.1, 10.0).unwrap();
        let a = run_ray_task(&passes(500), &aim, 42, &scene).unwrap();
        let b = run_ray_task(&passes(500), &aim, 42, &scene).unwrap();
        assert_eq!(a, b);
        assert!(a.hits > 0 && a.hits < a.attempts);
    }

    #[test]
    fn ray_task_errors() {
        let aim = AimModel::default();
        assert!(run_ray_task(&passes(1), &aim, 0, &SceneSpec::empty(1.0)).is_err());
        assert!(AimModel::new(-0.1, 1.0).is_err());
        assert!(AimModel::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn isotropic_aim_matches_solid_angle() {
        // cone half-angle asin(r/d): hit fraction (1 - cos α) / 2
        let (d, r) = (4.0, 1.0);
        let scene = one_target(p(d, 0., 0.), r);
        let aim = AimModel::new(f64::INFINITY, 10.0).unwrap();
        let n = 100_000;
        let tally = run_ray_task(&passes(n), &aim, 3, &scene).unwrap();
        let alpha = (r / d).asin();
        let expected = (1.0 - alpha.cos()) / 2.0;
        let sd = (expected * (1.0 - expected) / n as f64).sqrt();
        assert!((tally.accuracy() - expected).abs() < 5.0 * sd, "{} vs {expected}", tally.accuracy());
    }

    #[test]
    fn determinism_and_simulate() {
        let curve = PathCurve::new(
            CurveKind::CatmullRom,
            vec![p(0., 0., 0.), p(10., 5., 0.), p(20., 0., 3.), p(30., 4., 1.)],
            Tension::DEFAULT,
        )
        .unwrap();
        let profile = SpeedProfile::new(vec![1.0, 2.0, 1.5, 1.0]).unwrap();
        let mut scene = one_target(p(15., 10., 0.), 2.0);
        scene.obstacles.push(Obstacle { center: p(10., 5., 0.), radius: 1.0 });
        let aim = AimModel::new(0.2, 6.0).unwrap();
        let a = simulate(&curve, &profile, &scene, 0.05, &aim, 9).unwrap();
        let b = simulate(&curve, &profile, &scene, 0.05, &aim, 9).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert_eq!(a.collisions, 1);
        assert_eq!(a.ray_attempts, 1);
        assert!(a.ray_hits <= a.ray_attempts);
    }

    #[test]
    fn halving_dt_is_stable() {
        let curve = PathCurve::catmull_rom(
            vec![p(0., 0., 0.), p(10., 5., 0.), p(20., 0., 3.), p(30., 4., 1.)],
            Tension::DEFAULT,
        )
        .unwrap();
        let profile = SpeedProfile::new(vec![1.0, 2.0, 1.5, 1.0]).unwrap();
        let mut scene = SceneSpec::empty(0.3);
        scene.obstacles.push(Obstacle { center: p(10., 5., 0.), radius: 1.0 });
        scene.obstacles.push(Obstacle { center: p(20., 0.5, 3.), radius: 2.0 });
        let mut dt = 0.1;
        let base = traverse(&curve, &profile, &scene, dt).unwrap();
        for _ in 0..4 {
            let finer = traverse(&curve, &profile, &scene, dt / 2.0).unwrap();
            assert!((finer.time_used - base.time_used).abs() < dt);
            assert_eq!(finer.collisions, base.collisions);
            dt /= 2.0;
        }
        assert_eq!(base.collisions, 2);
    }

    #[test]
    fn trajectory_views() {
        let curve = straight();
        let (_, traj) =
            traverse_recorded(&curve, &SpeedProfile::uniform(1.0, 2).unwrap(), &SceneSpec::empty(0.5), 1.0).unwrap();
        assert_eq!(traj.samples.len(), 11);
        let views = traj.view_directions(&curve, crate::camera::ViewModel::Tangent).unwrap();
        assert!(views.iter().all(|v| v.distance(p(1., 0., 0.)) < 1e-12));
        assert_eq!(traj.samples.last().unwrap().s, 1.0);
    }
}
