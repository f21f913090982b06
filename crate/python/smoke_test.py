"""Smoke test for the roamcurve extension module.

Build and install first, e.g. from the repository root:

    maturin build --release -m crates/python/Cargo.toml -o dist
    pip install dist/roamcurve-*.whl
"""

import json
import pathlib

import roamcurve as rc

DATA = pathlib.Path(__file__).resolve().parent.parent / "data"


def main():
    kps = rc.load_keypoints((DATA / "route.csv").read_text())
    points = [k[:3] for k in kps]

    curve = rc.PathCurve("catmull_rom", points, 0.5)
    for k, p in enumerate(points):
        q = curve.eval(curve.knot_param(k))
        assert max(abs(a - b) for a, b in zip(p, q)) < 1e-9, (k, p, q)
    jump = curve.smoothness("tangent", 32).max_angular_jump
    stiff = rc.PathCurve("polyline", points).smoothness("next_node", 32).max_angular_jump
    assert jump < 1e-9 < 0.1 < stiff
    print(f"catmull_rom length {curve.length():.4f}, view jump {jump:.1e} rad vs polyline {stiff:.3f} rad")

    scene = (DATA / "scene_route.json").read_text()
    result = rc.simulate(curve, [k[3] for k in kps], scene, dt=1.0, sigma=0.05, seed=1)
    print(f"sim: time {result.time_used:.1f} s, collisions {result.collisions}, accuracy {result.accuracy:.2f}")

    report = json.loads(rc.analyze_study((DATA / "study_synthetic.csv").read_text(), seed=0))
    for pair in report["correlations"]:
        c = pair["correlation"]
        print(f"engagement vs {pair['y']}: {c['method']} r={c['r']:+.3f} p={c['p_value']:.2e}")

    svg = rc.render_path_compare(kps, 0.5, 16)
    assert svg.count('class="series"') == 6
    print("smoke test passed")


if __name__ == "__main__":
    main()
