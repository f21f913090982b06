use std::path::Path;

use roamcurve::geo::{load_keypoints, Projection};
use roamcurve::report::{render_path_compare, smoothness_csv};
use roamcurve::Tension;

fn read(rel: &str) -> String {
    std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join(rel)).unwrap()
}

fn route() -> Vec<roamcurve::KeyPoint> {
    load_keypoints(&read("../../data/route.csv")).unwrap()
}

#[test]
fn route_compare_svg_matches_golden() {
    let svg = render_path_compare(&route(), Tension::DEFAULT, 32).unwrap();
    assert_eq!(svg, read("tests/golden/route_compare.svg"));
}

#[test]
fn route_smoothness_matches_golden() {
    let csv = smoothness_csv(&route(), Projection::Raw, Tension::DEFAULT, 32).unwrap();
    assert_eq!(csv, read("tests/golden/route_smoothness.csv"));
}

/// In the catmull_rom panel every keypoint marker sits on a vertex of the
/// drawn curve; in the bezier panel only the two end markers do.
#[test]
fn interpolating_panel_passes_through_markers() {
    let svg = read("tests/golden/route_compare.svg");
    let doc = roxmltree::Document::parse(&svg).unwrap();
    let panels: Vec<_> = doc.descendants().filter(|n| n.attribute("class") == Some("panel")).collect();
    assert_eq!(panels.len(), 3);
    let on_curve = |panel: &roxmltree::Node| -> usize {
        let line = panel.descendants().find(|n| n.has_tag_name("polyline")).unwrap();
        let vertices: Vec<&str> = line.attribute("points").unwrap().split(' ').collect();
        panel
            .descendants()
            .filter(|n| n.has_tag_name("circle"))
            .filter(|c| {
                vertices.contains(&format!("{},{}", c.attribute("cx").unwrap(), c.attribute("cy").unwrap()).as_str())
            })
            .count()
    };
    assert_eq!(on_curve(&panels[0]), 6);
    assert_eq!(on_curve(&panels[1]), 2);
    assert_eq!(on_curve(&panels[2]), 6);
}
