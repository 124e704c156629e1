//! Flattens scenes to polylines, measures geometric distance between
//! flattened geometry, and renders SVG previews — the oracle for "what you
//! emit is what you drew".

use std::collections::HashMap;
use std::fmt::Write;

use thiserror::Error;

use crate::curves::{
    arrowhead, flatten_quad, rect_as_segments, ArrowStyle, FlattenPolicy, Polyline,
};
use crate::scalar::{cast, Scalar};
use crate::scene::{scene_bbox, Point, Primitive, Scene};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum FidelityError {
    #[error("scene contains no primitives")]
    EmptyScene,
    #[error("no geometry to compare")]
    EmptyGeometry,
    #[error("sample spacing must be finite and positive")]
    InvalidSpacing,
}

/// Flattens every primitive to polylines.
///
/// Segments become 2-point chains (plus two barb chains when arrowed, using
/// the default arrow style the emitter also uses), quadratics are sampled
/// per the policy, rectangles contribute their four edges, circles a
/// `circle_segments`-gon, and labels a single anchor point.
pub fn flatten_scene<T: Scalar>(scene: &Scene<T>, policy: &FlattenPolicy<T>) -> Vec<Polyline<T>> {
    let arrow_style = ArrowStyle::default();
    let mut out = Vec::new();
    for prim in &scene.primitives {
        match prim {
            Primitive::Segment { p0, p1, arrow } => {
                out.push(Polyline::new(vec![*p0, *p1]));
                if *arrow {
                    let direction = (p1.x - p0.x, p1.y - p0.y);
                    if let Ok((left, right)) = arrowhead(*p1, direction, &arrow_style) {
                        out.push(Polyline::new(vec![*p1, left]));
                        out.push(Polyline::new(vec![*p1, right]));
                    }
                }
            }
            Primitive::Rectangle {
                corner,
                width,
                height,
            } => {
                for (a, b) in rect_as_segments(*corner, *width, *height) {
                    out.push(Polyline::new(vec![a, b]));
                }
            }
            Primitive::Circle {
                center, diameter, ..
            } => {
                let r = *diameter / (T::one() + T::one());
                let n = policy.circle_segments;
                let tau = cast::<T>(2.0 * std::f64::consts::PI);
                let points = (0..=n)
                    .map(|k| {
                        let angle = tau * cast::<T>((k % n) as f64) / cast::<T>(n as f64);
                        Point::new(center.x + r * angle.cos(), center.y + r * angle.sin())
                    })
                    .collect();
                out.push(Polyline::new(points));
            }
            Primitive::QuadBezier { p0, c, p1 } => {
                out.push(flatten_quad(*p0, *c, *p1, policy));
            }
            Primitive::Label { anchor, .. } => {
                out.push(Polyline::new(vec![*anchor]));
            }
        }
    }
    out
}

/// Resamples a polyline set into a point cloud with at most `spacing`
/// arc length between consecutive samples on each edge.
fn resample<T: Scalar>(polylines: &[Polyline<T>], spacing: f64) -> Vec<(f64, f64)> {
    let mut points = Vec::new();
    for poly in polylines {
        if poly.is_empty() {
            continue;
        }
        let to_f = |p: &Point<T>| (p.x.to_f64().unwrap(), p.y.to_f64().unwrap());
        points.push(to_f(&poly.points[0]));
        for pair in poly.points.windows(2) {
            let a = to_f(&pair[0]);
            let b = to_f(&pair[1]);
            let len = (b.0 - a.0).hypot(b.1 - a.1);
            let n = (len / spacing).ceil().max(1.0) as usize;
            for k in 1..=n {
                let t = k as f64 / n as f64;
                points.push((a.0 + (b.0 - a.0) * t, a.1 + (b.1 - a.1) * t));
            }
        }
    }
    points
}

/// Uniform-grid index for nearest-point queries over a fixed point set.
struct GridIndex {
    cell: f64,
    cells: HashMap<(i64, i64), Vec<(f64, f64)>>,
}

impl GridIndex {
    fn build(points: &[(f64, f64)], cell: f64) -> Self {
        let mut cells: HashMap<(i64, i64), Vec<(f64, f64)>> = HashMap::new();
        for &p in points {
            cells.entry(Self::key(p, cell)).or_default().push(p);
        }
        GridIndex { cell, cells }
    }

    fn key(p: (f64, f64), cell: f64) -> (i64, i64) {
        ((p.0 / cell).floor() as i64, (p.1 / cell).floor() as i64)
    }

    /// Distance from `p` to the nearest indexed point, by expanding ring
    /// search: every point in a cell at Chebyshev ring `r+1` or beyond is at
    /// least `r * cell` away, so the search stops as soon as the best
    /// distance found is within that bound. The index is never empty, so a
    /// ring eventually hits an occupied cell and the loop terminates.
    fn nearest_distance(&self, p: (f64, f64)) -> f64 {
        let (cx, cy) = Self::key(p, self.cell);
        let mut best = f64::INFINITY;
        let mut ring: i64 = 0;
        loop {
            for dx in -ring..=ring {
                for dy in -ring..=ring {
                    if dx.abs().max(dy.abs()) != ring {
                        continue;
                    }
                    if let Some(points) = self.cells.get(&(cx + dx, cy + dy)) {
                        for q in points {
                            let d = (q.0 - p.0).hypot(q.1 - p.1);
                            if d < best {
                                best = d;
                            }
                        }
                    }
                }
            }
            if best <= (ring as f64) * self.cell {
                return best;
            }
            ring += 1;
        }
    }
}

fn directed_hausdorff(from: &[(f64, f64)], index: &GridIndex) -> f64 {
    from.iter()
        .map(|&p| index.nearest_distance(p))
        .fold(0.0, f64::max)
}

/// Symmetric Hausdorff distance between two polyline sets, computed over
/// point clouds resampled at `sample_spacing` arc-length intervals.
pub fn hausdorff<T: Scalar>(
    a: &[Polyline<T>],
    b: &[Polyline<T>],
    sample_spacing: T,
) -> Result<T, FidelityError> {
    let spacing = sample_spacing.to_f64().unwrap_or(f64::NAN);
    if !(spacing.is_finite() && spacing > 0.0) {
        return Err(FidelityError::InvalidSpacing);
    }
    let pa = resample(a, spacing);
    let pb = resample(b, spacing);
    if pa.is_empty() || pb.is_empty() {
        return Err(FidelityError::EmptyGeometry);
    }
    let ia = GridIndex::build(&pa, spacing.max(1e-9));
    let ib = GridIndex::build(&pb, spacing.max(1e-9));
    let d = directed_hausdorff(&pa, &ib).max(directed_hausdorff(&pb, &ia));
    Ok(cast(d))
}

fn xml_escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Renders a minimal SVG preview with the picture-to-screen flip
/// `y' = canvas_height - y` applied, one geometric element per primitive.
///
/// The viewBox height is exactly `canvas_height`, so re-importing the
/// preview restores the original geometry. `canvas_height` should be at
/// least the scene's top; geometry above it would land at negative screen
/// coordinates.
pub fn render_preview<T: Scalar>(
    scene: &Scene<T>,
    canvas_height: T,
) -> Result<String, FidelityError> {
    if scene.is_empty() {
        return Err(FidelityError::EmptyScene);
    }
    let bbox = scene_bbox(scene).map_err(|_| FidelityError::EmptyScene)?;
    let min_x = bbox.min.x.min(T::zero()).floor();
    let width = bbox.max.x.ceil() - min_x;
    let flip = |y: T| canvas_height - y;

    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{min_x} 0 {width} {canvas_height}\">"
    );
    if scene
        .primitives
        .iter()
        .any(|p| matches!(p, Primitive::Segment { arrow: true, .. }))
    {
        out.push_str("  <defs>\n");
        out.push_str(
            "    <marker id=\"arrow\" viewBox=\"0 0 10 8\" refX=\"9\" refY=\"4\" \
             markerWidth=\"8\" markerHeight=\"7\" orient=\"auto-start-reverse\">\n",
        );
        out.push_str("      <path d=\"M 0 0 L 10 4 L 0 8 Z\"/>\n");
        out.push_str("    </marker>\n");
        out.push_str("  </defs>\n");
    }
    for prim in &scene.primitives {
        match prim {
            Primitive::Segment { p0, p1, arrow } => {
                let marker = if *arrow {
                    " marker-end=\"url(#arrow)\""
                } else {
                    ""
                };
                let _ = writeln!(
                    out,
                    "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"{marker}/>",
                    p0.x,
                    flip(p0.y),
                    p1.x,
                    flip(p1.y),
                );
            }
            Primitive::Rectangle {
                corner,
                width,
                height,
            } => {
                let _ = writeln!(
                    out,
                    "  <rect x=\"{}\" y=\"{}\" width=\"{width}\" height=\"{height}\" \
                     fill=\"none\" stroke=\"black\"/>",
                    corner.x,
                    flip(corner.y + *height),
                );
            }
            Primitive::Circle {
                center,
                diameter,
                filled,
            } => {
                let fill = if *filled { "black" } else { "none" };
                let _ = writeln!(
                    out,
                    "  <circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{fill}\" stroke=\"black\"/>",
                    center.x,
                    flip(center.y),
                    *diameter / (T::one() + T::one()),
                );
            }
            Primitive::QuadBezier { p0, c, p1 } => {
                let _ = writeln!(
                    out,
                    "  <path d=\"M {} {} Q {} {} {} {}\" fill=\"none\" stroke=\"black\"/>",
                    p0.x,
                    flip(p0.y),
                    c.x,
                    flip(c.y),
                    p1.x,
                    flip(p1.y),
                );
            }
            Primitive::Label { anchor, text } => {
                let _ = writeln!(
                    out,
                    "  <text x=\"{}\" y=\"{}\">{}</text>",
                    anchor.x,
                    flip(anchor.y),
                    xml_escape(text),
                );
            }
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::svg::{import_svg, ImportOptions};

    type P = Point<f64>;

    fn policy() -> FlattenPolicy<f64> {
        FlattenPolicy::default()
    }

    #[test]
    fn flatten_counts() {
        let scene = Scene::new(vec![
            Primitive::Segment {
                p0: P::new(0.0, 0.0),
                p1: P::new(10.0, 0.0),
                arrow: false,
            },
            Primitive::QuadBezier {
                p0: P::new(0.0, 0.0),
                c: P::new(5.0, 10.0),
                p1: P::new(10.0, 0.0),
            },
            Primitive::Label {
                anchor: P::new(3.0, 4.0),
                text: "x".into(),
            },
        ]);
        let polys = flatten_scene(&scene, &policy());
        assert_eq!(polys.len(), 3);
        assert_eq!(polys[0].len(), 2);
        assert_eq!(polys[1].len(), 101);
        assert_eq!(polys[2].len(), 1);
    }

    #[test]
    fn flatten_arrow_is_three_polylines() {
        let scene = Scene::new(vec![Primitive::Segment {
            p0: P::new(0.0, 0.0),
            p1: P::new(10.0, 0.0),
            arrow: true,
        }]);
        let polys = flatten_scene(&scene, &policy());
        assert_eq!(polys.len(), 3);
        assert_eq!(polys[1].points[0], P::new(10.0, 0.0));
    }

    #[test]
    fn flatten_rectangle_is_four_edges() {
        let scene = Scene::new(vec![Primitive::Rectangle {
            corner: P::new(0.0, 0.0),
            width: 4.0,
            height: 2.0,
        }]);
        let polys = flatten_scene(&scene, &policy());
        assert_eq!(polys.len(), 4);
    }

    #[test]
    fn flatten_circle_polygon_closes() {
        let scene = Scene::new(vec![Primitive::Circle {
            center: P::new(0.0, 0.0),
            diameter: 10.0,
            filled: false,
        }]);
        let polys = flatten_scene(&scene, &policy());
        assert_eq!(polys[0].len(), 101);
        assert_eq!(polys[0].points[0], *polys[0].points.last().unwrap());
        for p in &polys[0].points {
            assert!((P::new(0.0, 0.0).distance(*p) - 5.0).abs() < 1e-9);
        }
    }

    #[test]
    fn hausdorff_identical_is_zero() {
        let polys = vec![Polyline::new(vec![P::new(0.0, 0.0), P::new(10.0, 3.0)])];
        assert_eq!(hausdorff(&polys, &polys, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn hausdorff_parallel_segments() {
        let a = vec![Polyline::new(vec![P::new(0.0, 0.0), P::new(10.0, 0.0)])];
        let b = vec![Polyline::new(vec![P::new(0.0, 3.0), P::new(10.0, 3.0)])];
        let d = hausdorff(&a, &b, 0.5).unwrap();
        assert!((d - 3.0).abs() < 1e-9, "d = {d}");
    }

    #[test]
    fn hausdorff_is_symmetric() {
        let a = vec![Polyline::new(vec![P::new(0.0, 0.0), P::new(10.0, 0.0)])];
        let b = vec![
            Polyline::new(vec![P::new(2.0, 1.0), P::new(8.0, 1.0)]),
            Polyline::new(vec![P::new(20.0, 5.0)]),
        ];
        let dab = hausdorff(&a, &b, 0.25).unwrap();
        let dba = hausdorff(&b, &a, 0.25).unwrap();
        assert_eq!(dab, dba);
        // The far point dominates: distance from (20,5) to the segment end.
        assert!((dab - (10.0f64.powi(2) + 25.0).sqrt()).abs() < 0.3);
    }

    #[test]
    fn hausdorff_segment_vs_its_quad_flattening() {
        let a = vec![Polyline::new(vec![P::new(0.0, 0.0), P::new(200.0, 100.0)])];
        let (p0, c, p1) = crate::curves::segment_as_quad(P::new(0.0, 0.0), P::new(200.0, 100.0));
        let b = vec![flatten_quad(p0, c, p1, &policy())];
        let d = hausdorff(&a, &b, 0.5).unwrap();
        assert!(d <= 0.25, "d = {d}");
    }

    #[test]
    fn hausdorff_rejects_degenerate_input() {
        let a = vec![Polyline::new(vec![P::new(0.0, 0.0)])];
        let empty: Vec<Polyline<f64>> = Vec::new();
        assert_eq!(
            hausdorff(&a, &empty, 0.5).unwrap_err(),
            FidelityError::EmptyGeometry
        );
        assert_eq!(
            hausdorff(&a, &a, 0.0).unwrap_err(),
            FidelityError::InvalidSpacing
        );
    }

    #[test]
    fn preview_flips_to_screen_space() {
        let scene = Scene::new(vec![Primitive::Label {
            anchor: P::new(10.0, 283.0),
            text: "Y".into(),
        }]);
        let svg = render_preview(&scene, 283.0).unwrap();
        assert!(svg.contains("<text x=\"10\" y=\"0\">Y</text>"), "{svg}");
    }

    #[test]
    fn preview_empty_scene_errors() {
        let scene: Scene<f64> = Scene::default();
        assert_eq!(
            render_preview(&scene, 10.0).unwrap_err(),
            FidelityError::EmptyScene
        );
    }

    #[test]
    fn preview_is_deterministic() {
        let scene = Scene::new(vec![Primitive::Circle {
            center: P::new(5.5, 7.25),
            diameter: 3.0,
            filled: true,
        }]);
        assert_eq!(
            render_preview(&scene, 20.0).unwrap(),
            render_preview(&scene, 20.0).unwrap()
        );
    }

    #[test]
    fn preview_reimports_to_same_geometry() {
        let scene = Scene::new(vec![
            Primitive::Segment {
                p0: P::new(1.0, 2.0),
                p1: P::new(30.0, 40.0),
                arrow: true,
            },
            Primitive::Rectangle {
                corner: P::new(5.0, 5.0),
                width: 10.0,
                height: 4.0,
            },
            Primitive::Circle {
                center: P::new(20.0, 20.0),
                diameter: 8.0,
                filled: false,
            },
            Primitive::QuadBezier {
                p0: P::new(0.0, 0.0),
                c: P::new(25.0, 50.0),
                p1: P::new(50.0, 0.0),
            },
            Primitive::Label {
                anchor: P::new(12.0, 34.0),
                text: "v".into(),
            },
        ]);
        let svg = render_preview(&scene, 50.0).unwrap();
        let (reimported, diags) = import_svg::<f64>(&svg, &ImportOptions::default()).unwrap();
        assert!(diags.is_empty(), "{diags:?}");
        assert_eq!(reimported.len(), scene.len());
        for (a, b) in scene.primitives.iter().zip(&reimported.primitives) {
            match (a, b) {
                (
                    Primitive::Segment { p0, p1, arrow },
                    Primitive::Segment {
                        p0: q0,
                        p1: q1,
                        arrow: ar,
                    },
                ) => {
                    assert!(p0.distance(*q0) < 1e-6 && p1.distance(*q1) < 1e-6);
                    assert_eq!(arrow, ar);
                }
                (
                    Primitive::Rectangle {
                        corner,
                        width,
                        height,
                    },
                    Primitive::Rectangle {
                        corner: c2,
                        width: w2,
                        height: h2,
                    },
                ) => {
                    assert!(corner.distance(*c2) < 1e-6);
                    assert!((width - w2).abs() < 1e-6 && (height - h2).abs() < 1e-6);
                }
                (
                    Primitive::Circle {
                        center, diameter, ..
                    },
                    Primitive::Circle {
                        center: c2,
                        diameter: d2,
                        ..
                    },
                ) => {
                    assert!(center.distance(*c2) < 1e-6 && (diameter - d2).abs() < 1e-6);
                }
                (
                    Primitive::QuadBezier { p0, c, p1 },
                    Primitive::QuadBezier {
                        p0: q0,
                        c: c2,
                        p1: q1,
                    },
                ) => {
                    assert!(
                        p0.distance(*q0) < 1e-6
                            && c.distance(*c2) < 1e-6
                            && p1.distance(*q1) < 1e-6
                    );
                }
                (
                    Primitive::Label { anchor, text },
                    Primitive::Label {
                        anchor: a2,
                        text: t2,
                    },
                ) => {
                    assert!(anchor.distance(*a2) < 1e-6);
                    assert_eq!(text, t2);
                }
                (a, b) => panic!("primitive kind changed: {a:?} vs {b:?}"),
            }
        }
    }
}
