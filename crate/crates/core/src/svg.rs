//! SVG pictures of the real slice of a bundle.
//!
//! Only `svg`, `g`, `path`, `line` and `circle` elements are produced.
//! Mirrors and body arcs become paths, orbit and trajectory edges become
//! lines and reflection points become small circles. Vertices with complex
//! coordinates are drawn at their real parts; isotropic edges get a dashed
//! style so they are not mistaken for real segments.

use std::fmt::Write as _;

use crate::bundle::OutputBundle;
use crate::error::{Error, Result};
use crate::invisibility::Body;
use crate::mirrors::{Mirror, MirrorSpec};
use crate::orbits::{classify_points, EdgeTag};
use crate::projective::PPoint;
use crate::C64;

const WIDTH: f64 = 640.0;

#[derive(Debug, Clone, Copy)]
struct View {
    x0: f64,
    y0: f64,
    x1: f64,
    y1: f64,
}

impl View {
    fn from_points(pts: &[[f64; 2]]) -> View {
        if pts.is_empty() {
            return View {
                x0: -2.0,
                y0: -2.0,
                x1: 2.0,
                y1: 2.0,
            };
        }
        let (mut x0, mut y0, mut x1, mut y1) = (
            f64::INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::NEG_INFINITY,
        );
        for p in pts {
            x0 = x0.min(p[0]);
            x1 = x1.max(p[0]);
            y0 = y0.min(p[1]);
            y1 = y1.max(p[1]);
        }
        let pad = 0.15 * (x1 - x0).max(y1 - y0).max(1.0);
        View {
            x0: x0 - pad,
            y0: y0 - pad,
            x1: x1 + pad,
            y1: y1 + pad,
        }
    }

    fn scale(&self) -> f64 {
        WIDTH / (self.x1 - self.x0)
    }

    fn height(&self) -> f64 {
        (self.y1 - self.y0) * self.scale()
    }

    fn map(&self, p: [f64; 2]) -> (f64, f64) {
        (
            (p[0] - self.x0) * self.scale(),
            (self.y1 - p[1]) * self.scale(),
        )
    }

    /// Generous neighbourhood used to clip curves.
    fn near(&self, p: [f64; 2]) -> bool {
        let w = self.x1 - self.x0;
        let h = self.y1 - self.y0;
        p[0] > self.x0 - w && p[0] < self.x1 + w && p[1] > self.y0 - h && p[1] < self.y1 + h
    }
}

fn real_part(p: &PPoint) -> Option<[f64; 2]> {
    let (x, y) = p.to_affine().ok()?;
    let q = [x.re, y.re];
    (q[0].is_finite() && q[1].is_finite()).then_some(q)
}

fn path_data(view: &View, runs: &[Vec<[f64; 2]>]) -> String {
    let mut d = String::new();
    for run in runs.iter().filter(|r| r.len() >= 2) {
        for (i, p) in run.iter().enumerate() {
            let (x, y) = view.map(*p);
            let _ = write!(d, "{}{x:.3} {y:.3} ", if i == 0 { "M" } else { "L" });
        }
    }
    d.trim_end().to_string()
}

/// Real points of a curve split into connected runs.
fn curve_runs(m: &Mirror, view: &View) -> Vec<Vec<[f64; 2]>> {
    let mut runs: Vec<Vec<[f64; 2]>> = Vec::new();
    let mut cur: Vec<[f64; 2]> = Vec::new();
    let jump = 0.1 * (view.x1 - view.x0).max(view.y1 - view.y0);
    let mut flush = |cur: &mut Vec<[f64; 2]>| {
        if cur.len() >= 2 {
            runs.push(std::mem::take(cur));
        }
        cur.clear();
    };
    if let Some(param) = m.param() {
        let n = 1440;
        for i in 1..n {
            // s = tan(θ/2) sweeps the whole real parameter line
            let theta = -std::f64::consts::PI + 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            let [x, y, t] = param.coords(C64::new((theta / 2.0).tan(), 0.0));
            let ok =
                t.norm() > 1e-12 * (x.norm() + y.norm()) && view.near([(x / t).re, (y / t).re]);
            if !ok {
                flush(&mut cur);
                continue;
            }
            let p = [(x / t).re, (y / t).re];
            if cur
                .last()
                .is_some_and(|q| (q[0] - p[0]).hypot(q[1] - p[1]) > jump)
            {
                flush(&mut cur);
            }
            cur.push(p);
        }
        flush(&mut cur);
        return runs;
    }
    // no parametrization: real roots in y along vertical lines
    let cols = 480;
    let mut open: Vec<Vec<[f64; 2]>> = Vec::new();
    for c in 0..=cols {
        let x = view.x0 + (view.x1 - view.x0) * c as f64 / cols as f64;
        let ys: Vec<f64> = m
            .poly()
            .in_y_at(C64::new(x, 0.0))
            .roots()
            .into_iter()
            .filter(|y| y.im.abs() < 1e-7 * (1.0 + y.re.abs()))
            .map(|y| y.re)
            .filter(|y| view.near([x, *y]))
            .collect();
        let mut next_open = Vec::new();
        let pts: Vec<[f64; 2]> = ys.iter().map(|y| [x, *y]).collect();
        for p in &pts {
            let hit = open.iter().position(|run| {
                run.last()
                    .is_some_and(|q| (q[1] - p[1]).abs() < jump && q[0] < p[0])
            });
            match hit {
                Some(i) => {
                    let mut run = open.swap_remove(i);
                    run.push(*p);
                    next_open.push(run);
                }
                None => next_open.push(vec![*p]),
            }
        }
        runs.extend(open.drain(..).filter(|r| r.len() >= 2));
        open = next_open;
    }
    runs.extend(open.into_iter().filter(|r| r.len() >= 2));
    runs
}

fn edge_class(tag: Option<EdgeTag>) -> &'static str {
    match tag {
        Some(EdgeTag::ThroughI1) | Some(EdgeTag::ThroughI2) => "edge isotropic",
        _ => "edge",
    }
}

fn polygon_lines(out: &mut String, view: &View, pts: &[PPoint]) {
    let tags = classify_points(pts).ok();
    let k = pts.len();
    for j in 0..k {
        let (Some(a), Some(b)) = (real_part(&pts[j]), real_part(&pts[(j + 1) % k])) else {
            continue;
        };
        let (x1, y1) = view.map(a);
        let (x2, y2) = view.map(b);
        let class = edge_class(tags.as_ref().map(|t| t[j]));
        let dash = if class.contains("isotropic") {
            " stroke-dasharray=\"6 4\""
        } else {
            ""
        };
        let _ = writeln!(
            out,
            "    <line class=\"{class}\" x1=\"{x1:.3}\" y1=\"{y1:.3}\" x2=\"{x2:.3}\" y2=\"{y2:.3}\"{dash}/>"
        );
    }
    for p in pts.iter().filter_map(real_part) {
        let (cx, cy) = view.map(p);
        let _ = writeln!(
            out,
            "    <circle class=\"vertex\" cx=\"{cx:.3}\" cy=\"{cy:.3}\" r=\"3\"/>"
        );
    }
}

/// Renders the real slice of a bundle as a standalone SVG document.
pub fn render_svg(bundle: &OutputBundle) -> Result<String> {
    if bundle.is_empty() {
        return Err(Error::InvalidArgument("nothing to render".into()));
    }
    let body = bundle.body.as_ref().map(Body::from_spec).transpose()?;
    let mut pts: Vec<[f64; 2]> = Vec::new();
    for o in &bundle.orbits {
        pts.extend(o.vertices.iter().filter_map(|v| real_part(&v.point)));
    }
    for c in bundle.chains() {
        pts.extend(c.vertices.iter().filter_map(real_part));
    }
    for t in &bundle.trajectories {
        pts.push(t.trajectory.input.origin);
        pts.extend(t.trajectory.points.iter().copied());
    }
    if let Some(b) = &body {
        let [x0, y0, x1, y1] = b.bbox();
        pts.push([x0, y0]);
        pts.push([x1, y1]);
    }
    let view = View::from_points(&pts);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{:.0}\" height=\"{:.0}\" viewBox=\"0 0 {:.3} {:.3}\">",
        WIDTH,
        view.height(),
        WIDTH,
        view.height()
    );

    let mirrors: Vec<Mirror> = bundle
        .mirrors
        .iter()
        .filter_map(|s: &MirrorSpec| Mirror::from_spec(s).ok())
        .collect();
    if !mirrors.is_empty() {
        out.push_str(
            "  <g class=\"mirrors\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\">\n",
        );
        for m in mirrors.iter().filter(|m| m.is_real()) {
            let d = path_data(&view, &curve_runs(m, &view));
            if !d.is_empty() {
                let _ = writeln!(
                    out,
                    "    <path class=\"mirror\" id=\"{}\" d=\"{d}\"/>",
                    xml_escape(&m.label)
                );
            }
        }
        out.push_str("  </g>\n");
    }
    if let Some(b) = &body {
        out.push_str("  <g class=\"body\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\">\n");
        for i in 0..b.arcs().len() {
            let d = path_data(&view, &[b.sample_arc(i, 96)]);
            let _ = writeln!(out, "    <path class=\"arc\" d=\"{d}\"/>");
        }
        out.push_str("  </g>\n");
    }
    if !bundle.orbits.is_empty() || bundle.chains().next().is_some() {
        out.push_str(
            "  <g class=\"orbits\" stroke=\"#1f5fa8\" fill=\"#1f5fa8\" stroke-width=\"1\">\n",
        );
        for o in &bundle.orbits {
            let vs: Vec<PPoint> = o.vertices.iter().map(|v| v.point).collect();
            polygon_lines(&mut out, &view, &vs);
        }
        for c in bundle.chains().filter(|c| c.closed) {
            polygon_lines(&mut out, &view, &c.vertices);
        }
        out.push_str("  </g>\n");
    }
    if !bundle.trajectories.is_empty() {
        out.push_str(
            "  <g class=\"trajectories\" stroke=\"#b03a2e\" fill=\"#b03a2e\" stroke-width=\"1\">\n",
        );
        let reach = 2.0 * ((view.x1 - view.x0).hypot(view.y1 - view.y0));
        for t in &bundle.trajectories {
            let tr = &t.trajectory;
            let class = if t.visibility.is_invisible() {
                "ray invisible"
            } else {
                "ray"
            };
            let mut segs: Vec<[[f64; 2]; 2]> = tr.segments.clone();
            if tr.segments.is_empty() {
                segs.push([tr.input.origin, tr.input.at(reach)]);
            } else {
                segs.push([tr.output.origin, tr.output.at(reach)]);
            }
            for [a, b] in segs {
                let (x1, y1) = view.map(a);
                let (x2, y2) = view.map(b);
                let _ = writeln!(
                    out,
                    "    <line class=\"{class}\" x1=\"{x1:.3}\" y1=\"{y1:.3}\" x2=\"{x2:.3}\" y2=\"{y2:.3}\"/>"
                );
            }
            for p in &tr.points {
                let (cx, cy) = view.map(*p);
                let _ = writeln!(
                    out,
                    "    <circle class=\"reflection\" cx=\"{cx:.3}\" cy=\"{cy:.3}\" r=\"3\"/>"
                );
            }
        }
        out.push_str("  </g>\n");
    }
    out.push_str("</svg>\n");
    Ok(out)
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::TracedRay;
    use crate::invisibility::{build_two_parabola_body, check_invisible, trace, vertical_ray};
    use crate::orbits::{solve_periodic, Billiard, SolveOptions};

    fn count(doc: &str, tag: &str) -> usize {
        let tree = roxmltree::Document::parse(doc).unwrap();
        tree.descendants()
            .filter(|n| n.tag_name().name() == tag)
            .count()
    }

    #[test]
    fn equilateral_orbit_picture() {
        let c = Mirror::circle("c", 0.0, 0.0, 1.0).unwrap();
        let b = Billiard::repeated(c.clone(), 3).unwrap();
        let init: Vec<_> = [5.0f64, 118.0, 243.0]
            .iter()
            .map(|d| {
                c.curve_point(PPoint::real(d.to_radians().cos(), d.to_radians().sin()))
                    .unwrap()
            })
            .collect();
        let o = solve_periodic(&b, 3, &init, &SolveOptions::default()).unwrap();
        let mut bundle = OutputBundle::new("solve");
        bundle.mirrors.push(c.to_spec());
        bundle.orbits.push(o);
        let doc = render_svg(&bundle).unwrap();
        assert_eq!(count(&doc, "path"), 1);
        assert_eq!(count(&doc, "line"), 3);
    }

    #[test]
    fn invisible_trajectory_picture() {
        let body = build_two_parabola_body(1.0).unwrap();
        let ray = vertical_ray(&body, 1.6);
        let mut bundle = OutputBundle::new("trace-invisible");
        bundle.body = Some(body.to_spec());
        bundle.trajectories.push(TracedRay {
            trajectory: trace(&body, &ray, 16),
            visibility: check_invisible(&body, &ray, 16),
        });
        let doc = render_svg(&bundle).unwrap();
        let tree = roxmltree::Document::parse(&doc).unwrap();
        let marks = tree
            .descendants()
            .filter(|n| n.attribute("class") == Some("reflection"))
            .count();
        assert_eq!(marks, 4);
    }

    #[test]
    fn empty_bundle_is_an_error() {
        assert!(render_svg(&OutputBundle::new("solve")).is_err());
    }

    #[test]
    fn cubic_without_parametrization() {
        // y² = x³ - x
        let poly = crate::poly::HPoly::from_terms(
            3,
            &[
                (0, 2, C64::new(1.0, 0.0)),
                (3, 0, C64::new(-1.0, 0.0)),
                (1, 0, C64::new(1.0, 0.0)),
            ],
        )
        .unwrap();
        let m = Mirror::new("e", poly, None).unwrap();
        let mut bundle = OutputBundle::new("solve");
        bundle.mirrors.push(m.to_spec());
        let doc = render_svg(&bundle).unwrap();
        assert_eq!(count(&doc, "path"), 1);
    }
}
