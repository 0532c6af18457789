//! SVG rendering: rays as polylines, punctures as circles, branch vertices as
//! three-pronged crosses, region labels at the centroid of their corners.

use super::graph::StokesGraph;
use super::Geometry;
use std::f64::consts::TAU;
use std::fmt::Write;

const SIZE: f64 = 600.0;

/// Straight-line layout when no traced geometry is available.
fn fallback(g: &StokesGraph) -> Geometry {
    let np = g.poles.len() as f64;
    let nb = g.branches.len() as f64;
    let punctures = (0..g.poles.len())
        .map(|i| {
            let a = TAU * i as f64 / np;
            Some([a.cos(), a.sin()])
        })
        .collect::<Vec<_>>();
    let zeros = (0..g.branches.len())
        .map(|i| {
            let a = TAU * (i as f64 + 0.5) / nb;
            [0.45 * a.cos(), 0.45 * a.sin()]
        })
        .collect::<Vec<_>>();
    let rays = g
        .rays
        .iter()
        .map(|r| vec![zeros[r.branch], punctures[r.pole].expect("finite layout")])
        .collect();
    Geometry { punctures, zeros, rays }
}

pub fn render(g: &StokesGraph, geometry: Option<&Geometry>) -> String {
    let owned;
    let geo = match geometry {
        Some(x) => x,
        None => {
            owned = fallback(g);
            &owned
        }
    };
    let anchors: Vec<[f64; 2]> = geo.punctures.iter().flatten().copied().chain(geo.zeros.iter().copied()).collect();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for p in &anchors {
        x0 = x0.min(p[0]);
        x1 = x1.max(p[0]);
        y0 = y0.min(p[1]);
        y1 = y1.max(p[1]);
    }
    let span = (x1 - x0).max(y1 - y0).max(1e-9);
    let (cx, cy) = ((x0 + x1) / 2.0, (y0 + y1) / 2.0);
    let scale = SIZE / (1.8 * span);
    let map = |p: [f64; 2]| (SIZE / 2.0 + (p[0] - cx) * scale, SIZE / 2.0 - (p[1] - cy) * scale);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (i, pts) in geo.rays.iter().enumerate() {
        let coords: Vec<String> = pts
            .iter()
            .map(|&p| map(p))
            .filter(|(x, y)| x.abs() < 10.0 * SIZE && y.abs() < 10.0 * SIZE)
            .map(|(x, y)| format!("{x:.2},{y:.2}"))
            .collect();
        let _ = writeln!(s, r#"<polyline id="ray{i}" points="{}" fill="none" stroke="black" stroke-width="1.2"/>"#, coords.join(" "));
    }
    for (i, p) in geo.punctures.iter().enumerate() {
        match p {
            Some(p) => {
                let (x, y) = map(*p);
                let _ = writeln!(s, r#"<circle cx="{x:.2}" cy="{y:.2}" r="6" fill="white" stroke="black" stroke-width="1.5"/>"#);
                let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-size="12">p{i}</text>"#, x + 8.0, y - 8.0);
            }
            None => {
                let _ = writeln!(s, r#"<text x="8" y="18" font-size="12">p{i} = ∞</text>"#);
            }
        }
    }
    for (b, z) in geo.zeros.iter().enumerate() {
        let (x, y) = map(*z);
        for k in 0..3 {
            let a = TAU * k as f64 / 3.0 + TAU / 4.0;
            let _ = writeln!(
                s,
                r#"<line x1="{x:.2}" y1="{y:.2}" x2="{:.2}" y2="{:.2}" stroke="crimson" stroke-width="2"/>"#,
                x + 7.0 * a.cos(),
                y - 7.0 * a.sin()
            );
        }
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-size="10" fill="crimson">b{b}</text>"#, x + 6.0, y + 14.0);
    }
    for (i, r) in g.regions.iter().enumerate() {
        let mut pts: Vec<[f64; 2]> = r.branches.iter().map(|&b| geo.zeros[b]).collect();
        pts.extend(r.poles.iter().filter_map(|&p| geo.punctures[p]));
        let c = pts.iter().fold([0.0, 0.0], |a, p| [a[0] + p[0], a[1] + p[1]]);
        let (x, y) = map([c[0] / pts.len() as f64, c[1] / pts.len() as f64]);
        let _ = writeln!(s, r#"<text x="{x:.2}" y="{y:.2}" font-size="11" fill="steelblue">U{i}</text>"#);
    }
    s.push_str("</svg>\n");
    s
}
