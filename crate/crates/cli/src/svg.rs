//! SVG rendering of a developed strip in the Klein disk.

use std::fmt::Write;

use hypergeo::development::develop;
use hypergeo::hyperbolic::{PlaneIsometry, PlanePoint};
use hypergeo::solver::ClosedGeodesic;

/// Half-width of the view box, in disk units.
pub const VIEW: f64 = 1.05;

pub type Klein = (f64, f64);

/// Klein coordinates of everything drawn.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub triangles: Vec<[Klein; 3]>,
    /// Developed crossing points over one period, the last one being the
    /// holonomy image of the first.
    pub chord: Vec<Klein>,
    pub midpoints: Vec<Klein>,
}

/// The isometry that centres the developed period: its middle goes to the
/// origin and the chord to the x-axis.
pub fn centring(points: &[PlanePoint]) -> hypergeo::Result<PlaneIsometry> {
    let (first, last) = (points[0], points[points.len() - 1]);
    let mid = first.lerp(&last, 0.5)?;
    Ok(PlaneIsometry::frame(&mid, &mid.direction_to(&last)?).inverse())
}

/// Developed crossing points of `g` over one period, in the root chart.
pub fn developed_chord(g: &ClosedGeodesic) -> hypergeo::Result<Vec<PlanePoint>> {
    let dev = develop(&g.sequence, &g.metric)?;
    let mut pts = dev
        .developed_edges
        .iter()
        .zip(&g.crossings)
        .map(|(e, c)| e.point_at(c.t))
        .collect::<hypergeo::Result<Vec<_>>>()?;
    let h = dev.holonomy.expect("closed geodesics have cyclic sequences");
    pts.push(h.apply(&pts[0]));
    Ok(pts)
}

pub fn scene(g: &ClosedGeodesic, tol: f64) -> hypergeo::Result<Scene> {
    let dev = develop(&g.sequence, &g.metric)?;
    let chord = developed_chord(g)?;
    let centre = centring(&chord)?;
    let klein = |p: &PlanePoint| centre.apply(p).klein();
    let triangles = (0..dev.len()).map(|i| dev.triangle(i).map(|p| klein(&p))).collect();
    let midpoints = chord[..g.len()]
        .iter()
        .zip(&g.crossings)
        .filter(|(_, c)| (c.t - 0.5).abs() < tol)
        .map(|(p, _)| klein(p))
        .collect();
    Ok(Scene {
        triangles,
        chord: chord.iter().map(klein).collect(),
        midpoints,
    })
}

fn xy(p: Klein) -> String {
    format!("{:.9},{:.9}", p.0, -p.1)
}

pub fn render(scene: &Scene, title: &str) -> String {
    let mut s = String::new();
    let w = 2.0 * VIEW;
    writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="800" height="800" viewBox="{} {} {w} {w}">"#,
        -VIEW, -VIEW
    )
    .unwrap();
    writeln!(s, "<title>{title}</title>").unwrap();
    writeln!(s, r##"<circle cx="0" cy="0" r="1" fill="#fafafa" stroke="#444" stroke-width="0.004"/>"##).unwrap();
    writeln!(s, r##"<g class="faces" fill="none" stroke="#7a8fa6" stroke-width="0.002">"##).unwrap();
    for t in &scene.triangles {
        writeln!(s, r#"<polygon points="{} {} {}"/>"#, xy(t[0]), xy(t[1]), xy(t[2])).unwrap();
    }
    writeln!(s, "</g>").unwrap();
    let pts: Vec<String> = scene.chord.iter().map(|p| xy(*p)).collect();
    writeln!(
        s,
        r##"<polyline class="geodesic" points="{}" fill="none" stroke="#c0392b" stroke-width="0.004"/>"##,
        pts.join(" ")
    )
    .unwrap();
    writeln!(s, r##"<g class="midpoints" fill="#1b6e3a">"##).unwrap();
    for p in &scene.midpoints {
        writeln!(s, r#"<circle cx="{:.9}" cy="{:.9}" r="0.008"/>"#, p.0, -p.1).unwrap();
    }
    writeln!(s, "</g>").unwrap();
    writeln!(s, "</svg>").unwrap();
    s
}

/// Reads back the `points` of the geodesic polyline, in Klein coordinates.
pub fn parse_chord(svg: &str) -> Option<Vec<Klein>> {
    let line = svg.lines().find(|l| l.contains(r#"class="geodesic""#))?;
    let start = line.find(r#"points=""#)? + 8;
    let end = start + line[start..].find('"')?;
    line[start..end]
        .split_whitespace()
        .map(|pair| {
            let (x, y) = pair.split_once(',')?;
            Some((x.parse().ok()?, -y.parse::<f64>().ok()?))
        })
        .collect()
}
