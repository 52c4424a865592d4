//! Bird's-eye SVG frames of a [`Snapshot`] and horizontal strips of frames
//! from a [`TrajectoryLog`].
//!
//! World metres map to page pixels at `Style::px_per_m`, with the y axis
//! flipped so North points up. Every drawn agent carries an element id of
//! the form `f<frame>-<agent>`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::geom2d::Vec2;
use crate::simulation::MapKind;
use crate::trajectory_log::{Snapshot, TrajectoryLog};

/// Lanes per road, two in each direction.
pub const LANES_PER_ROAD: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct Style {
    pub px_per_m: f64,
    /// World margin around the content, m.
    pub margin_m: f64,
    /// Horizontal space between frames of a strip, px.
    pub frame_gap_px: f64,
    /// Half-size of the view when a frame holds no agents, m.
    pub empty_half_extent_m: f64,
    pub vehicle_fill: String,
    pub escooter_fill: String,
    pub destination_fill: String,
}

impl Default for Style {
    fn default() -> Self {
        Self {
            px_per_m: 10.0,
            margin_m: 5.0,
            frame_gap_px: 20.0,
            empty_half_extent_m: 20.0,
            vehicle_fill: "#f2c12e".into(),
            escooter_fill: "#d62728".into(),
            destination_fill: "#1f5fd6".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Bounds {
    min: Vec2,
    max: Vec2,
}

impl Bounds {
    fn around(p: Vec2, r: f64) -> Self {
        Self {
            min: Vec2::new(p.x - r, p.y - r),
            max: Vec2::new(p.x + r, p.y + r),
        }
    }

    fn include(&mut self, p: Vec2) {
        self.min.x = self.min.x.min(p.x);
        self.min.y = self.min.y.min(p.y);
        self.max.x = self.max.x.max(p.x);
        self.max.y = self.max.y.max(p.y);
    }

    fn union(self, o: Bounds) -> Bounds {
        let mut b = self;
        b.include(o.min);
        b.include(o.max);
        b
    }

    fn grow(self, m: f64) -> Bounds {
        Bounds {
            min: Vec2::new(self.min.x - m, self.min.y - m),
            max: Vec2::new(self.max.x + m, self.max.y + m),
        }
    }
}

fn content_bounds(s: &Snapshot, style: &Style) -> Bounds {
    let mut b: Option<Bounds> = None;
    let mut add = |p: Vec2| match b.as_mut() {
        Some(b) => b.include(p),
        None => b = Some(Bounds { min: p, max: p }),
    };
    for v in &s.vehicles {
        for c in vehicle_corners(v) {
            add(c);
        }
    }
    if let Some(e) = &s.escooter {
        add(e.pos - Vec2::new(e.fov_radius, e.fov_radius));
        add(e.pos + Vec2::new(e.fov_radius, e.fov_radius));
    }
    if let Some(d) = s.destination {
        add(d);
    }
    match b {
        Some(b) => b.grow(style.margin_m),
        None => Bounds::around(Vec2::ZERO, style.empty_half_extent_m),
    }
}

fn vehicle_corners(v: &crate::trajectory_log::VehicleView) -> [Vec2; 4] {
    let c = Vec2::new(v.state.x, v.state.y);
    let (hl, hw) = (0.5 * v.length, 0.5 * v.width);
    [(hl, hw), (-hl, hw), (-hl, -hw), (hl, -hw)]
        .map(|(dx, dy)| c + Vec2::new(dx, dy).rotate(v.state.psi))
}

/// World-to-page mapping of one frame.
struct Page {
    origin_x: f64,
    bounds: Bounds,
    scale: f64,
}

impl Page {
    fn pt(&self, p: Vec2) -> (f64, f64) {
        (
            self.origin_x + (p.x - self.bounds.min.x) * self.scale,
            (self.bounds.max.y - p.y) * self.scale,
        )
    }

    fn width(&self) -> f64 {
        (self.bounds.max.x - self.bounds.min.x) * self.scale
    }

    fn height(&self) -> f64 {
        (self.bounds.max.y - self.bounds.min.y) * self.scale
    }
}

fn num(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

fn line(out: &mut String, page: &Page, a: Vec2, b: Vec2, class: &str) {
    let (x1, y1) = page.pt(a);
    let (x2, y2) = page.pt(b);
    let _ = writeln!(
        out,
        r#"<line class="{class}" x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
        num(x1),
        num(y1),
        num(x2),
        num(y2)
    );
}

/// Lane markings of a road along one axis. `along_x` draws an East-West
/// road; otherwise North-South. `gap` is the half-size of the junction box
/// left unmarked, or 0.
fn road(out: &mut String, page: &Page, lane_width: f64, along_x: bool, gap: f64) {
    let b = &page.bounds;
    let (lo, hi) = if along_x {
        (b.min.x, b.max.x)
    } else {
        (b.min.y, b.max.y)
    };
    let half = 0.5 * LANES_PER_ROAD as f64 * lane_width;
    let mut spans = vec![(lo, hi)];
    if gap > 0.0 {
        spans = vec![(lo, (-gap).max(lo)), (gap.min(hi), hi)];
    }
    for i in 0..=LANES_PER_ROAD {
        let offset = -half + i as f64 * lane_width;
        let class = if i == 0 || i == LANES_PER_ROAD {
            "road-edge"
        } else if 2 * i == LANES_PER_ROAD {
            "centre-line"
        } else {
            "lane-line"
        };
        for &(a, z) in &spans {
            if z <= a {
                continue;
            }
            let (p, q) = if along_x {
                (Vec2::new(a, offset), Vec2::new(z, offset))
            } else {
                (Vec2::new(offset, a), Vec2::new(offset, z))
            };
            line(out, page, p, q, class);
        }
    }
}

fn star_points(page: &Page, c: Vec2, outer_m: f64) -> String {
    let inner = 0.45 * outer_m;
    (0..10)
        .map(|k| {
            let r = if k % 2 == 0 { outer_m } else { inner };
            let a = 0.5 * PI + k as f64 * PI / 5.0;
            let (x, y) = page.pt(c + Vec2::from_heading(a) * r);
            format!("{},{}", num(x), num(y))
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn frame_body(out: &mut String, s: &Snapshot, idx: usize, page: &Page, style: &Style) {
    let fid = format!("f{idx}");
    let _ = writeln!(
        out,
        r#"<g id="{fid}" class="frame"><rect class="background" x="{}" y="0" width="{}" height="{}"/>"#,
        num(page.origin_x),
        num(page.width()),
        num(page.height())
    );

    let _ = writeln!(out, r#"<g id="{fid}-map" class="map {}">"#, s.map_kind);
    let half_road = 0.5 * LANES_PER_ROAD as f64 * s.lane_width;
    match s.map_kind {
        MapKind::StraightRoad => road(out, page, s.lane_width, false, 0.0),
        MapKind::Intersection => {
            road(out, page, s.lane_width, false, half_road);
            road(out, page, s.lane_width, true, half_road);
        }
    }
    out.push_str("</g>\n");

    for v in &s.vehicles {
        let pts = vehicle_corners(v)
            .iter()
            .map(|&c| {
                let (x, y) = page.pt(c);
                format!("{},{}", num(x), num(y))
            })
            .collect::<Vec<_>>()
            .join(" ");
        let _ = writeln!(
            out,
            r#"<polygon id="{fid}-{}" class="vehicle {}" fill="{}" points="{pts}"/>"#,
            xml_escape(&v.id),
            v.role,
            style.vehicle_fill
        );
    }

    if let Some(d) = s.destination {
        let _ = writeln!(
            out,
            r#"<polygon id="{fid}-destination" class="destination" fill="{}" points="{}"/>"#,
            style.destination_fill,
            star_points(page, d, 1.5)
        );
    }

    if let Some(e) = &s.escooter {
        let half = 0.5 * e.fov_angle.to_radians();
        let r_px = e.fov_radius * page.scale;
        let (ax, ay) = page.pt(e.pos);
        if half >= PI - 1e-12 {
            let _ = writeln!(
                out,
                r#"<circle id="{fid}-fov" class="fov" fill="{}" fill-opacity="0.2" cx="{}" cy="{}" r="{}"/>"#,
                style.escooter_fill,
                num(ax),
                num(ay),
                num(r_px)
            );
        } else {
            let (sx, sy) = page.pt(e.pos + Vec2::from_heading(e.fov_heading - half) * e.fov_radius);
            let (ex, ey) = page.pt(e.pos + Vec2::from_heading(e.fov_heading + half) * e.fov_radius);
            let large = u8::from(2.0 * half > PI);
            // Counterclockwise in the world is counterclockwise on the
            // flipped page too, which SVG calls sweep-flag 0.
            let _ = writeln!(
                out,
                r#"<path id="{fid}-fov" class="fov" fill="{}" fill-opacity="0.2" d="M {} {} L {} {} A {} {} 0 {large} 0 {} {} Z"/>"#,
                style.escooter_fill,
                num(ax),
                num(ay),
                num(sx),
                num(sy),
                num(r_px),
                num(r_px),
                num(ex),
                num(ey)
            );
        }
        let _ = writeln!(
            out,
            r#"<circle id="{fid}-escooter" class="escooter {}" fill="{}" cx="{}" cy="{}" r="{}"/>"#,
            e.mode,
            style.escooter_fill,
            num(ax),
            num(ay),
            num(0.6 * page.scale)
        );
        if s.collision {
            let k = 1.2 * page.scale;
            let _ = writeln!(
                out,
                r#"<path id="{fid}-collision" class="collision" stroke="black" stroke-width="3" fill="none" d="M {} {} L {} {} M {} {} L {} {}"/>"#,
                num(ax - k),
                num(ay - k),
                num(ax + k),
                num(ay + k),
                num(ax - k),
                num(ay + k),
                num(ax + k),
                num(ay - k)
            );
        }
    }

    let _ = writeln!(
        out,
        r#"<text id="{fid}-label" class="label" x="{}" y="20">t = {:.1} s</text>"#,
        num(page.origin_x + 8.0),
        s.t
    );
    out.push_str("</g>\n");
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

const STYLE_SHEET: &str = "<style>\
.background{fill:#ffffff;stroke:#888888}\
.road-edge{stroke:#333333;stroke-width:2}\
.lane-line{stroke:#999999;stroke-width:1;stroke-dasharray:8 6}\
.centre-line{stroke:#333333;stroke-width:1.5}\
.vehicle{stroke:#000000;stroke-width:1}\
.label{font-family:sans-serif;font-size:16px}\
</style>\n";

fn document(frames: &[&Snapshot], style: &Style) -> String {
    let bounds = frames
        .iter()
        .map(|s| content_bounds(s, style))
        .reduce(Bounds::union)
        .expect("at least one frame");
    let pages: Vec<Page> = (0..frames.len())
        .map(|i| {
            let mut p = Page {
                origin_x: 0.0,
                bounds,
                scale: style.px_per_m,
            };
            p.origin_x = i as f64 * (p.width() + style.frame_gap_px);
            p
        })
        .collect();
    let last = pages.last().expect("at least one frame");
    let total_w = last.origin_x + last.width();
    let total_h = last.height();

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = num(total_w),
        h = num(total_h)
    );
    out.push_str(STYLE_SHEET);
    for (i, (s, page)) in frames.iter().zip(&pages).enumerate() {
        frame_body(&mut out, s, i, page, style);
    }
    out.push_str("</svg>\n");
    out
}

/// One bird's-eye frame.
pub fn render_frame(snapshot: &Snapshot, style: &Style) -> String {
    document(&[snapshot], style)
}

/// One frame per requested time, each showing the logged step nearest that
/// time, laid out left to right on a shared view.
pub fn render_strip(log: &TrajectoryLog, times: &[f64], style: &Style) -> Result<String> {
    if times.is_empty() {
        return Err(Error::Empty("no frame times requested"));
    }
    let frames = times
        .iter()
        .map(|&t| log.nearest(t))
        .collect::<Result<Vec<_>>>()?;
    Ok(document(&frames, style))
}
