//! SVG pictures of tilings and density maps, and CSV export of frequencies.

use std::fmt::Write;

use crate::lattice::{Axis, LatticePoint};
use crate::sampler::{DensityMap, Tiling};

const SQRT3_2: f64 = 0.866_025_403_784_438_6;

/// Plane position of a lattice point; type-3 edges are horizontal and `x3` points up.
pub fn screen(p: LatticePoint) -> (f64, f64) {
    let [a, b, c] = p.0.map(|v| v as f64);
    ((a - b) * SQRT3_2, c - (a + b) / 2.0)
}

/// Corners of black triangle `b`.
pub fn black_corners(b: LatticePoint) -> [LatticePoint; 3] {
    let e = Axis::ALL.map(LatticePoint::unit);
    [b + e[0] + e[1], b + e[1] + e[2], b + e[0] + e[2]]
}

/// Centre of black triangle `b` on screen.
pub fn black_center(b: LatticePoint) -> (f64, f64) {
    let pts = black_corners(b).map(screen);
    ((pts[0].0 + pts[1].0 + pts[2].0) / 3.0, (pts[0].1 + pts[1].1 + pts[2].1) / 3.0)
}

/// The four corners of the lozenge covering black `b` and white `b + e_k`, in cyclic order.
pub fn lozenge(b: LatticePoint, k: Axis) -> [LatticePoint; 4] {
    let ek = LatticePoint::unit(k);
    let ei = LatticePoint::unit(k.next());
    let ej = LatticePoint::unit(k.next().next());
    [b + ek + ei, b + ei + ej, b + ek + ej, b + ek + ek]
}

/// Fill colours of the three orientations, indexed by axis.
pub const ORIENTATION_COLORS: [&str; 3] = ["#d95f02", "#1b9e77", "#7570b3"];

struct Canvas {
    body: String,
    min: (f64, f64),
    max: (f64, f64),
}

impl Canvas {
    fn new() -> Canvas {
        Canvas { body: String::new(), min: (f64::MAX, f64::MAX), max: (f64::MIN, f64::MIN) }
    }

    fn polygon(&mut self, pts: &[LatticePoint], fill: &str) {
        let mut attr = String::new();
        for p in pts {
            let (x, y) = screen(*p);
            self.min = (self.min.0.min(x), self.min.1.min(y));
            self.max = (self.max.0.max(x), self.max.1.max(y));
            let _ = write!(attr, "{:.4},{:.4} ", x, -y);
        }
        let _ = writeln!(self.body, r#"<polygon points="{}" fill="{fill}"/>"#, attr.trim_end());
    }

    fn finish(self, title: &str, scale: f64) -> String {
        let pad = 1.0;
        let (x0, y0) = (self.min.0 - pad, -self.max.1 - pad);
        let (w, h) = (self.max.0 - self.min.0 + 2.0 * pad, self.max.1 - self.min.1 + 2.0 * pad);
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.0}" height="{:.0}" viewBox="{x0:.4} {y0:.4} {w:.4} {h:.4}">"#,
            w * scale,
            h * scale
        );
        let _ = writeln!(out, "<title>{}</title>", escape(title));
        let _ = writeln!(out, r##"<g stroke="#222" stroke-width="{:.4}" stroke-linejoin="round">"##, 0.6 / scale);
        out.push_str(&self.body);
        out.push_str("</g>\n</svg>\n");
        out
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn scale_for(n: usize) -> f64 {
    (600.0 / (n as f64).sqrt().max(1.0)).clamp(4.0, 60.0)
}

/// One tiling, each lozenge coloured by orientation.
pub fn tiling_svg(tiling: &Tiling, title: &str) -> String {
    let mut c = Canvas::new();
    for (b, k) in tiling.orientations() {
        c.polygon(&lozenge(b, k), ORIENTATION_COLORS[k.index()]);
    }
    c.finish(title, scale_for(tiling.edges.len()))
}

/// How black triangles of a density map are shaded.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shading {
    /// Darkness proportional to the frequency of one orientation.
    Gray(Axis),
    /// Orientation colours mixed by frequency.
    Mix,
}

fn hex_rgb(s: &str) -> [f64; 3] {
    std::array::from_fn(|i| u8::from_str_radix(&s[1 + 2 * i..3 + 2 * i], 16).unwrap_or(0) as f64)
}

/// Density map drawn on the black triangles.
pub fn density_svg(map: &DensityMap, shading: Shading, title: &str) -> String {
    let mut c = Canvas::new();
    let palette = ORIENTATION_COLORS.map(hex_rgb);
    for (i, b) in map.blacks.iter().enumerate() {
        let fill = match shading {
            Shading::Gray(k) => {
                let v = (255.0 * (1.0 - map.frequency(i, k))).round() as u8;
                format!("#{v:02x}{v:02x}{v:02x}")
            }
            Shading::Mix => {
                let rgb: [f64; 3] = std::array::from_fn(|ch| {
                    Axis::ALL.iter().map(|&k| map.frequency(i, k) * palette[k.index()][ch]).sum::<f64>()
                });
                format!("#{:02x}{:02x}{:02x}", rgb[0].round() as u8, rgb[1].round() as u8, rgb[2].round() as u8)
            }
        };
        c.polygon(&black_corners(*b), &fill);
    }
    c.finish(title, scale_for(map.blacks.len()))
}

/// One row per black triangle: coordinates, screen position, counts and frequencies.
pub fn density_csv(map: &DensityMap) -> String {
    let mut out = String::from("b1,b2,b3,x,y,n1,n2,n3,f1,f2,f3,samples\n");
    for (i, b) in map.blacks.iter().enumerate() {
        let (x, y) = black_center(*b);
        let [n1, n2, n3] = map.counts[i];
        let f = Axis::ALL.map(|k| map.frequency(i, k));
        let _ = writeln!(
            out,
            "{},{},{},{x:.4},{y:.4},{n1},{n2},{n3},{:.6},{:.6},{:.6},{}",
            b.0[0], b.0[1], b.0[2], f[0], f[1], f[2], map.samples
        );
    }
    out
}

/// Tiling as an edge list, one `white -> black` pair per line.
pub fn tiling_text(tiling: &Tiling) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "volume {}", tiling.volume);
    for (w, b) in &tiling.edges {
        let _ = writeln!(out, "{w} {b}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Domain;
    use crate::tiling::minimal_tiling;

    #[test]
    fn lozenge_shares_the_edge_of_its_triangles() {
        let b = LatticePoint::new(0, 0, 0);
        for k in Axis::ALL {
            let l = lozenge(b, k);
            let corners = black_corners(b);
            assert_eq!(l.iter().filter(|p| corners.contains(p)).count(), 3);
            let w = b + LatticePoint::unit(k);
            let white: Vec<_> = Axis::ALL.iter().map(|&i| w + LatticePoint::unit(i)).collect();
            assert_eq!(l.iter().filter(|p| white.contains(p)).count(), 3);
        }
    }

    #[test]
    fn svg_has_one_polygon_per_tile() {
        let t = minimal_tiling(&Domain::hexagon(2, 2, 2)).unwrap();
        let svg = tiling_svg(&t, "h222");
        assert_eq!(svg.matches("<polygon").count(), 12);
        assert!(svg.starts_with("<svg"));
        assert!(tiling_text(&t).starts_with("volume 0\n"));
    }
}
