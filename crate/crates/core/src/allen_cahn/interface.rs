use std::collections::HashMap;

use super::{Geometry, ScalarField};
use crate::error::{Error, Result};

/// A zero-level curve; `closed` curves repeat no point at the end.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    pub points: Vec<[f64; 2]>,
    pub closed: bool,
}

impl Polyline {
    /// Shoelace area (closed curves only; zero otherwise).
    pub fn area(&self) -> f64 {
        if !self.closed || self.points.len() < 3 {
            return 0.0;
        }
        let n = self.points.len();
        let twice: f64 = (0..n)
            .map(|i| {
                let (p, q) = (self.points[i], self.points[(i + 1) % n]);
                p[0] * q[1] - q[0] * p[1]
            })
            .sum();
        0.5 * twice.abs()
    }
}

/// The zero level set of a field.
#[derive(Debug, Clone, PartialEq)]
pub enum Interface {
    Radius(f64),
    Polylines(Vec<Polyline>),
}

impl Interface {
    /// Radius of the front: exact for radial fields; for curves, the radius
    /// of the disc with the area of the largest closed component, or the
    /// mean distance of the points from the origin when no curve is closed.
    pub fn radius(&self) -> f64 {
        match self {
            Interface::Radius(r) => *r,
            Interface::Polylines(lines) => {
                let area = lines.iter().map(Polyline::area).fold(0.0, f64::max);
                if area > 0.0 {
                    return (area / std::f64::consts::PI).sqrt();
                }
                let (sum, count) = lines
                    .iter()
                    .flat_map(|l| l.points.iter())
                    .fold((0.0, 0usize), |(s, c), p| (s + p[0].hypot(p[1]), c + 1));
                sum / count as f64
            }
        }
    }

    /// Sup-norm extent of the front: its radius, or the largest coordinate
    /// magnitude over all curve points.
    pub fn outer_extent(&self) -> f64 {
        match self {
            Interface::Radius(r) => *r,
            Interface::Polylines(lines) => lines
                .iter()
                .flat_map(|l| l.points.iter())
                .fold(0.0, |m, p| m.max(p[0].abs()).max(p[1].abs())),
        }
    }
}

#[inline]
fn positive(v: f64) -> bool {
    v >= 0.0
}

/// Zero level of `field`: linear interpolation at the first sign change in
/// `r` for radial grids, marching squares on the node grid for rect grids.
pub fn extract_interface(field: &ScalarField) -> Result<Interface> {
    let u = field.values();
    match *field.geometry() {
        Geometry::Radial { dr, .. } => {
            for i in 0..u.len().saturating_sub(1) {
                if positive(u[i]) != positive(u[i + 1]) {
                    let t = u[i] / (u[i] - u[i + 1]);
                    return Ok(Interface::Radius((i as f64 + 0.5 + t) * dr));
                }
            }
            Err(Error::NoInterface)
        }
        Geometry::Rect2d { nx, ny, h, x_min, y_min } => {
            let lines = marching_squares(u, nx, ny, h, x_min, y_min);
            if lines.is_empty() {
                Err(Error::NoInterface)
            } else {
                Ok(Interface::Polylines(lines))
            }
        }
    }
}

/// Edge of the node grid: horizontal `(0, i, j)` joins nodes `(i, j)` and
/// `(i + 1, j)`, vertical `(1, i, j)` joins `(i, j)` and `(i, j + 1)`.
type EdgeKey = (u8, usize, usize);

fn marching_squares(u: &[f64], nx: usize, ny: usize, h: f64, x_min: f64, y_min: f64) -> Vec<Polyline> {
    let at = |i: usize, j: usize| u[j * nx + i];
    let mut segments: Vec<[EdgeKey; 2]> = Vec::new();
    for j in 0..ny.saturating_sub(1) {
        for i in 0..nx.saturating_sub(1) {
            let v = [at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)];
            let s = v.map(positive);
            let bottom = (0u8, i, j);
            let right = (1u8, i + 1, j);
            let top = (0u8, i, j + 1);
            let left = (1u8, i, j);
            let mut crossed = Vec::with_capacity(4);
            if s[0] != s[1] {
                crossed.push(bottom);
            }
            if s[1] != s[2] {
                crossed.push(right);
            }
            if s[2] != s[3] {
                crossed.push(top);
            }
            if s[3] != s[0] {
                crossed.push(left);
            }
            match crossed.len() {
                2 => segments.push([crossed[0], crossed[1]]),
                4 => {
                    // saddle: the center average decides which diagonal connects
                    let center = positive(0.25 * (v[0] + v[1] + v[2] + v[3]));
                    if center == s[0] {
                        segments.push([bottom, right]);
                        segments.push([top, left]);
                    } else {
                        segments.push([left, bottom]);
                        segments.push([right, top]);
                    }
                }
                _ => {}
            }
        }
    }

    let point = |e: EdgeKey| -> [f64; 2] {
        let (dir, i, j) = e;
        let (v0, v1) = if dir == 0 { (at(i, j), at(i + 1, j)) } else { (at(i, j), at(i, j + 1)) };
        let t = v0 / (v0 - v1);
        let x = x_min + (i as f64 + 0.5) * h;
        let y = y_min + (j as f64 + 0.5) * h;
        if dir == 0 {
            [x + t * h, y]
        } else {
            [x, y + t * h]
        }
    };

    let mut by_edge: HashMap<EdgeKey, Vec<usize>> = HashMap::new();
    for (k, s) in segments.iter().enumerate() {
        for e in s {
            by_edge.entry(*e).or_default().push(k);
        }
    }
    let mut used = vec![false; segments.len()];
    let mut lines = Vec::new();

    let walk = |start_seg: usize, start_edge: EdgeKey, used: &mut Vec<bool>| -> (Vec<[f64; 2]>, bool) {
        let mut pts = vec![point(start_edge)];
        let (mut seg, mut edge) = (start_seg, start_edge);
        loop {
            used[seg] = true;
            let s = segments[seg];
            let next = if s[0] == edge { s[1] } else { s[0] };
            if next == start_edge {
                return (pts, true);
            }
            pts.push(point(next));
            match by_edge[&next].iter().find(|&&k| !used[k]) {
                Some(&k) => {
                    seg = k;
                    edge = next;
                }
                None => return (pts, false),
            }
        }
    };

    // open curves start at edges touched by a single segment
    let mut starts: Vec<(EdgeKey, usize)> =
        by_edge.iter().filter(|(_, v)| v.len() == 1).map(|(e, v)| (*e, v[0])).collect();
    starts.sort_unstable();
    for (edge, seg) in starts {
        if !used[seg] {
            let (points, closed) = walk(seg, edge, &mut used);
            lines.push(Polyline { points, closed });
        }
    }
    for seg in 0..segments.len() {
        if !used[seg] {
            let (points, closed) = walk(seg, segments[seg][0], &mut used);
            lines.push(Polyline { points, closed });
        }
    }
    lines
}

/// `|| u - chi ||_{L^2}` by the midpoint rule, with `chi = -1` inside the
/// centered ball of radius `radius` and `+1` outside.
pub fn l2_distance_to_indicator(field: &ScalarField, radius: f64) -> f64 {
    let g = field.geometry();
    field
        .values()
        .iter()
        .enumerate()
        .map(|(k, &u)| {
            let chi = if g.radius_of(k) < radius { -1.0 } else { 1.0 };
            (u - chi) * (u - chi) * g.cell_measure(k)
        })
        .sum::<f64>()
        .sqrt()
}
