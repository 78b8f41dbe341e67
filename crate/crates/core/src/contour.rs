//! Marching-squares level sets of node fields.

use alloc::vec::Vec;

use crate::curve::polygon_signed_area;
use crate::{Complex, ScalarGrid};

/// Polyline of a level set. Closed loops are oriented with the superlevel
/// set `{f ≥ level}` on their left, so loops around it are counterclockwise.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    pub points: Vec<Complex>,
    pub closed: bool,
}

impl Polyline {
    pub fn signed_area(&self) -> f64 {
        polygon_signed_area(&self.points)
    }
}

#[derive(Clone, Copy)]
enum Side {
    Bottom,
    Right,
    Top,
    Left,
}

/// All level-set polylines of `field` at `level`.
pub fn marching_squares(field: &ScalarGrid, level: f64) -> Vec<Polyline> {
    let (nx, ny) = (field.nx, field.ny);
    if nx < 2 || ny < 2 {
        return Vec::new();
    }
    let above = |i: usize, j: usize| field.get(i, j) >= level;
    // Edge ids: horizontal edge from node (i,j) is 2k, vertical edge is 2k+1.
    let edge_id = |i: usize, j: usize, side: Side| match side {
        Side::Bottom => 2 * (j * nx + i),
        Side::Top => 2 * ((j + 1) * nx + i),
        Side::Left => 2 * (j * nx + i) + 1,
        Side::Right => 2 * (j * nx + i + 1) + 1,
    };
    let crossing = |i: usize, j: usize, side: Side| {
        let (a, b) = match side {
            Side::Bottom => ((i, j), (i + 1, j)),
            Side::Right => ((i + 1, j), (i + 1, j + 1)),
            Side::Top => ((i + 1, j + 1), (i, j + 1)),
            Side::Left => ((i, j + 1), (i, j)),
        };
        let (va, vb) = (field.get(a.0, a.1), field.get(b.0, b.1));
        let t = if va == vb { 0.5 } else { ((level - va) / (vb - va)).clamp(0.0, 1.0) };
        let (za, zb) = (field.node(a.0, a.1), field.node(b.0, b.1));
        za + (zb - za) * t
    };

    let n_edges = 2 * nx * ny;
    let mut next_of: Vec<Option<usize>> = alloc::vec![None; n_edges];
    let mut has_incoming = alloc::vec![false; n_edges];
    let mut point_of: Vec<Option<Complex>> = alloc::vec![None; n_edges];

    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let corners = [above(i, j), above(i + 1, j), above(i + 1, j + 1), above(i, j + 1)];
            let sides = [Side::Bottom, Side::Right, Side::Top, Side::Left];
            // Crossings in counterclockwise order; `true` marks an exit
            // (inside → outside when walking around the cell).
            let mut cross: Vec<(Side, bool)> = Vec::with_capacity(4);
            for s in 0..4 {
                let (from, to) = (corners[s], corners[(s + 1) % 4]);
                if from != to {
                    cross.push((sides[s], from));
                }
            }
            if cross.is_empty() {
                continue;
            }
            let center_inside = if cross.len() == 4 {
                let mean = 0.25
                    * (field.get(i, j) + field.get(i + 1, j) + field.get(i + 1, j + 1) + field.get(i, j + 1));
                mean >= level
            } else {
                true
            };
            let m = cross.len();
            for (k, &(side, exit)) in cross.iter().enumerate() {
                if !exit {
                    continue;
                }
                let partner = if center_inside { cross[(k + 1) % m] } else { cross[(k + m - 1) % m] };
                let from = edge_id(i, j, side);
                let to = edge_id(i, j, partner.0);
                point_of[from].get_or_insert_with(|| crossing(i, j, side));
                point_of[to].get_or_insert_with(|| crossing(i, j, partner.0));
                next_of[from] = Some(to);
                has_incoming[to] = true;
            }
        }
    }

    let mut visited = alloc::vec![false; n_edges];
    let mut out = Vec::new();
    // Open chains first: they start at edges without an incoming segment.
    for start in 0..n_edges {
        if next_of[start].is_some() && !has_incoming[start] && !visited[start] {
            out.push(follow(start, &next_of, &point_of, &mut visited));
        }
    }
    for start in 0..n_edges {
        if next_of[start].is_some() && !visited[start] {
            out.push(follow(start, &next_of, &point_of, &mut visited));
        }
    }
    out
}

fn follow(
    start: usize,
    next_of: &[Option<usize>],
    point_of: &[Option<Complex>],
    visited: &mut [bool],
) -> Polyline {
    let mut points = Vec::new();
    let mut e = start;
    loop {
        visited[e] = true;
        if let Some(p) = point_of[e] {
            points.push(p);
        }
        match next_of[e] {
            Some(n) if n == start => return Polyline { points, closed: true },
            Some(n) if !visited[n] => e = n,
            Some(n) => {
                if let Some(p) = point_of[n] {
                    points.push(p);
                }
                return Polyline { points, closed: false };
            }
            None => return Polyline { points, closed: false },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn circle_level_set_is_one_ccw_loop() {
        let g = ScalarGrid::centered(1.0, 0.02).unwrap().from_fn(|z| 1.0 - z.norm_sqr());
        let lines = marching_squares(&g, 1.0 - 0.25);
        assert_eq!(lines.len(), 1);
        assert!(lines[0].closed);
        let a = lines[0].signed_area();
        assert!((a - PI * 0.25).abs() < 2e-3, "{a}");
    }

    #[test]
    fn saddle_cells_keep_loops_separate() {
        // two bumps touching diagonally
        let g = ScalarGrid::centered(1.0, 0.05).unwrap().from_fn(|z| {
            let a = (-(z - Complex::new(-0.3, -0.3)).norm_sqr() * 20.0).exp();
            let b = (-(z - Complex::new(0.3, 0.3)).norm_sqr() * 20.0).exp();
            a + b
        });
        let lines = marching_squares(&g, 0.5);
        assert_eq!(lines.iter().filter(|l| l.closed).count(), 2);
        assert!(lines.iter().all(|l| l.signed_area() > 0.0));
    }

    #[test]
    fn open_chains_end_at_grid_border() {
        let g = ScalarGrid::centered(1.0, 0.1).unwrap().from_fn(|z| z.re);
        let lines = marching_squares(&g, 0.05);
        assert_eq!(lines.len(), 1);
        assert!(!lines[0].closed);
    }
}
