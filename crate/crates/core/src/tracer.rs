//! Implicit-curve extraction for enclosure boundaries: marching squares
//! with bisection refinement on cell edges, segment stitching, component
//! counting, and the region-dominance raster.
//!
//! Fields are `Fn(Complex64) -> Option<f64>`; `None` marks masked points
//! (the essential spectrum for the k-dependent bound functions). Cells
//! with a masked corner are skipped, so boundary curves that meet the
//! spectrum are traced up to one cell away.

use num_complex::Complex64;
use rayon::prelude::*;
use std::collections::HashMap;

use crate::c64;
use crate::enclosures::{classify_topology, in_region_d_at, EnclosureKind, EnclosureSpec, TopologyClass};
use crate::error::{Error, Result};
use crate::resolvent::{t0_spectral_norm, t1_spectral_norm};
use crate::spectral_map::{dist_to_spectrum, k_from_lambda, kpoint_from_k, MassParam};

/// Rectangular evaluation grid: `nx` by `ny` nodes over the closed box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64, nx: usize, ny: usize) -> Result<Self> {
        if !(x_min < x_max && y_min < y_max)
            || !(x_min.is_finite() && x_max.is_finite() && y_min.is_finite() && y_max.is_finite())
        {
            return Err(Error::InvalidParam("grid box is degenerate".into()));
        }
        if nx < 8 || ny < 8 {
            return Err(Error::InvalidParam(format!(
                "grid needs nx, ny >= 8, got {nx} x {ny}"
            )));
        }
        Ok(Self { x_min, x_max, y_min, y_max, nx, ny })
    }

    /// Default box for enclosure tracing at mass m:
    /// `[-(sqrt(m^2+4)+1), sqrt(m^2+4)+1] x [-2, 2]`.
    pub fn default_for_mass(m: MassParam, nx: usize, ny: usize) -> Result<Self> {
        let e = m.band_edge() + 1.0;
        Self::new(-e, e, -2.0, 2.0, nx, ny)
    }

    #[inline]
    fn x(&self, i: usize) -> f64 {
        self.x_min + (self.x_max - self.x_min) * i as f64 / (self.nx - 1) as f64
    }

    #[inline]
    fn y(&self, j: usize) -> f64 {
        self.y_min + (self.y_max - self.y_min) * j as f64 / (self.ny - 1) as f64
    }

    pub fn cell_diagonal(&self) -> f64 {
        let dx = (self.x_max - self.x_min) / (self.nx - 1) as f64;
        let dy = (self.y_max - self.y_min) / (self.ny - 1) as f64;
        dx.hypot(dy)
    }

    pub fn box_diagonal(&self) -> f64 {
        (self.x_max - self.x_min).hypot(self.y_max - self.y_min)
    }
}

/// A set of traced polylines with closure flags and an optional per-point
/// boolean channel.
#[derive(Debug, Clone, Default)]
pub struct CurveSet {
    pub polylines: Vec<Vec<[f64; 2]>>,
    pub closed: Vec<bool>,
    pub flags: Option<Vec<Vec<bool>>>,
}

impl CurveSet {
    pub fn component_count(&self) -> usize {
        self.polylines.len()
    }

    pub fn total_points(&self) -> usize {
        self.polylines.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.polylines.is_empty()
    }

    /// Attach a per-point flag channel.
    pub fn with_flags(mut self, flag: impl Fn(Complex64) -> bool) -> Self {
        let flags = self
            .polylines
            .iter()
            .map(|pl| pl.iter().map(|p| flag(c64(p[0], p[1]))).collect())
            .collect();
        self.flags = Some(flags);
        self
    }
}

/// Trace the level set `F = level` on the grid by marching squares.
///
/// Crossing points are refined along cell edges by bisection until
/// `|F - level| <= refine_tol (1 + |level|)` (at most 60 halvings), saddle
/// cells are resolved by the cell-center sample, and segments are stitched
/// into polylines joining endpoints within `1e-9 *` box diagonal. An empty
/// result is a valid outcome, not an error; a non-finite field value off
/// the mask fails with [`Error::NonFinite`].
pub fn trace_level_set<F>(field: F, level: f64, grid: &Grid, refine_tol: f64) -> Result<CurveSet>
where
    F: Fn(Complex64) -> Option<f64> + Sync,
{
    let nx = grid.nx;
    let ny = grid.ny;
    // node values, row-parallel
    let values: Vec<Option<f64>> = (0..ny)
        .into_par_iter()
        .flat_map_iter(|j| (0..nx).map(move |i| (i, j)))
        .map(|(i, j)| field(c64(grid.x(i), grid.y(j))))
        .collect();
    for v in values.iter().flatten() {
        if !v.is_finite() {
            return Err(Error::NonFinite);
        }
    }
    let at = |i: usize, j: usize| values[j * nx + i];
    let tol = refine_tol * (1.0 + level.abs());

    // refine a crossing along the edge from a (value va) to b (value vb)
    let refine = |mut a: Complex64, mut va: f64, mut b: Complex64, mut vb: f64| -> [f64; 2] {
        for _ in 0..60 {
            if (va - level).abs() <= tol {
                return [a.re, a.im];
            }
            if (vb - level).abs() <= tol {
                return [b.re, b.im];
            }
            let mid = 0.5 * (a + b);
            match field(mid) {
                Some(vm) => {
                    if (va - level) * (vm - level) <= 0.0 {
                        b = mid;
                        vb = vm;
                    } else {
                        a = mid;
                        va = vm;
                    }
                }
                None => break,
            }
        }
        // best endpoint of the final bracket
        if (va - level).abs() <= (vb - level).abs() {
            [a.re, a.im]
        } else {
            [b.re, b.im]
        }
    };

    let mut segments: Vec<([f64; 2], [f64; 2])> = Vec::new();
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let (v00, v10, v11, v01) =
                match (at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)) {
                    (Some(a), Some(b), Some(c), Some(d)) => (a, b, c, d),
                    _ => continue, // masked cell
                };
            let mut case = 0u8;
            if v00 > level {
                case |= 1;
            }
            if v10 > level {
                case |= 2;
            }
            if v11 > level {
                case |= 4;
            }
            if v01 > level {
                case |= 8;
            }
            if case == 0 || case == 15 {
                continue;
            }
            let p00 = c64(grid.x(i), grid.y(j));
            let p10 = c64(grid.x(i + 1), grid.y(j));
            let p11 = c64(grid.x(i + 1), grid.y(j + 1));
            let p01 = c64(grid.x(i), grid.y(j + 1));
            let bottom = || refine(p00, v00, p10, v10);
            let right = || refine(p10, v10, p11, v11);
            let top = || refine(p01, v01, p11, v11);
            let left = || refine(p00, v00, p01, v01);
            match case {
                1 | 14 => segments.push((bottom(), left())),
                2 | 13 => segments.push((bottom(), right())),
                3 | 12 => segments.push((left(), right())),
                4 | 11 => segments.push((right(), top())),
                6 | 9 => segments.push((bottom(), top())),
                7 | 8 => segments.push((left(), top())),
                5 | 10 => {
                    // saddle: pair the crossings by the cell-center sample
                    let center = field(0.5 * (p00 + p11)).unwrap_or(level);
                    let center_high = center > level;
                    let high_at_00_11 = case == 5;
                    if high_at_00_11 == center_high {
                        segments.push((left(), bottom()));
                        segments.push((top(), right()));
                    } else {
                        segments.push((left(), top()));
                        segments.push((bottom(), right()));
                    }
                }
                _ => unreachable!(),
            }
        }
    }
    Ok(stitch(segments, 1e-9 * grid.box_diagonal()))
}

/// Join segments into polylines, merging endpoints within `tol`.
fn stitch(segments: Vec<([f64; 2], [f64; 2])>, tol: f64) -> CurveSet {
    let mut nodes: Vec<[f64; 2]> = Vec::new();
    let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    let qt = tol.max(1e-300);
    let node_id = |p: [f64; 2],
                       nodes: &mut Vec<[f64; 2]>,
                       buckets: &mut HashMap<(i64, i64), Vec<usize>>|
     -> usize {
        let (bx, by) = ((p[0] / qt).round() as i64, (p[1] / qt).round() as i64);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(ids) = buckets.get(&(bx + dx, by + dy)) {
                    for &id in ids {
                        let n = nodes[id];
                        if (n[0] - p[0]).hypot(n[1] - p[1]) <= tol {
                            return id;
                        }
                    }
                }
            }
        }
        let id = nodes.len();
        nodes.push(p);
        buckets.entry((bx, by)).or_default().push(id);
        id
    };

    let mut adjacency: Vec<Vec<(usize, usize)>> = Vec::new();
    for (sid, (a, b)) in segments.iter().enumerate() {
        let ia = node_id(*a, &mut nodes, &mut buckets);
        let ib = node_id(*b, &mut nodes, &mut buckets);
        while adjacency.len() < nodes.len() {
            adjacency.push(Vec::new());
        }
        if ia != ib {
            adjacency[ia].push((ib, sid));
            adjacency[ib].push((ia, sid));
        }
    }

    let mut used = vec![false; segments.len()];
    let mut polylines = Vec::new();
    let mut closed_flags = Vec::new();
    // open chains first (odd-degree start nodes), then remaining cycles
    for start_pass in 0..2 {
        for start in 0..adjacency.len() {
            loop {
                let free_deg = adjacency[start].iter().filter(|(_, s)| !used[*s]).count();
                let start_ok = if start_pass == 0 { free_deg % 2 == 1 } else { free_deg > 0 };
                if !start_ok {
                    break;
                }
                let mut chain = vec![start];
                let mut cur = start;
                loop {
                    let next = adjacency[cur].iter().find(|(_, s)| !used[*s]).copied();
                    match next {
                        Some((nb, sid)) => {
                            used[sid] = true;
                            chain.push(nb);
                            cur = nb;
                        }
                        None => break,
                    }
                }
                if chain.len() < 2 {
                    break;
                }
                let closed = chain.first() == chain.last() && chain.len() > 2;
                polylines.push(chain.iter().map(|&id| nodes[id]).collect());
                closed_flags.push(closed);
            }
        }
    }
    CurveSet {
        polylines,
        closed: closed_flags,
        flags: None,
    }
}

/// The l^1 boundary gap
/// `|lambda^2-m^2| |lambda^2-m^2-4| - (|lambda+m|+|lambda-m|)^2 Q^2`,
/// a total function whose zero set is the l^1 enclosure boundary.
pub fn l1_gap_field(m: MassParam, budget: f64) -> impl Fn(Complex64) -> Option<f64> {
    let mv = m.value();
    move |lambda: Complex64| {
        let l2 = lambda * lambda;
        let lhs = (l2 - mv * mv).norm() * (l2 - mv * mv - 4.0).norm();
        let s = (lambda + mv).norm() + (lambda - mv).norm();
        Some(lhs - s * s * budget * budget)
    }
}

/// Gap field `B(lambda) Q - 1` for an enclosure, masked on the essential
/// spectrum and within `mask_radius` of it.
pub fn bound_gap_field(spec: EnclosureSpec, mask_radius: f64) -> impl Fn(Complex64) -> Option<f64> {
    move |lambda: Complex64| {
        if dist_to_spectrum(lambda, spec.m) < mask_radius {
            return None;
        }
        spec.bound_value(lambda).ok().map(|b| b * spec.budget - 1.0)
    }
}

/// Trace the boundary of an enclosure on the grid. The l^1 kind traces its
/// polynomial gap (no mask, curves cross the spectrum cleanly); the
/// k-dependent kinds are masked within half a cell diagonal of the
/// essential spectrum.
pub fn trace_enclosure_boundary(
    spec: EnclosureSpec,
    grid: &Grid,
    refine_tol: f64,
) -> Result<CurveSet> {
    match spec.kind {
        EnclosureKind::L1 => {
            trace_level_set(l1_gap_field(spec.m, spec.budget), 0.0, grid, refine_tol)
        }
        _ => {
            let mask = 0.5 * grid.cell_diagonal();
            trace_level_set(bound_gap_field(spec, mask), 0.0, grid, refine_tol)
        }
    }
}

/// Component count of the l^1 boundary; agrees with the threshold
/// classification on a sufficiently fine grid.
pub fn component_count_check(m: MassParam, budget: f64, grid: &Grid) -> Result<usize> {
    // classification must be well-posed for the count contract to hold
    let _class: TopologyClass = classify_topology(m, budget)?;
    let spec = EnclosureSpec::new(EnclosureKind::L1, m, 1.0, budget)?;
    let curves = trace_enclosure_boundary(spec, grid, 1e-9)?;
    Ok(curves.component_count())
}

/// Trace the improved-l^1 boundary curve `max(|T_0|,|T_1|) Q = 1` and flag
/// every refined point with diagonal-dominance membership.
pub fn gamma_q_points(m: MassParam, budget: f64, grid: &Grid) -> Result<CurveSet> {
    let spec = EnclosureSpec::new(EnclosureKind::Young, m, 1.0, budget)?;
    let curves = trace_enclosure_boundary(spec, grid, 1e-9)?;
    Ok(curves.with_flags(move |lambda| {
        k_from_lambda(lambda, m)
            .map(|kp| in_region_d_at(&kp))
            .unwrap_or(false)
    }))
}

/// Boolean raster over a k-plane grid; `None` marks points outside the
/// punctured unit disk.
#[derive(Debug, Clone)]
pub struct BoolRaster {
    pub nx: usize,
    pub ny: usize,
    pub cells: Vec<Option<bool>>,
}

impl BoolRaster {
    pub fn count_true(&self) -> usize {
        self.cells.iter().filter(|c| **c == Some(true)).count()
    }

    pub fn at(&self, i: usize, j: usize) -> Option<bool> {
        self.cells[j * self.nx + i]
    }
}

/// Scan the unit k-disk for failure of diagonal dominance:
/// true where `|T_0(k)| < |T_1(k)|`, the lambda branch taken from the
/// k-to-lambda map.
pub fn region_d_scan(m: MassParam, grid: &Grid) -> BoolRaster {
    let cells: Vec<Option<bool>> = (0..grid.ny)
        .into_par_iter()
        .flat_map_iter(|j| (0..grid.nx).map(move |i| (i, j)))
        .map(|(i, j)| {
            let k = c64(grid.x(i), grid.y(j));
            let kn = k.norm();
            if kn <= 0.0 || kn >= 1.0 {
                return None;
            }
            kpoint_from_k(k, m)
                .ok()
                .map(|kp| t0_spectral_norm(&kp) < t1_spectral_norm(&kp))
        })
        .collect();
    BoolRaster {
        nx: grid.nx,
        ny: grid.ny,
        cells,
    }
}
