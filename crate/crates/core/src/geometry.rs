//! Spatial layer: Poisson point processes on a square torus, nearest-AP
//! association, and radius queries for the contention neighborhoods.
//!
//! All distances are toroidal (the square wraps in both axes) so that a
//! finite simulation window has no boundary effects and matches the
//! infinite-plane analytics.

use std::io::{BufRead, Write};

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point<F> {
    pub x: F,
    pub y: F,
}

/// Shortest wrapped separation along one axis of a torus with period `side`.
#[inline]
pub fn toroidal_delta<F: Scalar>(a: F, b: F, side: F) -> F {
    let d = (a - b).abs();
    d.min(side - d)
}

#[inline]
pub fn toroidal_distance_sq<F: Scalar>(p: Point<F>, q: Point<F>, side: F) -> F {
    let dx = toroidal_delta(p.x, q.x, side);
    let dy = toroidal_delta(p.y, q.y, side);
    dx * dx + dy * dy
}

#[inline]
pub fn toroidal_distance<F: Scalar>(p: Point<F>, q: Point<F>, side: F) -> F {
    toroidal_distance_sq(p, q, side).sqrt()
}

/// Samples a homogeneous Poisson point process of the given intensity
/// (points per m²) on the square [0, side)²: a Poisson-distributed count,
/// then i.i.d. uniform positions.
pub fn sample_ppp<F: Scalar, R: Rng>(intensity: F, side: F, rng: &mut R) -> Vec<Point<F>> {
    let mean = (intensity * side * side).as_f64();
    let count = if mean > 0.0 {
        Poisson::new(mean).expect("positive mean").sample(rng) as usize
    } else {
        0
    };
    let side64 = side.as_f64();
    (0..count)
        .map(|_| Point {
            x: F::of(rng.gen_range(0.0..side64)),
            y: F::of(rng.gen_range(0.0..side64)),
        })
        .collect()
}

/// Nearest-AP association: for each user, the index of the closest AP under
/// the toroidal metric. Exact linear scan; ties go to the lowest AP index.
pub fn associate_nearest<F: Scalar>(
    users: &[Point<F>],
    aps: &[Point<F>],
    side: F,
) -> Vec<usize> {
    assert!(!aps.is_empty(), "cannot associate users with zero APs");
    users
        .iter()
        .map(|&u| {
            let mut best = 0usize;
            let mut best_d = toroidal_distance_sq(u, aps[0], side);
            for (i, &a) in aps.iter().enumerate().skip(1) {
                let d = toroidal_distance_sq(u, a, side);
                if d < best_d {
                    best = i;
                    best_d = d;
                }
            }
            best
        })
        .collect()
}

/// Precomputed list, for every AP, of the other APs within distance
/// `radius` on the torus. Built once per deployment with a uniform grid
/// (cell edge ≥ radius, so a 3×3 block of cells covers any query disk).
#[derive(Clone, Debug)]
pub struct NeighborMap {
    lists: Vec<Vec<u32>>,
}

impl NeighborMap {
    pub fn build<F: Scalar>(points: &[Point<F>], side: F, radius: F) -> NeighborMap {
        let n_cells = (side.as_f64() / radius.as_f64()).floor().max(1.0) as usize;
        let cell_of = |p: Point<F>| -> (usize, usize) {
            let scale = n_cells as f64 / side.as_f64();
            let ix = ((p.x.as_f64() * scale) as usize).min(n_cells - 1);
            let iy = ((p.y.as_f64() * scale) as usize).min(n_cells - 1);
            (ix, iy)
        };
        let mut cells: Vec<Vec<u32>> = vec![Vec::new(); n_cells * n_cells];
        for (i, &p) in points.iter().enumerate() {
            let (ix, iy) = cell_of(p);
            cells[iy * n_cells + ix].push(i as u32);
        }
        let r_sq = radius * radius;
        let mut lists = vec![Vec::new(); points.len()];
        let mut block = Vec::with_capacity(9);
        for (i, &p) in points.iter().enumerate() {
            let (ix, iy) = cell_of(p);
            // Wrapped 3×3 block, deduplicated (a torus with < 3 cells per
            // axis folds the block onto itself).
            block.clear();
            for dy in -1i64..=1 {
                for dx in -1i64..=1 {
                    let cx = (ix as i64 + dx).rem_euclid(n_cells as i64) as usize;
                    let cy = (iy as i64 + dy).rem_euclid(n_cells as i64) as usize;
                    let idx = cy * n_cells + cx;
                    if !block.contains(&idx) {
                        block.push(idx);
                    }
                }
            }
            for &cell in &block {
                for &j in &cells[cell] {
                    if j as usize != i
                        && toroidal_distance_sq(p, points[j as usize], side) <= r_sq
                    {
                        lists[i].push(j);
                    }
                }
            }
            lists[i].sort_unstable();
        }
        NeighborMap { lists }
    }

    #[inline]
    pub fn neighbors(&self, i: usize) -> &[u32] {
        &self.lists[i]
    }

    pub fn len(&self) -> usize {
        self.lists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lists.is_empty()
    }
}

/// A sampled network: AP and user positions on the torus, each user bound
/// to its nearest AP, plus the AP-to-AP neighborhoods within the
/// suppression radius.
#[derive(Clone, Debug)]
pub struct Deployment<F> {
    pub side: F,
    pub aps: Vec<Point<F>>,
    pub users: Vec<Point<F>>,
    /// users[i] is served by aps[assoc[i]].
    pub assoc: Vec<usize>,
    pub neighbors: NeighborMap,
    /// Users grouped by serving AP (inverse of `assoc`).
    pub cell_members: Vec<Vec<u32>>,
}

impl<F: Scalar> Deployment<F> {
    /// Assembles a deployment from explicit positions (used by both the PPP
    /// sampler and handcrafted test fixtures).
    pub fn from_points(
        side: F,
        aps: Vec<Point<F>>,
        users: Vec<Point<F>>,
        radius: F,
    ) -> Deployment<F> {
        let assoc = if users.is_empty() {
            Vec::new()
        } else {
            associate_nearest(&users, &aps, side)
        };
        let neighbors = NeighborMap::build(&aps, side, radius);
        let mut cell_members = vec![Vec::new(); aps.len()];
        for (u, &a) in assoc.iter().enumerate() {
            cell_members[a].push(u as u32);
        }
        Deployment {
            side,
            aps,
            users,
            assoc,
            neighbors,
            cell_members,
        }
    }

    /// Samples APs and users as independent PPPs and wires up association
    /// and neighborhoods. Errors if the AP process comes up empty (possible
    /// for tiny ν·area; the caller decides whether to resample or abort).
    pub fn sample<R: Rng>(
        lambda_u: F,
        lambda_a: F,
        side: F,
        radius: F,
        rng: &mut R,
    ) -> Result<Deployment<F>, GeometryError> {
        let aps = sample_ppp(lambda_a, side, rng);
        if aps.is_empty() {
            return Err(GeometryError::EmptyApProcess);
        }
        let users = sample_ppp(lambda_u, side, rng);
        Ok(Deployment::from_points(side, aps, users, radius))
    }

    /// Writes positions as CSV (`role,index,x_m,y_m`). The float formatting
    /// round-trips exactly, so a dump/load cycle reproduces the deployment
    /// bit for bit.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "role,index,x_m,y_m")?;
        for (i, p) in self.aps.iter().enumerate() {
            writeln!(w, "ap,{},{},{}", i, p.x, p.y)?;
        }
        for (i, p) in self.users.iter().enumerate() {
            writeln!(w, "user,{},{},{}", i, p.x, p.y)?;
        }
        Ok(())
    }

    /// Reads a deployment dumped by [`write_csv`], re-deriving association
    /// and neighborhoods for the given torus side and radius.
    pub fn read_csv<R: BufRead>(r: R, side: F, radius: F) -> Result<Deployment<F>, GeometryError> {
        let mut aps = Vec::new();
        let mut users = Vec::new();
        for (idx, line) in r.lines().enumerate() {
            let line = line.map_err(|e| GeometryError::Csv {
                line: idx + 1,
                message: e.to_string(),
            })?;
            if idx == 0 {
                if line.trim() != "role,index,x_m,y_m" {
                    return Err(GeometryError::Csv {
                        line: 1,
                        message: format!("unexpected header `{line}`"),
                    });
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 4 {
                return Err(GeometryError::Csv {
                    line: idx + 1,
                    message: format!("expected 4 fields, got {}", fields.len()),
                });
            }
            let parse = |s: &str| -> Result<F, GeometryError> {
                s.parse::<f64>().map(F::of).map_err(|e| GeometryError::Csv {
                    line: idx + 1,
                    message: e.to_string(),
                })
            };
            let p = Point {
                x: parse(fields[2])?,
                y: parse(fields[3])?,
            };
            match fields[0] {
                "ap" => aps.push(p),
                "user" => users.push(p),
                other => {
                    return Err(GeometryError::Csv {
                        line: idx + 1,
                        message: format!("unknown role `{other}`"),
                    })
                }
            }
        }
        if aps.is_empty() {
            return Err(GeometryError::EmptyApProcess);
        }
        Ok(Deployment::from_points(side, aps, users, radius))
    }
}

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("sampled AP process is empty; enlarge the region or the AP density")]
    EmptyApProcess,
    #[error("deployment CSV line {line}: {message}")]
    Csv { line: usize, message: String },
}
