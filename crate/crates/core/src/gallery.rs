//! Deterministic example surfaces carrying piecewise-linear fields.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::field::{FieldError, GenericityMode, ScalarField};
use crate::mesh::{double, Mesh, MeshError, VertexId};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GalleryError {
    #[error("resolution {got} is too coarse; need at least {needed}")]
    ResolutionTooCoarse { needed: usize, got: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Angular offset keeping sample angles away from the zeros and the
/// symmetry axes of the trigonometric fields below.
const PHASE: f64 = 0.237_190_318_5;

fn strict(mesh: Mesh, values: Vec<f64>) -> Result<ScalarField, GalleryError> {
    Ok(ScalarField::new(
        Arc::new(mesh),
        values,
        GenericityMode::StrictInterior,
    )?)
}

fn relaxed(mesh: Mesh, values: Vec<f64>) -> Result<ScalarField, GalleryError> {
    Ok(ScalarField::new(
        Arc::new(mesh),
        values,
        GenericityMode::RelaxedBoundary,
    )?)
}

/// Single-ring fan: vertex 0 at the origin, rim vertices `1..=n` on the unit
/// circle at angles `2π(i + δ)/n`.
fn fan_disk(n: usize) -> (Vec<[VertexId; 3]>, Vec<[f64; 3]>, Vec<f64>) {
    let tris = (0..n).map(|i| [0, 1 + i, 1 + (i + 1) % n]).collect();
    let angles: Vec<f64> = (0..n).map(|i| TAU * (i as f64 + PHASE) / n as f64).collect();
    let mut pos = vec![[0.0; 3]];
    pos.extend(angles.iter().map(|&t| [t.cos(), t.sin(), 0.0]));
    (tris, pos, angles)
}

/// `Re(z^k)` on a fan of the unit disk with `n` rim vertices.
///
/// The centre has valence `2k`; the rim carries `k` minima and `k` maxima of
/// the boundary restriction.
pub fn gen_disk_harmonic(k: usize, n: usize) -> Result<ScalarField, GalleryError> {
    if k == 0 {
        return Err(GalleryError::InvalidParameter("k must be at least 1".into()));
    }
    if n < 4 * k {
        return Err(GalleryError::ResolutionTooCoarse {
            needed: 4 * k,
            got: n,
        });
    }
    let (tris, pos, angles) = fan_disk(n);
    let mut values = vec![0.0];
    values.extend(angles.iter().map(|&t| (k as f64 * t).cos()));
    strict(Mesh::new(tris, Some(pos))?, values)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BranchAxis {
    /// `F = Re(z^Q)`, transverse to the branched sheet.
    FirstCoordinate,
    /// `F = Re(z^d)`, the height coordinate.
    Height,
}

/// Pulls back a coordinate of `u(z) = (z^Q, Re(z^d))` to a fan of the unit
/// disk. Positions are the image points of `u`.
pub fn gen_branched(
    q: usize,
    d: usize,
    n: usize,
    axis: BranchAxis,
) -> Result<ScalarField, GalleryError> {
    if q == 0 || d == 0 {
        return Err(GalleryError::InvalidParameter("Q and d must be at least 1".into()));
    }
    let needed = 4 * q.max(d);
    if n < needed {
        return Err(GalleryError::ResolutionTooCoarse { needed, got: n });
    }
    let (tris, _, angles) = fan_disk(n);
    let mut pos = vec![[0.0; 3]];
    pos.extend(angles.iter().map(|&t| {
        let (qt, dt) = (q as f64 * t, d as f64 * t);
        [qt.cos(), qt.sin(), dt.cos()]
    }));
    let mut values = vec![0.0];
    values.extend(pos[1..].iter().map(|p| match axis {
        BranchAxis::FirstCoordinate => p[0],
        BranchAxis::Height => p[2],
    }));
    strict(Mesh::new(tris, Some(pos))?, values)
}

/// Triangulated grid of `w × h` unit cells with some cells removed. Each
/// kept cell is split along one diagonal, avoiding diagonals that join two
/// boundary vertices.
struct Grid {
    w: usize,
    h: usize,
    /// Cells that are removed.
    hole: Box<dyn Fn(usize, usize) -> bool>,
}

impl Grid {
    fn index(&self, x: usize, y: usize) -> usize {
        y * (self.w + 1) + x
    }

    fn cell_present(&self, x: isize, y: isize) -> bool {
        x >= 0
            && y >= 0
            && (x as usize) < self.w
            && (y as usize) < self.h
            && !(self.hole)(x as usize, y as usize)
    }

    /// A grid vertex is on the boundary when some of its four cells is
    /// missing.
    fn on_boundary(&self, x: usize, y: usize) -> bool {
        let (x, y) = (x as isize, y as isize);
        [(x - 1, y - 1), (x, y - 1), (x - 1, y), (x, y)]
            .iter()
            .any(|&(cx, cy)| !self.cell_present(cx, cy))
    }

    fn used(&self, x: usize, y: usize) -> bool {
        let (x, y) = (x as isize, y as isize);
        [(x - 1, y - 1), (x, y - 1), (x - 1, y), (x, y)]
            .iter()
            .any(|&(cx, cy)| self.cell_present(cx, cy))
    }

    fn triangles(&self) -> Vec<[usize; 3]> {
        let mut out = Vec::new();
        for y in 0..self.h {
            for x in 0..self.w {
                if (self.hole)(x, y) {
                    continue;
                }
                let a = self.index(x, y);
                let b = self.index(x + 1, y);
                let c = self.index(x + 1, y + 1);
                let d = self.index(x, y + 1);
                if self.on_boundary(x, y) && self.on_boundary(x + 1, y + 1) {
                    out.push([a, b, d]);
                    out.push([b, c, d]);
                } else {
                    out.push([a, b, c]);
                    out.push([a, c, d]);
                }
            }
        }
        out
    }

    /// Drops unused grid points, returning triangles and the kept `(x, y)`.
    fn compact(&self) -> (Vec<[usize; 3]>, Vec<(usize, usize)>) {
        let mut map = vec![usize::MAX; (self.w + 1) * (self.h + 1)];
        let mut kept = Vec::new();
        for y in 0..=self.h {
            for x in 0..=self.w {
                if self.used(x, y) {
                    map[self.index(x, y)] = kept.len();
                    kept.push((x, y));
                }
            }
        }
        let tris = self
            .triangles()
            .into_iter()
            .map(|t| t.map(|v| map[v]))
            .collect();
        (tris, kept)
    }
}

/// Genus-`g` closed surface as the double of a rectangle with `g` square
/// holes, carrying the tilted height `F = y·cos τ + x·sin τ`.
///
/// `n` is the number of cells per unit. The field has one minimum, one
/// maximum and `2g` simple saddles.
pub fn gen_closed(g: usize, n: usize, tilt: f64) -> Result<ScalarField, GalleryError> {
    if g > 4 {
        return Err(GalleryError::InvalidParameter("genus above 4".into()));
    }
    if n == 0 {
        return Err(GalleryError::ResolutionTooCoarse { needed: 1, got: 0 });
    }
    if !(tilt > 0.0 && tilt < PI / 4.0) {
        return Err(GalleryError::InvalidParameter("tilt must lie in (0, π/4)".into()));
    }
    let grid = Grid {
        w: 5 * n,
        h: (3 * g + 2) * n,
        hole: Box::new(move |x, y| {
            let (ux, uy) = (x / n, y / n);
            ux == 2 && uy >= 2 && uy < 3 * g + 2 && (uy - 2) % 3 == 0
        }),
    };
    let (tris, kept) = grid.compact();
    let unit = 1.0 / n as f64;
    let pos: Vec<[f64; 3]> = kept
        .iter()
        .map(|&(x, y)| {
            let z = if grid.on_boundary(x, y) { 0.0 } else { 0.1 };
            [x as f64 * unit, y as f64 * unit, z]
        })
        .collect();
    let planar = Mesh::new(tris, Some(pos))?;
    let doubled = double(&planar)?;
    let (c, s) = (tilt.cos(), tilt.sin());
    let values = doubled
        .mesh
        .positions()
        .expect("doubled positions")
        .iter()
        .map(|p| p[1] * c + p[0] * s)
        .collect();
    strict(doubled.mesh, values)
}

/// Torus of revolution with radii 2 and 0.8 whose axis is tilted by `tilt`
/// from the vertical; `F` is the height.
pub fn gen_torus(n_major: usize, n_minor: usize, tilt: f64) -> Result<ScalarField, GalleryError> {
    if n_major < 3 || n_minor < 3 {
        return Err(GalleryError::ResolutionTooCoarse {
            needed: 3,
            got: n_major.min(n_minor),
        });
    }
    let id = |i: usize, j: usize| (i % n_major) * n_minor + j % n_minor;
    let mut tris = Vec::new();
    for i in 0..n_major {
        for j in 0..n_minor {
            tris.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            tris.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    let (big, small) = (2.0, 0.8);
    let mut pos = Vec::with_capacity(n_major * n_minor);
    for i in 0..n_major {
        let theta = TAU * (i as f64 + PHASE) / n_major as f64;
        for j in 0..n_minor {
            let phi = TAU * (j as f64 + 0.5 * PHASE) / n_minor as f64;
            let rr = big + small * phi.cos();
            pos.push([rr * theta.cos(), rr * theta.sin(), small * phi.sin()]);
        }
    }
    let (c, s) = (tilt.cos(), tilt.sin());
    let values = pos.iter().map(|p| p[2] * c + p[0] * s).collect();
    strict(Mesh::new(tris, Some(pos))?, values)
}

/// Möbius band of `n` columns and three rows, with a linear field of the
/// embedded position.
pub fn gen_mobius(n: usize) -> Result<ScalarField, GalleryError> {
    if n < 5 {
        return Err(GalleryError::ResolutionTooCoarse { needed: 5, got: n });
    }
    // column n is column 0 with the rows reversed
    let id = |i: usize, j: usize| {
        if i == n {
            2 - j
        } else {
            3 * i + j
        }
    };
    let mut tris = Vec::new();
    for i in 0..n {
        for j in 0..2 {
            let a = id(i, j);
            let b = id(i + 1, j);
            let c = id(i + 1, j + 1);
            let d = id(i, j + 1);
            tris.push([a, b, c]);
            tris.push([a, c, d]);
        }
    }
    let mut pos = Vec::with_capacity(3 * n);
    for i in 0..n {
        let t = TAU * (i as f64 + PHASE) / n as f64;
        for j in 0..3 {
            let w = 0.5 * (j as f64 - 1.0);
            let r = 1.0 + w * (t / 2.0).cos();
            pos.push([r * t.cos(), r * t.sin(), w * (t / 2.0).sin()]);
        }
    }
    let values = pos
        .iter()
        .map(|p| 0.713 * p[0] + 0.291 * p[1] + 0.457 * p[2])
        .collect();
    strict(Mesh::new(tris, Some(pos))?, values)
}

/// Disk with a centre vertex and `rings` concentric rings of `sectors`
/// vertices; the field is the `x` coordinate.
pub fn gen_polar_disk(rings: usize, sectors: usize) -> Result<ScalarField, GalleryError> {
    if rings == 0 || sectors < 3 {
        return Err(GalleryError::ResolutionTooCoarse {
            needed: 3,
            got: sectors,
        });
    }
    let id = |r: usize, s: usize| 1 + (r - 1) * sectors + s % sectors;
    let mut tris = Vec::new();
    for s in 0..sectors {
        tris.push([0, id(1, s), id(1, s + 1)]);
    }
    for r in 1..rings {
        for s in 0..sectors {
            tris.push([id(r, s), id(r + 1, s), id(r + 1, s + 1)]);
            tris.push([id(r, s), id(r + 1, s + 1), id(r, s + 1)]);
        }
    }
    let mut pos = vec![[0.0; 3]];
    for r in 1..=rings {
        let rad = r as f64 / rings as f64;
        for s in 0..sectors {
            let t = TAU * (s as f64 + PHASE + 0.5 * r as f64) / sectors as f64;
            pos.push([rad * t.cos(), rad * t.sin(), 0.0]);
        }
    }
    let values = pos.iter().map(|p| p[0] + 0.1 * p[1]).collect();
    strict(Mesh::new(tris, Some(pos))?, values)
}

/// Cylinder `S¹ × [0,1]` with `around` columns and `rows` rows of cells;
/// `F = z + tilt·x`, plus a term vanishing on both ends that keeps the
/// inner rows generic. A zero tilt makes both boundary circles level, which
/// needs the relaxed mode.
pub fn gen_cylinder(around: usize, rows: usize, tilt: f64) -> Result<ScalarField, GalleryError> {
    if around < 3 || rows == 0 {
        return Err(GalleryError::ResolutionTooCoarse {
            needed: 3,
            got: around,
        });
    }
    let id = |i: usize, j: usize| j * around + i % around;
    let mut tris = Vec::new();
    for j in 0..rows {
        for i in 0..around {
            tris.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            tris.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    let mut pos = Vec::new();
    for j in 0..=rows {
        for i in 0..around {
            let t = TAU * (i as f64 + PHASE) / around as f64;
            pos.push([t.cos(), t.sin(), j as f64 / rows as f64]);
        }
    }
    let values: Vec<f64> = pos
        .iter()
        .map(|p| p[2] + tilt * p[0] + 0.05 * p[2] * (1.0 - p[2]) * (p[0] + 0.3 * p[1]))
        .collect();
    let mesh = Mesh::new(tris, Some(pos))?;
    if tilt == 0.0 {
        relaxed(mesh, values)
    } else {
        strict(mesh, values)
    }
}

/// Planar annulus with the inner circle at level 0 and
/// `F = s·(1 + 0.1·cos(θ + δ))` on the ring at parameter `s ∈ [0, 1]`.
/// Relaxed: the inner circle is constant.
pub fn gen_relaxed_annulus(around: usize, rings: usize) -> Result<ScalarField, GalleryError> {
    if around < 3 || rings < 2 {
        return Err(GalleryError::ResolutionTooCoarse {
            needed: 3,
            got: around.min(rings + 1),
        });
    }
    let id = |i: usize, j: usize| j * around + i % around;
    let mut tris = Vec::new();
    for j in 0..rings {
        for i in 0..around {
            tris.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            tris.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    let mut pos = Vec::new();
    let mut values = Vec::new();
    for j in 0..=rings {
        let s = j as f64 / rings as f64;
        for i in 0..around {
            let t = TAU * (i as f64 + PHASE) / around as f64;
            let r = 1.0 + s;
            pos.push([r * t.cos(), r * t.sin(), 0.0]);
            values.push(s * (1.0 + 0.1 * (t + PHASE).cos()));
        }
    }
    relaxed(Mesh::new(tris, Some(pos))?, values)
}

/// Annulus as [`gen_relaxed_annulus`] but with `F` constant only on two
/// opposite arcs of the outer circle (each spanning `arc` edges).
pub fn gen_annulus_with_arcs(around: usize, rings: usize, arc: usize) -> Result<ScalarField, GalleryError> {
    if arc == 0 || 2 * (arc + 2) > around {
        return Err(GalleryError::InvalidParameter("arc length out of range".into()));
    }
    let base = gen_radial_annulus(around, rings)?;
    let mut values = base.values().to_vec();
    let outer = rings * around;
    for start in [0, around / 2] {
        let level = values[outer + start];
        for i in start..=start + arc {
            values[outer + i % around] = level;
        }
    }
    Ok(ScalarField::new(
        base.mesh_arc().clone(),
        values,
        GenericityMode::RelaxedBoundary,
    )?)
}

/// Planar annulus with the strict field `F = (1 + s)·(1 + 0.3·cos(θ + δ)) + 0.05·sin θ`.
fn gen_radial_annulus(around: usize, rings: usize) -> Result<ScalarField, GalleryError> {
    let base = gen_relaxed_annulus(around, rings)?;
    let pos = base.mesh().positions().expect("annulus positions");
    let values = pos
        .iter()
        .map(|p| {
            let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
            let t = p[1].atan2(p[0]);
            r * (1.0 + 0.3 * (t + PHASE).cos()) + 0.05 * t.sin()
        })
        .collect();
    Ok(ScalarField::new(
        base.mesh_arc().clone(),
        values,
        GenericityMode::StrictInterior,
    )?)
}

/// Unit square `[0,1]²` split into `nx × ny` cells carrying
/// `F = y + 0.1·(x + 0.37)·y·(1 − y)`: level on the bottom and top sides,
/// hence relaxed.
pub fn gen_strip(nx: usize, ny: usize) -> Result<ScalarField, GalleryError> {
    if nx < 2 || ny < 2 {
        return Err(GalleryError::ResolutionTooCoarse {
            needed: 2,
            got: nx.min(ny),
        });
    }
    let grid = Grid {
        w: nx,
        h: ny,
        hole: Box::new(|_, _| false),
    };
    let (tris, kept) = grid.compact();
    let pos: Vec<[f64; 3]> = kept
        .iter()
        .map(|&(x, y)| [x as f64 / nx as f64, y as f64 / ny as f64, 0.0])
        .collect();
    let values = pos
        .iter()
        .map(|p| p[1] + 0.1 * (p[0] + 0.37) * p[1] * (1.0 - p[1]))
        .collect();
    relaxed(Mesh::new(tris, Some(pos))?, values)
}

/// Fan of five triangles around a boundary apex whose link path carries the
/// signs `+ − + − −`: the apex is a boundary saddle of valence 3.
pub fn boundary_saddle_fan() -> Result<ScalarField, GalleryError> {
    let tris = (1..5).map(|i| [0, i, i + 1]).collect();
    let mut pos = vec![[0.0, 0.0, 0.0]];
    pos.extend((0..5).map(|i| {
        let t = PI * i as f64 / 4.0;
        [t.cos(), t.sin(), 0.0]
    }));
    let values = vec![0.0, 1.0, -1.1, 1.2, -1.3, -1.4];
    strict(Mesh::new(tris, Some(pos))?, values)
}

/// UV sphere of `lat` latitude bands and `lon` meridians with the bands
/// above `keep` removed, carrying a tilted height. When the cut circle lies
/// below the equator the minimum of `F|∂M` has valence 2, so it lies in `A`.
pub fn gen_sphere_minus_cap(
    lat: usize,
    lon: usize,
    keep: usize,
    tilt: f64,
) -> Result<ScalarField, GalleryError> {
    if lat < 3 || lon < 3 || keep < 2 || keep >= lat {
        return Err(GalleryError::InvalidParameter("need 2 ≤ keep < lat".into()));
    }
    // vertex 0 is the south pole; ring r (1..=keep) has lon vertices
    let id = |r: usize, s: usize| 1 + (r - 1) * lon + s % lon;
    let mut tris = Vec::new();
    for s in 0..lon {
        tris.push([0, id(1, s + 1), id(1, s)]);
    }
    for r in 1..keep {
        for s in 0..lon {
            tris.push([id(r, s), id(r, s + 1), id(r + 1, s + 1)]);
            tris.push([id(r, s), id(r + 1, s + 1), id(r + 1, s)]);
        }
    }
    let mut pos = vec![[0.0, 0.0, -1.0]];
    for r in 1..=keep {
        let phi = -PI / 2.0 + PI * r as f64 / lat as f64;
        for s in 0..lon {
            let t = TAU * (s as f64 + PHASE) / lon as f64;
            pos.push([phi.cos() * t.cos(), phi.cos() * t.sin(), phi.sin()]);
        }
    }
    let (c, s) = (tilt.cos(), tilt.sin());
    let values = pos.iter().map(|p| p[2] * c + p[0] * s).collect();
    strict(Mesh::new(tris, Some(pos))?, values)
}

/// The seven-vertex torus.
pub fn seven_vertex_torus() -> Mesh {
    let mut tris = Vec::new();
    for i in 0..7 {
        tris.push([i, (i + 1) % 7, (i + 3) % 7]);
        tris.push([i, (i + 3) % 7, (i + 2) % 7]);
    }
    // advisory coordinates on a torus of revolution
    let pos = (0..7)
        .map(|i| {
            let t = TAU * i as f64 / 7.0;
            let p = TAU * (3 * i % 7) as f64 / 7.0;
            let r = 2.0 + 0.8 * p.cos();
            [r * t.cos(), r * t.sin(), 0.8 * p.sin()]
        })
        .collect();
    Mesh::new(tris, Some(pos)).expect("seven-vertex torus is a valid surface")
}

/// Octahedron with poles 0 and 1.
pub fn octahedron() -> Mesh {
    let mut tris = Vec::new();
    for i in 0..4 {
        let a = 2 + i;
        let b = 2 + (i + 1) % 4;
        tris.push([0, a, b]);
        tris.push([1, b, a]);
    }
    let pos = vec![
        [0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0],
        [1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [-1.0, 0.0, 0.0],
        [0.0, -1.0, 0.0],
    ];
    Mesh::new(tris, Some(pos)).expect("octahedron is a valid surface")
}

/// Distinct values: a seeded random permutation of `0..n` plus jitter
/// below one half.
pub fn gen_random_field(mesh: Arc<Mesh>, seed: u64) -> Result<ScalarField, GalleryError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = mesh.vertex_count();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let values = order
        .into_iter()
        .map(|k| k as f64 + rng.gen_range(0.0..0.5))
        .collect();
    Ok(ScalarField::new(mesh, values, GenericityMode::StrictInterior)?)
}

/// `key=value` generator parameters.
pub type Params = BTreeMap<String, String>;

fn param<T: std::str::FromStr>(params: &Params, key: &str, default: T) -> Result<T, GalleryError> {
    match params.get(key) {
        None => Ok(default),
        Some(s) => s
            .parse()
            .map_err(|_| GalleryError::InvalidParameter(format!("{key}={s}"))),
    }
}

pub const GENERATORS: [&str; 13] = [
    "disk-harmonic",
    "closed",
    "torus",
    "mobius",
    "branched",
    "polar-disk",
    "cylinder",
    "relaxed-annulus",
    "annulus-arcs",
    "strip",
    "boundary-saddle",
    "sphere-minus-cap",
    "seven-torus",
];

/// Runs a generator by name. `seed` replaces the field with a random one
/// on the same mesh.
pub fn generate(name: &str, params: &Params, seed: Option<u64>) -> Result<ScalarField, GalleryError> {
    let known: Vec<&str> = match name {
        "disk-harmonic" => vec!["k", "n"],
        "closed" => vec!["g", "n", "tilt"],
        "torus" => vec!["n_major", "n_minor", "tilt"],
        "mobius" => vec!["n"],
        "branched" => vec!["Q", "d", "n", "axis"],
        "polar-disk" => vec!["rings", "sectors"],
        "cylinder" => vec!["around", "rows", "tilt"],
        "relaxed-annulus" => vec!["around", "rings"],
        "annulus-arcs" => vec!["around", "rings", "arc"],
        "strip" => vec!["nx", "ny"],
        "boundary-saddle" => vec![],
        "sphere-minus-cap" => vec!["lat", "lon", "keep", "tilt"],
        "seven-torus" => vec![],
        other => return Err(GalleryError::UnknownGenerator(other.to_string())),
    };
    if let Some(bad) = params.keys().find(|k| !known.contains(&k.as_str())) {
        return Err(GalleryError::InvalidParameter(format!(
            "`{bad}` is not a parameter of {name}"
        )));
    }
    let p = params;
    let field = match name {
        "disk-harmonic" => {
            let k = param(p, "k", 2)?;
            gen_disk_harmonic(k, param(p, "n", 8 * k)?)?
        }
        "closed" => gen_closed(param(p, "g", 1)?, param(p, "n", 1)?, param(p, "tilt", 0.1234)?)?,
        "torus" => gen_torus(
            param(p, "n_major", 24)?,
            param(p, "n_minor", 12)?,
            param(p, "tilt", 0.3)?,
        )?,
        "mobius" => gen_mobius(param(p, "n", 12)?)?,
        "branched" => {
            let axis = match p.get("axis").map(String::as_str) {
                None | Some("first-coordinate") => BranchAxis::FirstCoordinate,
                Some("height") => BranchAxis::Height,
                Some(other) => return Err(GalleryError::InvalidParameter(format!("axis={other}"))),
            };
            let q = param(p, "Q", 2)?;
            let d = param(p, "d", 3)?;
            gen_branched(q, d, param(p, "n", 8 * q.max(d))?, axis)?
        }
        "polar-disk" => gen_polar_disk(param(p, "rings", 4)?, param(p, "sectors", 12)?)?,
        "cylinder" => gen_cylinder(param(p, "around", 12)?, param(p, "rows", 3)?, param(p, "tilt", 0.1)?)?,
        "relaxed-annulus" => gen_relaxed_annulus(param(p, "around", 16)?, param(p, "rings", 3)?)?,
        "annulus-arcs" => gen_annulus_with_arcs(
            param(p, "around", 16)?,
            param(p, "rings", 3)?,
            param(p, "arc", 2)?,
        )?,
        "strip" => gen_strip(param(p, "nx", 4)?, param(p, "ny", 3)?)?,
        "boundary-saddle" => boundary_saddle_fan()?,
        "sphere-minus-cap" => gen_sphere_minus_cap(
            param(p, "lat", 12)?,
            param(p, "lon", 16)?,
            param(p, "keep", 4)?,
            param(p, "tilt", 0.2)?,
        )?,
        "seven-torus" => gen_random_field(Arc::new(seven_vertex_torus()), seed.unwrap_or(0))?,
        _ => unreachable!(),
    };
    match seed {
        Some(s) => gen_random_field(field.mesh_arc().clone(), s),
        None => Ok(field),
    }
}
