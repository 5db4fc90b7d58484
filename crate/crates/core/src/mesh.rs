//! Triangulated compact 2-manifolds with boundary.
//!
//! A [`Mesh`] is validated on construction: every edge lies in one or two
//! triangles and the link of every vertex is a single cycle (interior) or a
//! single path (boundary). Orientation is never assumed, so non-orientable
//! surfaces such as the Möbius band are first-class inputs.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;
use thiserror::Error;

use crate::gf2::SparseMatrix;
use crate::util::UnionFind;

pub type VertexId = usize;
pub type EdgeId = usize;
pub type TriangleId = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MeshError {
    #[error("mesh has no triangles")]
    Empty,
    #[error("triangle {triangle} references vertex {vertex} but only {count} vertices exist")]
    InvalidVertex {
        triangle: TriangleId,
        vertex: VertexId,
        count: usize,
    },
    #[error("triangle {0} repeats a vertex")]
    DegenerateTriangle(TriangleId),
    #[error("triangles {0} and {1} span the same vertices")]
    DuplicateTriangle(TriangleId, TriangleId),
    #[error("edge ({0}, {1}) lies in {2} triangles")]
    NonManifoldEdge(VertexId, VertexId, usize),
    #[error("link of vertex {0} is not a single cycle or path")]
    PinchedVertex(VertexId),
    #[error("vertex {0} belongs to no triangle")]
    IsolatedVertex(VertexId),
    #[error("expected {expected} positions, got {got}")]
    PositionCount { expected: usize, got: usize },
    #[error("mesh has no boundary to double along")]
    EmptyBoundary,
}

/// Ordered link of a vertex.
///
/// For an interior vertex `vertices` is a cycle; for a boundary vertex it is
/// a path whose two ends are the boundary neighbours. `fan[i]` is the
/// triangle spanned by the vertex, `vertices[i]` and `vertices[i + 1]`
/// (indices taken cyclically for interior vertices).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Link {
    pub vertices: Vec<VertexId>,
    pub fan: Vec<TriangleId>,
    pub closed: bool,
}

#[derive(Debug, Clone)]
pub struct Mesh {
    vertex_count: usize,
    triangles: Vec<[VertexId; 3]>,
    positions: Option<Vec<[f64; 3]>>,
    edges: Vec<[VertexId; 2]>,
    edge_index: HashMap<(VertexId, VertexId), EdgeId>,
    edge_triangles: Vec<Vec<TriangleId>>,
    triangle_edges: Vec<[EdgeId; 3]>,
    links: Vec<Link>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HomologyRanks {
    pub d0: usize,
    pub d1: usize,
    pub d2: usize,
}

impl HomologyRanks {
    pub fn euler(&self) -> i64 {
        self.d0 as i64 - self.d1 as i64 + self.d2 as i64
    }
}

/// Result of [`double`]: the closed mesh and, for each original vertex, its
/// ids in copy A and copy B (equal for boundary vertices).
#[derive(Debug, Clone)]
pub struct Doubled {
    pub mesh: Mesh,
    pub copies: Vec<(VertexId, VertexId)>,
}

fn key(a: VertexId, b: VertexId) -> (VertexId, VertexId) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

impl Mesh {
    /// Builds and validates a mesh. The vertex count is the number of
    /// positions when given, otherwise one more than the largest id used.
    pub fn new(
        triangles: Vec<[VertexId; 3]>,
        positions: Option<Vec<[f64; 3]>>,
    ) -> Result<Self, MeshError> {
        if triangles.is_empty() {
            return Err(MeshError::Empty);
        }
        let max_id = triangles.iter().flatten().copied().max().unwrap_or(0);
        let vertex_count = match &positions {
            Some(p) => p.len(),
            None => max_id + 1,
        };
        for (t, tri) in triangles.iter().enumerate() {
            for &v in tri {
                if v >= vertex_count {
                    return Err(MeshError::InvalidVertex {
                        triangle: t,
                        vertex: v,
                        count: vertex_count,
                    });
                }
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(MeshError::DegenerateTriangle(t));
            }
        }

        let mut seen: HashMap<[VertexId; 3], TriangleId> = HashMap::new();
        for (t, tri) in triangles.iter().enumerate() {
            let mut s = *tri;
            s.sort_unstable();
            if let Some(&first) = seen.get(&s) {
                return Err(MeshError::DuplicateTriangle(first, t));
            }
            seen.insert(s, t);
        }

        let mut edge_set: BTreeSet<(VertexId, VertexId)> = BTreeSet::new();
        for tri in &triangles {
            for i in 0..3 {
                edge_set.insert(key(tri[i], tri[(i + 1) % 3]));
            }
        }
        let edges: Vec<[VertexId; 2]> = edge_set.iter().map(|&(a, b)| [a, b]).collect();
        let edge_index: HashMap<(VertexId, VertexId), EdgeId> = edge_set
            .iter()
            .enumerate()
            .map(|(i, &k)| (k, i))
            .collect();
        let mut edge_triangles = vec![Vec::new(); edges.len()];
        let mut triangle_edges = Vec::with_capacity(triangles.len());
        for (t, tri) in triangles.iter().enumerate() {
            let mut te = [0; 3];
            for i in 0..3 {
                // edge i is opposite vertex i
                let e = edge_index[&key(tri[(i + 1) % 3], tri[(i + 2) % 3])];
                edge_triangles[e].push(t);
                te[i] = e;
            }
            triangle_edges.push(te);
        }
        for (e, tris) in edge_triangles.iter().enumerate() {
            if tris.len() > 2 {
                return Err(MeshError::NonManifoldEdge(edges[e][0], edges[e][1], tris.len()));
            }
        }

        let mut vertex_triangles: Vec<Vec<TriangleId>> = vec![Vec::new(); vertex_count];
        for (t, tri) in triangles.iter().enumerate() {
            for &v in tri {
                vertex_triangles[v].push(t);
            }
        }
        let mut links = Vec::with_capacity(vertex_count);
        for v in 0..vertex_count {
            if vertex_triangles[v].is_empty() {
                return Err(MeshError::IsolatedVertex(v));
            }
            links.push(build_link(v, &vertex_triangles[v], &triangles)?);
        }

        Ok(Self {
            vertex_count,
            triangles,
            positions,
            edges,
            edge_index,
            edge_triangles,
            triangle_edges,
            links,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn triangles(&self) -> &[[VertexId; 3]] {
        &self.triangles
    }

    pub fn positions(&self) -> Option<&[[f64; 3]]> {
        self.positions.as_deref()
    }

    /// Replaces the vertex positions.
    pub fn with_positions(mut self, positions: Vec<[f64; 3]>) -> Result<Self, MeshError> {
        if positions.len() != self.vertex_count {
            return Err(MeshError::PositionCount {
                expected: self.vertex_count,
                got: positions.len(),
            });
        }
        self.positions = Some(positions);
        Ok(self)
    }

    /// Unordered edges as `[min, max]` pairs, sorted.
    pub fn edges(&self) -> &[[VertexId; 2]] {
        &self.edges
    }

    pub fn edge_id(&self, a: VertexId, b: VertexId) -> Option<EdgeId> {
        self.edge_index.get(&key(a, b)).copied()
    }

    pub fn edge_triangles(&self, e: EdgeId) -> &[TriangleId] {
        &self.edge_triangles[e]
    }

    /// Edge ids of a triangle; entry `i` is the edge opposite corner `i`.
    pub fn triangle_edges(&self, t: TriangleId) -> [EdgeId; 3] {
        self.triangle_edges[t]
    }

    pub fn is_boundary_edge(&self, e: EdgeId) -> bool {
        self.edge_triangles[e].len() == 1
    }

    pub fn boundary_edges(&self) -> Vec<EdgeId> {
        (0..self.edges.len())
            .filter(|&e| self.is_boundary_edge(e))
            .collect()
    }

    pub fn is_boundary_vertex(&self, v: VertexId) -> bool {
        !self.links[v].closed
    }

    pub fn boundary_vertices(&self) -> Vec<VertexId> {
        (0..self.vertex_count)
            .filter(|&v| self.is_boundary_vertex(v))
            .collect()
    }

    pub fn is_closed(&self) -> bool {
        self.edge_triangles.iter().all(|t| t.len() == 2)
    }

    pub fn link(&self, v: VertexId) -> &Link {
        &self.links[v]
    }

    /// The two boundary neighbours of a boundary vertex.
    pub fn boundary_neighbors(&self, v: VertexId) -> Option<(VertexId, VertexId)> {
        let link = &self.links[v];
        if link.closed {
            None
        } else {
            Some((link.vertices[0], *link.vertices.last().unwrap()))
        }
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count as i64 - self.edges.len() as i64 + self.triangles.len() as i64
    }

    /// Connected components as a per-vertex component label and the count.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let mut uf = UnionFind::new(self.vertex_count);
        for &[a, b] in &self.edges {
            uf.union(a, b);
        }
        uf.labels()
    }

    /// Boundary cycles as vertex sequences. Each boundary edge appears in
    /// exactly one cycle. Cycles start at their smallest vertex and proceed
    /// towards the smaller of its two boundary neighbours.
    pub fn boundary_components(&self) -> Vec<Vec<VertexId>> {
        let mut visited = vec![false; self.vertex_count];
        let mut cycles = Vec::new();
        for start in 0..self.vertex_count {
            if visited[start] || !self.is_boundary_vertex(start) {
                continue;
            }
            let mut cycle = vec![start];
            visited[start] = true;
            let (n0, n1) = self.boundary_neighbors(start).unwrap();
            let mut prev = start;
            let mut cur = n0.min(n1);
            while cur != start {
                visited[cur] = true;
                cycle.push(cur);
                let (a, b) = self.boundary_neighbors(cur).unwrap();
                let next = if a == prev { b } else { a };
                prev = cur;
                cur = next;
            }
            cycles.push(cycle);
        }
        cycles
    }
}

fn build_link(
    v: VertexId,
    tris: &[TriangleId],
    triangles: &[[VertexId; 3]],
) -> Result<Link, MeshError> {
    // neighbour -> [(other neighbour, triangle)]
    let mut adj: HashMap<VertexId, Vec<(VertexId, TriangleId)>> = HashMap::new();
    for &t in tris {
        let tri = triangles[t];
        let others: Vec<VertexId> = tri.iter().copied().filter(|&u| u != v).collect();
        let (a, b) = (others[0], others[1]);
        adj.entry(a).or_default().push((b, t));
        adj.entry(b).or_default().push((a, t));
    }
    let ends: Vec<VertexId> = {
        let mut e: Vec<VertexId> = adj
            .iter()
            .filter(|(_, n)| n.len() == 1)
            .map(|(&u, _)| u)
            .collect();
        e.sort_unstable();
        e
    };
    let closed = match ends.len() {
        0 => true,
        2 => false,
        _ => return Err(MeshError::PinchedVertex(v)),
    };
    let start = if closed {
        *adj.keys().min().unwrap()
    } else {
        ends[0]
    };

    let mut vertices = vec![start];
    let mut fan = Vec::new();
    let mut used_tris: BTreeSet<TriangleId> = BTreeSet::new();
    let mut cur = start;
    loop {
        let mut candidates: Vec<(VertexId, TriangleId)> = adj[&cur]
            .iter()
            .copied()
            .filter(|(_, t)| !used_tris.contains(t))
            .collect();
        if candidates.is_empty() {
            break;
        }
        candidates.sort_unstable();
        let (next, t) = candidates[0];
        used_tris.insert(t);
        fan.push(t);
        if next == start {
            break;
        }
        vertices.push(next);
        cur = next;
    }
    if used_tris.len() != tris.len() || vertices.len() != adj.len() {
        return Err(MeshError::PinchedVertex(v));
    }
    Ok(Link {
        vertices,
        fan,
        closed,
    })
}

/// Simplicial Z2 homology ranks from GF(2) boundary-matrix ranks.
pub fn homology_z2(mesh: &Mesh) -> HomologyRanks {
    let v = mesh.vertex_count();
    let e = mesh.edges().len();
    let f = mesh.triangles().len();
    let mut d1 = SparseMatrix::new(v);
    for &[a, b] in mesh.edges() {
        d1.push_column([a, b]);
    }
    let mut d2 = SparseMatrix::new(e);
    for t in 0..f {
        d2.push_column(mesh.triangle_edges(t));
    }
    let r1 = d1.rank();
    let r2 = d2.rank();
    HomologyRanks {
        d0: v - r1,
        d1: e - r1 - r2,
        d2: f - r2,
    }
}

/// Homology ranks from connectivity and χ alone: d0 is the number of
/// components, d2 the number of closed components, d1 = d0 + d2 − χ.
/// Used to cross-check [`homology_z2`].
pub fn homology_from_euler(mesh: &Mesh) -> HomologyRanks {
    let (labels, count) = mesh.components();
    let mut closed = vec![true; count];
    for e in 0..mesh.edges().len() {
        if mesh.is_boundary_edge(e) {
            closed[labels[mesh.edges()[e][0]]] = false;
        }
    }
    let d2 = closed.iter().filter(|&&c| c).count();
    let d1 = count as i64 + d2 as i64 - mesh.euler_characteristic();
    HomologyRanks {
        d0: count,
        d1: d1 as usize,
        d2,
    }
}

/// Glues two copies of `mesh` along their common boundary.
///
/// Boundary vertices are shared; interior vertices of copy B get fresh ids
/// after the originals. Copy B's triangles are reversed. Positions, when
/// present, are mirrored through `z = 0` on copy B.
pub fn double(mesh: &Mesh) -> Result<Doubled, MeshError> {
    let n = mesh.vertex_count();
    if mesh.is_closed() {
        return Err(MeshError::EmptyBoundary);
    }
    let mut copies = Vec::with_capacity(n);
    let mut next = n;
    for v in 0..n {
        if mesh.is_boundary_vertex(v) {
            copies.push((v, v));
        } else {
            copies.push((v, next));
            next += 1;
        }
    }
    let mut triangles = mesh.triangles().to_vec();
    for &[a, b, c] in mesh.triangles() {
        triangles.push([copies[a].1, copies[c].1, copies[b].1]);
    }
    let positions = mesh.positions().map(|p| {
        let mut out = p.to_vec();
        out.resize(next, [0.0; 3]);
        for v in 0..n {
            let (_, b) = copies[v];
            if b != v {
                let [x, y, z] = p[v];
                out[b] = [x, y, -z];
            }
        }
        out
    });
    let doubled = if let Some(pos) = positions {
        Mesh::new(triangles, Some(pos))?
    } else {
        // interior copies may be the largest ids; vertex count follows max id
        Mesh::new(triangles, None)?
    };
    Ok(Doubled {
        mesh: doubled,
        copies,
    })
}
