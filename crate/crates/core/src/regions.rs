//! Bands `M[a,b]` cut out by level values, and the quotient that collapses
//! constant boundary arcs.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::classify::Locus;
use crate::field::{FieldError, GenericityMode, ScalarField};
use crate::gf2::SparseMatrix;
use crate::mesh::{EdgeId, HomologyRanks, Mesh, MeshError, TriangleId, VertexId};
use crate::util::UnionFind;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RegionError {
    #[error("clip value {0} is attained by the field")]
    NonRegularClipValue(f64),
    #[error("empty clip interval ({0}, {1})")]
    InvalidInterval(f64, f64),
    #[error("collapsing constant boundary arcs does not give a surface: {0}")]
    NonManifoldQuotient(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    Lower,
    Upper,
}

/// A clip interval; `None` ends are unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    /// `M(a,b)` when true, `M[a,b]` otherwise. At regular values both have
    /// the same Euler characteristic.
    pub open: bool,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

impl Interval {
    pub fn open(a: f64, b: f64) -> Self {
        Self {
            lower: finite(a),
            upper: finite(b),
            open: true,
        }
    }

    pub fn closed(a: f64, b: f64) -> Self {
        Self {
            lower: finite(a),
            upper: finite(b),
            open: false,
        }
    }

    pub fn everything() -> Self {
        Self {
            lower: None,
            upper: None,
            open: true,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower.is_none_or(|a| x > a) && self.upper.is_none_or(|b| x < b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClipKey {
    Vertex(VertexId),
    Crossing(EdgeId, Side),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClipEdgeKind {
    /// The part of a mesh edge inside the band.
    Piece(EdgeId),
    /// A level segment inside one triangle.
    Level(TriangleId, Side),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryType {
    OriginalBoundary,
    LevelLower,
    LevelUpper,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClipVertex {
    pub key: ClipKey,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub position: Option<[f64; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClipEdge {
    pub ends: [usize; 2],
    pub kind: ClipEdgeKind,
    pub cells: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClipCell {
    pub triangle: TriangleId,
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
    pub component: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryCycle {
    pub edges: Vec<usize>,
    pub types: BTreeSet<BoundaryType>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClipComponent {
    pub cells: Vec<usize>,
    pub vertex_count: usize,
    pub edge_count: usize,
    pub chi: i64,
    pub boundary_cycles: Vec<BoundaryCycle>,
}

/// Polygonal complex for a band of a field. Cells are the non-empty
/// intersections of mesh triangles with the band (triangles, quads or
/// pentagons) and are never re-triangulated.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClippedComplex {
    pub interval: Interval,
    pub vertices: Vec<ClipVertex>,
    pub edges: Vec<ClipEdge>,
    pub cells: Vec<ClipCell>,
    pub components: Vec<ClipComponent>,
    /// Boundary points of `M` at the lower level; `None` when unbounded.
    pub beta_lower: Option<usize>,
    pub beta_upper: Option<usize>,
}

#[derive(Debug, Clone, Copy)]
enum Tag {
    Piece(EdgeId),
    Level(Side),
}

#[derive(Debug, Clone, Copy)]
struct PolyVertex {
    key: ClipKey,
    value: f64,
    position: Option<[f64; 3]>,
    /// Kind of the polygon side leaving this vertex.
    next: Tag,
}

fn lerp(a: [f64; 3], b: [f64; 3], s: f64) -> [f64; 3] {
    [0, 1, 2].map(|k| a[k] + s * (b[k] - a[k]))
}

/// One pass of Sutherland–Hodgman against `F ≥ level` (`keep_above`) or
/// `F ≤ level`, tracking which mesh edge each polygon side lies on.
fn clip_polygon(
    poly: Vec<PolyVertex>,
    mesh: &Mesh,
    field: &ScalarField,
    level: f64,
    keep_above: bool,
    side: Side,
) -> Vec<PolyVertex> {
    let inside = |x: f64| if keep_above { x > level } else { x < level };
    let n = poly.len();
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..n {
        let cur = poly[i];
        let nxt = poly[(i + 1) % n];
        let (cin, nin) = (inside(cur.value), inside(nxt.value));
        if cin {
            out.push(cur);
        }
        if cin != nin {
            let e = match cur.next {
                Tag::Piece(e) => e,
                Tag::Level(_) => unreachable!("level side cannot cross another level"),
            };
            // interpolate along the full mesh edge so shared crossings agree
            let [a, b] = mesh.edges()[e];
            let (fa, fb) = (field.value(a), field.value(b));
            let s = (level - fa) / (fb - fa);
            let position = mesh.positions().map(|p| lerp(p[a], p[b], s));
            let x = PolyVertex {
                key: ClipKey::Crossing(e, side),
                value: level,
                position,
                next: if cin { Tag::Level(side) } else { Tag::Piece(e) },
            };
            out.push(x);
        }
    }
    out
}

fn check_regular(field: &ScalarField, t: Option<f64>) -> Result<(), RegionError> {
    match t {
        Some(t) if !field.is_regular_value(t) => Err(RegionError::NonRegularClipValue(t)),
        _ => Ok(()),
    }
}

/// Number of points of `∂M` at the regular value `t`, counted directly as
/// boundary edges straddling `t`.
pub fn beta(field: &ScalarField, t: f64) -> usize {
    let mesh = field.mesh();
    mesh.boundary_edges()
        .into_iter()
        .filter(|&e| {
            let [a, b] = mesh.edges()[e];
            let (fa, fb) = (field.value(a), field.value(b));
            (fa < t && t < fb) || (fb < t && t < fa)
        })
        .count()
        + mesh
            .boundary_vertices()
            .into_iter()
            .filter(|&v| field.value(v) == t)
            .count()
}

/// `β(a+)`: the value of `β` on the open interval between `a` and the
/// smallest field value above it.
pub fn beta_right_limit(field: &ScalarField, a: f64) -> usize {
    beta(field, right_regular(field, a))
}

/// Midpoint between `a` and the smallest field value above it (or `a + 1`
/// when none is above).
pub fn right_regular(field: &ScalarField, a: f64) -> f64 {
    match field.sorted_levels().into_iter().find(|&x| x > a) {
        Some(next) if a.is_finite() => a + (next - a) / 2.0,
        Some(next) => next - 1.0,
        None => a + 1.0,
    }
}

/// Midpoint between `b` and the largest field value below it.
pub fn left_regular(field: &ScalarField, b: f64) -> f64 {
    match field.sorted_levels().into_iter().rev().find(|&x| x < b) {
        Some(prev) if b.is_finite() => b - (b - prev) / 2.0,
        Some(prev) => prev + 1.0,
        None => b - 1.0,
    }
}

/// Exact combinatorial clip of `field` to the band `interval`.
pub fn clip(field: &ScalarField, interval: Interval) -> Result<ClippedComplex, RegionError> {
    if let (Some(a), Some(b)) = (interval.lower, interval.upper) {
        if a >= b {
            return Err(RegionError::InvalidInterval(a, b));
        }
    }
    check_regular(field, interval.lower)?;
    check_regular(field, interval.upper)?;
    let mesh = field.mesh();

    let mut vertex_index: HashMap<ClipKey, usize> = HashMap::new();
    let mut vertices: Vec<ClipVertex> = Vec::new();
    let mut edge_index: HashMap<ClipEdgeKind, usize> = HashMap::new();
    let mut edges: Vec<ClipEdge> = Vec::new();
    let mut cells: Vec<ClipCell> = Vec::new();

    for (ti, tri) in mesh.triangles().iter().enumerate() {
        let tri_edges = mesh.triangle_edges(ti);
        let mut poly: Vec<PolyVertex> = (0..3)
            .map(|i| PolyVertex {
                key: ClipKey::Vertex(tri[i]),
                value: field.value(tri[i]),
                position: mesh.positions().map(|p| p[tri[i]]),
                // side i -> i+1 is the edge opposite corner i+2
                next: Tag::Piece(tri_edges[(i + 2) % 3]),
            })
            .collect();
        if let Some(a) = interval.lower {
            poly = clip_polygon(poly, mesh, field, a, true, Side::Lower);
        }
        if let Some(b) = interval.upper {
            poly = clip_polygon(poly, mesh, field, b, false, Side::Upper);
        }
        if poly.is_empty() {
            continue;
        }
        let cell = cells.len();
        let ids: Vec<usize> = poly
            .iter()
            .map(|pv| {
                *vertex_index.entry(pv.key).or_insert_with(|| {
                    vertices.push(ClipVertex {
                        key: pv.key,
                        value: pv.value,
                        position: pv.position,
                    });
                    vertices.len() - 1
                })
            })
            .collect();
        let mut cell_edges = Vec::with_capacity(poly.len());
        for i in 0..poly.len() {
            let kind = match poly[i].next {
                Tag::Piece(e) => ClipEdgeKind::Piece(e),
                Tag::Level(side) => ClipEdgeKind::Level(ti, side),
            };
            let ends = [ids[i], ids[(i + 1) % poly.len()]];
            let id = *edge_index.entry(kind).or_insert_with(|| {
                edges.push(ClipEdge {
                    ends,
                    kind,
                    cells: Vec::new(),
                });
                edges.len() - 1
            });
            edges[id].cells.push(cell);
            cell_edges.push(id);
        }
        cells.push(ClipCell {
            triangle: ti,
            vertices: ids,
            edges: cell_edges,
            component: 0,
        });
    }

    let boundary_of = |e: &ClipEdge| -> Option<BoundaryType> {
        if e.cells.len() != 1 {
            return None;
        }
        Some(match e.kind {
            ClipEdgeKind::Piece(_) => BoundaryType::OriginalBoundary,
            ClipEdgeKind::Level(_, Side::Lower) => BoundaryType::LevelLower,
            ClipEdgeKind::Level(_, Side::Upper) => BoundaryType::LevelUpper,
        })
    };

    // components: cells sharing an edge
    let mut uf = UnionFind::new(cells.len());
    for e in &edges {
        for w in e.cells.windows(2) {
            uf.union(w[0], w[1]);
        }
    }
    let (labels, count) = uf.labels();
    for (c, cell) in cells.iter_mut().enumerate() {
        cell.component = labels[c];
    }
    let mut components: Vec<ClipComponent> = (0..count)
        .map(|_| ClipComponent {
            cells: Vec::new(),
            vertex_count: 0,
            edge_count: 0,
            chi: 0,
            boundary_cycles: Vec::new(),
        })
        .collect();
    for (c, cell) in cells.iter().enumerate() {
        components[cell.component].cells.push(c);
    }
    let mut vertex_component = vec![usize::MAX; vertices.len()];
    for cell in &cells {
        for &v in &cell.vertices {
            vertex_component[v] = cell.component;
        }
    }
    for &c in &vertex_component {
        components[c].vertex_count += 1;
    }
    for e in &edges {
        components[cells[e.cells[0]].component].edge_count += 1;
    }
    for comp in &mut components {
        comp.chi = comp.vertex_count as i64 - comp.edge_count as i64 + comp.cells.len() as i64;
    }

    // boundary cycles: boundary edges form disjoint cycles
    let mut incident: HashMap<usize, Vec<usize>> = HashMap::new();
    for (i, e) in edges.iter().enumerate() {
        if boundary_of(e).is_some() {
            incident.entry(e.ends[0]).or_default().push(i);
            incident.entry(e.ends[1]).or_default().push(i);
        }
    }
    let mut seen = vec![false; edges.len()];
    for start in 0..edges.len() {
        if seen[start] || boundary_of(&edges[start]).is_none() {
            continue;
        }
        let mut cycle = vec![start];
        let mut types = BTreeSet::new();
        types.insert(boundary_of(&edges[start]).unwrap());
        seen[start] = true;
        let origin = edges[start].ends[0];
        let mut cur_edge = start;
        let mut cur = edges[start].ends[1];
        while cur != origin {
            let next = incident[&cur]
                .iter()
                .copied()
                .find(|&e| e != cur_edge && !seen[e])
                .expect("boundary of a surface is a union of cycles");
            seen[next] = true;
            types.insert(boundary_of(&edges[next]).unwrap());
            cycle.push(next);
            let [p, q] = edges[next].ends;
            cur = if p == cur { q } else { p };
            cur_edge = next;
        }
        let comp = cells[edges[start].cells[0]].component;
        components[comp].boundary_cycles.push(BoundaryCycle {
            edges: cycle,
            types,
        });
    }

    let count_beta = |side: Side| {
        vertices
            .iter()
            .filter(|v| matches!(v.key, ClipKey::Crossing(e, s) if s == side && mesh.is_boundary_edge(e)))
            .count()
    };
    let beta_lower = interval.lower.map(|_| count_beta(Side::Lower));
    let beta_upper = interval.upper.map(|_| count_beta(Side::Upper));

    Ok(ClippedComplex {
        interval,
        vertices,
        edges,
        cells,
        components,
        beta_lower,
        beta_upper,
    })
}

impl ClippedComplex {
    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn boundary_type(&self, edge: usize) -> Option<BoundaryType> {
        let e = &self.edges[edge];
        if e.cells.len() != 1 {
            return None;
        }
        Some(match e.kind {
            ClipEdgeKind::Piece(_) => BoundaryType::OriginalBoundary,
            ClipEdgeKind::Level(_, Side::Lower) => BoundaryType::LevelLower,
            ClipEdgeKind::Level(_, Side::Upper) => BoundaryType::LevelUpper,
        })
    }

    /// Z2 homology of the polygonal complex.
    pub fn homology_z2(&self) -> HomologyRanks {
        let mut d1 = SparseMatrix::new(self.vertices.len());
        for e in &self.edges {
            d1.push_column(e.ends);
        }
        let mut d2 = SparseMatrix::new(self.edges.len());
        for c in &self.cells {
            d2.push_column(c.edges.iter().copied());
        }
        let (r1, r2) = (d1.rank(), d2.rank());
        HomologyRanks {
            d0: self.vertices.len() - r1,
            d1: self.edges.len() - r1 - r2,
            d2: self.cells.len() - r2,
        }
    }
}

/// `V − E + F` over the polygonal cells.
pub fn region_euler(c: &ClippedComplex) -> i64 {
    c.vertices.len() as i64 - c.edges.len() as i64 + c.cells.len() as i64
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnnulusCheck {
    pub per_component: Vec<bool>,
    pub all: bool,
    /// First component that is not an annulus.
    pub witness: Option<usize>,
}

/// A component passes when `χ = 0` and it has exactly two boundary cycles,
/// each made only of level segments.
pub fn annulus_check(c: &ClippedComplex) -> AnnulusCheck {
    let per_component: Vec<bool> = c
        .components
        .iter()
        .map(|comp| {
            comp.chi == 0
                && comp.boundary_cycles.len() == 2
                && comp
                    .boundary_cycles
                    .iter()
                    .all(|cy| !cy.types.contains(&BoundaryType::OriginalBoundary))
        })
        .collect();
    let witness = per_component.iter().position(|&ok| !ok);
    AnnulusCheck {
        all: witness.is_none(),
        per_component,
        witness,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CollapsedComponent {
    /// Original vertices of the arc or cycle.
    pub vertices: Vec<VertexId>,
    pub closed_cycle: bool,
    pub value: f64,
    pub new_vertex: VertexId,
    pub locus: Locus,
}

#[derive(Debug, Clone)]
pub struct QuotientResult {
    pub mesh: Arc<Mesh>,
    pub field: ScalarField,
    /// Original vertex → quotient vertex.
    pub collapse_map: Vec<VertexId>,
    pub collapsed: Vec<CollapsedComponent>,
}

fn non_manifold(e: MeshError) -> RegionError {
    RegionError::NonManifoldQuotient(e.to_string())
}

/// Collapses each connected set of constant boundary edges to a single
/// vertex. Collapsed closed cycles become interior vertices (the quotient
/// cones the cycle off); collapsed arcs become boundary vertices.
pub fn quotient_constant_boundary(field: &ScalarField) -> Result<QuotientResult, RegionError> {
    let mesh = field.mesh();
    let n = mesh.vertex_count();
    let constant: BTreeSet<EdgeId> = field.constant_boundary_edges().into_iter().collect();
    let mut uf = UnionFind::new(n);
    for &e in &constant {
        let [a, b] = mesh.edges()[e];
        uf.union(a, b);
    }
    let (labels, _) = uf.labels();

    let mut groups: HashMap<usize, Vec<VertexId>> = HashMap::new();
    for v in 0..n {
        groups.entry(labels[v]).or_default().push(v);
    }
    let mut edge_count: HashMap<usize, usize> = HashMap::new();
    for &e in &constant {
        *edge_count.entry(labels[mesh.edges()[e][0]]).or_insert(0) += 1;
    }

    let mut collapse_map = vec![usize::MAX; n];
    let mut group_vertex: HashMap<usize, VertexId> = HashMap::new();
    let mut next = 0;
    for v in 0..n {
        let label = labels[v];
        if let Some(&id) = group_vertex.get(&label) {
            collapse_map[v] = id;
        } else {
            group_vertex.insert(label, next);
            collapse_map[v] = next;
            next += 1;
        }
    }

    let mut triangles = Vec::with_capacity(mesh.triangles().len());
    for (ti, tri) in mesh.triangles().iter().enumerate() {
        let mapped = tri.map(|v| collapse_map[v]);
        if mapped[0] != mapped[1] && mapped[1] != mapped[2] && mapped[0] != mapped[2] {
            triangles.push(mapped);
            continue;
        }
        // the only admissible degenerate triangle has one constant boundary
        // edge and a third vertex outside that group
        let edges = mesh.triangle_edges(ti);
        let ok = (0..3).any(|i| {
            constant.contains(&edges[i]) && mapped[i] != mapped[(i + 1) % 3]
                && mapped[i] != mapped[(i + 2) % 3]
        });
        let collapsed_edges = (0..3)
            .filter(|&i| mapped[(i + 1) % 3] == mapped[(i + 2) % 3])
            .count();
        if !ok || collapsed_edges != 1 {
            return Err(RegionError::NonManifoldQuotient(format!(
                "triangle {ti} would pinch"
            )));
        }
    }

    let positions = mesh.positions().map(|p| {
        let mut sum = vec![[0.0; 3]; next];
        let mut count = vec![0usize; next];
        for v in 0..n {
            let q = collapse_map[v];
            for k in 0..3 {
                sum[q][k] += p[v][k];
            }
            count[q] += 1;
        }
        sum.into_iter()
            .zip(count)
            .map(|(s, c)| s.map(|x| x / c as f64))
            .collect::<Vec<_>>()
    });
    let quotient = Arc::new(Mesh::new(triangles, positions).map_err(non_manifold)?);
    if quotient.vertex_count() != next {
        return Err(RegionError::NonManifoldQuotient(
            "a vertex lost all its triangles".into(),
        ));
    }

    let mut values = vec![0.0; next];
    for v in 0..n {
        values[collapse_map[v]] = field.value(v);
    }
    let qfield = match ScalarField::new(quotient.clone(), values.clone(), GenericityMode::StrictInterior)
    {
        Ok(f) => f,
        Err(_) => ScalarField::new(quotient.clone(), values, GenericityMode::RelaxedBoundary)?,
    };

    let mut collapsed: Vec<CollapsedComponent> = groups
        .into_iter()
        .filter(|(_, vs)| vs.len() > 1)
        .map(|(label, vs)| {
            let new_vertex = group_vertex[&label];
            let closed_cycle = edge_count.get(&label).copied().unwrap_or(0) == vs.len();
            CollapsedComponent {
                value: field.value(vs[0]),
                vertices: vs,
                closed_cycle,
                new_vertex,
                locus: if quotient.is_boundary_vertex(new_vertex) {
                    Locus::Boundary
                } else {
                    Locus::Interior
                },
            }
        })
        .collect();
    collapsed.sort_by_key(|c| c.new_vertex);

    Ok(QuotientResult {
        mesh: quotient,
        field: qfield,
        collapse_map,
        collapsed,
    })
}
