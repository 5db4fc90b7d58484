//! Level-set networks `X = F⁻¹(t)` and their counting identities.
//!
//! Inside each triangle the level set of a linear function is a straight
//! segment (or a single corner). Segments meet at crossing points on mesh
//! edges and at mesh vertices lying exactly on the level. Nodes of the
//! network are those vertices plus the crossings on boundary edges; arcs
//! are maximal chains of segments between nodes, and loops are closed
//! chains that meet no node.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;
use thiserror::Error;

use crate::classify::ClassificationSummary;
use crate::exact::{frac, half, int, Rational};
use crate::field::ScalarField;
use crate::mesh::{homology_z2, EdgeId, TriangleId, VertexId};
use crate::util::UnionFind;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NetworkError {
    #[error("constant boundary arc through vertex {0} lies on the level; quotient the field first")]
    RelaxedBoundaryAtLevel(VertexId),
}

/// Where a point of the level set sits on the mesh.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LevelPoint {
    Vertex(VertexId),
    Crossing(EdgeId),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Node {
    pub point: LevelPoint,
    pub valence: usize,
    /// Crossing of a boundary edge rather than a mesh vertex.
    pub synthetic: bool,
    /// Mesh vertex on `∂M`, or a synthetic boundary crossing.
    pub on_boundary: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub position: Option<[f64; 3]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NetworkArc {
    pub from: usize,
    pub to: usize,
    /// Interior edges crossed between the two nodes, in order.
    pub crossings: Vec<EdgeId>,
    pub triangles: Vec<TriangleId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NetworkLoop {
    pub crossings: Vec<EdgeId>,
    pub triangles: Vec<TriangleId>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelNetwork {
    pub level: f64,
    pub nodes: Vec<Node>,
    pub arcs: Vec<NetworkArc>,
    pub loops: Vec<NetworkLoop>,
    #[serde(skip)]
    crossing_positions: HashMap<EdgeId, [f64; 3]>,
}

/// One straight piece of the level set inside a triangle.
#[derive(Debug, Clone, Copy)]
struct Segment {
    ends: [LevelPoint; 2],
    triangle: TriangleId,
}

impl LevelNetwork {
    pub fn isolated_nodes(&self) -> Vec<usize> {
        (0..self.nodes.len())
            .filter(|&i| self.nodes[i].valence == 0)
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty() && self.loops.is_empty()
    }

    /// Node valence histogram `|V_n|`.
    pub fn histogram(&self) -> BTreeMap<usize, usize> {
        let mut h = BTreeMap::new();
        for n in &self.nodes {
            *h.entry(n.valence).or_insert(0) += 1;
        }
        h
    }

    pub fn node_of_vertex(&self, v: VertexId) -> Option<&Node> {
        self.nodes.iter().find(|n| n.point == LevelPoint::Vertex(v))
    }

    /// Position of a crossing on an edge, when the mesh has positions.
    pub fn crossing_position(&self, e: EdgeId) -> Option<[f64; 3]> {
        self.crossing_positions.get(&e).copied()
    }

    /// Number of connected components (loops included) and first Betti
    /// number of the network viewed as a graph.
    pub fn betti(&self) -> (usize, usize) {
        let mut uf = UnionFind::new(self.nodes.len());
        for a in &self.arcs {
            uf.union(a.from, a.to);
        }
        let (_, comps) = uf.labels();
        let d0 = comps + self.loops.len();
        let d1 = self.arcs.len() + comps + self.loops.len() - self.nodes.len();
        (d0, d1)
    }
}

fn cmp_level(x: f64, t: f64) -> i8 {
    if x > t {
        1
    } else if x < t {
        -1
    } else {
        0
    }
}

/// Extracts the level network of `field` at value `t`.
pub fn extract_level_network(field: &ScalarField, t: f64) -> Result<LevelNetwork, NetworkError> {
    let mesh = field.mesh();
    let vals = field.values();

    for e in field.constant_boundary_edges() {
        let [a, _] = mesh.edges()[e];
        if vals[a] == t {
            return Err(NetworkError::RelaxedBoundaryAtLevel(a));
        }
    }

    let mut segments = Vec::new();
    for (ti, tri) in mesh.triangles().iter().enumerate() {
        let s = tri.map(|v| cmp_level(vals[v], t));
        let edges = mesh.triangle_edges(ti);
        let zeros: Vec<usize> = (0..3).filter(|&i| s[i] == 0).collect();
        match zeros.len() {
            0 => {
                // crossing on every edge whose endpoints differ in sign
                let crossed: Vec<EdgeId> = (0..3)
                    .filter(|&i| s[(i + 1) % 3] != s[(i + 2) % 3])
                    .map(|i| edges[i])
                    .collect();
                if crossed.len() == 2 {
                    segments.push(Segment {
                        ends: [LevelPoint::Crossing(crossed[0]), LevelPoint::Crossing(crossed[1])],
                        triangle: ti,
                    });
                }
            }
            1 => {
                let i = zeros[0];
                if s[(i + 1) % 3] != s[(i + 2) % 3] {
                    segments.push(Segment {
                        ends: [LevelPoint::Vertex(tri[i]), LevelPoint::Crossing(edges[i])],
                        triangle: ti,
                    });
                }
            }
            // an edge with both ends on the level is a tied edge; strict
            // fields have none and relaxed ones were rejected above
            _ => unreachable!("tied edge inside triangle {ti}"),
        }
    }

    let is_node = |p: &LevelPoint| match *p {
        LevelPoint::Vertex(_) => true,
        LevelPoint::Crossing(e) => mesh.is_boundary_edge(e),
    };

    let mut incident: BTreeMap<LevelPoint, Vec<usize>> = BTreeMap::new();
    for v in 0..mesh.vertex_count() {
        if vals[v] == t {
            incident.insert(LevelPoint::Vertex(v), Vec::new());
        }
    }
    for (i, seg) in segments.iter().enumerate() {
        for p in seg.ends {
            incident.entry(p).or_default().push(i);
        }
    }

    let positions = mesh.positions();
    let mut crossing_positions = HashMap::new();
    if let Some(pos) = positions {
        for p in incident.keys() {
            if let LevelPoint::Crossing(e) = *p {
                let [a, b] = mesh.edges()[e];
                let s = (t - vals[a]) / (vals[b] - vals[a]);
                let q = [0, 1, 2].map(|k| pos[a][k] + s * (pos[b][k] - pos[a][k]));
                crossing_positions.insert(e, q);
            }
        }
    }

    let mut node_index: HashMap<LevelPoint, usize> = HashMap::new();
    let mut nodes = Vec::new();
    for (p, segs) in &incident {
        if is_node(p) {
            node_index.insert(*p, nodes.len());
            let (synthetic, on_boundary, position) = match *p {
                LevelPoint::Vertex(v) => (false, mesh.is_boundary_vertex(v), positions.map(|x| x[v])),
                LevelPoint::Crossing(e) => (true, true, crossing_positions.get(&e).copied()),
            };
            nodes.push(Node {
                point: *p,
                valence: segs.len(),
                synthetic,
                on_boundary,
                position,
            });
        }
    }

    let other_end = |seg: &Segment, p: LevelPoint| if seg.ends[0] == p { seg.ends[1] } else { seg.ends[0] };

    let mut used = vec![false; segments.len()];
    let mut arcs = Vec::new();
    for (p, segs) in &incident {
        if !is_node(p) {
            continue;
        }
        for &first in segs {
            if used[first] {
                continue;
            }
            used[first] = true;
            let mut crossings = Vec::new();
            let mut triangles = vec![segments[first].triangle];
            let mut seg = first;
            let mut cur = other_end(&segments[first], *p);
            while !is_node(&cur) {
                if let LevelPoint::Crossing(e) = cur {
                    crossings.push(e);
                }
                let next = incident[&cur]
                    .iter()
                    .copied()
                    .find(|&s| s != seg)
                    .expect("interior crossing has two segments");
                used[next] = true;
                triangles.push(segments[next].triangle);
                cur = other_end(&segments[next], cur);
                seg = next;
            }
            arcs.push(NetworkArc {
                from: node_index[p],
                to: node_index[&cur],
                crossings,
                triangles,
            });
        }
    }

    let mut loops = Vec::new();
    for start in 0..segments.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let origin = segments[start].ends[0];
        let mut crossings = Vec::new();
        let mut triangles = vec![segments[start].triangle];
        let mut seg = start;
        let mut cur = segments[start].ends[1];
        while cur != origin {
            if let LevelPoint::Crossing(e) = cur {
                crossings.push(e);
            }
            let next = incident[&cur]
                .iter()
                .copied()
                .find(|&s| s != seg)
                .expect("interior crossing has two segments");
            used[next] = true;
            triangles.push(segments[next].triangle);
            cur = other_end(&segments[next], cur);
            seg = next;
        }
        if let LevelPoint::Crossing(e) = origin {
            crossings.push(e);
        }
        loops.push(NetworkLoop {
            crossings,
            triangles,
        });
    }

    Ok(LevelNetwork {
        level: t,
        nodes,
        arcs,
        loops,
        crossing_positions,
    })
}

/// Which interior extrema count towards `S*` in the slice bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SStarRule {
    /// All interior local extrema with `F ≠ t`.
    OffLevel,
    /// Interior local minima in `{F < t}` and interior local maxima in
    /// `{F > t}`.
    OneSided,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SliceBounds {
    pub rule: SStarRule,
    #[serde(serialize_with = "frac")]
    pub lhs: Rational,
    #[serde(serialize_with = "frac")]
    pub bound_v1: Rational,
    #[serde(serialize_with = "frac")]
    pub bound_j: Rational,
    #[serde(serialize_with = "frac")]
    pub bound_k: Rational,
    pub v1: usize,
    pub j: usize,
    pub k: usize,
    pub d1_mesh: usize,
    pub s_star: usize,
    /// `lhs ≤ bound_v1 ≤ bound_j ≤ bound_k`.
    pub holds: [bool; 3],
    pub tight: [bool; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetworkReport {
    pub level: f64,
    pub chi: i64,
    #[serde(serialize_with = "frac")]
    pub chi_from_nodes: Rational,
    pub d0: usize,
    pub d1: usize,
    pub d0_nonisolated: usize,
    pub histogram: BTreeMap<usize, usize>,
    #[serde(serialize_with = "frac")]
    pub identity_lhs: Rational,
    #[serde(serialize_with = "frac")]
    pub identity_rhs: Rational,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slice: Option<SliceBounds>,
}

fn base_report(x: &LevelNetwork) -> NetworkReport {
    let (d0, d1) = x.betti();
    let histogram = x.histogram();
    let chi_from_nodes: Rational = histogram
        .iter()
        .map(|(&n, &c)| half((2 - n as i64) * c as i64))
        .sum();
    let isolated = histogram.get(&0).copied().unwrap_or(0);
    NetworkReport {
        level: x.level,
        chi: d0 as i64 - d1 as i64,
        chi_from_nodes,
        d0,
        d1,
        d0_nonisolated: d0 - isolated,
        histogram,
        identity_lhs: int(0),
        identity_rhs: int(0),
        pass: false,
        slice: None,
    }
}

/// `χ(X)` computed as `d0 − d1` and as the node sum `Σ ½(2 − v)`.
pub fn network_euler(x: &LevelNetwork) -> NetworkReport {
    let mut r = base_report(x);
    r.identity_lhs = int(r.chi);
    r.identity_rhs = r.chi_from_nodes;
    r.pass = r.identity_lhs == r.identity_rhs;
    r
}

fn excess(histogram: &BTreeMap<usize, usize>) -> Rational {
    histogram
        .range(3..)
        .map(|(&n, &c)| half((n as i64 - 2) * c as i64))
        .sum()
}

/// `Σ_{n≥3} ½(n−2)|V_n| = ½|V_1| + d1(X) − d0(X∖V_0)`.
pub fn counting_identity(x: &LevelNetwork) -> NetworkReport {
    let mut r = base_report(x);
    let v1 = r.histogram.get(&1).copied().unwrap_or(0) as i64;
    r.identity_lhs = excess(&r.histogram);
    r.identity_rhs = half(v1) + int(r.d1 as i64) - int(r.d0_nonisolated as i64);
    r.pass = r.identity_lhs == r.identity_rhs;
    r
}

/// Evaluates the chained slice bounds at level `t`:
///
/// `½Σ_{n≥3}(n−2)|V_n| + d0(X∖V0) ≤ ½|V1| + d1(M) + |S*| ≤ ½|J| + d1(M) + |S*| ≤ ½k + d1(M) + |S*|`.
pub fn slice_bound(
    field: &ScalarField,
    t: f64,
    summary: &ClassificationSummary,
    rule: SStarRule,
) -> Result<NetworkReport, NetworkError> {
    let x = extract_level_network(field, t)?;
    let mut r = counting_identity(&x);
    let d1_mesh = homology_z2(field.mesh()).d1;
    let s_star = summary
        .q_interior
        .iter()
        .filter(|&&v| {
            let fv = field.value(v);
            let is_min = summary.get(v).kind == crate::classify::CriticalKind::LocalMin;
            match rule {
                SStarRule::OffLevel => fv != t,
                SStarRule::OneSided => (is_min && fv < t) || (!is_min && fv > t),
            }
        })
        .count();
    let v1 = r.histogram.get(&1).copied().unwrap_or(0);
    let k = x.nodes.iter().filter(|n| n.on_boundary).count();
    let synthetic = x.nodes.iter().filter(|n| n.synthetic).count();
    let j = summary.j_at(field, t).len() + synthetic;
    let lhs = excess(&r.histogram) + int(r.d0_nonisolated as i64);
    let tail = int(d1_mesh as i64 + s_star as i64);
    let bound_v1 = half(v1 as i64) + tail;
    let bound_j = half(j as i64) + tail;
    let bound_k = half(k as i64) + tail;
    let holds = [lhs <= bound_v1, bound_v1 <= bound_j, bound_j <= bound_k];
    let tight = [lhs == bound_v1, bound_v1 == bound_j, bound_j == bound_k];
    r.pass = r.pass && holds.iter().all(|&h| h);
    r.slice = Some(SliceBounds {
        rule,
        lhs,
        bound_v1,
        bound_j,
        bound_k,
        v1,
        j,
        k,
        d1_mesh,
        s_star,
        holds,
        tight,
    });
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::GenericityMode;
    use crate::mesh::Mesh;
    use std::sync::Arc;

    fn fan(n: usize, values: impl Fn(usize) -> f64) -> ScalarField {
        let tris = (0..n).map(|i| [0, 1 + i, 1 + (i + 1) % n]).collect();
        let mesh = Arc::new(Mesh::new(tris, None).unwrap());
        let vals = (0..=n).map(values).collect();
        ScalarField::new(mesh, vals, GenericityMode::StrictInterior).unwrap()
    }

    #[test]
    fn saddle_at_center() {
        // signs + − + − around the center, magnitudes distinct
        let f = fan(8, |i| {
            if i == 0 {
                0.0
            } else {
                let s = if ((i - 1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
                s * (1.0 + 0.1 * i as f64)
            }
        });
        let x = extract_level_network(&f, 0.0).unwrap();
        assert_eq!(x.nodes.len(), 5);
        assert_eq!(x.node_of_vertex(0).unwrap().valence, 4);
        assert_eq!(x.arcs.len(), 4);
        assert!(x.loops.is_empty());
        let e = network_euler(&x);
        assert!(e.pass);
        assert_eq!(e.chi, 1);
        let c = counting_identity(&x);
        assert_eq!(c.identity_lhs, int(1));
        assert_eq!(c.identity_rhs, int(1));
        assert!(c.pass);
    }

    #[test]
    fn loop_around_minimum() {
        let f = fan(6, |i| if i == 0 { -1.0 } else { i as f64 });
        let x = extract_level_network(&f, 0.5).unwrap();
        assert!(x.nodes.is_empty());
        assert_eq!(x.loops.len(), 1);
        assert_eq!(x.loops[0].crossings.len(), 6);
        let e = network_euler(&x);
        assert_eq!((e.chi, e.d0, e.d1), (0, 1, 1));
        let c = counting_identity(&x);
        assert!(c.pass);
        assert_eq!(c.identity_rhs, int(0));
    }

    #[test]
    fn above_max_is_empty() {
        let f = fan(6, |i| i as f64);
        let x = extract_level_network(&f, 100.0).unwrap();
        assert!(x.is_empty());
        let e = network_euler(&x);
        assert_eq!(e.chi, 0);
        assert!(e.pass);
    }

    #[test]
    fn isolated_boundary_minimum() {
        let f = fan(6, |i| i as f64 + if i == 0 { 10.0 } else { 0.0 });
        // vertex 1 is the global minimum, on the rim
        let x = extract_level_network(&f, 1.0).unwrap();
        assert_eq!(x.nodes.len(), 1);
        assert_eq!(x.isolated_nodes(), vec![0]);
        let c = counting_identity(&x);
        assert_eq!(c.d0_nonisolated, 0);
        assert!(c.pass);
    }

    #[test]
    fn relaxed_level_rejected() {
        let tris = (0..5).map(|i| [0, 1 + i, 1 + (i + 1) % 5]).collect();
        let mesh = Arc::new(Mesh::new(tris, None).unwrap());
        let f = ScalarField::new(
            mesh,
            vec![0.0, 1.0, 1.0, 2.0, 3.0, 4.0],
            GenericityMode::RelaxedBoundary,
        )
        .unwrap();
        assert!(matches!(
            extract_level_network(&f, 1.0),
            Err(NetworkError::RelaxedBoundaryAtLevel(_))
        ));
        assert!(extract_level_network(&f, 2.0).is_ok());
    }
}
