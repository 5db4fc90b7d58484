//! Valence, critical-point kind and saddle multiplicity of every vertex.
//!
//! The valence of a vertex is the number of level arcs leaving it. For a PL
//! field this is the number of sign changes of `F − F(v)` along the link:
//! cyclically for interior vertices, along the path between the two
//! boundary neighbours for boundary vertices.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::Serialize;
use thiserror::Error;

use crate::field::{ScalarField, Sign};
use crate::mesh::VertexId;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClassifyError {
    #[error("vertex {0} touches a constant boundary arc; quotient the field first")]
    RelaxedBoundaryAtVertex(VertexId),
    #[error("mesh has no vertex positions")]
    MissingPositions,
    #[error("vertex {0} is on the boundary; the index is defined at interior vertices")]
    BoundaryVertex(VertexId),
    #[error("degenerate triangle geometry around vertex {0}")]
    DegenerateGeometry(VertexId),
    #[error("level direction jumps by at least a quarter turn around vertex {0}; mesh too coarse")]
    TooCoarse(VertexId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Locus {
    Interior,
    Boundary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CriticalKind {
    LocalMin,
    LocalMax,
    Regular,
    InteriorSaddle,
    BoundaryRegular,
    BoundaryExtremum,
    BoundarySaddle,
}

/// Behaviour of `F|∂M` at a boundary vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryRestriction {
    LocalMin,
    LocalMax,
    Neither,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct VertexClassification {
    pub vertex: VertexId,
    pub locus: Locus,
    pub valence: usize,
    pub kind: CriticalKind,
    pub multiplicity: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boundary_restriction: Option<BoundaryRestriction>,
}

impl VertexClassification {
    /// Interior local extremum (valence 0 at an interior vertex).
    pub fn is_interior_extremum(&self) -> bool {
        matches!(self.kind, CriticalKind::LocalMin | CriticalKind::LocalMax)
    }

    /// Local extremum of `F` itself, interior or boundary.
    pub fn is_extremum_of_field(&self) -> bool {
        self.valence == 0
    }

    pub fn is_boundary_min(&self) -> bool {
        self.boundary_restriction == Some(BoundaryRestriction::LocalMin)
    }

    pub fn is_boundary_max(&self) -> bool {
        self.boundary_restriction == Some(BoundaryRestriction::LocalMax)
    }

    /// `1 − v/2` at interior vertices, as a doubled integer `2 − v`.
    pub fn twice_hopf(&self) -> i64 {
        2 - self.valence as i64
    }
}

/// Local extrema counts of `F|∂M` on one boundary cycle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundaryCycleExtrema {
    pub cycle: Vec<VertexId>,
    pub minima: usize,
    pub maxima: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationSummary {
    pub vertices: Vec<VertexClassification>,
    /// Interior local extrema together with local minima of `F|∂M`.
    #[serde(rename = "Q")]
    pub q: Vec<VertexId>,
    #[serde(rename = "Q_int")]
    pub q_interior: Vec<VertexId>,
    #[serde(rename = "Q_bd")]
    pub q_boundary: Vec<VertexId>,
    /// Local extrema of `F|∂M` that are not local extrema of `F`.
    #[serde(rename = "A")]
    pub a: Vec<VertexId>,
    /// Boundary vertices that are neither local max nor min of `F|∂M`;
    /// `J(t)` is the subset at value `t`.
    pub boundary_neither: Vec<VertexId>,
    #[serde(rename = "V_int")]
    pub interior_histogram: BTreeMap<usize, usize>,
    #[serde(rename = "V_bd")]
    pub boundary_histogram: BTreeMap<usize, usize>,
    #[serde(rename = "N")]
    pub interior_multiplicity: usize,
    #[serde(rename = "s_bd")]
    pub boundary_multiplicity: usize,
    pub boundary_cycles: Vec<BoundaryCycleExtrema>,
}

impl ClassificationSummary {
    /// Total saddle multiplicity, interior and boundary.
    pub fn total_multiplicity(&self) -> usize {
        self.interior_multiplicity + self.boundary_multiplicity
    }

    /// `J(t)`: boundary vertices at value `t` that are neither local maxima
    /// nor local minima of `F|∂M`.
    pub fn j_at(&self, field: &ScalarField, t: f64) -> Vec<VertexId> {
        self.boundary_neither
            .iter()
            .copied()
            .filter(|&v| field.value(v) == t)
            .collect()
    }

    pub fn get(&self, v: VertexId) -> &VertexClassification {
        &self.vertices[v]
    }
}

fn link_signs(field: &ScalarField, v: VertexId) -> Result<Vec<Sign>, ClassifyError> {
    let fv = field.value(v);
    field
        .mesh()
        .link(v)
        .vertices
        .iter()
        .map(|&u| {
            let fu = field.value(u);
            if fu > fv {
                Ok(Sign::Plus)
            } else if fu < fv {
                Ok(Sign::Minus)
            } else {
                Err(ClassifyError::RelaxedBoundaryAtVertex(v))
            }
        })
        .collect()
}

fn sign_changes(signs: &[Sign], cyclic: bool) -> usize {
    let mut changes = signs.windows(2).filter(|w| w[0] != w[1]).count();
    if cyclic && signs.len() > 1 && signs[0] != signs[signs.len() - 1] {
        changes += 1;
    }
    changes
}

/// Number of level arcs leaving `v`.
pub fn valence(field: &ScalarField, v: VertexId) -> Result<usize, ClassifyError> {
    let signs = link_signs(field, v)?;
    Ok(sign_changes(&signs, field.mesh().link(v).closed))
}

pub fn classify_vertex(
    field: &ScalarField,
    v: VertexId,
) -> Result<VertexClassification, ClassifyError> {
    let signs = link_signs(field, v)?;
    let link = field.mesh().link(v);
    let valence = sign_changes(&signs, link.closed);
    if link.closed {
        let (kind, multiplicity) = match valence {
            0 if signs[0] == Sign::Plus => (CriticalKind::LocalMin, 0),
            0 => (CriticalKind::LocalMax, 0),
            2 => (CriticalKind::Regular, 0),
            _ => (CriticalKind::InteriorSaddle, valence / 2 - 1),
        };
        Ok(VertexClassification {
            vertex: v,
            locus: Locus::Interior,
            valence,
            kind,
            multiplicity,
            boundary_restriction: None,
        })
    } else {
        let first = signs[0];
        let last = signs[signs.len() - 1];
        let restriction = match (first, last) {
            (Sign::Plus, Sign::Plus) => BoundaryRestriction::LocalMin,
            (Sign::Minus, Sign::Minus) => BoundaryRestriction::LocalMax,
            _ => BoundaryRestriction::Neither,
        };
        let (kind, multiplicity) = match valence {
            0 => (CriticalKind::BoundaryExtremum, 0),
            1 => (CriticalKind::BoundaryRegular, 0),
            v if v % 2 == 0 => (CriticalKind::BoundarySaddle, v / 2),
            v => (CriticalKind::BoundarySaddle, (v - 1) / 2),
        };
        Ok(VertexClassification {
            vertex: v,
            locus: Locus::Boundary,
            valence,
            kind,
            multiplicity,
            boundary_restriction: Some(restriction),
        })
    }
}

/// Classifies every vertex and assembles the counting sets and histograms.
pub fn classify_all(field: &ScalarField) -> Result<ClassificationSummary, ClassifyError> {
    let mesh = field.mesh();
    let vertices = (0..mesh.vertex_count())
        .map(|v| classify_vertex(field, v))
        .collect::<Result<Vec<_>, _>>()?;

    let mut q_interior = Vec::new();
    let mut q_boundary = Vec::new();
    let mut a = Vec::new();
    let mut boundary_neither = Vec::new();
    let mut interior_histogram = BTreeMap::new();
    let mut boundary_histogram = BTreeMap::new();
    let mut interior_multiplicity = 0;
    let mut boundary_multiplicity = 0;
    for c in &vertices {
        match c.locus {
            Locus::Interior => {
                *interior_histogram.entry(c.valence).or_insert(0) += 1;
                interior_multiplicity += c.multiplicity;
                if c.is_interior_extremum() {
                    q_interior.push(c.vertex);
                }
            }
            Locus::Boundary => {
                *boundary_histogram.entry(c.valence).or_insert(0) += 1;
                boundary_multiplicity += c.multiplicity;
                match c.boundary_restriction {
                    Some(BoundaryRestriction::LocalMin) => q_boundary.push(c.vertex),
                    Some(BoundaryRestriction::Neither) => boundary_neither.push(c.vertex),
                    _ => {}
                }
                if c.boundary_restriction != Some(BoundaryRestriction::Neither) && c.valence != 0
                {
                    a.push(c.vertex);
                }
            }
        }
    }
    let mut q: Vec<VertexId> = q_interior.iter().chain(&q_boundary).copied().collect();
    q.sort_unstable();

    let boundary_cycles = mesh
        .boundary_components()
        .into_iter()
        .map(|cycle| {
            let minima = cycle.iter().filter(|&&v| vertices[v].is_boundary_min()).count();
            let maxima = cycle.iter().filter(|&&v| vertices[v].is_boundary_max()).count();
            BoundaryCycleExtrema {
                cycle,
                minima,
                maxima,
            }
        })
        .collect();

    Ok(ClassificationSummary {
        vertices,
        q,
        q_interior,
        q_boundary,
        a,
        boundary_neither,
        interior_histogram,
        boundary_histogram,
        interior_multiplicity,
        boundary_multiplicity,
        boundary_cycles,
    })
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

/// Reduces an angle to `(−π/2, π/2]`.
fn wrap_half_turn(mut x: f64) -> f64 {
    while x > PI / 2.0 {
        x -= PI;
    }
    while x <= -PI / 2.0 {
        x += PI;
    }
    x
}

/// Hopf index of the level-line field at an interior vertex.
///
/// The fan of triangles around `v` is unfolded into the plane with its
/// corner angles rescaled to sum to a full turn. In each triangle the level
/// lines of the linear interpolant are parallel; their direction, taken
/// modulo a half turn, is continued from triangle to triangle by the nearest
/// representative. The index is the total rotation over one full turn.
pub fn hopf_index(field: &ScalarField, v: VertexId) -> Result<i64, ClassifyError> {
    let mesh = field.mesh();
    let positions = mesh.positions().ok_or(ClassifyError::MissingPositions)?;
    let link = mesh.link(v);
    if !link.closed {
        return Err(ClassifyError::BoundaryVertex(v));
    }
    let m = link.vertices.len();
    let center = positions[v];
    let spokes: Vec<[f64; 3]> = link
        .vertices
        .iter()
        .map(|&u| sub(positions[u], center))
        .collect();
    let radii: Vec<f64> = spokes.iter().map(|&s| norm(s)).collect();
    if radii.iter().any(|&r| r <= 0.0 || !r.is_finite()) {
        return Err(ClassifyError::DegenerateGeometry(v));
    }
    let mut corner = Vec::with_capacity(m);
    for i in 0..m {
        let (a, b) = (spokes[i], spokes[(i + 1) % m]);
        let cos = (dot(a, b) / (radii[i] * radii[(i + 1) % m])).clamp(-1.0, 1.0);
        let angle = cos.acos();
        if !(angle > 1e-12 && angle < PI - 1e-12) {
            return Err(ClassifyError::DegenerateGeometry(v));
        }
        corner.push(angle);
    }
    let scale = 2.0 * PI / corner.iter().sum::<f64>();
    let mut theta = vec![0.0; m + 1];
    for i in 0..m {
        theta[i + 1] = theta[i] + scale * corner[i];
    }
    let fv = field.value(v);
    let mut directions = Vec::with_capacity(m);
    for i in 0..m {
        let j = (i + 1) % m;
        let p = [radii[i] * theta[i].cos(), radii[i] * theta[i].sin()];
        let q = [radii[j] * theta[i + 1].cos(), radii[j] * theta[i + 1].sin()];
        let (dp, dq) = (field.value(link.vertices[i]) - fv, field.value(link.vertices[j]) - fv);
        let det = p[0] * q[1] - p[1] * q[0];
        if det.abs() < 1e-300 {
            return Err(ClassifyError::DegenerateGeometry(v));
        }
        let gx = (dp * q[1] - dq * p[1]) / det;
        let gy = (p[0] * dq - q[0] * dp) / det;
        if gx == 0.0 && gy == 0.0 {
            return Err(ClassifyError::DegenerateGeometry(v));
        }
        directions.push(gy.atan2(gx));
    }
    let mut total = 0.0;
    for i in 0..m {
        let step = wrap_half_turn(directions[(i + 1) % m] - directions[i]);
        if step.abs() >= PI / 2.0 - 1e-9 {
            return Err(ClassifyError::TooCoarse(v));
        }
        total += step;
    }
    let turns = total / (2.0 * PI);
    let index = turns.round();
    if (turns - index).abs() > 1e-6 {
        return Err(ClassifyError::TooCoarse(v));
    }
    Ok(index as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::GenericityMode;
    use crate::mesh::Mesh;
    use std::sync::Arc;

    /// Fan disk: vertex 0 at the origin, `n` rim vertices on the unit circle.
    fn fan(n: usize) -> Arc<Mesh> {
        let tris = (0..n).map(|i| [0, 1 + i, 1 + (i + 1) % n]).collect();
        let mut pos = vec![[0.0; 3]];
        for i in 0..n {
            let a = 2.0 * PI * (i as f64 + 0.37) / n as f64;
            pos.push([a.cos(), a.sin(), 0.0]);
        }
        Arc::new(Mesh::new(tris, Some(pos)).unwrap())
    }

    fn field_from_signs(signs: &[i32]) -> ScalarField {
        let mesh = fan(signs.len());
        let mut values = vec![0.0];
        for (i, &s) in signs.iter().enumerate() {
            values.push(s as f64 * (1.0 + i as f64 * 0.01));
        }
        ScalarField::new(mesh, values, GenericityMode::StrictInterior).unwrap()
    }

    #[test]
    fn interior_valence_counts_cyclic_alternations() {
        let f = field_from_signs(&[1, 1, -1, -1, 1, -1]);
        assert_eq!(valence(&f, 0).unwrap(), 4);
        let c = classify_vertex(&f, 0).unwrap();
        assert_eq!(c.kind, CriticalKind::InteriorSaddle);
        assert_eq!(c.multiplicity, 1);
    }

    #[test]
    fn interior_extrema() {
        let f = field_from_signs(&[1, 1, 1, 1, 1]);
        let c = classify_vertex(&f, 0).unwrap();
        assert_eq!((c.kind, c.multiplicity, c.valence), (CriticalKind::LocalMin, 0, 0));
        let f = field_from_signs(&[-1, -1, -1, -1, -1]);
        assert_eq!(classify_vertex(&f, 0).unwrap().kind, CriticalKind::LocalMax);
    }

    #[test]
    fn valence_six_is_double_saddle() {
        let f = field_from_signs(&[1, -1, 1, -1, 1, -1, 1, -1]);
        // 8 alternations around the cycle
        assert_eq!(valence(&f, 0).unwrap(), 8);
        let f = field_from_signs(&[1, -1, 1, -1, 1, -1]);
        let c = classify_vertex(&f, 0).unwrap();
        assert_eq!((c.kind, c.multiplicity), (CriticalKind::InteriorSaddle, 2));
    }

    #[test]
    fn boundary_valence_counts_path_alternations() {
        // rim vertex 1 of a fan has link path [2, 0, 6]
        let mesh = fan(6);
        let mut values = vec![0.0, 0.5, 1.0, 2.0, 3.0, 4.0, 0.75];
        let f = ScalarField::new(mesh.clone(), values.clone(), GenericityMode::StrictInterior)
            .unwrap();
        assert_eq!(mesh.link(1).vertices, vec![2, 0, 6]);
        // signs (+, −, +): boundary minimum that is not a minimum of F
        assert_eq!(valence(&f, 1).unwrap(), 2);
        let c = classify_vertex(&f, 1).unwrap();
        assert_eq!(c.boundary_restriction, Some(BoundaryRestriction::LocalMin));
        assert_eq!(c.kind, CriticalKind::BoundarySaddle);
        assert_eq!(c.multiplicity, 1);
        // signs (+, −, −)
        values[6] = 0.25;
        let f = ScalarField::new(mesh, values, GenericityMode::StrictInterior).unwrap();
        let c = classify_vertex(&f, 1).unwrap();
        assert_eq!(c.valence, 1);
        assert_eq!(c.kind, CriticalKind::BoundaryRegular);
        assert_eq!(c.boundary_restriction, Some(BoundaryRestriction::Neither));
    }

    #[test]
    fn boundary_saddle_of_valence_three() {
        // half fan: 0 on the boundary with link path 1,2,3,4
        let mesh = Arc::new(Mesh::new(vec![[0, 1, 2], [0, 2, 3], [0, 3, 4]], None).unwrap());
        let f = ScalarField::new(
            mesh,
            vec![0.0, 1.0, -1.0, 2.0, -2.0],
            GenericityMode::StrictInterior,
        )
        .unwrap();
        let c = classify_vertex(&f, 0).unwrap();
        assert_eq!(c.valence, 3);
        assert_eq!((c.kind, c.multiplicity), (CriticalKind::BoundarySaddle, 1));
        assert_eq!(c.boundary_restriction, Some(BoundaryRestriction::Neither));
    }

    #[test]
    fn relaxed_boundary_vertex_is_unclassifiable() {
        let mesh = fan(5);
        let f = ScalarField::new(
            mesh,
            vec![0.0, 1.0, 1.0, 2.0, 3.0, 4.0],
            GenericityMode::RelaxedBoundary,
        )
        .unwrap();
        assert_eq!(
            classify_vertex(&f, 1).unwrap_err(),
            ClassifyError::RelaxedBoundaryAtVertex(1)
        );
        assert!(classify_vertex(&f, 4).is_ok());
        assert!(classify_all(&f).is_err());
    }

    #[test]
    fn hopf_of_regular_and_saddle() {
        // linear field: regular
        let mesh = fan(8);
        let pos = mesh.positions().unwrap().to_vec();
        let lin: Vec<f64> = pos.iter().map(|p| p[0] + 0.3 * p[1]).collect();
        let f = ScalarField::new(mesh.clone(), lin, GenericityMode::StrictInterior).unwrap();
        assert_eq!(valence(&f, 0).unwrap(), 2);
        assert_eq!(hopf_index(&f, 0).unwrap(), 0);
        // x^2 - y^2: simple saddle
        let sad: Vec<f64> = pos.iter().map(|p| p[0] * p[0] - p[1] * p[1]).collect();
        let f = ScalarField::new(mesh.clone(), sad, GenericityMode::StrictInterior).unwrap();
        assert_eq!(valence(&f, 0).unwrap(), 4);
        assert_eq!(hopf_index(&f, 0).unwrap(), -1);
        assert_eq!(hopf_index(&f, 1).unwrap_err(), ClassifyError::BoundaryVertex(1));
    }

    #[test]
    fn hopf_needs_positions() {
        let mesh = Arc::new(Mesh::new(fan(6).triangles().to_vec(), None).unwrap());
        let f = ScalarField::new(
            mesh,
            vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0],
            GenericityMode::StrictInterior,
        )
        .unwrap();
        assert_eq!(hopf_index(&f, 0).unwrap_err(), ClassifyError::MissingPositions);
    }

    #[test]
    fn wrap_is_half_open() {
        assert!((wrap_half_turn(PI) - 0.0).abs() < 1e-12);
        assert!((wrap_half_turn(3.0 * PI / 4.0) + PI / 4.0).abs() < 1e-12);
        assert!((wrap_half_turn(-PI / 2.0) - PI / 2.0).abs() < 1e-12);
    }
}
