//! Piecewise-linear scalar fields and the sign policy shared by every
//! downstream module.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mesh::{EdgeId, Mesh, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GenericityMode {
    /// No edge joins two vertices of equal value.
    StrictInterior,
    /// Boundary edges may join equal values (constant boundary arcs);
    /// interior edges may not.
    RelaxedBoundary,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FieldError {
    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("value at vertex {0} is not finite")]
    NonFiniteValue(VertexId),
    #[error("edges with equal endpoint values: {0:?}")]
    NonGenericInteriorEdge(Vec<[VertexId; 2]>),
    #[error("vertex {0} lies exactly on the reference value")]
    TieRejected(VertexId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    pub fn as_i32(self) -> i32 {
        match self {
            Sign::Minus => -1,
            Sign::Plus => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TiePolicy {
    Reject,
    /// Treat `F(v) = t` as `F(v) = t + ε·(v + 1)` for infinitesimal ε > 0,
    /// which always resolves to [`Sign::Plus`].
    PerturbByIndex,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignRule {
    pub t: f64,
    pub tie: TiePolicy,
}

impl SignRule {
    pub fn reject(t: f64) -> Self {
        Self {
            t,
            tie: TiePolicy::Reject,
        }
    }

    pub fn perturb(t: f64) -> Self {
        Self {
            t,
            tie: TiePolicy::PerturbByIndex,
        }
    }
}

/// One real value per mesh vertex, linearly interpolated over triangles.
#[derive(Debug, Clone)]
pub struct ScalarField {
    mesh: Arc<Mesh>,
    values: Vec<f64>,
    mode: GenericityMode,
}

impl ScalarField {
    pub fn new(
        mesh: Arc<Mesh>,
        values: Vec<f64>,
        mode: GenericityMode,
    ) -> Result<Self, FieldError> {
        if values.len() != mesh.vertex_count() {
            return Err(FieldError::LengthMismatch {
                expected: mesh.vertex_count(),
                got: values.len(),
            });
        }
        if let Some(v) = values.iter().position(|x| !x.is_finite()) {
            return Err(FieldError::NonFiniteValue(v));
        }
        let offending: Vec<[VertexId; 2]> = mesh
            .edges()
            .iter()
            .enumerate()
            .filter(|&(e, &[a, b])| {
                values[a] == values[b]
                    && (mode == GenericityMode::StrictInterior || !mesh.is_boundary_edge(e))
            })
            .map(|(_, &ab)| ab)
            .collect();
        if !offending.is_empty() {
            return Err(FieldError::NonGenericInteriorEdge(offending));
        }
        Ok(Self { mesh, values, mode })
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn mesh_arc(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, v: VertexId) -> f64 {
        self.values[v]
    }

    pub fn mode(&self) -> GenericityMode {
        self.mode
    }

    /// Sign of `F(v) − t` under the rule's tie policy.
    pub fn sign_at(&self, v: VertexId, rule: &SignRule) -> Result<Sign, FieldError> {
        let x = self.values[v];
        if x > rule.t {
            Ok(Sign::Plus)
        } else if x < rule.t {
            Ok(Sign::Minus)
        } else {
            match rule.tie {
                TiePolicy::Reject => Err(FieldError::TieRejected(v)),
                TiePolicy::PerturbByIndex => Ok(Sign::Plus),
            }
        }
    }

    /// True iff `t` differs from every vertex value. Constant boundary arcs
    /// take vertex values, so they are excluded as well.
    pub fn is_regular_value(&self, t: f64) -> bool {
        self.values.iter().all(|&x| x != t)
    }

    /// Boundary edges whose endpoints carry equal values (relaxed mode only).
    pub fn constant_boundary_edges(&self) -> Vec<EdgeId> {
        let mesh = &self.mesh;
        (0..mesh.edges().len())
            .filter(|&e| {
                let [a, b] = mesh.edges()[e];
                mesh.is_boundary_edge(e) && self.values[a] == self.values[b]
            })
            .collect()
    }

    /// True if `v` is an endpoint of a constant boundary edge.
    pub fn touches_constant_boundary(&self, v: VertexId) -> bool {
        match self.mesh.boundary_neighbors(v) {
            Some((a, b)) => self.values[a] == self.values[v] || self.values[b] == self.values[v],
            None => false,
        }
    }

    /// Distinct vertex values in increasing order.
    pub fn sorted_levels(&self) -> Vec<f64> {
        let mut levels = self.values.clone();
        levels.sort_by(|a, b| a.partial_cmp(b).unwrap());
        levels.dedup();
        levels
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// The same mesh carrying `α·F + β`.
    pub fn affine(&self, alpha: f64, beta: f64) -> Result<Self, FieldError> {
        let values = self.values.iter().map(|x| alpha * x + beta).collect();
        Self::new(self.mesh.clone(), values, self.mode)
    }

    /// The same mesh carrying new values, in the same genericity mode.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self, FieldError> {
        Self::new(self.mesh.clone(), values, self.mode)
    }
}
