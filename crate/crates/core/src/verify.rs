//! Identity and inequality checks, each returning both sides in exact
//! half-integer arithmetic.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::classify::{
    classify_all, classify_vertex, hopf_index, ClassificationSummary, ClassifyError, CriticalKind,
    Locus,
};
use crate::exact::{frac, half, int, Rational};
use crate::field::{FieldError, GenericityMode, ScalarField};
use crate::mesh::{double, MeshError, VertexId};
use crate::network::{
    counting_identity, extract_level_network, network_euler, slice_bound, NetworkError, SStarRule,
};
use crate::regions::{beta, clip, region_euler, Interval, RegionError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error("mesh has boundary; use the boundary identities")]
    HasBoundary,
    #[error("mesh is closed; use the closed-surface identity")]
    NoBoundary,
    #[error("field has constant boundary arcs; quotient it first")]
    RelaxedField,
    #[error("region boundary vertex {0} is critical")]
    NonRegularRegionBoundary(VertexId),
    #[error("region is empty")]
    EmptyRegion,
    #[error("perturbation size {epsilon} exceeds the bound {bound}")]
    EpsilonTooLarge { epsilon: f64, bound: f64 },
    #[error("interval ({0}, {1}) is empty")]
    InvalidInterval(f64, f64),
    #[error("vertex {0} is not interior")]
    NotInterior(VertexId),
    #[error("{0} needs a clip interval")]
    MissingInterval(TheoremId),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error(transparent)]
    Region(#[from] RegionError),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TheoremId {
    /// `χ = Σ ½(2 − v)` on a closed surface.
    Closed,
    /// `Σ w = |Q| − χ` on a closed surface.
    Maxwell,
    /// `χ = Σ_k ((1−k)|V^int_2k| + ½(1−k)|V^∂_k|)`.
    BoundaryValence,
    /// `Σ w = |Q| − χ` with boundary saddles, in both forms.
    General,
    /// `Σ_int w ≤ |Q| − χ − |A|`.
    Inequality,
    /// `Σ_(a,b) w = |Q(a,b)| + ½β(a) − χ(M(a,b))` at regular `a`, `b`.
    Interval,
    /// Same with `β(a+)` and arbitrary ends.
    IntervalLimit,
    /// `Σ_K (v/2 − 1)` unchanged by small perturbations.
    PerturbationStability,
    /// Chained slice bounds.
    Slice,
    /// `Σ_{n≥3} ½(n−2)|V_n| = ½|V_1| + d1(X) − d0(X∖V0)`.
    Counting,
    /// `χ(X) = Σ ½(2 − v)` on a level network.
    NetworkEuler,
    /// `Hopf = 1 − v/2` at interior vertices.
    Hopf,
    /// `χ(double) = 2χ`.
    DoubleEuler,
}

impl TheoremId {
    pub const ALL: [TheoremId; 13] = [
        TheoremId::Closed,
        TheoremId::Maxwell,
        TheoremId::BoundaryValence,
        TheoremId::General,
        TheoremId::Inequality,
        TheoremId::Interval,
        TheoremId::IntervalLimit,
        TheoremId::PerturbationStability,
        TheoremId::Slice,
        TheoremId::Counting,
        TheoremId::NetworkEuler,
        TheoremId::Hopf,
        TheoremId::DoubleEuler,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TheoremId::Closed => "closed",
            TheoremId::Maxwell => "maxwell",
            TheoremId::BoundaryValence => "boundary-valence",
            TheoremId::General => "general",
            TheoremId::Inequality => "inequality",
            TheoremId::Interval => "interval",
            TheoremId::IntervalLimit => "interval-limit",
            TheoremId::PerturbationStability => "perturbation-stability",
            TheoremId::Slice => "slice",
            TheoremId::Counting => "counting",
            TheoremId::NetworkEuler => "network-euler",
            TheoremId::Hopf => "hopf",
            TheoremId::DoubleEuler => "double-euler",
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TheoremId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TheoremId::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| format!("unknown theorem id `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    Eq,
    Leq,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Term {
    pub name: String,
    #[serde(serialize_with = "frac")]
    pub value: Rational,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremReport {
    pub theorem: TheoremId,
    #[serde(serialize_with = "frac")]
    pub lhs: Rational,
    #[serde(serialize_with = "frac")]
    pub rhs: Rational,
    pub relation: Relation,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub equality_attained: Option<bool>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub witness: Vec<usize>,
    pub terms: Vec<Term>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl TheoremReport {
    fn new(theorem: TheoremId, lhs: Rational, rhs: Rational, relation: Relation) -> Self {
        let pass = match relation {
            Relation::Eq => lhs == rhs,
            Relation::Leq => lhs <= rhs,
        };
        let equality_attained = (relation == Relation::Leq).then_some(lhs == rhs);
        Self {
            theorem,
            lhs,
            rhs,
            relation,
            pass,
            equality_attained,
            witness: Vec::new(),
            terms: Vec::new(),
            error: None,
        }
    }

    /// A failed report standing in for a verifier that could not run.
    pub fn failed(theorem: TheoremId, error: &VerifyError) -> Self {
        let mut r = Self::new(theorem, int(0), int(0), Relation::Eq);
        r.pass = false;
        r.error = Some(error.to_string());
        r
    }

    fn term(mut self, name: &str, value: Rational) -> Self {
        self.terms.push(Term {
            name: name.to_string(),
            value,
        });
        self
    }

    pub fn term_value(&self, name: &str) -> Option<Rational> {
        self.terms.iter().find(|t| t.name == name).map(|t| t.value)
    }
}

fn strict_summary(field: &ScalarField) -> Result<ClassificationSummary, VerifyError> {
    if field.mode() != GenericityMode::StrictInterior
        && !field.constant_boundary_edges().is_empty()
    {
        return Err(VerifyError::RelaxedField);
    }
    Ok(classify_all(field)?)
}

fn count(n: usize) -> Rational {
    int(n as i64)
}

pub fn verify_closed(field: &ScalarField) -> Result<TheoremReport, VerifyError> {
    if !field.mesh().is_closed() {
        return Err(VerifyError::HasBoundary);
    }
    let s = strict_summary(field)?;
    let chi = field.mesh().euler_characteristic();
    let rhs: Rational = s
        .interior_histogram
        .iter()
        .map(|(&v, &c)| half((2 - v as i64) * c as i64))
        .sum();
    Ok(TheoremReport::new(TheoremId::Closed, int(chi), rhs, Relation::Eq)
        .term("chi", int(chi))
        .term("valence_sum", rhs))
}

pub fn verify_maxwell(field: &ScalarField) -> Result<TheoremReport, VerifyError> {
    if !field.mesh().is_closed() {
        return Err(VerifyError::HasBoundary);
    }
    let s = strict_summary(field)?;
    let chi = field.mesh().euler_characteristic();
    let lhs = count(s.interior_multiplicity);
    let rhs = count(s.q.len()) - int(chi);
    Ok(TheoremReport::new(TheoremId::Maxwell, lhs, rhs, Relation::Eq)
        .term("Q", count(s.q.len()))
        .term("chi", int(chi)))
}

pub fn verify_boundary_valence(field: &ScalarField) -> Result<TheoremReport, VerifyError> {
    if field.mesh().is_closed() {
        return Err(VerifyError::NoBoundary);
    }
    let s = strict_summary(field)?;
    let chi = field.mesh().euler_characteristic();
    let interior: Rational = s
        .interior_histogram
        .iter()
        .map(|(&n, &c)| half((2 - n as i64) * c as i64))
        .sum();
    let boundary: Rational = s
        .boundary_histogram
        .iter()
        .map(|(&k, &c)| half((1 - k as i64) * c as i64))
        .sum();
    Ok(
        TheoremReport::new(TheoremId::BoundaryValence, int(chi), interior + boundary, Relation::Eq)
            .term("interior", interior)
            .term("boundary", boundary),
    )
}

/// Total multiplicity from the valence histograms alone:
/// `Σ_{n≥2}(n−1)|V^int_2n| + Σ_{n≥1} n(|V^∂_2n| + |V^∂_2n+1|)`.
pub fn expanded_weights(s: &ClassificationSummary) -> Rational {
    let interior: i64 = s
        .interior_histogram
        .iter()
        .filter(|(&v, _)| v >= 4)
        .map(|(&v, &c)| (v as i64 / 2 - 1) * c as i64)
        .sum();
    let boundary: i64 = s
        .boundary_histogram
        .iter()
        .filter(|(&v, _)| v >= 2)
        .map(|(&v, &c)| (v as i64 / 2) * c as i64)
        .sum();
    int(interior + boundary)
}

pub fn verify_general(field: &ScalarField) -> Result<TheoremReport, VerifyError> {
    let s = strict_summary(field)?;
    let chi = field.mesh().euler_characteristic();
    let lhs = count(s.total_multiplicity());
    let expanded = expanded_weights(&s);
    let rhs = count(s.q.len()) - int(chi);
    let mut r = TheoremReport::new(TheoremId::General, lhs, rhs, Relation::Eq)
        .term("N", count(s.interior_multiplicity))
        .term("s_bd", count(s.boundary_multiplicity))
        .term("expanded", expanded)
        .term("Q", count(s.q.len()))
        .term("Q_int", count(s.q_interior.len()))
        .term("Q_bd", count(s.q_boundary.len()))
        .term("chi", int(chi));
    r.pass = r.pass && expanded == lhs;
    Ok(r)
}

pub fn verify_inequality(field: &ScalarField) -> Result<TheoremReport, VerifyError> {
    let s = strict_summary(field)?;
    let chi = field.mesh().euler_characteristic();
    let lhs = count(s.interior_multiplicity);
    let rhs = count(s.q.len()) - int(chi) - count(s.a.len());
    let witness: Vec<VertexId> = s
        .vertices
        .iter()
        .filter(|c| c.locus == Locus::Boundary && c.valence > 2)
        .map(|c| c.vertex)
        .collect();
    let mut r = TheoremReport::new(TheoremId::Inequality, lhs, rhs, Relation::Leq)
        .term("Q", count(s.q.len()))
        .term("chi", int(chi))
        .term("A", count(s.a.len()));
    // equality exactly when no boundary vertex has valence above 2
    r.pass = r.pass && (lhs == rhs) == witness.is_empty();
    r.witness = witness;
    Ok(r)
}

/// Multiplicity sum and `|Q|` over vertices with `F` strictly inside the
/// interval. Vertices outside may be unclassifiable.
fn band_counts(field: &ScalarField, interval: &Interval) -> Result<(usize, usize, Vec<VertexId>), VerifyError> {
    let mut w = 0;
    let mut q = 0;
    let mut inside = Vec::new();
    for v in 0..field.mesh().vertex_count() {
        if !interval.contains(field.value(v)) {
            continue;
        }
        let c = classify_vertex(field, v)?;
        w += c.multiplicity;
        if c.is_interior_extremum() || c.is_boundary_min() {
            q += 1;
        }
        inside.push(v);
    }
    Ok((w, q, inside))
}

fn regular_end(field: &ScalarField, t: f64) -> Result<Option<f64>, VerifyError> {
    if !t.is_finite() {
        return Ok(None);
    }
    if !field.is_regular_value(t) {
        return Err(RegionError::NonRegularClipValue(t).into());
    }
    Ok(Some(t))
}

fn interval_report(
    theorem: TheoremId,
    field: &ScalarField,
    counted: Interval,
    clipped: Interval,
) -> Result<TheoremReport, VerifyError> {
    let (w, q, _) = band_counts(field, &counted)?;
    let c = clip(field, clipped)?;
    let chi = region_euler(&c);
    let b = c.beta_lower.unwrap_or(0);
    let lhs = count(w);
    let rhs = count(q) + half(b as i64) - int(chi);
    Ok(TheoremReport::new(theorem, lhs, rhs, Relation::Eq)
        .term("Q_band", count(q))
        .term("beta", count(b))
        .term("chi_band", int(chi)))
}

/// Band identity at regular values `a < b`; infinite ends are unbounded.
///
/// Relaxed fields are accepted as long as every vertex strictly inside the
/// band can be classified.
pub fn verify_interval(field: &ScalarField, a: f64, b: f64) -> Result<TheoremReport, VerifyError> {
    if a >= b {
        return Err(VerifyError::InvalidInterval(a, b));
    }
    let lo = regular_end(field, a)?;
    let hi = regular_end(field, b)?;
    let interval = Interval {
        lower: lo,
        upper: hi,
        open: true,
    };
    interval_report(TheoremId::Interval, field, interval, interval)
}

/// Band identity with `β(a+)` for arbitrary `a < b`, possibly field values
/// or infinite. The band is replaced by the regular band `(a', b')` with the
/// same vertices inside.
pub fn verify_interval_limit(
    field: &ScalarField,
    a: f64,
    b: f64,
) -> Result<TheoremReport, VerifyError> {
    if a >= b {
        return Err(VerifyError::InvalidInterval(a, b));
    }
    let inside: Vec<f64> = field
        .sorted_levels()
        .into_iter()
        .filter(|&x| x > a && x < b)
        .collect();
    let (lo, hi) = match (inside.first(), inside.last()) {
        (Some(&first), Some(&last)) => (
            a.is_finite().then(|| a + (first - a) / 2.0),
            b.is_finite().then(|| last + (b - last) / 2.0),
        ),
        _ => {
            // no vertex inside: any interior pair of points will do
            let (lo, hi) = match (a.is_finite(), b.is_finite()) {
                (true, true) => (a + (b - a) / 3.0, a + 2.0 * (b - a) / 3.0),
                (true, false) => (a + 1.0, a + 2.0),
                (false, true) => (b - 2.0, b - 1.0),
                (false, false) => (0.0, 1.0),
            };
            (a.is_finite().then_some(lo), b.is_finite().then_some(hi))
        }
    };
    let counted = Interval {
        lower: a.is_finite().then_some(a),
        upper: b.is_finite().then_some(b),
        open: true,
    };
    let clipped = Interval {
        lower: lo,
        upper: hi,
        open: false,
    };
    let mut r = interval_report(TheoremId::IntervalLimit, field, counted, clipped)?;
    if let Some(lo) = lo {
        debug_assert_eq!(beta(field, lo), r.term_value("beta").unwrap().to_integer() as usize);
    }
    r.terms.push(Term {
        name: "a_regular".into(),
        value: int(lo.is_some() as i64),
    });
    Ok(r)
}

/// Vertices of `region` adjacent to a vertex outside it.
pub fn region_boundary(field: &ScalarField, region: &[VertexId]) -> Vec<VertexId> {
    let inside: HashSet<VertexId> = region.iter().copied().collect();
    let mesh = field.mesh();
    let mut out: BTreeSet<VertexId> = BTreeSet::new();
    for &v in region {
        if mesh.link(v).vertices.iter().any(|u| !inside.contains(u)) {
            out.insert(v);
        }
    }
    out.into_iter().collect()
}

/// Half of the smallest value gap over edges touching `boundary`, or over
/// all edges when `boundary` is empty.
pub fn perturbation_bound(field: &ScalarField, boundary: &[VertexId]) -> f64 {
    let mesh = field.mesh();
    let touching: HashSet<VertexId> = boundary.iter().copied().collect();
    mesh.edges()
        .iter()
        .filter(|[a, b]| touching.is_empty() || touching.contains(a) || touching.contains(b))
        .map(|&[a, b]| (field.value(a) - field.value(b)).abs())
        .fold(f64::INFINITY, f64::min)
        / 2.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationOptions {
    /// Defaults to 0.49 times the gap bound.
    pub epsilon: Option<f64>,
    pub trials: usize,
    pub seed: u64,
}

impl Default for PerturbationOptions {
    fn default() -> Self {
        Self {
            epsilon: None,
            trials: 20,
            seed: 0,
        }
    }
}

fn signed_sum(field: &ScalarField, region: &[VertexId]) -> Result<(Rational, usize), VerifyError> {
    let mut signed = int(0);
    let mut w = 0;
    for &v in region {
        let c = classify_vertex(field, v)?;
        signed += half(c.valence as i64) - int(1);
        w += c.multiplicity;
    }
    Ok((signed, w))
}

/// Compares `Σ_K (v/2 − 1)` before and after random perturbations of every
/// vertex value by less than `ε`. The clamped sum `Σ_K w` is reported
/// alongside.
pub fn verify_perturbation_stability(
    field: &ScalarField,
    region: &[VertexId],
    options: PerturbationOptions,
) -> Result<TheoremReport, VerifyError> {
    if region.is_empty() {
        return Err(VerifyError::EmptyRegion);
    }
    strict_summary(field)?;
    let boundary = region_boundary(field, region);
    for &v in &boundary {
        let c = classify_vertex(field, v)?;
        let regular = matches!(c.kind, CriticalKind::Regular | CriticalKind::BoundaryRegular);
        if !regular {
            return Err(VerifyError::NonRegularRegionBoundary(v));
        }
    }
    let bound = perturbation_bound(field, &boundary);
    let epsilon = match options.epsilon {
        Some(e) if e >= bound => return Err(VerifyError::EpsilonTooLarge { epsilon: e, bound }),
        Some(e) => e.abs(),
        None => 0.49 * bound,
    };
    let (base, base_w) = signed_sum(field, region)?;
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut witness = Vec::new();
    let mut changed_w = 0usize;
    let mut worst = base;
    let mut trial = 0;
    let mut draws = 0;
    while trial < options.trials {
        draws += 1;
        let values: Vec<f64> = field
            .values()
            .iter()
            .map(|&x| {
                if epsilon > 0.0 {
                    x + rng.gen_range(-epsilon..epsilon)
                } else {
                    x
                }
            })
            .collect();
        let perturbed = match field.with_values(values) {
            Ok(f) => f,
            // a fresh tie away from the region; redraw
            Err(FieldError::NonGenericInteriorEdge(_)) if draws < 10 * options.trials + 10 => continue,
            Err(e) => return Err(e.into()),
        };
        let (s, w) = signed_sum(&perturbed, region)?;
        if s != base {
            witness.push(trial);
            worst = s;
        }
        if w != base_w {
            changed_w += 1;
        }
        trial += 1;
    }
    Ok(
        TheoremReport::new(TheoremId::PerturbationStability, base, worst, Relation::Eq)
            .term("w_sum", count(base_w))
            .term("trials_with_changed_w", count(changed_w))
            .term("boundary_vertices", count(boundary.len()))
            .term("trials", count(options.trials)),
    )
    .map(|mut r| {
        r.witness = witness;
        r
    })
}

pub fn verify_hopf(field: &ScalarField, v: VertexId) -> Result<TheoremReport, VerifyError> {
    let c = classify_vertex(field, v)?;
    if c.locus != Locus::Interior {
        return Err(VerifyError::NotInterior(v));
    }
    let index = hopf_index(field, v)?;
    let rhs = int(1) - half(c.valence as i64);
    let mut r = TheoremReport::new(TheoremId::Hopf, int(index), rhs, Relation::Eq)
        .term("valence", count(c.valence));
    r.witness = vec![v];
    Ok(r)
}

/// Hopf check at every interior vertex; vertices whose index cannot be
/// tracked are listed as witnesses and fail the report.
pub fn verify_hopf_all(field: &ScalarField) -> Result<TheoremReport, VerifyError> {
    let mesh = field.mesh();
    if mesh.positions().is_none() {
        return Err(ClassifyError::MissingPositions.into());
    }
    let mut lhs = int(0);
    let mut rhs = int(0);
    let mut witness = Vec::new();
    for v in (0..mesh.vertex_count()).filter(|&v| !mesh.is_boundary_vertex(v)) {
        match verify_hopf(field, v) {
            Ok(r) => {
                lhs += r.lhs;
                rhs += r.rhs;
                if !r.pass {
                    witness.push(v);
                }
            }
            Err(VerifyError::Classify(ClassifyError::TooCoarse(_)))
            | Err(VerifyError::Classify(ClassifyError::DegenerateGeometry(_))) => witness.push(v),
            Err(e) => return Err(e),
        }
    }
    let mut r = TheoremReport::new(TheoremId::Hopf, lhs, rhs, Relation::Eq);
    r.pass = r.pass && witness.is_empty();
    r.witness = witness;
    Ok(r)
}

/// Levels probed when no slice value is given: every vertex value and the
/// midpoints between consecutive ones, plus one level outside the range.
pub fn probe_levels(field: &ScalarField) -> Vec<f64> {
    let levels = field.sorted_levels();
    let mut out = Vec::with_capacity(2 * levels.len() + 1);
    for (i, &t) in levels.iter().enumerate() {
        out.push(t);
        if let Some(&next) = levels.get(i + 1) {
            out.push(t + (next - t) / 2.0);
        }
    }
    out.push(levels.last().copied().unwrap_or(0.0) + 1.0);
    out
}

fn level_witness(field: &ScalarField, t: f64) -> Vec<VertexId> {
    let v: Vec<VertexId> = (0..field.mesh().vertex_count())
        .filter(|&v| field.value(v) == t)
        .collect();
    v
}

pub fn verify_slice(
    field: &ScalarField,
    t: f64,
    rule: SStarRule,
) -> Result<TheoremReport, VerifyError> {
    let s = strict_summary(field)?;
    let r = slice_bound(field, t, &s, rule)?;
    let b = r.slice.expect("slice bounds present");
    let mut out = TheoremReport::new(TheoremId::Slice, b.lhs, b.bound_v1, Relation::Leq)
        .term("bound_J", b.bound_j)
        .term("bound_k", b.bound_k)
        .term("V1", count(b.v1))
        .term("J", count(b.j))
        .term("k", count(b.k))
        .term("d1_mesh", count(b.d1_mesh))
        .term("S_star", count(b.s_star));
    out.pass = b.holds.iter().all(|&h| h) && r.pass;
    out.equality_attained = Some(b.tight.iter().all(|&x| x));
    Ok(out)
}

pub fn verify_counting(field: &ScalarField, t: f64) -> Result<TheoremReport, VerifyError> {
    strict_summary(field)?;
    let x = extract_level_network(field, t)?;
    let r = counting_identity(&x);
    Ok(
        TheoremReport::new(TheoremId::Counting, r.identity_lhs, r.identity_rhs, Relation::Eq)
            .term("d0_nonisolated", count(r.d0_nonisolated))
            .term("d1", count(r.d1)),
    )
}

pub fn verify_network_euler(field: &ScalarField, t: f64) -> Result<TheoremReport, VerifyError> {
    strict_summary(field)?;
    let x = extract_level_network(field, t)?;
    let r = network_euler(&x);
    Ok(TheoremReport::new(TheoremId::NetworkEuler, r.identity_lhs, r.identity_rhs, Relation::Eq))
}

/// Runs a per-level verifier over `levels`, summing both sides. Fails with
/// the vertices at every failing level as witnesses.
pub fn over_levels(
    theorem: TheoremId,
    field: &ScalarField,
    levels: &[f64],
    check: impl Fn(&ScalarField, f64) -> Result<TheoremReport, VerifyError>,
) -> Result<TheoremReport, VerifyError> {
    let mut lhs = int(0);
    let mut rhs = int(0);
    let mut witness = Vec::new();
    let mut failed_levels = 0;
    let mut relation = Relation::Eq;
    for &t in levels {
        let r = check(field, t)?;
        relation = r.relation;
        lhs += r.lhs;
        rhs += r.rhs;
        if !r.pass {
            failed_levels += 1;
            witness.extend(level_witness(field, t));
        }
    }
    let mut r = TheoremReport::new(theorem, lhs, rhs, relation)
        .term("levels", count(levels.len()))
        .term("failed_levels", count(failed_levels));
    r.pass = failed_levels == 0;
    r.witness = witness;
    Ok(r)
}

pub fn verify_double_euler(field: &ScalarField) -> Result<TheoremReport, VerifyError> {
    let mesh = field.mesh();
    if mesh.is_closed() {
        return Err(VerifyError::NoBoundary);
    }
    let d = double(mesh)?;
    let lhs = int(d.mesh.euler_characteristic());
    let rhs = int(2 * mesh.euler_characteristic());
    let mut r = TheoremReport::new(TheoremId::DoubleEuler, lhs, rhs, Relation::Eq);
    r.pass = r.pass && d.mesh.is_closed();
    Ok(r)
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    /// Clip interval for the band identities; infinite ends allowed.
    pub interval: Option<(f64, f64)>,
    /// Single slice level; all probe levels when `None`.
    pub level: Option<f64>,
    pub s_star: SStarRule,
    /// Region for the stability check; every vertex when `None`.
    pub region: Option<Vec<VertexId>>,
    pub perturbation: PerturbationOptions,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            interval: None,
            level: None,
            s_star: SStarRule::OffLevel,
            region: None,
            perturbation: PerturbationOptions::default(),
        }
    }
}

/// Theorems that apply to `field` without extra input: the closed or the
/// boundary family, the level checks, the stability check, and the band
/// checks when an interval is given.
pub fn applicable(field: &ScalarField, options: &VerifyOptions) -> Vec<TheoremId> {
    let mut out = Vec::new();
    if field.mesh().is_closed() {
        out.extend([TheoremId::Closed, TheoremId::Maxwell, TheoremId::General]);
    } else {
        out.extend([
            TheoremId::BoundaryValence,
            TheoremId::General,
            TheoremId::Inequality,
        ]);
        // a triangle with all corners on the boundary would appear twice
        if double(field.mesh()).is_ok() {
            out.push(TheoremId::DoubleEuler);
        }
    }
    if options.interval.is_some() {
        out.push(TheoremId::Interval);
    }
    out.extend([
        TheoremId::IntervalLimit,
        TheoremId::PerturbationStability,
        TheoremId::Slice,
        TheoremId::Counting,
        TheoremId::NetworkEuler,
    ]);
    out
}

pub fn run_theorem(
    field: &ScalarField,
    theorem: TheoremId,
    options: &VerifyOptions,
) -> Result<TheoremReport, VerifyError> {
    let levels = match options.level {
        Some(t) => vec![t],
        None => probe_levels(field),
    };
    match theorem {
        TheoremId::Closed => verify_closed(field),
        TheoremId::Maxwell => verify_maxwell(field),
        TheoremId::BoundaryValence => verify_boundary_valence(field),
        TheoremId::General => verify_general(field),
        TheoremId::Inequality => verify_inequality(field),
        TheoremId::Interval => {
            let (a, b) = options.interval.ok_or(VerifyError::MissingInterval(theorem))?;
            verify_interval(field, a, b)
        }
        TheoremId::IntervalLimit => {
            let (a, b) = options.interval.unwrap_or((f64::NEG_INFINITY, f64::INFINITY));
            verify_interval_limit(field, a, b)
        }
        TheoremId::PerturbationStability => {
            let all: Vec<VertexId>;
            let region = match &options.region {
                Some(r) => r.as_slice(),
                None => {
                    all = (0..field.mesh().vertex_count()).collect();
                    &all
                }
            };
            verify_perturbation_stability(field, region, options.perturbation)
        }
        TheoremId::Slice => over_levels(theorem, field, &levels, |f, t| {
            verify_slice(f, t, options.s_star)
        }),
        TheoremId::Counting => over_levels(theorem, field, &levels, verify_counting),
        TheoremId::NetworkEuler => over_levels(theorem, field, &levels, verify_network_euler),
        TheoremId::Hopf => verify_hopf_all(field),
        TheoremId::DoubleEuler => verify_double_euler(field),
    }
}

/// Runs each theorem, turning errors into failed reports.
pub fn run_all(
    field: &ScalarField,
    theorems: &[TheoremId],
    options: &VerifyOptions,
) -> Vec<TheoremReport> {
    theorems
        .iter()
        .map(|&t| run_theorem(field, t, options).unwrap_or_else(|e| TheoremReport::failed(t, &e)))
        .collect()
}
