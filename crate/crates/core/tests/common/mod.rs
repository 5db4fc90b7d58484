//! Brute-force oracle computed straight from the triangle list, without the
//! mesh link structure or the classifier.

#![allow(dead_code)]

use std::collections::HashMap;
use std::sync::Arc;

use rado_core::field::ScalarField;
use rado_core::gallery;
use rado_core::mesh::Mesh;

/// Edges incident to exactly one triangle, as sorted pairs.
pub fn boundary_flags(mesh: &Mesh) -> Vec<bool> {
    let mut count: HashMap<(usize, usize), usize> = HashMap::new();
    for t in mesh.triangles() {
        for i in 0..3 {
            let (a, b) = (t[i], t[(i + 1) % 3]);
            *count.entry((a.min(b), a.max(b))).or_insert(0) += 1;
        }
    }
    let mut flags = vec![false; mesh.vertex_count()];
    for ((a, b), c) in count {
        if c == 1 {
            flags[a] = true;
            flags[b] = true;
        }
    }
    flags
}

/// Number of triangles at `v` whose other two corners lie on opposite sides
/// of `F(v)`. Each such triangle is one sign change along the link.
pub fn valence(field: &ScalarField, v: usize) -> usize {
    let fv = field.value(v);
    field
        .mesh()
        .triangles()
        .iter()
        .filter(|t| t.contains(&v))
        .filter(|t| {
            let others: Vec<f64> = t.iter().filter(|&&u| u != v).map(|&u| field.value(u)).collect();
            (others[0] > fv) != (others[1] > fv)
        })
        .count()
}

pub fn multiplicity(valence: usize, boundary: bool) -> usize {
    if boundary {
        valence / 2
    } else if valence >= 4 {
        valence / 2 - 1
    } else {
        0
    }
}

/// `(Σ w, number of interior extrema)` over all vertices.
pub fn totals(field: &ScalarField) -> (usize, usize) {
    let flags = boundary_flags(field.mesh());
    let mut w = 0;
    let mut extrema = 0;
    for v in 0..field.mesh().vertex_count() {
        let val = valence(field, v);
        w += multiplicity(val, flags[v]);
        if !flags[v] && val == 0 {
            extrema += 1;
        }
    }
    (w, extrema)
}

/// Meshes used by the randomized suites: a disk, a torus and a Möbius band.
pub fn random_meshes() -> Vec<(&'static str, Arc<Mesh>)> {
    vec![
        ("disk", gallery::gen_polar_disk(4, 10).unwrap().mesh_arc().clone()),
        ("torus", gallery::gen_torus(10, 6, 0.3).unwrap().mesh_arc().clone()),
        ("mobius", gallery::gen_mobius(10).unwrap().mesh_arc().clone()),
    ]
}

/// Every generated field of the gallery, strict and relaxed.
pub fn gallery_fields() -> Vec<(String, ScalarField)> {
    let mut out = Vec::new();
    for g in 0..=3 {
        out.push((format!("closed g={g}"), gallery::gen_closed(g, 1, 0.1234).unwrap()));
    }
    for k in 1..=5 {
        out.push((format!("harmonic k={k}"), gallery::gen_disk_harmonic(k, 8 * k).unwrap()));
    }
    for q in 1..=3 {
        for d in 1..=3 {
            for axis in [gallery::BranchAxis::FirstCoordinate, gallery::BranchAxis::Height] {
                out.push((
                    format!("branched Q={q} d={d} {axis:?}"),
                    gallery::gen_branched(q, d, 8 * q.max(d), axis).unwrap(),
                ));
            }
        }
    }
    out.push(("torus".into(), gallery::gen_torus(24, 12, 0.3).unwrap()));
    out.push(("mobius".into(), gallery::gen_mobius(12).unwrap()));
    out.push(("polar disk".into(), gallery::gen_polar_disk(4, 12).unwrap()));
    out.push(("cylinder".into(), gallery::gen_cylinder(12, 3, 0.1).unwrap()));
    out.push(("level cylinder".into(), gallery::gen_cylinder(12, 3, 0.0).unwrap()));
    out.push(("relaxed annulus".into(), gallery::gen_relaxed_annulus(16, 3).unwrap()));
    out.push(("annulus arcs".into(), gallery::gen_annulus_with_arcs(16, 3, 2).unwrap()));
    out.push(("strip".into(), gallery::gen_strip(4, 3).unwrap()));
    out.push(("boundary saddle".into(), gallery::boundary_saddle_fan().unwrap()));
    out.push(("sphere minus cap".into(), gallery::gen_sphere_minus_cap(12, 16, 4, 0.2).unwrap()));
    out
}
