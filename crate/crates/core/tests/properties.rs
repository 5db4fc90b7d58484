mod common;

use proptest::prelude::*;

use rado_core::classify::{classify_all, CriticalKind, Locus};
use rado_core::exact::int;
use rado_core::field::ScalarField;
use rado_core::gallery;
use rado_core::io;
use rado_core::mesh::{homology_from_euler, homology_z2};
use rado_core::network::{counting_identity, extract_level_network, network_euler};
use rado_core::regions::{beta, clip, region_euler, Interval};
use rado_core::verify::{
    verify_general, verify_interval, verify_maxwell, verify_perturbation_stability,
    PerturbationOptions,
};

fn random_field(which: usize, seed: u64) -> (&'static str, ScalarField) {
    let meshes = common::random_meshes();
    let (name, mesh) = &meshes[which % meshes.len()];
    (name, gallery::gen_random_field(mesh.clone(), seed).unwrap())
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        failure_persistence: None,
        ..ProptestConfig::with_cases(cases)
    }
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn classifier_matches_oracle(which in 0usize..3, seed in any::<u64>()) {
        let (name, f) = random_field(which, seed);
        let s = classify_all(&f).unwrap();
        let flags = common::boundary_flags(f.mesh());
        for v in 0..f.mesh().vertex_count() {
            let c = s.get(v);
            prop_assert_eq!(c.valence, common::valence(&f, v), "{} vertex {}", name, v);
            prop_assert_eq!(c.locus == Locus::Boundary, flags[v]);
            prop_assert_eq!(c.multiplicity, common::multiplicity(c.valence, flags[v]));
        }
    }

    #[test]
    fn parity(which in 0usize..3, seed in any::<u64>()) {
        let (_, f) = random_field(which, seed);
        for c in classify_all(&f).unwrap().vertices {
            match c.locus {
                Locus::Interior => prop_assert_eq!(c.valence % 2, 0),
                Locus::Boundary => prop_assert_eq!(
                    c.valence % 2 == 0,
                    c.is_boundary_min() || c.is_boundary_max()
                ),
            }
        }
    }

    #[test]
    fn affine_maps_preserve_valence(
        which in 0usize..3,
        seed in any::<u64>(),
        exp in -2i32..3,
        flip in any::<bool>(),
        shift in -3i32..4,
    ) {
        let (_, f) = random_field(which, seed);
        let alpha = if flip { -(2f64.powi(exp)) } else { 2f64.powi(exp) };
        let g = f.affine(alpha, shift as f64).unwrap();
        let a = classify_all(&f).unwrap();
        let b = classify_all(&g).unwrap();
        for (x, y) in a.vertices.iter().zip(&b.vertices) {
            prop_assert_eq!(x.valence, y.valence);
            prop_assert_eq!(x.multiplicity, y.multiplicity);
            let swapped = match x.kind {
                CriticalKind::LocalMin if flip => CriticalKind::LocalMax,
                CriticalKind::LocalMax if flip => CriticalKind::LocalMin,
                k => k,
            };
            prop_assert_eq!(swapped, y.kind);
        }
        prop_assert_eq!(a.interior_multiplicity, b.interior_multiplicity);
    }

    #[test]
    fn global_identity(which in 0usize..3, seed in any::<u64>()) {
        let (_, f) = random_field(which, seed);
        let r = if f.mesh().is_closed() { verify_maxwell(&f) } else { verify_general(&f) };
        let r = r.unwrap();
        prop_assert!(r.pass, "{:?}", r);
    }

    #[test]
    fn networks_at_any_level(which in 0usize..3, seed in any::<u64>(), u in 0.0f64..1.0) {
        let (_, f) = random_field(which, seed);
        let t = f.min_value() - 0.5 + u * (f.max_value() - f.min_value() + 1.0);
        let x = extract_level_network(&f, t).unwrap();
        prop_assert!(network_euler(&x).pass);
        prop_assert!(counting_identity(&x).pass);
        if f.is_regular_value(t) {
            let hist = x.histogram();
            prop_assert!(hist.keys().all(|&n| n == 1 || n == 2), "{:?}", hist);
        }
    }

    #[test]
    fn two_bands_add_up(which in 0usize..3, seed in any::<u64>(), cut in 0usize..1000) {
        let (_, f) = random_field(which, seed);
        let levels = f.sorted_levels();
        let i = cut % (levels.len() - 1);
        let t = levels[i] + (levels[i + 1] - levels[i]) / 2.0;
        let lower = verify_interval(&f, f64::NEG_INFINITY, t).unwrap();
        let upper = verify_interval(&f, t, f64::INFINITY).unwrap();
        prop_assert!(lower.pass && upper.pass);
        let total = verify_general(&f).unwrap().lhs;
        prop_assert_eq!(lower.lhs + upper.lhs, total);
        let below = clip(&f, Interval::open(f64::NEG_INFINITY, t)).unwrap();
        let above = clip(&f, Interval::open(t, f64::INFINITY)).unwrap();
        // the level set between them is a union of circles and β(t)/2 arcs
        prop_assert_eq!(
            region_euler(&below) + region_euler(&above) - beta(&f, t) as i64 / 2,
            f.mesh().euler_characteristic()
        );
    }

    #[test]
    fn field_sidecar_round_trip(values in prop::collection::vec(any::<f64>().prop_filter("finite", |x| x.is_finite()), 1..50)) {
        let text = io::format_field_values(&values);
        let back = io::parse_field_values(&text).unwrap();
        prop_assert_eq!(
            back.iter().map(|x| x.to_bits()).collect::<Vec<_>>(),
            values.iter().map(|x| x.to_bits()).collect::<Vec<_>>()
        );
    }
}

proptest! {
    #![proptest_config(config(12))]

    #[test]
    fn whole_surface_perturbation(which in 0usize..3, seed in any::<u64>()) {
        let (_, f) = random_field(which, seed);
        let all: Vec<usize> = (0..f.mesh().vertex_count()).collect();
        let options = PerturbationOptions { epsilon: None, trials: 10, seed };
        let r = verify_perturbation_stability(&f, &all, options).unwrap();
        prop_assert!(r.pass, "{:?}", r);
    }
}

#[test]
fn homology_of_gallery_meshes() {
    for (name, f) in common::gallery_fields() {
        let h = homology_z2(f.mesh());
        assert_eq!(h.euler(), f.mesh().euler_characteristic(), "{name}");
        assert_eq!(h, homology_from_euler(f.mesh()), "{name}");
    }
}

#[test]
fn mesh_round_trip_keeps_summary() {
    for (name, f) in common::gallery_fields() {
        let mesh = io::parse_off(&io::format_off(f.mesh())).unwrap();
        assert_eq!(mesh.triangles(), f.mesh().triangles(), "{name}");
        let values = io::parse_field_values(&io::format_field_values(f.values())).unwrap();
        let g = io::attach_either(std::sync::Arc::new(mesh), values).unwrap();
        assert_eq!(g.mode(), f.mode(), "{name}");
        if let (Ok(a), Ok(b)) = (classify_all(&f), classify_all(&g)) {
            assert_eq!(a, b, "{name}");
        }
    }
}

#[test]
fn closed_genus_sweep() {
    for g in 0..=3usize {
        let f = gallery::gen_closed(g, 1, 0.3).unwrap();
        let r = verify_maxwell(&f).unwrap();
        assert_eq!(r.lhs, int(2 * g as i64));
    }
}
