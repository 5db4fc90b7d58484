//! Acceptance suite. Runs without the test harness and prints one line per
//! criterion; exits non-zero if any criterion fails.

mod common;

use std::collections::{BTreeSet, VecDeque};
use std::panic;
use std::sync::Arc;
use std::time::Instant;

use rado_core::classify::{classify_all, classify_vertex, hopf_index, CriticalKind, Locus};
use rado_core::exact::{half, int, Rational};
use rado_core::field::ScalarField;
use rado_core::gallery::{self, BranchAxis};
use rado_core::mesh::{double, homology_from_euler, homology_z2};
use rado_core::network::{extract_level_network, network_euler, SStarRule};
use rado_core::regions::{beta, quotient_constant_boundary};
use rado_core::verify::{
    probe_levels, verify_closed, verify_counting, verify_general, verify_inequality,
    verify_interval, verify_maxwell, verify_perturbation_stability, verify_slice,
    PerturbationOptions,
};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn criterion_1() -> Outcome {
    for g in 0..=3usize {
        let f = gallery::gen_closed(g, 1, 0.1234).map_err(|e| e.to_string())?;
        let (w, extrema) = common::totals(&f);
        ensure!(w == 2 * g, "g={g}: oracle saddle multiplicity {w}");
        ensure!(extrema == 2, "g={g}: oracle finds {extrema} extrema");
        let s = classify_all(&f).map_err(|e| e.to_string())?;
        for v in 0..f.mesh().vertex_count() {
            ensure!(
                s.get(v).valence == common::valence(&f, v),
                "g={g}: valence mismatch at {v}"
            );
        }
        let closed = verify_closed(&f).map_err(|e| e.to_string())?;
        let maxwell = verify_maxwell(&f).map_err(|e| e.to_string())?;
        ensure!(closed.pass, "g={g}: closed identity fails {closed:?}");
        ensure!(maxwell.pass, "g={g}: maxwell fails {maxwell:?}");
        ensure!(
            maxwell.lhs == int(2 * g as i64) && maxwell.rhs == int(2) - int(2 - 2 * g as i64),
            "g={g}: maxwell sides {} vs {}",
            maxwell.lhs,
            maxwell.rhs
        );
    }
    Ok("g = 0..3: Σw = 2g = 2 − χ, oracle agrees".into())
}

fn criterion_2() -> Outcome {
    for k in 2..=5usize {
        let f = gallery::gen_disk_harmonic(k, 8 * k).map_err(|e| e.to_string())?;
        let s = classify_all(&f).map_err(|e| e.to_string())?;
        ensure!(s.interior_multiplicity == k - 1, "k={k}: N = {}", s.interior_multiplicity);
        ensure!(s.q.len() == k && s.q_boundary.len() == k, "k={k}: |Q| = {}", s.q.len());
        ensure!(s.boundary_multiplicity == 0, "k={k}: s_bd = {}", s.boundary_multiplicity);
        let r = verify_general(&f).map_err(|e| e.to_string())?;
        ensure!(r.pass && r.lhs == int(k as i64 - 1), "k={k}: {r:?}");
        let (w, _) = common::totals(&f);
        ensure!(w == k - 1, "k={k}: oracle Σw = {w}");
    }
    Ok("k = 2..5: Σw = k − 1 = |Q| − χ, s_bd = 0".into())
}

fn criterion_3() -> Outcome {
    for k in 2..=5usize {
        let f = gallery::gen_disk_harmonic(k, 8 * k).map_err(|e| e.to_string())?;
        let r = verify_inequality(&f).map_err(|e| e.to_string())?;
        ensure!(r.pass && r.equality_attained == Some(true), "k={k}: {r:?}");
        ensure!(r.term_value("A") == Some(int(0)), "k={k}: A non-empty");
        ensure!(r.witness.is_empty(), "k={k}: witness {:?}", r.witness);
    }
    let f = gallery::boundary_saddle_fan().map_err(|e| e.to_string())?;
    let r = verify_inequality(&f).map_err(|e| e.to_string())?;
    ensure!(r.pass, "handcrafted: {r:?}");
    ensure!(r.equality_attained == Some(false), "handcrafted: inequality not strict");
    ensure!(r.witness == vec![0], "handcrafted: witness {:?}", r.witness);
    ensure!(classify_vertex(&f, 0).unwrap().valence == 3, "apex valence");
    Ok(format!(
        "equality on harmonic disks; valence-3 apex gives {} < {}, witness {:?}",
        r.lhs, r.rhs, r.witness
    ))
}

fn criterion_4() -> Outcome {
    let f = gallery::gen_disk_harmonic(2, 16).map_err(|e| e.to_string())?;
    let r = verify_slice(&f, 0.0, SStarRule::OffLevel).map_err(|e| e.to_string())?;
    let two = int(2);
    ensure!(
        r.pass
            && r.lhs == two
            && r.rhs == two
            && r.term_value("bound_J") == Some(two)
            && r.term_value("bound_k") == Some(two),
        "Re(z²) at 0: {r:?}"
    );

    let meshes = common::random_meshes();
    let mut slices = 0;
    for seed in 0..100u64 {
        let (name, mesh) = &meshes[seed as usize % meshes.len()];
        let f = gallery::gen_random_field(mesh.clone(), seed).map_err(|e| e.to_string())?;
        let values: BTreeSet<u64> = f.values().iter().map(|x| x.to_bits()).collect();
        for t in probe_levels(&f) {
            if values.contains(&t.to_bits()) {
                for rule in [SStarRule::OffLevel, SStarRule::OneSided] {
                    let s = verify_slice(&f, t, rule).map_err(|e| e.to_string())?;
                    ensure!(s.pass, "{name} seed {seed} t={t} {rule:?}: {s:?}");
                }
            }
            let c = verify_counting(&f, t).map_err(|e| e.to_string())?;
            ensure!(c.pass, "{name} seed {seed} t={t}: counting {c:?}");
            slices += 1;
        }
    }
    Ok(format!("Re(z²) at 0 tight at 2; {slices} random slices pass"))
}

fn criterion_5() -> Outcome {
    let strip = gallery::gen_strip(4, 3).map_err(|e| e.to_string())?;
    let r = verify_interval(&strip, 0.25, 0.75).map_err(|e| e.to_string())?;
    ensure!(
        r.pass
            && r.lhs == int(0)
            && r.term_value("Q_band") == Some(int(0))
            && r.term_value("beta") == Some(int(2))
            && r.term_value("chi_band") == Some(int(1)),
        "strip: {r:?}"
    );
    let disk = gallery::gen_disk_harmonic(2, 16).map_err(|e| e.to_string())?;
    let r = verify_interval(&disk, -0.5, 0.5).map_err(|e| e.to_string())?;
    ensure!(
        r.pass && r.lhs == int(1) && r.rhs == int(1) && r.term_value("beta") == Some(int(4)),
        "Re(z²): {r:?}"
    );

    let meshes = common::random_meshes();
    for trial in 0..50u64 {
        let (name, mesh) = &meshes[trial as usize % meshes.len()];
        let f = gallery::gen_random_field(mesh.clone(), 1000 + trial).map_err(|e| e.to_string())?;
        let levels = f.sorted_levels();
        // cut at a seeded subset of the gaps between consecutive values
        let cuts: Vec<f64> = levels
            .windows(2)
            .enumerate()
            .filter(|(i, _)| (i * 7 + trial as usize * 3).is_multiple_of(5))
            .map(|(_, w)| w[0] + (w[1] - w[0]) / 2.0)
            .collect();
        let mut ends = vec![f64::NEG_INFINITY];
        ends.extend(&cuts);
        ends.push(f64::INFINITY);
        let mut w_sum = int(0);
        let mut chi_sum = 0i64;
        for pair in ends.windows(2) {
            let r = verify_interval(&f, pair[0], pair[1]).map_err(|e| e.to_string())?;
            ensure!(r.pass, "{name} trial {trial} band {pair:?}: {r:?}");
            w_sum += r.lhs;
            chi_sum += r.term_value("chi_band").unwrap().to_integer();
        }
        let total = verify_general(&f).map_err(|e| e.to_string())?;
        ensure!(w_sum == total.lhs, "{name} trial {trial}: bands {w_sum} vs {}", total.lhs);
        let glue: Rational = cuts.iter().map(|&t| half(beta(&f, t) as i64)).sum();
        let chi = f.mesh().euler_characteristic();
        ensure!(
            int(chi) == int(chi_sum) - glue,
            "{name} trial {trial}: χ {chi} vs {chi_sum} − {glue}"
        );
    }
    Ok("strip 0 = 0 + 1 − 1; Re(z²) 1 = 0 + 2 − 1; 50 partitions additive".into())
}

fn criterion_6() -> Outcome {
    let mut seen = Vec::new();
    for k in 1..=3usize {
        for n in [8 * k, 12 * k, 16 * k] {
            let f = gallery::gen_disk_harmonic(k, n).map_err(|e| e.to_string())?;
            let h = hopf_index(&f, 0).map_err(|e| format!("k={k} n={n}: {e}"))?;
            ensure!(h == 1 - k as i64, "k={k} n={n}: index {h}");
        }
        seen.push(1 - k as i64);
    }
    Ok(format!("centre indices {seen:?} for k = 1, 2, 3"))
}

fn criterion_7() -> Outcome {
    let (q, d) = (2, 3);
    let m = q - 1;
    let n = 8 * q.max(d);
    let transverse = gallery::gen_branched(q, d, n, BranchAxis::FirstCoordinate).map_err(|e| e.to_string())?;
    let tangent = gallery::gen_branched(q, d, n, BranchAxis::Height).map_err(|e| e.to_string())?;
    let wt = classify_vertex(&transverse, 0).map_err(|e| e.to_string())?.multiplicity;
    let wh = classify_vertex(&tangent, 0).map_err(|e| e.to_string())?.multiplicity;
    ensure!(wt == 1 && wt == m, "transverse w = {wt}");
    ensure!(wh == 2 && wh > m, "height w = {wh}");
    for q in 1..=3 {
        for d in 1..=3 {
            let n = 8 * q.max(d);
            let a = gallery::gen_branched(q, d, n, BranchAxis::FirstCoordinate).unwrap();
            let b = gallery::gen_branched(q, d, n, BranchAxis::Height).unwrap();
            let va = classify_vertex(&a, 0).unwrap().valence;
            let vb = classify_vertex(&b, 0).unwrap().valence;
            ensure!(va == 2 * q && vb == 2 * d, "Q={q} d={d}: valences {va}, {vb}");
        }
    }
    Ok(format!("transverse w = {wt} = m; height w = {wh} > m = {m}"))
}

/// Vertices within `radius` edges of `v`.
fn ball(f: &ScalarField, v: usize, radius: usize) -> Vec<usize> {
    let mesh = f.mesh();
    let mut dist = vec![usize::MAX; mesh.vertex_count()];
    dist[v] = 0;
    let mut queue = VecDeque::from([v]);
    while let Some(u) = queue.pop_front() {
        if dist[u] == radius {
            continue;
        }
        for &w in &mesh.link(u).vertices {
            if dist[w] == usize::MAX {
                dist[w] = dist[u] + 1;
                queue.push_back(w);
            }
        }
    }
    (0..mesh.vertex_count()).filter(|&u| dist[u] != usize::MAX).collect()
}

fn criterion_8() -> Outcome {
    let f = gallery::gen_torus(24, 12, 0.3).map_err(|e| e.to_string())?;
    let s = classify_all(&f).map_err(|e| e.to_string())?;
    let critical: Vec<usize> = s
        .vertices
        .iter()
        .filter(|c| c.kind != CriticalKind::Regular)
        .map(|c| c.vertex)
        .collect();
    let mut regions: Vec<Vec<usize>> = vec![(0..f.mesh().vertex_count()).collect()];
    for &c in &critical {
        for r in 1..=3 {
            regions.push(ball(&f, c, r));
        }
    }
    let mut tested = 0;
    let mut with_saddle = 0;
    let mut skipped = 0;
    for (i, k) in regions.iter().enumerate() {
        let options = PerturbationOptions {
            epsilon: None,
            trials: 100,
            seed: i as u64,
        };
        match verify_perturbation_stability(&f, k, options) {
            Ok(r) => {
                ensure!(r.pass, "region {i}: {r:?}");
                tested += 1;
                if k.iter().any(|&v| s.get(v).kind == CriticalKind::InteriorSaddle) {
                    with_saddle += 1;
                }
            }
            Err(rado_core::verify::VerifyError::NonRegularRegionBoundary(_)) => skipped += 1,
            Err(e) => return Err(e.to_string()),
        }
    }
    ensure!(with_saddle >= 2, "only {with_saddle} tested regions contain a saddle");
    Ok(format!(
        "{tested} regions × 100 perturbations stable ({with_saddle} with saddles, {skipped} rejected)"
    ))
}

fn criterion_9() -> Outcome {
    let mut fields = common::gallery_fields();
    let meshes = common::random_meshes();
    for seed in 0..100u64 {
        let (name, mesh) = &meshes[seed as usize % meshes.len()];
        fields.push((
            format!("random {name} {seed}"),
            gallery::gen_random_field(mesh.clone(), seed).unwrap(),
        ));
    }
    fields.push((
        "seven-vertex torus".into(),
        gallery::gen_random_field(Arc::new(gallery::seven_vertex_torus()), 3).unwrap(),
    ));
    let mut vertices = 0;
    let mut slices = 0;
    let mut doubles = 0;
    for (name, f) in &fields {
        let mesh = f.mesh();
        for v in 0..mesh.vertex_count() {
            let Ok(c) = classify_vertex(f, v) else {
                ensure!(f.touches_constant_boundary(v), "{name}: vertex {v} unclassifiable");
                continue;
            };
            ensure!(c.valence == common::valence(f, v), "{name}: oracle valence at {v}");
            match c.locus {
                Locus::Interior => ensure!(c.valence % 2 == 0, "{name}: odd interior {v}"),
                Locus::Boundary => ensure!(
                    (c.valence % 2 == 0) == (c.is_boundary_min() || c.is_boundary_max()),
                    "{name}: boundary parity at {v}"
                ),
            }
            vertices += 1;
        }
        let h = homology_z2(mesh);
        ensure!(h.euler() == mesh.euler_characteristic(), "{name}: homology Euler");
        ensure!(h == homology_from_euler(mesh), "{name}: homology shortcut");
        if !mesh.is_closed() {
            if let Ok(d) = double(mesh) {
                ensure!(d.mesh.is_closed(), "{name}: double has boundary");
                ensure!(
                    d.mesh.euler_characteristic() == 2 * mesh.euler_characteristic(),
                    "{name}: double χ"
                );
                doubles += 1;
            }
        }
        let constant: BTreeSet<u64> = f
            .constant_boundary_edges()
            .iter()
            .map(|&e| f.value(mesh.edges()[e][0]).to_bits())
            .collect();
        for t in probe_levels(f) {
            if constant.contains(&t.to_bits()) {
                continue;
            }
            let x = extract_level_network(f, t).map_err(|e| format!("{name}: {e}"))?;
            let r = network_euler(&x);
            ensure!(r.pass, "{name} t={t}: network χ {r:?}");
            slices += 1;
        }
    }
    let mobius = gallery::gen_mobius(12).unwrap();
    let klein = double(mobius.mesh()).map_err(|e| e.to_string())?;
    ensure!(homology_z2(&klein.mesh).d1 == 2, "Klein bottle d1");
    Ok(format!(
        "{} fields, {vertices} vertices, {slices} slices, {doubles} doubles",
        fields.len()
    ))
}

fn criterion_10() -> Outcome {
    let annulus = gallery::gen_relaxed_annulus(16, 3).map_err(|e| e.to_string())?;
    ensure!(
        verify_general(&annulus).is_err(),
        "relaxed annulus should be refused before the quotient"
    );
    let interior_n = |f: &ScalarField| -> usize {
        (0..f.mesh().vertex_count())
            .filter(|&v| !f.mesh().is_boundary_vertex(v))
            .map(|v| classify_vertex(f, v).unwrap().multiplicity)
            .sum()
    };
    let n = interior_n(&annulus);
    let q = quotient_constant_boundary(&annulus).map_err(|e| e.to_string())?;
    ensure!(q.mesh.euler_characteristic() == 1, "quotient is not a disk");
    ensure!(
        q.collapsed.len() == 1 && q.collapsed[0].closed_cycle && q.collapsed[0].locus == Locus::Interior,
        "collapsed cycle {:?}",
        q.collapsed
    );
    let r = verify_general(&q.field).map_err(|e| e.to_string())?;
    ensure!(r.pass, "quotient report {r:?}");
    let s = classify_all(&q.field).map_err(|e| e.to_string())?;
    let chi_q = q.mesh.euler_characteristic();
    let reduction = s.q.len() as i64 - chi_q - s.boundary_multiplicity as i64;
    ensure!(n as i64 == reduction, "cycle: N = {n}, reduction {reduction}");
    let apex = q.collapsed[0].new_vertex;
    ensure!(s.get(apex).kind == CriticalKind::LocalMin, "apex is not an extremum");

    let arcs = gallery::gen_annulus_with_arcs(16, 3, 2).map_err(|e| e.to_string())?;
    let n_arcs = interior_n(&arcs);
    let qa = quotient_constant_boundary(&arcs).map_err(|e| e.to_string())?;
    ensure!(
        qa.collapsed.len() == 2 && qa.collapsed.iter().all(|c| c.locus == Locus::Boundary),
        "arcs {:?}",
        qa.collapsed
    );
    let chi = arcs.mesh().euler_characteristic();
    ensure!(qa.mesh.euler_characteristic() == chi, "arc quotient changes χ");
    let ra = verify_general(&qa.field).map_err(|e| e.to_string())?;
    ensure!(ra.pass, "arc quotient report {ra:?}");
    let sa = classify_all(&qa.field).map_err(|e| e.to_string())?;
    let reduction_a = sa.q.len() as i64 - chi - sa.boundary_multiplicity as i64;
    ensure!(n_arcs as i64 == reduction_a, "arcs: N = {n_arcs}, reduction {reduction_a}");
    Ok(format!(
        "cycle: N = {n} = {} − {chi_q} − {}; arcs: N = {n_arcs} = {} − {chi} − {}",
        s.q.len(),
        s.boundary_multiplicity,
        sa.q.len(),
        sa.boundary_multiplicity
    ))
}

fn main() {
    // keep panics from interleaving with the report lines
    panic::set_hook(Box::new(|_| {}));
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("closed surfaces and Maxwell count", criterion_1),
        ("boundary formula on harmonic disks", criterion_2),
        ("inequality and its equality case", criterion_3),
        ("slice bounds and counting identity", criterion_4),
        ("interval formula and band additivity", criterion_5),
        ("Hopf index at harmonic centres", criterion_6),
        ("branch multiplicity", criterion_7),
        ("perturbation stability on the torus", criterion_8),
        ("structural invariants", criterion_9),
        ("quotient of constant boundary", criterion_10),
    ];
    let start = Instant::now();
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(run).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {}/{} passed in {:.1}s",
        criteria.len() - failures,
        criteria.len(),
        start.elapsed().as_secs_f64()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
