//! End-to-end acceptance checks.  Each criterion prints exactly one
//! `pass`/`FAIL` line; the test fails if any criterion fails.

use endokit_core::endoscopy::{
    enumerate_classes, enumerate_elliptic, is_isomorphic_in, kernel_subsystem, out_group_in,
    Ambient, EndoTriple, EquivMode,
};
use endokit_core::galois::GaloisForm;
use endokit_core::groups;
use endokit_core::kottwitz::{
    kottwitz_set, kottwitz_set_direct, sd_set, stable_subsets, t_map, verify_induction,
    verify_sum_formula, KotCtx,
};
use endokit_core::lattice::*;
use endokit_core::levi::{
    fiber_in, fiber_count_direct, inner_class_count, is_acceptable, x_map_in, y_map_in,
    ValuationElt,
};
use endokit_core::root_datum::{levi_from_cochar, standard_levi, StdLevi};
use num::{BigInt, BigRational, Signed};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::collections::BTreeSet;
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

fn arc(form: GaloisForm) -> Arc<GaloisForm> {
    Arc::new(form)
}

fn minuscule_mus(n: usize) -> Vec<Vec<BigInt>> {
    (1..=n)
        .map(|k| (0..n).map(|i| BigInt::from(if i < k { 1 } else { 0 })).collect())
        .collect()
}

fn criterion_1_sum_formula() -> Result<(), String> {
    let start = Instant::now();
    let mut cases: Vec<(Arc<GaloisForm>, Vec<EndoTriple>, Vec<Vec<BigInt>>)> = Vec::new();
    for rank in 1..=3 {
        let t = arc(groups::torus(rank));
        let cls = vec![EndoTriple::trivial(&t)];
        let mu: Vec<BigInt> = (0..rank).map(|i| BigInt::from(i as i64 + 1)).collect();
        cases.push((t, cls, vec![mu]));
    }
    for n in 2..=4 {
        let g = arc(groups::gl(n));
        let cls = enumerate_elliptic(&g, 4);
        let cls = if cls.is_empty() { vec![EndoTriple::trivial(&g)] } else { cls };
        cases.push((g, cls, minuscule_mus(n)));
    }
    let sl2 = arc(groups::with_trivial_galois(groups::sl(2), 2));
    let sl2_cls = enumerate_elliptic(&sl2, 4);
    if sl2_cls.len() != 2 {
        return Err(format!("SL_2 should have 2 elliptic classes, found {}", sl2_cls.len()));
    }
    cases.push((sl2, sl2_cls, vec![vec![BigInt::from(1)]]));
    let u3 = arc(groups::u(3).unwrap());
    let u3_cls = enumerate_elliptic(&u3, 4);
    if u3_cls.is_empty() {
        return Err("U(3) has no enumerated elliptic classes".to_string());
    }
    cases.push((u3, u3_cls, vec![lat_vec(&[1, 0, 0])]));
    for (g, classes, mus) in &cases {
        for hcls in classes {
            for mu in mus {
                let residual = verify_sum_formula(g, hcls, mu, 1);
                if !residual.is_zero() {
                    return Err(format!(
                        "nonzero residual ({} terms) for rank-{} group, s = {:?}, mu = {:?}",
                        residual.len(),
                        g.rank(),
                        hcls.s.coords(),
                        mu
                    ));
                }
            }
        }
    }
    let elapsed = start.elapsed();
    if elapsed.as_secs() >= 60 {
        return Err(format!("sum-formula sweep took {elapsed:?}, budget is 60 s"));
    }
    Ok(())
}

fn fiber_cases() -> Vec<(Arc<GaloisForm>, Vec<EndoTriple>)> {
    let mut out = Vec::new();
    for n in 2..=4 {
        let g = arc(groups::gl(n));
        let cls = enumerate_classes(&g, 2, false, EquivMode::Central);
        out.push((g, cls));
    }
    let u3 = arc(groups::u(3).unwrap());
    let cls = enumerate_classes(&u3, 2, false, EquivMode::Central);
    out.push((u3, cls));
    out
}

fn criterion_2_fiber_parametrization() -> Result<(), String> {
    let start = Instant::now();
    for (g, classes) in fiber_cases() {
        let amb = Ambient::new(g.clone());
        for t in &classes {
            for subset in stable_subsets(&g) {
                let levi = standard_levi(&g.brd, &subset);
                let fib = fiber_in(&amb, t, &levi)
                    .map_err(|e| format!("fiber failed on rank {}: {e}", g.rank()))?;
                let direct = fiber_count_direct(&amb, t, &levi);
                if fib.len() != direct {
                    return Err(format!(
                        "fiber count {} != direct count {} (rank {}, s = {:?}, S = {:?})",
                        fib.len(),
                        direct,
                        g.rank(),
                        t.s.coords(),
                        subset
                    ));
                }
            }
        }
    }
    let elapsed = start.elapsed();
    if elapsed.as_secs() >= 120 {
        return Err(format!("fiber sweep took {elapsed:?}, budget is 120 s"));
    }
    Ok(())
}

/// Brute-force inner-class enumeration: sweep the central-slack stabilizer
/// of the ambient datum over the embedded datum's conjugator and count the
/// distinct strict classes of the restrictions.
fn inner_classes_brute(
    amb: &Ambient,
    e: &endokit_core::levi::EmbeddedDatum,
) -> usize {
    let t = &e.triple;
    let stab = out_group_in(amb, t);
    let levi_form = Arc::new(t.form.levi_form(&e.ambient_levi.subset));
    let levi_amb = Ambient::new(levi_form);
    let wh: Vec<LatAut> = t.subsystem_weyl().into_iter().collect();
    let mut classes: Vec<EndoTriple> = Vec::new();
    for rep in &stab.reps {
        // re-correct the twisted conjugator so it restricts
        let mut found: Option<usize> = None;
        for h in &wh {
            let gm = e.conjugator.x_action.compose(&rep.compose(h));
            let Some(gi) = amb.weyl.index_of(&gm) else { continue };
            if endokit_core::levi::restriction_cut(amb, t, &e.ambient_levi, gi).is_some() {
                found = Some(gi);
                break;
            }
        }
        let Some(gi) = found else { continue };
        let e2 = endokit_core::levi::EmbeddedDatum {
            triple: t.clone(),
            ambient_levi: e.ambient_levi.clone(),
            h_levi: endokit_core::levi::restriction_cut(amb, t, &e.ambient_levi, gi).unwrap(),
            conjugator: amb.weyl.elements[gi].clone(),
        };
        let tm = x_map_in(amb, &e2);
        if !classes.iter().any(|c| is_isomorphic_in(&levi_amb, c, &tm).is_some()) {
            classes.push(tm);
        }
    }
    classes.len().max(1)
}

fn criterion_3_inner_class_count() -> Result<(), String> {
    for (g, classes) in fiber_cases() {
        let amb = Ambient::new(g.clone());
        for t in &classes {
            for subset in stable_subsets(&g) {
                let levi = standard_levi(&g.brd, &subset);
                let fib = fiber_in(&amb, t, &levi).map_err(|e| e.to_string())?;
                for e in &fib {
                    let fast = inner_class_count(e);
                    let brute = inner_classes_brute(&amb, e);
                    if fast != brute {
                        return Err(format!(
                            "inner_class_count {fast} != brute force {brute} (rank {}, s = {:?}, S = {:?})",
                            g.rank(),
                            t.s.coords(),
                            subset
                        ));
                    }
                }
            }
        }
    }
    Ok(())
}

fn criterion_4_refemb_round_trip() -> Result<(), String> {
    for (g, classes) in fiber_cases() {
        let amb = Ambient::new(g.clone());
        for t in &classes {
            for subset in stable_subsets(&g) {
                let levi = standard_levi(&g.brd, &subset);
                let fib = fiber_in(&amb, t, &levi).map_err(|e| e.to_string())?;
                for e in &fib {
                    let tm = x_map_in(&amb, e);
                    let lifted = y_map_in(&amb, &tm);
                    if is_isomorphic_in(&amb, &lifted, t).is_none() {
                        return Err(format!(
                            "Y(X(e)) lands outside the class of t (rank {}, s = {:?}, S = {:?})",
                            g.rank(),
                            t.s.coords(),
                            subset
                        ));
                    }
                }
            }
        }
    }
    Ok(())
}

fn criterion_5_centralizer_levi() -> Result<(), String> {
    for (g, classes) in fiber_cases() {
        for t in &classes {
            let roots_zg = kernel_subsystem(&g, &t.s);
            for subset in stable_subsets(&g) {
                let levi = standard_levi(&g.brd, &subset);
                let levi_form = g.levi_form(&subset);
                // kernel inside the Levi, named by root vectors
                let zm: BTreeSet<LatVec> = kernel_subsystem(&levi_form, &t.s)
                    .into_iter()
                    .map(|i| levi_form.brd.datum.roots[i].clone())
                    .collect();
                let inter: BTreeSet<LatVec> = roots_zg
                    .iter()
                    .filter(|&&i| levi.root_indices.contains(&i))
                    .map(|&i| g.brd.datum.roots[i].clone())
                    .collect();
                if zm != inter {
                    return Err(format!(
                        "centralizer roots in the Levi differ from the intersection (rank {}, s = {:?}, S = {:?})",
                        g.rank(),
                        t.s.coords(),
                        subset
                    ));
                }
            }
        }
    }
    Ok(())
}

fn criterion_6_kottwitz_sanity() -> Result<(), String> {
    let gl2 = arc(groups::gl(2));
    let gl3 = arc(groups::gl(3));
    let t3 = arc(groups::torus(3));
    let checks: Vec<(&str, Arc<GaloisForm>, Vec<BigInt>, usize)> = vec![
        ("GL_2 (1,0)", gl2, lat_vec(&[1, 0]), 2),
        ("GL_3 (1,0,0)", gl3, lat_vec(&[1, 0, 0]), 3),
        ("torus", t3, lat_vec(&[5, -2, 0]), 1),
    ];
    for (label, g, mu, expect) in checks {
        let set = kottwitz_set(&g, &mu);
        if set.len() != expect {
            return Err(format!("{label}: expected {expect} points, got {}", set.len()));
        }
        let direct = kottwitz_set_direct(&g, &mu);
        if set != direct {
            return Err(format!("{label}: Newton-point cross-check disagrees"));
        }
        // the Newton fibers partition the averaged-dominant set
        let ctx = KotCtx::new(g.clone());
        let trivial = EndoTriple::trivial(&g);
        for c in sd_set(&ctx, &trivial, &mu) {
            let b = t_map(&ctx, &c).map_err(|e| e.to_string())?;
            if set.iter().filter(|p| **p == b).count() != 1 {
                return Err(format!("{label}: a datum maps to {} points", 0));
            }
        }
    }
    Ok(())
}

fn criterion_7_induction() -> Result<(), String> {
    let cases: Vec<(Arc<GaloisForm>, Vec<Vec<BigInt>>)> = vec![
        (arc(groups::gl(3)), vec![lat_vec(&[1, 0, 0]), lat_vec(&[1, 1, 0])]),
        (arc(groups::gl(4)), vec![lat_vec(&[1, 0, 0, 0])]),
    ];
    for (g, mus) in &cases {
        let trivial = EndoTriple::trivial(g);
        let full: BTreeSet<usize> = (0..g.brd.base.len()).collect();
        for mu in mus {
            let points = kottwitz_set(g, mu);
            for b in &points {
                for subset in stable_subsets(g) {
                    if subset == full || !b.levi.subset.is_subset(&subset) {
                        continue;
                    }
                    let levi = standard_levi(&g.brd, &subset);
                    let residual = verify_induction(g, &levi, &trivial, b, mu)
                        .map_err(|e| e.to_string())?;
                    if !residual.is_zero() {
                        return Err(format!(
                            "nonzero induction residual (rank {}, mu {:?}, S = {:?})",
                            g.rank(),
                            mu,
                            subset
                        ));
                    }
                }
            }
        }
    }
    Ok(())
}

fn rand_rat(rng: &mut StdRng) -> BigRational {
    rat(rng.gen_range(-8i64..=8), rng.gen_range(1i64..=4))
}

/// Reference predicate: literal sign comparison on every root outside `M`.
fn acceptable_direct(g: &GaloisForm, levi: &StdLevi, nu: &RatVec, w: &RatVec) -> bool {
    (0..g.brd.datum.roots.len()).all(|i| {
        if levi.root_indices.contains(&i) {
            return true;
        }
        let a = &g.brd.datum.roots[i];
        pair_ir(a, nu).is_positive() == pair_ir(a, w).is_positive()
    })
}

fn criterion_8_acceptability() -> Result<(), String> {
    let groups: Vec<GaloisForm> = vec![groups::gl(2), groups::gl(3), groups::u(3).unwrap()];
    let mut rng = StdRng::seed_from_u64(0x5eed);
    for g in &groups {
        let n = g.rank();
        let full: BTreeSet<usize> = (0..g.brd.base.len()).collect();
        let mut tested = 0usize;
        while tested < 1000 {
            let raw: RatVec = (0..n).map(|_| rand_rat(&mut rng)).collect();
            let (nu, _) = endokit_core::root_datum::dominant_rep(&g.brd, &full, &raw);
            let t: RatVec = (0..n).map(|_| rand_rat(&mut rng)).collect();
            let s = rat(rng.gen_range(0i64..=6), 1);
            let w: RatVec = nu.iter().zip(&t).map(|(a, b)| a * s.clone() + b).collect();
            let levi = levi_from_cochar(&g.brd, &nu);
            let got = is_acceptable(&ValuationElt { w: w.clone() }, &nu, &levi, &g.brd)
                .map_err(|e| e.to_string())?;
            if got != acceptable_direct(g, &levi, &nu, &w) {
                return Err(format!("predicate mismatch at rank {} witness {tested}", n));
            }
            tested += 1;
        }
        // witness family s*nu + t: accepted exactly above the analytic
        // threshold max over outside roots of -pair(a,t)/pair(a,nu).  A
        // dominant nu pairs nonzero against every root outside its
        // centralizer Levi, so the bound is finite.
        for _ in 0..50 {
            let raw: RatVec = (0..n).map(|_| rand_rat(&mut rng)).collect();
            let (nu, _) = endokit_core::root_datum::dominant_rep(&g.brd, &full, &raw);
            let t: RatVec = (0..n).map(|_| rand_rat(&mut rng)).collect();
            let levi = levi_from_cochar(&g.brd, &nu);
            let mut threshold: Option<BigRational> = None;
            for i in 0..g.brd.datum.roots.len() {
                if levi.root_indices.contains(&i) {
                    continue;
                }
                let a = &g.brd.datum.roots[i];
                let p_nu = pair_ir(a, &nu);
                let p_t = pair_ir(a, &t);
                let bound = -p_t / p_nu;
                if threshold.as_ref().is_none_or(|th| bound > *th) {
                    threshold = Some(bound);
                }
            }
            let Some(threshold) = threshold else {
                continue; // M = G: nothing outside to constrain
            };
            let eps = rat(1, 7);
            let probe = |s: &BigRational| -> bool {
                let w: RatVec = nu.iter().zip(&t).map(|(a, b)| a * s + b).collect();
                is_acceptable(&ValuationElt { w }, &nu, &levi, &g.brd).unwrap()
            };
            if !probe(&(threshold.clone() + eps.clone())) {
                return Err(format!("witness rejected above the threshold at rank {n}"));
            }
            if probe(&(threshold.clone() - eps)) {
                return Err(format!("witness accepted below the threshold at rank {n}"));
            }
        }
    }
    Ok(())
}

fn criterion_9_determinism() -> Result<(), String> {
    let bin = env!("CARGO_BIN_EXE_endokit");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let spec = dir.path().join("gl3.toml");
    std::fs::write(&spec, "[group]\nbuiltin = \"GL\"\nn = 3\n").map_err(|e| e.to_string())?;
    let suite: Vec<Vec<&str>> = vec![
        vec!["validate"],
        vec!["endoscopy", "--max-order", "2"],
        vec!["kottwitz", "--mu", "1,1,0"],
        vec!["sum-check", "--mu", "1,1,0"],
        vec!["induction-check", "--levi", "0,1", "--mu", "1,0,0", "--b", "1"],
    ];
    for args in &suite {
        let mut outputs = Vec::new();
        for jobs in ["1", "8"] {
            // two successive runs per jobs setting
            for _ in 0..2 {
                let out = Command::new(bin)
                    .arg("--spec")
                    .arg(&spec)
                    .arg("--jobs")
                    .arg(jobs)
                    .args(args)
                    .output()
                    .map_err(|e| e.to_string())?;
                outputs.push((out.status.code(), out.stdout));
            }
        }
        if !outputs.windows(2).all(|w| w[0] == w[1]) {
            return Err(format!("outputs differ across jobs/runs for {args:?}"));
        }
    }
    Ok(())
}

#[test]
fn acceptance() {
    let criteria: Vec<(&str, fn() -> Result<(), String>)> = vec![
        ("1 sum formula", criterion_1_sum_formula),
        ("2 fiber parametrization", criterion_2_fiber_parametrization),
        ("3 inner-class count", criterion_3_inner_class_count),
        ("4 embedded/refined round trip", criterion_4_refemb_round_trip),
        ("5 centralizer-Levi identity", criterion_5_centralizer_levi),
        ("6 Kottwitz set sanity", criterion_6_kottwitz_sanity),
        ("7 induction formula", criterion_7_induction),
        ("8 acceptability predicate", criterion_8_acceptability),
        ("9 determinism", criterion_9_determinism),
    ];
    let mut failures = Vec::new();
    for (name, f) in criteria {
        match f() {
            Ok(()) => println!("criterion {name}: pass"),
            Err(msg) => {
                println!("criterion {name}: FAIL ({msg})");
                failures.push(name);
            }
        }
    }
    assert!(failures.is_empty(), "failed criteria: {failures:?}");
}
