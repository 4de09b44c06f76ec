use endokit_core::endoscopy::{enumerate_elliptic, EndoTriple};
use endokit_core::groups;
use endokit_core::kottwitz::*;
use endokit_core::lattice::{int, lat_vec, rat, TorsionVec};
use num::BigInt;
use std::sync::Arc;

fn arc(form: endokit_core::GaloisForm) -> Arc<endokit_core::GaloisForm> {
    Arc::new(form)
}

fn nu_of(p: &KottwitzPoint) -> Vec<(i64, i64)> {
    p.nu
        .iter()
        .map(|c| {
            let n: i64 = c.numer().try_into().unwrap();
            let d: i64 = c.denom().try_into().unwrap();
            (n, d)
        })
        .collect()
}

#[test]
fn kottwitz_set_gl2_minuscule() {
    let g = arc(groups::gl(2));
    let set = kottwitz_set(&g, &lat_vec(&[1, 0]));
    assert_eq!(set.len(), 2);
    let nus: Vec<_> = set.iter().map(nu_of).collect();
    assert_eq!(nus, vec![vec![(1, 2), (1, 2)], vec![(1, 1), (0, 1)]]);
    // the basic point has central Newton cocharacter, hence full Levi
    assert_eq!(set[0].levi.subset.len(), 1);
    assert_eq!(set[1].levi.subset.len(), 0);
}

#[test]
fn kottwitz_set_gl3_minuscule() {
    let g = arc(groups::gl(3));
    let set = kottwitz_set(&g, &lat_vec(&[1, 0, 0]));
    assert_eq!(set.len(), 3);
    let nus: Vec<_> = set.iter().map(nu_of).collect();
    assert_eq!(
        nus,
        vec![
            vec![(1, 3), (1, 3), (1, 3)],
            vec![(1, 2), (1, 2), (0, 1)],
            vec![(1, 1), (0, 1), (0, 1)],
        ]
    );
}

#[test]
fn kottwitz_set_gl3_non_minuscule_weight() {
    let g = arc(groups::gl(3));
    let set = kottwitz_set(&g, &lat_vec(&[1, 1, 0]));
    assert_eq!(set.len(), 3);
    let nus: Vec<_> = set.iter().map(nu_of).collect();
    assert_eq!(
        nus,
        vec![
            vec![(2, 3), (2, 3), (2, 3)],
            vec![(1, 1), (1, 2), (1, 2)],
            vec![(1, 1), (1, 1), (0, 1)],
        ]
    );
}

#[test]
fn kottwitz_set_torus_is_singleton() {
    let t = arc(groups::torus(3));
    let set = kottwitz_set(&t, &lat_vec(&[2, -1, 5]));
    assert_eq!(set.len(), 1);
    assert_eq!(nu_of(&set[0]), vec![(2, 1), (-1, 1), (5, 1)]);
}

#[test]
fn kottwitz_set_matches_direct_enumeration() {
    let cases: Vec<(Arc<endokit_core::GaloisForm>, Vec<BigInt>)> = vec![
        (arc(groups::gl(2)), lat_vec(&[1, 0])),
        (arc(groups::gl(2)), lat_vec(&[2, 0])),
        (arc(groups::gl(3)), lat_vec(&[1, 0, 0])),
        (arc(groups::gl(3)), lat_vec(&[1, 1, 0])),
        (arc(groups::sl(2)), lat_vec(&[1])),
        (arc(groups::u(3).unwrap()), lat_vec(&[1, 0, 0])),
        (arc(groups::torus(2)), lat_vec(&[3, 1])),
    ];
    for (g, mu) in cases {
        let a = kottwitz_set(&g, &mu);
        let b = kottwitz_set_direct(&g, &mu);
        assert_eq!(a, b, "agreement for mu {:?}", mu);
    }
}

#[test]
fn newton_fibers_partition_sd() {
    let g = arc(groups::gl(3));
    let mu = lat_vec(&[1, 0, 0]);
    let ctx = KotCtx::new(g.clone());
    let trivial = EndoTriple::trivial(&g);
    let sd = sd_set(&ctx, &trivial, &mu);
    let points = kottwitz_set(&g, &mu);
    let mut matched = 0usize;
    for c in &sd {
        let b = t_map(&ctx, c).unwrap();
        let hits = points.iter().filter(|p| **p == b).count();
        assert_eq!(hits, 1, "each datum maps to exactly one point");
        matched += 1;
    }
    assert_eq!(matched, sd.len());
}

#[test]
fn basic_sum_gl2_is_top_minus_torus_term() {
    let g = arc(groups::gl(2));
    let mu = lat_vec(&[1, 0]);
    let ctx = KotCtx::new(g.clone());
    let trivial = EndoTriple::trivial(&g);
    let basic = kottwitz_set(&g, &mu).remove(0);
    assert_eq!(nu_of(&basic), vec![(1, 2), (1, 2)]);
    let m = m_sum(&ctx, &trivial, &basic, &mu).unwrap();
    assert_eq!(m.len(), 2);
    let top = top_cochar(&ctx, &trivial, &mu);
    assert_eq!(m.coeff(&top), BigInt::from(1));
    let torus_term = m
        .terms()
        .find(|(c, _)| c.levi.subset.is_empty())
        .map(|(c, k)| (c.mu.clone(), k.clone()))
        .unwrap();
    assert_eq!(torus_term, (lat_vec(&[1, 0]), BigInt::from(-1)));
}

#[test]
fn sum_formula_split_groups_trivial_class() {
    let cases: Vec<(Arc<endokit_core::GaloisForm>, Vec<BigInt>)> = vec![
        (arc(groups::gl(2)), lat_vec(&[1, 0])),
        (arc(groups::gl(2)), lat_vec(&[1, 1])),
        (arc(groups::gl(3)), lat_vec(&[1, 0, 0])),
        (arc(groups::gl(3)), lat_vec(&[1, 1, 0])),
        (arc(groups::sl(2)), lat_vec(&[1])),
        (arc(groups::torus(2)), lat_vec(&[4, 1])),
    ];
    for (g, mu) in cases {
        let trivial = EndoTriple::trivial(&g);
        let residual = verify_sum_formula(&g, &trivial, &mu, 1);
        assert!(residual.is_zero(), "residual {:?} for mu {:?}", residual.len(), mu);
    }
}

#[test]
fn sum_formula_all_elliptic_classes() {
    let cases: Vec<(Arc<endokit_core::GaloisForm>, Vec<BigInt>)> = vec![
        (arc(groups::sl(2)), lat_vec(&[1])),
        (arc(groups::u(3).unwrap()), lat_vec(&[1, 0, 0])),
        (arc(groups::gl(2)), lat_vec(&[1, 0])),
    ];
    for (g, mu) in cases {
        for hcls in enumerate_elliptic(&g, 4) {
            let residual = verify_sum_formula(&g, &hcls, &mu, 1);
            assert!(
                residual.is_zero(),
                "residual has {} terms for s {:?}",
                residual.len(),
                hcls.s
            );
        }
    }
}

#[test]
fn sum_formula_nontrivial_class_gl4() {
    let g = arc(groups::gl(4));
    let hcls = endokit_core::endoscopy::triple_from_element(
        &g,
        TorsionVec::from_pairs(&[(1, 2), (1, 2), (0, 1), (0, 1)]),
        vec![],
    )
    .unwrap();
    let residual = verify_sum_formula(&g, &hcls, &lat_vec(&[1, 0, 0, 0]), 1);
    assert!(residual.is_zero(), "residual has {} terms", residual.len());
}

#[test]
fn basic_sum_gl4_alternates_over_all_subsets() {
    let g = arc(groups::gl(4));
    let mu = lat_vec(&[1, 1, 0, 0]);
    let trivial = EndoTriple::trivial(&g);
    assert!(verify_sum_formula(&g, &trivial, &mu, 1).is_zero());
    let ctx = KotCtx::new(g.clone());
    let basic = kottwitz_set(&g, &mu).remove(0);
    assert_eq!(nu_of(&basic), vec![(1, 2); 4]);
    let m = m_sum(&ctx, &trivial, &basic, &mu).unwrap();
    // one term per stable subset, cocharacter always mu itself, sign
    // alternating with the subset size
    assert_eq!(m.len(), 8);
    for (c, k) in m.terms() {
        assert_eq!(c.mu, mu);
        let expect = if (3 - c.levi.subset.len()) % 2 == 0 { 1 } else { -1 };
        assert_eq!(k, &BigInt::from(expect), "subset {:?}", c.levi.subset);
    }
}

#[test]
fn sum_formula_jobs_agree() {
    let g = arc(groups::gl(3));
    let trivial = EndoTriple::trivial(&g);
    let mu = lat_vec(&[1, 1, 0]);
    let a = verify_sum_formula(&g, &trivial, &mu, 1);
    let b = verify_sum_formula(&g, &trivial, &mu, 8);
    assert_eq!(a, b);
}

#[test]
fn induction_residual_zero_gl3() {
    let g = arc(groups::gl(3));
    let mu = lat_vec(&[1, 0, 0]);
    let trivial = EndoTriple::trivial(&g);
    let points = kottwitz_set(&g, &mu);
    for b in &points {
        for subset in stable_subsets(&g) {
            let levi = endokit_core::root_datum::standard_levi(&g.brd, &subset);
            if !b.levi.subset.is_subset(&levi.subset) {
                continue;
            }
            let residual = verify_induction(&g, &levi, &trivial, b, &mu).unwrap();
            assert!(
                residual.is_zero(),
                "residual has {} terms for nu {:?} through {:?}",
                residual.len(),
                nu_of(b),
                levi.subset
            );
        }
    }
}

#[test]
fn induction_rejects_small_levi() {
    let g = arc(groups::gl(2));
    let mu = lat_vec(&[1, 0]);
    let trivial = EndoTriple::trivial(&g);
    // the basic point has full centralizer Levi, so the torus is too small
    let basic = kottwitz_set(&g, &mu).remove(0);
    let torus = endokit_core::root_datum::standard_levi(&g.brd, &Default::default());
    assert_eq!(
        verify_induction(&g, &torus, &trivial, &basic, &mu).unwrap_err(),
        KottwitzError::LeviTooSmall
    );
}

#[test]
fn poset_is_reflexive_and_antisymmetric() {
    let g = arc(groups::gl(3));
    let ctx = KotCtx::new(g.clone());
    let trivial = EndoTriple::trivial(&g);
    let sd = sd_set(&ctx, &trivial, &lat_vec(&[1, 0, 0]));
    for a in &sd {
        assert!(poset_leq(&ctx, a, a), "reflexive at {:?}", a.mu);
        for b in &sd {
            if poset_leq(&ctx, a, b) && poset_leq(&ctx, b, a) {
                assert_eq!(a, b, "antisymmetry");
            }
        }
    }
}

#[test]
fn poset_is_transitive_on_minuscule_samples() {
    let cases: Vec<(Arc<endokit_core::GaloisForm>, Vec<BigInt>)> = vec![
        (arc(groups::gl(3)), lat_vec(&[1, 0, 0])),
        (arc(groups::gl(4)), lat_vec(&[1, 1, 0, 0])),
    ];
    for (g, mu) in cases {
        let ctx = KotCtx::new(g.clone());
        let trivial = EndoTriple::trivial(&g);
        let sd = sd_set(&ctx, &trivial, &mu);
        for a in &sd {
            for b in &sd {
                if !poset_leq(&ctx, a, b) {
                    continue;
                }
                for c in &sd {
                    if poset_leq(&ctx, b, c) {
                        assert!(poset_leq(&ctx, a, c), "transitive chain");
                    }
                }
            }
        }
    }
}

#[test]
fn theta_projects_to_levi_center() {
    let g = arc(groups::gl(3));
    let subset: std::collections::BTreeSet<usize> = [1].into_iter().collect();
    let levi = endokit_core::root_datum::standard_levi(&g.brd, &subset);
    let th = theta(&g, &levi, &lat_vec(&[1, 0, 0]));
    // base position 1 of GL(3) is e1 - e2: averaging (1,0,0) over its
    // reflection gives (1/2, 1/2, 0)
    assert_eq!(th, vec![rat(1, 2), rat(1, 2), rat(0, 1)]);
    // the average pairs to zero against the Levi roots
    let root = &g.brd.datum.roots[g.brd.base[1]];
    let pairing: num::BigRational = root
        .iter()
        .zip(&th)
        .map(|(a, b)| num::BigRational::from(a.clone()) * b)
        .sum();
    assert_eq!(pairing, num::BigRational::from(int(0)));
}

#[test]
fn cochain_sum_group_laws() {
    let g = arc(groups::gl(2));
    let ctx = KotCtx::new(g.clone());
    let trivial = EndoTriple::trivial(&g);
    let sd = sd_set(&ctx, &trivial, &lat_vec(&[1, 0]));
    let mut s = EndoCochainSum::new();
    s.add_term(sd[0].clone(), BigInt::from(2));
    s.add_term(sd[1].clone(), BigInt::from(-1));
    let mut t = s.clone();
    t.sub(&s);
    assert!(t.is_zero());
    let mut u = EndoCochainSum::new();
    u.add_term(sd[0].clone(), BigInt::from(-2));
    u.add(&s);
    assert_eq!(u.coeff(&sd[0]), BigInt::from(0));
    assert_eq!(u.coeff(&sd[1]), BigInt::from(-1));
}
