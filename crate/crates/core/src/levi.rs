//! Embedded endoscopic data for standard Levi subgroups: restriction and
//! induction maps between triples of a group and its Levis, the conjugator
//! set `W(M*, H)`, double-coset fiber parametrization, inner-class counts,
//! slope data, and valuation acceptability.

use crate::endoscopy::*;
use crate::galois::*;
use crate::lattice::*;
use crate::root_datum::*;
use num::{Signed, Zero};
use std::collections::BTreeSet;
use std::sync::Arc;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum LeviTransferError {
    #[error("Levi subset is not stable under the Galois action")]
    LeviNotGaloisStable,
    #[error("no subsystem correction makes the conjugator restrict")]
    NoRestrictingCorrection,
    #[error("slope Levi does not match the cocharacter centralizer")]
    SlopeLeviMismatch,
    #[error("acceptability requires M to be the centralizer Levi of nu")]
    AcceptabilityLeviMismatch,
}

/// A standard Levi of the endoscopic subsystem: a subset of the subsystem
/// base together with all subsystem roots supported on it.  Root indices are
/// ambient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HLevi {
    /// Positions into the triple's `h_base`.
    pub base_positions: BTreeSet<usize>,
    /// Ambient root indices of the subsystem roots supported on the subset.
    pub root_indices: BTreeSet<usize>,
}

/// An endoscopic triple of `G` together with a standard Levi `M` and a Weyl
/// conjugator aligning the embedding so that it restricts to `M`.
#[derive(Clone, Debug)]
pub struct EmbeddedDatum {
    pub triple: EndoTriple,
    pub ambient_levi: StdLevi,
    pub h_levi: HLevi,
    pub conjugator: WeylElt,
}

/// A slope (Newton) datum: a dominant rational cocharacter, its centralizer
/// Levi, and a Kottwitz coordinate on the dual center.
#[derive(Clone, Debug)]
pub struct SlopeDatum {
    pub nu_b: RatVec,
    pub levi: StdLevi,
    pub kappa: TorsionVec,
}

impl SlopeDatum {
    pub fn new(brd: &BasedRootDatum, nu_b: RatVec, kappa: TorsionVec) -> Self {
        let levi = levi_from_cochar(brd, &nu_b);
        SlopeDatum { nu_b, levi, kappa }
    }
}

/// Valuation data of a torus element: `v_p(alpha(gamma_0)) = pair(alpha, w)`.
#[derive(Clone, Debug)]
pub struct ValuationElt {
    pub w: RatVec,
}

/// Rational basis of `V_M`: the Galois-invariant part of the annihilator of
/// the `M`-coroots inside `X_Q` — the cocharacter span of `(Z(M-hat)^Gamma)^0`.
pub fn v_m_basis(form: &GaloisForm, levi: &StdLevi) -> Vec<LatVec> {
    let dim = form.rank();
    let mut rows: Vec<RatVec> = levi
        .root_indices
        .iter()
        .map(|&i| to_rat_vec(&form.brd.datum.coroots[i]))
        .collect();
    for m in &form.elements {
        for (i, r) in m.rows().iter().enumerate() {
            let mut row = to_rat_vec(r);
            row[i] -= num::BigRational::from(int(1));
            rows.push(row);
        }
    }
    kernel_basis(&rows, dim)
}

fn fixes_pointwise(m: &LatAut, basis: &[LatVec]) -> bool {
    basis.iter().all(|b| {
        let v = to_rat_vec(b);
        m.apply_rat(&v) == v
    })
}

/// The set `W(M*, H)`: Weyl elements `w` such that for every Galois
/// generator there is a subsystem Weyl correction making the twisted action
/// fix `w^{-1} V_M` pointwise.  Returned as indices into the canonical Weyl
/// enumeration.
pub fn w_mh(t: &EndoTriple, levi: &StdLevi) -> Vec<usize> {
    let amb = Ambient::new(t.form.clone());
    w_mh_in(&amb, t, levi)
}

pub fn w_mh_in(amb: &Ambient, t: &EndoTriple, levi: &StdLevi) -> Vec<usize> {
    let vm = v_m_basis(&t.form, levi);
    let wh: Vec<LatAut> = t.subsystem_weyl().into_iter().collect();
    (0..amb.weyl.order())
        .filter(|&wi| {
            let winv = amb.weyl.elements[wi].x_action.inverse();
            let z: Vec<LatVec> = vm.iter().map(|b| primitive_int(&winv.apply_rat(&to_rat_vec(b)))).collect();
            t.twists
                .iter()
                .all(|c| wh.iter().any(|om| fixes_pointwise(&om.compose(c), &z)))
        })
        .collect()
}

/// The automorphism group `Aut(H-hat, eta)` of the triple inside the ambient
/// Weyl group: generated by the subsystem Weyl image and the outer
/// representatives.
pub fn aut_subgroup(amb: &Ambient, t: &EndoTriple) -> BTreeSet<LatAut> {
    // the strict stabilizer: s fixed exactly, the subsystem and its base
    // preserved, and conjugation fixing each twist modulo the subsystem Weyl
    // group -- the same relation `is_isomorphic` uses, so fiber classes
    // compose under restriction in stages
    let wh = t.subsystem_weyl();
    amb.weyl
        .iter()
        .enumerate()
        .filter(|(wi, w)| {
            w.x_action.apply_torsion(&t.s) == t.s
                && amb.permute_roots(*wi, &t.h_roots) == t.h_roots
                && {
                    let winv = w.x_action.inverse();
                    t.twists.iter().all(|c| {
                        let u = c.inverse().compose(&w.x_action.compose(&c.compose(&winv)));
                        wh.contains(&u)
                    })
                }
        })
        .map(|(_, w)| w.x_action.clone())
        .collect()
}

/// Support of subsystem root `i` (ambient index) on the subsystem base,
/// as positions into `h_base`.
fn h_support(t: &EndoTriple, i: usize) -> BTreeSet<usize> {
    let base_vecs: Vec<LatVec> =
        t.h_base.iter().map(|&b| t.form.brd.datum.roots[b].clone()).collect();
    let coeffs = solve_in_span(&to_rat_vec(&t.form.brd.datum.roots[i]), &base_vecs)
        .expect("subsystem roots decompose over the subsystem base");
    (0..base_vecs.len()).filter(|&k| !coeffs[k].is_zero()).collect()
}

/// Does conjugation by Weyl element `wi` make the triple restrict to the
/// Levi?  If so, returns the cut subsystem Levi.  The conjugator restricts
/// when the subsystem roots it sends into `M` form a standard Levi of the
/// subsystem, and `wi` lies in `W(M*, H)` (checked by the caller for speed).
pub fn restriction_cut(
    amb: &Ambient,
    t: &EndoTriple,
    levi: &StdLevi,
    wi: usize,
) -> Option<HLevi> {
    let perm = &amb.root_perms[wi];
    let cut: BTreeSet<usize> =
        t.h_roots.iter().copied().filter(|&i| levi.root_indices.contains(&perm[i])).collect();
    let base_positions: BTreeSet<usize> = (0..t.h_base.len())
        .filter(|&k| cut.contains(&t.h_base[k]))
        .collect();
    // standardness: the cut must be exactly the subsystem roots supported on
    // the selected base positions
    let standard: BTreeSet<usize> = t
        .h_roots
        .iter()
        .copied()
        .filter(|&i| h_support(t, i).is_subset(&base_positions))
        .collect();
    if cut != standard {
        return None;
    }
    Some(HLevi { base_positions, root_indices: cut })
}

/// One embedded datum per isomorphism class over `(t, M)`: double cosets
/// `W(M-hat) \ W(M*,H) / Aut(H-hat, eta)`, each canonical representative
/// corrected by a subsystem Weyl element so that it genuinely restricts.
pub fn fiber(t: &EndoTriple, levi: &StdLevi) -> Result<Vec<EmbeddedDatum>, LeviTransferError> {
    let amb = Ambient::new(t.form.clone());
    fiber_in(&amb, t, levi)
}

pub fn fiber_in(
    amb: &Ambient,
    t: &EndoTriple,
    levi: &StdLevi,
) -> Result<Vec<EmbeddedDatum>, LeviTransferError> {
    if !t.form.is_orbit_union(&levi.subset) {
        return Err(LeviTransferError::LeviNotGaloisStable);
    }
    let wset = w_mh_in(amb, t, levi);
    let wm = reflection_subgroup(&t.form.brd.datum, &levi.root_indices, WEYL_BOUND);
    let aut = aut_subgroup(amb, t);
    let wh: Vec<LatAut> = t.subsystem_weyl().into_iter().collect();
    let member: BTreeSet<usize> = wset.iter().copied().collect();
    let mut used: BTreeSet<usize> = BTreeSet::new();
    let mut out = Vec::new();
    // wset is in canonical (length, word) order, so the first unused element
    // of each double coset is its canonical minimal representative
    for &wi in &wset {
        if used.contains(&wi) {
            continue;
        }
        // sweep the double coset
        for m in &wm {
            let mw = m.compose(&amb.weyl.elements[wi].x_action);
            for a in &aut {
                let g = mw.compose(a);
                if let Some(gi) = amb.weyl.index_of(&g) {
                    debug_assert!(member.contains(&gi), "W(M*,H) closed under double cosets");
                    used.insert(gi);
                }
            }
        }
        // h-correction: find an automorphism making the representative
        // restrict (the subsystem Weyl image usually suffices, but an outer
        // twist can be required to land on a standard cut)
        let mut found: Option<(usize, HLevi)> = None;
        for h in wh.iter().chain(aut.iter().filter(|a| !wh.contains(*a))) {
            let g = amb.weyl.elements[wi].x_action.compose(h);
            let gi = amb.weyl.index_of(&g).expect("Weyl product stays in the group");
            if found.as_ref().is_some_and(|(best, _)| gi >= *best) {
                continue;
            }
            if let Some(h_levi) = restriction_cut(amb, t, levi, gi) {
                found = Some((gi, h_levi));
            }
        }
        let (gi, h_levi) = found.ok_or(LeviTransferError::NoRestrictingCorrection)?;
        out.push(EmbeddedDatum {
            triple: t.clone(),
            ambient_levi: levi.clone(),
            h_levi,
            conjugator: amb.weyl.elements[gi].clone(),
        });
    }
    Ok(out)
}

/// Restrict an embedded datum to a refined triple of the Levi: transport `s`
/// and the subsystem through the conjugator and re-twist inside `M`.
pub fn x_map(e: &EmbeddedDatum) -> EndoTriple {
    let amb = Ambient::new(e.triple.form.clone());
    x_map_in(&amb, e)
}

pub fn x_map_in(_amb: &Ambient, e: &EmbeddedDatum) -> EndoTriple {
    let t = &e.triple;
    let form = &t.form;
    let levi_form = Arc::new(form.levi_form(&e.ambient_levi.subset));
    let levi_amb = Ambient::new(levi_form.clone());
    let g = &e.conjugator.x_action;
    let ginv = g.inverse();
    let s_m = g.apply_torsion(&t.s);
    let wm = reflection_subgroup(&form.brd.datum, &e.ambient_levi.root_indices, WEYL_BOUND);
    let wh: Vec<LatAut> = t.subsystem_weyl().into_iter().collect();
    // per-generator candidates for the Levi-side Weyl twist
    let mut cand: Vec<Vec<LatAut>> = Vec::new();
    for (k, c) in t.twists.iter().enumerate() {
        let ga_inv = form.gens[k].x_action.inverse();
        let mut opts = Vec::new();
        for om in &wh {
            let u = g.compose(&om.compose(&c.compose(&ginv.compose(&ga_inv))));
            if wm.contains(&u) && !opts.contains(&u) {
                opts.push(u);
            }
        }
        assert!(!opts.is_empty(), "restriction has a Levi-side twist (embedded datum is valid)");
        cand.push(opts);
    }
    let mut choices: Vec<Vec<LatAut>> = vec![Vec::new()];
    for opts in &cand {
        choices = choices
            .into_iter()
            .flat_map(|prefix| {
                opts.iter().map(move |u| {
                    let mut v = prefix.clone();
                    v.push(u.clone());
                    v
                })
            })
            .collect();
    }
    for choice in choices {
        if let Ok(tm) = triple_from_element_in(&levi_amb, s_m.clone(), choice) {
            // the subsystem of the restricted triple is the transported cut
            let expected: BTreeSet<LatVec> = e
                .h_levi
                .root_indices
                .iter()
                .map(|&i| g.apply(&t.form.brd.datum.roots[i]))
                .collect();
            let got: BTreeSet<LatVec> =
                tm.h_roots.iter().map(|&i| levi_form.brd.datum.roots[i].clone()).collect();
            assert_eq!(got, expected, "kernel inside M equals the transported cut");
            return tm;
        }
    }
    // suppress unused warning path; the loop above always returns
    unreachable!("a valid embedded datum restricts");
}

/// Induct a triple of a standard Levi up to the ambient group: same `s`,
/// subsystem enlarged to the full kernel, twists corrected to preserve the
/// larger subsystem base.
pub fn y_map(tm: &EndoTriple, g_form: &Arc<GaloisForm>) -> EndoTriple {
    let amb = Ambient::new(g_form.clone());
    y_map_in(&amb, tm)
}

pub fn y_map_in(amb: &Ambient, tm: &EndoTriple) -> EndoTriple {
    let g_form = &amb.form;
    let s = tm.s.clone();
    let h_roots = kernel_subsystem(g_form, &s);
    let wh_g: Vec<LatAut> = reflection_subgroup(&g_form.brd.datum, &h_roots, WEYL_BOUND)
        .into_iter()
        .collect();
    let mut cand: Vec<Vec<LatAut>> = Vec::new();
    for (k, c) in tm.twists.iter().enumerate() {
        let ga_inv = g_form.gens[k].x_action.inverse();
        let mut opts = Vec::new();
        for om in &wh_g {
            let u = om.compose(&c.compose(&ga_inv));
            if amb.weyl.contains(&u) && !opts.contains(&u) {
                opts.push(u);
            }
        }
        cand.push(opts);
    }
    let mut choices: Vec<Vec<LatAut>> = vec![Vec::new()];
    for opts in &cand {
        choices = choices
            .into_iter()
            .flat_map(|prefix| {
                opts.iter().map(move |u| {
                    let mut v = prefix.clone();
                    v.push(u.clone());
                    v
                })
            })
            .collect();
    }
    for choice in choices {
        if let Ok(tg) = triple_from_element_in(amb, s.clone(), choice) {
            return tg;
        }
    }
    unreachable!("a Levi triple always inducts to the ambient group");
}

/// Number of inner classes an embedded datum accounts for: the index of the
/// Levi-side outer group in the ambient-side outer group.
pub fn inner_class_count(e: &EmbeddedDatum) -> usize {
    let amb = Ambient::new(e.triple.form.clone());
    let out_g = out_group_in(&amb, &e.triple).order();
    let tm = x_map_in(&amb, e);
    // the Levi-side automorphisms of an embedded datum carry the ambient
    // group's central slack, not the Levi's own (bigger) one
    let m_amb = Ambient::new(tm.form.clone());
    let out_m =
        out_group_with_slack(&m_amb, &tm, &e.triple.form.brd.datum.coroots).order();
    assert!(out_m > 0 && out_g % out_m == 0, "Levi outer group embeds in the ambient one");
    out_g / out_m
}

/// Acceptability of a valuation element against a dominant slope: on every
/// root outside `M`, the valuation pairing and the slope pairing have the
/// same strict sign.
pub fn is_acceptable(
    g: &ValuationElt,
    nu: &RatVec,
    levi: &StdLevi,
    brd: &BasedRootDatum,
) -> Result<bool, LeviTransferError> {
    let expected = levi_from_cochar(brd, nu);
    if expected.subset != levi.subset {
        return Err(LeviTransferError::AcceptabilityLeviMismatch);
    }
    Ok((0..brd.datum.roots.len()).all(|i| {
        if levi.root_indices.contains(&i) {
            return true;
        }
        let a = &brd.datum.roots[i];
        let p_nu = pair_ir(a, nu);
        let p_w = pair_ir(a, &g.w);
        p_nu.is_positive() == p_w.is_positive()
    }))
}

/// Keep the embedded data of a fiber that admit an acceptable valuation
/// witness for the slope: the open sign cone on outside roots must be
/// non-empty, which is tested constructively with the slope itself as the
/// witness.  A slope whose Levi does not match the fiber's yields the empty
/// list.
pub fn eff_filter(fiber: &[EmbeddedDatum], slope: &SlopeDatum) -> Vec<EmbeddedDatum> {
    fiber
        .iter()
        .filter(|e| {
            if e.ambient_levi.subset != slope.levi.subset {
                return false;
            }
            let witness = ValuationElt { w: slope.nu_b.clone() };
            is_acceptable(&witness, &slope.nu_b, &slope.levi, &e.triple.form.brd)
                .map(|ok| ok)
                .unwrap_or(false)
        })
        .cloned()
        .collect()
}

/// Independent oracle for the fiber count: enumerate every Weyl element that
/// restricts, then count orbits of the `(W(M-hat), Aut)` double action.
pub fn fiber_count_direct(amb: &Ambient, t: &EndoTriple, levi: &StdLevi) -> usize {
    let wset = w_mh_in(amb, t, levi);
    let restricting: Vec<usize> = wset
        .iter()
        .copied()
        .filter(|&wi| restriction_cut(amb, t, levi, wi).is_some())
        .collect();
    let wm = reflection_subgroup(&t.form.brd.datum, &levi.root_indices, WEYL_BOUND);
    let aut = aut_subgroup(amb, t);
    let mut used: BTreeSet<usize> = BTreeSet::new();
    let mut count = 0;
    for &wi in &restricting {
        if used.contains(&wi) {
            continue;
        }
        count += 1;
        for m in &wm {
            let mw = m.compose(&amb.weyl.elements[wi].x_action);
            for a in &aut {
                if let Some(gi) = amb.weyl.index_of(&mw.compose(a)) {
                    used.insert(gi);
                }
            }
        }
    }
    count
}
