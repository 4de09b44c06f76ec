//! Refined endoscopic triples at the level of dual root data.
//!
//! A triple over an ambient quasisplit form `G` consists of a finite-order
//! element `s` of the dual torus (a [`TorsionVec`] in `X`-coordinates), the
//! subsystem of dual roots killed by `s`, and a twisted Galois action given
//! by a Weyl correction of the ambient action for each Galois generator.
//! Isomorphism is conjugacy by the ambient Weyl group, with twists compared
//! modulo the Weyl group of the subsystem.

use crate::galois::*;
use crate::lattice::*;
use crate::root_datum::*;
use itertools::Itertools;
use num::Zero;
use std::collections::BTreeSet;
use std::sync::Arc;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum EndoscopyError {
    #[error("torsion element has {0} coordinates, ambient rank is {1}")]
    RankMismatch(usize, usize),
    #[error("expected one twist per Galois generator: got {0}, need {1}")]
    TwistCountMismatch(usize, usize),
    #[error("twist {0} is not an ambient Weyl element")]
    TwistNotWeyl(usize),
    #[error("twisted action {0} does not fix the torsion element")]
    TwistMovesS(usize),
    #[error("twisted action {0} does not stabilize the kernel subsystem")]
    TwistMovesSubsystem(usize),
    #[error("twisted action {0} does not preserve the subsystem base")]
    TwistMovesBase(usize),
    #[error("twisted actions generate an infinite group")]
    TwistClosureInfinite,
    #[error("the semisimple element is not Galois-stable")]
    ElementNotGaloisStable,
    #[error("the endoscopic character is not fixed by the Galois action")]
    CharacterNotGaloisFixed,
    #[error("the endoscopic character does not centralize the element's centralizer")]
    CharacterNotCentral,
    #[error(transparent)]
    Datum(#[from] RootDatumError),
}

/// Cached ambient data: the Weyl group of the form plus the permutation each
/// Weyl element induces on root indices.
pub struct Ambient {
    pub form: Arc<GaloisForm>,
    pub weyl: WeylGroup,
    pub root_perms: Vec<Vec<usize>>,
}

impl Ambient {
    pub fn new(form: Arc<GaloisForm>) -> Self {
        let weyl = weyl_group(&form.brd, WEYL_BOUND).expect("ambient Weyl group enumerates");
        let root_perms = weyl
            .iter()
            .map(|w| datum_permutation(&form.brd, &w.x_action).expect("Weyl acts on the datum"))
            .collect();
        Ambient { form, weyl, root_perms }
    }

    /// Apply Weyl element `wi` to a set of root indices.
    pub fn permute_roots(&self, wi: usize, set: &BTreeSet<usize>) -> BTreeSet<usize> {
        set.iter().map(|&i| self.root_perms[wi][i]).collect()
    }
}

/// A refined endoscopic triple over a fixed quasisplit form.
#[derive(Clone, Debug)]
pub struct EndoTriple {
    pub form: Arc<GaloisForm>,
    /// The torsion element `s` of the dual torus, in `X`-coordinates.
    pub s: TorsionVec,
    /// Indices of the ambient roots whose coroots are killed by `s`: the dual
    /// root system of the endoscopic group.
    pub h_roots: BTreeSet<usize>,
    /// The unique base of the subsystem contained in the ambient positives
    /// (sorted root indices).
    pub h_base: Vec<usize>,
    /// Composite twisted actions on `X`, one per Galois generator of the
    /// form: `c_k = w_k . gamma_k` with `w_k` in the ambient Weyl group.
    pub twists: Vec<LatAut>,
}

/// The kernel subsystem of `s`: ambient roots whose coroots pair integrally
/// with `s`.
pub fn kernel_subsystem(form: &GaloisForm, s: &TorsionVec) -> BTreeSet<usize> {
    (0..form.brd.datum.roots.len())
        .filter(|&i| s.kills(&form.brd.datum.coroots[i]))
        .collect()
}

/// The base of a closed subsystem inside the ambient positives: positive
/// members that are not sums of two positive members.
pub fn subsystem_base(brd: &BasedRootDatum, roots: &BTreeSet<usize>) -> Vec<usize> {
    let pos: Vec<usize> = roots.iter().copied().filter(|&i| brd.is_positive(i)).collect();
    pos.iter()
        .copied()
        .filter(|&i| {
            !pos.iter().cartesian_product(&pos).any(|(&a, &b)| {
                add_vec(&brd.datum.roots[a], &brd.datum.roots[b]) == brd.datum.roots[i]
            })
        })
        .collect()
}

/// Build and validate a triple from `s` and one Weyl twist per Galois
/// generator.  Pass the identity for untwisted generators.
pub fn triple_from_element(
    form: &Arc<GaloisForm>,
    s: TorsionVec,
    weyl_twists: Vec<LatAut>,
) -> Result<EndoTriple, EndoscopyError> {
    let amb = Ambient::new(form.clone());
    triple_from_element_in(&amb, s, weyl_twists)
}

/// As [`triple_from_element`], reusing a cached [`Ambient`].
pub fn triple_from_element_in(
    amb: &Ambient,
    s: TorsionVec,
    weyl_twists: Vec<LatAut>,
) -> Result<EndoTriple, EndoscopyError> {
    let form = &amb.form;
    if s.len() != form.rank() {
        return Err(EndoscopyError::RankMismatch(s.len(), form.rank()));
    }
    if weyl_twists.len() != form.gens.len() {
        return Err(EndoscopyError::TwistCountMismatch(weyl_twists.len(), form.gens.len()));
    }
    let h_roots = kernel_subsystem(form, &s);
    let h_base = subsystem_base(&form.brd, &h_roots);
    let mut twists = Vec::with_capacity(weyl_twists.len());
    for (k, w) in weyl_twists.iter().enumerate() {
        if !amb.weyl.contains(w) {
            return Err(EndoscopyError::TwistNotWeyl(k));
        }
        let c = w.compose(&form.gens[k].x_action);
        twists.push(c);
    }
    let triple = EndoTriple { form: form.clone(), s, h_roots, h_base, twists };
    validate_triple(form, &triple)?;
    Ok(triple)
}

fn validate_triple(form: &GaloisForm, t: &EndoTriple) -> Result<(), EndoscopyError> {
    let base_set: BTreeSet<usize> = t.h_base.iter().copied().collect();
    for (k, c) in t.twists.iter().enumerate() {
        if c.apply_torsion(&t.s) != t.s {
            return Err(EndoscopyError::TwistMovesS(k));
        }
        let perm = datum_permutation(&form.brd, c).ok_or(EndoscopyError::TwistMovesSubsystem(k))?;
        let image: BTreeSet<usize> = t.h_roots.iter().map(|&i| perm[i]).collect();
        if image != t.h_roots {
            return Err(EndoscopyError::TwistMovesSubsystem(k));
        }
        let base_image: BTreeSet<usize> = base_set.iter().map(|&i| perm[i]).collect();
        if base_image != base_set {
            return Err(EndoscopyError::TwistMovesBase(k));
        }
    }
    // the twisted actions must generate a finite group
    let mut seen: BTreeSet<LatAut> = BTreeSet::new();
    seen.insert(LatAut::identity(form.rank()));
    let mut frontier = vec![LatAut::identity(form.rank())];
    while let Some(e) = frontier.pop() {
        for c in &t.twists {
            let m = c.compose(&e);
            if seen.insert(m.clone()) {
                if seen.len() > GALOIS_BOUND {
                    return Err(EndoscopyError::TwistClosureInfinite);
                }
                frontier.push(m);
            }
        }
    }
    Ok(())
}

impl EndoTriple {
    /// The trivial triple: `s = 0`, subsystem the whole root system, twists
    /// all identity.
    pub fn trivial(form: &Arc<GaloisForm>) -> EndoTriple {
        triple_from_element(
            form,
            TorsionVec::zero(form.rank()),
            vec![LatAut::identity(form.rank()); form.gens.len()],
        )
        .expect("trivial triple is valid")
    }

    /// The Weyl group of the subsystem, as ambient matrices.
    pub fn subsystem_weyl(&self) -> BTreeSet<LatAut> {
        reflection_subgroup(&self.form.brd.datum, &self.h_roots, WEYL_BOUND)
    }

    /// Closure of the twisted Galois actions (composites on `X`).
    pub fn twist_closure(&self) -> Vec<LatAut> {
        let mut seen: BTreeSet<LatAut> = BTreeSet::new();
        seen.insert(LatAut::identity(self.form.rank()));
        let mut frontier = vec![LatAut::identity(self.form.rank())];
        while let Some(e) = frontier.pop() {
            for c in &self.twists {
                let m = c.compose(&e);
                if seen.insert(m.clone()) {
                    frontier.push(m);
                }
            }
        }
        let mut out: Vec<LatAut> = seen.into_iter().collect();
        out.sort_by_key(|m| (!m.is_identity(), m.clone()));
        out
    }
}

/// Ellipticity: the twisted-invariant part of the center of the endoscopic
/// dual group is contained in the center of the ambient dual group.
/// Concretely: every rational `X`-vector annihilated by the subsystem coroots
/// and fixed by all twisted actions must annihilate all ambient coroots.
pub fn is_elliptic(t: &EndoTriple) -> bool {
    let dim = t.form.rank();
    let mut rows: Vec<RatVec> = t
        .h_roots
        .iter()
        .map(|&i| to_rat_vec(&t.form.brd.datum.coroots[i]))
        .collect();
    for c in t.twist_closure() {
        for (i, r) in c.rows().iter().enumerate() {
            let mut row = to_rat_vec(r);
            row[i] -= num::BigRational::from(int(1));
            rows.push(row);
        }
    }
    let basis = kernel_basis(&rows, dim);
    basis.iter().all(|b| {
        t.form
            .brd
            .datum
            .coroots
            .iter()
            .all(|cv| pair_ir(cv, &to_rat_vec(b)).is_zero())
    })
}

/// Isomorphism test for refined triples: search the ambient Weyl group for
/// `w` carrying `s_1` exactly to `s_2`, the subsystem to the subsystem, and
/// intertwining the twisted actions up to the subsystem Weyl group of the
/// target.  Returns the first witness in the canonical Weyl order.
pub fn is_isomorphic(t1: &EndoTriple, t2: &EndoTriple) -> Option<WeylElt> {
    let amb = Ambient::new(t1.form.clone());
    is_isomorphic_in(&amb, t1, t2)
}

/// As [`is_isomorphic`], reusing a cached [`Ambient`] for the shared form.
pub fn is_isomorphic_in(amb: &Ambient, t1: &EndoTriple, t2: &EndoTriple) -> Option<WeylElt> {
    witness_in(amb, t1, t2, false)
}

/// Coarser equivalence: as [`is_isomorphic`], but `w . s_1` need only agree
/// with `s_2` up to a central torsion translation (an element killing every
/// ambient coroot).  This forgets the refinement of the class.
pub fn is_equivalent_in(amb: &Ambient, t1: &EndoTriple, t2: &EndoTriple) -> Option<WeylElt> {
    witness_in(amb, t1, t2, true)
}

fn witness_in(
    amb: &Ambient,
    t1: &EndoTriple,
    t2: &EndoTriple,
    central_slack: bool,
) -> Option<WeylElt> {
    assert_eq!(t1.form.brd, t2.form.brd, "triples must share an ambient form");
    let wh2 = t2.subsystem_weyl();
    'outer: for (wi, w) in amb.weyl.iter().enumerate() {
        let ws = w.x_action.apply_torsion(&t1.s);
        if central_slack {
            let diff = TorsionVec::new(sub_rat_vec(ws.coords(), t2.s.coords()));
            if !t1.form.brd.datum.coroots.iter().all(|cv| diff.kills(cv)) {
                continue;
            }
        } else if ws != t2.s {
            continue;
        }
        if amb.permute_roots(wi, &t1.h_roots) != t2.h_roots {
            continue;
        }
        let winv = w.x_action.inverse();
        for (c1, c2) in t1.twists.iter().zip(&t2.twists) {
            let u = c2.inverse().compose(&w.x_action.compose(&c1.compose(&winv)));
            if !wh2.contains(&u) {
                continue 'outer;
            }
        }
        return Some(w.clone());
    }
    None
}

/// The outer automorphism group of a triple: the stabilizer of `(s, H)` in
/// the ambient Weyl group (up to subsystem-Weyl twist compatibility), modulo
/// the subsystem Weyl group.
#[derive(Clone, Debug)]
pub struct OutGroup {
    /// Canonical coset representatives (ambient `X`-matrices), identity first.
    pub reps: Vec<LatAut>,
    /// Order of the full stabilizer.
    pub stab_order: usize,
    /// Order of the subsystem Weyl group.
    pub sub_order: usize,
}

impl OutGroup {
    pub fn order(&self) -> usize {
        self.reps.len()
    }
}

pub fn out_group(t: &EndoTriple) -> OutGroup {
    let amb = Ambient::new(t.form.clone());
    out_group_in(&amb, t)
}

pub fn out_group_in(amb: &Ambient, t: &EndoTriple) -> OutGroup {
    out_group_with_slack(amb, t, &t.form.brd.datum.coroots)
}

/// As [`out_group_in`], but with the central slack measured against an
/// explicit coroot set — embedded data use the ambient group's coroots, so
/// "central" means central in the ambient group rather than in the Levi.
pub fn out_group_with_slack(amb: &Ambient, t: &EndoTriple, slack_coroots: &[LatVec]) -> OutGroup {
    let wh = t.subsystem_weyl();
    let in_stab = |w: &LatAut, wi: usize| -> bool {
        // s preserved up to a central torsion translation
        let ws = w.apply_torsion(&t.s);
        let diff = TorsionVec::new(sub_rat_vec(ws.coords(), t.s.coords()));
        if !slack_coroots.iter().all(|cv| diff.kills(cv)) {
            return false;
        }
        if amb.permute_roots(wi, &t.h_roots) != t.h_roots {
            return false;
        }
        let winv = w.inverse();
        t.twists.iter().all(|c| {
            let u = c.inverse().compose(&w.compose(&c.compose(&winv)));
            wh.contains(&u)
        })
    };
    let stab: Vec<LatAut> = amb
        .weyl
        .iter()
        .enumerate()
        .filter(|(wi, w)| in_stab(&w.x_action, *wi))
        .map(|(_, w)| w.x_action.clone())
        .collect();
    let stab_order = stab.len();
    // quotient by the subgroup generated by the subsystem Weyl group together
    // with the Weyl parts of the Galois twists that stabilize the datum:
    // those automorphisms are realized inside the twisted form itself
    let mut inner_gens: Vec<LatAut> = wh.iter().cloned().collect();
    for (k, c) in t.twists.iter().enumerate() {
        let p = c.compose(&t.form.gens[k].x_action.inverse());
        if let Some(wi) = amb.weyl.index_of(&p) {
            if in_stab(&p, wi) {
                inner_gens.push(p);
            }
        }
    }
    let mut inner: BTreeSet<LatAut> = BTreeSet::new();
    inner.insert(LatAut::identity(t.form.rank()));
    let mut frontier = vec![LatAut::identity(t.form.rank())];
    while let Some(e) = frontier.pop() {
        for g in &inner_gens {
            let m = g.compose(&e);
            if inner.insert(m.clone()) {
                frontier.push(m);
            }
        }
    }
    let mut covered: BTreeSet<LatAut> = BTreeSet::new();
    let mut reps: Vec<LatAut> = Vec::new();
    for m in &stab {
        if covered.contains(m) {
            continue;
        }
        reps.push(m.clone());
        for h in &inner {
            covered.insert(m.compose(h));
        }
    }
    reps.sort_by_key(|m| (!m.is_identity(), m.clone()));
    OutGroup { reps, stab_order, sub_order: inner.len() }
}

/// How [`enumerate_classes`] deduplicates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EquivMode {
    /// Refined classes: `s` matched exactly.
    Refined,
    /// Classes up to a central torsion translation of `s`.
    Central,
}

/// Enumerate elliptic classes up to central-translation equivalence, with
/// `s` of order at most `max_order`.
pub fn enumerate_elliptic(form: &Arc<GaloisForm>, max_order: u64) -> Vec<EndoTriple> {
    enumerate_classes(form, max_order, true, EquivMode::Central)
}

/// Enumerate representatives of classes of triples whose `s` has order at
/// most `max_order`, optionally restricted to elliptic ones.
/// Deterministic: candidates are taken in lexicographic order of the lifted
/// coordinates and deduplicated by the chosen equivalence, so the result is
/// independent of the input presentation of the form.
pub fn enumerate_classes(
    form: &Arc<GaloisForm>,
    max_order: u64,
    elliptic_only: bool,
    mode: EquivMode,
) -> Vec<EndoTriple> {
    let amb = Ambient::new(form.clone());
    let rank = form.rank();
    let mut out: Vec<EndoTriple> = Vec::new();
    for s in torsion_candidates(rank, max_order) {
        // keep only the lexicographically least lift in the Weyl orbit
        if amb.weyl.iter().any(|w| w.x_action.apply_torsion(&s).coords() < s.coords()) {
            continue;
        }
        let choices: Vec<Vec<LatAut>> = if form.gens.is_empty() {
            vec![Vec::new()]
        } else {
            form.gens
                .iter()
                .map(|_| amb.weyl.iter().map(|w| w.x_action.clone()).collect::<Vec<_>>())
                .multi_cartesian_product()
                .collect()
        };
        for choice in choices {
            let Ok(t) = triple_from_element_in(&amb, s.clone(), choice) else {
                continue;
            };
            if elliptic_only && !is_elliptic(&t) {
                continue;
            }
            let dup = out.iter().any(|prev| match mode {
                EquivMode::Refined => is_isomorphic_in(&amb, prev, &t).is_some(),
                EquivMode::Central => is_equivalent_in(&amb, prev, &t).is_some(),
            });
            if dup {
                continue;
            }
            out.push(t);
        }
    }
    out
}

/// All torsion vectors of order at most `max_order`, in lexicographic order
/// of their lifts.
fn torsion_candidates(rank: usize, max_order: u64) -> Vec<TorsionVec> {
    let mut set: BTreeSet<TorsionVec> = BTreeSet::new();
    for d in 1..=max_order.max(1) {
        let coords: Vec<Vec<i64>> = vec![(0..d as i64).collect(); rank];
        if rank == 0 {
            set.insert(TorsionVec::zero(0));
            continue;
        }
        for combo in coords.into_iter().multi_cartesian_product() {
            let v = TorsionVec::new(combo.iter().map(|&k| rat(k, d as i64)).collect());
            set.insert(v);
        }
    }
    set.into_iter().collect()
}

/// A semisimple conjugacy datum: the torsion and valuation coordinates of a
/// torus element (both on the cocharacter side), plus an endoscopic character
/// `lambda` on the dual side.
#[derive(Clone, Debug)]
pub struct SsPair {
    /// Finite-order part of the element, in `Y`-coordinates mod `Z`.
    pub torsion: TorsionVec,
    /// Valuation (slope) part of the element, in `Y_Q`.
    pub valuation: RatVec,
    /// Character of the component group of the centralizer's dual center,
    /// in `X`-coordinates mod `Z`.
    pub lambda: TorsionVec,
}

/// Root indices of the centralizer of the semisimple element.
pub fn ss_centralizer(form: &GaloisForm, p: &SsPair) -> BTreeSet<usize> {
    (0..form.brd.datum.roots.len())
        .filter(|&i| {
            let r = &form.brd.datum.roots[i];
            p.torsion.kills(r) && pair_ir(r, &p.valuation).is_zero()
        })
        .collect()
}

/// The endoscopic triple attached to a semisimple pair: `s = lambda` with the
/// untwisted Galois action.  Fails if the element or the character is not
/// Galois-stable, or if `lambda` does not centralize the centralizer.
pub fn ss_pair_to_triple(form: &Arc<GaloisForm>, p: &SsPair) -> Result<EndoTriple, EndoscopyError> {
    for g in &form.gens {
        let gy = g.x_action.dual_action();
        if gy.apply_torsion(&p.torsion) != p.torsion
            || gy.apply_rat(&p.valuation) != p.valuation
        {
            return Err(EndoscopyError::ElementNotGaloisStable);
        }
        if g.x_action.apply_torsion(&p.lambda) != p.lambda {
            return Err(EndoscopyError::CharacterNotGaloisFixed);
        }
    }
    let cent = ss_centralizer(form, p);
    for &i in &cent {
        if !p.lambda.kills(&form.brd.datum.coroots[i]) {
            return Err(EndoscopyError::CharacterNotCentral);
        }
    }
    triple_from_element(
        form,
        p.lambda.clone(),
        vec![LatAut::identity(form.rank()); form.gens.len()],
    )
}
