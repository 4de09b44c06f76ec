//! Finite Galois actions on based root data, quasisplit forms, and the
//! relative (restricted) root combinatorics they induce.

use crate::lattice::*;
use crate::root_datum::*;
use num::{BigRational, Zero};
use std::collections::BTreeSet;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum GaloisError {
    #[error("generator {0} does not permute the roots compatibly with the coroots")]
    NotDatumAutomorphism(usize),
    #[error("generator {0} does not preserve the base")]
    NotBasePreserving(usize),
    #[error("generator {0} has matrix order {1:?}, which does not divide the declared order {2}")]
    OrderMismatch(usize, Option<usize>, usize),
    #[error("generated group exceeds the closure bound {0}")]
    ClosureTooLarge(usize),
    #[error(transparent)]
    Datum(#[from] RootDatumError),
}

/// Cap on the closure of the Galois image.
pub const GALOIS_BOUND: usize = 10_000;

/// One abstract generator of the Galois group together with its action.
#[derive(Clone, Debug)]
pub struct GaloisGen {
    /// Action on `X` (characters).
    pub x_action: LatAut,
    /// Declared order of the abstract generator.  The matrix must satisfy
    /// `m^order = 1`; the action is allowed to be non-faithful, so the matrix
    /// order may be a proper divisor.
    pub order: usize,
}

/// A quasisplit form at the combinatorial level: a based root datum together
/// with a base-preserving action of a finite group given on generators.
#[derive(Clone, Debug)]
pub struct GaloisForm {
    pub brd: BasedRootDatum,
    pub gens: Vec<GaloisGen>,
    /// Matrix closure of the generator actions on `X`, breadth-first from the
    /// identity (so `elements[0]` is the identity) then canonically sorted.
    pub elements: Vec<LatAut>,
}

impl GaloisForm {
    pub fn new(brd: BasedRootDatum, gens: Vec<GaloisGen>) -> Result<Self, GaloisError> {
        validate_gens(&brd, &gens)?;
        let form = GaloisForm {
            elements: closure(&brd, &gens)?,
            brd,
            gens,
        };
        Ok(form)
    }

    /// A split form: trivial Galois group.
    pub fn split(brd: BasedRootDatum) -> Self {
        let rank = brd.datum.rank;
        GaloisForm { brd, gens: Vec::new(), elements: vec![LatAut::identity(rank)] }
    }

    /// Checks each generator permutes the (root, coroot) pairs, preserves the
    /// base, and has matrix order dividing its declared order.
    pub fn validate_form(&self) -> Result<(), GaloisError> {
        validate_gens(&self.brd, &self.gens)
    }

    pub fn rank(&self) -> usize {
        self.brd.datum.rank
    }

    pub fn is_split(&self) -> bool {
        self.elements.len() == 1 && self.gens.iter().all(|g| g.x_action.is_identity())
    }

    /// Actions of the closure on `Y` (cocharacters).
    pub fn elements_y(&self) -> Vec<LatAut> {
        self.elements.iter().map(|m| m.dual_action()).collect()
    }

    /// Average a rational cocharacter over the Galois closure.
    pub fn gamma_average(&self, v: &RatVec) -> RatVec {
        let n = BigRational::from(int(self.elements.len() as i64));
        let mut acc = zero_rat_vec(self.rank());
        for m in self.elements_y() {
            acc = add_rat_vec(&acc, &m.apply_rat(v));
        }
        scale_rat_vec(&n.recip(), &acc)
    }

    /// Average a rational character over the Galois closure.
    pub fn gamma_average_char(&self, v: &RatVec) -> RatVec {
        let n = BigRational::from(int(self.elements.len() as i64));
        let mut acc = zero_rat_vec(self.rank());
        for m in &self.elements {
            acc = add_rat_vec(&acc, &m.apply_rat(v));
        }
        scale_rat_vec(&n.recip(), &acc)
    }

    /// The permutation each closure element induces on base positions.
    pub fn base_permutations(&self) -> Vec<Vec<usize>> {
        self.elements
            .iter()
            .map(|m| {
                let perm = datum_permutation(&self.brd, m).expect("validated action");
                self.brd
                    .base
                    .iter()
                    .map(|&b| {
                        self.brd
                            .base
                            .iter()
                            .position(|&c| c == perm[b])
                            .expect("base-preserving action")
                    })
                    .collect()
            })
            .collect()
    }

    /// Galois orbits on base positions, sorted by least element.  These index
    /// the relative simple roots.
    pub fn base_orbits(&self) -> Vec<BTreeSet<usize>> {
        let perms = self.base_permutations();
        let mut seen: BTreeSet<usize> = BTreeSet::new();
        let mut orbits = Vec::new();
        for k in 0..self.brd.base.len() {
            if seen.contains(&k) {
                continue;
            }
            let orbit: BTreeSet<usize> = perms.iter().map(|p| p[k]).collect();
            seen.extend(orbit.iter().copied());
            orbits.push(orbit);
        }
        orbits
    }

    /// Is a subset of base positions a union of Galois orbits?
    pub fn is_orbit_union(&self, subset: &BTreeSet<usize>) -> bool {
        self.base_orbits().iter().all(|o| o.is_subset(subset) || o.is_disjoint(subset))
    }

    /// Relative simple roots: each Galois orbit on the base, together with the
    /// common restriction of its members to the invariant cocharacter space
    /// (as the vector of pairings against the canonical invariant basis).
    /// Orbits restricting to zero are rejected by validation of quasisplit
    /// combinatorics, so every returned functional is nonzero.
    pub fn relative_roots(&self) -> Vec<RelativeRoot> {
        let inv = invariant_subspace(&self.elements_y(), self.rank());
        self.base_orbits()
            .into_iter()
            .map(|orbit| {
                let reps: Vec<RatVec> = orbit
                    .iter()
                    .map(|&k| {
                        inv.iter()
                            .map(|b| pair_ir(&self.brd.datum.roots[self.brd.base[k]], &to_rat_vec(b)))
                            .collect()
                    })
                    .collect();
                for r in &reps[1..] {
                    assert_eq!(r, &reps[0], "orbit members restrict equally");
                }
                RelativeRoot { orbit, restriction: reps[0].clone() }
            })
            .collect()
    }

    /// The quasisplit form of the standard Levi at a Galois-stable subset of
    /// base positions: same lattice, same generators, restricted root list.
    pub fn levi_form(&self, subset: &BTreeSet<usize>) -> GaloisForm {
        assert!(self.is_orbit_union(subset), "Levi subset must be Galois-stable");
        let levi = standard_levi(&self.brd, subset);
        let (brd, _) = levi.based_datum(&self.brd);
        GaloisForm::new(brd, self.gens.clone()).expect("Galois action restricts to a stable Levi")
    }
}

/// A relative simple root: a Galois orbit of base positions and the common
/// restriction of its members to the invariant cocharacter subspace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelativeRoot {
    pub orbit: BTreeSet<usize>,
    pub restriction: RatVec,
}

impl RelativeRoot {
    pub fn restricts_to_zero(&self) -> bool {
        self.restriction.iter().all(|c| c.is_zero())
    }
}

fn validate_gens(brd: &BasedRootDatum, gens: &[GaloisGen]) -> Result<(), GaloisError> {
    for (gi, g) in gens.iter().enumerate() {
        let perm =
            datum_permutation(brd, &g.x_action).ok_or(GaloisError::NotDatumAutomorphism(gi))?;
        let base_set: BTreeSet<usize> = brd.base.iter().copied().collect();
        let image: BTreeSet<usize> = brd.base.iter().map(|&b| perm[b]).collect();
        if image != base_set {
            return Err(GaloisError::NotBasePreserving(gi));
        }
        match g.x_action.finite_order(GALOIS_BOUND) {
            Some(k) if g.order >= 1 && g.order % k == 0 => {}
            other => return Err(GaloisError::OrderMismatch(gi, other, g.order)),
        }
    }
    Ok(())
}

/// The index permutation a lattice automorphism induces on the (root, coroot)
/// list, or `None` if it is not a datum automorphism.
pub fn datum_permutation(brd: &BasedRootDatum, m: &LatAut) -> Option<Vec<usize>> {
    let my = m.dual_action();
    let mut perm = Vec::with_capacity(brd.datum.roots.len());
    for i in 0..brd.datum.roots.len() {
        let r = m.apply(&brd.datum.roots[i]);
        let j = brd.datum.root_index(&r)?;
        if my.apply(&brd.datum.coroots[i]) != brd.datum.coroots[j] {
            return None;
        }
        perm.push(j);
    }
    Some(perm)
}

fn closure(brd: &BasedRootDatum, gens: &[GaloisGen]) -> Result<Vec<LatAut>, GaloisError> {
    let rank = brd.datum.rank;
    let mut seen: BTreeSet<LatAut> = BTreeSet::new();
    seen.insert(LatAut::identity(rank));
    let mut frontier = vec![LatAut::identity(rank)];
    while let Some(e) = frontier.pop() {
        for g in gens {
            let m = g.x_action.compose(&e);
            if seen.insert(m.clone()) {
                if seen.len() > GALOIS_BOUND {
                    return Err(GaloisError::ClosureTooLarge(GALOIS_BOUND));
                }
                frontier.push(m);
            }
        }
    }
    let mut out: Vec<LatAut> = seen.into_iter().collect();
    // identity first, rest in canonical matrix order
    out.sort_by_key(|m| (!m.is_identity(), m.clone()));
    Ok(out)
}
