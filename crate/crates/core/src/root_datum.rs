//! Root data, based root data, and full Weyl group enumeration.
//!
//! A root datum lives on a fixed pair of dual lattices `X = Z^n` (characters)
//! and `Y = Z^n` (cocharacters) with the dot-product pairing.  Roots are
//! stored as `X`-vectors, coroots as `Y`-vectors, matched by index.  The root
//! span need not be full rank (tori and Levi subsystems are first-class), and
//! the datum keeps its ambient lattice when passing to a standard Levi.

use crate::lattice::*;
use num::{BigInt, One, Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum RootDatumError {
    #[error("roots and coroots have different lengths: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("root {0} pairs to {1} with its own coroot (expected 2)")]
    BadSelfPairing(usize, BigInt),
    #[error("reflection in root {0} does not permute the root/coroot lists compatibly")]
    NotReflectionStable(usize),
    #[error("duplicate root at indices {0} and {1}")]
    DuplicateRoot(usize, usize),
    #[error("base root {0} is not an index into the root list")]
    BadBaseIndex(usize),
    #[error("base is not linearly independent")]
    BaseDependent,
    #[error("root {0} is not a signed non-negative integral combination of the base")]
    NotDecomposable(usize),
    #[error("Weyl group exceeds the enumeration bound {0}")]
    WeylTooLarge(usize),
}

/// Default cap on Weyl group enumeration.
pub const WEYL_BOUND: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootDatum {
    pub rank: usize,
    /// Roots in `X`-coordinates, canonically sorted.
    pub roots: Vec<LatVec>,
    /// Coroots in `Y`-coordinates, index-matched with `roots`.
    pub coroots: Vec<LatVec>,
}

impl RootDatum {
    /// Build and validate, canonically sorting the (root, coroot) pairs so the
    /// result is independent of input order.
    pub fn new(rank: usize, roots: Vec<LatVec>, coroots: Vec<LatVec>) -> Result<Self, RootDatumError> {
        if roots.len() != coroots.len() {
            return Err(RootDatumError::LengthMismatch(roots.len(), coroots.len()));
        }
        let mut pairs: Vec<(LatVec, LatVec)> = roots.into_iter().zip(coroots).collect();
        pairs.sort();
        let datum = RootDatum {
            rank,
            roots: pairs.iter().map(|p| p.0.clone()).collect(),
            coroots: pairs.into_iter().map(|p| p.1).collect(),
        };
        datum.validate()?;
        Ok(datum)
    }

    /// Axioms: `<a_i, a_i^vee> = 2`, and every root reflection permutes the
    /// root list and the coroot list by the same index permutation.
    pub fn validate(&self) -> Result<(), RootDatumError> {
        for i in 0..self.roots.len() {
            for j in (i + 1)..self.roots.len() {
                if self.roots[i] == self.roots[j] {
                    return Err(RootDatumError::DuplicateRoot(i, j));
                }
            }
        }
        for (i, (a, av)) in self.roots.iter().zip(&self.coroots).enumerate() {
            if a.len() != self.rank || av.len() != self.rank {
                return Err(RootDatumError::LengthMismatch(a.len(), self.rank));
            }
            let p = pair(a, av);
            if p != BigInt::from(2) {
                return Err(RootDatumError::BadSelfPairing(i, p));
            }
        }
        for i in 0..self.roots.len() {
            for j in 0..self.roots.len() {
                let rb = self.reflect_root(i, &self.roots[j]);
                let cb = self.reflect_coroot(i, &self.coroots[j]);
                let Some(k) = self.root_index(&rb) else {
                    return Err(RootDatumError::NotReflectionStable(i));
                };
                if self.coroots[k] != cb {
                    return Err(RootDatumError::NotReflectionStable(i));
                }
            }
        }
        Ok(())
    }

    pub fn root_index(&self, v: &[BigInt]) -> Option<usize> {
        self.roots.binary_search_by(|r| r.as_slice().cmp(v)).ok()
    }

    /// `s_i(x) = x - <x, a_i^vee> a_i` on `X`.
    pub fn reflect_root(&self, i: usize, x: &[BigInt]) -> LatVec {
        let c = pair(x, &self.coroots[i]);
        sub_vec(x, &scale_vec(&c, &self.roots[i]))
    }

    /// `s_i(y) = y - <a_i, y> a_i^vee` on `Y`.
    pub fn reflect_coroot(&self, i: usize, y: &[BigInt]) -> LatVec {
        let c = pair(&self.roots[i], y);
        sub_vec(y, &scale_vec(&c, &self.coroots[i]))
    }

    /// Matrix of `s_i` on `X`.
    pub fn reflection_x(&self, i: usize) -> LatAut {
        let n = self.rank;
        let rows = (0..n)
            .map(|r| {
                (0..n)
                    .map(|c| {
                        let mut e = if r == c { BigInt::one() } else { BigInt::zero() };
                        e -= &self.roots[i][r] * &self.coroots[i][c];
                        e
                    })
                    .collect()
            })
            .collect();
        LatAut::new(rows).expect("reflections are unimodular")
    }

    /// Matrix of `s_i` on `Y` (the dual action of [`Self::reflection_x`]).
    pub fn reflection_y(&self, i: usize) -> LatAut {
        let n = self.rank;
        let rows = (0..n)
            .map(|r| {
                (0..n)
                    .map(|c| {
                        let mut e = if r == c { BigInt::one() } else { BigInt::zero() };
                        e -= &self.coroots[i][r] * &self.roots[i][c];
                        e
                    })
                    .collect()
            })
            .collect();
        LatAut::new(rows).expect("reflections are unimodular")
    }

    /// The dual root datum: swap roots and coroots.
    pub fn dual(&self) -> RootDatum {
        RootDatum::new(self.rank, self.coroots.clone(), self.roots.clone())
            .expect("dual of a valid datum is valid")
    }
}

/// A root datum with a chosen base (set of simple roots), stored as indices
/// into the root list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasedRootDatum {
    pub datum: RootDatum,
    /// Indices of the simple roots, sorted.
    pub base: Vec<usize>,
}

impl BasedRootDatum {
    pub fn new(datum: RootDatum, mut base: Vec<usize>) -> Result<Self, RootDatumError> {
        base.sort_unstable();
        base.dedup();
        for &b in &base {
            if b >= datum.roots.len() {
                return Err(RootDatumError::BadBaseIndex(b));
            }
        }
        let brd = BasedRootDatum { datum, base };
        brd.validate_base()?;
        Ok(brd)
    }

    fn validate_base(&self) -> Result<(), RootDatumError> {
        let simple: Vec<LatVec> = self.base.iter().map(|&b| self.datum.roots[b].clone()).collect();
        let rrefd = rref(&simple.iter().map(|v| to_rat_vec(v)).collect::<Vec<_>>());
        if rrefd.len() != simple.len() {
            return Err(RootDatumError::BaseDependent);
        }
        for i in 0..self.datum.roots.len() {
            if self.base_coords(i).is_none() {
                return Err(RootDatumError::NotDecomposable(i));
            }
        }
        Ok(())
    }

    /// Coordinates of root `i` in the base: integral, all of one sign.
    /// Returns `None` when the root is not such a combination.
    pub fn base_coords(&self, i: usize) -> Option<Vec<BigInt>> {
        let simple: Vec<LatVec> = self.base.iter().map(|&b| self.datum.roots[b].clone()).collect();
        let coeffs = solve_in_span(&to_rat_vec(&self.datum.roots[i]), &simple)?;
        let mut ints = Vec::with_capacity(coeffs.len());
        for c in &coeffs {
            if !c.denom().is_one() {
                return None;
            }
            ints.push(c.numer().clone());
        }
        let pos = ints.iter().any(|c| c.is_positive());
        let neg = ints.iter().any(|c| c.is_negative());
        if pos && neg {
            return None;
        }
        Some(ints)
    }

    pub fn is_positive(&self, i: usize) -> bool {
        self.base_coords(i)
            .map(|c| c.iter().any(|x| x.is_positive()) || c.iter().all(|x| x.is_zero()))
            .unwrap_or(false)
    }

    pub fn positive_roots(&self) -> Vec<usize> {
        (0..self.datum.roots.len()).filter(|&i| self.is_positive(i)).collect()
    }

    /// Support of root `i`: the base positions with nonzero coefficient.
    pub fn support(&self, i: usize) -> BTreeSet<usize> {
        let coords = self.base_coords(i).expect("validated datum decomposes all roots");
        (0..self.base.len()).filter(|&k| !coords[k].is_zero()).collect()
    }

    pub fn dual(&self) -> BasedRootDatum {
        // dual() re-sorts, so remap base indices through the pair sort
        let mut pairs: Vec<(LatVec, LatVec, bool)> = (0..self.datum.roots.len())
            .map(|i| {
                (self.datum.coroots[i].clone(), self.datum.roots[i].clone(), self.base.contains(&i))
            })
            .collect();
        pairs.sort();
        let base = pairs.iter().enumerate().filter(|(_, p)| p.2).map(|(k, _)| k).collect();
        let datum = RootDatum {
            rank: self.datum.rank,
            roots: pairs.iter().map(|p| p.0.clone()).collect(),
            coroots: pairs.into_iter().map(|p| p.1).collect(),
        };
        BasedRootDatum::new(datum, base).expect("dual base is a base")
    }
}

/// A Weyl group element: its action on `X` and `Y` plus one reduced word in
/// the simple reflections (positions into `base`).
#[derive(Clone, Debug)]
pub struct WeylElt {
    pub x_action: LatAut,
    pub y_action: LatAut,
    pub word: Vec<usize>,
}

impl PartialEq for WeylElt {
    fn eq(&self, other: &Self) -> bool {
        self.x_action == other.x_action
    }
}
impl Eq for WeylElt {}
impl PartialOrd for WeylElt {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for WeylElt {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.word.len(), &self.word, &self.x_action).cmp(&(
            other.word.len(),
            &other.word,
            &other.x_action,
        ))
    }
}

impl WeylElt {
    pub fn identity(rank: usize) -> Self {
        WeylElt {
            x_action: LatAut::identity(rank),
            y_action: LatAut::identity(rank),
            word: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_identity(&self) -> bool {
        self.x_action.is_identity()
    }
}

/// The full Weyl group, enumerated breadth-first by word length; elements are
/// sorted by (length, word, matrix), so index 0 is the identity.
#[derive(Clone, Debug)]
pub struct WeylGroup {
    pub elements: Vec<WeylElt>,
    by_matrix: BTreeMap<LatAut, usize>,
}

impl WeylGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn index_of(&self, m: &LatAut) -> Option<usize> {
        self.by_matrix.get(m).copied()
    }

    pub fn contains(&self, m: &LatAut) -> bool {
        self.by_matrix.contains_key(m)
    }

    pub fn iter(&self) -> impl Iterator<Item = &WeylElt> {
        self.elements.iter()
    }
}

/// Enumerate the group generated by the simple reflections of `brd`, erroring
/// out past `bound` elements.
pub fn weyl_group(brd: &BasedRootDatum, bound: usize) -> Result<WeylGroup, RootDatumError> {
    let rank = brd.datum.rank;
    let gens_x: Vec<LatAut> = brd.base.iter().map(|&b| brd.datum.reflection_x(b)).collect();
    let gens_y: Vec<LatAut> = brd.base.iter().map(|&b| brd.datum.reflection_y(b)).collect();
    let mut elements = vec![WeylElt::identity(rank)];
    let mut seen: BTreeMap<LatAut, usize> = BTreeMap::new();
    seen.insert(elements[0].x_action.clone(), 0);
    let mut frontier: Vec<usize> = vec![0];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &ei in &frontier {
            for (gi, gx) in gens_x.iter().enumerate() {
                let e = &elements[ei];
                let x_action = gx.compose(&e.x_action);
                if seen.contains_key(&x_action) {
                    continue;
                }
                let y_action = gens_y[gi].compose(&e.y_action);
                let mut word = vec![gi];
                word.extend_from_slice(&e.word);
                let idx = elements.len();
                if idx >= bound {
                    return Err(RootDatumError::WeylTooLarge(bound));
                }
                seen.insert(x_action.clone(), idx);
                elements.push(WeylElt { x_action, y_action, word });
                next.push(idx);
            }
        }
        frontier = next;
    }
    let mut order: Vec<usize> = (0..elements.len()).collect();
    order.sort_by(|&a, &b| elements[a].cmp(&elements[b]));
    let elements: Vec<WeylElt> = order.into_iter().map(|i| elements[i].clone()).collect();
    let by_matrix = elements.iter().enumerate().map(|(i, e)| (e.x_action.clone(), i)).collect();
    Ok(WeylGroup { elements, by_matrix })
}

/// Enumerate the subgroup of a Weyl group generated by the reflections in the
/// given roots, returned as the set of `X`-action matrices in canonical order.
pub fn reflection_subgroup(datum: &RootDatum, root_indices: &BTreeSet<usize>, bound: usize) -> BTreeSet<LatAut> {
    let gens: Vec<LatAut> = root_indices.iter().map(|&i| datum.reflection_x(i)).collect();
    let mut seen: BTreeSet<LatAut> = BTreeSet::new();
    seen.insert(LatAut::identity(datum.rank));
    let mut frontier: Vec<LatAut> = vec![LatAut::identity(datum.rank)];
    while let Some(e) = frontier.pop() {
        for g in &gens {
            let m = g.compose(&e);
            if seen.insert(m.clone()) {
                assert!(seen.len() <= bound, "reflection subgroup exceeds bound");
                frontier.push(m);
            }
        }
    }
    seen
}

/// Move `v in Y_Q` to the dominant chamber (with respect to the simple roots
/// in `sub`, a subset of base positions) by greedy simple reflections.
/// Returns the dominant representative and a Weyl word `w` (as base
/// positions, leftmost applied last) with `w . v` dominant.
pub fn dominant_rep(
    brd: &BasedRootDatum,
    sub: &BTreeSet<usize>,
    v: &RatVec,
) -> (RatVec, Vec<usize>) {
    let mut cur = v.clone();
    let mut word: Vec<usize> = Vec::new();
    loop {
        let neg = sub.iter().copied().find(|&k| {
            let b = brd.base[k];
            pair_ir(&brd.datum.roots[b], &cur).is_negative()
        });
        match neg {
            None => break,
            Some(k) => {
                let b = brd.base[k];
                let c = pair_ir(&brd.datum.roots[b], &cur);
                let cv = to_rat_vec(&brd.datum.coroots[b]);
                cur = sub_rat_vec(&cur, &scale_rat_vec(&c, &cv));
                word.insert(0, k);
            }
        }
    }
    (cur, word)
}

/// Is `v in Y_Q` dominant for the simple roots at base positions `sub`?
pub fn is_dominant(brd: &BasedRootDatum, sub: &BTreeSet<usize>, v: &RatVec) -> bool {
    sub.iter().all(|&k| !pair_ir(&brd.datum.roots[brd.base[k]], v).is_negative())
}

/// A standard Levi subsystem: the roots supported on a subset `S` of base
/// positions.  The ambient lattice is unchanged.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StdLevi {
    /// Base positions (indices into `brd.base`) selected.
    pub subset: BTreeSet<usize>,
    /// Indices of all roots supported on the subset.
    pub root_indices: BTreeSet<usize>,
}

/// The standard Levi determined by base positions `subset`.
pub fn standard_levi(brd: &BasedRootDatum, subset: &BTreeSet<usize>) -> StdLevi {
    let root_indices = (0..brd.datum.roots.len())
        .filter(|&i| brd.support(i).is_subset(subset))
        .collect();
    StdLevi { subset: subset.clone(), root_indices }
}

impl StdLevi {
    /// View the Levi as a based root datum on the same lattice.  Root indices
    /// of the view are remapped; `index_map[view_index] = ambient_index`.
    pub fn based_datum(&self, brd: &BasedRootDatum) -> (BasedRootDatum, Vec<usize>) {
        let index_map: Vec<usize> = self.root_indices.iter().copied().collect();
        let roots = index_map.iter().map(|&i| brd.datum.roots[i].clone()).collect();
        let coroots = index_map.iter().map(|&i| brd.datum.coroots[i].clone()).collect();
        let datum = RootDatum::new(brd.datum.rank, roots, coroots)
            .expect("Levi subsystem is a valid datum");
        // recover base: the selected simple roots of the ambient base
        let base = self
            .subset
            .iter()
            .map(|&k| {
                datum
                    .root_index(&brd.datum.roots[brd.base[k]])
                    .expect("simple root lies in its own Levi")
            })
            .collect();
        let sorted_map: Vec<usize> = {
            // RootDatum::new sorts; rebuild the map in sorted order
            let mut pairs: Vec<(LatVec, usize)> =
                index_map.iter().map(|&i| (brd.datum.roots[i].clone(), i)).collect();
            pairs.sort();
            pairs.into_iter().map(|p| p.1).collect()
        };
        (
            BasedRootDatum::new(datum, base).expect("Levi base is a base"),
            sorted_map,
        )
    }
}

/// The standard Levi attached to a rational cocharacter `v`: the subset of
/// base positions pairing to zero.  `v` must be dominant.
pub fn levi_from_cochar(brd: &BasedRootDatum, v: &RatVec) -> StdLevi {
    let full: BTreeSet<usize> = (0..brd.base.len()).collect();
    assert!(is_dominant(brd, &full, v), "levi_from_cochar needs a dominant cocharacter");
    let subset = full
        .iter()
        .copied()
        .filter(|&k| pair_ir(&brd.datum.roots[brd.base[k]], v).is_zero())
        .collect();
    standard_levi(brd, &subset)
}
