//! Kottwitz sets and the endoscopic cocharacter calculus: slope-averaged
//! cocharacter pairs, the poset of endoscopic cocharacter data, the Newton
//! map into `B(G)`, signed formal sums, and verification of the sum and
//! induction identities in the free abelian group on cocharacter data.

use crate::endoscopy::*;
use crate::galois::GaloisForm;
use crate::lattice::*;
use crate::levi::{fiber_in, x_map_in, y_map_in};
use crate::report::{class_id_in, ClassId};
use crate::root_datum::*;
use num::{BigInt, BigRational, Zero};
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum KottwitzError {
    #[error("cocharacter is not dominant")]
    NotDominant,
    #[error("point is not in the Kottwitz set of the given cocharacter")]
    PointNotInSet,
    #[error("slope pair is not in the averaged-dominant set")]
    NotInSd,
    #[error("Levi does not contain the centralizer Levi of the point")]
    LeviTooSmall,
}

/// A point of `B(G)` at the combinatorial level: a dominant Galois-average
/// Newton cocharacter, its centralizer Levi, and the canonical residue of
/// the defining cocharacter modulo the coroot lattice of the centralizer
/// plus the augmentation sublattice of the Galois action.
#[derive(Clone, Debug)]
pub struct KottwitzPoint {
    pub nu: RatVec,
    pub levi: StdLevi,
    pub kappa: LatVec,
}

impl PartialEq for KottwitzPoint {
    fn eq(&self, other: &Self) -> bool {
        self.nu == other.nu && self.kappa == other.kappa
    }
}
impl Eq for KottwitzPoint {}

/// An endoscopic cocharacter datum: a standard Levi `M_S`, an `M_S`-dominant
/// cocharacter, and a refined endoscopic class of `M_S` as decoration.
/// Ordered by `(S, mu, class id)` so formal sums are deterministic.
#[derive(Clone, Debug)]
pub struct EndoCochar {
    pub levi: StdLevi,
    pub mu: LatVec,
    pub class: EndoTriple,
    pub class_id: ClassId,
}

impl EndoCochar {
    fn key(&self) -> (&BTreeSet<usize>, &LatVec, &ClassId) {
        (&self.levi.subset, &self.mu, &self.class_id)
    }
}

impl PartialEq for EndoCochar {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}
impl Eq for EndoCochar {}
impl PartialOrd for EndoCochar {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for EndoCochar {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.key().cmp(&other.key())
    }
}

/// An element of the free abelian group on endoscopic cocharacter data.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EndoCochainSum {
    terms: BTreeMap<EndoCochar, BigInt>,
}

impl EndoCochainSum {
    pub fn new() -> Self {
        EndoCochainSum { terms: BTreeMap::new() }
    }

    pub fn add_term(&mut self, c: EndoCochar, coeff: BigInt) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(c).or_insert_with(BigInt::zero);
        *entry += coeff;
        if entry.is_zero() {
            // look up again to remove; the key is the one just touched
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn add(&mut self, other: &EndoCochainSum) {
        for (c, k) in &other.terms {
            self.add_term(c.clone(), k.clone());
        }
    }

    pub fn sub(&mut self, other: &EndoCochainSum) {
        for (c, k) in &other.terms {
            self.add_term(c.clone(), -k.clone());
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&EndoCochar, &BigInt)> {
        self.terms.iter()
    }

    pub fn coeff(&self, c: &EndoCochar) -> BigInt {
        self.terms.get(c).cloned().unwrap_or_else(BigInt::zero)
    }
}

/// All Galois-stable standard Levi subsets: unions of base orbits, in
/// canonical order.
pub fn stable_subsets(form: &GaloisForm) -> Vec<BTreeSet<usize>> {
    let orbits = form.base_orbits();
    let mut out = Vec::new();
    for mask in 0..(1u64 << orbits.len()) {
        let mut s = BTreeSet::new();
        for (k, orbit) in orbits.iter().enumerate() {
            if mask & (1 << k) != 0 {
                s.extend(orbit.iter().copied());
            }
        }
        out.push(s);
    }
    out.sort_by_key(|s| (s.len(), s.iter().copied().collect::<Vec<_>>()));
    out
}

/// The slope of a cocharacter pair: the average of `mu` over the Levi Weyl
/// group and the Galois group, i.e. its projection to the central
/// cocharacter space of `M_S`.
pub fn theta(form: &GaloisForm, levi: &StdLevi, mu: &[BigInt]) -> RatVec {
    let wm: Vec<LatAut> =
        reflection_subgroup(&form.brd.datum, &levi.root_indices, WEYL_BOUND).into_iter().collect();
    let n = BigRational::from(int(wm.len() as i64));
    let mut acc = zero_rat_vec(form.rank());
    let mu_rat = to_rat_vec(mu);
    for w in &wm {
        acc = add_rat_vec(&acc, &w.dual_action().apply_rat(&mu_rat));
    }
    let avg: RatVec = acc.into_iter().map(|c| c / n.clone()).collect();
    form.gamma_average(&avg)
}

/// Orbit of a cocharacter under the Levi Weyl group (acting on the
/// cocharacter side), in canonical order.
pub fn weyl_orbit(form: &GaloisForm, levi: &StdLevi, mu: &[BigInt]) -> Vec<LatVec> {
    let wm = reflection_subgroup(&form.brd.datum, &levi.root_indices, WEYL_BOUND);
    let orbit: BTreeSet<LatVec> = wm
        .iter()
        .map(|w| {
            w.dual_action()
                .apply_rat(&to_rat_vec(mu))
                .into_iter()
                .map(|c| {
                    assert!(c.is_integer());
                    c.to_integer()
                })
                .collect()
        })
        .collect();
    orbit.into_iter().collect()
}

fn is_levi_dominant(form: &GaloisForm, subset: &BTreeSet<usize>, mu: &[BigInt]) -> bool {
    is_dominant(&form.brd, subset, &to_rat_vec(mu))
}

/// Base positions whose simple root pairs to zero against `v`: the simple
/// roots of the centralizer Levi when `v` is dominant.
fn zero_positions(form: &GaloisForm, v: &RatVec) -> BTreeSet<usize> {
    form.brd
        .base
        .iter()
        .enumerate()
        .filter(|(_, &ri)| pair_ir(&form.brd.datum.roots[ri], v).is_zero())
        .map(|(p, _)| p)
        .collect()
}

fn full_subset(form: &GaloisForm) -> BTreeSet<usize> {
    (0..form.brd.base.len()).collect()
}

/// Shared context for cocharacter-data computations over one ambient form:
/// caches the Weyl machinery for the ambient group and its stable Levis.
pub struct KotCtx {
    pub form: Arc<GaloisForm>,
    pub amb: Ambient,
    levi_ambients: BTreeMap<BTreeSet<usize>, (Arc<GaloisForm>, Ambient)>,
}

impl KotCtx {
    pub fn new(form: Arc<GaloisForm>) -> Self {
        let amb = Ambient::new(form.clone());
        let mut levi_ambients = BTreeMap::new();
        for s in stable_subsets(&form) {
            let lf = Arc::new(form.levi_form(&s));
            let lamb = Ambient::new(lf.clone());
            levi_ambients.insert(s, (lf, lamb));
        }
        KotCtx { form, amb, levi_ambients }
    }

    pub fn levi_ambient(&self, subset: &BTreeSet<usize>) -> &(Arc<GaloisForm>, Ambient) {
        self.levi_ambients.get(subset).expect("subset is a stable Levi subset")
    }

    fn cochar(&self, subset: &BTreeSet<usize>, mu: LatVec, class: EndoTriple) -> EndoCochar {
        let levi = standard_levi(&self.form.brd, subset);
        assert!(is_levi_dominant(&self.form, subset, &mu), "mu is M_S-dominant");
        let (_, lamb) = self.levi_ambient(subset);
        let class_id = class_id_in(lamb, &class);
        EndoCochar { levi, mu, class, class_id }
    }

    /// Decorations of a Levi: the refined classes of `M_S` whose induction
    /// back to the ambient group is isomorphic to the given ambient class.
    /// Computed through the embedded-datum fiber so each class appears once.
    fn decorations(&self, hcls: &EndoTriple, subset: &BTreeSet<usize>) -> Vec<EndoTriple> {
        let levi = standard_levi(&self.form.brd, subset);
        let fib = fiber_in(&self.amb, hcls, &levi).expect("stable subsets restrict");
        fib.iter().map(|e| x_map_in(&self.amb, e)).collect()
    }
}

/// The averaged-dominant set of endoscopic cocharacter data below
/// `(hcls, G, mu)`: all `(H_S, M_S, mu_S)` with `mu_S` conjugate to `mu`,
/// slope `theta` G-dominant with centralizer Levi exactly `M_S`, and
/// decoration inducting to `hcls`.
pub fn sd_set(ctx: &KotCtx, hcls: &EndoTriple, mu: &[BigInt]) -> Vec<EndoCochar> {
    assert!(
        is_levi_dominant(&ctx.form, &full_subset(&ctx.form), mu),
        "mu is dominant"
    );
    let full = standard_levi(&ctx.form.brd, &full_subset(&ctx.form));
    let mut out = Vec::new();
    for subset in stable_subsets(&ctx.form) {
        let levi = standard_levi(&ctx.form.brd, &subset);
        let decs = ctx.decorations(hcls, &subset);
        for mu_s in weyl_orbit(&ctx.form, &full, mu) {
            if !is_levi_dominant(&ctx.form, &subset, &mu_s) {
                continue;
            }
            let th = theta(&ctx.form, &levi, &mu_s);
            if !is_dominant(&ctx.form.brd, &full_subset(&ctx.form), &th) {
                continue;
            }
            // the slope must centralize to exactly M_S
            if zero_positions(&ctx.form, &th) != subset {
                continue;
            }
            for dec in &decs {
                out.push(ctx.cochar(&subset, mu_s.clone(), dec.clone()));
            }
        }
    }
    out.sort();
    out
}

/// The cocharacter pairs of the averaged-dominant set, without decorations.
pub fn cochar_pairs_sd(form: &Arc<GaloisForm>, mu: &[BigInt]) -> Vec<(StdLevi, LatVec)> {
    let ctx = KotCtx::new(form.clone());
    let trivial = EndoTriple::trivial(form);
    sd_set(&ctx, &trivial, mu).into_iter().map(|c| (c.levi, c.mu)).collect()
}

/// The augmentation sublattice used for the Kottwitz residue: the coroot
/// lattice of the Levi plus the image of `(gamma - 1)` on the cocharacter
/// lattice, as a Hermite basis.
fn kappa_lattice(form: &GaloisForm, levi: &StdLevi) -> Vec<LatVec> {
    let dim = form.rank();
    let mut rows: Vec<LatVec> =
        levi.root_indices.iter().map(|&i| form.brd.datum.coroots[i].clone()).collect();
    for m in form.elements_y() {
        for i in 0..dim {
            let e: LatVec = (0..dim).map(|j| int(if i == j { 1 } else { 0 })).collect();
            let im = m.apply(&e);
            rows.push(sub_lat_vec(&im, &e));
        }
    }
    hnf(&rows, dim)
}

/// The Newton map on the averaged-dominant set: slope, centralizer Levi,
/// and the Kottwitz residue of the cocharacter.  Independent of the
/// endoscopic decoration by construction.
pub fn t_map(ctx: &KotCtx, c: &EndoCochar) -> Result<KottwitzPoint, KottwitzError> {
    let nu = theta(&ctx.form, &c.levi, &c.mu);
    if !is_dominant(&ctx.form.brd, &full_subset(&ctx.form), &nu) {
        return Err(KottwitzError::NotInSd);
    }
    let levi = levi_from_cochar(&ctx.form.brd, &nu);
    let h = kappa_lattice(&ctx.form, &levi);
    let kappa = reduce_mod_lattice(&c.mu, &h);
    Ok(KottwitzPoint { nu, levi, kappa })
}

/// `B(G, mu)`: the distinct Kottwitz points arising from the
/// averaged-dominant set, ordered by Newton cocharacter.
pub fn kottwitz_set(form: &Arc<GaloisForm>, mu: &[BigInt]) -> Vec<KottwitzPoint> {
    let ctx = KotCtx::new(form.clone());
    kottwitz_set_in(&ctx, mu)
}

pub fn kottwitz_set_in(ctx: &KotCtx, mu: &[BigInt]) -> Vec<KottwitzPoint> {
    let trivial = EndoTriple::trivial(&ctx.form);
    let mut out: Vec<KottwitzPoint> = Vec::new();
    for c in sd_set(ctx, &trivial, mu) {
        let b = t_map(ctx, &c).expect("sd elements have dominant slope");
        if !out.contains(&b) {
            out.push(b);
        }
    }
    out.sort_by(|a, b| a.nu.cmp(&b.nu).then_with(|| a.kappa.cmp(&b.kappa)));
    out
}

/// The partial order on endoscopic cocharacter data: containment of Levis,
/// conjugacy of cocharacters under the larger Levi, slope dominance
/// relative to the larger Levi with no new slope-wall outside it, and
/// matching decorations under induction.
pub fn poset_leq(ctx: &KotCtx, a: &EndoCochar, b: &EndoCochar) -> bool {
    if !a.levi.subset.is_subset(&b.levi.subset) {
        return false;
    }
    if !weyl_orbit(&ctx.form, &b.levi, &b.mu).contains(&a.mu) {
        return false;
    }
    let th = theta(&ctx.form, &a.levi, &a.mu);
    if !is_dominant(&ctx.form.brd, &b.levi.subset, &th) {
        return false;
    }
    // on the slope walls inside the larger Levi the cocharacter itself
    // must already be dominant
    let walls: BTreeSet<usize> =
        zero_positions(&ctx.form, &th).intersection(&b.levi.subset).copied().collect();
    if !is_levi_dominant(&ctx.form, &walls, &a.mu) {
        return false;
    }
    let (_, bamb) = ctx.levi_ambient(&b.levi.subset);
    let lifted = y_map_in(bamb, &a.class);
    is_isomorphic_in(bamb, &lifted, &b.class).is_some()
}

/// The signed formal sum attached to one Kottwitz point: for each element
/// of the Newton fiber over `b`, the alternating expansion through its
/// chains of strictly smaller averaged-dominant strata, one Levi form at a
/// time.  A stratum of `(M, class, mu)` is a proper stable subset of the
/// base of `M` together with an `M`-conjugate of `mu` whose average inside
/// `M` is `M`-dominant with centralizer exactly that subset, decorated by
/// the fiber of the class; each stratum contributes its own expansion with
/// the opposite sign.
pub fn m_sum(
    ctx: &KotCtx,
    hcls: &EndoTriple,
    b: &KottwitzPoint,
    mu: &[BigInt],
) -> Result<EndoCochainSum, KottwitzError> {
    if !kottwitz_set_in(ctx, mu).contains(b) {
        return Err(KottwitzError::PointNotInSet);
    }
    let mut sum = EndoCochainSum::new();
    for d in sd_set(ctx, hcls, mu) {
        if t_map(ctx, &d).expect("sd element") != *b {
            continue;
        }
        let (dform, damb) = ctx.levi_ambient(&d.levi.subset);
        expand_into(ctx, dform, damb, &d.class, &d.mu, &d.levi.subset, false, &mut sum);
    }
    Ok(sum)
}

#[allow(clippy::too_many_arguments)]
fn expand_into(
    ctx: &KotCtx,
    form: &Arc<GaloisForm>,
    amb: &Ambient,
    cls: &EndoTriple,
    mu: &LatVec,
    top_subset: &BTreeSet<usize>,
    negate: bool,
    sum: &mut EndoCochainSum,
) {
    let sign = BigInt::from(if negate { -1 } else { 1 });
    sum.add_term(ctx.cochar(top_subset, mu.clone(), cls.clone()), sign);
    let local_full = full_subset(form);
    let full_levi = standard_levi(&form.brd, &local_full);
    for subset in stable_subsets(form) {
        if subset == local_full {
            continue;
        }
        let levi_local = standard_levi(&form.brd, &subset);
        let fib = fiber_in(amb, cls, &levi_local).expect("stable subsets restrict");
        let decs: Vec<EndoTriple> = fib.iter().map(|e| x_map_in(amb, e)).collect();
        let mut sub: Option<(Arc<GaloisForm>, Ambient, BTreeSet<usize>)> = None;
        for mu_c in weyl_orbit(form, &full_levi, mu) {
            if !is_levi_dominant(form, &subset, &mu_c) {
                continue;
            }
            let th = theta(form, &levi_local, &mu_c);
            if !is_dominant(&form.brd, &local_full, &th) {
                continue;
            }
            if zero_positions(form, &th) != subset {
                continue;
            }
            let (sub_form, sub_amb, top_sub) = sub.get_or_insert_with(|| {
                let f = Arc::new(form.levi_form(&subset));
                let a = Ambient::new(f.clone());
                let t = subset.iter().map(|&p| ambient_position(form, &ctx.form, p)).collect();
                (f, a, t)
            });
            for dec in &decs {
                expand_into(ctx, sub_form, sub_amb, dec, &mu_c, top_sub, !negate, sum);
            }
        }
    }
}

/// Translate a Levi-form base position back to the ambient base.
fn ambient_position(levi_form: &GaloisForm, ambient: &GaloisForm, p: usize) -> usize {
    let root = &levi_form.brd.datum.roots[levi_form.brd.base[p]];
    ambient
        .brd
        .base
        .iter()
        .position(|&b| ambient.brd.datum.roots[b] == *root)
        .expect("Levi base root is an ambient base root")
}

/// The top endoscopic cocharacter datum `(hcls, G, mu)`.
pub fn top_cochar(ctx: &KotCtx, hcls: &EndoTriple, mu: &[BigInt]) -> EndoCochar {
    let full = full_subset(&ctx.form);
    let decs = ctx.decorations(hcls, &full);
    assert_eq!(decs.len(), 1, "the full-Levi fiber is a singleton");
    ctx.cochar(&full, mu.to_vec(), decs[0].clone())
}

/// Residual of the cocharacter sum identity: the sum of the signed formal
/// sums over all Kottwitz points minus the top datum.  The identity asserts
/// this is zero; the residual is returned so failures are diagnosable.
pub fn verify_sum_formula(
    form: &Arc<GaloisForm>,
    hcls: &EndoTriple,
    mu: &[BigInt],
    jobs: usize,
) -> EndoCochainSum {
    let ctx = KotCtx::new(form.clone());
    let points = kottwitz_set_in(&ctx, mu);
    let sums = parallel_m_sums(&ctx, hcls, &points, mu, jobs);
    let mut residual = EndoCochainSum::new();
    for s in &sums {
        residual.add(s);
    }
    let mut top = EndoCochainSum::new();
    top.add_term(top_cochar(&ctx, hcls, mu), BigInt::from(1));
    residual.sub(&top);
    residual
}

/// Compute the per-point sums, fanning out over at most `jobs` threads and
/// merging in point order so the result is independent of the thread count.
fn parallel_m_sums(
    ctx: &KotCtx,
    hcls: &EndoTriple,
    points: &[KottwitzPoint],
    mu: &[BigInt],
    jobs: usize,
) -> Vec<EndoCochainSum> {
    let jobs = jobs.max(1);
    if jobs == 1 || points.len() <= 1 {
        return points
            .iter()
            .map(|b| m_sum(ctx, hcls, b, mu).expect("point from kottwitz_set"))
            .collect();
    }
    let mut out: Vec<Option<EndoCochainSum>> = vec![None; points.len()];
    std::thread::scope(|scope| {
        let chunk = points.len().div_ceil(jobs);
        let mut handles = Vec::new();
        for (start, block) in (0..).map(|k| k * chunk).zip(points.chunks(chunk)) {
            handles.push((
                start,
                scope.spawn(move || {
                    // each worker builds its own context: the shared one is
                    // not Sync-free of interior assumptions, and rebuilding
                    // keeps the computation order identical per point
                    let local = KotCtx::new(ctx.form.clone());
                    block
                        .iter()
                        .map(|b| m_sum(&local, hcls, b, mu).expect("point from kottwitz_set"))
                        .collect::<Vec<_>>()
                }),
            ));
        }
        for (start, h) in handles {
            for (i, s) in h.join().expect("worker panicked").into_iter().enumerate() {
                out[start + i] = Some(s);
            }
        }
    });
    out.into_iter().map(|s| s.expect("all points computed")).collect()
}

/// Residual of the induction identity through a standard Levi containing
/// the centralizer of `b`: the lifted sum of the Levi-level signed sums over
/// the compatible Levi data minus the ambient signed sum.
pub fn verify_induction(
    form: &Arc<GaloisForm>,
    s_levi: &StdLevi,
    hcls: &EndoTriple,
    b: &KottwitzPoint,
    mu: &[BigInt],
) -> Result<EndoCochainSum, KottwitzError> {
    let ctx = KotCtx::new(form.clone());
    if !b.levi.subset.is_subset(&s_levi.subset) {
        return Err(KottwitzError::LeviTooSmall);
    }
    let (mform, _) = ctx.levi_ambient(&s_levi.subset);
    let mform = mform.clone();
    let mctx = KotCtx::new(mform.clone());
    let full = standard_levi(&ctx.form.brd, &full_subset(&ctx.form));
    let mut lhs = EndoCochainSum::new();
    // the compatible Levi data: M_S-dominant conjugates of mu, decorated by
    // classes of M_S inducting to hcls, whose Levi Kottwitz set contains the
    // canonical lift of b (same Newton cocharacter and residue)
    for mu_s in weyl_orbit(&ctx.form, &full, mu) {
        if !is_levi_dominant(&ctx.form, &s_levi.subset, &mu_s) {
            continue;
        }
        let m_points = kottwitz_set_in(&mctx, &mu_s);
        let Some(b_s) = m_points.iter().find(|p| p.nu == b.nu && p.kappa == b.kappa) else {
            continue;
        };
        for dec in ctx.decorations(hcls, &s_levi.subset) {
            let part = m_sum(&mctx, &dec, b_s, &mu_s).expect("lifted point is in the Levi set");
            lhs.add(&lift_sum(&ctx, &mform, &part));
        }
    }
    let rhs = m_sum(&ctx, hcls, b, mu)?;
    lhs.sub(&rhs);
    Ok(lhs)
}

/// Re-index a Levi-level sum into ambient coordinates: the Levi subsets of
/// its terms become ambient base subsets; cocharacters and classes live on
/// the shared lattice and carry over unchanged.
fn lift_sum(ctx: &KotCtx, mform: &Arc<GaloisForm>, sum: &EndoCochainSum) -> EndoCochainSum {
    let mut out = EndoCochainSum::new();
    for (c, k) in sum.terms() {
        let subset: BTreeSet<usize> =
            c.levi.subset.iter().map(|&p| ambient_position(mform, &ctx.form, p)).collect();
        let levi = standard_levi(&ctx.form.brd, &subset);
        out.add_term(
            EndoCochar { levi, mu: c.mu.clone(), class: c.class.clone(), class_id: c.class_id.clone() },
            k.clone(),
        );
    }
    out
}

fn sub_lat_vec(a: &[BigInt], b: &[BigInt]) -> LatVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Independent Newton-point oracle: enumerate the full Weyl orbit of `mu`
/// against every stable subset, keep the averages that are dominant with
/// centralizer exactly that Levi, and dedup with the residue.
pub fn kottwitz_set_direct(form: &Arc<GaloisForm>, mu: &[BigInt]) -> Vec<KottwitzPoint> {
    let full = standard_levi(&form.brd, &full_subset(form));
    let mut out: Vec<KottwitzPoint> = Vec::new();
    for mu_p in weyl_orbit(form, &full, mu) {
        for subset in stable_subsets(form) {
            let levi = standard_levi(&form.brd, &subset);
            let nu = theta(form, &levi, &mu_p);
            if !is_dominant(&form.brd, &full_subset(form), &nu) {
                continue;
            }
            let central = levi_from_cochar(&form.brd, &nu);
            if central.subset != subset {
                continue;
            }
            let h = kappa_lattice(form, &central);
            let kappa = reduce_mod_lattice(&mu_p, &h);
            let p = KottwitzPoint { nu, levi: central, kappa };
            if !out.contains(&p) {
                out.push(p);
            }
        }
    }
    out.sort_by(|a, b| a.nu.cmp(&b.nu).then_with(|| a.kappa.cmp(&b.kappa)));
    out
}
