//! Builtin quasisplit forms constructed from explicit character/cocharacter
//! lattices: general linear, special linear, projective linear, symplectic,
//! odd and even orthogonal, and (similitude) unitary groups, plus split tori.

use crate::galois::*;
use crate::lattice::*;
use crate::root_datum::*;
use num::BigInt;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum BuiltinError {
    #[error("unknown builtin group kind {0:?}")]
    UnknownKind(String),
    #[error("parameter {0} is out of range for {1}")]
    BadParameter(usize, &'static str),
    #[error(transparent)]
    Galois(#[from] GaloisError),
    #[error(transparent)]
    Datum(#[from] RootDatumError),
}

fn e(n: usize, i: usize) -> LatVec {
    let mut v = vec![BigInt::from(0); n];
    v[i] = BigInt::from(1);
    v
}

/// Split torus of the given rank.
pub fn torus(rank: usize) -> GaloisForm {
    let datum = RootDatum::new(rank, Vec::new(), Vec::new()).unwrap();
    GaloisForm::split(BasedRootDatum::new(datum, Vec::new()).unwrap())
}

fn type_a_pairs(n: usize) -> (Vec<LatVec>, Vec<LatVec>) {
    let mut roots = Vec::new();
    let mut coroots = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let r = sub_vec(&e(n, i), &e(n, j));
                roots.push(r.clone());
                coroots.push(r);
            }
        }
    }
    (roots, coroots)
}

fn based(rank: usize, roots: Vec<LatVec>, coroots: Vec<LatVec>, simple: &[LatVec]) -> BasedRootDatum {
    let datum = RootDatum::new(rank, roots, coroots).expect("builtin datum is valid");
    let base = simple
        .iter()
        .map(|s| datum.root_index(s).expect("simple roots lie in the root list"))
        .collect();
    BasedRootDatum::new(datum, base).expect("builtin base is valid")
}

/// `GL_n`, split, on `X = Y = Z^n`.
pub fn gl(n: usize) -> GaloisForm {
    if n == 0 {
        return torus(0);
    }
    let (roots, coroots) = type_a_pairs(n);
    let simple: Vec<LatVec> = (0..n - 1).map(|i| sub_vec(&e(n, i), &e(n, i + 1))).collect();
    GaloisForm::split(based(n, roots, coroots, &simple))
}

/// `SL_n`, split, rank `n-1`. Characters are classes of `GL_n` characters
/// modulo the determinant line; cocharacters are the trace-zero sublattice.
pub fn sl(n: usize) -> GaloisForm {
    assert!(n >= 2, "SL_n needs n >= 2");
    let r = n - 1;
    // X-coordinates of the class of e_i
    let chi = |i: usize| -> LatVec {
        if i < r {
            e(r, i)
        } else {
            neg_vec(&(0..r).fold(vec![BigInt::from(0); r], |acc, k| add_vec(&acc, &e(r, k))))
        }
    };
    // Y-coordinates of e_i - e_j (trace zero) in the basis f_k = e_k - e_n
    let cochi = |i: usize, j: usize| -> LatVec {
        let mut v = vec![BigInt::from(0); r];
        if i < r {
            v[i] += BigInt::from(1);
        }
        if j < r {
            v[j] -= BigInt::from(1);
        }
        v
    };
    let mut roots = Vec::new();
    let mut coroots = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                roots.push(sub_vec(&chi(i), &chi(j)));
                coroots.push(cochi(i, j));
            }
        }
    }
    let simple: Vec<LatVec> = (0..r).map(|i| sub_vec(&chi(i), &chi(i + 1))).collect();
    GaloisForm::split(based(r, roots, coroots, &simple))
}

/// `PGL_n`, split: the dual datum of `SL_n`.
pub fn pgl(n: usize) -> GaloisForm {
    GaloisForm::split(sl(n).brd.dual())
}

/// `Sp_2n` (type `C_n`), split, on `X = Y = Z^n`.
pub fn sp(two_n: usize) -> GaloisForm {
    assert!(two_n >= 2 && two_n % 2 == 0, "Sp needs an even size >= 2");
    let n = two_n / 2;
    let mut roots = Vec::new();
    let mut coroots = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                roots.push(sub_vec(&e(n, i), &e(n, j)));
                coroots.push(sub_vec(&e(n, i), &e(n, j)));
            }
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            for sgn in [1i64, -1] {
                let s = BigInt::from(sgn);
                let r = scale_vec(&s, &add_vec(&e(n, i), &e(n, j)));
                roots.push(r.clone());
                coroots.push(r);
            }
        }
    }
    for i in 0..n {
        for sgn in [1i64, -1] {
            let s = BigInt::from(sgn);
            roots.push(scale_vec(&(&s * BigInt::from(2)), &e(n, i)));
            coroots.push(scale_vec(&s, &e(n, i)));
        }
    }
    let mut simple: Vec<LatVec> = (0..n - 1).map(|i| sub_vec(&e(n, i), &e(n, i + 1))).collect();
    simple.push(scale_vec(&BigInt::from(2), &e(n, n - 1)));
    GaloisForm::split(based(n, roots, coroots, &simple))
}

/// `SO_{2n+1}` (type `B_n`), split: the dual datum of `Sp_2n`.
pub fn so_odd(size: usize) -> GaloisForm {
    assert!(size >= 3 && size % 2 == 1, "SO odd needs an odd size >= 3");
    GaloisForm::split(sp(size - 1).brd.dual())
}

/// `SO_2n` (type `D_n`), split, on `X = Y = Z^n`, `n >= 2`.
pub fn so_even(size: usize) -> GaloisForm {
    assert!(size >= 4 && size % 2 == 0, "SO even needs an even size >= 4");
    let n = size / 2;
    let mut roots = Vec::new();
    let mut coroots = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            for (si, sj) in [(1i64, -1i64), (-1, 1), (1, 1), (-1, -1)] {
                let r = add_vec(
                    &scale_vec(&BigInt::from(si), &e(n, i)),
                    &scale_vec(&BigInt::from(sj), &e(n, j)),
                );
                roots.push(r.clone());
                coroots.push(r);
            }
        }
    }
    let mut simple: Vec<LatVec> = (0..n - 1).map(|i| sub_vec(&e(n, i), &e(n, i + 1))).collect();
    simple.push(add_vec(&e(n, n - 2), &e(n, n - 1)));
    GaloisForm::split(based(n, roots, coroots, &simple))
}

/// Quasisplit unitary group `U_n` attached to a quadratic extension: the
/// `GL_n` datum with the order-2 action `x -> -Jx` (reverse and negate),
/// which flips the base.
pub fn u(n: usize) -> Result<GaloisForm, BuiltinError> {
    if n == 0 {
        return Err(BuiltinError::BadParameter(0, "U"));
    }
    let split = gl(n);
    let rows: Vec<LatVec> = (0..n).map(|i| neg_vec(&e(n, n - 1 - i))).collect();
    let gamma = LatAut::new(rows).expect("reversal is unimodular");
    Ok(GaloisForm::new(split.brd, vec![GaloisGen { x_action: gamma, order: 2 }])?)
}

/// Quasisplit unitary similitude group `GU_n`: rank `n + 1`, coordinates
/// `(a_1..a_n; b)` with `b` the similitude character, Galois action
/// `(a; b) -> (-reverse(a); b + sum(a))`.
pub fn gu(n: usize) -> Result<GaloisForm, BuiltinError> {
    if n == 0 {
        return Err(BuiltinError::BadParameter(0, "GU"));
    }
    let r = n + 1;
    let mut roots = Vec::new();
    let mut coroots = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                roots.push(sub_vec(&e(r, i), &e(r, j)));
                coroots.push(sub_vec(&e(r, i), &e(r, j)));
            }
        }
    }
    let simple: Vec<LatVec> = (0..n - 1).map(|i| sub_vec(&e(r, i), &e(r, i + 1))).collect();
    let mut rows: Vec<LatVec> = (0..n).map(|i| neg_vec(&e(r, n - 1 - i))).collect();
    rows.push(vec![BigInt::from(1); r]);
    let gamma = LatAut::new(rows).expect("GU action is unimodular");
    let brd = based(r, roots, coroots, &simple);
    Ok(GaloisForm::new(brd, vec![GaloisGen { x_action: gamma, order: 2 }])?)
}

/// Replace the Galois data of a form by a cyclic group of the given order
/// acting trivially on the lattice.  Useful for split groups where inner
/// twists should still be available.
pub fn with_trivial_galois(form: GaloisForm, order: usize) -> GaloisForm {
    assert!(order >= 1);
    let gen = GaloisGen { x_action: LatAut::identity(form.rank()), order };
    GaloisForm::new(form.brd, vec![gen]).expect("trivial action is always valid")
}

/// Named builtin dispatch, e.g. `("GL", 3)` or `("U", 3)`.
pub fn builtin(kind: &str, n: usize) -> Result<GaloisForm, BuiltinError> {
    match kind {
        "torus" | "T" => Ok(torus(n)),
        "GL" => Ok(gl(n)),
        "SL" => {
            if n < 2 {
                return Err(BuiltinError::BadParameter(n, "SL"));
            }
            Ok(sl(n))
        }
        "PGL" => {
            if n < 2 {
                return Err(BuiltinError::BadParameter(n, "PGL"));
            }
            Ok(pgl(n))
        }
        "Sp" => {
            if n < 2 || n % 2 != 0 {
                return Err(BuiltinError::BadParameter(n, "Sp"));
            }
            Ok(sp(n))
        }
        "SO" => {
            if n >= 3 && n % 2 == 1 {
                Ok(so_odd(n))
            } else if n >= 4 && n % 2 == 0 {
                Ok(so_even(n))
            } else {
                Err(BuiltinError::BadParameter(n, "SO"))
            }
        }
        "U" => u(n),
        "GU" => gu(n),
        other => Err(BuiltinError::UnknownKind(other.to_string())),
    }
}
