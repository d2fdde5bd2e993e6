//! The factorization `w0^{-1} n = m n' nbar` and big-cell factorizations.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::rat::{self, Rat};
use crate::symplectic::{
    build_forms, embed_n, embed_nbar, is_symplectic, j_form, jprime_form, levi_embed, theta_r, GroupShape,
    NilpotentPair,
};

#[derive(Debug, Clone, PartialEq)]
pub struct BruhatFactors {
    pub shape: GroupShape,
    pub m1: Mat,
    pub m2: Mat,
    pub xp: Mat,
    pub yp: Mat,
    pub x1: Mat,
    pub y1: Mat,
}

impl BruhatFactors {
    /// `diag(m1, m2, theta_r(m1)) n(X', Y') nbar(X1, Y1)`.
    pub fn product(&self) -> Result<Mat> {
        let m = levi_embed(&self.m1, &self.m2)?;
        let np = embed_n(self.shape, &self.xp, &self.yp);
        let nb = embed_nbar(self.shape, &self.x1, &self.y1);
        Ok(&(&m * &np) * &nb)
    }
}

/// `(I - J' tX tY^{-1} J_r X)^{-1}`; `Y` must be invertible.
pub fn m2_of(x: &Mat, y: &Mat) -> Result<Mat> {
    let (r, c) = x.shape();
    if c == 0 {
        return Ok(Mat::zeros(0, 0));
    }
    let yinv = y.inverse().map_err(|_| Error::non_generic("det Y"))?;
    let jp = jprime_form(c / 2);
    let k = jp.checked_mul(&x.transpose())?.checked_mul(&yinv.transpose())?.checked_mul(&j_form(r))?.checked_mul(x)?;
    let inner = Mat::identity(c).checked_sub(&k)?;
    inner.inverse().map_err(|_| Error::non_generic("det(I - J' tX tY^-1 J X)"))
}

pub fn decompose_w0(n: &NilpotentPair) -> Result<BruhatFactors> {
    let r = n.shape.r;
    let s = rat::neg_one_pow(r as i64);
    let y = n.y();
    let yinv = y.inverse().map_err(|_| Error::non_generic("det Y"))?;
    let m1 = theta_r(&y)?;
    let m2 = m2_of(&n.x, &y)?;
    let x1 = yinv.checked_mul(&n.x)?.scale(&s);
    let y1 = yinv.scale(&s);
    let yp = m1.inverse()?.scale(&s);
    let xp = theta_r(&yinv)?.checked_mul(&yinv)?.checked_mul(&n.x)?.scale(&-s);
    Ok(BruhatFactors { shape: n.shape, m1, m2, xp, yp, x1, y1 })
}

/// `w0^{-1} n` as a matrix.
pub fn w0_inverse_times(n: &NilpotentPair) -> Result<Mat> {
    let w0 = build_forms(n.shape).w0;
    Ok(&w0.inverse()? * &n.embed())
}

/// The identity `m2 J' tX' J_r = J' tX J_r` on decomposition outputs.
pub fn item_four_holds(n: &NilpotentPair, f: &BruhatFactors) -> Result<bool> {
    if n.shape.m == 0 {
        return Ok(true);
    }
    let jp = jprime_form(n.shape.m);
    let j = j_form(n.shape.r);
    let lhs = f.m2.checked_mul(&jp)?.checked_mul(&f.xp.transpose())?.checked_mul(&j)?;
    let rhs = jp.checked_mul(&n.x.transpose())?.checked_mul(&j)?;
    Ok(lhs == rhs)
}

/// Closed form of `w0 nbar(X1, Y1) w0^{-1}`: `n(Y^{-1} X, (-1)^r Y^{-1})`.
pub fn w0_conjugate_nbar_closed_form(n: &NilpotentPair) -> Result<Mat> {
    let y = n.y();
    let yinv = y.inverse().map_err(|_| Error::non_generic("det Y"))?;
    let s = rat::neg_one_pow(n.shape.r as i64);
    Ok(embed_n(n.shape, &yinv.checked_mul(&n.x)?, &yinv.scale(&s)))
}

/// `A = u1 M u2` with `u1`, `u2` upper unitriangular and `M` monomial.
#[derive(Debug, Clone, PartialEq)]
pub struct BruhatNormalForm {
    pub u1: Mat,
    pub monomial: Mat,
    pub u2: Mat,
}

/// Bruhat normal form by elimination: rows bottom-up, pivot on the leftmost
/// nonzero unused column, clearing to the right by column operations and
/// upward by row operations.
pub fn bruhat_normal_form(a: &Mat) -> Result<BruhatNormalForm> {
    if !a.is_square() {
        return Err(Error::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    let n = a.rows();
    let mut b = a.clone();
    let mut u1 = Mat::identity(n);
    let mut u2 = Mat::identity(n);
    let mut used = vec![false; n];
    for i in (0..n).rev() {
        let c = (0..n).find(|&j| !used[j] && !b[(i, j)].is_zero()).ok_or(Error::Singular)?;
        let piv = b[(i, c)].clone();
        for j in c + 1..n {
            if used[j] || b[(i, j)].is_zero() {
                continue;
            }
            let f = &b[(i, j)] / &piv;
            for k in 0..n {
                let v = &b[(k, j)] - &(&f * &b[(k, c)]);
                b[(k, j)] = v;
            }
            for k in 0..n {
                let v = &u2[(c, k)] + &(&f * &u2[(j, k)]);
                u2[(c, k)] = v;
            }
        }
        for k in 0..i {
            if b[(k, c)].is_zero() {
                continue;
            }
            let f = &b[(k, c)] / &piv;
            for j in 0..n {
                let v = &b[(k, j)] - &(&f * &b[(i, j)]);
                b[(k, j)] = v;
            }
            for l in 0..n {
                let v = &u1[(l, i)] + &(&f * &u1[(l, k)]);
                u1[(l, i)] = v;
            }
        }
        used[c] = true;
    }
    Ok(BruhatNormalForm { u1, monomial: b, u2 })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BigCellFactors {
    pub u1: Mat,
    pub w: Mat,
    pub t: Mat,
    pub u2: Mat,
}

impl BigCellFactors {
    pub fn product(&self) -> Mat {
        &(&(&self.u1 * &self.w) * &self.t) * &self.u2
    }

    pub fn t_diagonal(&self) -> Vec<Rat> {
        self.t.diagonal()
    }
}

/// `A = u1 w t u2` for a monomial representative `w`.
pub fn cell_factor(a: &Mat, w: &Mat) -> Result<BigCellFactors> {
    if a.shape() != w.shape() {
        return Err(Error::DimensionMismatch(format!("{:?} against representative {:?}", a.shape(), w.shape())));
    }
    let nf = bruhat_normal_form(a).map_err(|e| match e {
        Error::Singular => Error::non_generic("singular input to cell factorization"),
        e => e,
    })?;
    let t = w.inverse()?.checked_mul(&nf.monomial)?;
    if !t.is_diagonal() {
        return Err(Error::non_generic("outside the requested Bruhat cell"));
    }
    Ok(BigCellFactors { u1: nf.u1, w: w.clone(), t, u2: nf.u2 })
}

pub fn gl_big_cell(a: &Mat) -> Result<BigCellFactors> {
    if !a.is_square() {
        return Err(Error::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    cell_factor(a, &j_form(a.rows()))
}

/// Representative of the Weyl element of `Sp_2m` exchanging the outer `k`
/// coordinate pairs: `J'_{2m}` on indices `< k` and `>= 2m - k`, identity between.
/// `k = m` gives `J'_{2m}`.
pub fn sp_outer_representative(m: usize, k: usize) -> Mat {
    let jp = jprime_form(m);
    let n = 2 * m;
    Mat::from_fn(n, n, |i, j| {
        let outer = i < k || i >= n - k;
        if outer {
            jp[(i, j)].clone()
        } else if i == j {
            Rat::one()
        } else {
            Rat::zero()
        }
    })
}

/// `A = v1 w t2 v2` in `Sp_2m` with `w` the outer-`k` representative.
pub fn sp_cell(a: &Mat, k: usize) -> Result<BigCellFactors> {
    if a.rows() % 2 != 0 {
        return Err(Error::OddSize(a.rows()));
    }
    if !is_symplectic(a)? {
        return Err(Error::NotSymplectic);
    }
    let m = a.rows() / 2;
    if k > m {
        return Err(Error::OutOfRange(format!("k = {k} > m = {m}")));
    }
    let f = cell_factor(a, &sp_outer_representative(m, k))?;
    if !is_symplectic(&f.t)? {
        return Err(Error::NotSymplectic);
    }
    Ok(f)
}

/// Big cell relative to `J'_{2m}`; `v1`, `v2` come out symplectic.
pub fn sp_big_cell(a: &Mat) -> Result<BigCellFactors> {
    let f = sp_cell(a, a.rows() / 2)?;
    if !is_symplectic(&f.u1)? || !is_symplectic(&f.u2)? {
        return Err(Error::NotSymplectic);
    }
    Ok(f)
}

/// `diag(a_1..a_m, a_m^{-1}..a_1^{-1})`.
pub fn is_paired_torus(t: &[Rat]) -> bool {
    let n = t.len();
    n.is_multiple_of(2) && (0..n / 2).all(|i| !t[i].is_zero() && &t[i] * &t[n - 1 - i] == Rat::one())
}
