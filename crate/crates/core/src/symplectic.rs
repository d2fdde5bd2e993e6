//! Matrix model of `Sp_2n` with the maximal Levi `GL_r x Sp_2m`.
//!
//! Indices in this module are 0-based unless a doc comment says otherwise.

use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mat::{Mat, Scalar};
use crate::rat::{self, Rat};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupShape {
    pub r: usize,
    pub m: usize,
}

impl GroupShape {
    pub fn new(r: usize, m: usize) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidShape("r must be at least 1".into()));
        }
        Ok(GroupShape { r, m })
    }

    pub fn n(&self) -> usize {
        self.r + self.m
    }

    /// Size of the ambient symplectic matrices.
    pub fn dim(&self) -> usize {
        2 * self.n()
    }

    /// `dim N = 2rm + r(r+1)/2`.
    pub fn dim_n(&self) -> usize {
        2 * self.r * self.m + self.r * (self.r + 1) / 2
    }

    /// `dim U_M = r(r-1)/2 + m^2`.
    pub fn dim_um(&self) -> usize {
        self.r * (self.r - 1) / 2 + self.m * self.m
    }

    /// All shapes with `r >= 1`, `m >= 0` and `r + m <= n_max`.
    pub fn all_up_to(n_max: usize) -> Vec<GroupShape> {
        let mut v = Vec::new();
        for n in 1..=n_max {
            for r in 1..=n {
                v.push(GroupShape { r, m: n - r });
            }
        }
        v
    }
}

/// Antidiagonal `J_n` with entries `1, -1, 1, ...` from the top row down.
pub fn j_form(n: usize) -> Mat {
    Mat::from_fn(n, n, |i, j| if i + j + 1 == n { rat::neg_one_pow(i as i64) } else { Rat::zero() })
}

/// `J'_{2n} = [[0, J_n], [-tJ_n, 0]]`.
pub fn jprime_form(n: usize) -> Mat {
    let j = j_form(n);
    let mut out = Mat::zeros(2 * n, 2 * n);
    out.set_block(0, n, &j);
    out.set_block(n, 0, &(-&j.transpose()));
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct Forms {
    pub j_r: Mat,
    pub jprime_2m: Mat,
    pub jprime_2n: Mat,
    pub w_g: Mat,
    pub w_m: Mat,
    pub w0: Mat,
}

pub fn build_forms(shape: GroupShape) -> Forms {
    let (r, m) = (shape.r, shape.m);
    let sgn = rat::neg_one_pow(r as i64);
    let j_r = j_form(r);
    let jp = jprime_form(m);
    let n2 = shape.dim();

    let mut w_g = Mat::zeros(n2, n2);
    w_g.set_block(0, r + 2 * m, &j_r);
    w_g.set_block(r, r, &jp.scale(&sgn));
    w_g.set_block(r + 2 * m, 0, &(-&j_r.transpose()));

    let w_m = Mat::direct_sum(&[&j_r, &jp.scale(&sgn), &j_r]);

    let mut w0 = Mat::zeros(n2, n2);
    w0.set_block(0, r + 2 * m, &Mat::identity(r));
    w0.set_block(r, r, &Mat::identity(2 * m));
    w0.set_block(r + 2 * m, 0, &Mat::identity(r).scale(&sgn));

    Forms { j_r, jprime_2m: jp, jprime_2n: jprime_form(shape.n()), w_g, w_m, w0 }
}

pub fn is_symplectic(h: &Mat) -> Result<bool> {
    if !h.is_square() {
        return Err(Error::NotSquare { rows: h.rows(), cols: h.cols() });
    }
    if h.rows() % 2 != 0 {
        return Err(Error::OddSize(h.rows()));
    }
    let jp = jprime_form(h.rows() / 2);
    Ok(&(&h.transpose() * &jp) * h == jp)
}

/// `theta_r(g) = J_r tg^{-1} J_r^{-1}`.
pub fn theta_r(g: &Mat) -> Result<Mat> {
    if !g.is_square() {
        return Err(Error::NotSquare { rows: g.rows(), cols: g.cols() });
    }
    let j = j_form(g.rows());
    let jinv = j.transpose();
    Ok(&(&j * &g.inverse()?.transpose()) * &jinv)
}

/// `theta_{r,m}(X) = (-1)^r J'_{2m} tX J_r` for `X` of size `r x 2m`.
pub fn theta_rm(x: &Mat) -> Result<Mat> {
    let (r, c) = x.shape();
    if c % 2 != 0 {
        return Err(Error::OddSize(c));
    }
    let jp = jprime_form(c / 2);
    Ok((&(&jp * &x.transpose()) * &j_form(r)).scale(&rat::neg_one_pow(r as i64)))
}

/// `Y = Z J_r + X theta_{r,m}(X) / 2`.
pub fn y_from_z(x: &Mat, z: &Mat) -> Result<Mat> {
    let r = z.rows();
    let half = rat::rat(1, 2);
    let base = z.checked_mul(&j_form(r))?;
    if x.cols() == 0 {
        return Ok(base);
    }
    base.checked_add(&x.checked_mul(&theta_rm(x)?)?.scale(&half))
}

/// Inverse of [`y_from_z`].
pub fn z_from_y(x: &Mat, y: &Mat) -> Result<Mat> {
    let r = y.rows();
    let half = rat::rat(1, 2);
    let shifted = if x.cols() == 0 {
        y.clone()
    } else {
        y.checked_sub(&x.checked_mul(&theta_rm(x)?)?.scale(&half))?
    };
    shifted.checked_mul(&j_form(r).transpose())
}

/// `J_r tY - Y tJ_r + (-1)^r X J'_{2m} tX`; zero exactly on `N`.
pub fn constraint_residual(x: &Mat, y: &Mat) -> Result<Mat> {
    let r = y.rows();
    let j = j_form(r);
    let a = j.checked_mul(&y.transpose())?;
    let b = y.checked_mul(&j.transpose())?;
    let mut res = a.checked_sub(&b)?;
    if x.cols() > 0 {
        let jp = jprime_form(x.cols() / 2);
        let c = x.checked_mul(&jp)?.checked_mul(&x.transpose())?;
        res = res.checked_add(&c.scale(&rat::neg_one_pow(r as i64)))?;
    }
    Ok(res)
}

/// An element `n(X, Y)` of `N`, stored through the independent coordinates
/// `(X, Z)` with `Z` symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct NilpotentPair {
    pub shape: GroupShape,
    pub x: Mat,
    pub z: Mat,
}

impl NilpotentPair {
    pub fn from_xz(shape: GroupShape, x: Mat, z: Mat) -> Result<Self> {
        check_shape(shape, &x, &z)?;
        if !z.is_symmetric() {
            let res = z.checked_sub(&z.transpose())?;
            return Err(Error::ConstraintViolation { residual: format!("{res:?}") });
        }
        Ok(NilpotentPair { shape, x, z })
    }

    pub fn from_xy(shape: GroupShape, x: Mat, y: Mat) -> Result<Self> {
        check_shape(shape, &x, &y)?;
        let res = constraint_residual(&x, &y)?;
        if !res.is_zero() {
            return Err(Error::ConstraintViolation { residual: format!("{res:?}") });
        }
        let z = z_from_y(&x, &y)?;
        Ok(NilpotentPair { shape, x, z })
    }

    pub fn y(&self) -> Mat {
        y_from_z(&self.x, &self.z).expect("shapes checked at construction")
    }

    /// The `2n x 2n` matrix `n(X, Y)`.
    pub fn embed(&self) -> Mat {
        embed_n(self.shape, &self.x, &self.y())
    }

    /// `nbar(X, Y) = w0 n(X, Y) w0^{-1}`.
    pub fn embed_bar(&self) -> Mat {
        embed_nbar(self.shape, &self.x, &self.y())
    }
}

fn check_shape(shape: GroupShape, x: &Mat, yz: &Mat) -> Result<()> {
    let (r, m) = (shape.r, shape.m);
    if x.shape() != (r, 2 * m) {
        return Err(Error::DimensionMismatch(format!("X is {:?}, expected ({r}, {})", x.shape(), 2 * m)));
    }
    if yz.shape() != (r, r) {
        return Err(Error::DimensionMismatch(format!("Y/Z is {:?}, expected ({r}, {r})", yz.shape())));
    }
    Ok(())
}

/// `n(X, Y)` without checking the constraint.
pub fn embed_n(shape: GroupShape, x: &Mat, y: &Mat) -> Mat {
    let (r, m) = (shape.r, shape.m);
    let mut out = Mat::identity(shape.dim());
    out.set_block(0, r + 2 * m, y);
    if m > 0 {
        out.set_block(0, r, x);
        out.set_block(r, r + 2 * m, &theta_rm(x).expect("even width"));
    }
    out
}

/// `w0 n(X, Y) w0^{-1}`. Blocks: `[[I,0,0],[(-1)^r J' tX J, I, 0],[(-1)^r Y, (-1)^r X, I]]`.
pub fn embed_nbar(shape: GroupShape, x: &Mat, y: &Mat) -> Mat {
    let w0 = build_forms(shape).w0;
    let w0inv = w0.inverse().expect("w0 invertible");
    &(&w0 * &embed_n(shape, x, y)) * &w0inv
}

/// `diag(m1, m2, theta_r(m1))`.
pub fn levi_embed(m1: &Mat, m2: &Mat) -> Result<Mat> {
    let t = theta_r(m1)?;
    Ok(Mat::direct_sum(&[m1, m2, &t]))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeviElement {
    pub m1: Mat,
    pub m2: Mat,
}

impl LeviElement {
    pub fn new(m1: Mat, m2: Mat) -> Result<Self> {
        if !m1.is_square() {
            return Err(Error::NotSquare { rows: m1.rows(), cols: m1.cols() });
        }
        if m1.det()?.is_zero() {
            return Err(Error::Singular);
        }
        if !m2.is_square() {
            return Err(Error::NotSquare { rows: m2.rows(), cols: m2.cols() });
        }
        if m2.rows() > 0 && !is_symplectic(&m2)? {
            return Err(Error::NotSymplectic);
        }
        Ok(LeviElement { m1, m2 })
    }

    pub fn shape(&self) -> GroupShape {
        GroupShape { r: self.m1.rows(), m: self.m2.rows() / 2 }
    }

    pub fn embed(&self) -> Mat {
        levi_embed(&self.m1, &self.m2).expect("m1 invertible by construction")
    }

    /// Reads `(m1, m2)` back off a block-diagonal Levi matrix.
    pub fn from_matrix(shape: GroupShape, g: &Mat) -> Result<Self> {
        let (r, m) = (shape.r, shape.m);
        if g.shape() != (shape.dim(), shape.dim()) {
            return Err(Error::DimensionMismatch(format!("{:?} for shape {shape:?}", g.shape())));
        }
        let m1 = g.block(0, 0, r, r);
        let m2 = g.block(r, r, 2 * m, 2 * m);
        let e = LeviElement::new(m1, m2)?;
        if e.embed() != *g {
            return Err(Error::InvalidShape("not in the Levi".into()));
        }
        Ok(e)
    }
}

/// Positive roots of `Sp_2m` as 0-based positions `(a, b)`, `a < b`, `a + b <= 2m - 1`.
pub fn sp_root_positions(m: usize) -> Vec<(usize, usize)> {
    let mut v = Vec::new();
    for a in 0..2 * m {
        for b in a + 1..2 * m {
            if a + b < 2 * m {
                v.push((a, b));
            }
        }
    }
    v
}

/// Root element of `Sp_2m` at position `(a, b)`:
/// `I + c E_ab - (-1)^(a+b) c E_{b'a'}` with `x' = 2m - 1 - x`; one entry for long roots.
pub fn sp_root_element<T: Scalar>(m: usize, a: usize, b: usize, c: T) -> Mat<T> {
    let n = 2 * m;
    let mut e = Mat::<T>::identity(n);
    let (ap, bp) = (n - 1 - a, n - 1 - b);
    e[(a, b)] = c.clone();
    if (bp, ap) != (a, b) {
        let v = if (a + b).is_multiple_of(2) { -c } else { c };
        e[(bp, ap)] = v;
    }
    e
}

/// `I + c E_ab` in `GL_r`.
pub fn gl_root_element<T: Scalar>(r: usize, a: usize, b: usize, c: T) -> Mat<T> {
    let mut e = Mat::<T>::identity(r);
    e[(a, b)] = e[(a, b)].clone() + c;
    e
}

/// Random upper unitriangular `r x r`.
pub fn random_gl_unipotent<R: Rng + ?Sized>(rng: &mut R, r: usize, bound: i64) -> Mat {
    Mat::from_fn(r, r, |i, j| {
        if i == j {
            Rat::one()
        } else if i < j {
            rat::random(rng, bound)
        } else {
            Rat::zero()
        }
    })
}

/// Random element of the upper unipotent of `Sp_2m`, as a product of root elements.
pub fn random_sp_unipotent<R: Rng + ?Sized>(rng: &mut R, m: usize, bound: i64) -> Mat {
    let mut g = Mat::identity(2 * m);
    for (a, b) in sp_root_positions(m) {
        g = &g * &sp_root_element(m, a, b, rat::random(rng, bound));
    }
    g
}

/// `u1 X u2^{-1}` and `u1 Z tu1`: the conjugation action of `diag(u1, u2, theta_r(u1))` on `N`.
pub fn act_levi(n: &NilpotentPair, u1: &Mat, u2: &Mat) -> Result<NilpotentPair> {
    let x = u1.checked_mul(&n.x)?.checked_mul(&u2.inverse()?)?;
    let z = u1.checked_mul(&n.z)?.checked_mul(&u1.transpose())?;
    NilpotentPair::from_xz(n.shape, x, z)
}

/// The cocharacter `diag(t I_r, I_2m, t^{-1} I_r)`.
pub fn alpha_coweight(shape: GroupShape, t: &Rat) -> Result<Mat> {
    if t.is_zero() {
        return Err(Error::Singular);
    }
    let (r, m) = (shape.r, shape.m);
    let mut d = vec![t.clone(); r];
    d.extend(std::iter::repeat_n(Rat::one(), 2 * m));
    d.extend(std::iter::repeat_n(t.recip(), r));
    Ok(Mat::diag(&d))
}

/// Simple root `alpha_r` evaluated on a torus element `diag(t_1..t_n, t_n^{-1}..t_1^{-1})`.
pub fn alpha_r_on_torus(shape: GroupShape, t: &Mat) -> Rat {
    let r = shape.r;
    if shape.m == 0 {
        &t[(r - 1, r - 1)] * &t[(r - 1, r - 1)]
    } else {
        &t[(r - 1, r - 1)] / &t[(r, r)]
    }
}

/// Simple-root coordinate positions of `U_M` inside `Sp_2n`: `(i, i+1)` for `i < n`
/// except `i = r - 1`, plus the long simple root `(n-1, n)` when `m >= 1`.
pub fn simple_positions(shape: GroupShape) -> Vec<(usize, usize)> {
    (0..shape.n()).filter(|&i| i + 1 != shape.r).map(|i| (i, i + 1)).collect()
}

pub fn simple_coordinate_sum(shape: GroupShape, g: &Mat) -> Rat {
    simple_positions(shape).into_iter().fold(Rat::zero(), |acc, (i, j)| acc + &g[(i, j)])
}

/// Checks `psi(w0 u w0^{-1}) = psi(u)` coordinatewise on random `u` in `U_M`.
pub fn psi_compat_check<R: Rng + ?Sized>(shape: GroupShape, rng: &mut R, samples: usize, bound: i64) -> Result<bool> {
    let w0 = build_forms(shape).w0;
    let w0inv = w0.inverse()?;
    for _ in 0..samples {
        let u1 = random_gl_unipotent(rng, shape.r, bound);
        let u2 = random_sp_unipotent(rng, shape.m, bound);
        let u = levi_embed(&u1, &u2)?;
        let c = &(&w0 * &u) * &w0inv;
        if simple_coordinate_sum(shape, &c) != simple_coordinate_sum(shape, &u) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RhoData {
    /// Coefficient `c` with `2 rho_P = c * (e_1 + ... + e_r)`.
    pub two_rho_coeff: i64,
    /// `<alpha~, alpha^vee>` where `alpha^vee = e_1 + ... + e_r` is the central cocharacter.
    pub tilde_alpha_pairing: i64,
    /// `r (2m + r + 1)`.
    pub exponent: i64,
}

pub fn rho_pairing(shape: GroupShape) -> RhoData {
    let (r, m) = (shape.r as i64, shape.m as i64);
    RhoData { two_rho_coeff: 2 * m + r + 1, tilde_alpha_pairing: r, exponent: r * (2 * m + r + 1) }
}

/// Roots of `N` in the `e_i` basis, `i` 0-based.
pub fn unipotent_radical_roots(shape: GroupShape) -> Vec<Vec<i64>> {
    let (r, n) = (shape.r, shape.n());
    let unit = |i: usize| {
        let mut v = vec![0i64; n];
        v[i] = 1;
        v
    };
    let add = |a: &[i64], b: &[i64], s: i64| a.iter().zip(b).map(|(x, y)| x + s * y).collect::<Vec<_>>();
    let mut roots = Vec::new();
    for i in 0..r {
        for j in r..n {
            roots.push(add(&unit(i), &unit(j), -1));
            roots.push(add(&unit(i), &unit(j), 1));
        }
        for j in i + 1..r {
            roots.push(add(&unit(i), &unit(j), 1));
        }
        roots.push(unit(i).iter().map(|x| 2 * x).collect());
    }
    roots
}

/// `2 rho_P` computed from the roots of `N`.
pub fn two_rho_explicit(shape: GroupShape) -> Vec<i64> {
    let mut s = vec![0i64; shape.n()];
    for root in unipotent_radical_roots(shape) {
        for (a, b) in s.iter_mut().zip(&root) {
            *a += b;
        }
    }
    s
}

/// Coroot of the removed simple root `alpha_r`: `e_r - e_{r+1}` if `m >= 1`, else `e_n`.
pub fn alpha_r_coroot(shape: GroupShape) -> Vec<i64> {
    let mut v = vec![0i64; shape.n()];
    v[shape.r - 1] = 1;
    if shape.m >= 1 {
        v[shape.r] = -1;
    }
    v
}

/// `<rho_P, alpha_r^vee>` from explicit inner products.
pub fn rho_alpha_explicit(shape: GroupShape) -> Rat {
    let two_rho = two_rho_explicit(shape);
    let co = alpha_r_coroot(shape);
    let p: i64 = two_rho.iter().zip(&co).map(|(a, b)| a * b).sum();
    rat::rat(p, 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{int, rat};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_pair(rng: &mut ChaCha8Rng, shape: GroupShape) -> NilpotentPair {
        let x = Mat::random(rng, shape.r, 2 * shape.m, 10);
        let a = Mat::random(rng, shape.r, shape.r, 10);
        let z = &a + &a.transpose();
        NilpotentPair::from_xz(shape, x, z).unwrap()
    }

    #[test]
    fn forms_for_n_equal_one() {
        assert_eq!(j_form(1), Mat::from_ints(&[&[1]]));
        assert_eq!(jprime_form(1), Mat::from_ints(&[&[0, 1], &[-1, 0]]));
    }

    #[test]
    fn j_form_identities() {
        for n in 1..7 {
            let j = j_form(n);
            let s = rat::neg_one_pow(n as i64 - 1);
            assert_eq!(j.transpose(), j.scale(&s));
            assert_eq!(&j * &j, Mat::identity(n).scale(&s));
        }
    }

    #[test]
    fn w0_for_one_one() {
        let f = build_forms(GroupShape::new(1, 1).unwrap());
        let expect = Mat::from_ints(&[&[0, 0, 0, 1], &[0, 1, 0, 0], &[0, 0, 1, 0], &[-1, 0, 0, 0]]);
        assert_eq!(f.w0, expect);
    }

    #[test]
    fn forms_are_symplectic_and_factor() {
        for shape in GroupShape::all_up_to(6) {
            let f = build_forms(shape);
            assert!(is_symplectic(&f.w0).unwrap(), "{shape:?}");
            assert!(is_symplectic(&f.w_g).unwrap(), "{shape:?}");
            assert!(is_symplectic(&f.w_m).unwrap(), "{shape:?}");
            assert_eq!(&f.w_g * &f.w_m.inverse().unwrap(), f.w0, "{shape:?}");
        }
    }

    #[test]
    fn symplectic_membership_basics() {
        assert!(is_symplectic(&Mat::identity(4)).unwrap());
        assert!(is_symplectic(&Mat::diag(&[int(3), rat(1, 3)])).unwrap());
        assert!(!is_symplectic(&Mat::diag(&[int(3), int(3)])).unwrap());
        assert_eq!(is_symplectic(&Mat::identity(3)), Err(Error::OddSize(3)));
    }

    #[test]
    fn theta_basics() {
        assert_eq!(theta_r(&Mat::identity(3)).unwrap(), Mat::identity(3));
        let g = Mat::from_ints(&[&[5]]);
        assert_eq!(theta_r(&g).unwrap(), Mat::from_fn(1, 1, |_, _| rat(1, 5)));
        assert_eq!(theta_r(&Mat::<Rat>::zeros(2, 2)), Err(Error::Singular));
    }

    #[test]
    fn theta_involution_on_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for r in 1..=5 {
            let g = Mat::random(&mut rng, r, r, 10);
            if g.det().unwrap().is_zero() {
                continue;
            }
            assert_eq!(theta_r(&theta_r(&g).unwrap()).unwrap(), g);
        }
    }

    #[test]
    fn x_zero_any_scalar_y_is_valid_for_r1() {
        let s = GroupShape::new(1, 2).unwrap();
        let n = NilpotentPair::from_xy(s, Mat::zeros(1, 4), Mat::from_ints(&[&[7]])).unwrap();
        assert!(is_symplectic(&n.embed()).unwrap());
    }

    #[test]
    fn r1_m1_z_from_y() {
        // theta_{1,1}(x1, x2) = -J' t(x1, x2) = (-x2, x1)^t, so X theta(X) = 0 and Y = Z.
        let s = GroupShape::new(1, 1).unwrap();
        let x = Mat::from_ints(&[&[2, 3]]);
        let n = NilpotentPair::from_xy(s, x, Mat::from_ints(&[&[5]])).unwrap();
        assert_eq!(n.z, Mat::from_ints(&[&[5]]));
    }

    #[test]
    fn constraint_violation_names_residual() {
        let s = GroupShape::new(2, 0).unwrap();
        let err = NilpotentPair::from_xy(s, Mat::zeros(2, 0), Mat::from_ints(&[&[1, 0], &[0, 1]])).unwrap_err();
        assert!(matches!(err, Error::ConstraintViolation { .. }));
    }

    #[test]
    fn z_symmetric_iff_constraint() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for shape in GroupShape::all_up_to(5) {
            let n = random_pair(&mut rng, shape);
            assert!(constraint_residual(&n.x, &n.y()).unwrap().is_zero());
            assert!(is_symplectic(&n.embed()).unwrap());
            let bad_z = Mat::random(&mut rng, shape.r, shape.r, 10);
            if bad_z.is_symmetric() {
                continue;
            }
            let bad_y = y_from_z(&n.x, &bad_z).unwrap();
            assert!(!constraint_residual(&n.x, &bad_y).unwrap().is_zero());
        }
    }

    #[test]
    fn nbar_block_layout() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for shape in GroupShape::all_up_to(5) {
            let (r, m) = (shape.r, shape.m);
            let n = random_pair(&mut rng, shape);
            let b = n.embed_bar();
            let s = rat::neg_one_pow(r as i64);
            let y = n.y();
            assert_eq!(b.block(r + 2 * m, 0, r, r), y.scale(&s));
            if m > 0 {
                assert_eq!(b.block(r + 2 * m, r, r, 2 * m), n.x.scale(&s));
                assert_eq!(b.block(r, 0, 2 * m, r), theta_rm(&n.x).unwrap());
            }
        }
    }

    #[test]
    fn conjugating_nbar_back_needs_sign() {
        // w0 nbar(X1, Y1) w0^{-1} = n(X1, Y1) by definition; the closed form for the
        // decomposition outputs lives in the bruhat module.
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let shape = GroupShape::new(2, 1).unwrap();
        let n = random_pair(&mut rng, shape);
        let w0 = build_forms(shape).w0;
        let back = &(&w0.inverse().unwrap() * &n.embed_bar()) * &w0;
        assert_eq!(back, n.embed());
    }

    #[test]
    fn sp_root_elements_are_symplectic() {
        for m in 1..4 {
            let roots = sp_root_positions(m);
            assert_eq!(roots.len(), m * m);
            for (a, b) in roots {
                let e = sp_root_element(m, a, b, int(3));
                assert!(is_symplectic(&e).unwrap(), "m={m} ({a},{b})");
                assert!(e.is_upper_unitriangular());
            }
        }
    }

    #[test]
    fn levi_conjugation_matches_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for shape in GroupShape::all_up_to(5) {
            let n = random_pair(&mut rng, shape);
            let u1 = random_gl_unipotent(&mut rng, shape.r, 5);
            let u2 = random_sp_unipotent(&mut rng, shape.m, 5);
            let u = levi_embed(&u1, &u2).unwrap();
            assert!(is_symplectic(&u).unwrap());
            let direct = &(&u * &n.embed()) * &u.inverse().unwrap();
            assert_eq!(act_levi(&n, &u1, &u2).unwrap().embed(), direct, "{shape:?}");
        }
    }

    #[test]
    fn psi_compat_holds() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(psi_compat_check(GroupShape::new(2, 1).unwrap(), &mut rng, 20, 10).unwrap());
        for shape in GroupShape::all_up_to(6) {
            assert!(psi_compat_check(shape, &mut rng, 100, 10).unwrap(), "{shape:?}");
        }
    }

    #[test]
    fn psi_compat_identity() {
        let shape = GroupShape::new(3, 2).unwrap();
        let u = Mat::identity(shape.dim());
        let w0 = build_forms(shape).w0;
        let c = &(&w0 * &u) * &w0.inverse().unwrap();
        assert_eq!(simple_coordinate_sum(shape, &c), simple_coordinate_sum(shape, &u));
    }

    #[test]
    fn simple_positions_count() {
        for shape in GroupShape::all_up_to(6) {
            assert_eq!(simple_positions(shape).len(), shape.n() - 1, "{shape:?}");
        }
    }

    #[test]
    fn rho_values() {
        let d = rho_pairing(GroupShape::new(2, 3).unwrap());
        assert_eq!((d.two_rho_coeff, d.tilde_alpha_pairing, d.exponent), (9, 2, 18));
        let d = rho_pairing(GroupShape::new(1, 0).unwrap());
        assert_eq!((d.two_rho_coeff, d.tilde_alpha_pairing), (2, 1));
    }

    #[test]
    fn rho_from_roots() {
        for shape in GroupShape::all_up_to(5) {
            let c = rho_pairing(shape).two_rho_coeff;
            let mut expect = vec![c; shape.r];
            expect.extend(std::iter::repeat_n(0, shape.m));
            assert_eq!(two_rho_explicit(shape), expect, "{shape:?}");
            assert_eq!(rho_alpha_explicit(shape), rat(c, 2), "{shape:?}");
            assert_eq!(unipotent_radical_roots(shape).len(), shape.dim_n());
        }
    }

    #[test]
    fn w0_inverts_alpha_coweight() {
        for shape in GroupShape::all_up_to(5) {
            let t = rat(3, 7);
            let a = alpha_coweight(shape, &t).unwrap();
            let w0 = build_forms(shape).w0;
            let c = &(&w0 * &a) * &w0.inverse().unwrap();
            assert_eq!(c, a.inverse().unwrap());
            assert!(is_symplectic(&a).unwrap());
            if shape.m > 0 {
                assert_eq!(alpha_r_on_torus(shape, &a), t);
            }
        }
    }

    proptest! {
        #[test]
        fn constructed_pairs_are_symplectic(seed in 0u64..10_000, idx in 0usize..15) {
            let shapes = GroupShape::all_up_to(5);
            let shape = shapes[idx % shapes.len()];
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = random_pair(&mut rng, shape);
            prop_assert!(is_symplectic(&n.embed()).unwrap());
            prop_assert!(is_symplectic(&n.embed_bar()).unwrap());
            prop_assert_eq!(NilpotentPair::from_xy(shape, n.x.clone(), n.y()).unwrap(), n);
        }
    }
}
