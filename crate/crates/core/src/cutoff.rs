//! p-adic cut-off functions on `Nbar` and on the image of `n -> m`, the
//! involution `Theta_M`, and the twisted conjugation action of `U_M`.

use num_bigint::BigInt;
use num_traits::Zero;
use rand::Rng;

use crate::bruhat::{bruhat_normal_form, decompose_w0};
use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::orbit::{random_canonical, random_stabilizer_element, StabilizerKind, StabilizerDescriptor};
use crate::rat::{self, Rat};
use crate::symplectic::{
    alpha_coweight, build_forms, embed_nbar, levi_embed, sp_root_element, sp_root_positions, theta_r, GroupShape,
    LeviElement, NilpotentPair,
};
use crate::weyl::{levi_of_w, LeviDescriptor, SignedPerm};

pub fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PadicContext {
    pub p: u64,
    pub kappa: i64,
    pub d: i64,
    pub g: i64,
}

impl PadicContext {
    pub fn new(p: u64, kappa: i64, d: i64, g: i64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if kappa < 0 {
            return Err(Error::OutOfRange(format!("kappa = {kappa}")));
        }
        Ok(PadicContext { p, kappa, d, g })
    }

    pub fn with_kappa(&self, kappa: i64) -> Self {
        PadicContext { kappa, ..*self }
    }

    fn p_pow(&self, e: i64) -> Rat {
        rat::pow(&Rat::from_integer(BigInt::from(self.p)), e)
    }
}

/// `|x|_p`: zero, or `p^e`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum PadicAbs {
    Zero,
    Pow(i64),
}

fn int_valuation(n: &BigInt, p: u64) -> i64 {
    let p = BigInt::from(p);
    let mut n = n.clone();
    let mut v = 0;
    while (&n % &p).is_zero() {
        n /= &p;
        v += 1;
    }
    v
}

/// `v_p(x)`, `None` for zero.
pub fn valuation(x: &Rat, p: u64) -> Option<i64> {
    if x.is_zero() {
        None
    } else {
        Some(int_valuation(x.numer(), p) - int_valuation(x.denom(), p))
    }
}

pub fn padic_abs(x: &Rat, p: u64) -> Result<PadicAbs> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    Ok(valuation(x, p).map_or(PadicAbs::Zero, |v| PadicAbs::Pow(-v)))
}

/// How the per-entry exponent of the cut-off ball depends on the position
/// `(i, j)` (1-based) in a `rows x cols` matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutoffConvention {
    /// `(rows - i) + j`: grows away from the lower-left corner.
    LowerLeft,
    /// `(rows - i) + (cols - j) + 1`.
    Literal,
}

impl CutoffConvention {
    pub fn exponent(self, rows: usize, cols: usize, i: usize, j: usize) -> i64 {
        match self {
            CutoffConvention::LowerLeft => (rows - i + j) as i64,
            CutoffConvention::Literal => (rows - i + cols - j + 1) as i64,
        }
    }
}

/// `phi_kappa(X)`: every `|x_ij| <= p^{e_ij kappa}`.
pub fn phi_kappa(ctx: &PadicContext, x: &Mat, conv: CutoffConvention) -> bool {
    let (rows, cols) = x.shape();
    (0..rows).all(|i| {
        (0..cols).all(|j| match valuation(&x[(i, j)], ctx.p) {
            None => true,
            Some(v) => -v <= conv.exponent(rows, cols, i + 1, j + 1) * ctx.kappa,
        })
    })
}

/// Reads `(X, Y)` off `nbar(X, Y)`, rejecting matrices of another form.
pub fn nbar_blocks(shape: GroupShape, g: &Mat) -> Result<(Mat, Mat)> {
    let (r, m) = (shape.r, shape.m);
    if g.shape() != (shape.dim(), shape.dim()) {
        return Err(Error::DimensionMismatch(format!("{:?} for shape {shape:?}", g.shape())));
    }
    let s = rat::neg_one_pow(r as i64);
    let x = g.block(r + 2 * m, r, r, 2 * m).scale(&s);
    let y = g.block(r + 2 * m, 0, r, r).scale(&s);
    if embed_nbar(shape, &x, &y) != *g {
        return Err(Error::InvalidShape("not of the form nbar(X, Y)".into()));
    }
    Ok((x, y))
}

/// `phi_kappa(p^{-(d+g)} X) phi_kappa(p^{-2(d+g)} Y) = 1`.
pub fn nbar_membership_xy(ctx: &PadicContext, x: &Mat, y: &Mat, conv: CutoffConvention) -> bool {
    let s = ctx.p_pow(-(ctx.d + ctx.g));
    phi_kappa(ctx, &x.scale(&s), conv) && phi_kappa(ctx, &y.scale(&(&s * &s)), conv)
}

pub fn nbar_membership(ctx: &PadicContext, shape: GroupShape, g: &Mat, conv: CutoffConvention) -> Result<bool> {
    let (x, y) = nbar_blocks(shape, g)?;
    Ok(nbar_membership_xy(ctx, &x, &y, conv))
}

/// Whether `nbar(X, Y)` lies in `alpha(t) Nbar_{0,kappa} alpha(t)^{-1}`.
pub fn conjugated_membership(
    ctx: &PadicContext,
    shape: GroupShape,
    t: &Rat,
    x: &Mat,
    y: &Mat,
    conv: CutoffConvention,
) -> Result<bool> {
    let a = alpha_coweight(shape, t)?;
    let g = &(&a.inverse()? * &embed_nbar(shape, x, y)) * &a;
    nbar_membership(ctx, shape, &g, conv)
}

/// `Theta_M(m) = w0^{-1} m w0`, which sends `diag(m1, m2, theta_r(m1))`
/// to `diag(theta_r(m1), m2, m1)`.
pub fn theta_m(m: &LeviElement) -> Result<LeviElement> {
    let shape = m.shape();
    let g = theta_m_matrix(shape, &m.embed())?;
    LeviElement::from_matrix(shape, &g)
}

pub fn theta_m_matrix(shape: GroupShape, g: &Mat) -> Result<Mat> {
    let w0 = build_forms(shape).w0;
    Ok(&(&w0.inverse()? * g) * &w0)
}

/// `m(X, Y)` as a Levi matrix.
pub fn m_of(n: &NilpotentPair) -> Result<Mat> {
    let f = decompose_w0(n)?;
    levi_embed(&f.m1, &f.m2)
}

/// `Theta_M(z u^{-1}) m(X, Y) u z^{-1} = m(u1^{-1} t X u2, u1^{-1} t^2 Y theta_r(u1))`
/// with `z = alpha(t)` and `u = diag(u1, u2, theta_r(u1))`.
pub fn twisted_conjugation_identity(n: &NilpotentPair, t: &Rat, u1: &Mat, u2: &Mat) -> Result<bool> {
    let shape = n.shape;
    let z = alpha_coweight(shape, t)?;
    let u = levi_embed(u1, u2)?;
    let zu_inv = &z * &u.inverse()?;
    let lhs = &(&theta_m_matrix(shape, &zu_inv)? * &m_of(n)?) * &(&u * &z.inverse()?);
    let u1_inv = u1.inverse()?;
    let x = &(&u1_inv * &n.x.scale(t)) * u2;
    let y = &(&u1_inv * &n.y().scale(&(t * t))) * &theta_r(u1)?;
    let moved = NilpotentPair::from_xy(shape, x, y)?;
    Ok(lhs == m_of(&moved)?)
}

/// `u` fixes `n` under `u^{-1} n u` iff it fixes `m(n)` under the twisted action.
pub fn stabilizers_agree(n: &NilpotentPair, u1: &Mat, u2: &Mat) -> Result<bool> {
    let u = levi_embed(u1, u2)?;
    let uinv = u.inverse()?;
    let fixes_n = &(&uinv * &n.embed()) * &u == n.embed();
    let m = m_of(n)?;
    let fixes_m = &(&theta_m_matrix(n.shape, &uinv)? * &m) * &u == m;
    Ok(fixes_n == fixes_m)
}

/// `phi(m(X, Y)) = phi_kappa(c X) phi_kappa(c^2 Y)` with `c = (Y^{-1} X)_{r,1}`.
pub fn phi_of_m(ctx: &PadicContext, x: &Mat, y: &Mat, conv: CutoffConvention) -> Result<bool> {
    let r = y.rows();
    if x.cols() == 0 {
        return Err(Error::InvalidShape("phi needs m >= 1".into()));
    }
    let yinv = y.inverse().map_err(|_| Error::non_generic("det Y"))?;
    let c = (&yinv * x)[(r - 1, 0)].clone();
    Ok(phi_kappa(ctx, &x.scale(&c), conv) && phi_kappa(ctx, &y.scale(&(&c * &c)), conv))
}

/// `u1^{-1} X u2`, `u1^{-1} Y theta_r(u1)`.
pub fn twisted_action(x: &Mat, y: &Mat, u1: &Mat, u2: &Mat) -> Result<(Mat, Mat)> {
    let u1_inv = u1.inverse()?;
    Ok((&(&u1_inv * x) * u2, &(&u1_inv * y) * &theta_r(u1)?))
}

/// A rational with `v_p >= lo`, drawn near the boundary.
fn random_with_valuation_at_least<R: Rng + ?Sized>(rng: &mut R, p: u64, lo: i64) -> Rat {
    if rng.gen_bool(0.15) {
        return Rat::zero();
    }
    let v = lo + rng.gen_range(0..3);
    random_with_valuation(rng, p, v)
}

fn random_with_valuation<R: Rng + ?Sized>(rng: &mut R, p: u64, v: i64) -> Rat {
    let unit = |rng: &mut R| loop {
        let k: i64 = rng.gen_range(1..=20);
        if !(k as u64).is_multiple_of(p) {
            return k;
        }
    };
    let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
    let a = unit(rng);
    let b = unit(rng);
    rat::rat(sign * a, b) * rat::pow(&rat::int(p as i64), v)
}

/// `U_{0,kappa}`: `|u_ij| <= p^{(j-i) kappa}` on both factors.
pub fn in_u0_kappa(ctx: &PadicContext, u: &Mat) -> bool {
    let n = u.rows();
    u.is_upper_unitriangular()
        && (0..n).all(|i| {
            (i + 1..n).all(|j| valuation(&u[(i, j)], ctx.p).is_none_or(|v| -v <= (j - i) as i64 * ctx.kappa))
        })
}

/// A random element of `U_{0,kappa}`; `slack > 0` loosens the bounds by
/// `p^{slack}` per unit of height, leaving the subgroup.
pub fn random_u0<R: Rng + ?Sized>(rng: &mut R, ctx: &PadicContext, shape: GroupShape, slack: i64) -> (Mat, Mat) {
    let (r, m) = (shape.r, shape.m);
    let k = ctx.kappa + slack;
    let mut u1 = Mat::identity(r);
    for i in 0..r {
        for j in i + 1..r {
            u1[(i, j)] = random_with_valuation_at_least(rng, ctx.p, -((j - i) as i64) * k);
        }
    }
    let mut u2 = Mat::identity(2 * m);
    for _ in 0..2 {
        for (a, b) in sp_root_positions(m) {
            let c = random_with_valuation_at_least(rng, ctx.p, -((b - a) as i64) * k);
            u2 = &u2 * &sp_root_element(m, a, b, c);
        }
    }
    (u1, u2)
}

/// A generic `(X, Y)` whose entries straddle the cut-off boundaries.
pub fn random_boundary_pair<R: Rng + ?Sized>(rng: &mut R, ctx: &PadicContext, shape: GroupShape) -> NilpotentPair {
    let (r, m) = (shape.r, shape.m);
    let spread = 2 * ctx.kappa + 2;
    let draw = |rng: &mut R| {
        let v = rng.gen_range(-spread..=2);
        random_with_valuation(rng, ctx.p, v)
    };
    let x = Mat::from_fn(r, 2 * m, |_, _| draw(rng));
    let mut z = Mat::zeros(r, r);
    for i in 0..r {
        for j in i..r {
            let v = draw(rng);
            z[(i, j)] = v.clone();
            z[(j, i)] = v;
        }
    }
    NilpotentPair::from_xz(shape, x, z).expect("symmetric")
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct InvarianceReport {
    pub trials: usize,
    /// Samples with `phi = 1`.
    pub inside: usize,
    /// Samples where `phi` changed.
    pub changed: usize,
}

/// Evaluates `phi` before and after the twisted action of sampled `u`.
/// With `slack = 0` the `u` lie in `U_{0,kappa}`.
pub fn phi_invariance_check<R: Rng + ?Sized>(
    ctx: &PadicContext,
    shape: GroupShape,
    rng: &mut R,
    trials: usize,
    conv: CutoffConvention,
    slack: i64,
) -> Result<InvarianceReport> {
    let mut out = InvarianceReport { trials, ..Default::default() };
    for _ in 0..trials {
        let (n, before) = crate::sample::resample(rng, |rng| {
            let n = random_boundary_pair(rng, ctx, shape);
            let b = phi_of_m(ctx, &n.x, &n.y(), conv)?;
            Ok((n, b))
        })?
        .value;
        let (u1, u2) = random_u0(rng, ctx, shape, slack);
        let (x, y) = twisted_action(&n.x, &n.y(), &u1, &u2)?;
        let after = phi_of_m(ctx, &x, &y, conv)?;
        out.inside += before as usize;
        out.changed += (before != after) as usize;
    }
    Ok(out)
}

/// Signed permutation of the Bruhat cell containing `diag(m1, m2, .)`,
/// read off the monomial parts of the two normal forms.
pub fn levi_cell(m1: &Mat, m2: &Mat) -> Result<(SignedPerm, Mat, Mat)> {
    let r = m1.rows();
    let m = m2.rows() / 2;
    let f1 = bruhat_normal_form(m1)?;
    let mut images = vec![0i32; r + m];
    for (j, img) in images.iter_mut().take(r).enumerate() {
        let i = (0..r).find(|&i| !f1.monomial[(i, j)].is_zero()).expect("monomial");
        *img = i as i32 + 1;
    }
    let mut sp_u2 = Mat::identity(2 * m);
    if m > 0 {
        let f2 = bruhat_normal_form(m2)?;
        for j in 0..m {
            let i = (0..2 * m).find(|&i| !f2.monomial[(i, j)].is_zero()).expect("monomial");
            let (k, sign) = if i < m { (i, 1) } else { (2 * m - 1 - i, -1) };
            images[r + j] = sign * (r + k + 1) as i32;
        }
        sp_u2 = f2.u2;
    }
    Ok((SignedPerm::new(images)?, f1.u2, sp_u2))
}

/// `diag(u1, u2)` lies in the unipotent radical of the Borel of `L`.
pub fn in_levi_unipotent(levi: &LeviDescriptor, u1: &Mat, u2: &Mat) -> bool {
    if !u1.is_upper_unitriangular() || !u2.is_upper_unitriangular() {
        return false;
    }
    let shape = levi.shape;
    let (r, m) = (shape.r, shape.m);
    let roots = levi.positive_roots();
    let n = shape.n();
    let has = |v: Vec<i64>| roots.contains(&v);
    for i in 0..r {
        for j in i + 1..r {
            if !u1[(i, j)].is_zero() {
                let mut v = vec![0; n];
                v[i] = 1;
                v[j] = -1;
                if !has(v) {
                    return false;
                }
            }
        }
    }
    let eps = |a: usize| if a < m { (r + a, 1i64) } else { (r + 2 * m - 1 - a, -1i64) };
    for a in 0..2 * m {
        for b in a + 1..2 * m {
            if !u2[(a, b)].is_zero() {
                let mut v = vec![0; n];
                let (ia, sa) = eps(a);
                let (ib, sb) = eps(b);
                v[ia] += sa;
                v[ib] -= sb;
                if !has(v) {
                    return false;
                }
            }
        }
    }
    true
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct InclusionReport {
    pub trials: usize,
    /// Stabilizer elements tested (zero when the stabilizer is trivial).
    pub elements: usize,
    pub failures: usize,
}

/// For canonical points, every sampled element `u` of the twisted
/// stabilizer of `m` satisfies `u2 u u2^{-1} in U_L`, where `m` lies in
/// the cell of `w = w_M w_L^{-1}` and `u2` is its right unipotent factor.
pub fn stabilizer_inclusion_check<R: Rng + ?Sized>(shape: GroupShape, rng: &mut R, trials: usize, bound: i64) -> Result<InclusionReport> {
    let mut out = InclusionReport { trials, ..Default::default() };
    if StabilizerDescriptor::of(shape).kind != StabilizerKind::SpBlock {
        return Ok(out);
    }
    for _ in 0..trials {
        let (n, f) = crate::sample::resample(rng, |rng| {
            let n = random_canonical(rng, shape, bound);
            let f = decompose_w0(&n)?;
            Ok((n, f))
        })?
        .value;
        let (w, v1, v2) = levi_cell(&f.m1, &f.m2)?;
        let levi = levi_of_w(shape, &w)?;
        for _ in 0..3 {
            let (s1, s2) = random_stabilizer_element(rng, shape, bound);
            let u = levi_embed(&s1, &s2)?;
            let m = levi_embed(&f.m1, &f.m2)?;
            if &(&theta_m_matrix(shape, &u.inverse()?)? * &m) * &u != m {
                return Err(Error::ConstraintViolation { residual: "sampled element does not fix m".into() });
            }
            out.elements += 1;
            let c1 = &(&v1 * &s1) * &v1.inverse()?;
            let c2 = &(&v2 * &s2) * &v2.inverse()?;
            if !in_levi_unipotent(&levi, &c1, &c2) {
                out.failures += 1;
            }
        }
        debug_assert!(n.shape == shape);
    }
    Ok(out)
}

/// `|t|_p`-classes: `t` and `t * unit` give the same membership.
pub fn abs_only_check<R: Rng + ?Sized>(ctx: &PadicContext, shape: GroupShape, rng: &mut R, trials: usize) -> Result<bool> {
    for _ in 0..trials {
        let n = random_boundary_pair(rng, ctx, shape);
        let v = rng.gen_range(-2..=2);
        let t = random_with_valuation(rng, ctx.p, v);
        let t2 = &t * random_with_valuation(rng, ctx.p, 0);
        let y = n.y();
        let a = conjugated_membership(ctx, shape, &t, &n.x, &y, CutoffConvention::LowerLeft)?;
        let b = conjugated_membership(ctx, shape, &t2, &n.x, &y, CutoffConvention::LowerLeft)?;
        if a != b {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Membership at `kappa` implies membership at every larger `kappa`.
pub fn nesting_check<R: Rng + ?Sized>(ctx: &PadicContext, shape: GroupShape, rng: &mut R, trials: usize, kappa_max: i64) -> bool {
    (0..trials).all(|_| {
        let n = random_boundary_pair(rng, ctx, shape);
        let y = n.y();
        let bits: Vec<bool> = (0..=kappa_max)
            .map(|k| nbar_membership_xy(&ctx.with_kappa(k), &n.x, &y, CutoffConvention::LowerLeft))
            .collect();
        bits.windows(2).all(|w| !w[0] || w[1])
    })
}

pub fn abs_value_rat(ctx: &PadicContext, a: PadicAbs) -> Rat {
    match a {
        PadicAbs::Zero => Rat::zero(),
        PadicAbs::Pow(e) => ctx.p_pow(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{int, rat};
    use crate::sample::random_pair;
    use crate::symplectic::{random_gl_unipotent, random_sp_unipotent};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sh(r: usize, m: usize) -> GroupShape {
        GroupShape::new(r, m).unwrap()
    }

    fn ctx(p: u64, kappa: i64) -> PadicContext {
        PadicContext::new(p, kappa, 0, 0).unwrap()
    }

    #[test]
    fn abs_values() {
        assert_eq!(padic_abs(&rat(1, 9), 3).unwrap(), PadicAbs::Pow(2));
        assert_eq!(padic_abs(&int(6), 3).unwrap(), PadicAbs::Pow(-1));
        assert_eq!(padic_abs(&Rat::zero(), 3).unwrap(), PadicAbs::Zero);
        assert_eq!(padic_abs(&int(6), 4), Err(Error::NotPrime(4)));
        assert_eq!(PadicContext::new(1, 0, 0, 0), Err(Error::NotPrime(1)));
        assert!(PadicAbs::Zero < PadicAbs::Pow(-5));
    }

    proptest! {
        #[test]
        fn abs_is_multiplicative(a in -500i64..500, b in 1i64..500, c in -500i64..500, d in 1i64..500) {
            let x = rat(a, b);
            let y = rat(c, d);
            for p in [2u64, 3, 5, 7] {
                let lhs = padic_abs(&(&x * &y), p).unwrap();
                let want = match (padic_abs(&x, p).unwrap(), padic_abs(&y, p).unwrap()) {
                    (PadicAbs::Pow(e), PadicAbs::Pow(f)) => PadicAbs::Pow(e + f),
                    _ => PadicAbs::Zero,
                };
                prop_assert_eq!(lhs, want);
            }
        }
    }

    #[test]
    fn phi_basic() {
        let c = ctx(3, 1);
        assert!(phi_kappa(&c, &Mat::zeros(2, 3), CutoffConvention::LowerLeft));
        let x = Mat::new(1, 1, vec![rat(1, 3)]).unwrap();
        assert!(phi_kappa(&c, &x, CutoffConvention::LowerLeft));
        assert!(phi_kappa(&c, &x, CutoffConvention::Literal));
        let x = Mat::new(1, 1, vec![rat(1, 9)]).unwrap();
        assert!(!phi_kappa(&c, &x, CutoffConvention::LowerLeft));
    }

    #[test]
    fn exponents() {
        // 2 x 3: lower-left corner gets kappa, upper-right the most room.
        let e = |i, j| CutoffConvention::LowerLeft.exponent(2, 3, i, j);
        assert_eq!((e(2, 1), e(1, 1), e(2, 3), e(1, 3)), (1, 2, 3, 4));
        let l = |i, j| CutoffConvention::Literal.exponent(2, 3, i, j);
        assert_eq!((l(2, 1), l(1, 1), l(2, 3), l(1, 3)), (3, 4, 1, 2));
    }

    #[test]
    fn nbar_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(60);
        let s = sh(2, 1);
        let n = random_pair(&mut rng, s, 9);
        let (x, y) = nbar_blocks(s, &n.embed_bar()).unwrap();
        assert_eq!((x, y), (n.x.clone(), n.y()));
        assert!(nbar_blocks(s, &n.embed()).is_err() || n.x.is_zero());
    }

    #[test]
    fn nesting_and_abs_dependence() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for p in [2, 3, 5] {
            let c = PadicContext::new(p, 0, 1, 1).unwrap();
            for s in [sh(1, 1), sh(2, 1), sh(2, 2), sh(3, 1)] {
                assert!(nesting_check(&c, s, &mut rng, 40, 3));
                for k in 0..3 {
                    assert!(abs_only_check(&c.with_kappa(k), s, &mut rng, 40).unwrap());
                }
            }
        }
    }

    #[test]
    fn theta_m_swaps_blocks() {
        let mut rng = ChaCha8Rng::seed_from_u64(62);
        let s = sh(2, 2);
        assert_eq!(
            theta_m(&LeviElement::new(Mat::identity(2), Mat::identity(4)).unwrap()).unwrap().embed(),
            Mat::identity(8)
        );
        for _ in 0..10 {
            let n = random_pair(&mut rng, s, 9);
            let Ok(f) = decompose_w0(&n) else { continue };
            let m = LeviElement::new(f.m1.clone(), f.m2.clone()).unwrap();
            let t = theta_m(&m).unwrap();
            assert_eq!(t.m1, theta_r(&f.m1).unwrap());
            assert_eq!(t.m2, f.m2);
            assert_eq!(theta_m(&t).unwrap(), m);
        }
    }

    #[test]
    fn theta_m_preserves_u_m_and_psi() {
        let mut rng = ChaCha8Rng::seed_from_u64(63);
        for s in [sh(2, 1), sh(3, 2), sh(1, 2)] {
            for _ in 0..10 {
                let u = levi_embed(&random_gl_unipotent(&mut rng, s.r, 5), &random_sp_unipotent(&mut rng, s.m, 5)).unwrap();
                let t = theta_m_matrix(s, &u).unwrap();
                assert!(t.is_upper_unitriangular());
                assert_eq!(
                    crate::symplectic::simple_coordinate_sum(s, &t),
                    crate::symplectic::simple_coordinate_sum(s, &u)
                );
            }
        }
    }

    #[test]
    fn twisted_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(64);
        let s = sh(2, 1);
        let n = crate::sample::resample(&mut rng, |rng| {
            let n = random_pair(rng, s, 9);
            decompose_w0(&n).map(|_| n)
        })
        .unwrap()
        .value;
        assert!(twisted_conjugation_identity(&n, &int(1), &Mat::identity(2), &Mat::identity(2)).unwrap());
        for shape in [sh(2, 1), sh(1, 2), sh(3, 2), sh(2, 3), sh(4, 1)] {
            for _ in 0..10 {
                let n = crate::sample::resample(&mut rng, |rng| {
                    let n = random_pair(rng, shape, 9);
                    decompose_w0(&n).map(|_| n)
                })
                .unwrap()
                .value;
                let u1 = random_gl_unipotent(&mut rng, shape.r, 5);
                let u2 = random_sp_unipotent(&mut rng, shape.m, 5);
                let t = crate::rat::random_nonzero(&mut rng, 7);
                assert!(twisted_conjugation_identity(&n, &t, &u1, &u2).unwrap(), "{shape:?}");
            }
        }
    }

    #[test]
    fn stabilizer_equality() {
        let mut rng = ChaCha8Rng::seed_from_u64(65);
        for shape in [sh(1, 3), sh(2, 3), sh(1, 2), sh(3, 1)] {
            for _ in 0..10 {
                let n = crate::sample::resample(&mut rng, |rng| {
                    let n = random_canonical(rng, shape, 9);
                    decompose_w0(&n).map(|_| n)
                })
                .unwrap()
                .value;
                let (s1, s2) = random_stabilizer_element(&mut rng, shape, 5);
                assert!(stabilizers_agree(&n, &s1, &s2).unwrap());
                let u1 = random_gl_unipotent(&mut rng, shape.r, 5);
                let u2 = random_sp_unipotent(&mut rng, shape.m, 5);
                assert!(stabilizers_agree(&n, &u1, &u2).unwrap());
            }
        }
    }

    #[test]
    fn sampled_u0_respects_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(66);
        for p in [2, 3, 5] {
            for k in 0..3 {
                let c = ctx(p, k);
                for _ in 0..10 {
                    let (u1, u2) = random_u0(&mut rng, &c, sh(3, 2), 0);
                    assert!(in_u0_kappa(&c, &u1) && in_u0_kappa(&c, &u2));
                    assert!(crate::symplectic::is_symplectic(&u2).unwrap());
                }
            }
        }
    }

    #[test]
    fn phi_invariant_under_u0() {
        let mut rng = ChaCha8Rng::seed_from_u64(67);
        let c = ctx(3, 1);
        let rep = phi_invariance_check(&c, sh(2, 1), &mut rng, 100, CutoffConvention::LowerLeft, 0).unwrap();
        assert_eq!(rep.changed, 0);
        assert!(rep.inside > 0 && rep.inside < rep.trials, "{rep:?}");
    }

    #[test]
    fn identity_leaves_phi() {
        let mut rng = ChaCha8Rng::seed_from_u64(68);
        let c = ctx(2, 1);
        let n = random_boundary_pair(&mut rng, &c, sh(2, 2));
        let (x, y) = twisted_action(&n.x, &n.y(), &Mat::identity(2), &Mat::identity(4)).unwrap();
        assert_eq!((x.clone(), y.clone()), (n.x.clone(), n.y()));
    }

    #[test]
    fn literal_convention_breaks_invariance() {
        // (r, m) = (1, 1), kappa = 1, Y = 3: c = 1/3, so |c x_11| = 3 sits
        // inside its ball of radius 9, and a right translation by 1/3 pushes
        // c x_12 to 1/9, outside the radius-3 ball.
        let c = ctx(3, 1);
        let s = sh(1, 1);
        let x = Mat::from_rows(vec![vec![int(1), Rat::zero()]]).unwrap();
        let n = NilpotentPair::from_xz(s, x, Mat::new(1, 1, vec![int(3)]).unwrap()).unwrap();
        let y = n.y();
        assert!(phi_of_m(&c, &n.x, &y, CutoffConvention::Literal).unwrap());
        let u2 = sp_root_element(1, 0, 1, rat(1, 3));
        assert!(in_u0_kappa(&c, &u2));
        let (x2, y2) = twisted_action(&n.x, &y, &Mat::identity(1), &u2).unwrap();
        assert!(!phi_of_m(&c, &x2, &y2, CutoffConvention::Literal).unwrap());
        assert_eq!(
            phi_of_m(&c, &n.x, &y, CutoffConvention::LowerLeft).unwrap(),
            phi_of_m(&c, &x2, &y2, CutoffConvention::LowerLeft).unwrap()
        );
        let mut rng = ChaCha8Rng::seed_from_u64(69);
        let rep = phi_invariance_check(&c, sh(2, 1), &mut rng, 200, CutoffConvention::Literal, 0).unwrap();
        assert!(rep.changed > 0, "{rep:?}");
    }

    #[test]
    fn leaving_u0_can_change_phi() {
        let mut rng = ChaCha8Rng::seed_from_u64(70);
        let rep = phi_invariance_check(&ctx(2, 1), sh(2, 1), &mut rng, 200, CutoffConvention::LowerLeft, 3).unwrap();
        assert!(rep.changed > 0, "{rep:?}");
    }

    #[test]
    fn stabilizer_inclusion() {
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        for shape in GroupShape::all_up_to(6) {
            let rep = stabilizer_inclusion_check(shape, &mut rng, 3, 9).unwrap();
            assert_eq!(rep.failures, 0, "{shape:?}");
            if shape.r < shape.m {
                assert!(rep.elements > 0);
            }
        }
    }
}
