//! The toric part of the orbit space and the projection to the maximal torus
//! of `M` through nested minors of `Y`.

use num_traits::{One, Zero};
use rand::Rng;

use crate::bruhat::{decompose_w0, gl_big_cell, sp_cell};
use crate::error::{Error, Result};
use crate::mat::{structured_minor, Mat, MinorKind};
use crate::orbit::reduce_to_canonical;
use crate::rat::{self, Rat};
use crate::symplectic::{theta_r, GroupShape, NilpotentPair};
use crate::weyl::LeviDescriptor;

/// `T_{X,Z}`: the antidiagonal pivots `x_{r,1}, x_{r-1,2}, ..` and `z_{i,i}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ToricCoordinates {
    pub x_anti: Vec<Rat>,
    pub z_diag: Vec<Rat>,
}

impl ToricCoordinates {
    pub fn of(n: &NilpotentPair) -> Self {
        let r = n.shape.r;
        let k = r.min(n.shape.m);
        ToricCoordinates {
            x_anti: (0..k).map(|i| n.x[(r - 1 - i, i)].clone()).collect(),
            z_diag: n.z.diagonal(),
        }
    }

    /// The point with only these coordinates nonzero.
    pub fn point(&self, shape: GroupShape) -> Result<NilpotentPair> {
        let (r, m) = (shape.r, shape.m);
        if self.z_diag.len() != r || self.x_anti.len() != r.min(m) {
            return Err(Error::DimensionMismatch(format!(
                "{} + {} toric coordinates for {shape:?}",
                self.x_anti.len(),
                self.z_diag.len()
            )));
        }
        let mut x = Mat::zeros(r, 2 * m);
        for (i, v) in self.x_anti.iter().enumerate() {
            x[(r - 1 - i, i)] = v.clone();
        }
        NilpotentPair::from_xz(shape, x, Mat::diag(&self.z_diag))
    }
}

/// Diagonals of `t1` (`r` entries) and `t2 = diag(tbar2, tbar2^{-1} reversed)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusPair {
    pub t1: Vec<Rat>,
    pub t2: Vec<Rat>,
}

impl TorusPair {
    pub fn tbar2(&self) -> &[Rat] {
        &self.t2[..self.t2.len() / 2]
    }

    pub fn abs_eq(&self, other: &TorusPair) -> bool {
        let a = |v: &[Rat]| v.iter().map(num_traits::Signed::abs).collect::<Vec<_>>();
        a(&self.t1) == a(&other.t1) && a(&self.t2) == a(&other.t2)
    }
}

/// Sign attached to the `i`-th torus coordinate (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignConvention {
    /// `(-1)^{r-i}` on `t1` and `(-1)^i` on `tbar2`, as printed.
    Printed,
    /// `(-1)^{r-1}` on every coordinate; agrees with the big-cell factorization.
    Uniform,
}

impl SignConvention {
    fn t1_sign(self, r: usize, i: usize) -> Rat {
        match self {
            SignConvention::Printed => rat::neg_one_pow((r - i) as i64),
            SignConvention::Uniform => rat::neg_one_pow(r as i64 - 1),
        }
    }

    fn t2_sign(self, r: usize, i: usize) -> Rat {
        match self {
            SignConvention::Printed => rat::neg_one_pow(i as i64),
            SignConvention::Uniform => rat::neg_one_pow(r as i64 - 1),
        }
    }
}

fn lower(y: &Mat, i: usize) -> Result<Rat> {
    nonzero(structured_minor(MinorKind::LowerNested { i }, y)?, || format!("det Y_{i}"))
}

fn upper(y: &Mat, i: usize) -> Result<Rat> {
    nonzero(structured_minor(MinorKind::UpperNested { i }, y)?, || format!("det Y^({i})"))
}

fn nonzero(v: Rat, site: impl FnOnce() -> String) -> Result<Rat> {
    if v.is_zero() {
        Err(Error::non_generic(site()))
    } else {
        Ok(v)
    }
}

/// `t1_i = sign * det Y_{r-i} / det Y_{r-i+1}`.
pub fn t1_minor_formula(y: &Mat, signs: SignConvention) -> Result<Vec<Rat>> {
    let r = y.rows();
    (1..=r).map(|i| Ok(signs.t1_sign(r, i) * lower(y, r - i)? / lower(y, r - i + 1)?)).collect()
}

/// Evaluates the minor formulas at a point assumed to lie on the canonical
/// slice (only the antidiagonal `x` entries enter `tbar2`).
pub fn phi_at_canonical(n: &NilpotentPair, signs: SignConvention) -> Result<TorusPair> {
    let (r, m) = (n.shape.r, n.shape.m);
    let y = n.y();
    let t1 = t1_minor_formula(&y, signs)?;
    let mut tbar = vec![Rat::one(); m];
    for i in 1..=r.min(m) {
        let x = nonzero(n.x[(r - i, i - 1)].clone(), || format!("x[{},{}]", r - i + 1, i))?;
        tbar[i - 1] = signs.t2_sign(r, i) * upper(&y, r - i)? / upper(&y, r - i + 1)? * &x * &x;
    }
    Ok(TorusPair { t1, t2: paired(&tbar) })
}

fn paired(tbar: &[Rat]) -> Vec<Rat> {
    let mut t2 = tbar.to_vec();
    t2.extend(tbar.iter().rev().map(|a| a.recip()));
    t2
}

/// `Phi(n)`: reduces to the canonical slice, then applies the minor ratios.
pub fn phi_minor_formula(n: &NilpotentPair, signs: SignConvention) -> Result<TorusPair> {
    let rep = reduce_to_canonical(n)?;
    phi_at_canonical(&rep.point(), signs)
}

/// The torus parts of `m1 = u1 J_r t1 u2` and `m2 = v1 w t2 v2` computed by
/// elimination, with `w` exchanging the outer `min(r, m)` coordinate pairs.
pub fn phi_oracle(n: &NilpotentPair) -> Result<TorusPair> {
    let f = decompose_w0(n)?;
    let t1 = gl_big_cell(&f.m1)?.t_diagonal();
    let t2 = if n.shape.m == 0 {
        Vec::new()
    } else {
        sp_cell(&f.m2, n.shape.r.min(n.shape.m))?.t_diagonal()
    };
    Ok(TorusPair { t1, t2 })
}

/// `u1`, `u2` of `m1 = theta_r(Y) = u1 J_r t1 u2` from crossed minors of `Y`.
pub fn unipotent_entries_formula(n: &NilpotentPair) -> Result<(Mat, Mat)> {
    let r = n.shape.r;
    let y = n.y();
    let mut u1 = Mat::identity(r);
    let mut u2 = Mat::identity(r);
    for i in 1..=r {
        for j in i + 1..=r {
            u1[(i - 1, j - 1)] = structured_minor(MinorKind::Cross { i, j }, &y)? / lower(&y, j - 1)?;
            u2[(i - 1, j - 1)] = structured_minor(MinorKind::CrossPrime { i, j }, &y)? / lower(&y, r - i)?;
        }
    }
    Ok((u1, u2))
}

pub fn unipotent_entries_oracle(n: &NilpotentPair) -> Result<(Mat, Mat)> {
    let f = gl_big_cell(&theta_r(&n.y())?)?;
    Ok((f.u1, f.u2))
}

/// `n(s' X s''^{-1}, s' Z s')` for diagonal `s'` and a symplectic-torus `s''`.
pub fn toric_act(s_prime: &[Rat], s_dprime: &[Rat], n: &NilpotentPair) -> Result<NilpotentPair> {
    let (r, m) = (n.shape.r, n.shape.m);
    if s_prime.len() != r || s_dprime.len() != 2 * m {
        return Err(Error::DimensionMismatch(format!(
            "torus of sizes ({}, {}) on {:?}",
            s_prime.len(),
            s_dprime.len(),
            n.shape
        )));
    }
    if s_prime.iter().any(Zero::is_zero) || !crate::bruhat::is_paired_torus(s_dprime) {
        return Err(Error::ConstraintViolation { residual: "toric element not invertible or not symplectic".into() });
    }
    let sp = Mat::diag(s_prime);
    let sdi = Mat::diag(&s_dprime.iter().map(|a| a.recip()).collect::<Vec<_>>());
    let x = &(&sp * &n.x) * &sdi;
    let z = &(&sp * &n.z) * &sp;
    NilpotentPair::from_xz(n.shape, x, z)
}

/// `t1_i -> t1_i / s'_i^2`, `tbar2_i -> tbar2_i / s''_i^2` for `i <= min(r, m)`.
pub fn toric_transform(phi: &TorusPair, s_prime: &[Rat], s_dprime: &[Rat], r: usize) -> TorusPair {
    let t1 = phi.t1.iter().zip(s_prime).map(|(t, s)| t / (s * s)).collect();
    let k = r.min(phi.t2.len() / 2);
    let tbar: Vec<Rat> =
        phi.tbar2().iter().enumerate().map(|(i, t)| if i < k { t / (&s_dprime[i] * &s_dprime[i]) } else { t.clone() }).collect();
    TorusPair { t1, t2: paired(&tbar) }
}

/// A random invertible diagonal `s'` and symplectic-torus `s''`.
pub fn random_torus<R: Rng + ?Sized>(rng: &mut R, shape: GroupShape, bound: i64) -> (Vec<Rat>, Vec<Rat>) {
    let sp = (0..shape.r).map(|_| rat::random_nonzero(rng, bound)).collect();
    let half: Vec<Rat> = (0..shape.m).map(|_| rat::random_nonzero(rng, bound)).collect();
    (sp, paired(&half))
}

/// `Phi(toric_act(s, n)) == toric_transform(Phi(n), s)`.
pub fn equivariance_holds(n: &NilpotentPair, s_prime: &[Rat], s_dprime: &[Rat]) -> Result<bool> {
    let before = phi_minor_formula(n, SignConvention::Uniform)?;
    let after = phi_minor_formula(&toric_act(s_prime, s_dprime, n)?, SignConvention::Uniform)?;
    Ok(after == toric_transform(&before, s_prime, s_dprime, n.shape.r))
}

fn random_toric<R: Rng + ?Sized>(rng: &mut R, shape: GroupShape, bound: i64) -> ToricCoordinates {
    ToricCoordinates {
        x_anti: (0..shape.r.min(shape.m)).map(|_| rat::random_nonzero(rng, bound)).collect(),
        z_diag: (0..shape.r).map(|_| rat::random_nonzero(rng, bound)).collect(),
    }
}

/// Sheet structure of `Phi` on toric points: flipping the sign of an
/// antidiagonal `x` moves the point but not its image; flipping a `z` moves
/// the image; and two toric points share an image exactly when they agree
/// up to such sign flips. The last is tested on pairs drawn from a small box
/// so that coincidences occur.
pub fn square_cover_check<R: Rng + ?Sized>(shape: GroupShape, rng: &mut R, trials: usize) -> Result<bool> {
    let phi = |c: &ToricCoordinates| phi_at_canonical(&c.point(shape)?, SignConvention::Uniform);
    for _ in 0..trials {
        let c = random_toric(rng, shape, 9);
        let base = phi(&c)?;
        for i in 0..c.x_anti.len() {
            let mut d = c.clone();
            d.x_anti[i] = -d.x_anti[i].clone();
            if d.point(shape)? == c.point(shape)? || phi(&d)? != base {
                return Ok(false);
            }
        }
        let mut d = c.clone();
        d.z_diag[0] = -d.z_diag[0].clone();
        if phi(&d)? == base {
            return Ok(false);
        }
        let e = random_toric(rng, shape, 2);
        let f = random_toric(rng, shape, 2);
        let sq = |v: &[Rat]| v.iter().map(|a| a * a).collect::<Vec<_>>();
        let same_sheet = e.z_diag == f.z_diag && sq(&e.x_anti) == sq(&f.x_anti);
        if same_sheet != (phi(&e)? == phi(&f)?) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `s'` and `s''` built from one scalar per `GL` block of a Levi of `M`:
/// `s_1..s_k` on the blocks of `GL_r`, `s_{k+1}..` on the `GL` blocks inside
/// `Sp_2m`, and `1` on the `Sp_{2m'}` tail.
pub fn levi_torus(levi: &LeviDescriptor, s: &[Rat]) -> Result<(Vec<Rat>, Vec<Rat>)> {
    let gl = levi.gl_blocks();
    let (mp, tail) = levi.sp_blocks();
    if s.len() != gl.len() + mp.len() {
        return Err(Error::DimensionMismatch(format!("{} scalars for {} blocks", s.len(), gl.len() + mp.len())));
    }
    let mut sp = Vec::new();
    for (b, v) in gl.iter().zip(s) {
        sp.extend(std::iter::repeat_n(v.clone(), *b));
    }
    let mut half = Vec::new();
    for (b, v) in mp.iter().zip(&s[gl.len()..]) {
        half.extend(std::iter::repeat_n(v.clone(), *b));
    }
    half.extend(std::iter::repeat_n(Rat::one(), tail));
    Ok((sp, paired(&half)))
}

/// Observed and predicted scale factors of `det m1` and `y*_{rr} / det Y`
/// under one toric transformation.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarSample {
    pub det_observed: Rat,
    /// `prod_{i<=k} s_i^2`.
    pub det_claimed: Rat,
    /// `prod_i s_i^{-2 r_i}`.
    pub det_derived: Rat,
    pub yrr_observed: Rat,
    /// `s_k^{-2}`.
    pub yrr_claimed: Rat,
    /// `(s_1 s_k)^{-1}`.
    pub yrr_derived: Rat,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScalarSummary {
    pub trials: usize,
    pub det_claimed_exact: usize,
    pub det_claimed_abs: usize,
    pub det_derived_exact: usize,
    pub yrr_claimed_exact: usize,
    pub yrr_claimed_abs: usize,
    pub yrr_derived_exact: usize,
    /// One line per sample where a claimed factor failed.
    pub log: Vec<String>,
}

impl ScalarSummary {
    /// Both claimed factors hold in absolute value on every sample.
    pub fn claimed_holds_abs(&self) -> bool {
        self.det_claimed_abs == self.trials && self.yrr_claimed_abs == self.trials
    }

    pub fn derived_holds(&self) -> bool {
        self.det_derived_exact == self.trials && self.yrr_derived_exact == self.trials
    }
}

fn det_m1_and_yrr(n: &NilpotentPair) -> Result<(Rat, Rat)> {
    let y = n.y();
    let r = n.shape.r;
    let det = nonzero(y.det()?, || "det Y".into())?;
    let adj = y.adjugate()?;
    Ok((det.recip(), &adj[(r - 1, r - 1)] / &det))
}

pub fn scalar_sample(n: &NilpotentPair, levi: &LeviDescriptor, s: &[Rat]) -> Result<ScalarSample> {
    if levi.shape != n.shape {
        return Err(Error::DimensionMismatch(format!("Levi of {:?} against {:?}", levi.shape, n.shape)));
    }
    let (sp, sdp) = levi_torus(levi, s)?;
    let acted = toric_act(&sp, &sdp, n)?;
    let (d0, y0) = det_m1_and_yrr(n)?;
    let (d1, y1) = det_m1_and_yrr(&acted)?;
    let gl = levi.gl_blocks();
    let k = gl.len();
    let det_claimed = s[..k].iter().fold(Rat::one(), |acc, v| acc * v * v);
    let det_derived = gl.iter().zip(s).fold(Rat::one(), |acc, (b, v)| acc * rat::pow(v, -2 * *b as i64));
    Ok(ScalarSample {
        det_observed: d1 / d0,
        det_claimed,
        det_derived,
        yrr_observed: nonzero(y1, || "y*_rr".into())? / nonzero(y0, || "y*_rr".into())?,
        yrr_claimed: rat::pow(&s[k - 1], -2),
        yrr_derived: (&s[0] * &s[k - 1]).recip(),
    })
}

/// Tests the transformation laws of `det m1` and `y*_{rr} / det Y'` under
/// the toric element of `levi` with scalars `s`, on `trials` normalized
/// canonical points.
pub fn stability_scalar_check<R: Rng + ?Sized>(
    levi: &LeviDescriptor,
    s: &[Rat],
    rng: &mut R,
    trials: usize,
    bound: i64,
) -> Result<ScalarSummary> {
    let shape = levi.shape;
    let mut out = ScalarSummary { trials, ..Default::default() };
    let abs = |x: &Rat| num_traits::Signed::abs(x);
    for t in 0..trials {
        let sample = crate::sample::resample(rng, |rng| {
            let n = normalized_point(rng, shape, bound)?;
            scalar_sample(&n, levi, s)
        })?
        .value;
        let c = |a: &Rat, b: &Rat| (a == b) as usize;
        out.det_claimed_exact += c(&sample.det_observed, &sample.det_claimed);
        out.det_claimed_abs += c(&abs(&sample.det_observed), &abs(&sample.det_claimed));
        out.det_derived_exact += c(&sample.det_observed, &sample.det_derived);
        out.yrr_claimed_exact += c(&sample.yrr_observed, &sample.yrr_claimed);
        out.yrr_claimed_abs += c(&abs(&sample.yrr_observed), &abs(&sample.yrr_claimed));
        out.yrr_derived_exact += c(&sample.yrr_observed, &sample.yrr_derived);
        if sample.det_observed != sample.det_claimed || sample.yrr_observed != sample.yrr_claimed {
            out.log.push(format!(
                "sample {t}: det m1 factor {} (claimed {}), y*_rr/det factor {} (claimed {})",
                rat::to_string(&sample.det_observed),
                rat::to_string(&sample.det_claimed),
                rat::to_string(&sample.yrr_observed),
                rat::to_string(&sample.yrr_claimed),
            ));
        }
    }
    Ok(out)
}

/// A canonical point with `x_{r,1} = 1` (for `m >= 1`).
pub fn normalized_point<R: Rng + ?Sized>(rng: &mut R, shape: GroupShape, bound: i64) -> Result<NilpotentPair> {
    let n = crate::orbit::random_canonical(rng, shape, bound);
    if shape.m == 0 {
        return Ok(n);
    }
    let t = n.x[(shape.r - 1, 0)].recip();
    NilpotentPair::from_xz(shape, n.x.scale(&t), n.z.scale(&(&t * &t)))
}
