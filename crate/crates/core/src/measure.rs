//! Invariant-measure exponents on the orbit slice and their exact Jacobian checks.

use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dual::{jacobian_exact, DualRat};
use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::orbit::{canonical_mask, inner_sp_roots, orbit_dims, CaseTag};
use crate::rat::{self, Rat};
use crate::symplectic::{sp_root_element, sp_root_positions, y_from_z, GroupShape, NilpotentPair};

/// Exponents keyed by 1-based coordinates, in row-major mask order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasureExponents {
    pub keys: Vec<(usize, usize)>,
    pub exps: Vec<i64>,
}

impl MeasureExponents {
    pub fn get(&self, key: (usize, usize)) -> Option<i64> {
        self.keys.iter().position(|&k| k == key).map(|i| self.exps[i])
    }

    /// `prod |m_{ij}|^{e_ij}` over the keys.
    pub fn monomial_abs(&self, m: &Mat) -> Rat {
        self.keys
            .iter()
            .zip(&self.exps)
            .fold(Rat::one(), |acc, (&(i, j), &e)| acc * rat::pow(&m[(i - 1, j - 1)].abs(), e))
    }

    pub fn total(&self) -> i64 {
        self.exps.iter().sum()
    }
}

fn x_exponent_table(shape: GroupShape) -> Vec<((usize, usize), i64)> {
    let (r, m) = (shape.r as i64, shape.m as i64);
    let mut v: Vec<((usize, usize), i64)> = (0..r.min(m))
        .map(|k| (((r - k) as usize, (1 + k) as usize), r + 2 * m - 2 - 3 * k))
        .collect();
    if r > m {
        let a = r - m;
        v.extend((0..a.min(m)).map(|l| (((a - l) as usize, (m + 1 + l) as usize), a - 1 - l)));
    }
    v
}

/// Exponents of `d mu_X` and `d mu_Z`. With `normalized`, the `x_{r,1}`
/// coordinate is dropped.
pub fn measure_exponents(shape: GroupShape, normalized: bool) -> (MeasureExponents, MeasureExponents) {
    let (r, m) = (shape.r, shape.m);
    let (mx, mz) = canonical_mask(shape);
    let table = x_exponent_table(shape);
    let mut ex = MeasureExponents { keys: Vec::new(), exps: Vec::new() };
    for (i, row) in mx.iter().enumerate() {
        for (j, &on) in row.iter().enumerate() {
            let key = (i + 1, j + 1);
            if !on || (normalized && key == (r, 1) && m > 0) {
                continue;
            }
            ex.keys.push(key);
            ex.exps.push(table.iter().find(|(k, _)| *k == key).map_or(0, |(_, e)| *e));
        }
    }
    let b = r.saturating_sub(2 * m);
    let mut ez = MeasureExponents { keys: Vec::new(), exps: Vec::new() };
    for (i, row) in mz.iter().enumerate() {
        for (j, &on) in row.iter().enumerate() {
            if on {
                ez.keys.push((i + 1, j + 1));
                ez.exps.push(if i == j && i < b { i as i64 } else { 0 });
            }
        }
    }
    (ex, ez)
}

/// Coordinates of the orbit map `(u1, u2, R_X, R_Z) -> (X, Z)`, in the order
/// used for the Jacobian columns: `GL_r` roots, `Sp_2m` roots without the
/// stabilizer, then the mask coordinates of `X` and of `Z` (all 0-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamLayout {
    pub gl: Vec<(usize, usize)>,
    pub sp: Vec<(usize, usize)>,
    pub x: Vec<(usize, usize)>,
    pub z: Vec<(usize, usize)>,
}

impl ParamLayout {
    pub fn of(shape: GroupShape) -> Self {
        let (r, m) = (shape.r, shape.m);
        let gl = (0..r).flat_map(|i| (i + 1..r).map(move |j| (i, j))).collect();
        let inner = inner_sp_roots(shape);
        let sp = sp_root_positions(m).into_iter().filter(|p| !inner.contains(p)).collect();
        let (mx, mz) = canonical_mask(shape);
        let x = (0..r).flat_map(|i| (0..2 * m).map(move |j| (i, j))).filter(|&(i, j)| mx[i][j]).collect();
        let z = (0..r).flat_map(|i| (i..r).map(move |j| (i, j))).filter(|&(i, j)| mz[i][j]).collect();
        ParamLayout { gl, sp, x, z }
    }

    pub fn len(&self) -> usize {
        self.gl.len() + self.sp.len() + self.x.len() + self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Flattened output coordinates: all of `X`, then the upper triangle of `Z`.
fn flatten_xz(x: &Mat<DualRat>, z: &Mat<DualRat>) -> Vec<DualRat> {
    let mut out: Vec<DualRat> = x.entries().to_vec();
    for i in 0..z.rows() {
        for j in i..z.cols() {
            out.push(z[(i, j)].clone());
        }
    }
    out
}

/// Exact Jacobian of the orbit map at `(u1, u2) = (I, I)` and the given slice point.
pub fn orbit_jacobian(point: &NilpotentPair) -> Result<Mat> {
    let shape = point.shape;
    let (r, m) = (shape.r, shape.m);
    let layout = ParamLayout::of(shape);
    let mut base = vec![Rat::zero(); layout.gl.len() + layout.sp.len()];
    base.extend(layout.x.iter().map(|&(i, j)| point.x[(i, j)].clone()));
    base.extend(layout.z.iter().map(|&(i, j)| point.z[(i, j)].clone()));

    let f = |v: &[DualRat]| -> Result<Vec<DualRat>> {
        if v.len() != layout.len() {
            return Err(Error::DimensionMismatch(format!("{} parameters, expected {}", v.len(), layout.len())));
        }
        let mut it = v.iter().cloned();
        let mut u1 = Mat::<DualRat>::identity(r);
        for &(i, j) in &layout.gl {
            u1[(i, j)] = it.next().expect("length checked");
        }
        let sp_params: Vec<DualRat> = (0..layout.sp.len()).map(|_| it.next().expect("length checked")).collect();
        let mut x = Mat::<DualRat>::zeros(r, 2 * m);
        for &(i, j) in &layout.x {
            x[(i, j)] = it.next().expect("length checked");
        }
        let mut z = Mat::<DualRat>::zeros(r, r);
        for &(i, j) in &layout.z {
            let val = it.next().expect("length checked");
            z[(i, j)] = val.clone();
            z[(j, i)] = val;
        }
        let mut u2inv = Mat::<DualRat>::identity(2 * m);
        for (&(a, b), c) in layout.sp.iter().zip(&sp_params).rev() {
            u2inv = &u2inv * &sp_root_element(m, a, b, -c.clone());
        }
        let xo = &(&u1 * &x) * &u2inv;
        let zo = &(&u1 * &z) * &u1.transpose();
        Ok(flatten_xz(&xo, &zo))
    };
    jacobian_exact(f, &base)
}

#[derive(Debug, Clone, PartialEq)]
pub struct JacobianCheck {
    pub det: Rat,
    pub monomial: Rat,
    /// `det / monomial`; its sign is the only thing discarded.
    pub ratio: Rat,
}

impl JacobianCheck {
    pub fn matches(&self) -> bool {
        self.det.abs() == self.monomial
    }
}

/// `|det J|` of the orbit map against the tabulated monomial.
pub fn verify_jacobian_monomial(point: &NilpotentPair) -> Result<JacobianCheck> {
    let jac = orbit_jacobian(point)?;
    if !jac.is_square() {
        return Err(Error::NotSquare { rows: jac.rows(), cols: jac.cols() });
    }
    let det = jac.det()?;
    if det.is_zero() {
        return Err(Error::non_generic("orbit Jacobian is singular"));
    }
    let (ex, ez) = measure_exponents(point.shape, false);
    let monomial = ex.monomial_abs(&point.x) * ez.monomial_abs(&point.z);
    let ratio = &det / &monomial;
    Ok(JacobianCheck { det, monomial, ratio })
}

/// Check of the normalized measure at a slice point with `x_{r,1} != 0`:
/// with `t = x_{r,1}`, the map `(t, X', Z') -> (t X', t^2 Z')` has Jacobian
/// `|t|^{(d_X - 1) + 2 d_Z}`, and
/// `d mu(X, Z) * |det| = |t|^{r(2m+r+1) - 1} d mu'(X', Z')`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizationCheck {
    pub jacobian_det: Rat,
    pub lhs: Rat,
    pub rhs: Rat,
}

impl NormalizationCheck {
    pub fn matches(&self) -> bool {
        self.lhs == self.rhs
    }
}

pub fn normalization_check(point: &NilpotentPair) -> Result<NormalizationCheck> {
    let shape = point.shape;
    let (r, m) = (shape.r, shape.m);
    if m == 0 {
        return Err(Error::InvalidShape("normalization needs m >= 1".into()));
    }
    let t = point.x[(r - 1, 0)].clone();
    if t.is_zero() {
        return Err(Error::non_generic("x_{r,1} = 0"));
    }
    let layout = ParamLayout::of(shape);
    let xkeys: Vec<(usize, usize)> = layout.x.iter().copied().filter(|&k| k != (r - 1, 0)).collect();
    let tinv = t.recip();
    let xp = point.x.scale(&tinv);
    let zp = point.z.scale(&(&tinv * &tinv));
    let mut base = vec![t.clone()];
    base.extend(xkeys.iter().map(|&(i, j)| xp[(i, j)].clone()));
    base.extend(layout.z.iter().map(|&(i, j)| zp[(i, j)].clone()));

    let f = |v: &[DualRat]| -> Result<Vec<DualRat>> {
        let tt = v[0].clone();
        let mut out = vec![tt.clone()];
        out.extend(v[1..1 + xkeys.len()].iter().map(|x| tt.clone() * x.clone()));
        out.extend(v[1 + xkeys.len()..].iter().map(|z| tt.clone() * tt.clone() * z.clone()));
        Ok(out)
    };
    let jacobian_det = jacobian_exact(f, &base)?.det()?;

    let (ex, ez) = measure_exponents(shape, false);
    let (exn, ezn) = measure_exponents(shape, true);
    let lhs = ex.monomial_abs(&point.x) * ez.monomial_abs(&point.z) * jacobian_det.abs();
    let power = rho_exponent(shape) - 1;
    let rhs = rat::pow(&t.abs(), power) * exn.monomial_abs(&xp) * ezn.monomial_abs(&zp);
    Ok(NormalizationCheck { jacobian_det, lhs, rhs })
}

fn rho_exponent(shape: GroupShape) -> i64 {
    crate::symplectic::rho_pairing(shape).exponent
}

/// `|det|` of `Z -> Y = Z J_r + X theta(X)/2` from the upper triangle of `Z`
/// to the entries `y_{ij}` with `i + j <= r - 1` (0-based).
pub fn xz_xy_jacobian(x: &Mat, r: usize) -> Result<Rat> {
    let zkeys: Vec<(usize, usize)> = (0..r).flat_map(|i| (i..r).map(move |j| (i, j))).collect();
    let ykeys: Vec<(usize, usize)> = (0..r).flat_map(|i| (0..r - i).map(move |j| (i, j))).collect();
    let x0 = x.clone();
    let f = |v: &[DualRat]| -> Result<Vec<DualRat>> {
        let mut z = Mat::zeros(r, r);
        for (&(i, j), val) in zkeys.iter().zip(v) {
            z[(i, j)] = val.clone();
            z[(j, i)] = val.clone();
        }
        let zv = crate::dual::values(&z);
        let zd = crate::dual::derivs(&z);
        let yv = y_from_z(&x0, &zv)?;
        let yd = zd.checked_mul(&crate::symplectic::j_form(r))?;
        Ok(ykeys.iter().map(|&(i, j)| DualRat::new(yv[(i, j)].clone(), yd[(i, j)].clone())).collect())
    };
    let base = vec![Rat::zero(); zkeys.len()];
    Ok(jacobian_exact(f, &base)?.det()?.abs())
}

pub fn xz_xy_change_of_variables_check<R: Rng + ?Sized>(shape: GroupShape, rng: &mut R, trials: usize, bound: i64) -> Result<bool> {
    for _ in 0..trials {
        let x = Mat::random(rng, shape.r, 2 * shape.m, bound);
        if !xz_xy_jacobian(&x, shape.r)?.is_one() {
            return Ok(false);
        }
    }
    Ok(true)
}

fn tri(n: i64) -> i64 {
    n * (n + 1) / 2
}

/// One of the three power identities, evaluated literally.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PowerIdentity {
    pub r: i64,
    pub m: i64,
    pub case: CaseTag,
    pub lhs: i64,
    pub rhs: i64,
}

impl PowerIdentity {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

pub fn power_identity(shape: GroupShape) -> PowerIdentity {
    let case = CaseTag::of(shape);
    let (r, m) = (shape.r as i64, shape.m as i64);
    let head = r * (r + 2 * m + 1) - 1;
    let antidiag = |upto: i64| (1..=upto).map(|k| (r + 2 * m - 2 - 3 * k) + 1).sum::<i64>();
    let lhs = match case {
        CaseTag::RLeM => head - antidiag(r - 1) - tri(r - 1) - 2 * tri(r),
        CaseTag::MLtRLt2M => {
            head - antidiag(m - 1)
                - (1..=r - m - 1).map(|k| (r - m - k) + 1).sum::<i64>()
                - ((r - m) * (r - m) - (r - m - 1))
                - (3 * r - 2 * m - 1) * (2 * m - r) / 2
                - 2 * tri(r)
        }
        CaseTag::RGe2M => {
            head - antidiag(m - 1)
                - (1..=m).map(|k| (r - m - k) + 1).sum::<i64>()
                - m * (m - 1)
                - 2 * (1..=r - 2 * m).map(|k| (k - 1) + 2).sum::<i64>()
                - 2 * (tri(r) - (r - 2 * m) * (r - 2 * m - 1) / 2)
        }
    };
    PowerIdentity { r, m, case, lhs, rhs: r + 2 * m - 2 }
}

/// All identities for `1 <= r <= r_max`, `1 <= m <= m_max`.
pub fn power_identities(r_max: usize, m_max: usize) -> Vec<PowerIdentity> {
    let mut v = Vec::new();
    for r in 1..=r_max {
        for m in 1..=m_max {
            v.push(power_identity(GroupShape { r, m }));
        }
    }
    v
}

pub fn all_power_identities_hold(r_max: usize, m_max: usize) -> bool {
    power_identities(r_max, m_max).iter().all(PowerIdentity::holds)
}

/// `sum k + 2 sum l + (d_X - 1) + 2 d_Z = r(2m + r + 1) - 1` with the
/// exponents of [`measure_exponents`].
pub fn exponent_bookkeeping_holds(shape: GroupShape) -> bool {
    let (ex, ez) = measure_exponents(shape, false);
    let (dx, dz) = orbit_dims(shape);
    ex.total() + 2 * ez.total() + (dx as i64 - 1) + 2 * dz as i64 == rho_exponent(shape) - 1
}
