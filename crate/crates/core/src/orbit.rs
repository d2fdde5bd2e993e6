//! Canonical representatives for the action of `U_M` on `N`.
//!
//! The action is `(X, Z) -> (u1 X u2^{-1}, u1 Z tu1)`. Masks and pivots are
//! 0-based; doc comments quote 1-based positions where that reads better.

use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::rat::{self, Rat};
use crate::sample::random_symmetric;
use crate::symplectic::{
    act_levi, random_gl_unipotent, random_sp_unipotent, sp_root_element, sp_root_positions, GroupShape,
    NilpotentPair,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseTag {
    /// `r <= m`
    RLeM,
    /// `m < r < 2m`
    MLtRLt2M,
    /// `r >= 2m`
    RGe2M,
}

impl CaseTag {
    pub fn of(shape: GroupShape) -> CaseTag {
        let (r, m) = (shape.r, shape.m);
        if r <= m {
            CaseTag::RLeM
        } else if r < 2 * m {
            CaseTag::MLtRLt2M
        } else {
            CaseTag::RGe2M
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            CaseTag::RLeM => "r<=m",
            CaseTag::MLtRLt2M => "m<r<2m",
            CaseTag::RGe2M => "r>=2m",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StabilizerKind {
    Trivial,
    /// `U_{Sp_{2(m-r)}}` on the middle coordinates.
    SpBlock,
    /// `U_{GL_{r-2m}}` fixing `R_X`, acting on the leading block of `Z`.
    GlBlock,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizerDescriptor {
    pub kind: StabilizerKind,
    pub block_size: usize,
}

impl StabilizerDescriptor {
    pub fn of(shape: GroupShape) -> Self {
        let (r, m) = (shape.r, shape.m);
        if r < m {
            StabilizerDescriptor { kind: StabilizerKind::SpBlock, block_size: 2 * (m - r) }
        } else if r > 2 * m {
            StabilizerDescriptor { kind: StabilizerKind::GlBlock, block_size: r - 2 * m }
        } else {
            StabilizerDescriptor { kind: StabilizerKind::Trivial, block_size: 0 }
        }
    }

    /// Dimension of the stabilizer of a generic point of `N`.
    pub fn point_stabilizer_dim(&self) -> usize {
        match self.kind {
            StabilizerKind::SpBlock => (self.block_size / 2).pow(2),
            _ => 0,
        }
    }
}

pub fn orbit_dims(shape: GroupShape) -> (usize, usize) {
    let (r, m) = (shape.r, shape.m);
    let dx = match CaseTag::of(shape) {
        CaseTag::RLeM => r * (r + 1) / 2,
        CaseTag::MLtRLt2M => 2 * r * m - r * (r - 1) / 2 - m * m,
        CaseTag::RGe2M => m * (m + 1),
    };
    let dz = if r < 2 * m { r * (r + 1) / 2 } else { (2 * m + 1) * (r - m) };
    (dx, dz)
}

pub type Mask = Vec<Vec<bool>>;

pub fn popcount(mask: &Mask) -> usize {
    mask.iter().flatten().filter(|&&b| b).count()
}

/// Pivot positions of `R_X` in elimination order.
pub fn x_pivots(shape: GroupShape) -> Vec<(usize, usize)> {
    let (r, m) = (shape.r, shape.m);
    let mut v: Vec<(usize, usize)> = (0..r.min(m)).map(|k| (r - 1 - k, k)).collect();
    if r > m {
        let a = r - m;
        v.extend((0..a.min(m)).map(|l| (a - 1 - l, m + l)));
    }
    v
}

/// Diagonal `Z` pivots `z_{q,q}` (0-based `q`) used when `r > 2m`.
pub fn z_pivots(shape: GroupShape) -> Vec<usize> {
    let (r, m) = (shape.r, shape.m);
    if r > 2 * m {
        (1..r - 2 * m).rev().collect()
    } else {
        Vec::new()
    }
}

/// `R_X` mask and the upper-triangular `R_Z` mask.
pub fn canonical_mask(shape: GroupShape) -> (Mask, Mask) {
    let (r, m) = (shape.r, shape.m);
    let mut mx = vec![vec![false; 2 * m]; r];
    for k in 0..r.min(m) {
        let p = r - 1 - k;
        mx[p][k] = true;
        mx[p][2 * m - k..].fill(true);
    }
    if r > m {
        let a = r - m;
        for l in 0..a.min(m) {
            for row in &mut mx[a - 1 - l..a] {
                row[m + l] = true;
            }
        }
        if a < m {
            for j in m + a..2 * m {
                for row in mx.iter_mut().take(a) {
                    row[j] = true;
                }
            }
        }
    }
    let b = r.saturating_sub(2 * m);
    let mz = (0..r).map(|i| (0..r).map(|j| i <= j && (i == j || j >= b)).collect()).collect();
    (mx, mz)
}

/// Whether `X`, `Z` vanish off the canonical mask.
pub fn conforms_to_mask(shape: GroupShape, x: &Mat, z: &Mat) -> bool {
    let (mx, mz) = canonical_mask(shape);
    let x_ok = (0..x.rows()).all(|i| (0..x.cols()).all(|j| mx[i][j] || x[(i, j)].is_zero()));
    let z_ok = (0..z.rows()).all(|i| (0..z.cols()).all(|j| mz[i.min(j)][i.max(j)] || z[(i, j)].is_zero()));
    x_ok && z_ok
}

#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalOrbitRep {
    pub shape: GroupShape,
    pub case: CaseTag,
    pub rx: Mat,
    pub rz: Mat,
    /// `u1 X u2^{-1} = R_X` and `u1 Z tu1 = R_Z`.
    pub u1: Mat,
    pub u2: Mat,
    pub stabilizer: StabilizerDescriptor,
}

impl CanonicalOrbitRep {
    pub fn point(&self) -> NilpotentPair {
        NilpotentPair { shape: self.shape, x: self.rx.clone(), z: self.rz.clone() }
    }
}

struct Reducer {
    x: Mat,
    z: Mat,
    u1: Mat,
    u2: Mat,
}

impl Reducer {
    /// Left multiplication by `I - f E_{i,p}` (`i < p`).
    fn row_op(&mut self, i: usize, p: usize, f: &Rat) {
        let sub_row = |m: &mut Mat| {
            for j in 0..m.cols() {
                let v = &m[(i, j)] - &(f * &m[(p, j)]);
                m[(i, j)] = v;
            }
        };
        sub_row(&mut self.x);
        sub_row(&mut self.u1);
        sub_row(&mut self.z);
        let r = self.z.rows();
        for k in 0..r {
            let v = &self.z[(k, i)] - &(f * &self.z[(k, p)]);
            self.z[(k, i)] = v;
        }
    }

    /// `X -> X g^{-1}`, `u2 -> g u2` for the root element `g = x_(a,b)(c)`.
    fn sp_op(&mut self, m: usize, a: usize, b: usize, c: &Rat) {
        let g = sp_root_element(m, a, b, c.clone());
        let ginv = sp_root_element(m, a, b, -c.clone());
        self.x = &self.x * &ginv;
        self.u2 = &g * &self.u2;
    }
}

/// Inductive elimination to the canonical representative.
pub fn reduce_to_canonical(n: &NilpotentPair) -> Result<CanonicalOrbitRep> {
    let shape = n.shape;
    let (r, m) = (shape.r, shape.m);
    let mut st = Reducer { x: n.x.clone(), z: n.z.clone(), u1: Mat::identity(r), u2: Mat::identity(2 * m) };

    for k in 0..r.min(m) {
        let (p, c, cp) = (r - 1 - k, k, 2 * m - 1 - k);
        let piv = st.x[(p, c)].clone();
        if piv.is_zero() {
            return Err(Error::non_generic(format!("pivot x[{},{}] at step {}", p + 1, c + 1, k + 1)));
        }
        for i in 0..p {
            if !st.x[(i, c)].is_zero() {
                let f = &st.x[(i, c)] / &piv;
                st.row_op(i, p, &f);
            }
        }
        for j in c + 1..=cp {
            if !st.x[(p, j)].is_zero() {
                let t = &st.x[(p, j)] / &piv;
                st.sp_op(m, c, j, &t);
            }
        }
    }

    if r > m {
        let a = r - m;
        for l in 0..a.min(m) {
            let (p, c) = (a - 1 - l, m + l);
            let piv = st.x[(p, c)].clone();
            if piv.is_zero() {
                return Err(Error::non_generic(format!("pivot x[{},{}] at step {}", p + 1, c + 1, m + l + 1)));
            }
            for i in 0..p {
                if !st.x[(i, c)].is_zero() {
                    let f = &st.x[(i, c)] / &piv;
                    st.row_op(i, p, &f);
                }
            }
        }
    }

    for q in z_pivots(shape) {
        let piv = st.z[(q, q)].clone();
        if piv.is_zero() {
            return Err(Error::non_generic(format!("pivot z[{},{}]", q + 1, q + 1)));
        }
        for i in 0..q {
            if !st.z[(i, q)].is_zero() {
                let f = &st.z[(i, q)] / &piv;
                st.row_op(i, q, &f);
            }
        }
    }

    Ok(CanonicalOrbitRep {
        shape,
        case: CaseTag::of(shape),
        rx: st.x,
        rz: st.z,
        u1: st.u1,
        u2: st.u2,
        stabilizer: StabilizerDescriptor::of(shape),
    })
}

/// A random point on the canonical slice with nonzero pivots.
pub fn random_canonical<R: Rng + ?Sized>(rng: &mut R, shape: GroupShape, bound: i64) -> NilpotentPair {
    let (r, m) = (shape.r, shape.m);
    let (mx, mz) = canonical_mask(shape);
    let pivots = x_pivots(shape);
    let x = Mat::from_fn(r, 2 * m, |i, j| {
        if pivots.contains(&(i, j)) {
            rat::random_nonzero(rng, bound)
        } else if mx[i][j] {
            rat::random(rng, bound)
        } else {
            Rat::zero()
        }
    });
    let mut z = random_symmetric(rng, r, bound);
    for i in 0..r {
        for j in 0..r {
            if !mz[i.min(j)][i.max(j)] {
                z[(i, j)] = Rat::zero();
            }
        }
        if z[(i, i)].is_zero() {
            z[(i, i)] = rat::random_nonzero(rng, bound);
        }
    }
    NilpotentPair::from_xz(shape, x, z).expect("symmetric by construction")
}

/// Inner roots of `Sp_2m` spanning the `U_{Sp_{2(m-r)}}` stabilizer.
pub fn inner_sp_roots(shape: GroupShape) -> Vec<(usize, usize)> {
    let (r, m) = (shape.r, shape.m);
    if r >= m {
        return Vec::new();
    }
    sp_root_positions(m).into_iter().filter(|&(a, b)| a >= r && b <= 2 * m - 1 - r).collect()
}

/// A random element of the asserted stabilizer block, as `(u1, u2)`.
pub fn random_stabilizer_element<R: Rng + ?Sized>(rng: &mut R, shape: GroupShape, bound: i64) -> (Mat, Mat) {
    let (r, m) = (shape.r, shape.m);
    let desc = StabilizerDescriptor::of(shape);
    let mut u1 = Mat::identity(r);
    let mut u2 = Mat::identity(2 * m);
    match desc.kind {
        StabilizerKind::SpBlock => {
            for (a, b) in inner_sp_roots(shape) {
                u2 = &u2 * &sp_root_element(m, a, b, rat::random(rng, bound));
            }
        }
        StabilizerKind::GlBlock => {
            let b = desc.block_size;
            for i in 0..b {
                for j in i + 1..b {
                    u1[(i, j)] = rat::random(rng, bound);
                }
            }
        }
        StabilizerKind::Trivial => {}
    }
    (u1, u2)
}

/// (a) elements of the asserted stabilizer block fix the point (for the
/// `GL` block: fix `R_X`); (b) random nontrivial `(u1, u2)` move the point
/// unless the stabilizer is the `Sp` block.
pub fn stabilizer_check<R: Rng + ?Sized>(rep: &CanonicalOrbitRep, rng: &mut R, samples: usize, bound: i64) -> Result<bool> {
    let shape = rep.shape;
    let point = rep.point();
    for _ in 0..samples {
        let (u1, u2) = random_stabilizer_element(rng, shape, bound);
        let moved = act_levi(&point, &u1, &u2)?;
        let fixed = match rep.stabilizer.kind {
            StabilizerKind::GlBlock => moved.x == point.x,
            _ => moved == point,
        };
        if !fixed {
            return Ok(false);
        }
        if rep.stabilizer.kind != StabilizerKind::SpBlock {
            let u1 = random_gl_unipotent(rng, shape.r, bound);
            let u2 = random_sp_unipotent(rng, shape.m, bound);
            let trivial = u1.is_diagonal() && u2.is_diagonal();
            if !trivial && act_levi(&point, &u1, &u2)? == point {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `x_{r,1}` of a representative (requires `m >= 1`).
pub fn leading_pivot(rep: &CanonicalOrbitRep) -> Result<Rat> {
    if rep.shape.m == 0 {
        return Err(Error::InvalidShape("no x_{r,1} when m = 0".into()));
    }
    Ok(rep.rx[(rep.shape.r - 1, 0)].clone())
}

/// `R_X -> R_X / x_{r,1}`, `R_Z -> R_Z / x_{r,1}^2`; returns the scaled
/// representative and `x_{r,1}`.
pub fn zm0_normalize(rep: &CanonicalOrbitRep) -> Result<(CanonicalOrbitRep, Rat)> {
    let t = leading_pivot(rep)?;
    if t.is_zero() {
        return Err(Error::non_generic("x_{r,1} = 0"));
    }
    let (a, rx, rz) = scale_by_alpha(rep, &t.recip());
    debug_assert!(a.is_one());
    Ok((CanonicalOrbitRep { rx, rz, ..rep.clone() }, t))
}

/// `(t R_X, t^2 R_Z)`, the effect of conjugating by `alpha^vee(t)`.
fn scale_by_alpha(rep: &CanonicalOrbitRep, t: &Rat) -> (Rat, Mat, Mat) {
    let rx = rep.rx.scale(t);
    let rz = rep.rz.scale(&(t * t));
    let lead = if rep.shape.m > 0 { rx[(rep.shape.r - 1, 0)].clone() } else { Rat::one() };
    (lead, rx, rz)
}

pub fn alpha_act(rep: &CanonicalOrbitRep, t: &Rat) -> CanonicalOrbitRep {
    let (_, rx, rz) = scale_by_alpha(rep, t);
    CanonicalOrbitRep { rx, rz, ..rep.clone() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::int;
    use crate::sample::random_pair;
    use crate::symplectic::{alpha_coweight, embed_n};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sh(r: usize, m: usize) -> GroupShape {
        GroupShape::new(r, m).unwrap()
    }

    fn reduce_generic(rng: &mut ChaCha8Rng, shape: GroupShape) -> (NilpotentPair, CanonicalOrbitRep) {
        loop {
            let n = random_pair(rng, shape, 10);
            if let Ok(rep) = reduce_to_canonical(&n) {
                return (n, rep);
            }
        }
    }

    #[test]
    fn dims_examples() {
        assert_eq!(orbit_dims(sh(2, 3)), (3, 3));
        assert_eq!(orbit_dims(sh(3, 2)), (5, 6));
        assert_eq!(orbit_dims(sh(5, 2)), (6, 15));
    }

    #[test]
    fn case_boundaries() {
        assert_eq!(CaseTag::of(sh(2, 2)), CaseTag::RLeM);
        assert_eq!(CaseTag::of(sh(4, 2)), CaseTag::RGe2M);
        assert_eq!(CaseTag::of(sh(3, 2)), CaseTag::MLtRLt2M);
        assert_eq!(CaseTag::of(sh(3, 0)), CaseTag::RGe2M);
    }

    #[test]
    fn mask_r1_m1() {
        let (mx, mz) = canonical_mask(sh(1, 1));
        assert_eq!(mx, vec![vec![true, false]]);
        assert_eq!(mz, vec![vec![true]]);
    }

    #[test]
    fn mask_5_2_z_block() {
        let (_, mz) = canonical_mask(sh(5, 2));
        assert!(mz[0][0]);
        assert!(mz[0][1] && !mz[1][0]);
        let (_, mz) = canonical_mask(sh(7, 2));
        assert!(!mz[0][1] && !mz[0][2] && mz[1][1] && mz[0][3]);
    }

    #[test]
    fn popcounts_match_dims() {
        for r in 1..=50 {
            for m in 0..=50 {
                let s = sh(r, m);
                let (mx, mz) = canonical_mask(s);
                assert_eq!((popcount(&mx), popcount(&mz)), orbit_dims(s), "{s:?}");
            }
        }
    }

    #[test]
    fn dimension_bookkeeping() {
        for r in 1..=8 {
            for m in 0..=8 {
                let s = sh(r, m);
                let (dx, dz) = orbit_dims(s);
                let stab = StabilizerDescriptor::of(s).point_stabilizer_dim();
                assert_eq!(dx + dz + s.dim_um() - stab, s.dim_n(), "{s:?}");
            }
        }
    }

    #[test]
    fn stabilizer_descriptors() {
        assert_eq!(StabilizerDescriptor::of(sh(1, 3)), StabilizerDescriptor { kind: StabilizerKind::SpBlock, block_size: 4 });
        assert_eq!(StabilizerDescriptor::of(sh(5, 2)).kind, StabilizerKind::GlBlock);
        assert_eq!(StabilizerDescriptor::of(sh(2, 2)).kind, StabilizerKind::Trivial);
        assert_eq!(StabilizerDescriptor::of(sh(4, 2)).kind, StabilizerKind::Trivial);
    }

    #[test]
    fn r1_keeps_leading_entry_and_z() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for m in 1..4 {
            let (n, rep) = reduce_generic(&mut rng, sh(1, m));
            assert_eq!(rep.rx[(0, 0)], n.x[(0, 0)]);
            assert!((1..2 * m).all(|j| rep.rx[(0, j)].is_zero()));
            assert_eq!(rep.rz, n.z);
        }
    }

    #[test]
    fn canonical_input_is_fixed() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for s in GroupShape::all_up_to(7) {
            let n = random_canonical(&mut rng, s, 10);
            let rep = reduce_to_canonical(&n).unwrap();
            assert_eq!(rep.u1, Mat::identity(s.r), "{s:?}");
            assert_eq!(rep.u2, Mat::identity(2 * s.m), "{s:?}");
            assert_eq!(rep.point(), n);
        }
    }

    #[test]
    fn zero_pivot_reported() {
        let s = sh(2, 1);
        let n = NilpotentPair::from_xz(s, Mat::zeros(2, 2), Mat::identity(2)).unwrap();
        match reduce_to_canonical(&n) {
            Err(Error::NonGeneric { site }) => assert!(site.contains("x[2,1]"), "{site}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn reducers_reproduce_rep_on_named_shapes() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for s in [sh(2, 3), sh(3, 2), sh(5, 2), sh(4, 2), sh(1, 3), sh(6, 1)] {
            for _ in 0..10 {
                let (n, rep) = reduce_generic(&mut rng, s);
                assert!(conforms_to_mask(s, &rep.rx, &rep.rz), "{s:?}");
                assert!(rep.u1.is_upper_unitriangular());
                let again = act_levi(&n, &rep.u1, &rep.u2).unwrap();
                assert_eq!(again, rep.point());
                assert!(crate::symplectic::is_symplectic(&rep.u2).unwrap() || s.m == 0);
                for (i, j) in x_pivots(s) {
                    assert!(!rep.rx[(i, j)].is_zero());
                }
            }
        }
    }

    #[test]
    fn orbit_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for s in GroupShape::all_up_to(6) {
            let (n, rep) = reduce_generic(&mut rng, s);
            let u1 = random_gl_unipotent(&mut rng, s.r, 10);
            let u2 = random_sp_unipotent(&mut rng, s.m, 10);
            let moved = act_levi(&n, &u1, &u2).unwrap();
            let rep2 = reduce_to_canonical(&moved).unwrap();
            assert_eq!((rep2.rx, rep2.rz), (rep.rx.clone(), rep.rz.clone()), "{s:?}");
        }
    }

    #[test]
    fn stabilizers_behave() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for s in [sh(1, 2), sh(2, 2), sh(1, 3), sh(5, 2), sh(3, 2), sh(4, 1)] {
            let n = random_canonical(&mut rng, s, 10);
            let rep = reduce_to_canonical(&n).unwrap();
            assert!(stabilizer_check(&rep, &mut rng, 20, 10).unwrap(), "{s:?}");
        }
    }

    #[test]
    fn identity_fixes() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let n = random_canonical(&mut rng, sh(2, 2), 10);
        assert_eq!(act_levi(&n, &Mat::identity(2), &Mat::identity(4)).unwrap(), n);
    }

    #[test]
    fn sp_block_stabilizer_is_not_trivially_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let (_, u2) = random_stabilizer_element(&mut rng, sh(1, 3), 10);
        assert_ne!(u2, Mat::identity(6));
    }

    #[test]
    fn alpha_conjugation_scales_n() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for s in GroupShape::all_up_to(5) {
            let n = random_pair(&mut rng, s, 10);
            let t = rat::rat(-2, 3);
            let a = alpha_coweight(s, &t).unwrap();
            let c = &(&a * &n.embed()) * &a.inverse().unwrap();
            let y = n.y();
            assert_eq!(c, embed_n(s, &n.x.scale(&t), &y.scale(&(&t * &t))));
        }
    }

    #[test]
    fn normalization_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for s in GroupShape::all_up_to(6).into_iter().filter(|s| s.m > 0) {
            let n = random_canonical(&mut rng, s, 10);
            let rep = reduce_to_canonical(&n).unwrap();
            let (norm, t) = zm0_normalize(&rep).unwrap();
            assert!(leading_pivot(&norm).unwrap().is_one());
            assert_eq!(alpha_act(&norm, &t), rep);
            assert_eq!(alpha_act(&rep, &int(1)), rep);
        }
        let rep = reduce_to_canonical(&random_canonical(&mut rng, sh(2, 0), 10)).unwrap();
        assert!(zm0_normalize(&rep).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn output_conforms_to_mask(seed in 0u64..1_000_000, idx in 0usize..21) {
            let shapes = GroupShape::all_up_to(6);
            let s = shapes[idx % shapes.len()];
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = random_pair(&mut rng, s, 10);
            if let Ok(rep) = reduce_to_canonical(&n) {
                prop_assert!(conforms_to_mask(s, &rep.rx, &rep.rz));
                prop_assert_eq!(act_levi(&n, &rep.u1, &rep.u2).unwrap(), rep.point());
            }
        }
    }
}
