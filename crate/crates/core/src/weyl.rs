//! Type C Weyl group combinatorics for `M = GL_r x Sp_2m` inside `Sp_2n`.
//!
//! Coordinates `e_0..e_{n-1}`: the first `r` belong to the `GL_r` factor,
//! the remaining `m` to `Sp_2m`. Roots are integer vectors.

use std::collections::{BTreeSet, HashMap};

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::rat::{int, Rat};
use crate::symplectic::GroupShape;

pub type Root = Vec<i64>;

/// A signed permutation: `w(e_i) = sign * e_{|images[i]| - 1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignedPerm {
    pub images: Vec<i32>,
}

impl SignedPerm {
    pub fn identity(n: usize) -> Self {
        SignedPerm { images: (1..=n as i32).collect() }
    }

    pub fn new(images: Vec<i32>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &v in &images {
            let k = v.unsigned_abs() as usize;
            if k == 0 || k > n || seen[k - 1] {
                return Err(Error::OutOfRange(format!("not a signed permutation: {images:?}")));
            }
            seen[k - 1] = true;
        }
        Ok(SignedPerm { images })
    }

    pub fn rank(&self) -> usize {
        self.images.len()
    }

    /// `(self * other)(e_i) = self(other(e_i))`.
    pub fn compose(&self, other: &SignedPerm) -> SignedPerm {
        let images = other
            .images
            .iter()
            .map(|&v| {
                let w = self.images[v.unsigned_abs() as usize - 1];
                if v < 0 {
                    -w
                } else {
                    w
                }
            })
            .collect();
        SignedPerm { images }
    }

    pub fn inverse(&self) -> SignedPerm {
        let mut images = vec![0; self.rank()];
        for (i, &v) in self.images.iter().enumerate() {
            let k = v.unsigned_abs() as usize - 1;
            images[k] = if v < 0 { -(i as i32 + 1) } else { i as i32 + 1 };
        }
        SignedPerm { images }
    }

    pub fn apply(&self, v: &[i64]) -> Root {
        let mut out = vec![0; v.len()];
        for (i, &c) in v.iter().enumerate() {
            let img = self.images[i];
            let k = img.unsigned_abs() as usize - 1;
            out[k] += if img < 0 { -c } else { c };
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &v)| v == i as i32 + 1)
    }

    /// Number of positive roots of `C_n` sent to negative roots.
    pub fn length(&self) -> usize {
        positive_roots(self.rank()).iter().filter(|a| !is_positive(&self.apply(a))).count()
    }

    /// A reduced word in the simple reflections of `C_n`: index `i < n-1`
    /// is `s_{e_i - e_{i+1}}`, index `n-1` is `s_{2e_{n-1}}`.
    pub fn reduced_word(&self) -> Vec<usize> {
        let n = self.rank();
        let mut w = self.clone();
        let mut word = Vec::new();
        while !w.is_identity() {
            let s = (0..n)
                .find(|&i| !is_positive(&w.apply(&simple_root(n, i))))
                .expect("non-identity element has a descent");
            word.push(s);
            w = w.compose(&simple_reflection(n, s));
        }
        word.reverse();
        word
    }

    /// Permutation matrix of the action on coordinates.
    pub fn matrix(&self) -> Mat {
        let n = self.rank();
        let mut a = Mat::zeros(n, n);
        for (i, &v) in self.images.iter().enumerate() {
            a[(v.unsigned_abs() as usize - 1, i)] = int(if v < 0 { -1 } else { 1 });
        }
        a
    }
}

pub fn is_positive(v: &[i64]) -> bool {
    v.iter().find(|c| **c != 0).is_some_and(|c| *c > 0)
}

fn unit(n: usize, i: usize) -> Root {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

pub fn simple_root(n: usize, i: usize) -> Root {
    let mut v = vec![0; n];
    if i + 1 < n {
        v[i] = 1;
        v[i + 1] = -1;
    } else {
        v[i] = 2;
    }
    v
}

pub fn simple_reflection(n: usize, i: usize) -> SignedPerm {
    let mut images: Vec<i32> = (1..=n as i32).collect();
    if i + 1 < n {
        images.swap(i, i + 1);
    } else {
        images[i] = -images[i];
    }
    SignedPerm { images }
}

pub fn positive_roots(n: usize) -> Vec<Root> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let mut a = unit(n, i);
            a[j] = -1;
            out.push(a);
            let mut b = unit(n, i);
            b[j] = 1;
            out.push(b);
        }
        let mut c = vec![0; n];
        c[i] = 2;
        out.push(c);
    }
    out
}

pub fn is_root(v: &[i64]) -> bool {
    let nz: Vec<i64> = v.iter().copied().filter(|c| *c != 0).collect();
    match nz.as_slice() {
        [a] => a.abs() == 2,
        [a, b] => a.abs() == 1 && b.abs() == 1,
        _ => false,
    }
}

/// Coroot of a type C root: `e_i +- e_j` is its own coroot, `2e_i` has `e_i`.
pub fn coroot(a: &[i64]) -> Root {
    if a.iter().any(|c| c.abs() == 2) {
        a.iter().map(|c| c / 2).collect()
    } else {
        a.to_vec()
    }
}

fn pairing(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Simple roots of `M`: `e_i - e_{i+1}` for `i < r-1`, then the `C_m`
/// simple roots on the last `m` coordinates.
pub fn levi_simple_roots(shape: GroupShape) -> Vec<Root> {
    let (r, n) = (shape.r, shape.n());
    let mut out = Vec::new();
    for i in 0..r.saturating_sub(1) {
        out.push(simple_root(n, i));
    }
    for i in r..n {
        out.push(simple_root(n, i));
    }
    out
}

/// Positive roots of `M`.
pub fn levi_positive_roots(shape: GroupShape) -> Vec<Root> {
    let r = shape.r;
    positive_roots(shape.n())
        .into_iter()
        .filter(|a| {
            let support: Vec<usize> = (0..a.len()).filter(|&i| a[i] != 0).collect();
            let in_gl = support.iter().all(|&i| i < r) && a.iter().sum::<i64>() == 0;
            let in_sp = support.iter().all(|&i| i >= r);
            in_gl || in_sp
        })
        .collect()
}

/// A standard Levi of `M`, given by the retained simple roots of `M`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LeviDescriptor {
    pub shape: GroupShape,
    pub retained: Vec<bool>,
}

impl LeviDescriptor {
    pub fn new(shape: GroupShape, retained: Vec<bool>) -> Result<Self> {
        let expect = shape.r - 1 + shape.m;
        if retained.len() != expect {
            return Err(Error::DimensionMismatch(format!("{} simple roots, expected {expect}", retained.len())));
        }
        Ok(LeviDescriptor { shape, retained })
    }

    pub fn whole(shape: GroupShape) -> Self {
        LeviDescriptor { shape, retained: vec![true; shape.r - 1 + shape.m] }
    }

    pub fn torus(shape: GroupShape) -> Self {
        LeviDescriptor { shape, retained: vec![false; shape.r - 1 + shape.m] }
    }

    pub fn all(shape: GroupShape) -> Vec<Self> {
        let k = shape.r - 1 + shape.m;
        (0..1u64 << k)
            .map(|bits| LeviDescriptor { shape, retained: (0..k).map(|i| bits >> i & 1 == 1).collect() })
            .collect()
    }

    /// `L = prod GL_{r_i} x prod GL_{m_j} x Sp_{2m'}` from block sizes.
    pub fn from_blocks(shape: GroupShape, r_parts: &[usize], m_parts: &[usize], m_tail: usize) -> Result<Self> {
        if r_parts.iter().sum::<usize>() != shape.r || r_parts.contains(&0) {
            return Err(Error::InvalidShape(format!("{r_parts:?} is not a composition of {}", shape.r)));
        }
        if m_parts.iter().sum::<usize>() + m_tail != shape.m || m_parts.contains(&0) {
            return Err(Error::InvalidShape(format!("{m_parts:?} + {m_tail} does not add up to {}", shape.m)));
        }
        let mut retained = Vec::new();
        let mut gl = vec![true; shape.r - 1];
        let mut acc = 0;
        for p in &r_parts[..r_parts.len() - 1] {
            acc += p;
            gl[acc - 1] = false;
        }
        retained.extend(gl);
        let mut sp = vec![true; shape.m];
        let mut acc = 0;
        for p in m_parts {
            acc += p;
            sp[acc - 1] = false;
        }
        retained.extend(sp);
        Ok(LeviDescriptor { shape, retained })
    }

    pub fn simple_roots(&self) -> Vec<Root> {
        levi_simple_roots(self.shape).into_iter().zip(&self.retained).filter(|(_, k)| **k).map(|(a, _)| a).collect()
    }

    /// Sizes `r_1, .., r_k` of the `GL` blocks inside `GL_r`.
    pub fn gl_blocks(&self) -> Vec<usize> {
        let r = self.shape.r;
        let mut out = Vec::new();
        let mut cur = 1;
        for i in 0..r - 1 {
            if self.retained[i] {
                cur += 1;
            } else {
                out.push(cur);
                cur = 1;
            }
        }
        out.push(cur);
        out
    }

    /// `(m_1, .., m_l)` and `m'` for the part inside `Sp_2m`.
    pub fn sp_blocks(&self) -> (Vec<usize>, usize) {
        let sp = &self.retained[self.shape.r - 1..];
        let m = sp.len();
        if m == 0 {
            return (Vec::new(), 0);
        }
        let tail = if sp[m - 1] { 1 + sp[..m - 1].iter().rev().take_while(|k| **k).count() } else { 0 };
        let mut parts = Vec::new();
        let mut cur = 0;
        for &k in &sp[..m - tail] {
            cur += 1;
            if !k {
                parts.push(cur);
                cur = 0;
            }
        }
        (parts, tail)
    }

    /// Positive roots of `L`.
    pub fn positive_roots(&self) -> Vec<Root> {
        let simple = self.simple_roots();
        levi_positive_roots(self.shape).into_iter().filter(|a| in_span(&simple, a)).collect()
    }

    /// The longest element of `W(L)`.
    pub fn longest(&self) -> SignedPerm {
        longest_element(self.shape.n(), &self.simple_roots())
    }
}

/// Rank of integer vectors over `Q`.
pub fn rank_of(vectors: &[Root]) -> usize {
    let Some(first) = vectors.first() else { return 0 };
    let cols = first.len();
    let mut a = Mat::from_fn(vectors.len(), cols, |i, j| int(vectors[i][j]));
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..a.rows()).find(|&i| !a[(i, c)].is_zero()) else { continue };
        a.swap_rows(rank, p);
        for i in 0..a.rows() {
            if i != rank && !a[(i, c)].is_zero() {
                let f = &a[(i, c)] / &a[(rank, c)];
                for j in 0..cols {
                    let v = &a[(i, j)] - &(&f * &a[(rank, j)]);
                    a[(i, j)] = v;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn in_span(basis: &[Root], v: &[i64]) -> bool {
    let mut with = basis.to_vec();
    with.push(v.to_vec());
    rank_of(basis) == rank_of(&with)
}

/// Longest element of the reflection subgroup generated by `simple`: the
/// unique element sending every one of them to a negative root.
fn longest_element(n: usize, simple: &[Root]) -> SignedPerm {
    let mut w = SignedPerm::identity(n);
    loop {
        let Some(a) = simple.iter().find(|a| is_positive(&w.apply(a))) else { return w };
        w = w.compose(&reflection(a));
    }
}

/// The reflection `s_a`.
pub fn reflection(a: &[i64]) -> SignedPerm {
    let n = a.len();
    let ac = coroot(a);
    let images = (0..n)
        .map(|i| {
            let e = unit(n, i);
            let p = pairing(&e, &ac);
            let img: Vec<i64> = (0..n).map(|k| e[k] - p * a[k]).collect();
            let k = img.iter().position(|c| *c != 0).expect("reflection image is a unit vector");
            if img[k] < 0 {
                -(k as i32 + 1)
            } else {
                k as i32 + 1
            }
        })
        .collect();
    SignedPerm { images }
}

/// `W(M) = S_r x W(C_m)` as signed permutations of `n = r + m` letters.
pub fn levi_weyl_group(shape: GroupShape) -> Vec<SignedPerm> {
    let (r, m) = (shape.r, shape.m);
    let mut out = Vec::new();
    for p in permutations(r) {
        for q in permutations(m) {
            for signs in 0..1u32 << m {
                let mut images: Vec<i32> = p.iter().map(|&k| k as i32 + 1).collect();
                for (j, &k) in q.iter().enumerate() {
                    let v = (r + k) as i32 + 1;
                    images.push(if signs >> j & 1 == 1 { -v } else { v });
                }
                out.push(SignedPerm { images });
            }
        }
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

pub fn longest_of_m(shape: GroupShape) -> SignedPerm {
    LeviDescriptor::whole(shape).longest()
}

/// `{w in W(M) : w a > 0 implies w a simple, for simple a of M}` by brute force.
pub fn bessel_support_set(shape: GroupShape) -> BTreeSet<SignedPerm> {
    let simple = levi_simple_roots(shape);
    levi_weyl_group(shape)
        .into_iter()
        .filter(|w| {
            simple.iter().all(|a| {
                let b = w.apply(a);
                !is_positive(&b) || simple.contains(&b)
            })
        })
        .collect()
}

/// `theta^+_{M,w}`: simple roots of `M` kept positive by `w`.
pub fn theta_plus(shape: GroupShape, w: &SignedPerm) -> Vec<bool> {
    levi_simple_roots(shape).iter().map(|a| is_positive(&w.apply(a))).collect()
}

pub fn levi_of_w(shape: GroupShape, w: &SignedPerm) -> Result<LeviDescriptor> {
    if w.rank() != shape.n() || !bessel_support_set(shape).contains(w) {
        return Err(Error::NotInBesselSupport);
    }
    LeviDescriptor::new(shape, theta_plus(shape, w))
}

/// `w_M w_L^{-1}`.
pub fn w_of_levi(levi: &LeviDescriptor) -> SignedPerm {
    longest_of_m(levi.shape).compose(&levi.longest().inverse())
}

/// Bruhat order `w <= v` by the lifting property: for a right descent `s`
/// of `v`, `w <= v` iff `min(w, ws) <= vs`.
pub fn bruhat_leq(w: &SignedPerm, v: &SignedPerm) -> bool {
    let mut memo = HashMap::new();
    leq_rec(w, v, &mut memo)
}

fn leq_rec(w: &SignedPerm, v: &SignedPerm, memo: &mut HashMap<(SignedPerm, SignedPerm), bool>) -> bool {
    if v.is_identity() {
        return w.is_identity();
    }
    if let Some(&b) = memo.get(&(w.clone(), v.clone())) {
        return b;
    }
    let n = v.rank();
    let s = (0..n).find(|&i| !is_positive(&v.apply(&simple_root(n, i)))).expect("descent exists");
    let refl = simple_reflection(n, s);
    let vs = v.compose(&refl);
    let ws = w.compose(&refl);
    let lower = if !is_positive(&w.apply(&simple_root(n, s))) { ws } else { w.clone() };
    let out = leq_rec(&lower, &vs, memo);
    memo.insert((w.clone(), v.clone()), out);
    out
}

/// Subword criterion: `w <= v` iff some subword of a reduced word of `v` is
/// a word for `w`. Exponential; for cross-checking small cases.
pub fn bruhat_leq_subword(w: &SignedPerm, v: &SignedPerm) -> bool {
    let n = v.rank();
    let word = v.reduced_word();
    let mut reach: BTreeSet<SignedPerm> = BTreeSet::new();
    reach.insert(SignedPerm::identity(n));
    for &s in &word {
        let refl = simple_reflection(n, s);
        let next: Vec<SignedPerm> = reach.iter().map(|u| u.compose(&refl)).collect();
        reach.extend(next);
    }
    reach.contains(w)
}

/// Longest chain `w = w_0 > w_1 > .. > w_d = v` inside `B(M)`.
pub fn bessel_distance(shape: GroupShape, w: &SignedPerm, v: &SignedPerm) -> Result<usize> {
    let support = bessel_support_set(shape);
    for x in [w, v] {
        if !support.contains(x) {
            return Err(Error::NotInBesselSupport);
        }
    }
    if !bruhat_leq(v, w) {
        return Err(Error::Incomparable);
    }
    let mut elems: Vec<&SignedPerm> =
        support.iter().filter(|x| bruhat_leq(v, x) && bruhat_leq(x, w)).collect();
    elems.sort_by_key(|x| x.length());
    let mut best: HashMap<&SignedPerm, usize> = HashMap::new();
    for (i, x) in elems.iter().enumerate() {
        let d = elems[..i]
            .iter()
            .filter(|y| *y != x && bruhat_leq(y, x))
            .filter_map(|y| best.get(*y).map(|d| d + 1))
            .max()
            .unwrap_or(0);
        best.insert(x, d);
    }
    Ok(best[w])
}

/// `dim A_w`: corank of the span of `theta^+_{M,w}` among characters.
pub fn relevant_torus_rank(shape: GroupShape, w: &SignedPerm) -> usize {
    let simple = levi_simple_roots(shape);
    let kept: Vec<Root> =
        simple.into_iter().zip(theta_plus(shape, w)).filter(|(_, k)| *k).map(|(a, _)| a).collect();
    shape.n() - rank_of(&kept)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransverseTorus {
    /// `dim A_w`.
    pub relevant_rank: usize,
    /// Rank of the maximal torus of `L'_der`.
    pub derived_rank: usize,
    /// `dim (A_w cap L'_der)`.
    pub rank: usize,
    /// `A_{w'} cap L'_der` is finite.
    pub self_finite: bool,
    /// Order of `Z(L'_der)` (determinant of the Cartan matrix of `L'`).
    pub center_order: u64,
}

/// Kernel of a set of characters, as a rational basis of cocharacters.
fn kernel_basis(n: usize, chars: &[Root]) -> Vec<Root> {
    if chars.is_empty() {
        return (0..n).map(|i| unit(n, i)).collect();
    }
    let rank = rank_of(chars);
    let a = Mat::from_fn(chars.len(), n, |i, j| int(chars[i][j]));
    let (pivots, reduced) = rref(&a);
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    debug_assert_eq!(free.len(), n - rank);
    free.iter()
        .map(|&f| {
            let mut v: Vec<Rat> = vec![Rat::zero(); n];
            v[f] = int(1);
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -reduced[(row, f)].clone();
            }
            let den = v.iter().fold(num_bigint::BigInt::from(1), |acc, x| num_integer::lcm(acc, x.denom().clone()));
            v.iter()
                .map(|x| {
                    let y = x * Rat::from_integer(den.clone());
                    i64::try_from(y.to_integer()).expect("small kernel vector")
                })
                .collect()
        })
        .collect()
}

fn rref(a: &Mat) -> (Vec<usize>, Mat) {
    let mut a = a.clone();
    let mut pivots = Vec::new();
    let mut row = 0;
    for c in 0..a.cols() {
        let Some(p) = (row..a.rows()).find(|&i| !a[(i, c)].is_zero()) else { continue };
        a.swap_rows(row, p);
        let inv = a[(row, c)].recip();
        for j in 0..a.cols() {
            let v = &a[(row, j)] * &inv;
            a[(row, j)] = v;
        }
        for i in 0..a.rows() {
            if i != row && !a[(i, c)].is_zero() {
                let f = a[(i, c)].clone();
                for j in 0..a.cols() {
                    let v = &a[(i, j)] - &(&f * &a[(row, j)]);
                    a[(i, j)] = v;
                }
            }
        }
        pivots.push(c);
        row += 1;
    }
    (pivots, a)
}

fn intersection_dim(u: &[Root], v: &[Root]) -> usize {
    let mut both = u.to_vec();
    both.extend(v.iter().cloned());
    rank_of(u) + rank_of(v) - rank_of(&both)
}

fn cartan_det(simple: &[Root]) -> u64 {
    let k = simple.len();
    let c = Mat::from_fn(k, k, |i, j| int(pairing(&simple[i], &coroot(&simple[j]))));
    let d = c.det().expect("square");
    u64::try_from(d.abs().to_integer()).expect("small determinant")
}

/// `A_w^{w'} = A_w cap L'_der` for `w' <= w`, with `L'` the Levi of `w'`.
pub fn transverse_torus(shape: GroupShape, w: &SignedPerm, wp: &SignedPerm) -> Result<TransverseTorus> {
    if !bruhat_leq(wp, w) {
        return Err(Error::Incomparable);
    }
    let n = shape.n();
    let lw = levi_of_w(shape, w)?;
    let lp = levi_of_w(shape, wp)?;
    let aw = kernel_basis(n, &lw.simple_roots());
    let awp = kernel_basis(n, &lp.simple_roots());
    let der: Vec<Root> = lp.simple_roots().iter().map(|a| coroot(a)).collect();
    Ok(TransverseTorus {
        relevant_rank: aw.len(),
        derived_rank: rank_of(&der),
        rank: intersection_dim(&aw, &der),
        self_finite: intersection_dim(&awp, &der) == 0,
        center_order: cartan_det(&lp.simple_roots()),
    })
}

/// Positive roots of `M` split by the sign of `w a`: `(U^+, U^-)`.
pub fn u_partition(shape: GroupShape, w: &SignedPerm) -> (Vec<Root>, Vec<Root>) {
    levi_positive_roots(shape).into_iter().partition(|a| is_positive(&w.apply(a)))
}

/// Every root `i a + j b` (`i, j >= 1`) with `a` in `plus`, `b` in `minus`
/// lies in `minus`.
pub fn normalizes(plus: &[Root], minus: &[Root]) -> bool {
    for a in plus {
        for b in minus {
            for i in 1..=2 {
                for j in 1..=2 {
                    let c: Root = a.iter().zip(b).map(|(x, y)| i * x + j * y).collect();
                    if is_root(&c) && !minus.contains(&c) {
                        return false;
                    }
                }
            }
        }
    }
    true
}
