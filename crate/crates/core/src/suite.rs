//! Seeded property suites over ranges of `(r, m)` and their reports.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use num_traits::{One, Signed};
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bruhat::{decompose_w0, is_paired_torus, w0_inverse_times, item_four_holds};
use crate::cutoff::{self, CutoffConvention, PadicContext};
use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::measure;
use crate::orbit::{self, canonical_mask, orbit_dims, popcount, CaseTag};
use crate::rat::{self, Rat};
use crate::sample::{cell_rng, random_pair, resample};
use crate::symplectic::{act_levi, is_symplectic, random_gl_unipotent, random_sp_unipotent, GroupShape, NilpotentPair};
use crate::torus::{self, SignConvention};
use crate::weyl::{self, LeviDescriptor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Bruhat,
    Orbit,
    Measure,
    Torus,
    Weyl,
    Cutoff,
    All,
}

impl Suite {
    pub const EACH: [Suite; 6] = [Suite::Bruhat, Suite::Orbit, Suite::Measure, Suite::Torus, Suite::Weyl, Suite::Cutoff];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Bruhat => "bruhat",
            Suite::Orbit => "orbit",
            Suite::Measure => "measure",
            Suite::Torus => "torus",
            Suite::Weyl => "weyl",
            Suite::Cutoff => "cutoff",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::EACH
            .into_iter()
            .chain([Suite::All])
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::UnknownSuite(s.to_string()))
    }
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub suite: Suite,
    /// Inclusive range of `r`.
    pub r: (usize, usize),
    /// Inclusive range of `m`.
    pub m: (usize, usize),
    pub samples: usize,
    pub bound: i64,
    pub prime: u64,
    pub kappa: i64,
    pub d: i64,
    pub g: i64,
    pub seed: u64,
    /// For the Weyl suite: every shape with `r + m <= n`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Perturbs `m1` before the Bruhat comparison, to exercise failure reporting.
    #[serde(default, skip_serializing_if = "is_false")]
    pub inject_fault: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            suite: Suite::All,
            r: (1, 3),
            m: (0, 2),
            samples: 20,
            bound: crate::sample::DEFAULT_BOUND,
            prime: 3,
            kappa: 1,
            d: 0,
            g: 0,
            seed: 0,
            n: None,
            inject_fault: false,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        if self.r.0 == 0 || self.r.0 > self.r.1 || self.m.0 > self.m.1 {
            return Err(Error::InvalidShape(format!("empty or invalid ranges r = {:?}, m = {:?}", self.r, self.m)));
        }
        if self.samples == 0 || self.bound < 1 {
            return Err(Error::OutOfRange("samples and bound must be at least 1".into()));
        }
        PadicContext::new(self.prime, self.kappa, self.d, self.g)?;
        Ok(())
    }

    fn shapes(&self, suite: Suite) -> Vec<GroupShape> {
        if let (Suite::Weyl, Some(n)) = (suite, self.n) {
            return GroupShape::all_up_to(n);
        }
        (self.r.0..=self.r.1).flat_map(|r| (self.m.0..=self.m.1).map(move |m| GroupShape { r, m })).collect()
    }

    fn samples_for(&self, suite: Suite) -> usize {
        if suite == Suite::Weyl {
            1
        } else {
            self.samples
        }
    }
}

/// Parses `A`, `A..B` or `A..=B` (both ends inclusive).
pub fn parse_range(s: &str) -> Result<(usize, usize)> {
    let bad = || Error::OutOfRange(format!("bad range '{s}'"));
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
    match s.split_once("..") {
        None => {
            let a = num(s)?;
            Ok((a, a))
        }
        Some((a, b)) => {
            let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
            if a > b {
                return Err(bad());
            }
            Ok((a, b))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureRecord {
    pub input: Value,
    pub expected: Value,
    pub actual: Value,
    pub site: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellResult {
    pub suite: Suite,
    pub r: usize,
    pub m: usize,
    pub case: String,
    pub samples: usize,
    pub passed: usize,
    pub inconclusive: usize,
    pub failures: Vec<FailureRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub config: SuiteConfig,
    pub results: Vec<CellResult>,
    pub status: Status,
    pub elapsed_ms: u64,
}

impl SuiteReport {
    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Inconclusive => 2,
        }
    }

    /// The `results` array alone, which is reproducible from the seed.
    pub fn results_json(&self) -> String {
        serde_json::to_string(&self.results).expect("serializable")
    }
}

pub fn rat_json(x: &Rat) -> Value {
    Value::String(rat::to_string(x))
}

pub fn mat_json(a: &Mat) -> Value {
    json!(a.to_strings())
}

pub fn rats_json(v: &[Rat]) -> Value {
    Value::Array(v.iter().map(rat_json).collect())
}

pub fn pair_json(n: &NilpotentPair) -> Value {
    json!({ "r": n.shape.r, "m": n.shape.m, "x": mat_json(&n.x), "z": mat_json(&n.z) })
}

/// Rebuilds a pair from [`pair_json`] output.
pub fn pair_from_json(v: &Value) -> Result<NilpotentPair> {
    let bad = || Error::InvalidShape(format!("not a serialized pair: {v}"));
    let r = v["r"].as_u64().ok_or_else(bad)? as usize;
    let m = v["m"].as_u64().ok_or_else(bad)? as usize;
    let read = |key: &str, rows: usize, cols: usize| -> Result<Mat> {
        let rows_v: Vec<Vec<String>> = serde_json::from_value(v[key].clone()).map_err(|_| bad())?;
        if rows_v.is_empty() {
            return Ok(Mat::zeros(rows, cols));
        }
        Mat::from_strings(&rows_v)
    };
    NilpotentPair::from_xz(GroupShape::new(r, m)?, read("x", r, 2 * m)?, read("z", r, r)?)
}

/// Result of one sample: a failure (if any) and named tallies reported as notes.
#[derive(Debug, Default)]
struct SampleResult {
    failure: Option<FailureRecord>,
    tallies: Vec<(String, bool)>,
}

impl SampleResult {
    fn fail(site: &str, input: Value, expected: Value, actual: Value) -> Self {
        SampleResult {
            failure: Some(FailureRecord { input, expected, actual, site: site.to_string() }),
            tallies: Vec::new(),
        }
    }

    fn tally(mut self, label: &str, held: bool) -> Self {
        self.tallies.push((label.to_string(), held));
        self
    }
}

enum Outcome {
    Done(SampleResult),
    Inconclusive,
}

fn random_generic(rng: &mut impl Rng, shape: GroupShape, bound: i64) -> Result<NilpotentPair> {
    let n = random_pair(rng, shape, bound);
    decompose_w0(&n)?;
    Ok(n)
}

fn bruhat_sample(cfg: &SuiteConfig, shape: GroupShape, rng: &mut impl Rng) -> Result<SampleResult> {
    let n = random_pair(rng, shape, cfg.bound);
    let mut f = decompose_w0(&n)?;
    if cfg.inject_fault {
        f.m1[(0, 0)] += Rat::one();
    }
    let expected = w0_inverse_times(&n)?;
    let actual = f.product()?;
    if actual != expected {
        return Ok(SampleResult::fail("w0^-1 n = m n' nbar", pair_json(&n), mat_json(&expected), mat_json(&actual)));
    }
    if shape.m > 0 && !is_symplectic(&f.m2)? {
        return Ok(SampleResult::fail("m2 symplectic", pair_json(&n), json!(true), mat_json(&f.m2)));
    }
    if !item_four_holds(&n, &f)? {
        return Ok(SampleResult::fail("m2 J' tX' J = J' tX J", pair_json(&n), json!(true), json!(false)));
    }
    Ok(SampleResult::default())
}

fn orbit_sample(cfg: &SuiteConfig, shape: GroupShape, rng: &mut impl Rng) -> Result<SampleResult> {
    let n = random_pair(rng, shape, cfg.bound);
    let rep = orbit::reduce_to_canonical(&n)?;
    let input = pair_json(&n);
    if !orbit::conforms_to_mask(shape, &rep.rx, &rep.rz) {
        return Ok(SampleResult::fail("canonical mask", input, json!("mask"), pair_json(&rep.point())));
    }
    let replay = act_levi(&n, &rep.u1, &rep.u2)?;
    if replay != rep.point() {
        return Ok(SampleResult::fail("recorded reducers", input, pair_json(&rep.point()), pair_json(&replay)));
    }
    let v1 = random_gl_unipotent(rng, shape.r, cfg.bound);
    let v2 = random_sp_unipotent(rng, shape.m, cfg.bound);
    let moved = orbit::reduce_to_canonical(&act_levi(&n, &v1, &v2)?)?.point();
    if moved != rep.point() {
        return Ok(SampleResult::fail("U_M invariance", input, pair_json(&rep.point()), pair_json(&moved)));
    }
    let (mx, mz) = canonical_mask(shape);
    let dims = orbit_dims(shape);
    if (popcount(&mx), popcount(&mz)) != dims {
        return Ok(SampleResult::fail("mask popcounts", input, json!(dims), json!((popcount(&mx), popcount(&mz)))));
    }
    if !orbit::stabilizer_check(&rep, rng, 2, cfg.bound)? {
        return Ok(SampleResult::fail("stabilizer", input, json!(rep.stabilizer.kind), json!("not fixed")));
    }
    Ok(SampleResult::default())
}

fn measure_sample(cfg: &SuiteConfig, shape: GroupShape, rng: &mut impl Rng, idx: u64) -> Result<SampleResult> {
    let p = orbit::random_canonical(rng, shape, cfg.bound);
    let check = measure::verify_jacobian_monomial(&p)?;
    if !check.matches() {
        return Ok(SampleResult::fail("|det J| against monomial", pair_json(&p), rat_json(&check.monomial), rat_json(&check.det)));
    }
    if shape.m > 0 {
        let nc = measure::normalization_check(&p)?;
        if !nc.matches() {
            return Ok(SampleResult::fail("normalized exponents", pair_json(&p), rat_json(&nc.rhs), rat_json(&nc.lhs)));
        }
    }
    if !measure::xz_xy_change_of_variables_check(shape, rng, 1, cfg.bound)? {
        return Ok(SampleResult::fail("(X,Z) -> (X,Y) Jacobian", pair_json(&p), json!("1"), json!("other")));
    }
    if !measure::exponent_bookkeeping_holds(shape) {
        return Ok(SampleResult::fail("exponent bookkeeping", json!([shape.r, shape.m]), json!(true), json!(false)));
    }
    if idx == 0 && shape.m > 0 {
        let id = measure::power_identity(shape);
        if !id.holds() {
            return Ok(SampleResult::fail(
                &format!("printed power identity, case {}", id.case.label()),
                json!([shape.r, shape.m]),
                json!(id.rhs),
                json!(id.lhs),
            ));
        }
    }
    Ok(SampleResult::default())
}

fn torus_sample(cfg: &SuiteConfig, shape: GroupShape, rng: &mut impl Rng) -> Result<SampleResult> {
    let n = random_generic(rng, shape, cfg.bound)?;
    let input = pair_json(&n);
    let oracle = torus::phi_oracle(&n)?;
    let uniform = torus::phi_minor_formula(&n, SignConvention::Uniform)?;
    let torus_json = |t: &torus::TorusPair| json!({ "t1": rats_json(&t.t1), "t2": rats_json(&t.t2) });
    if uniform != oracle {
        return Ok(SampleResult::fail("minor ratios against big cell", input, torus_json(&oracle), torus_json(&uniform)));
    }
    let printed = torus::phi_minor_formula(&n, SignConvention::Printed)?;
    if !printed.abs_eq(&oracle) {
        return Ok(SampleResult::fail("printed minor ratios, absolute values", input, torus_json(&oracle), torus_json(&printed)));
    }
    if shape.m > 0 && !is_paired_torus(&uniform.t2) {
        return Ok(SampleResult::fail("t2 paired", input, json!(true), torus_json(&uniform)));
    }
    let (u1, u2) = torus::unipotent_entries_formula(&n)?;
    let (o1, o2) = torus::unipotent_entries_oracle(&n)?;
    if (&u1, &u2) != (&o1, &o2) {
        return Ok(SampleResult::fail("crossed-minor unipotents", input, json!([mat_json(&o1), mat_json(&o2)]), json!([mat_json(&u1), mat_json(&u2)])));
    }
    let (sp, sdp) = torus::random_torus(rng, shape, 5);
    if !torus::equivariance_holds(&n, &sp, &sdp)? {
        return Ok(SampleResult::fail("toric equivariance", input, json!({"s1": rats_json(&sp), "s2": rats_json(&sdp)}), json!(false)));
    }
    if !torus::square_cover_check(shape, rng, 1)? {
        return Ok(SampleResult::fail("square cover", json!([shape.r, shape.m]), json!(true), json!(false)));
    }
    let exact = SampleResult::default().tally("printed signs agree exactly", printed == oracle);
    if shape.m == 0 {
        return Ok(exact);
    }
    let levis = LeviDescriptor::all(shape);
    let levi = levis.choose(rng).expect("at least one Levi").clone();
    let k = levi.gl_blocks().len() + levi.sp_blocks().0.len();
    let s: Vec<Rat> = (0..k).map(|_| rat::random_nonzero(rng, 5)).collect();
    let p = torus::normalized_point(rng, shape, cfg.bound)?;
    let sc = torus::scalar_sample(&p, &levi, &s)?;
    if sc.det_observed != sc.det_derived || sc.yrr_observed != sc.yrr_derived {
        return Ok(SampleResult::fail(
            "toric scalars (derived laws)",
            json!({"point": pair_json(&p), "s": rats_json(&s)}),
            json!([rat_json(&sc.det_derived), rat_json(&sc.yrr_derived)]),
            json!([rat_json(&sc.det_observed), rat_json(&sc.yrr_observed)]),
        ));
    }
    Ok(exact
        .tally("claimed det m1 factor prod s_i^2, absolute value", sc.det_observed.abs() == sc.det_claimed.abs())
        .tally("claimed y*_rr/det Y factor s_k^-2, absolute value", sc.yrr_observed.abs() == sc.yrr_claimed.abs()))
}

fn weyl_sample(shape: GroupShape) -> Result<SampleResult> {
    let b: Vec<_> = weyl::bessel_support_set(shape).into_iter().collect();
    let want = 1usize << (shape.r - 1 + shape.m);
    let cell = json!([shape.r, shape.m]);
    if b.len() != want {
        return Ok(SampleResult::fail("|B(M)|", cell, json!(want), json!(b.len())));
    }
    for w in &b {
        let l = weyl::levi_of_w(shape, w)?;
        if &weyl::w_of_levi(&l) != w {
            return Ok(SampleResult::fail("B(M) to Levi bijection", cell, json!(w.images), json!(weyl::w_of_levi(&l).images)));
        }
        let (plus, minus) = weyl::u_partition(shape, w);
        if !weyl::normalizes(&plus, &minus) {
            return Ok(SampleResult::fail("U+ normalizes U-", cell, json!(w.images), json!(false)));
        }
        for v in &b {
            if weyl::bruhat_leq(v, w) {
                let t = weyl::transverse_torus(shape, w, v)?;
                if !t.self_finite {
                    return Ok(SampleResult::fail("A_w'^w' finite", cell, json!(v.images), json!(t.rank)));
                }
            }
        }
    }
    let e = weyl::SignedPerm::identity(shape.n());
    let ranks = (weyl::relevant_torus_rank(shape, &e), weyl::relevant_torus_rank(shape, &weyl::longest_of_m(shape)));
    if ranks != (1, shape.n()) {
        return Ok(SampleResult::fail("relevant torus ranks", cell, json!([1, shape.n()]), json!(ranks)));
    }
    Ok(SampleResult::default().tally(&format!("|B(M)| = {want}"), true))
}

fn cutoff_sample(cfg: &SuiteConfig, shape: GroupShape, rng: &mut impl Rng) -> Result<SampleResult> {
    let ctx = PadicContext::new(cfg.prime, cfg.kappa, cfg.d, cfg.g)?;
    let cell = json!([shape.r, shape.m]);
    let mut out = SampleResult::default();
    if shape.m > 0 {
        let rep = cutoff::phi_invariance_check(&ctx, shape, rng, 1, CutoffConvention::LowerLeft, 0)?;
        if rep.changed > 0 {
            return Ok(SampleResult::fail("phi invariance under U_0,kappa", cell, json!(0), json!(rep.changed)));
        }
        out = out.tally("phi = 1 on the sampled point", rep.inside > 0);
        let lit = cutoff::phi_invariance_check(&ctx, shape, rng, 1, CutoffConvention::Literal, 0)?;
        out = out.tally("literal convention unchanged", lit.changed == 0);
    }
    if !cutoff::nesting_check(&ctx, shape, rng, 1, cfg.kappa + 2) {
        return Ok(SampleResult::fail("Nbar_0,kappa nesting", cell, json!(true), json!(false)));
    }
    if !cutoff::abs_only_check(&ctx, shape, rng, 1)? {
        return Ok(SampleResult::fail("alpha(t) conjugate depends on |t|", cell, json!(true), json!(false)));
    }
    let n = random_generic(rng, shape, cfg.bound)?;
    let u1 = random_gl_unipotent(rng, shape.r, cfg.bound);
    let u2 = random_sp_unipotent(rng, shape.m, cfg.bound);
    let t = rat::random_nonzero(rng, cfg.bound);
    if !cutoff::twisted_conjugation_identity(&n, &t, &u1, &u2)? {
        return Ok(SampleResult::fail(
            "twisted conjugation identity",
            json!({"point": pair_json(&n), "t": rat_json(&t), "u1": mat_json(&u1), "u2": mat_json(&u2)}),
            json!(true),
            json!(false),
        ));
    }
    let c = orbit::random_canonical(rng, shape, cfg.bound);
    decompose_w0(&c)?;
    let (s1, s2) = orbit::random_stabilizer_element(rng, shape, cfg.bound);
    if !cutoff::stabilizers_agree(&c, &s1, &s2)? {
        return Ok(SampleResult::fail("stabilizer of n equals twisted stabilizer of m", pair_json(&c), json!(true), json!(false)));
    }
    let inc = cutoff::stabilizer_inclusion_check(shape, rng, 1, cfg.bound)?;
    if inc.failures > 0 {
        return Ok(SampleResult::fail("stabilizer inside u2^-1 U_L u2", cell, json!(0), json!(inc.failures)));
    }
    Ok(out)
}

fn run_sample(cfg: &SuiteConfig, suite: Suite, shape: GroupShape, idx: u64) -> Outcome {
    let mut rng = cell_rng(cfg.seed, suite.name(), shape.r, shape.m, idx);
    let res = resample(&mut rng, |rng| match suite {
        Suite::Bruhat => bruhat_sample(cfg, shape, rng),
        Suite::Orbit => orbit_sample(cfg, shape, rng),
        Suite::Measure => measure_sample(cfg, shape, rng, idx),
        Suite::Torus => torus_sample(cfg, shape, rng),
        Suite::Weyl => weyl_sample(shape),
        Suite::Cutoff => cutoff_sample(cfg, shape, rng),
        Suite::All => unreachable!("expanded before sampling"),
    });
    match res {
        Ok(s) => Outcome::Done(s.value),
        Err(Error::NonGeneric { .. }) => Outcome::Inconclusive,
        Err(e) => Outcome::Done(SampleResult::fail(&format!("error: {e}"), json!([shape.r, shape.m, idx]), json!(null), json!(null))),
    }
}

/// Runs the configured suite; cells run in parallel, results come back in
/// a fixed order.
pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    cfg.validate()?;
    let start = Instant::now();
    let suites: Vec<Suite> = if cfg.suite == Suite::All { Suite::EACH.to_vec() } else { vec![cfg.suite] };
    let mut cells = Vec::new();
    for &s in &suites {
        for shape in cfg.shapes(s) {
            cells.push((s, shape, cfg.samples_for(s)));
        }
    }
    let tasks: Vec<(usize, Suite, GroupShape, u64)> = cells
        .iter()
        .enumerate()
        .flat_map(|(c, &(s, shape, k))| (0..k as u64).map(move |i| (c, s, shape, i)))
        .collect();
    let outcomes: Vec<(usize, Outcome)> =
        tasks.par_iter().map(|&(c, s, shape, i)| (c, run_sample(cfg, s, shape, i))).collect();

    let mut results: Vec<CellResult> = cells
        .iter()
        .map(|&(s, shape, k)| CellResult {
            suite: s,
            r: shape.r,
            m: shape.m,
            case: CaseTag::of(shape).label().to_string(),
            samples: k,
            passed: 0,
            inconclusive: 0,
            failures: Vec::new(),
            notes: Vec::new(),
        })
        .collect();
    let mut tallies: Vec<BTreeMap<String, (usize, usize)>> = vec![BTreeMap::new(); cells.len()];
    for (c, o) in outcomes {
        match o {
            Outcome::Inconclusive => results[c].inconclusive += 1,
            Outcome::Done(s) => {
                match s.failure {
                    Some(f) => results[c].failures.push(f),
                    None => results[c].passed += 1,
                }
                for (label, held) in s.tallies {
                    let e = tallies[c].entry(label).or_default();
                    e.0 += held as usize;
                    e.1 += 1;
                }
            }
        }
    }
    for (res, t) in results.iter_mut().zip(tallies) {
        res.notes = t.into_iter().map(|(label, (h, n))| format!("{label}: {h}/{n}")).collect();
    }
    let status = if results.iter().any(|c| !c.failures.is_empty()) {
        Status::Fail
    } else if results.iter().any(|c| c.inconclusive > 0) {
        Status::Inconclusive
    } else {
        Status::Pass
    };
    Ok(SuiteReport { suite: cfg.suite, config: cfg.clone(), results, status, elapsed_ms: start.elapsed().as_millis() as u64 })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "text" => Ok(Format::Text),
            _ => Err(Error::OutOfRange(format!("unknown format '{s}'"))),
        }
    }
}

pub fn render(report: &SuiteReport, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(report).expect("serializable") + "\n",
        Format::Text => {
            let mut s = format!("suite {} seed {}\n", report.suite, report.config.seed);
            for c in &report.results {
                s += &format!(
                    "{:<8} r={} m={} {:<10} samples={} passed={} failed={} inconclusive={}\n",
                    c.suite.name(),
                    c.r,
                    c.m,
                    c.case,
                    c.samples,
                    c.passed,
                    c.failures.len(),
                    c.inconclusive
                );
                for f in &c.failures {
                    s += &format!("  FAIL {}: expected {} got {} on {}\n", f.site, f.expected, f.actual, f.input);
                }
                for n in &c.notes {
                    s += &format!("  note {n}\n");
                }
            }
            s += &format!("status {:?} ({} ms)\n", report.status, report.elapsed_ms).to_lowercase();
            s
        }
    }
}

/// Writes the rendered report to `out`, or to stdout.
pub fn emit_report(report: &SuiteReport, format: Format, out: Option<&Path>) -> Result<()> {
    let text = render(report, format);
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::Io { path: path.display().to_string(), message: e.to_string() }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
