//! Registry of checkable statements about `H`, `K = H ∪ {R₀}` and the two
//! auxiliary curve families, each verified exhaustively per field order.

use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::arcs::{all_completions, coverage, Arc, Coverage, SearchOrder};
use crate::conic::{ConicContext, HSets, PointClass};
use crate::curves::{
    analyze, build_quartic, build_segre_curve, intersection_multiplicity, linear_component_through,
    rational_points, tangent_multiplicity, Genus,
};
use crate::field::{is_odd_prime_power, make_field, ExtParam, FieldElem, FieldError, MAX_ORDER};
use crate::plane::{Plane, ProjPoint};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Lower bound on q for the statements proved only for large fields.
pub const LARGE_Q: u32 = 17;
/// Curve families are checked over every admissible parameter up to this q.
pub const CURVE_EXHAUSTIVE_MAX_Q: u32 = 13;
pub const CURVE_SAMPLES: usize = 100;
pub const COMPLETION_CAP: usize = 4;
/// Upper end of every default q range.
pub const DEFAULT_MAX_Q: u32 = 199;

/// At most this many example points are listed per witness field.
const EXAMPLES: usize = 10;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClaimError {
    #[error("unknown claim id `{0}`")]
    UnknownClaim(String),
    #[error("invalid q list `{0}`")]
    BadQList(String),
    #[error("q = {0} is not an odd prime power in 3..={max}", max = MAX_ORDER)]
    BadQ(u64),
    #[error("unknown format `{0}` (expected json, csv or text)")]
    UnknownFormat(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ClaimId {
    LemmaCoveredAbc,
    CaseC0,
    CaseAb0,
    LemmaUv,
    LemmaHprime,
    Lemma001,
    TheoremComplete,
    CorollaryHfree,
    PellegrinoCounterexample,
    SmallQ,
    CurveSegre,
    CurveQuartic,
    OracleEquivalence,
}

impl ClaimId {
    pub const ALL: [ClaimId; 13] = [
        ClaimId::LemmaCoveredAbc,
        ClaimId::CaseC0,
        ClaimId::CaseAb0,
        ClaimId::LemmaUv,
        ClaimId::LemmaHprime,
        ClaimId::Lemma001,
        ClaimId::TheoremComplete,
        ClaimId::CorollaryHfree,
        ClaimId::PellegrinoCounterexample,
        ClaimId::SmallQ,
        ClaimId::CurveSegre,
        ClaimId::CurveQuartic,
        ClaimId::OracleEquivalence,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ClaimId::LemmaCoveredAbc => "lemma-covered-abc",
            ClaimId::CaseC0 => "case-c0",
            ClaimId::CaseAb0 => "case-ab0",
            ClaimId::LemmaUv => "lemma-UV",
            ClaimId::LemmaHprime => "lemma-Hprime",
            ClaimId::Lemma001 => "lemma-001",
            ClaimId::TheoremComplete => "theorem-complete",
            ClaimId::CorollaryHfree => "corollary-Hfree",
            ClaimId::PellegrinoCounterexample => "pellegrino-counterexample",
            ClaimId::SmallQ => "small-q",
            ClaimId::CurveSegre => "curve-segre",
            ClaimId::CurveQuartic => "curve-quartic",
            ClaimId::OracleEquivalence => "oracle-equivalence",
        }
    }

    /// The statement being checked.
    pub fn anchor(self) -> &'static str {
        match self {
            ClaimId::LemmaCoveredAbc => {
                "q >= 17: every point (a,b,c) off the conic with abc != 0 lies on a secant of H"
            }
            ClaimId::CaseC0 => {
                "(a,b,0) with ab != 0 is H-free when b/a is a square and q = 3 mod 4, \
                 or b/a is a nonsquare and q = 1 mod 4"
            }
            ClaimId::CaseAb0 => "(0,0,1) is H-free exactly when q = 3 mod 4",
            ClaimId::LemmaUv => {
                "q >= 17: (0,b,c) with bc != 0 and (a,0,c) with ac != 0 lie on secants of H"
            }
            ClaimId::LemmaHprime => "q >= 17: every point of H' = C \\ H lies on a secant of K = H + R0",
            ClaimId::Lemma001 => {
                "(0,0,1) lies on a secant of H when q = 1 mod 4, and on a secant of K when \
                 q = 3 mod 4 and b0/a0 is a fourth power"
            }
            ClaimId::TheoremComplete => "q >= 17: K = H + R0 is a complete arc of size (q+3)/2",
            ClaimId::CorollaryHfree => {
                "q >= 17: the H-free points off the conic are the internal points of Z=0 \
                 described by case-c0, plus (0,0,1) when q = 3 mod 4; Z=0 is a secant of C"
            }
            ClaimId::PellegrinoCounterexample => {
                "q >= 17: no line external to C contains two internal H-free points"
            }
            ClaimId::SmallQ => {
                "completing H through an internal H-free point: q=9 needs 3 points (size 8), \
                 q=11 and q=13 need 2"
            }
            ClaimId::CurveSegre => {
                "(cX^2Z^2 - bZ^4) - mu Y^2(aX^2 - cZ^2): singular exactly at (1,0,0),(0,1,0), \
                 both ordinary double points, genus 1, count within q+1 +- (2 sqrt q + 2)"
            }
            ClaimId::CurveQuartic => {
                "X^2Y^2 - mu' Z^2(X^2+Y^2): singular exactly at the three coordinate points, \
                 all ordinary double points, genus 0, count within q+1 +- 3"
            }
            ClaimId::OracleEquivalence => {
                "for R off the conic: some x in {0} + squares has phi_R(x) in {0} + squares, \
                 phi_R(x) != x, iff R lies on a secant of H"
            }
        }
    }

    /// Smallest q the statement is asserted for; smaller q are run but
    /// reported as SKIPPED.
    pub fn min_q(self) -> Option<u32> {
        match self {
            ClaimId::LemmaCoveredAbc
            | ClaimId::LemmaUv
            | ClaimId::LemmaHprime
            | ClaimId::TheoremComplete
            | ClaimId::CorollaryHfree
            | ClaimId::PellegrinoCounterexample => Some(LARGE_Q),
            _ => None,
        }
    }

    pub fn default_qs(self) -> Vec<u32> {
        match self {
            ClaimId::SmallQ => vec![9, 11, 13],
            ClaimId::OracleEquivalence => crate::field::odd_prime_powers(5, 61),
            ClaimId::CurveSegre | ClaimId::CurveQuartic => {
                crate::field::odd_prime_powers(7, DEFAULT_MAX_Q as u64)
            }
            _ => crate::field::odd_prime_powers(5, DEFAULT_MAX_Q as u64),
        }
    }
}

impl FromStr for ClaimId {
    type Err = ClaimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ClaimId::ALL
            .into_iter()
            .find(|id| id.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| ClaimError::UnknownClaim(s.to_string()))
    }
}

impl std::fmt::Display for ClaimId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Verified,
    Refuted,
    Partial,
    Skipped,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Verified => "VERIFIED",
            Status::Refuted => "REFUTED",
            Status::Partial => "PARTIAL",
            Status::Skipped => "SKIPPED",
        }
    }

    /// REFUTED dominates, then PARTIAL; SKIPPED entries are ignored unless
    /// nothing else is present.
    pub fn combine(statuses: impl IntoIterator<Item = Status>) -> Status {
        let all: Vec<Status> = statuses.into_iter().collect();
        if all.contains(&Status::Refuted) {
            Status::Refuted
        } else if all.contains(&Status::Partial) {
            Status::Partial
        } else if all.contains(&Status::Verified) {
            Status::Verified
        } else {
            Status::Skipped
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QResult {
    pub q: u32,
    pub status: Status,
    /// What was enumerated.
    pub domain: String,
    pub witnesses: Value,
    pub elapsed_ms: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClaimReport {
    pub claim: String,
    pub anchor: String,
    pub status: Status,
    pub q_results: Vec<QResult>,
    pub version: String,
}

impl ClaimReport {
    pub fn result(&self, q: u32) -> Option<&QResult> {
        self.q_results.iter().find(|r| r.q == q)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct RunOptions {
    /// Record wall-clock time; off gives byte-identical reports across runs.
    pub timing: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { timing: true }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClaimInfo {
    pub id: &'static str,
    pub anchor: &'static str,
    pub min_q: Option<u32>,
    pub default_q: String,
}

pub fn list_claims() -> Vec<ClaimInfo> {
    ClaimId::ALL
        .into_iter()
        .map(|id| {
            let qs = id.default_qs();
            let default_q = match (qs.first(), qs.last()) {
                (Some(a), Some(b)) if qs.len() > 3 => format!("{a}..{b}"),
                _ => qs.iter().map(u32::to_string).collect::<Vec<_>>().join(","),
            };
            ClaimInfo {
                id: id.as_str(),
                anchor: id.anchor(),
                min_q: id.min_q(),
                default_q,
            }
        })
        .collect()
}

/// Comma-separated items, each `q` or an inclusive range `a..b`. Ranges
/// keep only odd prime powers; single values must be one.
pub fn parse_q_list(s: &str) -> Result<Vec<u32>, ClaimError> {
    let bad = || ClaimError::BadQList(s.to_string());
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim) {
        if item.is_empty() {
            return Err(bad());
        }
        if let Some((a, b)) = item.split_once("..") {
            let a: u64 = a.trim().parse().map_err(|_| bad())?;
            let b: u64 = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
            if a > b || b > MAX_ORDER {
                return Err(bad());
            }
            out.extend(crate::field::odd_prime_powers(a, b));
        } else {
            let q: u64 = item.parse().map_err(|_| bad())?;
            if !is_odd_prime_power(q) || q > MAX_ORDER {
                return Err(ClaimError::BadQ(q));
            }
            out.push(q as u32);
        }
    }
    out.sort_unstable();
    out.dedup();
    if out.is_empty() {
        return Err(bad());
    }
    Ok(out)
}

struct Outcome {
    status: Status,
    domain: String,
    witnesses: Value,
}

fn verdict(ok: bool) -> Status {
    if ok {
        Status::Verified
    } else {
        Status::Refuted
    }
}

/// Per-q data shared by the checks.
struct Ctx {
    conic: ConicContext,
    hs: HSets,
}

impl Ctx {
    fn new(q: u32) -> Result<Self, ClaimError> {
        let conic = ConicContext::new(make_field(q as u64)?);
        let hs = conic.build_h();
        Ok(Ctx { conic, hs })
    }

    fn plane(&self) -> &Plane {
        self.conic.plane()
    }

    fn q(&self) -> u32 {
        self.conic.q()
    }

    fn pt(&self, raw: [FieldElem; 3]) -> ProjPoint {
        self.plane().normalize(raw).expect("nonzero triple")
    }

    fn h_covered(&self, r: ProjPoint) -> bool {
        self.conic.is_h_covered_direct(&self.hs, r).expect("R is not in H")
    }

    fn h_arc(&self) -> Arc {
        Arc::new(self.plane(), self.hs.h.clone()).expect("H is an arc")
    }

    fn k_arc(&self) -> Arc {
        let mut pts = self.hs.h.clone();
        pts.push(self.conic.choose_r0());
        Arc::new(self.plane(), pts).expect("R0 is H-free")
    }

    /// `(1, m, 0)` is H-free for exactly these `m ≠ 0`.
    fn c0_predicted_free(&self, m: FieldElem) -> bool {
        let sq = self.conic.field().is_nonzero_square(m);
        if self.q() % 4 == 3 {
            sq
        } else {
            !sq
        }
    }

    fn off_conic_h_free(&self) -> Vec<ProjPoint> {
        coverage(&self.h_arc())
            .free_points()
            .into_iter()
            .filter(|&p| !self.conic.is_on_conic(p))
            .collect()
    }
}

fn pts_json(pts: &[ProjPoint]) -> Value {
    json!(pts.iter().map(|p| p.encoded()).collect::<Vec<_>>())
}

fn examples_json(pts: &[ProjPoint]) -> Value {
    pts_json(&pts[..pts.len().min(EXAMPLES)])
}

pub fn run_claim(id: ClaimId, qs: &[u32], opts: RunOptions) -> Result<ClaimReport, ClaimError> {
    let mut q_results = Vec::with_capacity(qs.len());
    for &q in qs {
        if !is_odd_prime_power(q as u64) || q as u64 > MAX_ORDER {
            return Err(ClaimError::BadQ(q as u64));
        }
        let start = Instant::now();
        let mut out = run_one(id, q)?;
        if let Some(min) = id.min_q().filter(|&m| q < m) {
            out.witnesses = json!({
                "informational": true,
                "reason": format!("statement assumes q >= {min}"),
                "outcome_if_asserted": out.status.as_str(),
                "details": out.witnesses,
            });
            out.status = Status::Skipped;
        }
        let elapsed_ms = if opts.timing {
            start.elapsed().as_millis() as u64
        } else {
            0
        };
        q_results.push(QResult {
            q,
            status: out.status,
            domain: out.domain,
            witnesses: out.witnesses,
            elapsed_ms,
        });
    }
    Ok(ClaimReport {
        claim: id.as_str().to_string(),
        anchor: id.anchor().to_string(),
        status: Status::combine(q_results.iter().map(|r| r.status)),
        q_results,
        version: VERSION.to_string(),
    })
}

fn run_one(id: ClaimId, q: u32) -> Result<Outcome, ClaimError> {
    if id == ClaimId::SmallQ && ![9, 11, 13].contains(&q) {
        return Ok(Outcome {
            status: Status::Skipped,
            domain: "q in {9, 11, 13}".into(),
            witnesses: json!({"reason": "no completion data stated for this q"}),
        });
    }
    let ctx = Ctx::new(q)?;
    Ok(match id {
        ClaimId::LemmaCoveredAbc => covered_abc(&ctx),
        ClaimId::CaseC0 => case_c0(&ctx),
        ClaimId::CaseAb0 => case_ab0(&ctx),
        ClaimId::LemmaUv => lemma_uv(&ctx),
        ClaimId::LemmaHprime => lemma_hprime(&ctx),
        ClaimId::Lemma001 => lemma_001(&ctx),
        ClaimId::TheoremComplete => theorem_complete(&ctx),
        ClaimId::CorollaryHfree => corollary_hfree(&ctx),
        ClaimId::PellegrinoCounterexample => pellegrino(&ctx),
        ClaimId::SmallQ => small_q(&ctx),
        ClaimId::CurveSegre => curve_segre(&ctx),
        ClaimId::CurveQuartic => curve_quartic(&ctx),
        ClaimId::OracleEquivalence => oracle_equivalence(&ctx),
    })
}

fn covered_abc(ctx: &Ctx) -> Outcome {
    let f = ctx.conic.field();
    let mut checked = 0u64;
    let mut free = Vec::new();
    for b in f.nonzero() {
        for c in f.nonzero() {
            let r = ctx.pt([FieldElem::ONE, b, c]);
            if ctx.conic.is_on_conic(r) {
                continue;
            }
            checked += 1;
            if !ctx.h_covered(r) {
                free.push(r);
            }
        }
    }
    Outcome {
        status: verdict(free.is_empty()),
        domain: "all (1,b,c) with bc != 0 off the conic".into(),
        witnesses: json!({
            "checked": checked,
            "h_free_count": free.len(),
            "h_free": examples_json(&free),
        }),
    }
}

fn case_c0(ctx: &Ctx) -> Outcome {
    let f = ctx.conic.field();
    let mut violations = Vec::new();
    let mut converse_exceptions = Vec::new();
    let mut predicted = 0;
    for m in f.nonzero() {
        let r = ctx.pt([FieldElem::ONE, m, FieldElem::ZERO]);
        let free = !ctx.h_covered(r);
        let pred = ctx.c0_predicted_free(m);
        predicted += pred as usize;
        if pred && !free {
            violations.push(r);
        }
        if !pred && free {
            converse_exceptions.push(r);
        }
    }
    Outcome {
        status: verdict(violations.is_empty()),
        domain: "all (1,m,0) with m != 0".into(),
        witnesses: json!({
            "checked": f.q() - 1,
            "predicted_free": predicted,
            "violations": pts_json(&violations),
            "converse_exceptions": pts_json(&converse_exceptions),
        }),
    }
}

fn case_ab0(ctx: &Ctx) -> Outcome {
    let f = ctx.conic.field();
    let r = ctx.pt([FieldElem::ZERO, FieldElem::ZERO, FieldElem::ONE]);
    let free = !ctx.h_covered(r);
    let expected = ctx.q() % 4 == 3;
    // φ_R is s ↦ −s for this R
    let negation = f
        .elements()
        .all(|x| ctx.conic.phi(r, ExtParam::Finite(x)) == Ok(ExtParam::Finite(f.neg(x))));
    Outcome {
        status: verdict(free == expected && negation),
        domain: "the point (0,0,1)".into(),
        witnesses: json!({
            "h_free": free,
            "expected_h_free": expected,
            "phi_is_negation": negation,
        }),
    }
}

fn lemma_uv(ctx: &Ctx) -> Outcome {
    let f = ctx.conic.field();
    let squares: Vec<FieldElem> = f.nonzero().filter(|&x| f.is_nonzero_square(x)).collect();
    let hp = |s: FieldElem| ctx.conic.param_to_point(ExtParam::Finite(s));
    let plane = ctx.plane();
    let (mut u_free, mut v_free) = (Vec::new(), Vec::new());
    let (mut u_uncertified, mut v_uncertified) = (Vec::new(), Vec::new());
    for t in f.nonzero() {
        // U = (0,1,t): b/c = 1/t
        let u = ctx.pt([FieldElem::ZERO, FieldElem::ONE, t]);
        if !ctx.h_covered(u) {
            u_free.push(u);
        }
        let ratio = f.inv(t).unwrap();
        let u_cert = if f.is_nonzero_square(ratio) {
            plane.collinear(u, hp(FieldElem::ZERO), hp(ratio))
        } else {
            squares.iter().any(|&si| {
                let sj = f.sub(ratio, si);
                sj != si
                    && f.is_nonzero_square(sj)
                    && plane.collinear(u, hp(si), hp(sj))
            })
        };
        if !u_cert {
            u_uncertified.push(u);
        }
        // V = (1,0,t): quartic points (x,y) with xy != 0, x² != y² give the
        // secant through the H points with parameters x², y²
        let v = ctx.pt([FieldElem::ONE, FieldElem::ZERO, t]);
        if !ctx.h_covered(v) {
            v_free.push(v);
        }
        let v_cert = squares.iter().any(|&si| {
            let den = f.sub(si, t);
            if den.is_zero() {
                return false;
            }
            let sj = f.div(f.mul(t, si), den).unwrap();
            sj != si && f.is_nonzero_square(sj) && plane.collinear(v, hp(si), hp(sj))
        });
        if !v_cert {
            v_uncertified.push(v);
        }
    }
    let covered = u_free.is_empty() && v_free.is_empty();
    let certified = u_uncertified.is_empty() && v_uncertified.is_empty();
    Outcome {
        status: match (covered, certified) {
            (false, _) => Status::Refuted,
            (true, false) => Status::Partial,
            (true, true) => Status::Verified,
        },
        domain: "all (0,1,t) and (1,0,t) with t != 0".into(),
        witnesses: json!({
            "checked": 2 * (f.q() - 1),
            "u_free": pts_json(&u_free),
            "v_free": pts_json(&v_free),
            "u_without_square_sum_chord": pts_json(&u_uncertified),
            "v_without_quartic_chord": pts_json(&v_uncertified),
        }),
    }
}

fn lemma_hprime(ctx: &Ctx) -> Outcome {
    let plane = ctx.plane();
    let map = coverage(&ctx.k_arc());
    let r0 = ctx.conic.choose_r0();
    let mut uncovered = Vec::new();
    let mut no_h_partner = Vec::new();
    for &p in &ctx.hs.h_prime {
        if map.flag(p) != Coverage::Covered {
            uncovered.push(p);
        }
        let l = plane.line_through(r0, p).unwrap();
        let partners = ctx.hs.h.iter().filter(|&&h| plane.incident(h, l)).count();
        if partners != 1 {
            no_h_partner.push(p);
        }
    }
    Outcome {
        status: verdict(uncovered.is_empty() && no_h_partner.is_empty()),
        domain: "all points of H'".into(),
        witnesses: json!({
            "r0": r0.encoded(),
            "checked": ctx.hs.h_prime.len(),
            "not_k_covered": pts_json(&uncovered),
            "line_to_r0_without_single_h_point": pts_json(&no_h_partner),
        }),
    }
}

fn lemma_001(ctx: &Ctx) -> Outcome {
    let f = ctx.conic.field();
    let plane = ctx.plane();
    let p = ctx.pt([FieldElem::ZERO, FieldElem::ZERO, FieldElem::ONE]);
    if ctx.q() % 4 == 1 {
        let covered = ctx.h_covered(p);
        return Outcome {
            status: verdict(covered),
            domain: "(0,0,1), q = 1 mod 4".into(),
            witnesses: json!({"h_covered": covered}),
        };
    }
    let r0 = ctx.conic.choose_r0();
    let [a0, b0, _] = r0.coords();
    let fourth = f.is_fourth_power(f.div(b0, a0).unwrap()).unwrap();
    let k_covered = coverage(&ctx.k_arc()).flag(p) == Coverage::Covered;
    let l = plane.line_through(r0, p).unwrap();
    let chord: Vec<ProjPoint> = ctx.hs.h.iter().copied().filter(|&h| plane.incident(h, l)).collect();
    Outcome {
        status: verdict(fourth && k_covered && !chord.is_empty()),
        domain: "(0,0,1), q = 3 mod 4".into(),
        witnesses: json!({
            "r0": r0.encoded(),
            "b0_over_a0_fourth_power": fourth,
            "h_covered": ctx.h_covered(p),
            "k_covered": k_covered,
            "h_points_on_line_to_r0": pts_json(&chord),
        }),
    }
}

fn theorem_complete(ctx: &Ctx) -> Outcome {
    let q = ctx.q();
    let r0 = ctx.conic.choose_r0();
    let internal = ctx.conic.classify_point(r0) == PointClass::Internal;
    let k = ctx.k_arc();
    let free = coverage(&k).free_points();
    let size_ok = k.len() == (q as usize + 3) / 2;
    Outcome {
        status: verdict(internal && size_ok && free.is_empty()),
        domain: "all points of PG(2,q)".into(),
        witnesses: json!({
            "r0": r0.encoded(),
            "r0_internal": internal,
            "size": k.len(),
            "free_count": free.len(),
            "free": examples_json(&free),
        }),
    }
}

fn corollary_hfree(ctx: &Ctx) -> Outcome {
    let f = ctx.conic.field();
    let q = ctx.q();
    let free = ctx.off_conic_h_free();
    let mut expected: Vec<ProjPoint> = f
        .nonzero()
        .filter(|&m| ctx.c0_predicted_free(m))
        .map(|m| ctx.pt([FieldElem::ONE, m, FieldElem::ZERO]))
        .collect();
    let origin = ctx.pt([FieldElem::ZERO, FieldElem::ZERO, FieldElem::ONE]);
    if q % 4 == 3 {
        expected.push(origin);
    }
    expected.sort();
    let expected_count = if q % 4 == 1 { (q - 1) / 2 } else { (q + 1) / 2 };
    let z0 = ctx.plane().line([0, 0, 1]).unwrap();
    let internal_on_z0 = free
        .iter()
        .filter(|&&p| ctx.plane().incident(p, z0))
        .all(|&p| ctx.conic.classify_point(p) == PointClass::Internal);
    let z0_conic_points = ctx
        .conic
        .conic_points()
        .iter()
        .filter(|&&p| ctx.plane().incident(p, z0))
        .count();
    let missing: Vec<ProjPoint> = expected.iter().copied().filter(|p| !free.contains(p)).collect();
    let extra: Vec<ProjPoint> = free.iter().copied().filter(|p| !expected.contains(p)).collect();
    let ok = free == expected
        && free.len() as u32 == expected_count
        && internal_on_z0
        && z0_conic_points == 2;
    Outcome {
        status: verdict(ok),
        domain: "all points off the conic".into(),
        witnesses: json!({
            "free_count": free.len(),
            "expected_count": expected_count,
            "free": pts_json(&free),
            "missing": pts_json(&missing),
            "unexpected": pts_json(&extra),
            "z0_points_internal": internal_on_z0,
            "z0_conic_points": z0_conic_points,
        }),
    }
}

fn pellegrino(ctx: &Ctx) -> Outcome {
    let plane = ctx.plane();
    let internal: Vec<ProjPoint> = ctx
        .off_conic_h_free()
        .into_iter()
        .filter(|&p| ctx.conic.classify_point(p) == PointClass::Internal)
        .collect();
    let conic_on = |l| {
        ctx.conic
            .conic_points()
            .iter()
            .filter(|&&p| plane.incident(p, l))
            .count()
    };
    let mut lines = Vec::new();
    for (i, &a) in internal.iter().enumerate() {
        for &b in &internal[i + 1..] {
            lines.push(plane.line_through(a, b).unwrap());
        }
    }
    lines.sort();
    lines.dedup();
    let external: Vec<_> = lines.iter().filter(|&&l| conic_on(l) == 0).map(|l| l.encoded()).collect();
    let z0 = plane.line([0, 0, 1]).unwrap();
    let all_on_z0 = internal.iter().all(|&p| plane.incident(p, z0));
    let z0_meets = conic_on(z0);
    Outcome {
        status: verdict(external.is_empty() && all_on_z0 && z0_meets == 2),
        domain: "all pairs of internal H-free points".into(),
        witnesses: json!({
            "internal_h_free": internal.len(),
            "all_on_z0": all_on_z0,
            "z0_conic_points": z0_meets,
            "joining_lines": lines.iter().map(|l| l.encoded()).collect::<Vec<_>>(),
            "external_joining_lines": external,
        }),
    }
}

fn small_q(ctx: &Ctx) -> Outcome {
    let q = ctx.q();
    let h = ctx.h_arc();
    let seeds: Vec<ProjPoint> = ctx
        .off_conic_h_free()
        .into_iter()
        .filter(|&p| ctx.conic.classify_point(p) == PointClass::Internal)
        .collect();
    let seeded = crate::arcs::completions_through(&h, &seeds, COMPLETION_CAP, SearchOrder::Forward);
    let unrestricted = all_completions(&h, COMPLETION_CAP, SearchOrder::Forward);
    let (want_add, want_size) = match q {
        9 => (3, 8),
        11 => (2, 8),
        _ => (2, 9),
    };
    let min = seeded.min_additions();
    let ok = min == Some(want_add) && seeded.by_size.contains_key(&want_size);
    let summary = |c: &crate::arcs::Completions| {
        json!({
            "min_additions": c.min_additions(),
            "counts_by_size": c.by_size.iter().map(|(s, v)| (s.to_string(), json!(v.len()))).collect::<serde_json::Map<_, _>>(),
            "first": c.by_size.values().next().and_then(|v| v.first()).map(|s| pts_json(s)),
            "truncated_branches": c.truncated_branches,
        })
    };
    Outcome {
        status: verdict(ok),
        domain: format!("completions of H by at most {COMPLETION_CAP} points"),
        witnesses: json!({
            "h_size": h.len(),
            "internal_h_free": pts_json(&seeds),
            "expected": {"min_additions": want_add, "size": want_size},
            "through_internal_h_free": summary(&seeded),
            "unrestricted": summary(&unrestricted),
        }),
    }
}

/// Failure log capped at a few entries; the total is kept separately.
struct Failures {
    total: usize,
    first: Vec<Value>,
}

impl Failures {
    fn new() -> Self {
        Failures {
            total: 0,
            first: Vec::new(),
        }
    }

    fn push(&mut self, v: Value) {
        self.total += 1;
        if self.first.len() < EXAMPLES {
            self.first.push(v);
        }
    }
}

fn segre_params(ctx: &Ctx) -> (Vec<[FieldElem; 4]>, String) {
    let f = ctx.conic.field();
    let q = ctx.q();
    let admissible = |[a, b, c, mu]: [FieldElem; 4]| {
        !a.is_zero()
            && !b.is_zero()
            && !c.is_zero()
            && f.mul(a, b) != f.square(c)
            && !mu.is_zero()
            && !f.is_nonzero_square(mu)
    };
    if q <= CURVE_EXHAUSTIVE_MAX_Q {
        let mut out = Vec::new();
        for a in f.nonzero() {
            for b in f.nonzero() {
                for c in f.nonzero() {
                    for mu in f.nonzero() {
                        if admissible([a, b, c, mu]) {
                            out.push([a, b, c, mu]);
                        }
                    }
                }
            }
        }
        (out, "all admissible (a,b,c,mu)".into())
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(q as u64);
        let mut out = Vec::with_capacity(CURVE_SAMPLES);
        while out.len() < CURVE_SAMPLES {
            let draw: [FieldElem; 4] = std::array::from_fn(|_| f.elem(rng.gen_range(0..q as u64)).unwrap());
            if admissible(draw) {
                out.push(draw);
            }
        }
        (out, format!("{CURVE_SAMPLES} admissible (a,b,c,mu) drawn with seed {q}"))
    }
}

fn curve_segre(ctx: &Ctx) -> Outcome {
    let f = ctx.conic.field();
    let plane = ctx.plane();
    let q = ctx.q();
    let x_inf = ctx.pt([FieldElem::ONE, FieldElem::ZERO, FieldElem::ZERO]);
    let y_inf = ctx.pt([FieldElem::ZERO, FieldElem::ONE, FieldElem::ZERO]);
    let (params, domain) = segre_params(ctx);
    let mut failures = Failures::new();
    let (mut contact_checks, mut h_free_curves) = (0usize, 0usize);
    let (mut min_n, mut max_n) = (u64::MAX, 0u64);
    for [a, b, c, mu] in params.iter().copied() {
        let label = json!([a.value(), b.value(), c.value(), mu.value()]);
        let poly = build_segre_curve(f, a, b, c, mu).expect("admissible");
        let rep = analyze(plane, &poly, Some(2));
        min_n = min_n.min(rep.rational_points);
        max_n = max_n.max(rep.rational_points);
        let sing: Vec<ProjPoint> = rep.singular_points.iter().map(|s| s.point).collect();
        if sing != [y_inf, x_inf] {
            failures.push(json!({"params": label, "singular_points": pts_json(&sing)}));
            continue;
        }
        if !rep.singular_points.iter().all(|s| s.multiplicity == 2 && s.ordinary) {
            failures.push(json!({"params": label, "reason": "singular point not an ordinary double point"}));
        }
        if rep.genus != Genus::Value(1) {
            failures.push(json!({"params": label, "genus": rep.genus}));
        }
        if !rep.hasse_weil.as_ref().is_some_and(|h| h.within) {
            failures.push(json!({"params": label, "count": rep.rational_points}));
        }
        if linear_component_through(plane, &poly, x_inf).is_some() {
            failures.push(json!({"params": label, "reason": "linear component through (1,0,0)"}));
        }
        // tangents Y = ±eZ at (1,0,0) with e² = c/(μa)
        let e2 = f.div(c, f.mul(mu, a)).unwrap();
        for e in f.nonzero().filter(|&e| f.square(e) == e2) {
            contact_checks += 1;
            let v = ctx.pt([FieldElem::ZERO, e, FieldElem::ONE]);
            let im = intersection_multiplicity(plane, &poly, x_inf, v);
            let tm = tangent_multiplicity(plane, &poly, x_inf, v);
            if im != Ok(4) || tm != Ok(1) {
                failures.push(json!({
                    "params": label,
                    "direction": v.encoded(),
                    "intersection_multiplicity": im.ok(),
                    "tangent_multiplicity": tm.ok(),
                }));
            }
        }
        // an H-free R = (a,b,c) forces at least 2q − 6 points
        let r = ctx.pt([a, b, c]);
        if !ctx.h_covered(r) {
            h_free_curves += 1;
            if rep.rational_points + 6 < 2 * q as u64 {
                failures.push(json!({"params": label, "reason": "H-free R but fewer than 2q-6 points", "count": rep.rational_points}));
            }
        }
    }
    Outcome {
        status: verdict(failures.total == 0),
        domain,
        witnesses: json!({
            "curves": params.len(),
            "point_count_range": [min_n, max_n],
            "bounds": [q as f64 + 1.0 - 2.0 * (q as f64).sqrt() - 2.0, q as f64 + 1.0 + 2.0 * (q as f64).sqrt() + 2.0],
            "order_four_contacts_checked": contact_checks,
            "curves_from_h_free_points": h_free_curves,
            "failures": failures.total,
            "first_failures": failures.first,
        }),
    }
}

fn curve_quartic(ctx: &Ctx) -> Outcome {
    let f = ctx.conic.field();
    let plane = ctx.plane();
    let q = ctx.q();
    let coord: Vec<ProjPoint> = [[0, 0, 1], [0, 1, 0], [1, 0, 0]]
        .iter()
        .map(|&e| plane.point(e).unwrap())
        .collect();
    let mut failures = Failures::new();
    let (mut min_n, mut max_n) = (u64::MAX, 0u64);
    let mut with_affine_chord = 0usize;
    for mu in f.nonzero() {
        let label = json!(mu.value());
        let poly = build_quartic(f, mu).expect("mu != 0");
        let rep = analyze(plane, &poly, Some(3));
        min_n = min_n.min(rep.rational_points);
        max_n = max_n.max(rep.rational_points);
        let sing: Vec<ProjPoint> = rep.singular_points.iter().map(|s| s.point).collect();
        if sing != coord {
            failures.push(json!({"mu": label, "singular_points": pts_json(&sing)}));
            continue;
        }
        if !rep.singular_points.iter().all(|s| s.multiplicity == 2 && s.ordinary) {
            failures.push(json!({"mu": label, "reason": "singular point not an ordinary double point"}));
        }
        if rep.genus != Genus::Value(0) {
            failures.push(json!({"mu": label, "genus": rep.genus}));
        }
        if !rep.hasse_weil.as_ref().is_some_and(|h| h.within) {
            failures.push(json!({"mu": label, "count": rep.rational_points}));
        }
        if let Some(p) = coord.iter().find(|&&p| linear_component_through(plane, &poly, p).is_some()) {
            failures.push(json!({"mu": label, "linear_component_through": p.encoded()}));
        }
        let pts = rational_points(plane, &poly);
        let swapped = pts.iter().all(|p| {
            let [x, y, z] = p.coords();
            poly.eval_raw(f, [y, x, z]).is_zero()
        });
        if !swapped {
            failures.push(json!({"mu": label, "reason": "point set not symmetric in X, Y"}));
        }
        if pts.iter().any(|p| {
            let [x, y, z] = p.coords();
            !x.is_zero() && !y.is_zero() && !z.is_zero() && f.square(x) != f.square(y)
        }) {
            with_affine_chord += 1;
        }
    }
    Outcome {
        status: verdict(failures.total == 0),
        domain: "all mu' != 0".into(),
        witnesses: json!({
            "curves": q - 1,
            "point_count_range": [min_n, max_n],
            "bounds": [q as i64 - 2, q as i64 + 4],
            "curves_with_affine_point_xy_nonzero_x2_ne_y2": with_affine_chord,
            "failures": failures.total,
            "first_failures": failures.first,
        }),
    }
}

fn oracle_equivalence(ctx: &Ctx) -> Outcome {
    let f = ctx.conic.field();
    let mut checked = 0u64;
    let mut mismatches = Vec::new();
    let mut literal_disagree = Vec::new();
    for r in ctx.plane().points().filter(|&r| !ctx.conic.is_on_conic(r)) {
        checked += 1;
        let proj = ctx.conic.is_h_covered_projective(r).unwrap();
        let direct = ctx.h_covered(r);
        if proj != direct {
            mismatches.push(r);
        }
        // unrefined test: nonzero squares only, fixed points allowed
        let literal = f.nonzero().filter(|&x| f.is_nonzero_square(x)).any(|x| {
            matches!(ctx.conic.phi(r, ExtParam::Finite(x)), Ok(ExtParam::Finite(y)) if f.is_nonzero_square(y))
        });
        if literal != direct {
            literal_disagree.push(r);
        }
    }
    Outcome {
        status: verdict(mismatches.is_empty()),
        domain: "all points off the conic".into(),
        witnesses: json!({
            "checked": checked,
            "mismatches": mismatches.len(),
            "first_mismatches": examples_json(&mismatches),
            "unrefined_test_disagreements": literal_disagree.len(),
            "first_unrefined_disagreements": examples_json(&literal_disagree),
        }),
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Text,
}

impl FromStr for Format {
    type Err = ClaimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "text" | "txt" => Ok(Format::Text),
            _ => Err(ClaimError::UnknownFormat(s.to_string())),
        }
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// One report is emitted as a JSON object, several as an array.
pub fn emit(reports: &[ClaimReport], format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = if reports.len() == 1 {
                serde_json::to_string_pretty(&reports[0])
            } else {
                serde_json::to_string_pretty(reports)
            }
            .expect("reports serialize");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut s = String::from("claim,q,status,domain,elapsed_ms,witnesses\n");
            for r in reports {
                for qr in &r.q_results {
                    let _ = writeln!(
                        s,
                        "{},{},{},{},{},{}",
                        r.claim,
                        qr.q,
                        qr.status.as_str(),
                        csv_field(&qr.domain),
                        qr.elapsed_ms,
                        csv_field(&qr.witnesses.to_string())
                    );
                }
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for r in reports {
                let _ = writeln!(s, "{} [{}]", r.claim, r.status.as_str());
                let _ = writeln!(s, "  {}", r.anchor);
                for qr in &r.q_results {
                    let _ = writeln!(
                        s,
                        "  q={:<5} {:<9} {:>7} ms  {}",
                        qr.q,
                        qr.status.as_str(),
                        qr.elapsed_ms,
                        qr.domain
                    );
                }
            }
            s
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIXED: RunOptions = RunOptions { timing: false };

    fn run(id: ClaimId, qs: &[u32]) -> ClaimReport {
        run_claim(id, qs, FIXED).unwrap()
    }

    #[test]
    fn registry() {
        assert_eq!(list_claims().len(), 13);
        for id in ClaimId::ALL {
            assert_eq!(id.as_str().parse::<ClaimId>().unwrap(), id);
        }
        assert!(matches!("nope".parse::<ClaimId>(), Err(ClaimError::UnknownClaim(_))));
        assert!(matches!("xml".parse::<Format>(), Err(ClaimError::UnknownFormat(_))));
    }

    #[test]
    fn q_lists() {
        assert_eq!(parse_q_list("7").unwrap(), vec![7]);
        assert_eq!(parse_q_list("13,7, 9").unwrap(), vec![7, 9, 13]);
        assert_eq!(parse_q_list("17..31").unwrap(), vec![17, 19, 23, 25, 27, 29, 31]);
        assert_eq!(parse_q_list("3..9,25").unwrap(), vec![3, 5, 7, 9, 25]);
        assert_eq!(parse_q_list("8"), Err(ClaimError::BadQ(8)));
        assert!(parse_q_list("9..5").is_err());
        assert!(parse_q_list("").is_err());
        assert!(parse_q_list("a..b").is_err());
        assert!(run_claim(ClaimId::CaseAb0, &[15], FIXED).is_err());
    }

    #[test]
    fn status_combination() {
        use Status::*;
        assert_eq!(Status::combine([Verified, Skipped]), Verified);
        assert_eq!(Status::combine([Verified, Partial]), Partial);
        assert_eq!(Status::combine([Partial, Refuted]), Refuted);
        assert_eq!(Status::combine([Skipped]), Skipped);
    }

    #[test]
    fn small_fields_are_informational() {
        let r = run(ClaimId::LemmaCoveredAbc, &[7, 17]);
        let small = r.result(7).unwrap();
        assert_eq!(small.status, Status::Skipped);
        assert_eq!(small.witnesses["outcome_if_asserted"], "REFUTED");
        assert!(small.witnesses["details"]["h_free"]
            .as_array()
            .unwrap()
            .contains(&json!([1, 1, 3])));
        assert_eq!(r.result(17).unwrap().status, Status::Verified);
        assert_eq!(r.status, Status::Verified);
    }

    #[test]
    fn complete_for_small_large_q() {
        let r = run(ClaimId::TheoremComplete, &[17, 19, 23, 25, 27, 29, 31]);
        assert_eq!(r.status, Status::Verified);
        let r9 = run(ClaimId::TheoremComplete, &[9]);
        assert_eq!(r9.result(9).unwrap().witnesses["details"]["free_count"].as_u64().unwrap() > 0, true);
    }

    #[test]
    fn every_claim_verifies_near_threshold() {
        for id in ClaimId::ALL {
            let qs: &[u32] = match id {
                ClaimId::SmallQ => &[9],
                ClaimId::CurveSegre => &[7, 17],
                _ => &[17, 19],
            };
            let r = run(id, qs);
            assert_eq!(r.status, Status::Verified, "{id}: {}", emit(&[r.clone()], Format::Json));
        }
    }

    #[test]
    fn cases_hold_at_every_small_q() {
        for id in [ClaimId::CaseC0, ClaimId::CaseAb0, ClaimId::Lemma001, ClaimId::OracleEquivalence] {
            assert_eq!(run(id, &[3, 5, 7, 9, 11, 13]).status, Status::Verified, "{id}");
        }
    }

    #[test]
    fn unrefined_test_fails_at_seven() {
        let r = run(ClaimId::OracleEquivalence, &[7]);
        let w = &r.result(7).unwrap().witnesses;
        assert_eq!(w["mismatches"], 0);
        assert!(w["unrefined_test_disagreements"].as_u64().unwrap() > 0);
    }

    #[test]
    fn emission_formats() {
        let reports = vec![run(ClaimId::CaseAb0, &[5, 7]), run(ClaimId::Lemma001, &[5])];
        let json = emit(&reports, Format::Json);
        let back: Vec<ClaimReport> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, reports);
        let one = emit(&reports[..1], Format::Json);
        let back: ClaimReport = serde_json::from_str(&one).unwrap();
        assert_eq!(back, reports[0]);
        let csv = emit(&reports, Format::Csv);
        assert_eq!(csv.lines().count(), 1 + 3);
        assert!(csv.lines().nth(1).unwrap().starts_with("case-ab0,5,VERIFIED,"));
        let text = emit(&reports, Format::Text);
        assert!(text.contains("lemma-001 [VERIFIED]"));
    }

    #[test]
    fn deterministic_reports() {
        let a = emit(&[run(ClaimId::CorollaryHfree, &[17, 19])], Format::Json);
        let b = emit(&[run(ClaimId::CorollaryHfree, &[17, 19])], Format::Json);
        assert_eq!(a, b);
    }
}
