//! Plane projective curves over GF(q): rational points, singular points,
//! multiplicities, tangent cones, genus bookkeeping and Hasse–Weil checks.
//!
//! A curve is the zero set of a [`HomPoly`]. Local questions at a point `P`
//! are answered by moving `P` to `(0,0,1)` with a linear change of
//! coordinates and reading off the lowest-degree part of the result.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{FieldElem, FieldError, FieldSpec};
use crate::plane::{Plane, PlaneError, ProjLine, ProjPoint};
use crate::poly::UniPoly;

/// Extension fields up to this order are scanned for conjugate singular points.
pub const EXTENSION_SCAN_LIMIT: u64 = 1400;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CurveError {
    #[error("monomial {exp:?} does not have total degree {degree}")]
    WrongDegree { exp: [u32; 3], degree: u32 },
    #[error("the zero polynomial does not define a curve")]
    ZeroPolynomial,
    #[error("point {0} is not on the curve")]
    NotOnCurve(ProjPoint),
    #[error("point {0} is not a singular point of the curve")]
    NotSingular(ProjPoint),
    #[error("the line through {0} and {1} is contained in the curve")]
    LineContained(ProjPoint, ProjPoint),
    #[error("invalid curve parameters: {0}")]
    BadParameters(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Plane(#[from] PlaneError),
}

type Exp = [u32; 3];
type Terms = BTreeMap<Exp, FieldElem>;

fn add_term(f: &FieldSpec, terms: &mut Terms, exp: Exp, c: FieldElem) {
    if c.is_zero() {
        return;
    }
    let slot = terms.entry(exp).or_insert(FieldElem::ZERO);
    *slot = f.add(*slot, c);
    if slot.is_zero() {
        terms.remove(&exp);
    }
}

fn mul_terms(f: &FieldSpec, a: &Terms, b: &Terms) -> Terms {
    let mut out = Terms::new();
    for (ea, &ca) in a {
        for (eb, &cb) in b {
            let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]];
            add_term(f, &mut out, e, f.mul(ca, cb));
        }
    }
    out
}

fn linear_terms(coeffs: [FieldElem; 3]) -> Terms {
    let mut t = Terms::new();
    for (i, c) in coeffs.into_iter().enumerate() {
        if !c.is_zero() {
            let mut e = [0; 3];
            e[i] = 1;
            t.insert(e, c);
        }
    }
    t
}

fn eval_terms(f: &FieldSpec, terms: &Terms, v: [FieldElem; 3]) -> FieldElem {
    terms.iter().fold(FieldElem::ZERO, |acc, (e, &c)| {
        let m = f.mul(
            f.mul(f.pow(v[0], e[0] as u64), f.pow(v[1], e[1] as u64)),
            f.pow(v[2], e[2] as u64),
        );
        f.add(acc, f.mul(c, m))
    })
}

/// A homogeneous polynomial in X, Y, Z with sparse coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomPoly {
    degree: u32,
    terms: Terms,
}

impl HomPoly {
    /// Builds a nonzero form of the given degree; zero coefficients are dropped
    /// and repeated monomials are summed.
    pub fn new(
        f: &FieldSpec,
        degree: u32,
        monomials: impl IntoIterator<Item = (Exp, FieldElem)>,
    ) -> Result<Self, CurveError> {
        let mut terms = Terms::new();
        for (exp, c) in monomials {
            if exp.iter().sum::<u32>() != degree {
                return Err(CurveError::WrongDegree { exp, degree });
            }
            add_term(f, &mut terms, exp, c);
        }
        if terms.is_empty() {
            return Err(CurveError::ZeroPolynomial);
        }
        Ok(HomPoly { degree, terms })
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn coefficient(&self, exp: Exp) -> FieldElem {
        self.terms.get(&exp).copied().unwrap_or(FieldElem::ZERO)
    }

    pub fn monomials(&self) -> impl Iterator<Item = (Exp, FieldElem)> + '_ {
        self.terms.iter().map(|(&e, &c)| (e, c))
    }

    pub fn eval(&self, f: &FieldSpec, p: ProjPoint) -> FieldElem {
        eval_terms(f, &self.terms, p.coords())
    }

    pub fn eval_raw(&self, f: &FieldSpec, v: [FieldElem; 3]) -> FieldElem {
        eval_terms(f, &self.terms, v)
    }

    /// The three partial derivatives; a zero derivative is an empty map.
    fn partial_terms(&self, f: &FieldSpec) -> [Terms; 3] {
        [0, 1, 2].map(|var| {
            let mut out = Terms::new();
            for (e, &c) in &self.terms {
                if e[var] > 0 {
                    let mut d = *e;
                    d[var] -= 1;
                    add_term(f, &mut out, d, f.mul(f.from_int(e[var] as i64), c));
                }
            }
            out
        })
    }

    /// `(F_X, F_Y, F_Z)`, with `None` standing for an identically zero derivative.
    pub fn partials(&self, f: &FieldSpec) -> [Option<HomPoly>; 3] {
        let degree = self.degree.saturating_sub(1);
        self.partial_terms(f)
            .map(|terms| (!terms.is_empty()).then_some(HomPoly { degree, terms }))
    }

    /// `F(M·v)` where column `j` of `M` is `cols[j]`.
    fn substitute(&self, f: &FieldSpec, cols: [[FieldElem; 3]; 3]) -> Terms {
        // X_i ↦ Σ_j cols[j][i] · V_j
        let images: [Terms; 3] = [0, 1, 2].map(|i| linear_terms([cols[0][i], cols[1][i], cols[2][i]]));
        let mut out = Terms::new();
        for (e, &c) in &self.terms {
            let mut prod = Terms::from([([0, 0, 0], c)]);
            for var in 0..3 {
                for _ in 0..e[var] {
                    prod = mul_terms(f, &prod, &images[var]);
                }
            }
            for (pe, pc) in prod {
                add_term(f, &mut out, pe, pc);
            }
        }
        out
    }

    /// Exact quotient by a linear form, if it divides.
    pub fn divide_by_linear(&self, f: &FieldSpec, l: ProjLine) -> Option<HomPoly> {
        let coeffs = l.coords();
        let v = coeffs.iter().position(|c| !c.is_zero())?;
        let lead_inv = f.inv(coeffs[v]).unwrap();
        // L / l_v = X_v + ρ
        let mut rho = Terms::new();
        for j in (0..3).filter(|&j| j != v) {
            let mut e = [0; 3];
            e[j] = 1;
            add_term(f, &mut rho, e, f.mul(coeffs[j], lead_inv));
        }
        let n = self.terms.keys().map(|e| e[v]).max().unwrap_or(0) as usize;
        // slices[i] = coefficient of X_v^i, a form in the other variables
        let mut slices = vec![Terms::new(); n + 1];
        for (e, &c) in &self.terms {
            let mut rest = *e;
            rest[v] = 0;
            slices[e[v] as usize].insert(rest, c);
        }
        if n == 0 {
            // X_v does not occur; the remainder is F itself
            return None;
        }
        let mut b = vec![Terms::new(); n];
        b[n - 1] = slices[n].clone();
        for i in (1..n).rev() {
            let mut next = slices[i].clone();
            for (e, c) in mul_terms(f, &rho, &b[i]) {
                add_term(f, &mut next, e, f.neg(c));
            }
            b[i - 1] = next;
        }
        let mut rem = slices[0].clone();
        for (e, c) in mul_terms(f, &rho, &b[0]) {
            add_term(f, &mut rem, e, f.neg(c));
        }
        if !rem.is_empty() {
            return None;
        }
        let mut quotient = Terms::new();
        for (i, slice) in b.iter().enumerate() {
            for (e, &c) in slice {
                let mut ee = *e;
                ee[v] += i as u32;
                add_term(f, &mut quotient, ee, f.mul(c, lead_inv));
            }
        }
        Some(HomPoly {
            degree: self.degree - 1,
            terms: quotient,
        })
    }

    pub fn to_file(&self, f: &FieldSpec) -> CurveFile {
        CurveFile {
            q: f.q(),
            d: self.degree,
            monomials: self
                .terms
                .iter()
                .map(|(&exp, &c)| Monomial {
                    exp,
                    coeff: c.value(),
                })
                .collect(),
        }
    }
}

/// `{q, d, monomials: [{exp: [i,j,k], coeff: n}, …]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveFile {
    pub q: u32,
    pub d: u32,
    pub monomials: Vec<Monomial>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Monomial {
    pub exp: [u32; 3],
    pub coeff: u32,
}

impl CurveFile {
    pub fn to_poly(&self, f: &FieldSpec) -> Result<HomPoly, CurveError> {
        let monomials = self
            .monomials
            .iter()
            .map(|m| Ok((m.exp, f.elem(m.coeff as u64)?)))
            .collect::<Result<Vec<_>, FieldError>>()?;
        HomPoly::new(f, self.d, monomials)
    }
}

/// `(cX²Z² − bZ⁴) − μY²(aX² − cZ²)`.
pub fn build_segre_curve(
    f: &FieldSpec,
    a: FieldElem,
    b: FieldElem,
    c: FieldElem,
    mu: FieldElem,
) -> Result<HomPoly, CurveError> {
    if a.is_zero() || b.is_zero() || c.is_zero() {
        return Err(CurveError::BadParameters("need abc ≠ 0".into()));
    }
    if f.mul(a, b) == f.square(c) {
        return Err(CurveError::BadParameters("need ab ≠ c²".into()));
    }
    if mu.is_zero() || f.is_nonzero_square(mu) {
        return Err(CurveError::BadParameters("μ must be a nonsquare".into()));
    }
    HomPoly::new(
        f,
        4,
        [
            ([2, 0, 2], c),
            ([0, 0, 4], f.neg(b)),
            ([2, 2, 0], f.neg(f.mul(mu, a))),
            ([0, 2, 2], f.mul(mu, c)),
        ],
    )
}

/// `X²Y² − μ′Z²(X² + Y²)`.
pub fn build_quartic(f: &FieldSpec, mu: FieldElem) -> Result<HomPoly, CurveError> {
    if mu.is_zero() {
        return Err(CurveError::BadParameters("need μ′ ≠ 0".into()));
    }
    let m = f.neg(mu);
    HomPoly::new(f, 4, [([2, 2, 0], FieldElem::ONE), ([2, 0, 2], m), ([0, 2, 2], m)])
}

pub fn rational_points(plane: &Plane, poly: &HomPoly) -> Vec<ProjPoint> {
    let f = plane.field();
    plane.points().filter(|&p| poly.eval(f, p).is_zero()).collect()
}

fn is_singular_raw(f: &FieldSpec, poly: &HomPoly, partials: &[Terms; 3], v: [FieldElem; 3]) -> bool {
    poly.eval_raw(f, v).is_zero() && partials.iter().all(|d| eval_terms(f, d, v).is_zero())
}

/// Rational points where `F` and all three partials vanish.
pub fn singular_points(plane: &Plane, poly: &HomPoly) -> Vec<ProjPoint> {
    singular_among(plane.field(), poly, &rational_points(plane, poly))
}

fn singular_among(f: &FieldSpec, poly: &HomPoly, points: &[ProjPoint]) -> Vec<ProjPoint> {
    let partials = poly.partial_terms(f);
    points
        .iter()
        .copied()
        .filter(|p| is_singular_raw(f, poly, &partials, p.coords()))
        .collect()
}

/// `F` in coordinates where `p` sits at `(0,0,1)`: columns `e_a, e_b, p`
/// with `a, b` the two coordinates other than the first nonzero one of `p`.
fn local_frame(p: ProjPoint) -> ([[FieldElem; 3]; 3], usize, [usize; 2]) {
    let c = p.coords();
    let pivot = c.iter().position(|x| !x.is_zero()).unwrap();
    let others = match pivot {
        0 => [1, 2],
        1 => [0, 2],
        _ => [0, 1],
    };
    let unit = |i: usize| {
        let mut v = [FieldElem::ZERO; 3];
        v[i] = FieldElem::ONE;
        v
    };
    ([unit(others[0]), unit(others[1]), c], pivot, others)
}

struct Local {
    /// Multiplicity `m`.
    m: u32,
    /// Tangent cone as `Σ cone[i]·Xⁱ·Y^(m−i)` in local coordinates.
    cone: Vec<FieldElem>,
    pivot: usize,
    others: [usize; 2],
}

fn local(plane: &Plane, poly: &HomPoly, p: ProjPoint) -> Result<Local, CurveError> {
    let f = plane.field();
    if !poly.eval(f, p).is_zero() {
        return Err(CurveError::NotOnCurve(p));
    }
    let (cols, pivot, others) = local_frame(p);
    let g = poly.substitute(f, cols);
    // after Z = 1 the local degree of X^i Y^j Z^k is i + j
    let m = g.keys().map(|e| e[0] + e[1]).min().expect("F is nonzero");
    let mut cone = vec![FieldElem::ZERO; m as usize + 1];
    for (e, &c) in &g {
        if e[0] + e[1] == m {
            cone[e[0] as usize] = c;
        }
    }
    Ok(Local {
        m,
        cone,
        pivot,
        others,
    })
}

/// Multiplicity of the curve at a point on it.
pub fn multiplicity_at(plane: &Plane, poly: &HomPoly, p: ProjPoint) -> Result<u32, CurveError> {
    Ok(local(plane, poly, p)?.m)
}

/// Tangent cone at `p` as coefficients of `Xⁱ·Y^(m−i)`, `i = 0..=m`, in
/// local coordinates.
pub fn tangent_cone(plane: &Plane, poly: &HomPoly, p: ProjPoint) -> Result<Vec<FieldElem>, CurveError> {
    Ok(local(plane, poly, p)?.cone)
}

fn cone_poly(cone: &[FieldElem]) -> UniPoly {
    UniPoly::new(cone.to_vec())
}

/// Whether a singular point has `m` distinct tangents over the algebraic
/// closure, i.e. the tangent cone is a squarefree binary form.
pub fn is_ordinary(plane: &Plane, poly: &HomPoly, p: ProjPoint) -> Result<bool, CurveError> {
    let loc = local(plane, poly, p)?;
    if loc.m < 2 {
        return Err(CurveError::NotSingular(p));
    }
    Ok(binary_form_squarefree(plane.field(), &loc.cone))
}

/// Squarefreeness of `Σ cᵢ Xⁱ Y^(m−i)`: dehomogenize at `Y = 1`; the point
/// `Y = 0` may be a root at most once.
pub fn binary_form_squarefree(f: &FieldSpec, cone: &[FieldElem]) -> bool {
    let m = cone.len() - 1;
    let b = cone_poly(cone);
    match b.degree() {
        None => false,
        Some(d) => d + 1 >= m && (d == 0 || b.is_squarefree(f)),
    }
}

/// How often the line `PV` occurs among the tangents at `P`.
pub fn tangent_multiplicity(
    plane: &Plane,
    poly: &HomPoly,
    p: ProjPoint,
    v: ProjPoint,
) -> Result<usize, CurveError> {
    if p == v {
        return Err(PlaneError::SamePoint(p).into());
    }
    let f = plane.field();
    let loc = local(plane, poly, p)?;
    let (pc, vc) = (p.coords(), v.coords());
    // v = x·e_a + y·e_b + z·p
    let z = f.div(vc[loc.pivot], pc[loc.pivot])?;
    let x = f.sub(vc[loc.others[0]], f.mul(z, pc[loc.others[0]]));
    let y = f.sub(vc[loc.others[1]], f.mul(z, pc[loc.others[1]]));
    let b = cone_poly(&loc.cone);
    let deg = b.degree().unwrap_or(0);
    Ok(if y.is_zero() {
        loc.m as usize - deg
    } else {
        b.root_multiplicity(f, f.div(x, y)?).unwrap_or(0)
    })
}

/// Order of vanishing of `t ↦ F(U + tV)` at `t = 0`.
pub fn intersection_multiplicity(
    plane: &Plane,
    poly: &HomPoly,
    p: ProjPoint,
    v: ProjPoint,
) -> Result<u32, CurveError> {
    let f = plane.field();
    if p == v {
        return Err(PlaneError::SamePoint(p).into());
    }
    if !poly.eval(f, p).is_zero() {
        return Err(CurveError::NotOnCurve(p));
    }
    let (u, w) = (p.coords(), v.coords());
    let lines: [UniPoly; 3] = [0, 1, 2].map(|i| UniPoly::linear(u[i], w[i]));
    let mut h = UniPoly::zero();
    for (e, c) in poly.monomials() {
        let mut term = UniPoly::constant(c);
        for var in 0..3 {
            for _ in 0..e[var] {
                term = term.mul(f, &lines[var]);
            }
        }
        h = h.add(f, &term);
    }
    h.order_at_zero()
        .map(|o| o as u32)
        .ok_or(CurveError::LineContained(p, v))
}

/// A rational line through `p` that is a component of the curve.
pub fn linear_component_through(plane: &Plane, poly: &HomPoly, p: ProjPoint) -> Option<ProjLine> {
    plane
        .lines_through(p)
        .into_iter()
        .find(|&l| poly.divide_by_linear(plane.field(), l).is_some())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SingularInfo {
    pub point: ProjPoint,
    pub multiplicity: u32,
    pub ordinary: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Genus {
    Value(i64),
    NotApplicable(String),
}

impl Genus {
    pub fn value(&self) -> Option<i64> {
        match self {
            Genus::Value(g) => Some(*g),
            Genus::NotApplicable(_) => None,
        }
    }
}

fn binom2(n: i64) -> i64 {
    n * (n - 1) / 2
}

pub fn singular_info(plane: &Plane, poly: &HomPoly) -> Vec<SingularInfo> {
    singular_info_among(plane, poly, &rational_points(plane, poly))
}

fn singular_info_among(plane: &Plane, poly: &HomPoly, points: &[ProjPoint]) -> Vec<SingularInfo> {
    singular_among(plane.field(), poly, points)
        .into_iter()
        .map(|p| {
            let loc = local(plane, poly, p).expect("singular points lie on the curve");
            SingularInfo {
                point: p,
                multiplicity: loc.m,
                ordinary: binary_form_squarefree(plane.field(), &loc.cone),
            }
        })
        .collect()
}

/// Singular points over GF(q^degree) that are not GF(q)-rational.
pub fn nonrational_singular_points(
    plane: &Plane,
    poly: &HomPoly,
    degree: u32,
) -> Result<usize, CurveError> {
    let f = plane.field();
    let (ext, embed) = f.extension(degree)?;
    let mut in_base = vec![false; ext.q() as usize];
    for &e in &embed {
        in_base[e.value() as usize] = true;
    }
    let lifted = HomPoly {
        degree: poly.degree,
        terms: poly
            .terms
            .iter()
            .map(|(&e, &c)| (e, embed[c.value() as usize]))
            .collect(),
    };
    let big = Plane::new(ext.clone());
    let partials = lifted.partial_terms(&ext);
    Ok(big
        .points()
        .filter(|p| is_singular_raw(&ext, &lifted, &partials, p.coords()))
        .filter(|p| !p.coords().iter().all(|c| in_base[c.value() as usize]))
        .count())
}

/// `C(d−1, 2) − Σ C(m_P, 2)` over the singular points, when that formula
/// applies: every rational singular point is ordinary and no orbit of
/// conjugate singular points can be hiding. A Galois orbit of `j ≥ 2`
/// singular points uses up at least `j` of the remaining budget, so orbits
/// are only searched for (by scanning GF(q^j)) up to that budget.
pub fn genus_ordinary(plane: &Plane, poly: &HomPoly) -> Genus {
    genus_from(plane, poly, &singular_info(plane, poly))
}

fn genus_from(plane: &Plane, poly: &HomPoly, sing: &[SingularInfo]) -> Genus {
    if let Some(s) = sing.iter().find(|s| !s.ordinary) {
        return Genus::NotApplicable(format!("singular point {} is not ordinary", s.point));
    }
    let d = poly.degree as i64;
    let g = binom2(d - 1) - sing.iter().map(|s| binom2(s.multiplicity as i64)).sum::<i64>();
    let q = plane.q() as u64;
    for j in 2..=g.max(0) as u32 {
        if !matches!(q.checked_pow(j), Some(n) if n <= EXTENSION_SCAN_LIMIT) {
            return Genus::NotApplicable(format!(
                "conjugate singular points over GF({q}^{j}) not excluded"
            ));
        }
        match nonrational_singular_points(plane, poly, j) {
            Ok(0) => {}
            Ok(n) => {
                return Genus::NotApplicable(format!(
                    "{n} singular points over GF({q}^{j}) are not rational"
                ))
            }
            Err(e) => return Genus::NotApplicable(e.to_string()),
        }
    }
    Genus::Value(g)
}

/// Outcome of comparing a point count with `q + 1 ± (2g√q + slack)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HasseWeil {
    pub q: u32,
    pub count: u64,
    pub genus: u32,
    pub slack: u32,
    pub lower: f64,
    pub upper: f64,
    pub within: bool,
}

/// Decided exactly in integers: `|N − (q+1)| − slack ≤ 2g√q` iff it is
/// non-positive or its square is at most `4g²q`.
pub fn hasse_weil_check(q: u32, count: u64, genus: u32, slack: u32) -> HasseWeil {
    let dev = (count as i64 - (q as i64 + 1)).unsigned_abs();
    let excess = dev.saturating_sub(slack as u64);
    let g = genus as u64;
    let within = excess == 0 || excess * excess <= 4 * g * g * q as u64;
    let width = 2.0 * genus as f64 * (q as f64).sqrt() + slack as f64;
    HasseWeil {
        q,
        count,
        genus,
        slack,
        lower: q as f64 + 1.0 - width,
        upper: q as f64 + 1.0 + width,
        within,
    }
}

/// Whether `2q − 6 ≤ q + 1 + 2√q`, decided exactly.
pub fn weil_lower_count_fits(q: u64) -> bool {
    q <= 7 || (q - 7) * (q - 7) <= 4 * q
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurveReport {
    pub q: u32,
    pub degree: u32,
    pub rational_points: u64,
    pub singular_points: Vec<SingularInfo>,
    pub genus: Genus,
    /// Present when a genus is available.
    pub hasse_weil: Option<HasseWeil>,
}

/// Full analysis; `slack` defaults to the number of rational singular points.
pub fn analyze(plane: &Plane, poly: &HomPoly, slack: Option<u32>) -> CurveReport {
    let points = rational_points(plane, poly);
    let n = points.len() as u64;
    let sing = singular_info_among(plane, poly, &points);
    let genus = genus_from(plane, poly, &sing);
    let slack = slack.unwrap_or(sing.len() as u32);
    let hasse_weil = genus
        .value()
        .filter(|&g| g >= 0)
        .map(|g| hasse_weil_check(plane.q(), n, g as u32, slack));
    CurveReport {
        q: plane.q(),
        degree: poly.degree,
        rational_points: n,
        singular_points: sing,
        genus,
        hasse_weil,
    }
}
