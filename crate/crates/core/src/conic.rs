//! The conic `C = Z(XY − Z²)`, the half-conic `H = {(1, s⁴, s²)}`, point
//! classification and the involution induced on `C` by a point off it.
//!
//! `C` is parametrized by `s ↦ (1, s², s)` with `∞ ↦ (0, 1, 0)`. For a
//! point `R = (a, b, c)` off the conic, the second intersection of the line
//! through `R` and the conic point with parameter `s` has parameter
//! `(cs − b)/(as − c)`.

use serde::Serialize;
use thiserror::Error;

use crate::field::{ExtParam, FieldElem, FieldSpec};
use crate::plane::{Plane, PlaneError, ProjLine, ProjPoint};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConicError {
    #[error("point {0} lies on the conic")]
    OnConic(ProjPoint),
    #[error("point {0} does not lie on the conic")]
    NotOnConic(ProjPoint),
    #[error("point {0} belongs to H; coverage is defined only outside it")]
    InH(ProjPoint),
    #[error(transparent)]
    Plane(#[from] PlaneError),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PointClass {
    OnConic,
    /// On no tangent of the conic.
    Internal,
    /// On two tangents of the conic.
    External,
}

/// Conic data for one field, built once and shared.
#[derive(Clone, Debug)]
pub struct ConicContext {
    plane: Plane,
    /// Conic points in parameter order: s = 0, 1, …, q−1, then ∞.
    conic_points: Vec<ProjPoint>,
    tangent_count: Vec<u8>,
    class: Vec<PointClass>,
    /// Whether `XY − Z²` is a nonzero square at external points.
    external_is_square: bool,
}

/// `H` and `H' = C \ H`, with lookup tables for secant queries.
#[derive(Clone, Debug)]
pub struct HSets {
    /// Parameters `t` of the points `(1, t², t)` of `H`; these are the squares, zero included.
    pub params: Vec<FieldElem>,
    pub h: Vec<ProjPoint>,
    pub h_prime: Vec<ProjPoint>,
    in_h: Vec<bool>,
    /// Indexed by line index: true for lines through two points of `H`.
    secant: Vec<bool>,
}

impl HSets {
    pub fn contains(&self, plane: &Plane, p: ProjPoint) -> bool {
        self.in_h[plane.index_of(p)]
    }

    pub fn is_secant(&self, plane: &Plane, l: ProjLine) -> bool {
        self.secant[plane.line_index(l)]
    }
}

impl ConicContext {
    pub fn new(field: FieldSpec) -> Self {
        let plane = Plane::new(field);
        let f = plane.field().clone();
        let mut conic_points: Vec<ProjPoint> = f
            .elements()
            .map(|s| plane.normalize([FieldElem::ONE, f.square(s), s]).unwrap())
            .collect();
        conic_points.push(plane.normalize([FieldElem::ZERO, FieldElem::ONE, FieldElem::ZERO]).unwrap());

        let mut tangent_count = vec![0u8; plane.len()];
        for &p in &conic_points {
            for x in plane.points_on_line(tangent_line_raw(&plane, p)) {
                tangent_count[plane.index_of(x)] += 1;
            }
        }
        let mut on_conic = vec![false; plane.len()];
        for &p in &conic_points {
            on_conic[plane.index_of(p)] = true;
        }
        let class = (0..plane.len())
            .map(|i| match (on_conic[i], tangent_count[i]) {
                (true, _) => PointClass::OnConic,
                (false, 0) => PointClass::Internal,
                (false, _) => PointClass::External,
            })
            .collect();

        // (0,0,1) lies on the tangent Y = 0 at (1,0,0), so it is external.
        let witness = plane.normalize([FieldElem::ZERO, FieldElem::ZERO, FieldElem::ONE]).unwrap();
        let external_is_square = f.is_nonzero_square(form_value(&f, witness));

        ConicContext {
            plane,
            conic_points,
            tangent_count,
            class,
            external_is_square,
        }
    }

    pub fn plane(&self) -> &Plane {
        &self.plane
    }

    pub fn field(&self) -> &FieldSpec {
        self.plane.field()
    }

    pub fn q(&self) -> u32 {
        self.plane.q()
    }

    pub fn conic_points(&self) -> &[ProjPoint] {
        &self.conic_points
    }

    /// Value of `XY − Z²` at the canonical representative.
    pub fn form_value(&self, p: ProjPoint) -> FieldElem {
        form_value(self.field(), p)
    }

    pub fn is_on_conic(&self, p: ProjPoint) -> bool {
        self.form_value(p).is_zero()
    }

    /// Classification by counting tangent lines through the point.
    pub fn classify_point(&self, p: ProjPoint) -> PointClass {
        self.class[self.plane.index_of(p)]
    }

    pub fn tangents_through(&self, p: ProjPoint) -> u8 {
        self.tangent_count[self.plane.index_of(p)]
    }

    /// Classification from the square class of `XY − Z²`, oriented by a
    /// known external point. Must agree with [`Self::classify_point`].
    pub fn classify_by_form(&self, p: ProjPoint) -> PointClass {
        let v = self.form_value(p);
        if v.is_zero() {
            PointClass::OnConic
        } else if self.field().is_nonzero_square(v) == self.external_is_square {
            PointClass::External
        } else {
            PointClass::Internal
        }
    }

    pub fn tangent_line(&self, p: ProjPoint) -> Result<ProjLine, ConicError> {
        if !self.is_on_conic(p) {
            return Err(ConicError::NotOnConic(p));
        }
        Ok(tangent_line_raw(&self.plane, p))
    }

    pub fn param_to_point(&self, s: ExtParam) -> ProjPoint {
        match s {
            ExtParam::Finite(v) => self.conic_points[v.value() as usize],
            ExtParam::Infinity => self.conic_points[self.q() as usize],
        }
    }

    pub fn point_to_param(&self, p: ProjPoint) -> Result<ExtParam, ConicError> {
        if !self.is_on_conic(p) {
            return Err(ConicError::NotOnConic(p));
        }
        let [x, _, z] = p.coords();
        Ok(if x.is_zero() {
            ExtParam::Infinity
        } else {
            ExtParam::Finite(z)
        })
    }

    pub fn build_h(&self) -> HSets {
        let f = self.field();
        let plane = &self.plane;
        let params: Vec<FieldElem> = f.elements().filter(|&t| f.is_square_or_zero(t)).collect();
        let h: Vec<ProjPoint> = params
            .iter()
            .map(|&t| self.param_to_point(ExtParam::Finite(t)))
            .collect();
        let mut in_h = vec![false; plane.len()];
        for &p in &h {
            in_h[plane.index_of(p)] = true;
        }
        let h_prime = self
            .conic_points
            .iter()
            .copied()
            .filter(|&p| !in_h[plane.index_of(p)])
            .collect();
        let mut secant = vec![false; plane.len()];
        for (i, &a) in h.iter().enumerate() {
            for &b in &h[i + 1..] {
                secant[plane.line_index(plane.line_through(a, b).unwrap())] = true;
            }
        }
        HSets {
            params,
            h,
            h_prime,
            in_h,
            secant,
        }
    }

    fn off_conic_coords(&self, r: ProjPoint) -> Result<[FieldElem; 3], ConicError> {
        if self.is_on_conic(r) {
            return Err(ConicError::OnConic(r));
        }
        Ok(r.coords())
    }

    /// The projectivity `s ↦ (cs − b)/(as − c)` of the parameter line
    /// induced by `R = (a, b, c)`.
    pub fn phi(&self, r: ProjPoint, s: ExtParam) -> Result<ExtParam, ConicError> {
        let [a, b, c] = self.off_conic_coords(r)?;
        Ok(phi_raw(self.field(), [a, b, c], s))
    }

    /// Second intersection of the line `RP` with the conic; `P` itself when
    /// `RP` is tangent.
    pub fn tau(&self, r: ProjPoint, p: ProjPoint) -> Result<ProjPoint, ConicError> {
        let s = self.point_to_param(p)?;
        Ok(self.param_to_point(self.phi(r, s)?))
    }

    /// Coverage through the parameter map: some square-or-zero `x` has
    /// `φ_R(x)` square-or-zero and different from `x`.
    pub fn is_h_covered_projective(&self, r: ProjPoint) -> Result<bool, ConicError> {
        let coords = self.off_conic_coords(r)?;
        let f = self.field();
        Ok(f.elements().filter(|&x| f.is_square_or_zero(x)).any(|x| {
            match phi_raw(f, coords, ExtParam::Finite(x)) {
                ExtParam::Finite(y) => y != x && f.is_square_or_zero(y),
                ExtParam::Infinity => false,
            }
        }))
    }

    /// Coverage straight from the definition: `R` lies on a line joining two
    /// distinct points of `H`.
    pub fn is_h_covered_direct(&self, hs: &HSets, r: ProjPoint) -> Result<bool, ConicError> {
        if hs.contains(&self.plane, r) {
            return Err(ConicError::InH(r));
        }
        Ok(hs.h.iter().any(|&p| {
            let l = self.plane.line_through(r, p).unwrap();
            hs.is_secant(&self.plane, l)
        }))
    }

    /// The distinguished point on `Z = 0`: `(1, 1, 0)` when q ≡ 3 (mod 4),
    /// otherwise `(1, n, 0)` with `n` the smallest nonsquare.
    pub fn choose_r0(&self) -> ProjPoint {
        let f = self.field();
        let b = if self.q() % 4 == 3 {
            FieldElem::ONE
        } else {
            f.smallest_nonsquare()
        };
        self.plane
            .normalize([FieldElem::ONE, b, FieldElem::ZERO])
            .unwrap()
    }
}

fn form_value(f: &FieldSpec, p: ProjPoint) -> FieldElem {
    let [x, y, z] = p.coords();
    f.sub(f.mul(x, y), f.square(z))
}

/// Tangent to `XY − Z²` at a conic point: the gradient `(y, x, −2z)`.
fn tangent_line_raw(plane: &Plane, p: ProjPoint) -> ProjLine {
    let f = plane.field();
    let [x, y, z] = p.coords();
    let two_z = f.add(z, z);
    plane.normalize_line([y, x, f.neg(two_z)]).unwrap()
}

fn phi_raw(f: &FieldSpec, [a, b, c]: [FieldElem; 3], s: ExtParam) -> ExtParam {
    match s {
        ExtParam::Finite(s) => {
            let den = f.sub(f.mul(a, s), c);
            if den.is_zero() {
                ExtParam::Infinity
            } else {
                let num = f.sub(f.mul(c, s), b);
                ExtParam::Finite(f.div(num, den).unwrap())
            }
        }
        // a = 0 forces c ≠ 0 off the conic, and then ∞ is fixed
        ExtParam::Infinity if a.is_zero() => ExtParam::Infinity,
        ExtParam::Infinity => ExtParam::Finite(f.div(c, a).unwrap()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{make_field, odd_prime_powers};

    fn ctx(q: u64) -> ConicContext {
        ConicContext::new(make_field(q).unwrap())
    }

    fn fin(f: &FieldSpec, n: u64) -> ExtParam {
        ExtParam::Finite(f.elem(n).unwrap())
    }

    #[test]
    fn parametrization() {
        let c = ctx(7);
        let f = c.field().clone();
        let pt = |e| c.plane().point(e).unwrap();
        assert_eq!(c.param_to_point(fin(&f, 3)), pt([1, 2, 3]));
        assert_eq!(c.param_to_point(ExtParam::Infinity), pt([0, 1, 0]));
        assert_eq!(c.point_to_param(pt([1, 1, 1])).unwrap(), fin(&f, 1));
        assert_eq!(
            c.point_to_param(pt([0, 0, 1])),
            Err(ConicError::NotOnConic(pt([0, 0, 1])))
        );
        // the only conic point with x = 0
        let with_x0: Vec<_> = c
            .plane()
            .points()
            .filter(|p| c.is_on_conic(*p) && p.coords()[0].is_zero())
            .collect();
        assert_eq!(with_x0, vec![pt([0, 1, 0])]);
    }

    #[test]
    fn conic_has_q_plus_one_points() {
        for q in [3, 5, 7, 9, 25, 27] {
            let c = ctx(q);
            let n = c.plane().points().filter(|&p| c.is_on_conic(p)).count();
            assert_eq!(n, q as usize + 1);
            assert_eq!(c.conic_points().len(), n);
        }
    }

    #[test]
    fn h_for_q7() {
        let c = ctx(7);
        let hs = c.build_h();
        let oracle: std::collections::BTreeSet<u32> = (0..7u32).map(|s| s.pow(4) % 7).collect();
        let want: Vec<_> = oracle
            .iter()
            .map(|&t| c.plane().point([1, (t * t % 7) as u64, t as u64]).unwrap())
            .collect();
        let mut got = hs.h.clone();
        got.sort();
        let mut want = want;
        want.sort();
        assert_eq!(got, want);
        assert_eq!(
            hs.params.iter().map(|e| e.value()).collect::<Vec<_>>(),
            vec![0, 1, 2, 4]
        );
    }

    #[test]
    fn h_partition() {
        for q in odd_prime_powers(3, 49) {
            let c = ctx(q as u64);
            let hs = c.build_h();
            let half = (q as usize + 1) / 2;
            assert_eq!(hs.h.len(), half);
            assert_eq!(hs.h_prime.len(), half);
            let y_inf = c.param_to_point(ExtParam::Infinity);
            assert!(hs.h_prime.contains(&y_inf));
            let mut all: Vec<_> = hs.h.iter().chain(&hs.h_prime).copied().collect();
            all.sort();
            let mut conic = c.conic_points().to_vec();
            conic.sort();
            assert_eq!(all, conic);
        }
        assert_eq!(ctx(9).build_h().h.len(), 5);
    }

    #[test]
    fn tangent_counting_classification() {
        for q in odd_prime_powers(3, 31) {
            let c = ctx(q as u64);
            let mut external = 0;
            for p in c.plane().points() {
                let t = c.tangents_through(p);
                if c.is_on_conic(p) {
                    assert_eq!(t, 1);
                } else {
                    assert!(t == 0 || t == 2, "q={q} {p} on {t} tangents");
                    external += (t == 2) as usize;
                }
                assert_eq!(c.classify_point(p), c.classify_by_form(p), "q={q} {p}");
            }
            let q = q as usize;
            assert_eq!(external, (q * q + q) / 2);
        }
    }

    #[test]
    fn classify_examples() {
        let c = ctx(7);
        let pt = |e| c.plane().point(e).unwrap();
        assert_eq!(c.classify_point(pt([1, 1, 1])), PointClass::OnConic);
        // brute force: count tangent lines of C through (0,0,1)
        let tangents: Vec<_> = c
            .conic_points()
            .iter()
            .map(|&p| c.tangent_line(p).unwrap())
            .collect();
        let through = tangents
            .iter()
            .filter(|&&l| c.plane().incident(pt([0, 0, 1]), l))
            .count();
        assert_eq!(through, 2);
        assert_eq!(c.classify_point(pt([0, 0, 1])), PointClass::External);
        for q in [3u64, 7, 11, 19, 23, 27] {
            let c = ctx(q);
            let p = c.plane().point([1, 1, 0]).unwrap();
            assert_eq!(c.classify_point(p), PointClass::Internal);
        }
    }

    #[test]
    fn phi_examples() {
        let c = ctx(7);
        let f = c.field().clone();
        let pt = |e| c.plane().point(e).unwrap();
        let r = pt([1, 1, 0]);
        assert_eq!(c.phi(r, fin(&f, 2)).unwrap(), fin(&f, 3));
        // oracle: second conic point on the line through R and (1,4,2)
        let l = c.plane().line_through(r, pt([1, 4, 2])).unwrap();
        let on: Vec<_> = c
            .conic_points()
            .iter()
            .copied()
            .filter(|&p| c.plane().incident(p, l))
            .collect();
        assert_eq!(on.len(), 2);
        assert!(on.contains(&pt([1, 2, 3])));
        assert_eq!(c.tau(r, pt([1, 4, 2])).unwrap(), pt([1, 2, 3]));

        let r = pt([1, 1, 3]);
        assert_eq!(c.phi(r, fin(&f, 2)).unwrap(), fin(&f, 2));
        assert_eq!(c.phi(r, fin(&f, 4)).unwrap(), fin(&f, 4));
        assert_eq!(c.phi(pt([1, 1, 1]), fin(&f, 2)), Err(ConicError::OnConic(pt([1, 1, 1]))));
    }

    #[test]
    fn phi_is_an_involution_with_tangent_fixed_points() {
        for q in [3u64, 5, 7, 9, 13, 25] {
            let c = ctx(q);
            let f = c.field().clone();
            let params: Vec<ExtParam> = f
                .elements()
                .map(ExtParam::Finite)
                .chain([ExtParam::Infinity])
                .collect();
            for r in c.plane().points().filter(|&r| !c.is_on_conic(r)) {
                let [a, b, cc] = r.coords();
                assert!(!f.sub(f.mul(a, b), f.square(cc)).is_zero());
                let mut fixed = 0;
                for &s in &params {
                    let t = c.phi(r, s).unwrap();
                    assert_eq!(c.phi(r, t).unwrap(), s);
                    let (p, tp) = (c.param_to_point(s), c.param_to_point(t));
                    if s == t {
                        fixed += 1;
                        assert!(c.plane().incident(r, c.tangent_line(p).unwrap()));
                        if let ExtParam::Finite(s) = s {
                            // a s² − 2 c s + b = 0
                            let v = f.add(
                                f.sub(f.mul(a, f.square(s)), f.mul(f.add(cc, cc), s)),
                                b,
                            );
                            assert!(v.is_zero());
                        }
                    } else {
                        assert!(c.plane().collinear(r, p, tp));
                    }
                }
                assert_eq!(fixed, c.tangents_through(r) as usize);
            }
        }
    }

    #[test]
    fn coverage_examples() {
        let c = ctx(7);
        let hs = c.build_h();
        let r = c.plane().point([1, 1, 3]).unwrap();
        // brute force over pairs of H
        let mut covering_pairs = 0;
        for (i, &a) in hs.h.iter().enumerate() {
            for &b in &hs.h[i + 1..] {
                covering_pairs += c.plane().collinear(a, b, r) as usize;
            }
        }
        assert_eq!(covering_pairs, 0);
        assert!(!c.is_h_covered_direct(&hs, r).unwrap());
        assert!(!c.is_h_covered_projective(r).unwrap());

        let c19 = ctx(19);
        assert!(!c19.is_h_covered_projective(c19.plane().point([1, 1, 0]).unwrap()).unwrap());
        let c17 = ctx(17);
        assert!(c17.is_h_covered_projective(c17.plane().point([0, 0, 1]).unwrap()).unwrap());
        let h0 = hs.h[0];
        assert_eq!(c.is_h_covered_direct(&hs, h0), Err(ConicError::InH(h0)));
    }

    #[test]
    fn projective_criterion_matches_definition() {
        for q in odd_prime_powers(3, 31) {
            let c = ctx(q as u64);
            let hs = c.build_h();
            for r in c.plane().points().filter(|&r| !c.is_on_conic(r)) {
                assert_eq!(
                    c.is_h_covered_projective(r).unwrap(),
                    c.is_h_covered_direct(&hs, r).unwrap(),
                    "q={q} R={r}"
                );
            }
        }
    }

    #[test]
    fn r0_choice() {
        assert_eq!(ctx(19).choose_r0().encoded(), [1, 1, 0]);
        let smallest_nonsquare_13 = (1..13u32)
            .find(|&n| (1..13u32).all(|y| y * y % 13 != n))
            .unwrap();
        assert_eq!(smallest_nonsquare_13, 2);
        assert_eq!(ctx(13).choose_r0().encoded(), [1, 2, 0]);
        for q in odd_prime_powers(5, 199) {
            let c = ctx(q as u64);
            assert_eq!(c.classify_point(c.choose_r0()), PointClass::Internal, "q={q}");
        }
    }
}
