//! Points, lines and incidence in PG(2,q).

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{FieldElem, FieldError, FieldSpec};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlaneError {
    #[error("the zero vector is not a projective point")]
    ZeroTriple,
    #[error("a line needs two distinct points, got {0} twice")]
    SamePoint(ProjPoint),
    #[error("two identical lines have no unique meet: {0}")]
    SameLine(ProjLine),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// A point of PG(2,q) in canonical form: the first nonzero coordinate is 1.
///
/// The derived ordering is lexicographic on encoded coordinates, which is
/// also the enumeration order of [`Plane::points`].
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProjPoint([FieldElem; 3]);

/// A line `{(x,y,z) : ux + vy + wz = 0}` in the same canonical form.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProjLine([FieldElem; 3]);

macro_rules! triple_common {
    ($t:ident) => {
        impl $t {
            pub fn coords(&self) -> [FieldElem; 3] {
                self.0
            }

            pub fn encoded(&self) -> [u32; 3] {
                [self.0[0].value(), self.0[1].value(), self.0[2].value()]
            }
        }

        impl fmt::Debug for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                let [a, b, c] = self.encoded();
                write!(f, "({a},{b},{c})")
            }
        }

        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                fmt::Debug::fmt(self, f)
            }
        }
    };
}

triple_common!(ProjPoint);
triple_common!(ProjLine);

/// The projective plane over a fixed field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Plane {
    field: FieldSpec,
}

impl Plane {
    pub fn new(field: FieldSpec) -> Self {
        Plane { field }
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn q(&self) -> u32 {
        self.field.q()
    }

    /// Number of points (equally, of lines): q² + q + 1.
    pub fn len(&self) -> usize {
        let q = self.q() as usize;
        q * q + q + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn canonical(&self, raw: [FieldElem; 3]) -> Result<[FieldElem; 3], PlaneError> {
        let lead = raw
            .iter()
            .copied()
            .find(|x| !x.is_zero())
            .ok_or(PlaneError::ZeroTriple)?;
        if lead == FieldElem::ONE {
            return Ok(raw);
        }
        let s = self.field.inv(lead)?;
        Ok(raw.map(|x| self.field.mul(s, x)))
    }

    pub fn normalize(&self, raw: [FieldElem; 3]) -> Result<ProjPoint, PlaneError> {
        self.canonical(raw).map(ProjPoint)
    }

    pub fn normalize_line(&self, raw: [FieldElem; 3]) -> Result<ProjLine, PlaneError> {
        self.canonical(raw).map(ProjLine)
    }

    /// Point from encoded integer coordinates.
    pub fn point(&self, enc: [u64; 3]) -> Result<ProjPoint, PlaneError> {
        let f = &self.field;
        self.normalize([f.elem(enc[0])?, f.elem(enc[1])?, f.elem(enc[2])?])
    }

    pub fn line(&self, enc: [u64; 3]) -> Result<ProjLine, PlaneError> {
        let f = &self.field;
        self.normalize_line([f.elem(enc[0])?, f.elem(enc[1])?, f.elem(enc[2])?])
    }

    fn cross(&self, a: [FieldElem; 3], b: [FieldElem; 3]) -> [FieldElem; 3] {
        let f = &self.field;
        let m = |i: usize, j: usize| f.sub(f.mul(a[i], b[j]), f.mul(a[j], b[i]));
        [m(1, 2), m(2, 0), m(0, 1)]
    }

    fn dot(&self, a: [FieldElem; 3], b: [FieldElem; 3]) -> FieldElem {
        let f = &self.field;
        f.add(f.add(f.mul(a[0], b[0]), f.mul(a[1], b[1])), f.mul(a[2], b[2]))
    }

    pub fn line_through(&self, p: ProjPoint, q: ProjPoint) -> Result<ProjLine, PlaneError> {
        if p == q {
            return Err(PlaneError::SamePoint(p));
        }
        self.normalize_line(self.cross(p.0, q.0))
    }

    pub fn meet(&self, l1: ProjLine, l2: ProjLine) -> Result<ProjPoint, PlaneError> {
        if l1 == l2 {
            return Err(PlaneError::SameLine(l1));
        }
        self.normalize(self.cross(l1.0, l2.0))
    }

    #[inline]
    pub fn incident(&self, p: ProjPoint, l: ProjLine) -> bool {
        self.dot(p.0, l.0).is_zero()
    }

    pub fn collinear(&self, a: ProjPoint, b: ProjPoint, c: ProjPoint) -> bool {
        self.dot(self.cross(a.0, b.0), c.0).is_zero()
    }

    /// Position of `p` in the enumeration order.
    #[inline]
    pub fn index_of(&self, p: ProjPoint) -> usize {
        index_of_triple(self.q(), p.0)
    }

    #[inline]
    pub fn line_index(&self, l: ProjLine) -> usize {
        index_of_triple(self.q(), l.0)
    }

    pub fn point_at(&self, i: usize) -> ProjPoint {
        ProjPoint(triple_at(self.q(), i))
    }

    pub fn line_at(&self, i: usize) -> ProjLine {
        ProjLine(triple_at(self.q(), i))
    }

    /// All points, in lexicographic order of encoded coordinates.
    pub fn points(&self) -> impl Iterator<Item = ProjPoint> + '_ {
        (0..self.len()).map(move |i| self.point_at(i))
    }

    pub fn lines(&self) -> impl Iterator<Item = ProjLine> + '_ {
        (0..self.len()).map(move |i| self.line_at(i))
    }

    /// The q + 1 points of the line through `a` and `b`: `a` first, then
    /// `b + t·a` for t in encoding order.
    pub fn points_between(
        &self,
        a: ProjPoint,
        b: ProjPoint,
    ) -> impl Iterator<Item = ProjPoint> + '_ {
        let f = &self.field;
        std::iter::once(a).chain(f.elements().map(move |t| {
            let raw = [0, 1, 2].map(|i| f.add(b.0[i], f.mul(t, a.0[i])));
            self.normalize(raw).expect("distinct points span a line")
        }))
    }

    /// Two distinct points spanning `l`.
    pub fn spanning_points(&self, l: ProjLine) -> (ProjPoint, ProjPoint) {
        let f = &self.field;
        let [u, v, w] = l.0;
        let (o, z) = (FieldElem::ONE, FieldElem::ZERO);
        let pt = |raw| self.normalize(raw).expect("nonzero by construction");
        // normalized, so the first nonzero coordinate is 1
        if u == o {
            (pt([f.neg(v), o, z]), pt([f.neg(w), z, o]))
        } else if v == o {
            (pt([o, z, z]), pt([z, f.neg(w), o]))
        } else {
            (pt([o, z, z]), pt([z, o, z]))
        }
    }

    pub fn points_on_line(&self, l: ProjLine) -> Vec<ProjPoint> {
        let (a, b) = self.spanning_points(l);
        self.points_between(a, b).collect()
    }

    /// The q + 1 lines through `p`.
    pub fn lines_through(&self, p: ProjPoint) -> Vec<ProjLine> {
        // dual: lines through p are the points of the line with p's coordinates
        self.points_on_line(ProjLine(p.0))
            .into_iter()
            .map(|pt| ProjLine(pt.0))
            .collect()
    }
}

fn index_of_triple(q: u32, t: [FieldElem; 3]) -> usize {
    let q = q as usize;
    let [x, y, z] = t.map(|e| e.value() as usize);
    if x == 0 {
        if y == 0 {
            0
        } else {
            1 + z
        }
    } else {
        1 + q + y * q + z
    }
}

fn triple_at(q: u32, i: usize) -> [FieldElem; 3] {
    let qq = q as usize;
    let e = |n: usize| FieldElem::from_raw(n as u32);
    if i == 0 {
        [e(0), e(0), e(1)]
    } else if i <= qq {
        [e(0), e(1), e(i - 1)]
    } else {
        let r = i - 1 - qq;
        [e(1), e(r / qq), e(r % qq)]
    }
}
