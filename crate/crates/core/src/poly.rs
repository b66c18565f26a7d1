//! Dense univariate polynomials over GF(q), low degree first.

use crate::field::{FieldElem, FieldSpec};

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct UniPoly(Vec<FieldElem>);

impl UniPoly {
    pub fn new(mut coeffs: Vec<FieldElem>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly(coeffs)
    }

    pub fn zero() -> Self {
        UniPoly(Vec::new())
    }

    pub fn constant(c: FieldElem) -> Self {
        UniPoly::new(vec![c])
    }

    /// `a + b·t`.
    pub fn linear(a: FieldElem, b: FieldElem) -> Self {
        UniPoly::new(vec![a, b])
    }

    pub fn coeffs(&self) -> &[FieldElem] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn add(&self, f: &FieldSpec, other: &UniPoly) -> UniPoly {
        let n = self.0.len().max(other.0.len());
        let get = |v: &[FieldElem], i: usize| v.get(i).copied().unwrap_or(FieldElem::ZERO);
        UniPoly::new((0..n).map(|i| f.add(get(&self.0, i), get(&other.0, i))).collect())
    }

    pub fn mul(&self, f: &FieldSpec, other: &UniPoly) -> UniPoly {
        if self.is_zero() || other.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![FieldElem::ZERO; self.0.len() + other.0.len() - 1];
        for (i, &a) in self.0.iter().enumerate() {
            for (j, &b) in other.0.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        UniPoly::new(out)
    }

    pub fn eval(&self, f: &FieldSpec, t: FieldElem) -> FieldElem {
        self.0
            .iter()
            .rev()
            .fold(FieldElem::ZERO, |acc, &c| f.add(f.mul(acc, t), c))
    }

    pub fn derivative(&self, f: &FieldSpec) -> UniPoly {
        UniPoly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| f.mul(f.from_int(i as i64), c))
                .collect(),
        )
    }

    /// Quotient and remainder; `divisor` must be nonzero.
    pub fn div_rem(&self, f: &FieldSpec, divisor: &UniPoly) -> (UniPoly, UniPoly) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead_inv = f.inv(divisor.0[dd]).unwrap();
        let mut rem = self.0.clone();
        let mut quot = vec![FieldElem::ZERO; self.0.len().saturating_sub(dd)];
        while rem.len() > dd {
            let top = rem.len() - 1;
            let c = f.mul(*rem.last().unwrap(), lead_inv);
            let shift = top - dd;
            quot[shift] = c;
            for (i, &d) in divisor.0.iter().enumerate() {
                rem[shift + i] = f.sub(rem[shift + i], f.mul(c, d));
            }
            rem.pop();
            while rem.last().is_some_and(|c| c.is_zero()) {
                rem.pop();
            }
        }
        (UniPoly::new(quot), UniPoly::new(rem))
    }

    pub fn gcd(&self, f: &FieldSpec, other: &UniPoly) -> UniPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(f, &b).1;
            a = b;
            b = r;
        }
        a.monic(f)
    }

    pub fn monic(&self, f: &FieldSpec) -> UniPoly {
        match self.0.last() {
            None => UniPoly::zero(),
            Some(&lead) => {
                let s = f.inv(lead).unwrap();
                UniPoly::new(self.0.iter().map(|&c| f.mul(c, s)).collect())
            }
        }
    }

    /// No repeated factor over the algebraic closure (GF(q) is perfect).
    pub fn is_squarefree(&self, f: &FieldSpec) -> bool {
        !self.is_zero() && self.gcd(f, &self.derivative(f)).degree() == Some(0)
    }

    /// Multiplicity of `t0` as a root; `None` for the zero polynomial.
    pub fn root_multiplicity(&self, f: &FieldSpec, t0: FieldElem) -> Option<usize> {
        if self.is_zero() {
            return None;
        }
        let factor = UniPoly::linear(f.neg(t0), FieldElem::ONE);
        let mut cur = self.clone();
        let mut m = 0;
        loop {
            let (q, r) = cur.div_rem(f, &factor);
            if !r.is_zero() {
                return Some(m);
            }
            cur = q;
            m += 1;
        }
    }

    /// Order of vanishing at `t = 0`; `None` for the zero polynomial.
    pub fn order_at_zero(&self) -> Option<usize> {
        self.0.iter().position(|c| !c.is_zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;

    fn p(f: &FieldSpec, c: &[i64]) -> UniPoly {
        UniPoly::new(c.iter().map(|&x| f.from_int(x)).collect())
    }

    #[test]
    fn division_identity() {
        let f = make_field(7).unwrap();
        let a = p(&f, &[3, 0, 5, 1, 2]);
        let b = p(&f, &[1, 4, 1]);
        let (q, r) = a.div_rem(&f, &b);
        assert_eq!(q.mul(&f, &b).add(&f, &r), a);
        assert!(r.degree().unwrap_or(0) < 2);
    }

    #[test]
    fn squarefree_and_roots() {
        let f = make_field(7).unwrap();
        // (t − 1)² (t + 2)
        let sq = p(&f, &[-1, 1]).mul(&f, &p(&f, &[-1, 1])).mul(&f, &p(&f, &[2, 1]));
        assert!(!sq.is_squarefree(&f));
        assert_eq!(sq.root_multiplicity(&f, f.from_int(1)), Some(2));
        assert_eq!(sq.root_multiplicity(&f, f.from_int(-2)), Some(1));
        assert_eq!(sq.root_multiplicity(&f, f.from_int(3)), Some(0));
        // t² − 3 is irreducible mod 7 yet squarefree
        assert!(p(&f, &[-3, 0, 1]).is_squarefree(&f));
        assert_eq!(p(&f, &[0, 0, 5, 1]).order_at_zero(), Some(2));
        assert_eq!(UniPoly::zero().order_at_zero(), None);
    }

    #[test]
    fn inseparable_power_is_not_squarefree() {
        // t³ − 2 = (t − 2^(1/3))³ over GF(3)
        let f = make_field(3).unwrap();
        let c = p(&f, &[-2, 0, 0, 1]);
        assert!(c.derivative(&f).is_zero());
        assert!(!c.is_squarefree(&f));
    }
}
