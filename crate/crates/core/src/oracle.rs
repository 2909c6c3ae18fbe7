//! Brute-force reference computations.
//!
//! Nothing here touches the normal-form multiplication of [`RingT`]: raw
//! two-variable expressions are compared through two ring maps that both
//! kill the defining ideal of `T`,
//!
//! * `p ↦ q`, landing in `Z[q, q^-1]`;
//! * `q ↦ 1, p ↦ 1 + ε` with `ε² = 0`, landing in dual numbers.
//!
//! Together they separate `T`: the normal form `(f, a)` maps to `f` and to
//! `f(1) + a·ε`.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

use crate::ring::{Laurent, Ring, RingT};

/// Largest matrix handled by [`perm_determinant`].
pub const PERM_DET_MAX: usize = 8;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("permutation determinant limited to {PERM_DET_MAX}x{PERM_DET_MAX}, got {0}x{0}")]
    SizeExceeded(usize),
    #[error("matrix is not square")]
    NotSquare,
}

/// Element of `Z[p, p^-1, q, q^-1]` before taking the quotient, keyed by
/// `(p exponent, q exponent)`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct RawLaurentPQ {
    terms: BTreeMap<(i32, i32), i64>,
}

impl RawLaurentPQ {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: i64) -> Self {
        Self::monomial(0, 0, c)
    }

    pub fn monomial(p_exp: i32, q_exp: i32, c: i64) -> Self {
        let mut terms = BTreeMap::new();
        if c != 0 {
            terms.insert((p_exp, q_exp), c);
        }
        Self { terms }
    }

    pub fn p() -> Self {
        Self::monomial(1, 0, 1)
    }

    pub fn q() -> Self {
        Self::monomial(0, 1, 1)
    }

    pub fn terms(&self) -> impl Iterator<Item = ((i32, i32), i64)> + '_ {
        self.terms.iter().map(|(k, v)| (*k, *v))
    }

    fn accumulate(&mut self, key: (i32, i32), c: i64) {
        let slot = self.terms.entry(key).or_insert(0);
        *slot += c;
        if *slot == 0 {
            self.terms.remove(&key);
        }
    }

    /// Image under `p ↦ q`.
    pub fn specialize_p_to_q(&self) -> BTreeMap<i32, i64> {
        let mut out = BTreeMap::new();
        for ((pe, qe), c) in self.terms() {
            *out.entry(pe + qe).or_insert(0) += c;
        }
        out.retain(|_, c| *c != 0);
        out
    }

    /// Image under `q ↦ 1, p ↦ 1 + ε`: `(1 + ε)^m = 1 + m·ε`.
    pub fn specialize_dual(&self) -> DualNumber {
        self.terms()
            .map(|((pe, _), c)| DualNumber::new(c, c * pe as i64))
            .fold(DualNumber::default(), |acc, x| acc + x)
    }

    pub fn pow(&self, m: u32) -> Self {
        (0..m).fold(Self::constant(1), |acc, _| &acc * self)
    }
}

impl Add for &RawLaurentPQ {
    type Output = RawLaurentPQ;
    fn add(self, rhs: &RawLaurentPQ) -> RawLaurentPQ {
        let mut out = self.clone();
        for (k, c) in rhs.terms() {
            out.accumulate(k, c);
        }
        out
    }
}

impl Neg for &RawLaurentPQ {
    type Output = RawLaurentPQ;
    fn neg(self) -> RawLaurentPQ {
        RawLaurentPQ {
            terms: self.terms.iter().map(|(k, v)| (*k, -v)).collect(),
        }
    }
}

impl Sub for &RawLaurentPQ {
    type Output = RawLaurentPQ;
    fn sub(self, rhs: &RawLaurentPQ) -> RawLaurentPQ {
        self + &(-rhs)
    }
}

impl Mul for &RawLaurentPQ {
    type Output = RawLaurentPQ;
    fn mul(self, rhs: &RawLaurentPQ) -> RawLaurentPQ {
        let mut out = RawLaurentPQ::zero();
        for ((pa, qa), ca) in self.terms() {
            for ((pb, qb), cb) in rhs.terms() {
                out.accumulate((pa + pb, qa + qb), ca * cb);
            }
        }
        out
    }
}

/// `value + deriv·ε` with `ε² = 0`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub struct DualNumber {
    pub value: i64,
    pub deriv: i64,
}

impl DualNumber {
    pub fn new(value: i64, deriv: i64) -> Self {
        Self { value, deriv }
    }
}

impl Add for DualNumber {
    type Output = DualNumber;
    fn add(self, rhs: DualNumber) -> DualNumber {
        DualNumber::new(self.value + rhs.value, self.deriv + rhs.deriv)
    }
}

impl Mul for DualNumber {
    type Output = DualNumber;
    fn mul(self, rhs: DualNumber) -> DualNumber {
        DualNumber::new(
            self.value * rhs.value,
            self.value * rhs.deriv + self.deriv * rhs.value,
        )
    }
}

/// Equality in `T`, decided by the two specializations.
pub fn raw_equal_in_t(x: &RawLaurentPQ, y: &RawLaurentPQ) -> bool {
    let d = x - y;
    d.specialize_p_to_q().is_empty() && d.specialize_dual() == DualNumber::default()
}

/// Normal form of a raw expression: `p^a q^b = (q + ε)^a q^b = q^(a+b) + a·ε`.
pub fn raw_reduce(x: &RawLaurentPQ) -> RingT {
    let mut lau = Vec::new();
    let mut eps = 0i64;
    for ((pe, qe), c) in x.terms() {
        lau.push((pe + qe, c));
        eps += c * pe as i64;
    }
    RingT::new(Laurent::from_terms(lau), eps)
}

/// `f(q) + a·(p - q)` as a raw expression.
pub fn render_back(x: &RingT) -> RawLaurentPQ {
    let mut out = RawLaurentPQ::zero();
    for (e, c) in x.lau().terms() {
        out.accumulate((0, *e), *c);
    }
    out.accumulate((1, 0), x.eps());
    out.accumulate((0, 1), -x.eps());
    out
}

/// Leibniz expansion over all permutations.
pub fn perm_determinant<R: Ring>(m: &[Vec<R>]) -> Result<R, OracleError> {
    let n = m.len();
    if m.iter().any(|row| row.len() != n) {
        return Err(OracleError::NotSquare);
    }
    if n > PERM_DET_MAX {
        return Err(OracleError::SizeExceeded(n));
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut total = R::zero();
    permute(m, &mut perm, 0, true, &mut total);
    Ok(total)
}

fn permute<R: Ring>(m: &[Vec<R>], perm: &mut Vec<usize>, k: usize, even: bool, total: &mut R) {
    let n = perm.len();
    if k == n {
        let mut prod = R::one();
        for (row, &col) in perm.iter().enumerate() {
            if m[row][col].is_zero() {
                return;
            }
            prod = prod.mul_ref(&m[row][col]);
        }
        *total = if even {
            total.add_ref(&prod)
        } else {
            total.sub_ref(&prod)
        };
        return;
    }
    for i in k..n {
        perm.swap(k, i);
        permute(m, perm, k + 1, if i == k { even } else { !even }, total);
        perm.swap(k, i);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::ZetaPolynomial;

    fn one() -> RawLaurentPQ {
        RawLaurentPQ::constant(1)
    }

    #[test]
    fn both_maps_kill_the_generators() {
        let p = RawLaurentPQ::p();
        let q = RawLaurentPQ::q();
        for gen in [&(&p - &one()) * &(&p - &q), &(&q - &one()) * &(&p - &q)] {
            assert!(gen.specialize_p_to_q().is_empty());
            assert_eq!(gen.specialize_dual(), DualNumber::default());
        }
    }

    #[test]
    fn combined_map_separates_normal_forms() {
        // (f, a) ↦ (f, f(1) + a ε): nonzero normal forms never map to zero
        let samples = [
            RingT::epsilon(),
            RingT::q_pow(2) - RingT::one(),
            RingT::p_pow(-3),
            RingT::new(Laurent::from_terms([(0, 1), (1, -1)]), 5),
        ];
        for x in samples {
            let raw = render_back(&x);
            let img = raw.specialize_p_to_q();
            let dual = raw.specialize_dual();
            let lau: BTreeMap<i32, i64> = x.lau().terms().iter().cloned().collect();
            assert_eq!(img, lau);
            assert_eq!(dual, DualNumber::new(x.eval_pq1(), x.eps()));
        }
    }

    #[test]
    fn equality_examples() {
        let p = RawLaurentPQ::p();
        let q = RawLaurentPQ::q();
        assert!(raw_equal_in_t(
            &(&(&p - &one()) * &(&p - &q)),
            &RawLaurentPQ::zero()
        ));
        let q7 = q.pow(7);
        assert!(raw_equal_in_t(&(&q7 * &(&q - &p)), &(&q - &p)));
        assert!(!raw_equal_in_t(&p, &q));
    }

    #[test]
    fn reduce_examples() {
        let p = RawLaurentPQ::p();
        let q = RawLaurentPQ::q();
        assert_eq!(
            raw_reduce(&(&p * &p)),
            RingT::new(Laurent::monomial(2, 1), 2)
        );
        assert_eq!(
            raw_reduce(&RawLaurentPQ::monomial(0, -1, 1)),
            RingT::q_pow(-1)
        );
        assert_eq!(raw_reduce(&(&(&p - &one()) * &(&p - &q))), RingT::zero());
    }

    #[test]
    fn perm_determinant_small_cases() {
        let id: Vec<Vec<ZetaPolynomial>> = (0..3)
            .map(|i| {
                (0..3)
                    .map(|j| {
                        if i == j {
                            ZetaPolynomial::one()
                        } else {
                            ZetaPolynomial::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        assert_eq!(perm_determinant(&id).unwrap(), ZetaPolynomial::one());
        assert_eq!(
            perm_determinant(&[vec![ZetaPolynomial::zero()]]).unwrap(),
            ZetaPolynomial::zero()
        );
        let big = vec![vec![0i64; 9]; 9];
        assert_eq!(perm_determinant(&big), Err(OracleError::SizeExceeded(9)));
        assert_eq!(perm_determinant(&[vec![1i64, 2], vec![3, 4]]).unwrap(), -2);
    }
}
