//! Truncated formal power series over the rationals.
//!
//! A [`TruncatedSeries`] of order `N` carries the coefficients of `t^0..=t^N`.
//! Binary operations require equal orders; changing the order is always an
//! explicit call ([`TruncatedSeries::truncate`], [`TruncatedSeries::derivative`]).

use serde::Serialize;

use crate::combinatorics::{binomial_q, factorial_q, koszul_numbers_recursive, stirling2_unchecked, KoszulSequence};
use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TruncatedSeries {
    coeffs: Vec<Rational>,
}

impl TruncatedSeries {
    pub fn zero(order: usize) -> Self {
        TruncatedSeries { coeffs: vec![Rational::zero(); order + 1] }
    }

    pub fn one(order: usize) -> Self {
        Self::monomial(0, order)
    }

    /// The series `t`.
    pub fn t(order: usize) -> Self {
        Self::monomial(1, order)
    }

    /// `t^k`, or zero if `k > order`.
    pub fn monomial(k: usize, order: usize) -> Self {
        let mut s = Self::zero(order);
        if k <= order {
            s.coeffs[k] = Rational::one();
        }
        s
    }

    /// Coefficients `c_0..c_N`; the order is `coeffs.len() - 1`.
    pub fn from_coeffs(coeffs: Vec<Rational>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least the constant coefficient");
        TruncatedSeries { coeffs }
    }

    /// Builds a series of the given order from `k -> c_k`.
    pub fn from_fn(order: usize, mut f: impl FnMut(usize) -> Rational) -> Self {
        TruncatedSeries { coeffs: (0..=order).map(&mut f).collect() }
    }

    /// `e^(c t)`.
    pub fn exp_scaled(c: &Rational, order: usize) -> Self {
        let mut term = Rational::one();
        Self::from_fn(order, |k| {
            if k > 0 {
                term = &term * c / Rational::from(k);
            }
            term.clone()
        })
    }

    pub fn exp(order: usize) -> Self {
        Self::exp_scaled(&Rational::one(), order)
    }

    /// `e^t - 1`.
    pub fn exp_minus_one(order: usize) -> Self {
        let mut s = Self::exp(order);
        s.coeffs[0] = Rational::zero();
        s
    }

    /// `log(1 + t)`.
    pub fn log_one_plus(order: usize) -> Self {
        Self::from_fn(order, |k| match k {
            0 => Rational::zero(),
            _ => Rational::new(if k % 2 == 1 { 1 } else { -1 }, k as i64),
        })
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Coefficient of `t^k`; zero past the order.
    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Rational::is_zero)
    }

    /// Index of the first nonzero coefficient, `None` for the zero series.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn truncate(&self, order: usize) -> Result<Self> {
        if order > self.order() {
            return Err(Error::OrderMismatch { left: self.order(), right: order });
        }
        Ok(TruncatedSeries { coeffs: self.coeffs[..=order].to_vec() })
    }

    fn check_order(&self, other: &Self) -> Result<()> {
        if self.order() != other.order() {
            return Err(Error::OrderMismatch { left: self.order(), right: other.order() });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        Ok(TruncatedSeries {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        Ok(TruncatedSeries {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn scale(&self, c: &Rational) -> Self {
        TruncatedSeries { coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    /// Cauchy product truncated at the common order.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        let n = self.order();
        let mut out = Self::zero(n);
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs[..=n - i].iter().enumerate() {
                out.coeffs[i + j].add_mul(a, b);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, exp: usize) -> Self {
        let mut acc = Self::one(self.order());
        for _ in 0..exp {
            acc = acc.mul(self).expect("same order");
        }
        acc
    }

    /// `f(g(t))` for `g(0) = 0`, by Horner's rule.
    pub fn compose(&self, g: &Self) -> Result<Self> {
        self.check_order(g)?;
        if !g.coeffs[0].is_zero() {
            return Err(Error::NonzeroConstantTerm);
        }
        let n = self.order();
        let mut acc = Self::zero(n);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(g)?;
            acc.coeffs[0] += c;
        }
        Ok(acc)
    }

    /// `d/dt`, lowering the order by one (order 0 maps to the zero series of order 0).
    pub fn derivative(&self) -> Self {
        if self.order() == 0 {
            return Self::zero(0);
        }
        TruncatedSeries {
            coeffs: (1..=self.order()).map(|k| &self.coeffs[k] * &Rational::from(k)).collect(),
        }
    }

    pub fn nth_derivative(&self, n: usize) -> Self {
        (0..n).fold(self.clone(), |s, _| s.derivative())
    }

    fn check_vector_field(&self) -> Result<()> {
        if !self.coeffs[0].is_zero() || !self.coeff(1).is_zero() {
            return Err(Error::NotAVectorField);
        }
        Ok(())
    }

    /// `a(t) h'(t)` at the order of `h`; exact because `a` has valuation at least two.
    fn apply_vector_field(a: &Self, h: &Self) -> Self {
        let n = h.order();
        Self::from_fn(n, |k| {
            let mut acc = Rational::zero();
            for i in 2..=k.min(a.order()) {
                let j = k - i + 1;
                if j <= n && !a.coeffs[i].is_zero() && !h.coeffs[j].is_zero() {
                    acc.add_mul(&a.coeffs[i], &(&h.coeffs[j] * &Rational::from(j)));
                }
            }
            acc
        })
    }
}

/// `exp(a d/dt)(target)`; the exponential sum is finite at a fixed order since
/// each application of `a d/dt` raises the valuation.
pub fn exp_derivation(a: &TruncatedSeries, target: &TruncatedSeries) -> Result<TruncatedSeries> {
    a.check_order(target)?;
    a.check_vector_field()?;
    let mut sum = target.clone();
    let mut term = target.clone();
    let mut k = 1usize;
    loop {
        term = TruncatedSeries::apply_vector_field(a, &term).scale(&Rational::new(1, k as i64));
        if term.is_zero() {
            break;
        }
        sum = sum.add(&term)?;
        k += 1;
    }
    Ok(sum)
}

/// The iterative exponential `exp(a d/dt)(t)`.
pub fn itexp(a: &TruncatedSeries) -> Result<TruncatedSeries> {
    exp_derivation(a, &TruncatedSeries::t(a.order()))
}

/// The iterative logarithm: the unique `a` with `a(0) = a'(0) = 0` and `itexp(a) = g`.
///
/// Solved coefficient by coefficient: `[t^m] itexp(a) = a_m + (terms in a_2..a_(m-1))`.
pub fn itlog(g: &TruncatedSeries) -> Result<TruncatedSeries> {
    if !g.coeffs[0].is_zero() || !g.coeff(1).is_one() && g.order() >= 1 {
        return Err(Error::NotTangentToIdentity);
    }
    let n = g.order();
    let mut a = TruncatedSeries::zero(n);
    for m in 2..=n {
        let current = itexp(&a)?;
        a.coeffs[m] = &g.coeffs[m] - &current.coeffs[m];
    }
    Ok(a)
}

/// `K_n = (n+1)! [t^(n+1)] itlog(e^t - 1)`.
pub fn koszul_numbers_itlog(n_max: usize) -> KoszulSequence {
    let a = itlog(&TruncatedSeries::exp_minus_one(n_max + 1)).expect("e^t - 1 is tangent to the identity");
    KoszulSequence::from_values(
        (1..=n_max).map(|n| &a.coeffs[n + 1] * &factorial_q(n as u64 + 1)).collect(),
    )
}

/// `sum_n K_n t^(n+1)/(n+1)!` at the given order, from the recursive Koszul numbers.
pub fn koszul_vector_field(order: usize) -> TruncatedSeries {
    let ks = koszul_numbers_recursive(order.max(2) - 1);
    TruncatedSeries::from_fn(order, |k| {
        if k < 2 {
            Rational::zero()
        } else {
            ks.get(k - 1) / &factorial_q(k as u64)
        }
    })
}

/// Julia's equation `a(g(t)) = a(t) g'(t)` with `g = itexp(a)`, checked to order `n`.
pub fn julia_check(a: &TruncatedSeries, n: usize) -> Result<bool> {
    let a = a.truncate(n)?;
    a.check_vector_field()?;
    let g = itexp(&a)?;
    let lhs = a.compose(&g)?;
    let rhs = TruncatedSeries::apply_vector_field(&a, &g);
    Ok(lhs == rhs)
}

/// `a_d(z) = sum_b (-1)^(d-b)/d! C(d, b) / (1 - (b+1) z)`, coefficients `z^0..z^N`.
pub fn shadrin_series(d: usize, order: usize) -> TruncatedSeries {
    let inv_fact = factorial_q(d as u64).recip();
    let weights: Vec<Rational> = (0..=d)
        .map(|b| {
            let sign = if (d - b).is_multiple_of(2) { Rational::one() } else { -Rational::one() };
            sign * binomial_q(d as i64, b as i64) * &inv_fact
        })
        .collect();
    TruncatedSeries::from_fn(order, |k| {
        weights
            .iter()
            .enumerate()
            .map(|(b, w)| w * &Rational::from(b as i64 + 1).pow(k as u32))
            .sum()
    })
}

/// `psi(sum c_n z^n) = sum c_n t^(n+1)/(n+1)!`; raises the order by one.
pub fn psi_map(series: &TruncatedSeries) -> TruncatedSeries {
    TruncatedSeries::from_fn(series.order() + 1, |k| {
        if k == 0 {
            Rational::zero()
        } else {
            &series.coeffs[k - 1] / &factorial_q(k as u64)
        }
    })
}

/// `psi(a_d(z)) = (e^t - 1)^(d+1) / (d+1)!` at order `order` in `t`.
pub fn shadrin_identity_check(d: usize, order: usize) -> bool {
    if order == 0 {
        return true;
    }
    let lhs = psi_map(&shadrin_series(d, order - 1));
    let rhs = TruncatedSeries::exp_minus_one(order)
        .pow(d + 1)
        .scale(&factorial_q(d as u64 + 1).recip());
    lhs == rhs
}

/// An element `sum_k c_k t_k` of the span of the variables `t_0..t_D`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TVariableState {
    coeffs: Vec<Rational>,
}

impl TVariableState {
    pub fn zero(bound: usize) -> Self {
        TVariableState { coeffs: vec![Rational::zero(); bound + 1] }
    }

    pub fn basis(index: usize, bound: usize) -> Result<Self> {
        if index > bound {
            return Err(Error::IndexOutOfRange { index, bound });
        }
        let mut s = Self::zero(bound);
        s.coeffs[index] = Rational::one();
        Ok(s)
    }

    pub fn bound(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Rational::is_zero)
    }

    /// `r_n(t_k) = C(k+n+1, n+1) t_(k+n)`, dropping indices past the bound.
    pub fn apply_r(&self, n: usize) -> Self {
        let bound = self.bound();
        let mut out = Self::zero(bound);
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() || k + n > bound {
                continue;
            }
            out.coeffs[k + n] += c * &binomial_q((k + n + 1) as i64, (n + 1) as i64);
        }
        out
    }
}

/// Checks `exp(sum_n K_n r_n)(t_d) = sum_k a_(d, d+k) t_(d+k)` on `t_0..t_D`.
pub fn exp_koszul_r_check(d: usize, bound: usize) -> Result<bool> {
    let start = TVariableState::basis(d, bound)?;
    let ks = koszul_numbers_recursive(bound.max(1));
    let generator = |s: &TVariableState| {
        let mut out = TVariableState::zero(bound);
        for n in 1..=bound {
            let r = s.apply_r(n);
            for (o, v) in out.coeffs.iter_mut().zip(&r.coeffs) {
                o.add_mul(ks.get(n), v);
            }
        }
        out
    };
    let mut lhs = start.clone();
    let mut term = start;
    let mut j = 1i64;
    loop {
        term = generator(&term);
        let inv = Rational::new(1, j);
        for c in term.coeffs.iter_mut() {
            *c *= &inv;
        }
        if term.is_zero() {
            break;
        }
        for (o, v) in lhs.coeffs.iter_mut().zip(&term.coeffs) {
            *o += v;
        }
        j += 1;
    }
    let a = shadrin_series(d, bound);
    let rhs = TVariableState {
        coeffs: (0..=bound).map(|k| if k < d { Rational::zero() } else { a.coeff(k) }).collect(),
    };
    Ok(lhs == rhs)
}

/// For `g(t) = f(e^t - 1)`: `g^(n)(t) = sum_k {n k} f^(k)(e^t - 1) e^(kt)`, to order `N - n`.
pub fn stirling_derivative_check(f: &TruncatedSeries, n: usize, order: usize) -> Result<bool> {
    if n == 0 || order < n {
        return Err(Error::Invalid(format!("need 1 <= n <= N, got n = {n}, N = {order}")));
    }
    let f = f.truncate(order)?;
    let target = order - n;
    let g = f.compose(&TruncatedSeries::exp_minus_one(order))?;
    let lhs = g.nth_derivative(n).truncate(target)?;
    let mut rhs = TruncatedSeries::zero(target);
    for k in 1..=n {
        let fk = f.nth_derivative(k);
        let inner = fk.compose(&TruncatedSeries::exp_minus_one(order - k))?.truncate(target)?;
        let term = inner
            .mul(&TruncatedSeries::exp_scaled(&Rational::from(k), target))?
            .scale(&Rational::from(stirling2_unchecked(n, k)));
        rhs = rhs.add(&term)?;
    }
    Ok(lhs == rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::{factorial, koszul_numbers_chain, stirling2};

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn series(cs: &[(i64, i64)]) -> TruncatedSeries {
        TruncatedSeries::from_coeffs(cs.iter().map(|&(n, d)| q(n, d)).collect())
    }

    #[test]
    fn products() {
        let a = series(&[(1, 1), (1, 1), (0, 1)]);
        let b = series(&[(1, 1), (-1, 1), (0, 1)]);
        assert_eq!(a.mul(&b).unwrap(), series(&[(1, 1), (0, 1), (-1, 1)]));
        let t = TruncatedSeries::t(1);
        assert_eq!(t.mul(&t).unwrap(), TruncatedSeries::zero(1));
        assert!(matches!(
            a.mul(&TruncatedSeries::t(3)),
            Err(Error::OrderMismatch { left: 2, right: 3 })
        ));
    }

    #[test]
    fn exp_times_exp_minus() {
        // e^t = 1 + t + t^2/2 + t^3/6 + t^4/24, e^-t alternates; hand product is 1.
        let e = series(&[(1, 1), (1, 1), (1, 2), (1, 6), (1, 24)]);
        let em = series(&[(1, 1), (-1, 1), (1, 2), (-1, 6), (1, 24)]);
        assert_eq!(e, TruncatedSeries::exp(4));
        assert_eq!(em, TruncatedSeries::exp_scaled(&q(-1, 1), 4));
        assert_eq!(e.mul(&em).unwrap(), TruncatedSeries::one(4));
        for n in 0..12 {
            let p = TruncatedSeries::exp(n).mul(&TruncatedSeries::exp_scaled(&q(-1, 1), n)).unwrap();
            assert_eq!(p, TruncatedSeries::one(n));
        }
    }

    #[test]
    fn composition() {
        let f = TruncatedSeries::monomial(2, 3);
        let g = series(&[(0, 1), (1, 1), (1, 1), (0, 1)]);
        assert_eq!(f.compose(&g).unwrap(), series(&[(0, 1), (0, 1), (1, 1), (2, 1)]));
        let arbitrary = series(&[(3, 1), (-1, 2), (5, 7), (1, 1)]);
        assert_eq!(arbitrary.compose(&TruncatedSeries::t(3)).unwrap(), arbitrary);
        let exp_m1 = TruncatedSeries::exp_minus_one(6);
        let log = TruncatedSeries::log_one_plus(6);
        assert_eq!(exp_m1.compose(&log).unwrap(), TruncatedSeries::t(6));
        assert_eq!(f.compose(&TruncatedSeries::one(3)), Err(Error::NonzeroConstantTerm));
    }

    #[test]
    fn exp_derivation_basics() {
        let target = series(&[(2, 1), (1, 3), (0, 1), (4, 1), (1, 1)]);
        assert_eq!(exp_derivation(&TruncatedSeries::zero(4), &target).unwrap(), target);
        let bad = TruncatedSeries::t(4);
        assert_eq!(exp_derivation(&bad, &target), Err(Error::NotAVectorField));
        let a = koszul_vector_field(12);
        assert_eq!(exp_derivation(&a, &TruncatedSeries::t(12)).unwrap(), TruncatedSeries::exp_minus_one(12));
    }

    #[test]
    fn exp_derivation_of_monomials_is_power_of_itexp() {
        let a = series(&[(0, 1), (0, 1), (1, 2), (-1, 6), (3, 1), (0, 1), (2, 5), (1, 1), (0, 1), (-7, 3)]);
        let g = itexp(&a).unwrap();
        for n in 0..5 {
            let lhs = exp_derivation(&a, &TruncatedSeries::monomial(n, a.order())).unwrap();
            assert_eq!(lhs, g.pow(n), "t^{n}");
        }
    }

    #[test]
    fn itexp_small() {
        assert_eq!(itexp(&TruncatedSeries::zero(5)).unwrap(), TruncatedSeries::t(5));
        // t + a + a a'/2 with a = t^2: t + t^2 + t^3 at order 3.
        let a = TruncatedSeries::monomial(2, 3);
        assert_eq!(itexp(&a).unwrap(), series(&[(0, 1), (1, 1), (1, 1), (1, 1)]));
    }

    #[test]
    fn itlog_inverts_itexp() {
        let g = TruncatedSeries::exp_minus_one(12);
        assert_eq!(itexp(&itlog(&g).unwrap()).unwrap(), g);
        assert_eq!(itlog(&TruncatedSeries::t(7)).unwrap(), TruncatedSeries::zero(7));
        let mut cs = vec![Rational::zero(); 11];
        cs[2] = q(1, 2);
        cs[3] = q(-1, 6);
        let a = TruncatedSeries::from_coeffs(cs);
        assert_eq!(itlog(&itexp(&a).unwrap()).unwrap(), a);
        assert_eq!(itlog(&TruncatedSeries::exp(4)), Err(Error::NotTangentToIdentity));
        assert_eq!(
            itlog(&TruncatedSeries::t(4).scale(&q(2, 1))),
            Err(Error::NotTangentToIdentity)
        );
    }

    #[test]
    fn itlog_of_exp_minus_one_gives_koszul_numbers() {
        let ks = koszul_numbers_itlog(16);
        assert_eq!(ks.get(1), &Rational::one());
        assert_eq!(ks.get(4), &q(-2, 3));
        assert_eq!(ks.first_mismatch(&koszul_numbers_recursive(16)), None);
        assert_eq!(ks.first_mismatch(&koszul_numbers_chain(16)), None);
        assert_eq!(koszul_vector_field(17), itlog(&TruncatedSeries::exp_minus_one(17)).unwrap());
    }

    #[test]
    fn julia() {
        let a = itlog(&TruncatedSeries::exp_minus_one(20)).unwrap();
        assert!(julia_check(&a, 20).unwrap());
        // equivalently a(e^t - 1) = a(t) e^t
        let lhs = a.compose(&TruncatedSeries::exp_minus_one(20)).unwrap();
        let rhs = a.mul(&TruncatedSeries::exp(20)).unwrap();
        assert_eq!(lhs, rhs);
        assert!(julia_check(&TruncatedSeries::zero(8), 8).unwrap());
        assert!(julia_check(&TruncatedSeries::monomial(2, 6), 6).unwrap());
    }

    #[test]
    fn julia_with_t_squared_by_hand() {
        // g = itexp(t^2) = t/(1-t) = t + t^2 + ...; a(g) = g^2 and a g' = t^2/(1-t)^2.
        let a = TruncatedSeries::monomial(2, 6);
        let g = itexp(&a).unwrap();
        assert_eq!(g, series(&[(0, 1), (1, 1), (1, 1), (1, 1), (1, 1), (1, 1), (1, 1)]));
        let expected = series(&[(0, 1), (0, 1), (1, 1), (2, 1), (3, 1), (4, 1), (5, 1)]);
        assert_eq!(a.compose(&g).unwrap(), expected);
    }

    #[test]
    fn shadrin() {
        let a0 = shadrin_series(0, 10);
        assert!(a0.coeffs().iter().all(Rational::is_one));
        for d in 0..7 {
            let a = shadrin_series(d, 14);
            for k in 0..d {
                assert!(a.coeff(k).is_zero(), "a_{d} has a z^{k} term");
            }
            assert!(a.coeff(d).is_one());
        }
        assert!(shadrin_identity_check(3, 15));
        for d in 0..=6 {
            assert!(shadrin_identity_check(d, 15), "d = {d}");
        }
    }

    #[test]
    fn exp_koszul_r_on_t_basis() {
        assert!(exp_koszul_r_check(0, 8).unwrap());
        assert!(exp_koszul_r_check(3, 10).unwrap());
        assert!(exp_koszul_r_check(6, 6).unwrap());
        for d in 0..=4 {
            assert!(exp_koszul_r_check(d, 10).unwrap());
        }
        assert!(exp_koszul_r_check(5, 4).is_err());
    }

    #[test]
    fn r_action_on_basis() {
        // r_2(t_3) = C(6, 3) t_5; indices past the bound are dropped.
        let t3 = TVariableState::basis(3, 6).unwrap();
        let r = t3.apply_r(2);
        assert_eq!(r.coeffs()[5], q(20, 1));
        assert_eq!(r.coeffs().iter().filter(|c| !c.is_zero()).count(), 1);
        assert!(t3.apply_r(4).is_zero());
        assert_eq!(TVariableState::basis(0, 6).unwrap().apply_r(1).coeffs()[1], q(1, 1));
    }

    #[test]
    fn stirling_derivative() {
        let f = TruncatedSeries::from_fn(10, |k| q(k as i64 * 3 - 4, k as i64 + 1));
        assert!(stirling_derivative_check(&f, 1, 10).unwrap());
        assert!(stirling_derivative_check(&TruncatedSeries::monomial(2, 10), 3, 10).unwrap());
        for n in 1..=4 {
            assert!(stirling_derivative_check(&f, n, 10).unwrap());
        }
        assert!(stirling_derivative_check(&f, 0, 10).is_err());
        assert!(stirling_derivative_check(&f, 11, 10).is_err());
    }

    #[test]
    fn stirling_derivative_at_zero() {
        // f = t^k: g^(n)(0) = {n k} k!
        for k in 1..5 {
            let f = TruncatedSeries::monomial(k, 12);
            let g = f.compose(&TruncatedSeries::exp_minus_one(12)).unwrap();
            for n in k..10 {
                let at_zero = g.nth_derivative(n).coeff(0);
                let expected = Rational::from(stirling2(n, k).unwrap() * factorial(k as u64));
                assert_eq!(at_zero, expected, "n = {n}, k = {k}");
            }
        }
    }

    #[test]
    fn squared_exp_minus_one_derivatives() {
        // g = (e^t - 1)^2 = e^{2t} - 2e^t + 1, so g''' = 8 e^{2t} - 2 e^t.
        let g = TruncatedSeries::exp_minus_one(10).pow(2);
        let direct = TruncatedSeries::exp_scaled(&q(2, 1), 7)
            .scale(&q(8, 1))
            .sub(&TruncatedSeries::exp(7).scale(&q(2, 1)))
            .unwrap();
        assert_eq!(g.nth_derivative(3), direct);
    }

    #[test]
    fn exp_derivation_is_multiplicative() {
        let a = series(&[(0, 1), (0, 1), (2, 3), (-1, 1), (0, 1), (5, 2), (1, 1), (0, 1)]);
        let f = series(&[(1, 1), (2, 1), (0, 1), (-3, 4), (1, 1), (0, 1), (1, 9), (2, 1)]);
        let g = series(&[(0, 1), (-1, 1), (3, 1), (1, 2), (0, 1), (7, 1), (0, 1), (1, 1)]);
        let lhs = exp_derivation(&a, &f.mul(&g).unwrap()).unwrap();
        let rhs = exp_derivation(&a, &f).unwrap().mul(&exp_derivation(&a, &g).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }
}
