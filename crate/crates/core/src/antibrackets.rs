//! Higher antibrackets `Phi^n_f` and the identities they satisfy.
//!
//! Four constructions are provided and can be compared table by table:
//! the shuffle formula, the recursion on the last two arguments, the
//! recursion through `rho_h = [mu_h, -]`, and the exponential
//! `sum_i Phi^i_f = exp(-sum_n K_n rho_n) f`. The last two only use the
//! multiplication operators and therefore also make sense on the free
//! associative algebra, where `mu_n` is the symmetrized product.

use std::sync::Arc;

use serde::Serialize;

use crate::algebra::{koszul_sign, mul_terms_right, shuffles, Accumulator, Algebra, AlgebraElement, EndoOp, Idx, Parity};
use crate::combinatorics::koszul_numbers_recursive;
use crate::error::{Error, Result};
use crate::exec;
use crate::multiop::{canonical_tuples, lift_endo, masks, nr_bracket, split, MultiOp, Multiplications, OpFamily, TableEntry, Tuple};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Direct,
    Akman,
    Corollary,
    Exponential,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Direct, Method::Akman, Method::Corollary, Method::Exponential];

    /// Whether the construction needs a commutative product.
    pub fn needs_commutative(self) -> bool {
        matches!(self, Method::Direct | Method::Akman)
    }
}

/// `Phi^1_f, ..., Phi^N_f` built by one method.
#[derive(Clone, Debug)]
pub struct AntibracketHierarchy {
    source: EndoOp,
    method: Method,
    brackets: Vec<MultiOp>,
}

/// Serialized form of one bracket: `{"n": k, "table": [[tuple, element], ...]}`.
#[derive(Debug, Clone, Serialize)]
pub struct BracketDump {
    pub n: usize,
    pub table: Vec<TableEntry>,
}

impl AntibracketHierarchy {
    pub fn source(&self) -> &EndoOp {
        &self.source
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn max_arity(&self) -> usize {
        self.brackets.len()
    }

    /// `Phi^n_f` for `1 <= n <= N`.
    pub fn get(&self, n: usize) -> &MultiOp {
        &self.brackets[n - 1]
    }

    pub fn brackets(&self) -> &[MultiOp] {
        &self.brackets
    }

    pub fn dump(&self) -> Vec<BracketDump> {
        self.brackets
            .iter()
            .enumerate()
            .map(|(k, op)| BracketDump { n: k + 1, table: op.table_entries() })
            .collect()
    }
}

fn endo_parity(f: &EndoOp) -> Result<Parity> {
    f.parity().ok_or(Error::NotHomogeneous)
}

fn require_commutative(alg: &Algebra) -> Result<()> {
    if !alg.signature().commutative {
        return Err(Error::NotCommutative);
    }
    Ok(())
}

/// Degree budget `D + drop(f)` for brackets of `f`, or `None` when `f = 0`.
fn budget(f: &EndoOp) -> Option<usize> {
    let d = f.algebra().signature().degree as i64 + f.drop()? as i64;
    (d >= 0).then_some(d as usize)
}

/// `Phi^n_f(a_1, ..., a_n)` on homogeneous elements, straight from the shuffle formula.
pub fn phi_direct(f: &EndoOp, n: usize, args: &[AlgebraElement]) -> Result<AlgebraElement> {
    let alg = f.algebra();
    require_commutative(alg)?;
    if n == 0 || args.len() != n {
        return Err(Error::ArityMismatch { expected: n, got: args.len() });
    }
    if args.iter().any(|a| !a.algebra().same(alg)) {
        return Err(Error::SignatureMismatch);
    }
    if args.iter().any(AlgebraElement::is_zero) {
        return Ok(AlgebraElement::zero(alg));
    }
    let parities: Vec<Parity> = args.iter().map(|a| a.parity().ok_or(Error::NotHomogeneous)).collect::<Result<_>>()?;
    let mut total = AlgebraElement::zero(alg);
    for k in 1..=n {
        let sign_k = if (n - k).is_multiple_of(2) { 1 } else { -1 };
        for sigma in shuffles(k, n - k) {
            let eps = koszul_sign(&sigma, &parities) * sign_k;
            let inner = product_of(alg, &sigma[..k], args)?;
            let mut term = f.apply(&inner)?;
            for &i in &sigma[k..] {
                term = term.mul(&args[i])?;
            }
            total = total.add(&term.scale(&Rational::from(eps as i64)))?;
        }
    }
    Ok(total)
}

fn product_of(alg: &Arc<Algebra>, idx: &[usize], args: &[AlgebraElement]) -> Result<AlgebraElement> {
    let mut it = idx.iter();
    let first = match it.next() {
        Some(&i) => args[i].clone(),
        None => return AlgebraElement::one(alg),
    };
    it.try_fold(first, |acc, &i| acc.mul(&args[i]))
}

/// The full table of `Phi^n_f` from the shuffle formula.
pub fn phi_direct_op(f: &EndoOp, n: usize) -> Result<MultiOp> {
    let alg = f.algebra().clone();
    require_commutative(&alg)?;
    if n == 0 {
        return Err(Error::ArityMismatch { expected: 1, got: 0 });
    }
    let parity = endo_parity(f)?;
    let Some(budget) = budget(f) else {
        return Ok(MultiOp::zero(&alg, n - 1, parity));
    };
    let tuples = canonical_tuples(&alg, n, budget);
    let subsets: Vec<u32> = (1..=n).flat_map(|k| masks(n, k)).collect();
    let dim = alg.dim();
    let rows = exec::filter_map_init(
        &tuples,
        || Accumulator::new(dim),
        |acc, v| {
            for &mask in &subsets {
                let k = mask.count_ones() as usize;
                let (sel, rest, eps) = split(&alg, v, mask);
                let sign = if (n - k).is_multiple_of(2) { eps } else { -eps };
                let Some((inner, s_in)) = alg.mul_sequence(&sel) else { continue };
                let outer = if rest.is_empty() {
                    None
                } else {
                    match alg.mul_sequence(&rest) {
                        Some(o) => Some(o),
                        None => continue,
                    }
                };
                for (j, c) in f.column(inner) {
                    match outer {
                        None => acc.add_signed(*j, sign * s_in, c),
                        Some((o, s_out)) => {
                            if let Some((t, s)) = alg.mul_basis(*j, o) {
                                acc.add_signed(t, sign * s_in * s_out * s, c);
                            }
                        }
                    }
                }
            }
            let out = acc.finish();
            (!out.is_empty()).then(|| (v.clone(), out))
        },
    );
    Ok(MultiOp::from_table(&alg, n - 1, parity, rows))
}

/// `Phi^(n+1)(a.., b, c) = Phi^n(a.., bc) - Phi^n(a.., b) c - (-1)^(|b||c|) Phi^n(a.., c) b`.
fn akman_step(f: &EndoOp, prev: &MultiOp, budget: usize) -> MultiOp {
    let alg = f.algebra().clone();
    let arity = prev.arity() + 1;
    let tuples = canonical_tuples(&alg, arity, budget);
    let dim = alg.dim();
    let rows = exec::filter_map_init(
        &tuples,
        || Accumulator::new(dim),
        |acc, v| {
            let (head, tail) = v.split_at(arity - 2);
            let (b, c) = (tail[0], tail[1]);
            let one = Rational::one();
            if let Some((bc, s)) = alg.mul_basis(b, c) {
                let mut args: Vec<Idx> = head.to_vec();
                args.push(bc);
                if let Some((t, s2)) = crate::multiop::canonicalize(&alg, &args) {
                    if let Some(val) = prev.get(&t) {
                        acc.add_terms(s * s2, &one, val);
                    }
                }
            }
            let mut with_b: Tuple = head.iter().copied().collect();
            with_b.push(b);
            if let Some(val) = prev.get(&with_b) {
                mul_terms_right(&alg, val, c, acc, -1, &one);
            }
            let mut with_c: Tuple = head.iter().copied().collect();
            with_c.push(c);
            if let Some(val) = prev.get(&with_c) {
                let s = if alg.parity_bit(b) == 1 && alg.parity_bit(c) == 1 { 1 } else { -1 };
                mul_terms_right(&alg, val, b, acc, s, &one);
            }
            let out = acc.finish();
            (!out.is_empty()).then(|| (v.clone(), out))
        },
    );
    MultiOp::from_table(&alg, arity - 1, prev.parity(), rows)
}

fn hierarchy_akman(f: &EndoOp, n_max: usize) -> Result<Vec<MultiOp>> {
    require_commutative(f.algebra())?;
    let mut out = vec![lift_endo(f)?];
    let Some(budget) = budget(f) else {
        let p = endo_parity(f)?;
        return Ok((0..n_max).map(|d| MultiOp::zero(f.algebra(), d, p)).collect());
    };
    while out.len() < n_max {
        let next = akman_step(f, out.last().expect("nonempty"), budget);
        out.push(next);
    }
    Ok(out)
}

/// `Phi^n_f` from the recursion on the last two arguments.
pub fn phi_akman(f: &EndoOp, n: usize) -> Result<MultiOp> {
    if n == 0 {
        return Err(Error::ArityMismatch { expected: 1, got: 0 });
    }
    Ok(hierarchy_akman(f, n)?.pop().expect("n >= 1"))
}

fn hierarchy_corollary(f: &EndoOp, n_max: usize, mults: &Multiplications) -> Result<Vec<MultiOp>> {
    let mut out = vec![lift_endo(f)?];
    for n in 1..n_max {
        // Phi^(n+1) = (1/n) sum_h (-1)^h rho_h(Phi^(n-h+1))
        let mut acc = MultiOp::zero(f.algebra(), n, out[0].parity());
        for h in 1..=n {
            let term = mults.rho(h, &out[n - h])?;
            let c = Rational::new(if h % 2 == 0 { 1 } else { -1 }, n as i64);
            acc = acc.add_scaled(&term, &c)?;
        }
        out.push(acc);
    }
    Ok(out)
}

/// `Phi^n_f` from `Phi^(n+1) = (1/n) sum_h (-1)^h [mu_h, Phi^(n-h+1)]`.
pub fn phi_corollary(f: &EndoOp, n: usize) -> Result<MultiOp> {
    if n == 0 {
        return Err(Error::ArityMismatch { expected: 1, got: 0 });
    }
    let mults = Multiplications::new(f.algebra());
    Ok(hierarchy_corollary(f, n, &mults)?.pop().expect("n >= 1"))
}

fn hierarchy_exponential(f: &EndoOp, n_max: usize, mults: &Multiplications) -> Result<Vec<MultiOp>> {
    let max_degree = n_max - 1;
    let ks = koszul_numbers_recursive(max_degree.max(1));
    let base = lift_endo(f)?;
    let parity = base.parity();
    let mut sum = OpFamily::single(base.clone());
    let mut term = OpFamily::single(base);
    let mut j = 1i64;
    while !term.is_zero() {
        // term <- (1/j) X term with X = -sum_n K_n rho_n
        let mut next = OpFamily::new();
        for n in 1..=max_degree {
            let image = term.rho(mults, n, max_degree)?;
            for (_, op) in image.components() {
                next.add_scaled(op, &(-ks.get(n) / &Rational::from(j)))?;
            }
        }
        for (_, op) in next.components() {
            sum.add_scaled(op, &Rational::one())?;
        }
        term = next;
        j += 1;
    }
    Ok((0..n_max)
        .map(|d| sum.get(d).cloned().unwrap_or_else(|| MultiOp::zero(f.algebra(), d, parity)))
        .collect())
}

/// The hierarchy up to arity `N` from `exp(-sum_n K_n rho_n) f`, truncated by operator degree.
pub fn phi_exponential(f: &EndoOp, n_max: usize) -> Result<AntibracketHierarchy> {
    hierarchy(f, n_max, Method::Exponential)
}

/// `Phi^1_f, ..., Phi^N_f` by the chosen method.
pub fn hierarchy(f: &EndoOp, n_max: usize, method: Method) -> Result<AntibracketHierarchy> {
    let mults = Multiplications::new(f.algebra());
    hierarchy_with(f, n_max, method, &mults)
}

/// As [`hierarchy`], reusing cached multiplication operators.
pub fn hierarchy_with(f: &EndoOp, n_max: usize, method: Method, mults: &Multiplications) -> Result<AntibracketHierarchy> {
    if n_max == 0 {
        return Err(Error::ArityMismatch { expected: 1, got: 0 });
    }
    if !mults.algebra().same(f.algebra()) {
        return Err(Error::SignatureMismatch);
    }
    let brackets = match method {
        Method::Direct => (1..=n_max).map(|n| phi_direct_op(f, n)).collect::<Result<Vec<_>>>()?,
        Method::Akman => hierarchy_akman(f, n_max)?,
        Method::Corollary => hierarchy_corollary(f, n_max, mults)?,
        Method::Exponential => hierarchy_exponential(f, n_max, mults)?,
    };
    Ok(AntibracketHierarchy { source: f.clone(), method, brackets })
}

/// The method used when none is specified: the shuffle formula on commutative
/// signatures, the `rho` recursion otherwise.
pub fn default_method(alg: &Algebra) -> Method {
    if alg.signature().commutative {
        Method::Direct
    } else {
        Method::Corollary
    }
}

/// `f(a_1 ... a_n) = sum_k sum_sigma eps(sigma) Phi^k_f(a_sigma(1..k)) a_sigma(k+1) ... a_sigma(n)`.
pub fn inversion_check(f: &EndoOp, n: usize, args: &[AlgebraElement]) -> Result<bool> {
    let alg = f.algebra();
    require_commutative(alg)?;
    if n == 0 || args.len() != n {
        return Err(Error::ArityMismatch { expected: n, got: args.len() });
    }
    let h = hierarchy(f, n, Method::Direct)?;
    inversion_check_with(&h, args)
}

/// Inversion formula against precomputed brackets (arity of `args` at most the hierarchy length).
pub fn inversion_check_with(h: &AntibracketHierarchy, args: &[AlgebraElement]) -> Result<bool> {
    let f = h.source();
    let alg = f.algebra();
    let n = args.len();
    if n == 0 || n > h.max_arity() {
        return Err(Error::ArityMismatch { expected: h.max_arity(), got: n });
    }
    let indices: Vec<usize> = (0..n).collect();
    let lhs = f.apply(&product_of(alg, &indices, args)?)?;
    if args.iter().any(AlgebraElement::is_zero) {
        return Ok(lhs.is_zero());
    }
    let parities: Vec<Parity> = args.iter().map(|a| a.parity().ok_or(Error::NotHomogeneous)).collect::<Result<_>>()?;
    let mut rhs = AlgebraElement::zero(alg);
    for k in 1..=n {
        for sigma in shuffles(k, n - k) {
            let eps = koszul_sign(&sigma, &parities);
            let picked: Vec<AlgebraElement> = sigma[..k].iter().map(|&i| args[i].clone()).collect();
            let mut term = h.get(k).eval(&picked)?;
            for &i in &sigma[k..] {
                term = term.mul(&args[i])?;
            }
            rhs = rhs.add(&term.scale(&Rational::from(eps as i64)))?;
        }
    }
    Ok(lhs == rhs)
}

/// `sum_i [Phi^i_f, Phi^(n+1-i)_g]`.
pub fn jacobi_sum(hf: &AntibracketHierarchy, hg: &AntibracketHierarchy, n: usize) -> Result<MultiOp> {
    let alg = hf.source().algebra();
    let parity = hf.get(1).parity().add(hg.get(1).parity());
    let mut acc = MultiOp::zero(alg, n - 1, parity);
    for i in 1..=n {
        acc = acc.add(&nr_bracket(hf.get(i), hg.get(n + 1 - i))?)?;
    }
    Ok(acc)
}

/// `Phi^n_[f,g] = sum_i [Phi^i_f, Phi^(n+1-i)_g]` as operator tables, with the default method.
pub fn jacobi_check(f: &EndoOp, g: &EndoOp, n: usize) -> Result<bool> {
    jacobi_check_with(f, g, n, default_method(f.algebra()))
}

pub fn jacobi_check_with(f: &EndoOp, g: &EndoOp, n: usize, method: Method) -> Result<bool> {
    if !f.algebra().same(g.algebra()) {
        return Err(Error::SignatureMismatch);
    }
    if n == 0 {
        return Err(Error::ArityMismatch { expected: 1, got: 0 });
    }
    let mults = Multiplications::new(f.algebra());
    let fg = f.supercommutator(g)?;
    let lhs = hierarchy_with(&fg, n, method, &mults)?;
    let hf = hierarchy_with(f, n, method, &mults)?;
    let hg = hierarchy_with(g, n, method, &mults)?;
    Ok(*lhs.get(n) == jacobi_sum(&hf, &hg, n)?)
}

/// For odd square-zero `delta`: `sum_i [Phi^i, Phi^(n-i+1)] = 0` for all `n <= N`.
pub fn linfinity_check(delta: &EndoOp, n_max: usize) -> Result<bool> {
    if !delta.is_zero() && delta.parity() != Some(Parity::Odd) {
        return Err(Error::NotOdd);
    }
    if !delta.compose(delta)?.is_zero() {
        return Err(Error::NotSquareZero);
    }
    if n_max == 0 {
        return Ok(true);
    }
    let h = hierarchy(delta, n_max, default_method(delta.algebra()))?;
    for n in 1..=n_max {
        if !jacobi_sum(&h, &h, n)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The hierarchy of the identity; its components are `(-1)^n mu_n`.
pub fn identity_hierarchy(alg: &Arc<Algebra>, n_max: usize) -> Result<AntibracketHierarchy> {
    hierarchy(&EndoOp::identity(alg), n_max, default_method(alg))
}

/// Whether `Phi^(n+1)_f` vanishes on the whole truncated algebra.
pub fn differential_order_check(f: &EndoOp, n: usize) -> Result<bool> {
    if f.algebra().unit().is_none() {
        return Err(Error::NotUnital);
    }
    Ok(phi_direct_op(f, n + 1)?.is_zero())
}

/// Whether `Phi^(n+1)_f` vanishes on argument tuples of total degree at most `D`.
///
/// There no product is truncated, so the values agree with those of the
/// untruncated polynomial algebra. This is the range on which operators
/// such as `d/dx1`, which are derivations of the free algebra but not of its
/// truncation, behave as they do on polynomials.
pub fn differential_order_check_faithful(f: &EndoOp, n: usize) -> Result<bool> {
    if f.algebra().unit().is_none() {
        return Err(Error::NotUnital);
    }
    let d = f.algebra().signature().degree;
    Ok(phi_direct_op(f, n + 1)?.restrict_total_degree(d).is_zero())
}

/// On `A = Q`: `rho_n(mu_0) = n mu_n` and the degree-`n` component of
/// `exp(-sum_(i<n) K_i rho_i) mu_0` is `((-1)^n + n K_n) mu_n`.
pub fn identity_exponential_check(n: usize) -> Result<bool> {
    if n == 0 {
        return Err(Error::Invalid("need n >= 1".into()));
    }
    let q = Algebra::new(crate::algebra::Signature::commutative(0, 0, 1))?;
    let mults = Multiplications::new(&q);
    let rho_ok = mults.rho(n, &mults.get(0))? == mults.get(n).scale(&Rational::from(n));
    let ks = koszul_numbers_recursive(n);
    let mut sum = OpFamily::single((*mults.get(0)).clone());
    let mut term = sum.clone();
    let mut j = 1i64;
    while !term.is_zero() {
        let mut next = OpFamily::new();
        for i in 1..n {
            for (_, op) in term.rho(&mults, i, n)?.components() {
                next.add_scaled(op, &(-ks.get(i) / &Rational::from(j)))?;
            }
        }
        for (_, op) in next.components() {
            sum.add_scaled(op, &Rational::one())?;
        }
        term = next;
        j += 1;
    }
    let sign = if n.is_multiple_of(2) { Rational::one() } else { -Rational::one() };
    let expected = mults.get(n).scale(&(sign + Rational::from(n) * ks.get(n)));
    let got = sum.get(n).cloned().unwrap_or_else(|| MultiOp::zero(&q, n, Parity::Even));
    Ok(rho_ok && got == expected)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{derivation_endo, odd_derivative_endo, random_element, random_endo, seeded_rng, Signature};
    use crate::multiop::mu_sym;

    fn alg(p: usize, q: usize, d: usize) -> Arc<Algebra> {
        Algebra::new(Signature::commutative(p, q, d)).unwrap()
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn phi_one_and_two() {
        let a = alg(2, 2, 4);
        let f = random_endo(&a, 5, Parity::Odd);
        let mut rng = seeded_rng(1);
        let x = random_element(&a, &mut rng, Parity::Odd);
        let y = random_element(&a, &mut rng, Parity::Odd);
        assert_eq!(phi_direct(&f, 1, std::slice::from_ref(&x)).unwrap(), f.apply(&x).unwrap());
        // f(ab) - f(a)b - (-1)^{|a||b|} f(b)a
        let expected = f
            .apply(&x.mul(&y).unwrap())
            .unwrap()
            .sub(&f.apply(&x).unwrap().mul(&y).unwrap())
            .unwrap()
            .add(&f.apply(&y).unwrap().mul(&x).unwrap())
            .unwrap();
        assert_eq!(phi_direct(&f, 2, &[x.clone(), y.clone()]).unwrap(), expected);
        assert_eq!(phi_direct(&f, 2, std::slice::from_ref(&x)).unwrap_err(), Error::ArityMismatch { expected: 2, got: 1 });
        let table = phi_direct_op(&f, 2).unwrap();
        assert_eq!(table.eval(&[x.clone(), y.clone()]).unwrap(), expected);
    }

    #[test]
    fn phi_three_seven_terms() {
        let a = alg(2, 2, 4);
        let f = random_endo(&a, 6, Parity::Even);
        let mut rng = seeded_rng(2);
        let (x, y, z) = (
            random_element(&a, &mut rng, Parity::Odd),
            random_element(&a, &mut rng, Parity::Even),
            random_element(&a, &mut rng, Parity::Odd),
        );
        let fa = |e: &AlgebraElement| f.apply(e).unwrap();
        let m = |u: &AlgebraElement, v: &AlgebraElement| u.mul(v).unwrap();
        // parities: |x| = 1, |y| = 0, |z| = 1
        let mut expected = fa(&m(&m(&x, &y), &z));
        expected = expected.sub(&m(&fa(&m(&x, &y)), &z)).unwrap();
        expected = expected.add(&m(&fa(&m(&y, &z)), &x)).unwrap(); // -(-1)^{1*1}
        expected = expected.sub(&m(&fa(&m(&x, &z)), &y)).unwrap(); // -(-1)^{0}
        expected = expected.add(&m(&m(&fa(&x), &y), &z)).unwrap();
        expected = expected.add(&m(&m(&fa(&y), &x), &z)).unwrap(); // (-1)^{0}
        expected = expected.sub(&m(&m(&fa(&z), &x), &y)).unwrap(); // (-1)^{1*(1+0)}
        assert_eq!(phi_direct(&f, 3, &[x.clone(), y.clone(), z.clone()]).unwrap(), expected);
        assert_eq!(phi_akman(&f, 3).unwrap().eval(&[x, y, z]).unwrap(), expected);
    }

    #[test]
    fn derivation_brackets_vanish_below_boundary() {
        let a = alg(2, 2, 5);
        let d = derivation_endo(&a).unwrap();
        let mut rng = seeded_rng(4);
        let low = |e: AlgebraElement, max: usize| {
            AlgebraElement::from_terms(&a, e.terms().iter().filter(|(i, _)| a.degree_of(*i) <= max).cloned())
        };
        let x = low(random_element(&a, &mut rng, Parity::Even), 2);
        let y = low(random_element(&a, &mut rng, Parity::Odd), 3);
        assert!(phi_direct(&d, 2, &[x, y]).unwrap().is_zero());
    }

    #[test]
    fn four_methods_agree_small() {
        let a = alg(2, 1, 4);
        for (seed, parity) in [(1, Parity::Even), (2, Parity::Odd)] {
            let f = random_endo(&a, seed, parity);
            let hs: Vec<_> = Method::ALL.iter().map(|&m| hierarchy(&f, 4, m).unwrap()).collect();
            for n in 1..=4 {
                for h in &hs[1..] {
                    assert_eq!(h.get(n), hs[0].get(n), "{:?} n = {n}", h.method());
                }
            }
        }
    }

    #[test]
    fn low_order_formulas() {
        let a = alg(1, 2, 4);
        let f = random_endo(&a, 3, Parity::Odd);
        let m = Multiplications::new(&a);
        let lf = lift_endo(&f).unwrap();
        let r1f = m.rho(1, &lf).unwrap();
        assert_eq!(phi_direct_op(&f, 2).unwrap(), r1f.neg());
        let r11 = m.rho(1, &r1f).unwrap();
        let r2f = m.rho(2, &lf).unwrap();
        assert_eq!(phi_direct_op(&f, 3).unwrap(), r11.add(&r2f).unwrap().scale(&q(1, 2)));
        let r111 = m.rho(1, &r11).unwrap();
        let r12 = m.rho(1, &r2f).unwrap();
        let r3 = m.rho(3, &lf).unwrap();
        let phi4 = r111.add_scaled(&r12, &q(3, 1)).unwrap().add_scaled(&r3, &q(6, 1)).unwrap().scale(&q(-1, 6));
        assert_eq!(phi_direct_op(&f, 4).unwrap(), phi4);
    }

    #[test]
    fn inversion_small() {
        let a = alg(2, 2, 4);
        let f = random_endo(&a, 9, Parity::Odd);
        let mut rng = seeded_rng(7);
        for n in 1..=4 {
            let args: Vec<_> = (0..n)
                .map(|k| random_element(&a, &mut rng, if k % 2 == 0 { Parity::Odd } else { Parity::Even }))
                .collect();
            assert!(inversion_check(&f, n, &args).unwrap(), "n = {n}");
        }
    }

    #[test]
    fn jacobi_small() {
        let a = alg(2, 1, 3);
        let f = random_endo(&a, 1, Parity::Odd);
        let g = random_endo(&a, 2, Parity::Even);
        for n in 1..=3 {
            assert!(jacobi_check(&f, &g, n).unwrap(), "n = {n}");
        }
    }

    #[test]
    fn jacobi_noncommutative() {
        let w = Algebra::new(Signature::noncommutative(1, 1, 3)).unwrap();
        let f = random_endo(&w, 1, Parity::Odd);
        let g = random_endo(&w, 2, Parity::Even);
        for n in 1..=3 {
            assert!(jacobi_check(&f, &g, n).unwrap(), "n = {n}");
        }
        assert_eq!(phi_direct_op(&f, 2).unwrap_err(), Error::NotCommutative);
    }

    #[test]
    fn identity_brackets() {
        let a = alg(2, 2, 4);
        let h = identity_hierarchy(&a, 4).unwrap();
        let m = Multiplications::new(&a);
        for n in 0..4 {
            let sign = if n % 2 == 0 { 1 } else { -1 };
            assert_eq!(h.get(n + 1), &m.get(n).scale(&Rational::from(sign)));
        }
        let w = Algebra::new(Signature::noncommutative(2, 1, 3)).unwrap();
        let hw = identity_hierarchy(&w, 4).unwrap();
        for n in 0..4 {
            let sign = if n % 2 == 0 { 1 } else { -1 };
            assert_eq!(hw.get(n + 1), &mu_sym(&w, n).scale(&Rational::from(sign)));
        }
    }

    #[test]
    fn identity_exponential_on_rationals() {
        for n in 1..=10 {
            assert!(identity_exponential_check(n).unwrap(), "n = {n}");
        }
    }

    #[test]
    fn linfinity() {
        let a = alg(2, 2, 4);
        assert!(linfinity_check(&EndoOp::zero(&a), 4).unwrap());
        let d = odd_derivative_endo(&a, 0).unwrap();
        assert!(linfinity_check(&d, 4).unwrap());
        let f = random_endo(&a, 1, Parity::Odd);
        assert_eq!(linfinity_check(&f, 3).unwrap_err(), Error::NotSquareZero);
        let e = random_endo(&a, 1, Parity::Even);
        assert_eq!(linfinity_check(&e, 3).unwrap_err(), Error::NotOdd);
    }

    #[test]
    fn odd_derivative_brackets_vanish() {
        // an odd derivation of the free algebra: Phi^n vanishes for n >= 2 below the truncation
        let a = alg(2, 2, 4);
        let d = odd_derivative_endo(&a, 0).unwrap();
        for n in 2..=4 {
            assert!(phi_direct_op(&d, n).unwrap().restrict_total_degree(4).is_zero());
        }
    }

    #[test]
    fn order_checks() {
        let a = alg(1, 1, 5);
        let d = derivation_endo(&a).unwrap();
        assert!(differential_order_check_faithful(&d, 1).unwrap());
        assert!(!differential_order_check_faithful(&d, 0).unwrap());
        let d2 = crate::algebra::second_derivative_endo(&a).unwrap();
        assert!(differential_order_check_faithful(&d2, 2).unwrap());
        assert!(!differential_order_check_faithful(&d2, 1).unwrap());
        for n in 0..4 {
            assert!(differential_order_check(&EndoOp::zero(&a), n).unwrap());
        }
        let nu = Algebra::new(Signature::commutative(1, 0, 3).non_unital()).unwrap();
        assert_eq!(differential_order_check(&EndoOp::identity(&nu), 1).unwrap_err(), Error::NotUnital);
    }

    #[test]
    fn truncation_breaks_leibniz_at_the_boundary() {
        // on the quotient d/dx1 is not a derivation: d(x^D) x + x^D d(x) != d(x^(D+1)) = 0
        let a = alg(1, 0, 4);
        let d = derivation_endo(&a).unwrap();
        assert!(!differential_order_check(&d, 1).unwrap());
    }

    #[test]
    fn dump_shape() {
        let a = alg(1, 0, 2);
        let h = identity_hierarchy(&a, 2).unwrap();
        let dump = h.dump();
        assert_eq!(dump[0].n, 1);
        assert_eq!(dump[1].table[0].0, vec!["1".to_string(), "1".to_string()]);
    }
}
