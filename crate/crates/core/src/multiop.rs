//! Supersymmetric multilinear operators and the Nijenhuis-Richardson bracket.
//!
//! A [`MultiOp`] of degree `n` takes `n + 1` arguments. It is stored on
//! canonical tuples of basis indices (non-decreasing, no repeated odd
//! monomial); any other argument tuple is reduced to a canonical one by the
//! Koszul sign of the sorting permutation. Only nonzero values are stored.
//!
//! Every operator carries a `drop`: the largest amount by which it lowers the
//! total degree of its arguments. Values on tuples of total degree above
//! `D + drop` are zero in the quotient, and products never enumerate them.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use rand::Rng;
use rustc_hash::FxHashMap;
use serde::Serialize;
use smallvec::SmallVec;

use crate::algebra::{render_terms, seeded_rng, Accumulator, Algebra, AlgebraElement, EndoOp, Idx, Parity, Terms};
use crate::combinatorics::factorial_q;
use crate::error::{Error, Result};
use crate::exec;
use crate::rational::Rational;

pub type Tuple = SmallVec<[Idx; 8]>;

/// Canonical argument tuples of the given arity whose total degree is at most `budget`,
/// in lexicographic order of basis indices.
pub fn canonical_tuples(alg: &Algebra, arity: usize, budget: usize) -> Vec<Tuple> {
    let mut out = Vec::new();
    let mut cur = Tuple::new();
    fn rec(alg: &Algebra, arity: usize, start: usize, left: usize, cur: &mut Tuple, out: &mut Vec<Tuple>) {
        if cur.len() == arity {
            out.push(cur.clone());
            return;
        }
        let slots = arity - cur.len();
        for i in start..alg.dim() {
            let d = alg.degree_of(i as Idx);
            // basis is sorted by degree, so later choices are at least as heavy
            if d * slots > left {
                break;
            }
            cur.push(i as Idx);
            let next = if alg.parity_bit(i as Idx) == 1 { i + 1 } else { i };
            rec(alg, arity, next, left - d, cur, out);
            cur.pop();
        }
    }
    rec(alg, arity, 0, budget, &mut cur, &mut out);
    out
}

/// Sorts `args` into canonical order. Returns the sign, or `None` when an odd
/// monomial repeats (the value is then zero by supersymmetry).
pub fn canonicalize(alg: &Algebra, args: &[Idx]) -> Option<(Tuple, i8)> {
    let mut t: Tuple = args.iter().copied().collect();
    let mut sign = 1i8;
    for i in 1..t.len() {
        let mut j = i;
        while j > 0 && t[j - 1] > t[j] {
            if alg.parity_bit(t[j - 1]) == 1 && alg.parity_bit(t[j]) == 1 {
                sign = -sign;
            }
            t.swap(j - 1, j);
            j -= 1;
        }
    }
    for w in t.windows(2) {
        if w[0] == w[1] && alg.parity_bit(w[0]) == 1 {
            return None;
        }
    }
    Some((t, sign))
}

/// Places `b` in front of the canonical tuple `rest` and sorts.
#[inline]
fn insert_front(alg: &Algebra, b: Idx, rest: &[Idx]) -> Option<(Tuple, i8)> {
    let odd_b = alg.parity_bit(b) == 1;
    let mut pos = 0;
    let mut passed_odd = 0u32;
    while pos < rest.len() && rest[pos] <= b {
        if rest[pos] == b && odd_b {
            return None;
        }
        passed_odd += alg.parity_bit(rest[pos]) as u32;
        pos += 1;
    }
    let mut t = Tuple::with_capacity(rest.len() + 1);
    t.extend_from_slice(&rest[..pos]);
    t.push(b);
    t.extend_from_slice(&rest[pos..]);
    let sign = if odd_b && passed_odd % 2 == 1 { -1 } else { 1 };
    Some((t, sign))
}

/// Bit masks over `n` positions with exactly `k` bits set, in increasing order.
pub(crate) fn masks(n: usize, k: usize) -> Vec<u32> {
    (0u32..1 << n).filter(|m| m.count_ones() as usize == k).collect()
}

/// Splits a canonical tuple by a position mask into the selected and the
/// remaining entries, with the sign of moving the selection to the front.
#[inline]
pub(crate) fn split(alg: &Algebra, v: &[Idx], mask: u32) -> (Tuple, Tuple, i8) {
    let mut sel = Tuple::new();
    let mut rest = Tuple::new();
    let mut odd_rest = 0u32;
    let mut alpha = 0u32;
    for (p, &x) in v.iter().enumerate() {
        let odd = alg.parity_bit(x) as u32;
        if mask & (1 << p) != 0 {
            sel.push(x);
            alpha += odd * odd_rest;
        } else {
            rest.push(x);
            odd_rest += odd;
        }
    }
    (sel, rest, if alpha.is_multiple_of(2) { 1 } else { -1 })
}

fn total_degree(alg: &Algebra, v: &[Idx]) -> usize {
    v.iter().map(|&i| alg.degree_of(i)).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Table,
    /// The commutative product `mu_n`; values are computed from the multiplication table.
    Product,
}

/// A supersymmetric operator with `degree + 1` arguments.
#[derive(Clone)]
pub struct MultiOp {
    alg: Arc<Algebra>,
    degree: usize,
    parity: Parity,
    drop: Option<i32>,
    table: FxHashMap<Tuple, Terms>,
    kind: Kind,
}

impl PartialEq for MultiOp {
    fn eq(&self, other: &Self) -> bool {
        self.alg.same(&other.alg) && self.degree == other.degree && self.table == other.table
    }
}

impl Eq for MultiOp {}

impl fmt::Debug for MultiOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "MultiOp(degree {}, {:?}, {} entries)", self.degree, self.parity, self.table.len())?;
        for line in self.dump_lines() {
            writeln!(f, "  {line}")?;
        }
        Ok(())
    }
}

/// One row of a serialized table: argument monomials and the value as `(monomial, coefficient)` pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableEntry(pub Vec<String>, pub Vec<(String, Rational)>);

impl MultiOp {
    pub fn zero(alg: &Arc<Algebra>, degree: usize, parity: Parity) -> Self {
        MultiOp { alg: alg.clone(), degree, parity, drop: None, table: FxHashMap::default(), kind: Kind::Table }
    }

    /// Builds an operator from values on canonical tuples; zero values are discarded.
    ///
    /// # Panics
    /// If a key is not a canonical tuple of the right arity.
    pub fn from_table(alg: &Arc<Algebra>, degree: usize, parity: Parity, entries: impl IntoIterator<Item = (Tuple, Terms)>) -> Self {
        let mut op = Self::zero(alg, degree, parity);
        for (t, v) in entries {
            assert_eq!(t.len(), degree + 1, "tuple arity");
            assert!(canonicalize(alg, &t).is_some_and(|(c, s)| c == t && s == 1), "tuple is not canonical");
            if !v.is_empty() {
                op.table.insert(t, v);
            }
        }
        op.refresh_drop();
        op
    }

    fn refresh_drop(&mut self) {
        self.drop = self
            .table
            .iter()
            .flat_map(|(t, v)| {
                let d = total_degree(&self.alg, t) as i32;
                v.iter().map(move |(j, _)| (d, *j))
            })
            .map(|(d, j)| d - self.alg.degree_of(j) as i32)
            .max();
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.alg
    }

    /// Degree `n`; the operator takes `n + 1` arguments.
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn arity(&self) -> usize {
        self.degree + 1
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    /// Largest degree decrease over stored values, `None` for the zero operator.
    pub fn drop(&self) -> Option<i32> {
        self.drop
    }

    pub fn is_zero(&self) -> bool {
        self.table.is_empty()
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    /// Value on a canonical tuple.
    pub fn get(&self, t: &[Idx]) -> Option<&Terms> {
        self.table.get(t)
    }

    /// Stored entries in lexicographic tuple order.
    pub fn entries(&self) -> Vec<(&Tuple, &Terms)> {
        let mut v: Vec<_> = self.table.iter().collect();
        v.sort_by(|a, b| a.0.cmp(b.0));
        v
    }

    /// Value on an arbitrary tuple of basis monomials.
    pub fn eval_basis(&self, args: &[Idx]) -> Result<AlgebraElement> {
        if args.len() != self.arity() {
            return Err(Error::ArityMismatch { expected: self.arity(), got: args.len() });
        }
        Ok(match canonicalize(&self.alg, args) {
            Some((t, s)) => match self.table.get(&t) {
                Some(v) => AlgebraElement::from_sorted(&self.alg, v.clone()).scale(&Rational::from(s as i64)),
                None => AlgebraElement::zero(&self.alg),
            },
            None => AlgebraElement::zero(&self.alg),
        })
    }

    /// Value on arbitrary elements, by multilinear expansion.
    pub fn eval(&self, args: &[AlgebraElement]) -> Result<AlgebraElement> {
        if args.len() != self.arity() {
            return Err(Error::ArityMismatch { expected: self.arity(), got: args.len() });
        }
        if args.iter().any(|a| !a.algebra().same(&self.alg)) {
            return Err(Error::SignatureMismatch);
        }
        if args.iter().any(AlgebraElement::is_zero) || self.table.is_empty() {
            return Ok(AlgebraElement::zero(&self.alg));
        }
        // entries only exist up to total degree D + drop, and terms are sorted by degree
        let budget = self.alg.signature().degree as i64 + self.drop.unwrap_or(0) as i64;
        let mut acc = Accumulator::new(self.alg.dim());
        let mut tuple: Vec<Idx> = Vec::with_capacity(args.len());
        self.eval_rec(args, budget, &Rational::one(), &mut tuple, &mut acc);
        Ok(AlgebraElement::from_sorted(&self.alg, acc.finish()))
    }

    fn eval_rec(&self, args: &[AlgebraElement], budget: i64, c: &Rational, tuple: &mut Vec<Idx>, acc: &mut Accumulator) {
        let Some((first, rest)) = args.split_first() else {
            if let Some((t, s)) = canonicalize(&self.alg, tuple) {
                if let Some(v) = self.table.get(&t) {
                    acc.add_terms(s, c, v);
                }
            }
            return;
        };
        for (i, x) in first.terms() {
            let d = self.alg.degree_of(*i) as i64;
            if d > budget {
                break;
            }
            tuple.push(*i);
            self.eval_rec(rest, budget - d, &(c * x), tuple, acc);
            tuple.pop();
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if !self.alg.same(&other.alg) {
            return Err(Error::SignatureMismatch);
        }
        Ok(())
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, other: &MultiOp, c: &Rational) -> Result<MultiOp> {
        self.check(other)?;
        if self.degree != other.degree {
            return Err(Error::ArityMismatch { expected: self.arity(), got: other.arity() });
        }
        if other.is_zero() || c.is_zero() {
            return Ok(self.clone().into_table());
        }
        if self.is_zero() {
            return Ok(other.scale(c));
        }
        if self.parity != other.parity {
            return Err(Error::ParityMismatch);
        }
        let mut table = self.table.clone();
        let mut acc = Accumulator::new(self.alg.dim());
        for (t, v) in &other.table {
            match table.get_mut(t) {
                Some(mine) => {
                    acc.add_terms(1, &Rational::one(), mine);
                    acc.add_terms(1, c, v);
                    let merged = acc.finish();
                    if merged.is_empty() {
                        table.remove(t);
                    } else {
                        *mine = merged;
                    }
                }
                None => {
                    table.insert(t.clone(), v.iter().map(|(i, x)| (*i, x * c)).collect());
                }
            }
        }
        let mut op = MultiOp { alg: self.alg.clone(), degree: self.degree, parity: self.parity, drop: None, table, kind: Kind::Table };
        op.refresh_drop();
        Ok(op)
    }

    pub fn add(&self, other: &MultiOp) -> Result<MultiOp> {
        self.add_scaled(other, &Rational::one())
    }

    pub fn sub(&self, other: &MultiOp) -> Result<MultiOp> {
        self.add_scaled(other, &-Rational::one())
    }

    pub fn scale(&self, c: &Rational) -> MultiOp {
        if c.is_zero() {
            return MultiOp::zero(&self.alg, self.degree, self.parity);
        }
        let table = self.table.iter().map(|(t, v)| (t.clone(), v.iter().map(|(i, x)| (*i, x * c)).collect())).collect();
        MultiOp { alg: self.alg.clone(), degree: self.degree, parity: self.parity, drop: self.drop, table, kind: Kind::Table }
    }

    pub fn neg(&self) -> MultiOp {
        self.scale(&-Rational::one())
    }

    fn into_table(mut self) -> MultiOp {
        self.kind = Kind::Table;
        self
    }

    /// Keeps only the values on tuples of total degree at most `max`.
    pub fn restrict_total_degree(&self, max: usize) -> MultiOp {
        let table = self
            .table
            .iter()
            .filter(|(t, _)| total_degree(&self.alg, t) <= max)
            .map(|(t, v)| (t.clone(), v.clone()))
            .collect();
        let mut op = MultiOp { alg: self.alg.clone(), degree: self.degree, parity: self.parity, drop: None, table, kind: Kind::Table };
        op.refresh_drop();
        op
    }

    /// One line per stored tuple: `(m1,...,mk) -> element`, in tuple order.
    pub fn dump_lines(&self) -> Vec<String> {
        self.entries()
            .into_iter()
            .map(|(t, v)| {
                let args: Vec<String> = t.iter().map(|&i| self.alg.render(i)).collect();
                format!("({}) -> {}", args.join(","), render_terms(&self.alg, v))
            })
            .collect()
    }

    /// The first tuple, in tuple order, where the two tables differ, rendered as
    /// `(tuple, value in self, value in other)`.
    pub fn first_difference(&self, other: &MultiOp) -> Option<(String, String, String)> {
        let mut keys: Vec<&Tuple> = self.table.keys().chain(other.table.keys()).collect();
        keys.sort();
        keys.dedup();
        keys.into_iter().find_map(|t| {
            let a = self.table.get(t).map(Vec::as_slice).unwrap_or(&[]);
            let b = other.table.get(t).map(Vec::as_slice).unwrap_or(&[]);
            (a != b).then(|| {
                let args: Vec<String> = t.iter().map(|&i| self.alg.render(i)).collect();
                (format!("({})", args.join(",")), render_terms(&self.alg, a), render_terms(&self.alg, b))
            })
        })
    }

    pub fn table_entries(&self) -> Vec<TableEntry> {
        self.entries()
            .into_iter()
            .map(|(t, v)| {
                TableEntry(
                    t.iter().map(|&i| self.alg.render(i)).collect(),
                    v.iter().map(|(i, c)| (self.alg.render(*i), c.clone())).collect(),
                )
            })
            .collect()
    }

    /// Value of `self` at `v`, where the first argument is the basis monomial
    /// `b` and the rest is the canonical tuple `rest`, scaled into `acc`.
    #[inline]
    fn accumulate_front(&self, b: Idx, rest: &[Idx], sign: i8, c: &Rational, acc: &mut Accumulator) {
        match self.kind {
            Kind::Product => {
                let mut cur = (b, sign);
                for &r in rest {
                    match self.alg.mul_basis(cur.0, r) {
                        Some((k, s)) => cur = (k, cur.1 * s),
                        None => return,
                    }
                }
                acc.add_signed(cur.0, cur.1, c);
            }
            Kind::Table => {
                if let Some((t, s)) = insert_front(&self.alg, b, rest) {
                    if let Some(v) = self.table.get(&t) {
                        acc.add_terms(sign * s, c, v);
                    }
                }
            }
        }
    }

}

type FrontIndex<'a> = FxHashMap<Tuple, Vec<(Idx, i8, &'a Terms)>>;

/// For each canonical `rest`, the monomials `b` with `f(b, rest...) != 0`, sorted by `b`,
/// with the sign relating `f(b, rest...)` to the stored entry.
fn front_index(f: &MultiOp) -> FrontIndex<'_> {
    let mut index: FrontIndex<'_> = FxHashMap::default();
    for (k, vals) in &f.table {
        let mut odd_before = 0u32;
        for j in 0..k.len() {
            let b = k[j];
            let odd_b = f.alg.parity_bit(b) == 1;
            if j == 0 || k[j - 1] != b {
                let mut rest: Tuple = k[..j].iter().copied().collect();
                rest.extend_from_slice(&k[j + 1..]);
                let sign = if odd_b && odd_before % 2 == 1 { -1 } else { 1 };
                index.entry(rest).or_default().push((b, sign, vals));
            }
            odd_before += odd_b as u32;
        }
    }
    for list in index.values_mut() {
        list.sort_unstable_by_key(|e| e.0);
    }
    index
}

/// The insertion product `f ⊼ g` of degree `deg f + deg g`.
pub fn nr_product(f: &MultiOp, g: &MultiOp) -> Result<MultiOp> {
    f.check(g)?;
    let alg = f.alg.clone();
    let (n, m) = (f.degree, g.degree);
    let parity = f.parity.add(g.parity);
    let (Some(df), Some(dg)) = (f.drop, g.drop) else {
        return Ok(MultiOp::zero(&alg, n + m, parity));
    };
    let budget = alg.signature().degree as i64 + df as i64 + dg as i64;
    if budget < 0 {
        return Ok(MultiOp::zero(&alg, n + m, parity));
    }
    let arity = n + m + 1;
    let tuples = canonical_tuples(&alg, arity, budget as usize);
    let sel = masks(arity, m + 1);
    let dim = alg.dim();
    let index = (f.kind == Kind::Table).then(|| front_index(f));
    let rows = exec::filter_map_init(
        &tuples,
        || Accumulator::new(dim),
        |acc, v| {
            for &mask in &sel {
                let (s, rest, eps) = split(&alg, v, mask);
                match (&index, g.kind) {
                    (None, Kind::Product) => {
                        if let Some((b, sb)) = alg.mul_sequence(&s) {
                            f.accumulate_front(b, &rest, eps * sb, &Rational::one(), acc);
                        }
                    }
                    (None, Kind::Table) => {
                        if let Some(gv) = g.table.get(&s) {
                            for (b, c) in gv {
                                f.accumulate_front(*b, &rest, eps, c, acc);
                            }
                        }
                    }
                    (Some(index), Kind::Product) => {
                        let (Some((b, sb)), Some(list)) = (alg.mul_sequence(&s), index.get(&rest)) else { continue };
                        if let Ok(k) = list.binary_search_by_key(&b, |e| e.0) {
                            let (_, sf, vals) = list[k];
                            acc.add_terms(eps * sb * sf, &Rational::one(), vals);
                        }
                    }
                    (Some(index), Kind::Table) => {
                        let (Some(gv), Some(list)) = (g.table.get(&s), index.get(&rest)) else { continue };
                        // both sides sorted by the inserted monomial
                        let (mut i, mut j) = (0, 0);
                        while i < gv.len() && j < list.len() {
                            match gv[i].0.cmp(&list[j].0) {
                                std::cmp::Ordering::Less => i += 1,
                                std::cmp::Ordering::Greater => j += 1,
                                std::cmp::Ordering::Equal => {
                                    acc.add_terms(eps * list[j].1, &gv[i].1, list[j].2);
                                    i += 1;
                                    j += 1;
                                }
                            }
                        }
                    }
                }
            }
            let out = acc.finish();
            (!out.is_empty()).then(|| (v.clone(), out))
        },
    );
    let mut op = MultiOp::zero(&alg, n + m, parity);
    op.table = rows.into_iter().collect();
    op.refresh_drop();
    Ok(op)
}

/// The Nijenhuis-Richardson bracket `[f, g] = f⊼g - (-1)^(|f||g|) g⊼f`.
pub fn nr_bracket(f: &MultiOp, g: &MultiOp) -> Result<MultiOp> {
    let fg = nr_product(f, g)?;
    let gf = nr_product(g, f)?;
    if f.parity == Parity::Odd && g.parity == Parity::Odd {
        fg.add(&gf)
    } else {
        fg.sub(&gf)
    }
}

/// The commutative multiplication `mu_n(a_0, ..., a_n) = a_0 ... a_n`.
pub fn mu(alg: &Arc<Algebra>, n: usize) -> Result<MultiOp> {
    if !alg.signature().commutative {
        return Err(Error::NotCommutative);
    }
    let entries: Vec<(Tuple, Terms)> = canonical_tuples(alg, n + 1, alg.signature().degree)
        .into_iter()
        .filter_map(|t| alg.mul_sequence(&t).map(|(k, s)| (t, vec![(k, Rational::from(s as i64))])))
        .collect();
    let mut op = MultiOp::zero(alg, n, Parity::Even);
    op.table = entries.into_iter().collect();
    op.refresh_drop();
    op.kind = Kind::Product;
    Ok(op)
}

/// Heap's algorithm: all permutations of `0..n`.
fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut p: Vec<usize> = (0..n).collect();
    let mut out = vec![p.clone()];
    let mut c = vec![0usize; n];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                p.swap(0, i);
            } else {
                p.swap(c[i], i);
            }
            out.push(p.clone());
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

/// The symmetrized product `(1/(n+1)!) sum_sigma eps(sigma) a_sigma(0) ... a_sigma(n)`.
///
/// On a commutative signature this coincides with [`mu`].
pub fn mu_sym(alg: &Arc<Algebra>, n: usize) -> MultiOp {
    let perms = permutations(n + 1);
    let weight = factorial_q(n as u64 + 1).recip();
    let tuples = canonical_tuples(alg, n + 1, alg.signature().degree);
    let dim = alg.dim();
    let rows = exec::filter_map_init(
        &tuples,
        || Accumulator::new(dim),
        |acc, t| {
            let parities: Vec<Parity> = t.iter().map(|&i| alg.parity_of(i)).collect();
            let mut seq: Vec<Idx> = vec![0; t.len()];
            for sigma in &perms {
                for (k, &s) in sigma.iter().enumerate() {
                    seq[k] = t[s];
                }
                if let Some((k, s)) = alg.mul_sequence(&seq) {
                    let eps = crate::algebra::koszul_sign(sigma, &parities);
                    acc.add_signed(k, s * eps, &weight);
                }
            }
            let out = acc.finish();
            (!out.is_empty()).then(|| (t.clone(), out))
        },
    );
    let mut op = MultiOp::zero(alg, n, Parity::Even);
    op.table = rows.into_iter().collect();
    op.refresh_drop();
    op
}

/// `mu_n` for commutative signatures, `mu_sym(n)` otherwise.
pub fn multiplication(alg: &Arc<Algebra>, n: usize) -> MultiOp {
    if alg.signature().commutative {
        mu(alg, n).expect("commutative signature")
    } else {
        mu_sym(alg, n)
    }
}

/// Cache of the multiplication operators of one algebra, with the adjoint actions `rho_n`.
pub struct Multiplications {
    alg: Arc<Algebra>,
    cache: Mutex<Vec<Option<Arc<MultiOp>>>>,
}

impl Multiplications {
    pub fn new(alg: &Arc<Algebra>) -> Self {
        Multiplications { alg: alg.clone(), cache: Mutex::new(Vec::new()) }
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.alg
    }

    pub fn get(&self, n: usize) -> Arc<MultiOp> {
        let mut cache = self.cache.lock().unwrap_or_else(|e| e.into_inner());
        if cache.len() <= n {
            cache.resize(n + 1, None);
        }
        cache[n].get_or_insert_with(|| Arc::new(multiplication(&self.alg, n))).clone()
    }

    /// `rho_n(omega) = [mu_n, omega]`.
    pub fn rho(&self, n: usize, omega: &MultiOp) -> Result<MultiOp> {
        if !omega.alg.same(&self.alg) {
            return Err(Error::SignatureMismatch);
        }
        nr_bracket(&self.get(n), omega)
    }
}

/// `rho_n(omega) = [mu_n, omega]`, with `mu_sym` on noncommutative signatures.
pub fn rho(n: usize, omega: &MultiOp) -> Result<MultiOp> {
    nr_bracket(&multiplication(&omega.alg, n), omega)
}

/// The degree-0 operator with the action of `f`.
pub fn lift_endo(f: &EndoOp) -> Result<MultiOp> {
    let alg = f.algebra();
    let parity = f.parity().ok_or(Error::NotHomogeneous)?;
    let entries = (0..alg.dim() as Idx).map(|i| {
        let mut t = Tuple::new();
        t.push(i);
        (t, f.column(i).to_vec())
    });
    Ok(MultiOp::from_table(alg, 0, parity, entries))
}

/// The endomorphism underlying a degree-0 operator.
pub fn to_endo(op: &MultiOp) -> Result<EndoOp> {
    if op.degree != 0 {
        return Err(Error::ArityMismatch { expected: 1, got: op.arity() });
    }
    Ok(EndoOp::from_fn(&op.alg, |i| op.table.get(&[i][..]).cloned().unwrap_or_default()))
}

/// Random operator of the given degree and parity on tuples of total degree at most `D`,
/// with integer values in `[-9, 9]` and roughly `density` of entries nonzero.
pub fn random_multiop(alg: &Arc<Algebra>, degree: usize, parity: Parity, seed: u64, density: f64) -> MultiOp {
    let mut rng = seeded_rng(seed);
    let mut entries = Vec::new();
    for t in canonical_tuples(alg, degree + 1, alg.signature().degree) {
        let target = t.iter().fold(parity.bit(), |p, &i| p ^ alg.parity_bit(i));
        let terms: Terms = (0..alg.dim() as Idx)
            .filter(|&j| alg.parity_bit(j) == target)
            .filter_map(|j| {
                if !rng.gen_bool(density) {
                    return None;
                }
                let v: i64 = rng.gen_range(-9..=9);
                (v != 0).then(|| (j, Rational::from(v)))
            })
            .collect();
        entries.push((t, terms));
    }
    MultiOp::from_table(alg, degree, parity, entries)
}

/// Finitely many homogeneous components indexed by degree.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct OpFamily {
    components: BTreeMap<usize, MultiOp>,
}

impl OpFamily {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(op: MultiOp) -> Self {
        let mut f = Self::new();
        f.components.insert(op.degree, op);
        f
    }

    pub fn get(&self, degree: usize) -> Option<&MultiOp> {
        self.components.get(&degree)
    }

    pub fn components(&self) -> impl Iterator<Item = (&usize, &MultiOp)> {
        self.components.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.components.values().all(MultiOp::is_zero)
    }

    /// Adds `c * op` to the component of its degree.
    pub fn add_scaled(&mut self, op: &MultiOp, c: &Rational) -> Result<()> {
        let slot = match self.components.get(&op.degree) {
            Some(existing) => existing.add_scaled(op, c)?,
            None => op.scale(c),
        };
        self.components.insert(op.degree, slot);
        Ok(())
    }

    /// `[self, other]` componentwise, keeping degrees up to `max_degree`.
    pub fn bracket(&self, other: &OpFamily, max_degree: usize) -> Result<OpFamily> {
        let mut out = OpFamily::new();
        for (&i, f) in &self.components {
            for (&j, g) in &other.components {
                if i + j <= max_degree {
                    out.add_scaled(&nr_bracket(f, g)?, &Rational::one())?;
                }
            }
        }
        Ok(out)
    }

    /// `rho_n` applied componentwise, keeping degrees up to `max_degree`.
    pub fn rho(&self, mults: &Multiplications, n: usize, max_degree: usize) -> Result<OpFamily> {
        let mut out = OpFamily::new();
        for (&d, op) in &self.components {
            if d + n <= max_degree {
                out.add_scaled(&mults.rho(n, op)?, &Rational::one())?;
            }
        }
        Ok(out)
    }
}
