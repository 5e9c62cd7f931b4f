//! Sparse multivariate polynomials over Q in graded-lex order.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::cap;
use super::symbol::Symbol;

pub type Q = BigRational;

/// Exponent vector, sparse, sorted by variable id.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Mono(pub(crate) Vec<(u32, u32)>);

impl Mono {
    pub fn one() -> Mono {
        Mono(Vec::new())
    }

    pub fn var(s: Symbol, e: u32) -> Mono {
        if e == 0 {
            Mono::one()
        } else {
            Mono(vec![(s.0, e)])
        }
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exp(&self, v: u32) -> u32 {
        self.0.iter().find(|&&(w, _)| w == v).map_or(0, |&(_, e)| e)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Symbol, u32)> + '_ {
        self.0.iter().map(|&(v, e)| (Symbol(v), e))
    }

    pub fn mul(&self, o: &Mono) -> Mono {
        let (a, b) = (&self.0, &o.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Mono(out)
    }

    /// self / o if o divides self.
    pub fn div(&self, o: &Mono) -> Option<Mono> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut j = 0;
        for &(v, e) in &self.0 {
            let mut e = e;
            if j < o.0.len() && o.0[j].0 == v {
                if o.0[j].1 > e {
                    return None;
                }
                e -= o.0[j].1;
                j += 1;
            } else if j < o.0.len() && o.0[j].0 < v {
                return None;
            }
            if e > 0 {
                out.push((v, e));
            }
        }
        if j < o.0.len() {
            return None;
        }
        Some(Mono(out))
    }

    /// Componentwise minimum.
    pub fn gcd(&self, o: &Mono) -> Mono {
        let mut out = Vec::new();
        for &(v, e) in &self.0 {
            let f = o.exp(v);
            if f > 0 {
                out.push((v, e.min(f)));
            }
        }
        Mono(out)
    }

    pub(crate) fn without(&self, v: u32) -> (u32, Mono) {
        let mut e0 = 0;
        let rest = self
            .0
            .iter()
            .filter(|&&(w, e)| {
                if w == v {
                    e0 = e;
                    false
                } else {
                    true
                }
            })
            .copied()
            .collect();
        (e0, Mono(rest))
    }
}

impl Ord for Mono {
    fn cmp(&self, o: &Self) -> Ordering {
        match self.degree().cmp(&o.degree()) {
            Ordering::Equal => {}
            c => return c,
        }
        let (a, b) = (&self.0, &o.0);
        let n = a.len().min(b.len());
        for k in 0..n {
            if a[k].0 != b[k].0 {
                // the side holding the earlier variable is larger
                return if a[k].0 < b[k].0 {
                    Ordering::Greater
                } else {
                    Ordering::Less
                };
            }
            if a[k].1 != b[k].1 {
                return a[k].1.cmp(&b[k].1);
            }
        }
        a.len().cmp(&b.len())
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Debug for Mono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (k, (s, e)) in self.iter().enumerate() {
            if k > 0 {
                write!(f, "*")?;
            }
            if e == 1 {
                write!(f, "{}", s)?;
            } else {
                write!(f, "{}^{}", s, e)?;
            }
        }
        Ok(())
    }
}

/// Terms sorted by decreasing monomial, no zero coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    pub(crate) terms: Vec<(Mono, Q)>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({})*{:?}", c, m)?;
        }
        Ok(())
    }
}

impl Poly {
    pub fn zero() -> Poly {
        Poly { terms: Vec::new() }
    }

    pub fn one() -> Poly {
        Poly::constant(Q::one())
    }

    pub fn constant(c: Q) -> Poly {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly {
                terms: vec![(Mono::one(), c)],
            }
        }
    }

    pub fn var(s: Symbol) -> Poly {
        Poly {
            terms: vec![(Mono::var(s, 1), Q::one())],
        }
    }

    pub fn term(m: Mono, c: Q) -> Poly {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly {
                terms: vec![(m, c)],
            }
        }
    }

    /// Builds from unsorted terms, merging duplicates.
    pub fn from_terms(ts: Vec<(Mono, Q)>) -> Poly {
        let mut map: HashMap<Mono, Q> = HashMap::with_capacity(ts.len());
        for (m, c) in ts {
            *map.entry(m).or_insert_with(Q::zero) += c;
        }
        let mut terms: Vec<_> = map.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        Poly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0.is_one())
    }

    pub fn constant_value(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(Q::zero()),
            1 if self.terms[0].0.is_one() => Some(self.terms[0].1.clone()),
            _ => None,
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[(Mono, Q)] {
        &self.terms
    }

    pub fn lead(&self) -> Option<&(Mono, Q)> {
        self.terms.first()
    }

    pub fn lc(&self) -> Q {
        self.terms.first().map_or_else(Q::zero, |t| t.1.clone())
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.iter().map(|t| t.0.degree()).max().unwrap_or(0)
    }

    /// Variables present, ascending id.
    pub fn vars(&self) -> Vec<u32> {
        let mut v: Vec<u32> = self
            .terms
            .iter()
            .flat_map(|t| t.0 .0.iter().map(|&(w, _)| w))
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn symbols(&self) -> Vec<Symbol> {
        self.vars().into_iter().map(Symbol).collect()
    }

    pub fn degree_in(&self, v: u32) -> u32 {
        self.terms.iter().map(|t| t.0.exp(v)).max().unwrap_or(0)
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, d)| (m.clone(), d * c)).collect(),
        }
    }

    pub fn mul_mono(&self, m: &Mono, c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(n, d)| (n.mul(m), d * c)).collect(),
        }
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let (a, b) = (&self.terms, &o.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    out.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let c = &a[i].1 + &b[j].1;
                    if !c.is_zero() {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        let p = Poly { terms: out };
        cap::check(p.len());
        p
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        if let Some(c) = self.constant_value() {
            return o.scale(&c);
        }
        if let Some(c) = o.constant_value() {
            return self.scale(&c);
        }
        let mut map: HashMap<Mono, Q> = HashMap::with_capacity(self.len() * o.len());
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                let m = m1.mul(m2);
                let c = c1 * c2;
                match map.get_mut(&m) {
                    Some(v) => *v += c,
                    None => {
                        map.insert(m, c);
                    }
                }
            }
        }
        let mut terms: Vec<_> = map.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        let p = Poly { terms };
        cap::check(p.len());
        p
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Exact quotient, `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        assert!(!d.is_zero(), "division by zero polynomial");
        if let Some(c) = d.constant_value() {
            return Some(self.scale(&(Q::one() / c)));
        }
        let (lm, lc) = d.lead().cloned().unwrap();
        let mut r = self.clone();
        let mut q = Vec::new();
        while let Some((m, c)) = r.lead().cloned() {
            let t = m.div(&lm)?;
            let k = &c / &lc;
            r = r.sub(&d.mul_mono(&t, &k));
            q.push((t, k));
        }
        Some(Poly { terms: q })
    }

    pub fn deriv(&self, s: Symbol) -> Poly {
        let v = s.0;
        let mut ts = Vec::new();
        for (m, c) in &self.terms {
            let e = m.exp(v);
            if e == 0 {
                continue;
            }
            let mut n = m.clone();
            for t in n.0.iter_mut() {
                if t.0 == v {
                    t.1 -= 1;
                }
            }
            n.0.retain(|t| t.1 > 0);
            ts.push((n, c * Q::from_integer(BigInt::from(e))));
        }
        // differentiation can reorder terms only through ties, so re-sort
        Poly::from_terms(ts)
    }

    pub fn eval(&self, vals: &dyn Fn(Symbol) -> Option<Q>) -> Result<Q, Symbol> {
        let mut cache: HashMap<u32, Q> = HashMap::new();
        let mut acc = Q::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for &(v, e) in &m.0 {
                let x = match cache.get(&v) {
                    Some(x) => x.clone(),
                    None => {
                        let x = vals(Symbol(v)).ok_or(Symbol(v))?;
                        cache.insert(v, x.clone());
                        x
                    }
                };
                t *= num_traits::pow(x, e as usize);
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Coefficients in variable `v`: result[k] is the coefficient of v^k.
    pub fn coeffs_in(&self, v: u32) -> Vec<Poly> {
        let d = self.degree_in(v) as usize;
        let mut buckets: Vec<Vec<(Mono, Q)>> = vec![Vec::new(); d + 1];
        for (m, c) in &self.terms {
            let (e, rest) = m.without(v);
            buckets[e as usize].push((rest, c.clone()));
        }
        buckets
            .into_iter()
            .map(|mut ts| {
                // removing a variable keeps relative order except for degree ties
                ts.sort_unstable_by(|a, b| b.0.cmp(&a.0));
                Poly { terms: ts }
            })
            .collect()
    }

    pub fn from_coeffs_in(v: u32, cs: &[Poly]) -> Poly {
        let mut ts = Vec::new();
        for (k, c) in cs.iter().enumerate() {
            let m = Mono::var(Symbol(v), k as u32);
            for (n, a) in &c.terms {
                ts.push((n.mul(&m), a.clone()));
            }
        }
        Poly::from_terms(ts)
    }

    /// Scale so the leading coefficient is 1.
    pub fn monic(&self) -> Poly {
        match self.lead() {
            None => Poly::zero(),
            Some((_, c)) if c.is_one() => self.clone(),
            Some((_, c)) => self.scale(&(Q::one() / c)),
        }
    }

    /// Least common denominator of the coefficients and gcd of numerators.
    pub fn integer_content(&self) -> Q {
        use num_integer::Integer;
        let mut n = BigInt::zero();
        let mut d = BigInt::one();
        for (_, c) in &self.terms {
            n = n.gcd(c.numer());
            d = d.lcm(c.denom());
        }
        if n.is_zero() {
            return Q::one();
        }
        let mut q = Q::new(n, d);
        if self.lc().is_negative() {
            q = -q;
        }
        q
    }

    /// Smallest monomial dividing every term.
    pub fn mono_content(&self) -> Mono {
        let mut it = self.terms.iter();
        let Some((first, _)) = it.next() else {
            return Mono::one();
        };
        let mut g = first.clone();
        for (m, _) in it {
            if g.is_one() {
                break;
            }
            g = g.gcd(m);
        }
        g
    }
}
