//! Exact rational functions in interned symbols.
//!
//! An [`Expr`] is a reduced fraction of polynomials over Q with a monic
//! denominator, so structural equality is mathematical equality and zero
//! testing is `num.is_zero()`.

pub mod cap;
mod gcd;
pub mod poly;
pub mod symbol;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

pub use cap::{with_size_cap, SizeCapExceeded};
pub use gcd::gcd as poly_gcd;
pub use poly::{Mono, Poly, Q};
pub use symbol::{Symbol, SymbolKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("symbol `{name}` already exists as {existing:?}, requested {requested:?}")]
    SymbolKindConflict {
        name: String,
        existing: SymbolKind,
        requested: SymbolKind,
    },
    #[error("unbound symbol `{0}` in evaluation")]
    Unbound(String),
    #[error("denominator vanishes at {point}")]
    ZeroDenominator { point: String },
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct Frac {
    num: Poly,
    den: Poly,
}

/// Canonical rational function. Cheap to clone.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Expr(Arc<Frac>);

/// Un-normalized expression tree, the input to [`canonicalize`].
#[derive(Clone, Debug)]
pub enum Tree {
    Sym(Symbol),
    Num(Q),
    Add(Box<Tree>, Box<Tree>),
    Sub(Box<Tree>, Box<Tree>),
    Mul(Box<Tree>, Box<Tree>),
    Div(Box<Tree>, Box<Tree>),
    Neg(Box<Tree>),
    Pow(Box<Tree>, i64),
}

pub fn canonicalize(t: &Tree) -> Result<Expr, ExprError> {
    Ok(match t {
        Tree::Sym(s) => Expr::sym(*s),
        Tree::Num(c) => Expr::constant(c.clone()),
        Tree::Add(a, b) => canonicalize(a)? + canonicalize(b)?,
        Tree::Sub(a, b) => canonicalize(a)? - canonicalize(b)?,
        Tree::Mul(a, b) => canonicalize(a)? * canonicalize(b)?,
        Tree::Div(a, b) => canonicalize(a)?.checked_div(&canonicalize(b)?)?,
        Tree::Neg(a) => -canonicalize(a)?,
        Tree::Pow(a, e) => canonicalize(a)?.checked_pow(*e)?,
    })
}

impl Expr {
    fn from_parts_unchecked(num: Poly, den: Poly) -> Expr {
        Expr(Arc::new(Frac { num, den }))
    }

    /// Reduces num/den to canonical form.
    pub fn from_polys(num: Poly, den: Poly) -> Result<Expr, ExprError> {
        if den.is_zero() {
            return Err(ExprError::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(Expr::zero());
        }
        if let Some(c) = den.constant_value() {
            return Ok(Self::from_parts_unchecked(
                num.scale(&(Q::one() / c)),
                Poly::one(),
            ));
        }
        let g = gcd::gcd(&num, &den);
        let (n, d) = if g.is_one() {
            (num, den)
        } else {
            (
                num.div_exact(&g).expect("gcd divides"),
                den.div_exact(&g).expect("gcd divides"),
            )
        };
        let lc = d.lc();
        if lc.is_one() {
            Ok(Self::from_parts_unchecked(n, d))
        } else {
            let k = Q::one() / lc;
            Ok(Self::from_parts_unchecked(n.scale(&k), d.scale(&k)))
        }
    }

    pub fn from_poly(p: Poly) -> Expr {
        Self::from_parts_unchecked(p, Poly::one())
    }

    pub fn zero() -> Expr {
        Self::from_parts_unchecked(Poly::zero(), Poly::one())
    }

    pub fn one() -> Expr {
        Self::from_parts_unchecked(Poly::one(), Poly::one())
    }

    pub fn constant(c: Q) -> Expr {
        Self::from_poly(Poly::constant(c))
    }

    pub fn int(n: i64) -> Expr {
        Self::constant(Q::from_integer(BigInt::from(n)))
    }

    pub fn frac(n: i64, d: i64) -> Expr {
        Self::constant(Q::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn sym(s: Symbol) -> Expr {
        Self::from_poly(Poly::var(s))
    }

    pub fn num(&self) -> &Poly {
        &self.0.num
    }

    pub fn den(&self) -> &Poly {
        &self.0.den
    }

    pub fn is_zero(&self) -> bool {
        self.0.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.num.is_one() && self.0.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.0.den.is_one()
    }

    pub fn constant_value(&self) -> Option<Q> {
        if self.0.den.is_one() {
            self.0.num.constant_value()
        } else {
            None
        }
    }

    /// Number of terms in numerator and denominator.
    pub fn size(&self) -> usize {
        self.0.num.len() + self.0.den.len()
    }

    pub fn symbols(&self) -> Vec<Symbol> {
        let mut v = self.0.num.vars();
        v.extend(self.0.den.vars());
        v.sort_unstable();
        v.dedup();
        v.into_iter().map(Symbol).collect()
    }

    pub fn depends_on(&self, s: Symbol) -> bool {
        self.0.num.degree_in(s.0) > 0 || self.0.den.degree_in(s.0) > 0
    }

    pub fn checked_div(&self, o: &Expr) -> Result<Expr, ExprError> {
        if o.is_zero() {
            return Err(ExprError::DivisionByZero);
        }
        Ok(self * &o.inv_unchecked())
    }

    fn inv_unchecked(&self) -> Expr {
        // swapping keeps gcd = 1; only the monic normalization moves
        let n = self.0.den.clone();
        let d = self.0.num.clone();
        let lc = d.lc();
        let k = Q::one() / lc;
        Self::from_parts_unchecked(n.scale(&k), d.scale(&k))
    }

    pub fn inv(&self) -> Result<Expr, ExprError> {
        if self.is_zero() {
            Err(ExprError::DivisionByZero)
        } else {
            Ok(self.inv_unchecked())
        }
    }

    pub fn checked_pow(&self, e: i64) -> Result<Expr, ExprError> {
        if e < 0 {
            return self.inv()?.checked_pow(-e);
        }
        let e = u32::try_from(e).expect("exponent too large");
        Ok(Self::from_parts_unchecked(
            self.0.num.pow(e),
            self.0.den.pow(e),
        ))
    }

    pub fn pow(&self, e: i64) -> Expr {
        self.checked_pow(e)
            .expect("pow of zero to a negative power")
    }

    pub fn scale(&self, c: &Q) -> Expr {
        if c.is_zero() {
            return Expr::zero();
        }
        Self::from_parts_unchecked(self.0.num.scale(c), self.0.den.clone())
    }

    /// Partial derivative in `s`.
    pub fn diff(&self, s: Symbol) -> Expr {
        self.derive_with(&|v| if v == s { Some(Expr::one()) } else { None })
    }

    /// Applies the derivation determined by its values on symbols;
    /// `None` means the symbol is a constant for this derivation.
    pub fn derive_with(&self, d: &dyn Fn(Symbol) -> Option<Expr>) -> Expr {
        let mut images: HashMap<u32, Option<Expr>> = HashMap::new();
        let mut img = |v: u32| images.entry(v).or_insert_with(|| d(Symbol(v))).clone();
        let mut dpoly = |p: &Poly| -> Expr {
            let mut acc = Expr::zero();
            for v in p.vars() {
                if let Some(dv) = img(v) {
                    if dv.is_zero() {
                        continue;
                    }
                    let pd = Expr::from_poly(p.deriv(Symbol(v)));
                    acc = acc + pd * dv;
                }
            }
            acc
        };
        let dn = dpoly(&self.0.num);
        if self.0.den.is_one() {
            return dn;
        }
        let dd = dpoly(&self.0.den);
        let n = Expr::from_poly(self.0.num.clone());
        let den = Expr::from_poly(self.0.den.clone());
        // (n/d)' = n'/d - n d'/d^2
        if dd.is_zero() {
            return dn * den.inv_unchecked();
        }
        (dn * den.clone() - n * dd) * den.pow(2).inv_unchecked()
    }

    /// Simultaneous substitution.
    pub fn substitute(&self, b: &BTreeMap<Symbol, Expr>) -> Result<Expr, ExprError> {
        if b.is_empty() {
            return Ok(self.clone());
        }
        let n = subst_poly(&self.0.num, b);
        if self.0.den.is_one() {
            return Ok(n);
        }
        let d = subst_poly(&self.0.den, b);
        n.checked_div(&d)
    }

    pub fn subs(&self, s: Symbol, v: &Expr) -> Result<Expr, ExprError> {
        let mut b = BTreeMap::new();
        b.insert(s, v.clone());
        self.substitute(&b)
    }

    pub fn eval(&self, point: &BTreeMap<Symbol, Q>) -> Result<Q, ExprError> {
        self.eval_with(&|s| point.get(&s).cloned())
    }

    pub fn eval_with(&self, f: &dyn Fn(Symbol) -> Option<Q>) -> Result<Q, ExprError> {
        let n = self
            .0
            .num
            .eval(f)
            .map_err(|s| ExprError::Unbound(s.name()))?;
        if self.0.den.is_one() {
            return Ok(n);
        }
        let d = self
            .0
            .den
            .eval(f)
            .map_err(|s| ExprError::Unbound(s.name()))?;
        if d.is_zero() {
            let mut pt = String::new();
            for (k, s) in self.symbols().into_iter().enumerate() {
                if k > 0 {
                    pt.push_str(", ");
                }
                let v = f(s).map(|v| v.to_string()).unwrap_or_else(|| "?".into());
                pt.push_str(&format!("{}={}", s, v));
            }
            return Err(ExprError::ZeroDenominator {
                point: format!("{{{pt}}}"),
            });
        }
        Ok(n / d)
    }
}

fn subst_poly(p: &Poly, b: &BTreeMap<Symbol, Expr>) -> Expr {
    let mut powers: HashMap<(u32, u32), Expr> = HashMap::new();
    let mut acc_poly: Vec<(Mono, Q)> = Vec::new();
    let mut acc = Expr::zero();
    for (m, c) in p.terms() {
        let mut keep = Mono::one();
        let mut t = Expr::one();
        for (s, e) in m.iter() {
            match b.get(&s) {
                Some(v) => {
                    let pw = powers
                        .entry((s.0, e))
                        .or_insert_with(|| v.pow(e as i64))
                        .clone();
                    t = t * pw;
                }
                None => keep = keep.mul(&Mono::var(s, e)),
            }
        }
        if t.is_one() {
            acc_poly.push((keep, c.clone()));
        } else {
            acc = acc + t * Expr::from_poly(Poly::term(keep, c.clone()));
        }
    }
    acc + Expr::from_poly(Poly::from_terms(acc_poly))
}

impl Default for Expr {
    fn default() -> Self {
        Expr::zero()
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::parse::render_text(self))
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::parse::render_text(self))
    }
}

fn add_ref(a: &Expr, b: &Expr) -> Expr {
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.clone();
    }
    let (an, ad, bn, bd) = (&a.0.num, &a.0.den, &b.0.num, &b.0.den);
    if ad.is_one() && bd.is_one() {
        return Expr::from_poly(an.add(bn));
    }
    if ad == bd {
        let n = an.add(bn);
        return Expr::from_polys(n, ad.clone()).unwrap();
    }
    // a/b + c/d with g = gcd(b, d); only g can share factors with the sum
    let g = gcd::gcd(ad, bd);
    let (ad1, bd1) = if g.is_one() {
        (ad.clone(), bd.clone())
    } else {
        (ad.div_exact(&g).unwrap(), bd.div_exact(&g).unwrap())
    };
    let n = an.mul(&bd1).add(&bn.mul(&ad1));
    if n.is_zero() {
        return Expr::zero();
    }
    let d = ad.mul(&bd1);
    if g.is_one() {
        let lc = d.lc();
        let k = Q::one() / lc;
        return Expr::from_parts_unchecked(n.scale(&k), d.scale(&k));
    }
    let h = gcd::gcd(&n, &g);
    let (n, d) = if h.is_one() {
        (n, d)
    } else {
        (n.div_exact(&h).unwrap(), d.div_exact(&h).unwrap())
    };
    let k = Q::one() / d.lc();
    Expr::from_parts_unchecked(n.scale(&k), d.scale(&k))
}

fn mul_ref(a: &Expr, b: &Expr) -> Expr {
    if a.is_zero() || b.is_zero() {
        return Expr::zero();
    }
    if a.is_one() {
        return b.clone();
    }
    if b.is_one() {
        return a.clone();
    }
    let (an, ad, bn, bd) = (&a.0.num, &a.0.den, &b.0.num, &b.0.den);
    if ad.is_one() && bd.is_one() {
        return Expr::from_poly(an.mul(bn));
    }
    // cross-cancel: gcd(an, bd) and gcd(bn, ad)
    let g1 = if bd.is_one() {
        Poly::one()
    } else {
        gcd::gcd(an, bd)
    };
    let g2 = if ad.is_one() {
        Poly::one()
    } else {
        gcd::gcd(bn, ad)
    };
    let an1 = if g1.is_one() {
        an.clone()
    } else {
        an.div_exact(&g1).unwrap()
    };
    let bd1 = if g1.is_one() {
        bd.clone()
    } else {
        bd.div_exact(&g1).unwrap()
    };
    let bn1 = if g2.is_one() {
        bn.clone()
    } else {
        bn.div_exact(&g2).unwrap()
    };
    let ad1 = if g2.is_one() {
        ad.clone()
    } else {
        ad.div_exact(&g2).unwrap()
    };
    let n = an1.mul(&bn1);
    let d = ad1.mul(&bd1);
    let k = Q::one() / d.lc();
    Expr::from_parts_unchecked(n.scale(&k), d.scale(&k))
}

macro_rules! binop {
    ($tr:ident, $m:ident, $f:expr) => {
        impl $tr<Expr> for Expr {
            type Output = Expr;
            fn $m(self, o: Expr) -> Expr {
                $f(&self, &o)
            }
        }
        impl $tr<&Expr> for Expr {
            type Output = Expr;
            fn $m(self, o: &Expr) -> Expr {
                $f(&self, o)
            }
        }
        impl $tr<Expr> for &Expr {
            type Output = Expr;
            fn $m(self, o: Expr) -> Expr {
                $f(self, &o)
            }
        }
        impl $tr<&Expr> for &Expr {
            type Output = Expr;
            fn $m(self, o: &Expr) -> Expr {
                $f(self, o)
            }
        }
    };
}

binop!(Add, add, add_ref);
binop!(Mul, mul, mul_ref);
binop!(Sub, sub, |a: &Expr, b: &Expr| add_ref(a, &(-b)));
binop!(Div, div, |a: &Expr, b: &Expr| a
    .checked_div(b)
    .expect("division by zero expression"));

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::from_parts_unchecked(self.0.num.neg(), self.0.den.clone())
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Expr {
        Expr::int(n)
    }
}

impl From<Symbol> for Expr {
    fn from(s: Symbol) -> Expr {
        Expr::sym(s)
    }
}

impl From<Q> for Expr {
    fn from(c: Q) -> Expr {
        Expr::constant(c)
    }
}

/// Shorthand for rationals in tests and tables.
pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Expr {
        Expr::sym(Symbol::X)
    }
    fn u() -> Expr {
        Expr::sym(Symbol::U)
    }
    fn p() -> Expr {
        Expr::sym(Symbol::P)
    }
    fn qq() -> Expr {
        Expr::sym(Symbol::Q)
    }

    #[test]
    fn difference_of_squares_cancels() {
        let e = (x() + u()) * (x() - u()) - x().pow(2) + u().pow(2);
        assert!(e.is_zero());
    }

    #[test]
    fn x_over_x_is_one() {
        assert!((x() / x()).is_one());
    }

    #[test]
    fn quotient_reduces_to_sum() {
        let e = (p().pow(2) - qq().pow(2)) / (p() - qq());
        assert_eq!(e, p() + qq());
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(
            (p().pow(2) * qq()).diff(Symbol::P),
            Expr::int(2) * p() * qq()
        );
        assert_eq!(x().inv().unwrap().diff(Symbol::X), -(x().pow(-2)));
        let e = (u() + p()) / (x() * qq());
        assert_eq!(e.diff(Symbol::Q), -(u() + p()) / (x() * qq().pow(2)));
    }

    #[test]
    fn substitution_is_simultaneous() {
        let mut b = BTreeMap::new();
        b.insert(Symbol::X, u());
        b.insert(Symbol::U, x());
        assert_eq!((x() + u()).substitute(&b).unwrap(), x() + u());
        let e = x() - Expr::int(2) * u();
        assert_eq!(e.substitute(&b).unwrap(), u() - Expr::int(2) * x());
    }

    #[test]
    fn evaluation_and_zero_denominator() {
        let mut pt = BTreeMap::new();
        pt.insert(Symbol::X, qi(2));
        pt.insert(Symbol::P, qi(1));
        pt.insert(Symbol::Q, qi(3));
        assert_eq!(((p() + qq()) / x()).eval(&pt).unwrap(), qi(2));
        pt.insert(Symbol::X, qi(0));
        assert!(matches!(
            ((p() + qq()) / x()).eval(&pt),
            Err(ExprError::ZeroDenominator { .. })
        ));
    }

    #[test]
    fn denominators_are_monic() {
        let e = x() / (Expr::int(3) * u() + Expr::int(6));
        assert!(e.den().lc().is_one());
        assert_eq!(e * (u() + Expr::int(2)) * Expr::int(3), x());
    }

    #[test]
    fn gcd_of_shared_factor() {
        let f = (x() + u() * p() + Expr::int(1)).num().clone();
        let a = f.mul(&(x() - p()).num().clone());
        let b = f.mul(&(u().pow(2) + qq()).num().clone());
        assert_eq!(poly_gcd(&a, &b), f.monic());
    }

    #[test]
    fn size_cap_fails_loudly() {
        let e = (x() + u() + p() + qq() + Expr::int(1)).pow(3);
        let r = with_size_cap(10, || e.pow(3));
        assert!(r.is_err());
        let r = with_size_cap(100_000, || e.pow(2).size());
        assert!(r.is_ok());
    }
}
