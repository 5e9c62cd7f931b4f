//! F-jets, the total derivative on the equation manifold r = F, and seeded
//! sampling of rational base points.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::expr::{cap, Expr, ExprError, Symbol, SymbolKind, Q};
use crate::series::{self, Idx};

const LETTERS: [char; 4] = ['x', 'u', 'p', 'q'];

/// Name of ∂^σ F: `F`, `F_x`, `F_xqq`, ... (letters in x, u, p, q order).
pub fn fjet_name(m: &Idx) -> String {
    let mut s = String::from("F");
    if m.iter().any(|&e| e > 0) {
        s.push('_');
        for (k, &e) in m.iter().enumerate() {
            for _ in 0..e {
                s.push(LETTERS[k]);
            }
        }
    }
    s
}

pub fn fjet_symbol(m: &Idx) -> Symbol {
    Symbol::intern(&fjet_name(m), SymbolKind::FJet)
}

/// Inverse of [`fjet_name`] for symbols of kind f-jet.
pub fn fjet_index(s: Symbol) -> Option<Idx> {
    if s.kind() != SymbolKind::FJet {
        return None;
    }
    let name = s.name();
    let rest = name.strip_prefix('F')?;
    let rest = if rest.is_empty() {
        rest
    } else {
        rest.strip_prefix('_')?
    };
    let mut m = [0u8; 4];
    for c in rest.chars() {
        let k = LETTERS.iter().position(|&l| l == c)?;
        m[k] += 1;
    }
    Some(m)
}

fn add(m: &Idx, k: usize) -> Idx {
    let mut n = *m;
    n[k] += 1;
    n
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JetError {
    #[error("F-jet of order {available} is too short; order {needed} is required")]
    OrderUnavailable { needed: usize, available: usize },
    #[error("right-hand side uses `{0}`; only x, u, p, q are allowed")]
    ForeignSymbol(String),
    #[error("{0}")]
    SizeCap(#[from] cap::SizeCapExceeded),
    #[error("constraint {0} vanishes identically")]
    Unsatisfiable(String),
    #[error("no admissible point after {tries} samples; last violated constraint: {constraint}")]
    RetriesExhausted { tries: usize, constraint: String },
    #[error("{0}")]
    Algebra(#[from] ExprError),
}

/// All partials of F up to a fixed order.
#[derive(Debug, Clone, PartialEq)]
pub struct FJet {
    pub order: usize,
    pub partials: BTreeMap<Idx, Expr>,
}

impl FJet {
    pub fn build(f: &Expr, order: usize) -> Result<FJet, JetError> {
        for s in f.symbols() {
            if !Symbol::base().contains(&s) {
                return Err(JetError::ForeignSymbol(s.name()));
            }
        }
        let build = || {
            let mut partials = BTreeMap::new();
            partials.insert([0u8; 4], f.clone());
            for m in series::monomials(order).iter().skip(1) {
                // differentiate the graded predecessor in its last nonzero slot
                let k = (0..4).rev().find(|&k| m[k] > 0).unwrap();
                let mut prev = *m;
                prev[k] -= 1;
                let d = partials[&prev].diff(Symbol::base()[k]);
                partials.insert(*m, d);
            }
            partials
        };
        let partials = cap::with_size_cap(cap::limit(), build)?;
        Ok(FJet { order, partials })
    }

    /// The jet whose partials are the F-jet symbols themselves.
    pub fn formal(order: usize) -> FJet {
        let partials = series::monomials(order)
            .iter()
            .map(|m| (*m, Expr::sym(fjet_symbol(m))))
            .collect();
        FJet { order, partials }
    }

    pub fn f(&self) -> &Expr {
        &self.partials[&[0, 0, 0, 0]]
    }

    pub fn partial(&self, m: &Idx) -> Result<&Expr, JetError> {
        self.partials.get(m).ok_or(JetError::OrderUnavailable {
            needed: series::degree(m),
            available: self.order,
        })
    }

    /// Replaces F-jet symbols by this jet's entries.
    pub fn instantiate(&self, e: &Expr) -> Result<Expr, JetError> {
        let mut b = BTreeMap::new();
        for s in e.symbols() {
            if let Some(m) = fjet_index(s) {
                b.insert(s, self.partial(&m)?.clone());
            }
        }
        Ok(e.substitute(&b)?)
    }

    /// Denominators of the stored partials, for sampling constraints.
    pub fn denominators(&self) -> Vec<Expr> {
        let mut v: Vec<Expr> = Vec::new();
        for e in self.partials.values() {
            if !e.den().is_one() {
                let d = Expr::from_poly(e.den().clone());
                if !v.contains(&d) {
                    v.push(d);
                }
            }
        }
        v
    }
}

/// D_x = ∂x + p∂u + q∂p + F∂q with F-jet symbols advanced by the same rule.
/// The result keeps F-jet symbols; `max_order` bounds the jets it may create.
pub fn total_derivative_formal(e: &Expr, max_order: usize) -> Result<Expr, JetError> {
    for s in e.symbols() {
        if let Some(m) = fjet_index(s) {
            if series::degree(&m) + 1 > max_order {
                return Err(JetError::OrderUnavailable {
                    needed: series::degree(&m) + 1,
                    available: max_order,
                });
            }
        }
    }
    let f = Expr::sym(fjet_symbol(&[0, 0, 0, 0]));
    let (p, q) = (Expr::sym(Symbol::P), Expr::sym(Symbol::Q));
    Ok(e.derive_with(&|s| {
        if s == Symbol::X {
            Some(Expr::one())
        } else if s == Symbol::U {
            Some(p.clone())
        } else if s == Symbol::P {
            Some(q.clone())
        } else if s == Symbol::Q {
            Some(f.clone())
        } else if let Some(m) = fjet_index(s) {
            let t = |k| Expr::sym(fjet_symbol(&add(&m, k)));
            Some(t(0) + &p * t(1) + &q * t(2) + &f * t(3))
        } else {
            None
        }
    }))
}

/// The total derivative on the equation manifold with F's actual partials.
pub fn total_derivative_on_equation(e: &Expr, fjet: &FJet) -> Result<Expr, JetError> {
    let d = total_derivative_formal(e, fjet.order)?;
    fjet.instantiate(&d)
}

/// A rational base point with the F-jet evaluated there.
#[derive(Debug, Clone, PartialEq)]
pub struct JetPoint {
    pub base: [Q; 4],
    pub fjet: BTreeMap<Idx, Q>,
    pub seed: u64,
    pub attempt: usize,
}

impl JetPoint {
    pub fn binding(&self) -> BTreeMap<Symbol, Q> {
        Symbol::base()
            .into_iter()
            .zip(self.base.iter().cloned())
            .collect()
    }

    /// Evaluates every partial of `fjet` at `base`.
    pub fn at(fjet: &FJet, base: [Q; 4]) -> Result<JetPoint, JetError> {
        let b: BTreeMap<Symbol, Q> = Symbol::base()
            .into_iter()
            .zip(base.iter().cloned())
            .collect();
        let mut vals = BTreeMap::new();
        for (m, e) in &fjet.partials {
            vals.insert(*m, e.eval(&b)?);
        }
        Ok(JetPoint {
            base,
            fjet: vals,
            seed: 0,
            attempt: 0,
        })
    }

    pub fn order(&self) -> usize {
        self.fjet.keys().map(series::degree).max().unwrap_or(0)
    }

    /// Taylor series of F at this point, coefficients ∂^σF/σ!.
    pub fn taylor(&self, order: usize) -> series::Series<Q> {
        series::Series::from_coeffs(order, |m| {
            let v = self
                .fjet
                .get(m)
                .unwrap_or_else(|| panic!("F-jet entry {m:?} missing at point"));
            v / Q::from_integer(BigInt::from(series::idx_factorial(m)))
        })
    }
}

pub const DEFAULT_BOX: i64 = 7;
pub const DEFAULT_RETRIES: usize = 32;

#[derive(Debug, Clone, Copy)]
pub struct Sampler {
    pub bound: i64,
    pub retries: usize,
}

impl Default for Sampler {
    fn default() -> Self {
        Sampler {
            bound: DEFAULT_BOX,
            retries: DEFAULT_RETRIES,
        }
    }
}

impl Sampler {
    fn draw(&self, rng: &mut ChaCha8Rng) -> Q {
        let n = rng.gen_range(-self.bound..=self.bound);
        let d = rng.gen_range(1..=self.bound);
        Q::new(BigInt::from(n), BigInt::from(d))
    }

    /// Deterministic in `seed`. Each `avoid` expression, and every
    /// denominator of the jet, must be nonzero at the returned point.
    pub fn sample(&self, fjet: &FJet, avoid: &[Expr], seed: u64) -> Result<JetPoint, JetError> {
        for a in avoid {
            if a.is_zero() {
                return Err(JetError::Unsatisfiable(a.to_string()));
            }
        }
        let mut cons: Vec<Expr> = avoid.to_vec();
        cons.extend(fjet.denominators());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut last = String::new();
        'tries: for attempt in 0..self.retries {
            let base = [
                self.draw(&mut rng),
                self.draw(&mut rng),
                self.draw(&mut rng),
                self.draw(&mut rng),
            ];
            let b: BTreeMap<Symbol, Q> = Symbol::base()
                .into_iter()
                .zip(base.iter().cloned())
                .collect();
            for c in &cons {
                match c.eval(&b) {
                    Ok(v) if !num_traits::Zero::is_zero(&v) => {}
                    _ => {
                        last = c.to_string();
                        continue 'tries;
                    }
                }
            }
            let mut pt = JetPoint::at(fjet, base)?;
            pt.seed = seed;
            pt.attempt = attempt;
            return Ok(pt);
        }
        Err(JetError::RetriesExhausted {
            tries: self.retries,
            constraint: last,
        })
    }
}

pub fn sample_point(fjet: &FJet, avoid: &[Expr], seed: u64) -> Result<JetPoint, JetError> {
    Sampler::default().sample(fjet, avoid, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::qi;
    use crate::parse::parse_expr;

    fn e(s: &str) -> Expr {
        parse_expr(s).unwrap()
    }

    #[test]
    fn names_round_trip() {
        for m in series::monomials(4) {
            assert_eq!(fjet_index(fjet_symbol(m)), Some(*m));
        }
        assert_eq!(fjet_name(&[1, 0, 0, 2]), "F_xqq");
    }

    #[test]
    fn build_examples() {
        let j = FJet::build(&Expr::zero(), 3).unwrap();
        assert!(j.partials.values().all(|v| v.is_zero()));
        let j = FJet::build(&e("q^2"), 1).unwrap();
        assert_eq!(j.partial(&[0, 0, 0, 1]).unwrap(), &e("2*q"));
        assert!(j.partial(&[1, 0, 0, 0]).unwrap().is_zero());
        let j = FJet::build(&e("p*q/x"), 2).unwrap();
        let fxq = j.partial(&[1, 0, 0, 1]).unwrap();
        assert_eq!(fxq, &e("-p/x^2"));
        let mut pt = BTreeMap::new();
        pt.insert(Symbol::X, qi(2));
        pt.insert(Symbol::P, qi(3));
        assert_eq!(fxq.eval(&pt).unwrap(), crate::expr::q(-3, 4));
    }

    #[test]
    fn total_derivative_examples() {
        let formal = FJet::formal(2);
        assert_eq!(
            total_derivative_on_equation(&e("u"), &formal).unwrap(),
            e("p")
        );
        let f0 = Expr::sym(fjet_symbol(&[0, 0, 0, 0]));
        assert_eq!(
            total_derivative_on_equation(&e("p*q"), &formal).unwrap(),
            e("q^2") + e("p") * f0
        );
        let j = FJet::build(&e("q^2"), 3).unwrap();
        let d1 = total_derivative_on_equation(&e("q"), &j).unwrap();
        assert_eq!(d1, e("q^2"));
        assert_eq!(total_derivative_on_equation(&d1, &j).unwrap(), e("2*q^3"));
    }

    #[test]
    fn sampling_contracts() {
        let j = FJet::build(&Expr::zero(), 2).unwrap();
        assert!(sample_point(&j, &[], 3).is_ok());
        let j = FJet::build(&e("1/x"), 2).unwrap();
        let pt = sample_point(&j, &[e("x")], 3).unwrap();
        assert_ne!(pt.base[0], qi(0));
        assert!(matches!(
            sample_point(&j, &[e("x - x")], 3),
            Err(JetError::Unsatisfiable(_))
        ));
        assert_eq!(
            sample_point(&j, &[], 11).unwrap(),
            sample_point(&j, &[], 11).unwrap()
        );
    }
}
