//! Multivariate gcd over Q: recursive contents plus a subresultant PRS in
//! one main variable. Results are monic.

use num_traits::One;

use super::poly::{Mono, Poly, Q};

pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    if a == b {
        return a.monic();
    }
    // pull out monomial contents first; cheap and common
    let ma = a.mono_content();
    let mb = b.mono_content();
    let mg = ma.gcd(&mb);
    let a = if ma.is_one() {
        a.clone()
    } else {
        a.div_exact(&Poly::term(ma, Q::one())).unwrap()
    };
    let b = if mb.is_one() {
        b.clone()
    } else {
        b.div_exact(&Poly::term(mb, Q::one())).unwrap()
    };
    let g = gcd_nomono(&a, &b);
    if mg.is_one() {
        g
    } else {
        g.mul_mono(&mg, &Q::one()).monic()
    }
}

fn single_term(p: &Poly) -> bool {
    p.len() == 1
}

fn gcd_nomono(a: &Poly, b: &Poly) -> Poly {
    if a.is_constant() || b.is_constant() || single_term(a) || single_term(b) {
        // monomial content already removed, so a single term is a constant here
        return Poly::one();
    }
    let va = a.vars();
    let vb = b.vars();
    // a variable present on one side only cannot occur in the gcd
    let mut a = a.clone();
    let mut b = b.clone();
    for &v in &va {
        if vb.binary_search(&v).is_err() {
            a = content_in(&a, v);
            if a.is_constant() {
                return Poly::one();
            }
        }
    }
    for &v in &vb {
        if va.binary_search(&v).is_err() {
            b = content_in(&b, v);
            if b.is_constant() {
                return Poly::one();
            }
        }
    }
    let va = a.vars();
    let vb = b.vars();
    let common: Vec<u32> = va
        .iter()
        .copied()
        .filter(|v| vb.binary_search(v).is_ok())
        .collect();
    if common.is_empty() {
        return Poly::one();
    }
    if a == b {
        return a.monic();
    }
    // main variable: lowest combined degree keeps the PRS short
    let v = *common
        .iter()
        .min_by_key(|&&v| (a.degree_in(v).max(b.degree_in(v)), v))
        .unwrap();
    let ca = content_in(&a, v);
    let cb = content_in(&b, v);
    let pa = a.div_exact(&ca).expect("content divides");
    let pb = b.div_exact(&cb).expect("content divides");
    let c = gcd(&ca, &cb);
    let g = prs(&pa, &pb, v);
    c.mul(&g).monic()
}

/// gcd of the coefficients of `p` viewed as a polynomial in `v`.
pub fn content_in(p: &Poly, v: u32) -> Poly {
    let cs = p.coeffs_in(v);
    let mut nz: Vec<&Poly> = cs.iter().filter(|c| !c.is_zero()).collect();
    // fewest terms first, so constants short-circuit early
    nz.sort_by_key(|c| c.len());
    let mut g = nz[0].monic();
    for c in &nz[1..] {
        if g.is_constant() {
            return Poly::one();
        }
        g = gcd(&g, c);
    }
    if g.is_constant() {
        Poly::one()
    } else {
        g
    }
}

fn lc_in(c: &[Poly]) -> &Poly {
    c.last().unwrap()
}

fn trim(c: &mut Vec<Poly>) {
    while c.len() > 1 && c.last().unwrap().is_zero() {
        c.pop();
    }
    if c.len() == 1 && c[0].is_zero() {
        c.clear();
    }
}

/// Pseudo-remainder of a by b (both as coefficient vectors in the main variable).
fn prem(a: &[Poly], b: &[Poly]) -> Vec<Poly> {
    let db = b.len() - 1;
    let lb = lc_in(b).clone();
    let mut r: Vec<Poly> = a.to_vec();
    let delta = a.len() - b.len();
    let mut steps = 0;
    while r.len() > db && !r.is_empty() {
        let lr = r.last().unwrap().clone();
        let shift = r.len() - 1 - db;
        for x in r.iter_mut() {
            *x = x.mul(&lb);
        }
        for (k, bk) in b.iter().enumerate() {
            let t = bk.mul(&lr);
            r[k + shift] = r[k + shift].sub(&t);
        }
        r.pop();
        trim(&mut r);
        steps += 1;
    }
    // bring the multiplier up to lc(b)^(delta+1)
    let extra = (delta + 1).saturating_sub(steps);
    if extra > 0 && !r.is_empty() {
        let m = lb.pow(extra as u32);
        for x in r.iter_mut() {
            *x = x.mul(&m);
        }
    }
    r
}

fn prs(a: &Poly, b: &Poly, v: u32) -> Poly {
    let mut a = a.coeffs_in(v);
    let mut b = b.coeffs_in(v);
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    let mut g = Poly::one();
    let mut h = Poly::one();
    loop {
        let delta = (a.len() - b.len()) as u32;
        let r = prem(&a, &b);
        if r.is_empty() {
            break;
        }
        if r.len() == 1 {
            return Poly::one();
        }
        let div = g.mul(&h.pow(delta));
        let r: Vec<Poly> = r
            .iter()
            .map(|c| c.div_exact(&div).expect("subresultant division"))
            .collect();
        a = std::mem::replace(&mut b, r);
        g = lc_in(&a).clone();
        if delta > 0 {
            h = g
                .pow(delta)
                .div_exact(&h.pow(delta - 1))
                .expect("subresultant h update");
        }
    }
    let bp = Poly::from_coeffs_in(v, &b);
    let c = content_in(&bp, v);
    bp.div_exact(&c).expect("primitive part").monic()
}

#[allow(dead_code)]
pub(crate) fn mono_poly(m: Mono) -> Poly {
    Poly::term(m, Q::one())
}
