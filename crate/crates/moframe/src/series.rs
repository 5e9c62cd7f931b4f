//! Truncated power series in four variables (s_x, s_u, s_p, s_q), dense in
//! graded order.

use std::sync::LazyLock;

use crate::field::Field;

/// Largest truncation order supported by the index tables.
pub const MAX_ORDER: usize = 12;
const SIDE: usize = MAX_ORDER + 1;

pub type Idx = [u8; 4];

struct Tables {
    monos: Vec<Idx>,
    /// index of the first monomial of each degree, plus a sentinel
    offsets: Vec<usize>,
    lookup: Vec<u16>,
}

static TABLES: LazyLock<Tables> = LazyLock::new(|| {
    let mut monos = Vec::new();
    let mut offsets = Vec::new();
    for d in 0..=MAX_ORDER {
        offsets.push(monos.len());
        for a in (0..=d).rev() {
            for b in (0..=d - a).rev() {
                for c in (0..=d - a - b).rev() {
                    monos.push([a as u8, b as u8, c as u8, (d - a - b - c) as u8]);
                }
            }
        }
    }
    offsets.push(monos.len());
    let mut lookup = vec![u16::MAX; SIDE * SIDE * SIDE * SIDE];
    for (k, m) in monos.iter().enumerate() {
        lookup[flat(m)] = k as u16;
    }
    Tables {
        monos,
        offsets,
        lookup,
    }
});

fn flat(m: &Idx) -> usize {
    ((m[0] as usize * SIDE + m[1] as usize) * SIDE + m[2] as usize) * SIDE + m[3] as usize
}

pub fn degree(m: &Idx) -> usize {
    m.iter().map(|&e| e as usize).sum()
}

/// Number of monomials of degree ≤ n.
pub fn count(n: usize) -> usize {
    TABLES.offsets[n + 1]
}

pub fn index(m: &Idx) -> usize {
    debug_assert!(degree(m) <= MAX_ORDER);
    TABLES.lookup[flat(m)] as usize
}

pub fn monomial(k: usize) -> Idx {
    TABLES.monos[k]
}

/// All exponent vectors of total degree ≤ n, graded.
pub fn monomials(n: usize) -> &'static [Idx] {
    &TABLES.monos[..count(n)]
}

pub fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// a!·b!·c!·d!
pub fn idx_factorial(m: &Idx) -> u64 {
    m.iter().map(|&e| factorial(e as usize)).product()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Series<K> {
    order: usize,
    c: Vec<K>,
}

impl<K: Field> Series<K> {
    pub fn zero(order: usize) -> Self {
        assert!(
            order <= MAX_ORDER,
            "series order {order} exceeds {MAX_ORDER}"
        );
        Series {
            order,
            c: vec![K::zero(); count(order)],
        }
    }

    pub fn constant(v: K, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.c[0] = v;
        s
    }

    /// c + s_i
    pub fn var(i: usize, c: K, order: usize) -> Self {
        let mut s = Self::constant(c, order);
        if order >= 1 {
            let mut m = [0u8; 4];
            m[i] = 1;
            s.c[index(&m)] = K::one();
        }
        s
    }

    pub fn from_coeffs(order: usize, f: impl Fn(&Idx) -> K) -> Self {
        Series {
            order,
            c: monomials(order).iter().map(f).collect(),
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeff(&self, m: &Idx) -> K {
        if degree(m) > self.order {
            panic!("coefficient {:?} beyond truncation order {}", m, self.order);
        }
        self.c[index(m)].clone()
    }

    pub fn set(&mut self, m: &Idx, v: K) {
        let k = index(m);
        self.c[k] = v;
    }

    pub fn c0(&self) -> K {
        self.c[0].clone()
    }

    pub fn truncate(&self, n: usize) -> Self {
        let n = n.min(self.order);
        Series {
            order: n,
            c: self.c[..count(n)].to_vec(),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.order.min(o.order);
        Series {
            order: n,
            c: (0..count(n)).map(|k| self.c[k].add(&o.c[k])).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.order.min(o.order);
        Series {
            order: n,
            c: (0..count(n)).map(|k| self.c[k].sub(&o.c[k])).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        Series {
            order: self.order,
            c: self.c.iter().map(|v| v.neg()).collect(),
        }
    }

    pub fn scale(&self, k: &K) -> Self {
        Series {
            order: self.order,
            c: self.c.iter().map(|v| v.mul(k)).collect(),
        }
    }

    fn nonzero(&self, n: usize) -> Vec<(usize, Idx, usize)> {
        (0..count(n))
            .filter(|&k| !self.c[k].is_zero())
            .map(|k| {
                let m = monomial(k);
                (k, m, degree(&m))
            })
            .collect()
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.order.min(o.order);
        let mut out = Self::zero(n);
        let a = self.nonzero(n);
        let b = o.nonzero(n);
        for (ka, ma, da) in &a {
            for (kb, mb, db) in &b {
                if da + db > n {
                    continue;
                }
                let m = [ma[0] + mb[0], ma[1] + mb[1], ma[2] + mb[2], ma[3] + mb[3]];
                let k = index(&m);
                out.c[k] = out.c[k].add(&self.c[*ka].mul(&o.c[*kb]));
            }
        }
        out
    }

    /// Multiplicative inverse; `None` if the constant term vanishes.
    pub fn inv(&self) -> Option<Self> {
        let b0 = self.c[0].inv()?;
        let n = self.order;
        let mut out = Self::zero(n);
        out.c[0] = b0.clone();
        let a: Vec<(Idx, K)> = self
            .nonzero(n)
            .into_iter()
            .filter(|t| t.0 != 0)
            .map(|t| (t.1, self.c[t.0].clone()))
            .collect();
        for k in 1..count(n) {
            let m = monomial(k);
            let mut s = K::zero();
            for (ma, va) in &a {
                if ma.iter().zip(m.iter()).all(|(x, y)| x <= y) {
                    let r = [m[0] - ma[0], m[1] - ma[1], m[2] - ma[2], m[3] - ma[3]];
                    let v = &out.c[index(&r)];
                    if !v.is_zero() {
                        s = s.add(&va.mul(v));
                    }
                }
            }
            if !s.is_zero() {
                out.c[k] = s.mul(&b0).neg();
            }
        }
        Some(out)
    }

    pub fn div(&self, o: &Self) -> Option<Self> {
        Some(self.mul(&o.inv()?))
    }

    /// ∂/∂s_i; the order drops by one.
    pub fn deriv(&self, i: usize) -> Self {
        assert!(self.order >= 1, "cannot differentiate an order-0 series");
        let n = self.order - 1;
        let mut out = Self::zero(n);
        for k in 0..count(n) {
            let mut m = monomial(k);
            m[i] += 1;
            let v = &self.c[index(&m)];
            if !v.is_zero() {
                out.c[k] = v.mul(&K::from_i64(m[i] as i64));
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|v| v.is_zero())
    }

    /// Taylor coefficient times a!b!c!d!, i.e. the partial derivative at 0.
    pub fn derivative_at_zero(&self, m: &Idx) -> K {
        self.coeff(m).mul(&K::from_i64(idx_factorial(m) as i64))
    }
}
