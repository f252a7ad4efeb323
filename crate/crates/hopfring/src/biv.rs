//! Cohomology E(e)⊗F_p[x] and homology E(u)⊗Γ[v] of an elementary abelian
//! p-group of rank n, their pairing, Steenrod actions and the GL_n action.

use rustc_hash::FxHashMap;
use std::collections::hash_map::Entry;
use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};
use crate::fp::{FpScalar, Prime};

/// Sign of e^a · e^b → e^(a|b) (zero overlap assumed by caller).
#[inline]
pub fn ext_merge_sign(a: u32, b: u32) -> bool {
    // count pairs (i in a, j in b) with i > j
    let mut inv = 0u32;
    let mut bb = b;
    while bb != 0 {
        let j = bb.trailing_zeros();
        inv += (a >> (j + 1)).count_ones();
        bb &= bb - 1;
    }
    inv % 2 == 1
}

/// Monomial e^S x^a. Bit i of `ext` is e_{i+1}.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CohomMono {
    pub ext: u32,
    pub exps: Vec<u32>,
}

impl CohomMono {
    pub fn one(rank: usize) -> Self {
        CohomMono { ext: 0, exps: vec![0; rank] }
    }

    pub fn degree(&self) -> i64 {
        self.ext.count_ones() as i64 + 2 * self.exps.iter().map(|&a| a as i64).sum::<i64>()
    }

    pub fn rank(&self) -> usize {
        self.exps.len()
    }
}

/// Monomial u^S v^[t]. Bit i of `ext` is u_{i+1}.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HomMono {
    pub ext: u32,
    pub divpow: Vec<u32>,
}

impl HomMono {
    pub fn one(rank: usize) -> Self {
        HomMono { ext: 0, divpow: vec![0; rank] }
    }

    pub fn degree(&self) -> i64 {
        self.ext.count_ones() as i64 + 2 * self.divpow.iter().map(|&a| a as i64).sum::<i64>()
    }
}

macro_rules! sparse_class {
    ($name:ident, $mono:ident, $field:ident) => {
        #[derive(Clone, Debug)]
        pub struct $name {
            rank: usize,
            prime: Prime,
            terms: FxHashMap<$mono, u32>,
        }

        impl $name {
            pub fn zero(rank: usize, prime: Prime) -> Self {
                $name { rank, prime, terms: FxHashMap::default() }
            }

            pub fn one(rank: usize, prime: Prime) -> Self {
                Self::monomial(rank, prime, 0, vec![0; rank], 1)
            }

            pub fn monomial(rank: usize, prime: Prime, ext: u32, $field: Vec<u32>, coef: i64) -> Self {
                assert_eq!($field.len(), rank);
                let mut c = Self::zero(rank, prime);
                c.add_term($mono { ext, $field }, prime.reduce(coef));
                c
            }

            pub fn rank(&self) -> usize {
                self.rank
            }

            pub fn prime(&self) -> Prime {
                self.prime
            }

            pub fn is_zero(&self) -> bool {
                self.terms.is_empty()
            }

            pub fn len(&self) -> usize {
                self.terms.len()
            }

            pub fn coeff(&self, m: &$mono) -> u32 {
                self.terms.get(m).copied().unwrap_or(0)
            }

            pub fn terms(&self) -> impl Iterator<Item = (&$mono, &u32)> {
                self.terms.iter()
            }

            /// Terms sorted by monomial, for stable output.
            pub fn sorted_terms(&self) -> Vec<($mono, u32)> {
                let mut v: Vec<_> = self.terms.iter().map(|(m, &c)| (m.clone(), c)).collect();
                v.sort();
                v
            }

            pub fn add_term(&mut self, m: $mono, c: u32) {
                if c == 0 {
                    return;
                }
                let p = self.prime;
                match self.terms.entry(m) {
                    Entry::Occupied(mut o) => {
                        let v = p.add(*o.get(), c);
                        if v == 0 {
                            o.remove();
                        } else {
                            *o.get_mut() = v;
                        }
                    }
                    Entry::Vacant(v) => {
                        v.insert(c);
                    }
                }
            }

            fn check(&self, o: &Self) -> Result<()> {
                if self.rank != o.rank || self.prime != o.prime {
                    return Err(Error::Mismatch(format!(
                        "rank {} / {}, prime {} / {}",
                        self.rank, o.rank, self.prime, o.prime
                    )));
                }
                Ok(())
            }

            pub fn add(&self, o: &Self) -> Result<Self> {
                self.check(o)?;
                let mut r = self.clone();
                for (m, &c) in &o.terms {
                    r.add_term(m.clone(), c);
                }
                Ok(r)
            }

            pub fn sub(&self, o: &Self) -> Result<Self> {
                self.add(&o.scale(self.prime.neg(1)))
            }

            pub fn scale(&self, c: u32) -> Self {
                let c = c % self.prime.get();
                let mut r = Self::zero(self.rank, self.prime);
                if c == 0 {
                    return r;
                }
                for (m, &v) in &self.terms {
                    r.terms.insert(m.clone(), self.prime.mul(v, c));
                }
                r
            }

            pub fn add_scaled(&mut self, o: &Self, c: u32) {
                let c = c % self.prime.get();
                if c == 0 {
                    return;
                }
                for (m, &v) in &o.terms {
                    let t = self.prime.mul(v, c);
                    self.add_term(m.clone(), t);
                }
            }

            /// Common degree of all terms, if homogeneous and nonzero.
            pub fn degree(&self) -> Option<i64> {
                let mut it = self.terms.keys().map(|m| m.degree());
                let d = it.next()?;
                if it.all(|e| e == d) {
                    Some(d)
                } else {
                    None
                }
            }

            /// Part of the given degree.
            pub fn homogeneous_part(&self, d: i64) -> Self {
                let mut r = Self::zero(self.rank, self.prime);
                for (m, &c) in &self.terms {
                    if m.degree() == d {
                        r.terms.insert(m.clone(), c);
                    }
                }
                r
            }

            pub fn to_json(&self) -> serde_json::Value {
                let terms: Vec<_> = self
                    .sorted_terms()
                    .into_iter()
                    .map(|(m, c)| {
                        let ext: Vec<u32> = (0..self.rank as u32).filter(|i| m.ext >> i & 1 == 1).map(|i| i + 1).collect();
                        JsonTerm { ext, exp: m.$field.clone(), coef: c }
                    })
                    .collect();
                serde_json::to_value(JsonClass { rank: self.rank, prime: self.prime.get(), terms }).unwrap()
            }

            pub fn from_json(v: &serde_json::Value) -> Result<Self> {
                let jc: JsonClass = serde_json::from_value(v.clone()).map_err(|e| Error::Invalid(e.to_string()))?;
                let prime = Prime::new(jc.prime)?;
                let mut r = Self::zero(jc.rank, prime);
                for t in jc.terms {
                    if t.exp.len() != jc.rank {
                        return Err(Error::Invalid("exponent vector length differs from rank".into()));
                    }
                    let mut ext = 0u32;
                    for i in t.ext {
                        if i == 0 || i as usize > jc.rank {
                            return Err(Error::Invalid(format!("exterior index {i} out of range")));
                        }
                        ext |= 1 << (i - 1);
                    }
                    r.add_term($mono { ext, $field: t.exp }, t.coef % prime.get());
                }
                Ok(r)
            }
        }

        impl PartialEq for $name {
            fn eq(&self, o: &Self) -> bool {
                self.rank == o.rank && self.prime == o.prime && self.terms == o.terms
            }
        }
        impl Eq for $name {}
    };
}

#[derive(Serialize, Deserialize)]
struct JsonTerm {
    ext: Vec<u32>,
    exp: Vec<u32>,
    coef: u32,
}

#[derive(Serialize, Deserialize)]
struct JsonClass {
    rank: usize,
    prime: u32,
    terms: Vec<JsonTerm>,
}

sparse_class!(CohomClass, CohomMono, exps);
sparse_class!(HomClass, HomMono, divpow);

impl CohomClass {
    /// e_i, 1-based.
    pub fn e(rank: usize, prime: Prime, i: usize) -> Self {
        Self::monomial(rank, prime, 1 << (i - 1), vec![0; rank], 1)
    }

    /// x_i, 1-based.
    pub fn x(rank: usize, prime: Prime, i: usize) -> Self {
        let mut a = vec![0; rank];
        a[i - 1] = 1;
        Self::monomial(rank, prime, 0, a, 1)
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let p = self.prime;
        let mut r = Self::zero(self.rank, p);
        let mut acc: FxHashMap<CohomMono, u32> = FxHashMap::default();
        for (a, &ca) in &self.terms {
            for (b, &cb) in &o.terms {
                if a.ext & b.ext != 0 {
                    continue;
                }
                let mut c = p.mul(ca, cb);
                if ext_merge_sign(a.ext, b.ext) {
                    c = p.neg(c);
                }
                let exps = a.exps.iter().zip(&b.exps).map(|(x, y)| x + y).collect();
                let e = acc.entry(CohomMono { ext: a.ext | b.ext, exps }).or_insert(0);
                *e = p.add(*e, c);
            }
        }
        acc.retain(|_, v| *v != 0);
        r.terms = acc;
        Ok(r)
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut r = Self::one(self.rank, self.prime);
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&b).unwrap();
            }
            e >>= 1;
            if e > 0 {
                b = b.mul(&b).unwrap();
            }
        }
        r
    }

    /// The same class viewed in a larger rank (new variables unused).
    pub fn pad(&self, rank: usize) -> Self {
        assert!(rank >= self.rank);
        let mut r = Self::zero(rank, self.prime);
        for (m, &c) in &self.terms {
            let mut exps = m.exps.clone();
            exps.resize(rank, 0);
            r.terms.insert(CohomMono { ext: m.ext, exps }, c);
        }
        r
    }

    /// Applies β^ε P^k (P^k first, then β).
    pub fn steenrod_up(&self, eps: u8, k: u32) -> Self {
        let p = self.prime;
        let mut out = Self::zero(self.rank, p);
        for (m, &c) in &self.terms {
            let mut parts: Vec<(Vec<u32>, u32, u32)> = vec![(Vec::new(), 1, 0)];
            // distribute k over the variables: P^j(x^a) = C(a,j) x^(a+(p-1)j)
            for &a in &m.exps {
                let mut next = Vec::new();
                for (pre, coef, used) in &parts {
                    for j in 0..=(k - used).min(a) {
                        let b = p.binom(a as i64, j as i64);
                        if b == 0 {
                            continue;
                        }
                        let mut v = pre.clone();
                        v.push(a + (p.get() - 1) * j);
                        next.push((v, p.mul(*coef, b), used + j));
                    }
                }
                parts = next;
            }
            for (exps, coef, used) in parts {
                if used != k {
                    continue;
                }
                let mono = CohomMono { ext: m.ext, exps };
                let cc = p.mul(c, coef);
                if eps == 0 {
                    out.add_term(mono, cc);
                } else {
                    for (bm, s) in bockstein_cohom_mono(&mono) {
                        out.add_term(bm, if s { p.neg(cc) } else { cc });
                    }
                }
            }
        }
        out
    }

    /// Linear substitution x_s ↦ Σ_i a_is x_i, e_s ↦ Σ_i a_is e_i.
    pub fn gl_act(&self, a: &GlMatrix) -> Result<Self> {
        if a.n != self.rank || a.prime != self.prime {
            return Err(Error::Mismatch("matrix size or prime".into()));
        }
        let n = self.rank;
        let p = self.prime;
        let mut xs = Vec::with_capacity(n);
        let mut es = Vec::with_capacity(n);
        for s in 0..n {
            let mut xf = Self::zero(n, p);
            let mut ef = Self::zero(n, p);
            for i in 0..n {
                let c = a.get(i, s);
                xf.add_scaled(&Self::x(n, p, i + 1), c);
                ef.add_scaled(&Self::e(n, p, i + 1), c);
            }
            xs.push(xf);
            es.push(ef);
        }
        let mut cache: FxHashMap<(usize, u32), CohomClass> = FxHashMap::default();
        let mut out = Self::zero(n, p);
        for (m, &c) in &self.terms {
            let mut t = Self::one(n, p);
            for s in 0..n {
                if m.ext >> s & 1 == 1 {
                    t = t.mul(&es[s])?;
                }
            }
            for s in 0..n {
                let e = m.exps[s];
                if e > 0 {
                    let pw = cache.entry((s, e)).or_insert_with(|| xs[s].pow(e as u64)).clone();
                    t = t.mul(&pw)?;
                }
            }
            out.add_scaled(&t, c);
        }
        Ok(out)
    }
}

// β on one monomial: derivation with β(e_i) = x_i.
fn bockstein_cohom_mono(m: &CohomMono) -> Vec<(CohomMono, bool)> {
    let mut out = Vec::new();
    for i in 0..m.exps.len() {
        if m.ext >> i & 1 == 1 {
            let before = (m.ext & ((1u32 << i) - 1)).count_ones();
            let mut exps = m.exps.clone();
            exps[i] += 1;
            out.push((CohomMono { ext: m.ext & !(1 << i), exps }, before % 2 == 1));
        }
    }
    out
}

impl HomClass {
    pub fn u(rank: usize, prime: Prime, i: usize) -> Self {
        Self::monomial(rank, prime, 1 << (i - 1), vec![0; rank], 1)
    }

    /// v_i^[t], 1-based.
    pub fn v(rank: usize, prime: Prime, i: usize, t: u32) -> Self {
        let mut a = vec![0; rank];
        a[i - 1] = t;
        Self::monomial(rank, prime, 0, a, 1)
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let p = self.prime;
        let mut acc: FxHashMap<HomMono, u32> = FxHashMap::default();
        for (a, &ca) in &self.terms {
            'pairs: for (b, &cb) in &o.terms {
                if a.ext & b.ext != 0 {
                    continue;
                }
                let mut c = p.mul(ca, cb);
                let mut dp = Vec::with_capacity(self.rank);
                for (x, y) in a.divpow.iter().zip(&b.divpow) {
                    let bin = p.binom((x + y) as i64, *x as i64);
                    if bin == 0 {
                        continue 'pairs;
                    }
                    c = p.mul(c, bin);
                    dp.push(x + y);
                }
                if ext_merge_sign(a.ext, b.ext) {
                    c = p.neg(c);
                }
                let e = acc.entry(HomMono { ext: a.ext | b.ext, divpow: dp }).or_insert(0);
                *e = p.add(*e, c);
            }
        }
        acc.retain(|_, v| *v != 0);
        Ok(HomClass { rank: self.rank, prime: p, terms: acc })
    }

    /// Right action h·β^ε·P^k: β first, then P^k. Transpose of `steenrod_up`
    /// under the monomial pairing, with no extra sign.
    pub fn steenrod_down(&self, eps: u8, k: u32) -> Self {
        let p = self.prime;
        let pm1 = p.get() - 1;
        let mut out = Self::zero(self.rank, p);
        for (m, &c) in &self.terms {
            let stage: Vec<(HomMono, u32)> = if eps == 0 {
                vec![(m.clone(), c)]
            } else {
                let mut v = Vec::new();
                for i in 0..self.rank {
                    if m.ext >> i & 1 == 0 && m.divpow[i] >= 1 {
                        let before = (m.ext & ((1u32 << i) - 1)).count_ones();
                        let mut dp = m.divpow.clone();
                        dp[i] -= 1;
                        let cc = if before % 2 == 1 { p.neg(c) } else { c };
                        v.push((HomMono { ext: m.ext | 1 << i, divpow: dp }, cc));
                    }
                }
                v
            };
            for (hm, hc) in stage {
                // v^[b] P^j = C(b-(p-1)j, j) v^[b-(p-1)j]
                let mut parts: Vec<(Vec<u32>, u32, u32)> = vec![(Vec::new(), hc, 0)];
                for &b in &hm.divpow {
                    let mut next = Vec::new();
                    for (pre, coef, used) in &parts {
                        for j in 0..=(k - used) {
                            if pm1 * j > b {
                                break;
                            }
                            let top = (b - pm1 * j) as i64;
                            let bin = p.binom(top, j as i64);
                            if bin == 0 {
                                continue;
                            }
                            let mut v = pre.clone();
                            v.push(b - pm1 * j);
                            next.push((v, p.mul(*coef, bin), used + j));
                        }
                    }
                    parts = next;
                }
                for (dp, coef, used) in parts {
                    if used == k {
                        out.add_term(HomMono { ext: hm.ext, divpow: dp }, coef);
                    }
                }
            }
        }
        out
    }

    /// Contragredient action: substitution by (A^{-1})^T, so that pairing is invariant.
    pub fn gl_act(&self, a: &GlMatrix) -> Result<Self> {
        if a.n != self.rank || a.prime != self.prime {
            return Err(Error::Mismatch("matrix size or prime".into()));
        }
        let b = a.inverse()?.transpose();
        let n = self.rank;
        let p = self.prime;
        let mut out = Self::zero(n, p);
        for (m, &c) in &self.terms {
            let mut t = Self::one(n, p);
            for s in 0..n {
                if m.ext >> s & 1 == 1 {
                    let mut lf = Self::zero(n, p);
                    for i in 0..n {
                        lf.add_scaled(&Self::u(n, p, i + 1), b.get(i, s));
                    }
                    t = t.mul(&lf)?;
                }
            }
            for s in 0..n {
                let e = m.divpow[s];
                if e > 0 {
                    let coeffs: Vec<u32> = (0..n).map(|i| b.get(i, s)).collect();
                    t = t.mul(&divided_power_of_linear(n, p, &coeffs, e))?;
                }
            }
            out.add_scaled(&t, c);
        }
        Ok(out)
    }
}

// (Σ c_i v_i)^[m] = Σ_{m_1+..+m_n=m} Π c_i^{m_i} v_i^[m_i]
fn divided_power_of_linear(n: usize, p: Prime, c: &[u32], m: u32) -> HomClass {
    let mut out = HomClass::zero(n, p);
    let mut parts: Vec<(Vec<u32>, u32, u32)> = vec![(Vec::new(), 1, 0)];
    for i in 0..n {
        let last = i + 1 == n;
        let mut next = Vec::new();
        for (pre, coef, used) in &parts {
            let rest = m - used;
            let range: Vec<u32> = if last { vec![rest] } else { (0..=rest).collect() };
            for j in range {
                let f = p.pow(c[i], j as u64);
                if f == 0 {
                    continue;
                }
                let mut v = pre.clone();
                v.push(j);
                next.push((v, p.mul(*coef, f), used + j));
            }
        }
        parts = next;
    }
    for (dp, coef, _) in parts {
        out.add_term(HomMono { ext: 0, divpow: dp }, coef);
    }
    out
}

/// ⟨c, h⟩ on monomials: dual bases, both stored with ascending exterior indices.
pub fn pair(c: &CohomClass, h: &HomClass) -> Result<FpScalar> {
    if c.rank != h.rank || c.prime != h.prime {
        return Err(Error::Mismatch("pairing".into()));
    }
    let p = c.prime;
    let mut acc = 0u32;
    if c.terms.len() <= h.terms.len() {
        for (m, &a) in &c.terms {
            let key = HomMono { ext: m.ext, divpow: m.exps.clone() };
            if let Some(&b) = h.terms.get(&key) {
                acc = p.add(acc, p.mul(a, b));
            }
        }
    } else {
        for (m, &b) in &h.terms {
            let key = CohomMono { ext: m.ext, exps: m.divpow.clone() };
            if let Some(&a) = c.terms.get(&key) {
                acc = p.add(acc, p.mul(a, b));
            }
        }
    }
    Ok(FpScalar::new(acc as i64, p))
}

/// Invertible n×n matrix over F_p.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlMatrix {
    n: usize,
    prime: Prime,
    entries: Vec<u32>,
}

impl GlMatrix {
    /// Row-major entries; errors on singular input.
    pub fn new(n: usize, prime: Prime, entries: &[i64]) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::Mismatch(format!("expected {} entries", n * n)));
        }
        let m = GlMatrix { n, prime, entries: entries.iter().map(|&v| prime.reduce(v)).collect() };
        if m.det() == 0 {
            return Err(Error::Singular);
        }
        Ok(m)
    }

    pub fn identity(n: usize, prime: Prime) -> Self {
        let mut e = vec![0; n * n];
        for i in 0..n {
            e[i * n + i] = 1;
        }
        GlMatrix { n, prime, entries: e }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.entries[i * self.n + j]
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut e = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                e[j * n + i] = self.get(i, j);
            }
        }
        GlMatrix { n, prime: self.prime, entries: e }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.n;
        let p = self.prime;
        let mut e = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut s = 0;
                for k in 0..n {
                    s = p.add(s, p.mul(self.get(i, k), o.get(k, j)));
                }
                e[i * n + j] = s;
            }
        }
        GlMatrix { n, prime: p, entries: e }
    }

    pub fn det(&self) -> u32 {
        let rows: Vec<Vec<u32>> = (0..self.n).map(|i| self.entries[i * self.n..(i + 1) * self.n].to_vec()).collect();
        crate::linalg::determinant(rows, self.prime)
    }

    pub fn inverse(&self) -> Result<Self> {
        let n = self.n;
        let p = self.prime;
        let mut a: Vec<Vec<u32>> = (0..n)
            .map(|i| {
                let mut r = self.entries[i * n..(i + 1) * n].to_vec();
                r.extend((0..n).map(|j| (i == j) as u32));
                r
            })
            .collect();
        for col in 0..n {
            let piv = (col..n).find(|&r| a[r][col] != 0).ok_or(Error::Singular)?;
            a.swap(col, piv);
            let inv = p.inv(a[col][col]);
            for v in a[col].iter_mut() {
                *v = p.mul(*v, inv);
            }
            for r in 0..n {
                if r != col && a[r][col] != 0 {
                    let f = a[r][col];
                    for j in 0..2 * n {
                        let t = p.mul(f, a[col][j]);
                        a[r][j] = p.sub(a[r][j], t);
                    }
                }
            }
        }
        let entries = a.iter().flat_map(|r| r[n..].to_vec()).collect();
        Ok(GlMatrix { n, prime: p, entries })
    }

    /// (1 1; 0 1) ⊕ I.
    pub fn elementary_t(n: usize, prime: Prime) -> Self {
        let mut m = Self::identity(n, prime);
        m.entries[1] = 1;
        m
    }

    /// Permutation matrix swapping coordinates i and j (0-based).
    pub fn transposition(n: usize, prime: Prime, i: usize, j: usize) -> Self {
        let mut m = Self::identity(n, prime);
        m.entries[i * n + i] = 0;
        m.entries[j * n + j] = 0;
        m.entries[i * n + j] = 1;
        m.entries[j * n + i] = 1;
        m
    }

    /// a ⊕ I.
    pub fn diagonal_scale(n: usize, prime: Prime, a: u32) -> Self {
        let mut m = Self::identity(n, prime);
        m.entries[0] = a % prime.get();
        m
    }
}

impl fmt::Display for CohomClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_class(f, self.prime, self.sorted_terms().iter().map(|(m, c)| (m.ext, &m.exps[..], *c)), "e", "x", false)
    }
}

impl fmt::Display for HomClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_class(f, self.prime, self.sorted_terms().iter().map(|(m, c)| (m.ext, &m.divpow[..], *c)), "u", "v", true)
    }
}

fn write_class<'a>(
    f: &mut fmt::Formatter<'_>,
    p: Prime,
    terms: impl Iterator<Item = (u32, &'a [u32], u32)>,
    en: &str,
    xn: &str,
    divided: bool,
) -> fmt::Result {
    let mut first = true;
    for (ext, exps, c) in terms {
        let s = FpScalar::new(c as i64, p).signed();
        if !first {
            write!(f, " {} ", if s < 0 { "-" } else { "+" })?;
        } else if s < 0 {
            write!(f, "-")?;
        }
        first = false;
        let mut parts = Vec::new();
        for i in 0..exps.len() {
            if ext >> i & 1 == 1 {
                parts.push(format!("{en}{}", i + 1));
            }
        }
        for (i, &a) in exps.iter().enumerate() {
            if a > 0 {
                parts.push(if divided {
                    format!("{xn}{}[{a}]", i + 1)
                } else if a == 1 {
                    format!("{xn}{}", i + 1)
                } else {
                    format!("{xn}{}^{a}", i + 1)
                });
            }
        }
        let body = if parts.is_empty() { "1".to_string() } else { parts.join(" ") };
        if s.abs() == 1 {
            write!(f, "{body}")?;
        } else {
            write!(f, "{} {body}", s.abs())?;
        }
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

/// Monomial basis of the degree-d part (rank n), cohomology side.
pub fn cohom_monomials(n: usize, d: i64) -> Vec<CohomMono> {
    let mut out = Vec::new();
    if d < 0 {
        return out;
    }
    for ext in 0u32..(1 << n) {
        let rem = d - ext.count_ones() as i64;
        if rem < 0 || rem % 2 != 0 {
            continue;
        }
        for exps in compositions((rem / 2) as u32, n) {
            out.push(CohomMono { ext, exps });
        }
    }
    out.sort();
    out
}

/// Monomial basis of the degree-d part (rank n), homology side.
pub fn hom_monomials(n: usize, d: i64) -> Vec<HomMono> {
    cohom_monomials(n, d).into_iter().map(|m| HomMono { ext: m.ext, divpow: m.exps }).collect()
}

/// Weak compositions of `total` into `parts` parts.
pub fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p3() -> Prime {
        Prime::new(3).unwrap()
    }

    #[test]
    fn cohom_products() {
        let p = p3();
        let e1 = CohomClass::e(2, p, 1);
        let e2 = CohomClass::e(2, p, 2);
        assert!(e1.mul(&e1).unwrap().is_zero());
        let lhs = e2.mul(&e1).unwrap();
        let rhs = e1.mul(&e2).unwrap().scale(p.neg(1));
        assert_eq!(lhs, rhs);
        let x1 = CohomClass::x(2, p, 1);
        let x2 = CohomClass::x(2, p, 2);
        let a = x1.add(&x2).unwrap().mul(&x1.sub(&x2).unwrap()).unwrap();
        let b = x1.pow(2).sub(&x2.pow(2)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn hom_products() {
        let p = p3();
        let v = HomClass::v(1, p, 1, 1);
        assert_eq!(v.mul(&v).unwrap(), HomClass::v(1, p, 1, 2).scale(2));
        assert!(v.mul(&HomClass::v(1, p, 1, 2)).unwrap().is_zero());
        let u = HomClass::u(1, p, 1);
        assert!(u.mul(&u).unwrap().is_zero());
    }

    #[test]
    fn pairing_examples() {
        let p = p3();
        let c = CohomClass::monomial(1, p, 0, vec![3], 1);
        assert_eq!(pair(&c, &HomClass::v(1, p, 1, 3)).unwrap().value(), 1);
        let c = CohomClass::monomial(2, p, 1, vec![0, 1], 1);
        let h = HomClass::monomial(2, p, 1, vec![0, 1], 1);
        assert_eq!(pair(&c, &h).unwrap().value(), 1);
        assert_eq!(pair(&CohomClass::x(2, p, 1), &HomClass::v(2, p, 2, 1)).unwrap().value(), 0);
    }

    #[test]
    fn steenrod_examples() {
        let p = p3();
        let x1 = CohomClass::x(1, p, 1);
        assert_eq!(x1.steenrod_up(0, 1), x1.pow(3));
        assert_eq!(CohomClass::e(1, p, 1).steenrod_up(1, 0), x1);
        assert!(CohomClass::e(1, p, 1).steenrod_up(0, 1).is_zero());
        assert_eq!(HomClass::v(1, p, 1, 3).steenrod_down(0, 1), HomClass::v(1, p, 1, 1));
        assert_eq!(HomClass::v(1, p, 1, 5).steenrod_down(0, 0), HomClass::v(1, p, 1, 5));
        // C(-1,1) = 0
        assert!(HomClass::v(1, p, 1, 2).steenrod_down(1, 1).is_zero());
        // v^[n] β = u v^[n-1]
        assert_eq!(HomClass::v(1, p, 1, 4).steenrod_down(1, 0), HomClass::monomial(1, p, 1, vec![3], 1));
    }

    #[test]
    fn steenrod_adjoint_rank2() {
        let p = p3();
        for d in 0..14 {
            for eps in 0..2u8 {
                for k in 0..4u32 {
                    let dd = d + 2 * k as i64 * 2 + eps as i64;
                    for cm in cohom_monomials(2, d) {
                        let c = CohomClass::monomial(2, p, cm.ext, cm.exps.clone(), 1);
                        let up = c.steenrod_up(eps, k);
                        for hm in hom_monomials(2, dd) {
                            let h = HomClass::monomial(2, p, hm.ext, hm.divpow.clone(), 1);
                            let l = pair(&up, &h).unwrap();
                            let r = pair(&c, &h.steenrod_down(eps, k)).unwrap();
                            assert_eq!(l, r, "{c} / {h} / eps {eps} k {k}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn gl_examples() {
        let p = p3();
        let t = GlMatrix::elementary_t(2, p);
        let x2 = CohomClass::x(2, p, 2);
        assert_eq!(x2.gl_act(&t).unwrap(), CohomClass::x(2, p, 1).add(&x2).unwrap());
        assert_eq!(x2.gl_act(&GlMatrix::identity(2, p)).unwrap(), x2);
        assert!(GlMatrix::new(2, p, &[1, 2, 2, 4]).is_err());
    }

    #[test]
    fn gl_pairing_invariant() {
        let p = p3();
        let a = GlMatrix::new(2, p, &[1, 2, 1, 0]).unwrap();
        for d in 0..9 {
            for cm in cohom_monomials(2, d) {
                let c = CohomClass::monomial(2, p, cm.ext, cm.exps.clone(), 1);
                let gc = c.gl_act(&a).unwrap();
                for hm in hom_monomials(2, d) {
                    let h = HomClass::monomial(2, p, hm.ext, hm.divpow.clone(), 1);
                    let gh = h.gl_act(&a).unwrap();
                    assert_eq!(pair(&gc, &gh).unwrap(), pair(&c, &h).unwrap());
                }
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let p = p3();
        let c = CohomClass::monomial(2, p, 0b10, vec![1, 2], 2).add(&CohomClass::x(2, p, 1)).unwrap();
        let v = c.to_json();
        assert_eq!(CohomClass::from_json(&v).unwrap(), c);
        let h = HomClass::monomial(2, p, 0b01, vec![0, 4], 1);
        assert_eq!(HomClass::from_json(&h.to_json()).unwrap(), h);
    }
}
