//! Truncated multivariate power series, with scalar or module-valued coefficients.

use std::collections::BTreeMap;

use crate::biv::HomClass;
use crate::fp::Prime;

/// Coefficients that can be added and scaled.
pub trait Module: Clone {
    fn add_scaled(&mut self, other: &Self, c: u32);
    fn is_zero(&self) -> bool;
}

impl Module for HomClass {
    fn add_scaled(&mut self, other: &Self, c: u32) {
        HomClass::add_scaled(self, other, c)
    }
    fn is_zero(&self) -> bool {
        HomClass::is_zero(self)
    }
}

fn total(e: &[u32]) -> u32 {
    e.iter().sum()
}

/// Power series over F_p in `nvars` variables, dropping total degree above `bound`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScalarSeries {
    p: Prime,
    nvars: usize,
    bound: u32,
    terms: BTreeMap<Vec<u32>, u32>,
}

impl ScalarSeries {
    pub fn zero(p: Prime, nvars: usize, bound: u32) -> Self {
        ScalarSeries { p, nvars, bound, terms: BTreeMap::new() }
    }

    pub fn constant(p: Prime, nvars: usize, bound: u32, c: i64) -> Self {
        Self::monomial(p, nvars, bound, vec![0; nvars], c)
    }

    pub fn monomial(p: Prime, nvars: usize, bound: u32, exps: Vec<u32>, c: i64) -> Self {
        let mut s = Self::zero(p, nvars, bound);
        s.add_term(exps, p.reduce(c));
        s
    }

    pub fn var(p: Prime, nvars: usize, bound: u32, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(p, nvars, bound, e, 1)
    }

    pub fn bound(&self) -> u32 {
        self.bound
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, u32> {
        &self.terms
    }

    pub fn coeff(&self, e: &[u32]) -> u32 {
        self.terms.get(e).copied().unwrap_or(0)
    }

    pub fn add_term(&mut self, e: Vec<u32>, c: u32) {
        if c == 0 || total(&e) > self.bound {
            return;
        }
        let p = self.p;
        let v = self.terms.entry(e.clone()).or_insert(0);
        *v = p.add(*v, c);
        if *v == 0 {
            self.terms.remove(&e);
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (e, &c) in &o.terms {
            r.add_term(e.clone(), c);
        }
        r
    }

    pub fn scale(&self, c: i64) -> Self {
        let c = self.p.reduce(c);
        let mut r = Self::zero(self.p, self.nvars, self.bound);
        for (e, &v) in &self.terms {
            r.add_term(e.clone(), self.p.mul(v, c));
        }
        r
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(-1))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut r = Self::zero(self.p, self.nvars, self.bound.min(o.bound));
        for (a, &ca) in &self.terms {
            let ta = total(a);
            for (b, &cb) in &o.terms {
                if ta + total(b) > r.bound {
                    continue;
                }
                let e = a.iter().zip(b).map(|(x, y)| x + y).collect();
                r.add_term(e, self.p.mul(ca, cb));
            }
        }
        r
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut r = Self::constant(self.p, self.nvars, self.bound, 1);
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&b);
            }
            e >>= 1;
            if e > 0 {
                b = b.mul(&b);
            }
        }
        r
    }
}

/// Σ_k (-1)^k t^(p^k), truncated.
pub fn t_hat(p: Prime, nvars: usize, bound: u32, var: usize) -> ScalarSeries {
    let mut s = ScalarSeries::zero(p, nvars, bound);
    let mut pk: u32 = 1;
    let mut k = 0i64;
    while pk <= bound {
        let mut e = vec![0; nvars];
        e[var] = pk;
        s.add_term(e, p.sign(k));
        pk *= p.get();
        k += 1;
    }
    s
}

/// Power series with module coefficients.
#[derive(Clone, Debug)]
pub struct TruncSeries<C: Module> {
    nvars: usize,
    bound: u32,
    zero: C,
    coeffs: BTreeMap<Vec<u32>, C>,
}

impl<C: Module> TruncSeries<C> {
    pub fn new(nvars: usize, bound: u32, zero: C) -> Self {
        TruncSeries { nvars, bound, zero, coeffs: BTreeMap::new() }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn bound(&self) -> u32 {
        self.bound
    }

    pub fn add_term(&mut self, e: Vec<u32>, c: &C, scalar: u32) {
        if scalar == 0 || total(&e) > self.bound || c.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(e.clone()).or_insert_with(|| self.zero.clone());
        entry.add_scaled(c, scalar);
        if entry.is_zero() {
            self.coeffs.remove(&e);
        }
    }

    pub fn coeff(&self, e: &[u32]) -> C {
        self.coeffs.get(e).cloned().unwrap_or_else(|| self.zero.clone())
    }

    pub fn coeffs(&self) -> &BTreeMap<Vec<u32>, C> {
        &self.coeffs
    }

    pub fn sub(&self, o: &Self, p: Prime) -> Self {
        let mut r = self.clone();
        for (e, c) in &o.coeffs {
            r.add_term(e.clone(), c, p.neg(1));
        }
        r
    }

    /// Multiplies by a scalar series.
    pub fn scale_by(&self, s: &ScalarSeries) -> Self {
        let mut r = Self::new(self.nvars, self.bound.min(s.bound()), self.zero.clone());
        for (a, c) in &self.coeffs {
            for (b, &v) in s.terms() {
                let e: Vec<u32> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                r.add_term(e, c, v);
            }
        }
        r
    }

    /// Replaces variable i by `subs[i]` (series in the new variables).
    pub fn substitute(&self, subs: &[ScalarSeries], new_nvars: usize, bound: u32) -> Self {
        assert_eq!(subs.len(), self.nvars);
        let p = subs[0].p;
        let mut powers: Vec<Vec<ScalarSeries>> =
            subs.iter().map(|s| vec![ScalarSeries::constant(p, new_nvars, bound, 1), s.clone()]).collect();
        let mut r = Self::new(new_nvars, bound, self.zero.clone());
        for (e, c) in &self.coeffs {
            let mut m = ScalarSeries::constant(p, new_nvars, bound, 1);
            for (i, &k) in e.iter().enumerate() {
                while powers[i].len() <= k as usize {
                    let next = powers[i].last().unwrap().mul(&subs[i]);
                    powers[i].push(next);
                }
                m = m.mul(&powers[i][k as usize]);
            }
            for (f, &v) in m.terms() {
                r.add_term(f.clone(), c, v);
            }
        }
        r
    }

    /// Cauchy product with a bilinear map on coefficients.
    pub fn product<D: Module, E: Module>(
        a: &TruncSeries<D>,
        b: &TruncSeries<E>,
        zero: C,
        mut f: impl FnMut(&D, &E) -> C,
    ) -> Self {
        assert_eq!(a.nvars, b.nvars);
        let mut r = Self::new(a.nvars, a.bound.min(b.bound), zero);
        for (ea, ca) in &a.coeffs {
            for (eb, cb) in &b.coeffs {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                if total(&e) > r.bound {
                    continue;
                }
                let v = f(ca, cb);
                r.add_term(e, &v, 1);
            }
        }
        r
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_expansion() {
        let p = Prime::new(3).unwrap();
        let s = ScalarSeries::var(p, 2, 6, 0);
        let t = ScalarSeries::var(p, 2, 6, 1);
        let st = s.add(&t).pow(3);
        // (s+t)^3 = s^3 + t^3 in characteristic 3
        assert_eq!(st, s.pow(3).add(&t.pow(3)));
    }

    #[test]
    fn t_hat_terms() {
        let p = Prime::new(3).unwrap();
        let h = t_hat(p, 1, 10, 0);
        assert_eq!(h.coeff(&[1]), 1);
        assert_eq!(h.coeff(&[3]), 2);
        assert_eq!(h.coeff(&[9]), 1);
        assert_eq!(h.terms().len(), 3);
    }

    #[test]
    fn substitution_on_homology_series() {
        let p = Prime::new(3).unwrap();
        let mut f = TruncSeries::new(1, 4, HomClass::zero(1, p));
        for k in 0..=4 {
            f.add_term(vec![k], &HomClass::v(1, p, 1, k), 1);
        }
        // s ↦ 2s
        let g = f.substitute(&[ScalarSeries::monomial(p, 1, 4, vec![1], 2)], 1, 4);
        assert_eq!(g.coeff(&[3]), HomClass::v(1, p, 1, 3).scale(8 % 3));
    }
}
