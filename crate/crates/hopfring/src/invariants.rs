//! Dickson and Mùi invariants of GL_n acting on H^*BV_n, the monomial order used
//! for leading terms, and the additive bases built from them.

use dashmap::DashMap;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::biv::{CohomClass, CohomMono, GlMatrix, HomClass};
use crate::error::{Error, Result};
use crate::fp::Prime;

/// (ε_1, i_1, …, ε_n, i_n) indexing R^{ε_1}_{n;0} q_{n,0}^{i_1} ⋯. Only i_1 may be negative.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IndexString {
    pub pairs: Vec<(u8, i64)>,
}

impl IndexString {
    pub fn new(pairs: Vec<(u8, i64)>) -> Self {
        IndexString { pairs }
    }

    pub fn from_flat(flat: &[i64]) -> Self {
        assert!(flat.len().is_multiple_of(2));
        IndexString { pairs: flat.chunks(2).map(|c| (c[0] as u8, c[1])).collect() }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Number of Bocksteins.
    pub fn b(&self) -> i64 {
        self.pairs.iter().map(|&(e, _)| e as i64).sum()
    }

    /// 1 if any Bockstein is present.
    pub fn m(&self) -> i64 {
        self.pairs.iter().any(|&(e, _)| e == 1) as i64
    }

    pub fn i1(&self) -> i64 {
        self.pairs[0].1
    }

    /// Polynomiality constraint for the invariant monomial.
    pub fn meets_invariant_bound(&self) -> bool {
        self.i1() - self.m() + self.b() >= 0
    }

    pub fn meets_cutoff(&self, k: i64) -> bool {
        2 * self.i1() + self.b() >= k
    }

    /// Degree of R^{ε_1}_{n;0} q_{n,0}^{i_1} ⋯ with n = len.
    pub fn degree(&self, p: Prime) -> i64 {
        let n = self.len() as u32;
        self.pairs
            .iter()
            .enumerate()
            .map(|(s, &(e, i))| e as i64 * deg_r(p, n, &[s]) + i * deg_q(p, n, s as u32))
            .sum()
    }
}

impl fmt::Display for IndexString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.pairs.iter().map(|(e, i)| format!("{e},{i}")).collect();
        write!(f, "({})", parts.join(","))
    }
}

pub fn deg_q(p: Prime, n: u32, i: u32) -> i64 {
    let p = p.as_i64();
    2 * (p.pow(n) - p.pow(i))
}

pub fn deg_r(p: Prime, n: u32, idx: &[usize]) -> i64 {
    let pp = p.as_i64();
    idx.len() as i64 + 2 * (pp.pow(n) - 1) - 2 * idx.iter().map(|&i| pp.pow(i as u32)).sum::<i64>()
}

fn permutations(items: &[usize]) -> Vec<(Vec<usize>, bool)> {
    // Heap-free recursive enumeration with parity
    if items.is_empty() {
        return vec![(vec![], false)];
    }
    let mut out = Vec::new();
    for (pos, &first) in items.iter().enumerate() {
        let mut rest = items.to_vec();
        rest.remove(pos);
        for (mut tail, par) in permutations(&rest) {
            tail.insert(0, first);
            out.push((tail, par ^ (pos % 2 == 1)));
        }
    }
    out
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for last in (k - 1)..n {
        for mut s in subsets(last, k - 1) {
            s.push(last);
            out.push(s);
        }
    }
    out
}

// parity of the permutation given as a sequence of distinct indices
fn parity(seq: &[usize]) -> bool {
    let mut inv = 0;
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            if seq[i] > seq[j] {
                inv += 1;
            }
        }
    }
    inv % 2 == 1
}

/// [r_1,…,r_n] = det(x_i^{p^{r_j}}).
pub fn det_bracket(n: usize, p: Prime, r: &[u32]) -> CohomClass {
    mui_bracket(n, p, 0, r).expect("k = 0 is always in range")
}

/// [k; r_{k+1},…,r_n]: k rows of e's above rows x_i^{p^{r_j}}, divided by k!.
/// The division is realized by taking the e-rows' columns in increasing order.
pub fn mui_bracket(n: usize, p: Prime, k: usize, r: &[u32]) -> Result<CohomClass> {
    if k > n || r.len() + k != n {
        return Err(Error::OutOfRange(format!("mui bracket k={k}, {} rows, rank {n}", r.len())));
    }
    let mut out = CohomClass::zero(n, p);
    for s in subsets(n, k) {
        let rest: Vec<usize> = (0..n).filter(|c| !s.contains(c)).collect();
        let ext: u32 = s.iter().map(|&c| 1u32 << c).sum();
        for (tau, _) in permutations(&rest) {
            let mut sigma = s.clone();
            sigma.extend(&tau);
            let mut exps = vec![0u32; n];
            for (row, &col) in tau.iter().enumerate() {
                exps[col] += p.get().pow(r[row]);
            }
            let coef = if parity(&sigma) { p.neg(1) } else { 1 };
            out.add_term(CohomMono { ext, exps }, coef);
        }
    }
    Ok(out)
}

/// L_{n,i} = [0,…,î,…,n].
pub fn big_l(n: usize, p: Prime, i: usize) -> CohomClass {
    let r: Vec<u32> = (0..=n as u32).filter(|&j| j != i as u32).collect();
    det_bracket(n, p, &r)
}

/// V_s = ∏_λ (λ_1x_1+⋯+λ_{s-1}x_{s-1}+x_s), as an element of rank n.
pub fn v_product_in(s: usize, n: usize, p: Prime) -> CohomClass {
    let mut acc = CohomClass::one(n, p);
    let count = (p.get() as usize).pow(s as u32 - 1);
    for idx in 0..count {
        let mut lin = CohomClass::x(n, p, s);
        let mut v = idx;
        for j in 1..s {
            let lam = (v % p.get() as usize) as u32;
            v /= p.get() as usize;
            lin.add_scaled(&CohomClass::x(n, p, j), lam);
        }
        acc = acc.mul(&lin).unwrap();
    }
    acc
}

pub fn v_product(n: usize, p: Prime) -> CohomClass {
    v_product_in(n, n, p)
}

/// Dickson invariants q_{s,i} for s ≤ n, computed in rank n by the recurrence.
fn dickson_table(n: usize, p: Prime) -> Vec<Vec<CohomClass>> {
    // table[s][i] = q_{s,i}, 0 ≤ i ≤ s
    let mut table: Vec<Vec<CohomClass>> = vec![vec![CohomClass::one(n, p)]];
    for s in 1..=n {
        let vp = v_product_in(s, n, p).pow(p.get() as u64 - 1);
        let mut row = Vec::with_capacity(s + 1);
        for i in 0..=s {
            if i == s {
                row.push(CohomClass::one(n, p));
                continue;
            }
            let mut q = table[s - 1][i].mul(&vp).unwrap();
            if i >= 1 {
                q = q.add(&table[s - 1][i - 1].pow(p.get() as u64)).unwrap();
            }
            row.push(q);
        }
        table.push(row);
    }
    table
}

/// q_{n,i} via q_{n,i} = q_{n-1,i-1}^p + q_{n-1,i} V_n^{p-1}.
pub fn dickson_q(n: usize, p: Prime, i: usize) -> Result<CohomClass> {
    if i > n {
        return Err(Error::OutOfRange(format!("q_{{{n},{i}}}")));
    }
    Ok(dickson_table(n, p)[n][i].clone())
}

/// M_{n;i_1,…,i_k} = [k; 0,…,î_1,…,î_k,…,n-1].
pub fn mui_m(n: usize, p: Prime, idx: &[usize]) -> Result<CohomClass> {
    check_idx(n, idx)?;
    let r: Vec<u32> = (0..n).filter(|j| !idx.contains(j)).map(|j| j as u32).collect();
    mui_bracket(n, p, idx.len(), &r)
}

/// R_{n;i_1,…,i_k} = M_{n;i_1,…,i_k} L_n^{p-2}.
pub fn mui_r(n: usize, p: Prime, idx: &[usize]) -> Result<CohomClass> {
    let m = mui_m(n, p, idx)?;
    m.mul(&big_l(n, p, n).pow(p.get() as u64 - 2))
}

fn check_idx(n: usize, idx: &[usize]) -> Result<()> {
    if idx.windows(2).any(|w| w[0] >= w[1]) || idx.iter().any(|&i| i >= n) {
        return Err(Error::OutOfRange(format!("index tuple {idx:?} for rank {n}")));
    }
    Ok(())
}

impl CohomClass {
    /// Exact division by a polynomial in the x's alone; fails on a nonzero remainder.
    pub fn div_exact(&self, d: &CohomClass) -> Result<CohomClass> {
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if d.terms().any(|(m, _)| m.ext != 0) {
            return Err(Error::Invalid("divisor must not involve exterior generators".into()));
        }
        let p = self.prime();
        let n = self.rank();
        let (dlead, dcoef) = d.terms().map(|(m, &c)| (m.exps.clone(), c)).max().unwrap();
        let dinv = p.inv(dcoef);
        let dterms: Vec<(Vec<u32>, u32)> = d.terms().map(|(m, &c)| (m.exps.clone(), c)).collect();
        let mut groups: BTreeMap<u32, BTreeMap<Vec<u32>, u32>> = BTreeMap::new();
        for (m, &c) in self.terms() {
            groups.entry(m.ext).or_default().insert(m.exps.clone(), c);
        }
        let mut q = CohomClass::zero(n, p);
        for (ext, mut rem) in groups {
            while let Some((lead, &c)) = rem.iter().next_back() {
                let lead = lead.clone();
                if lead.iter().zip(&dlead).any(|(a, b)| a < b) {
                    return Err(Error::InexactDivision);
                }
                let shift: Vec<u32> = lead.iter().zip(&dlead).map(|(a, b)| a - b).collect();
                let qc = p.mul(c, dinv);
                for (e, dc) in &dterms {
                    let key: Vec<u32> = e.iter().zip(&shift).map(|(a, b)| a + b).collect();
                    let sub = p.mul(qc, *dc);
                    let v = rem.entry(key.clone()).or_insert(0);
                    *v = p.sub(*v, sub);
                    if *v == 0 {
                        rem.remove(&key);
                    }
                }
                q.add_term(CohomMono { ext, exps: shift }, qc);
            }
        }
        Ok(q)
    }
}

/// Invariants of a fixed rank and prime with cached generators.
pub struct DicksonMui {
    n: usize,
    p: Prime,
    q: Vec<CohomClass>,
    r_cache: DashMap<Vec<usize>, CohomClass>,
    qpow: DashMap<(usize, u64), CohomClass>,
}

impl DicksonMui {
    pub fn new(n: usize, p: Prime) -> Self {
        let table = dickson_table(n, p);
        DicksonMui { n, p, q: table[n].clone(), r_cache: DashMap::new(), qpow: DashMap::new() }
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn q(&self, i: usize) -> &CohomClass {
        &self.q[i]
    }

    pub fn r(&self, idx: &[usize]) -> Result<CohomClass> {
        if let Some(v) = self.r_cache.get(idx) {
            return Ok(v.clone());
        }
        let v = mui_r(self.n, self.p, idx)?;
        self.r_cache.insert(idx.to_vec(), v.clone());
        Ok(v)
    }

    fn q_pow(&self, i: usize, e: u64) -> CohomClass {
        if let Some(v) = self.qpow.get(&(i, e)) {
            return v.clone();
        }
        let v = self.q[i].pow(e);
        self.qpow.insert((i, e), v.clone());
        v
    }

    /// The invariant monomial q^I. Uses R_{n;i_1}⋯R_{n;i_k} = ±R_{n;i_1..i_k} q_{n,0}^{k-1}
    /// to absorb a negative i_1.
    pub fn q_string(&self, s: &IndexString) -> Result<CohomClass> {
        if s.len() != self.n {
            return Err(Error::Mismatch(format!("string length {} for rank {}", s.len(), self.n)));
        }
        if !s.meets_invariant_bound() || s.pairs[1..].iter().any(|&(_, i)| i < 0) {
            return Err(Error::OutOfRange(format!("{s} is not a polynomial invariant")));
        }
        let idx: Vec<usize> = (0..self.n).filter(|&j| s.pairs[j].0 == 1).collect();
        let b = idx.len() as i64;
        let (mut acc, e0) = if b == 0 {
            (CohomClass::one(self.n, self.p), s.i1())
        } else {
            let sign = if (b * (b - 1) / 2) % 2 == 1 { self.p.neg(1) } else { 1 };
            (self.r(&idx)?.scale(sign), s.i1() + b - 1)
        };
        for j in 0..self.n {
            let e = if j == 0 { e0 } else { s.pairs[j].1 };
            if e > 0 {
                acc = acc.mul(&self.q_pow(j, e as u64))?;
            }
        }
        Ok(acc)
    }

    /// q^I computed literally as a product of R_{n;s}'s and q's, dividing out
    /// q_{n,0}^{-i_1} when i_1 < 0. Slow; used as a cross-check.
    pub fn q_string_by_division(&self, s: &IndexString) -> Result<CohomClass> {
        let mut acc = CohomClass::one(self.n, self.p);
        for j in 0..self.n {
            if s.pairs[j].0 == 1 {
                acc = acc.mul(&self.r(&[j])?)?;
            }
            let e = s.pairs[j].1;
            if e > 0 {
                acc = acc.mul(&self.q_pow(j, e as u64))?;
            }
        }
        if s.i1() < 0 {
            acc = acc.div_exact(&self.q_pow(0, (-s.i1()) as u64))?;
        }
        Ok(acc)
    }
}

/// Comparison key of a cohomology monomial: per position (x-exponent + p^{k-1}ε_k, ε_k).
fn mono_key(m: &CohomMono, p: Prime) -> Vec<(i64, u8)> {
    let pp = p.as_i64();
    (0..m.exps.len())
        .map(|k| {
            let e = (m.ext >> k & 1) as u8;
            (m.exps[k] as i64 + pp.pow(k as u32) * e as i64, e)
        })
        .collect()
}

/// Compares index strings through their predicted leading monomials. The pairing
/// with dual monomials is unitriangular in this order; the plain string order can
/// disagree with it once the Bockstein count differs between positions.
pub fn leading_order(a: &IndexString, b: &IndexString, p: Prime) -> Ordering {
    mono_key(&predicted_leading(a, p).0, p).cmp(&mono_key(&predicted_leading(b, p).0, p))
}

/// The string order: lexicographic over positions on (i_k + p^{k-1}ε_k, ε_k).
pub fn string_compare(a: &IndexString, b: &IndexString, p: Prime) -> Result<Ordering> {
    if a.len() != b.len() {
        return Err(Error::Mismatch("strings of different length".into()));
    }
    let pp = p.as_i64();
    for k in 0..a.len() {
        let (ea, ia) = a.pairs[k];
        let (eb, ib) = b.pairs[k];
        let wa = ia + pp.pow(k as u32) * ea as i64;
        let wb = ib + pp.pow(k as u32) * eb as i64;
        match wa.cmp(&wb).then(ea.cmp(&eb)) {
            Ordering::Equal => continue,
            o => return Ok(o),
        }
    }
    Ok(Ordering::Equal)
}

/// The exponent string of a monomial, read as (ε_1, a_1, …, ε_n, a_n).
pub fn mono_string(m: &CohomMono) -> IndexString {
    IndexString { pairs: (0..m.exps.len()).map(|k| ((m.ext >> k & 1) as u8, m.exps[k] as i64)).collect() }
}

/// Smallest monomial of f, with its coefficient.
pub fn leading_term(f: &CohomClass) -> Result<(CohomMono, u32)> {
    let p = f.prime();
    f.terms()
        .min_by(|a, b| mono_key(a.0, p).cmp(&mono_key(b.0, p)))
        .map(|(m, &c)| (m.clone(), c))
        .ok_or(Error::ZeroInput)
}

/// The predicted leading monomial of q^I and its sign exponent Σ (k-1)ε_k.
pub fn predicted_leading(s: &IndexString, p: Prime) -> (CohomMono, i64) {
    let n = s.len();
    let pp = p.as_i64();
    let b = s.b();
    let mut ext = 0u32;
    let mut exps = Vec::with_capacity(n);
    let mut partial = 0i64;
    let mut sign = 0i64;
    for k in 0..n {
        let (e, i) = s.pairs[k];
        partial += i;
        let pk = pp.pow(k as u32);
        exps.push((pk * (pp - 1) * (partial + b) - pk * e as i64) as u32);
        if e == 1 {
            ext |= 1 << k;
            sign += k as i64;
        }
    }
    (CohomMono { ext, exps }, sign)
}

/// The homology monomial dual to q^I:
/// ±u_1^{ε_1}v_1^[(p-1)(i_1+b)-ε_1] ⋯ u_n^{ε_n}v_n^[p^{n-1}(p-1)(i_1+⋯+i_n+b)-p^{n-1}ε_n].
pub fn dual_monomial(s: &IndexString, p: Prime) -> HomClass {
    let (m, sign) = predicted_leading(s, p);
    HomClass::monomial(s.len(), p, m.ext, m.exps, if sign % 2 == 0 { 1 } else { -1 })
}

/// Which constraint on i_1 selects the strings.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// i_1 - m + b ≥ 0: all invariants (and the coinvariant dual basis).
    Invariants,
    /// 2i_1 + b ≥ k: B_k[n].
    Cutoff(i64),
    /// m - b ≤ i_1 < -b/2: cokernel of restriction from the symmetric group.
    Cokernel,
}

/// All strings of the family with invariant degree d.
pub fn enumerate_strings(n: usize, p: Prime, family: Family, d: i64) -> Vec<IndexString> {
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    let dq: Vec<i64> = (0..n as u32).map(|i| deg_q(p, n as u32, i)).collect();
    for mask in 0u32..(1 << n) {
        let eps: Vec<u8> = (0..n).map(|k| (mask >> k & 1) as u8).collect();
        let b = mask.count_ones() as i64;
        let m = (b > 0) as i64;
        let rdeg: i64 = (0..n).filter(|&k| eps[k] == 1).map(|k| deg_r(p, n as u32, &[k])).sum();
        let rem = d - rdeg;
        let (lo, hi) = match family {
            Family::Invariants => (m - b, None),
            Family::Cutoff(k) => (div_ceil(k - b, 2), None),
            Family::Cokernel => (m - b, Some(div_ceil(-b, 2) - 1)),
        };
        // i_1 ranges over lo.. with the rest of the degree filled by i_2..i_n ≥ 0
        let max_i1 = rem.div_euclid(dq[0]);
        let hi = hi.map_or(max_i1, |h| h.min(max_i1));
        let mut i1 = lo;
        while i1 <= hi {
            let rest = rem - i1 * dq[0];
            for tail in fill(&dq[1..], rest) {
                let mut pairs = vec![(eps[0], i1)];
                pairs.extend(tail.iter().enumerate().map(|(j, &v)| (eps[j + 1], v)));
                out.push(IndexString { pairs });
            }
            i1 += 1;
        }
    }
    out.sort();
    out
}

fn div_ceil(a: i64, b: i64) -> i64 {
    -((-a).div_euclid(b))
}

// nonnegative solutions of Σ c_j x_j = total
fn fill(coeffs: &[i64], total: i64) -> Vec<Vec<i64>> {
    if total < 0 {
        return vec![];
    }
    if coeffs.is_empty() {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    let mut x = 0;
    while x * coeffs[0] <= total {
        for mut t in fill(&coeffs[1..], total - x * coeffs[0]) {
            t.insert(0, x);
            out.push(t);
        }
        x += 1;
    }
    out
}

pub fn basis_invariants(n: usize, p: Prime, d: i64) -> Vec<IndexString> {
    enumerate_strings(n, p, Family::Invariants, d)
}

pub fn basis_b(n: usize, p: Prime, k: i64, d: i64) -> Vec<IndexString> {
    enumerate_strings(n, p, Family::Cutoff(k), d)
}

pub fn basis_cokernel(n: usize, p: Prime, d: i64) -> Vec<IndexString> {
    enumerate_strings(n, p, Family::Cokernel, d)
}

/// Dual monomials for B_k[n] (`Some(k)`) or for the coinvariants (`None`).
pub fn basis_coinv_dual(n: usize, p: Prime, k: Option<i64>, d: i64) -> Vec<(IndexString, HomClass)> {
    let fam = k.map_or(Family::Invariants, Family::Cutoff);
    enumerate_strings(n, p, fam, d).into_iter().map(|s| {
        let h = dual_monomial(&s, p);
        (s, h)
    }).collect()
}

/// Invariance under T = (1 1; 0 1) ⊕ I, all transpositions, and a ⊕ I.
pub fn verify_gl_invariance(c: &CohomClass) -> Result<bool> {
    let n = c.rank();
    let p = c.prime();
    let mut gens = Vec::new();
    if n >= 2 {
        gens.push(GlMatrix::elementary_t(n, p));
    }
    for i in 0..n {
        for j in i + 1..n {
            gens.push(GlMatrix::transposition(n, p, i, j));
        }
    }
    for a in 2..p.get() {
        gens.push(GlMatrix::diagonal_scale(n, p, a));
    }
    for g in gens {
        if c.gl_act(&g)? != *c {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p3() -> Prime {
        Prime::new(3).unwrap()
    }

    #[test]
    fn bracket_examples() {
        let p = p3();
        assert_eq!(det_bracket(1, p, &[0]), CohomClass::x(1, p, 1));
        let want = CohomClass::monomial(2, p, 0, vec![1, 3], 1).sub(&CohomClass::monomial(2, p, 0, vec![3, 1], 1)).unwrap();
        assert_eq!(det_bracket(2, p, &[0, 1]), want);
        assert!(det_bracket(2, p, &[1, 1]).is_zero());
        assert_eq!(mui_bracket(1, p, 1, &[]).unwrap(), CohomClass::e(1, p, 1));
        assert_eq!(mui_bracket(2, p, 0, &[0, 1]).unwrap(), det_bracket(2, p, &[0, 1]));
        assert!(mui_bracket(2, p, 3, &[]).is_err());
    }

    // integer determinant with exterior rows expanded over all orderings, divided by k!
    #[test]
    fn mui_bracket_matches_full_expansion() {
        let p = Prime::new(5).unwrap();
        for (k, r) in [(1usize, vec![0u32]), (1, vec![1]), (2, vec![])] {
            let n = 2;
            let mut full = CohomClass::zero(n, p);
            for (sigma, par) in permutations(&[0, 1]) {
                let mut t = CohomClass::one(n, p);
                for row in 0..n {
                    let col = sigma[row];
                    let f = if row < k {
                        CohomClass::e(n, p, col + 1)
                    } else {
                        CohomClass::x(n, p, col + 1).pow(5u64.pow(r[row - k]))
                    };
                    t = t.mul(&f).unwrap();
                }
                full.add_scaled(&t, if par { p.neg(1) } else { 1 });
            }
            let kfact = (1..=k as u32).product::<u32>();
            let mine = mui_bracket(n, p, k, &r).unwrap().scale(kfact);
            assert_eq!(mine, full, "k={k}");
        }
    }

    #[test]
    fn dickson_examples() {
        let p = p3();
        assert_eq!(dickson_q(1, p, 0).unwrap(), CohomClass::monomial(1, p, 0, vec![2], 1));
        assert_eq!(dickson_q(2, p, 2).unwrap(), CohomClass::one(2, p));
        assert_eq!(dickson_q(2, p, 0).unwrap().degree(), Some(16));
    }

    #[test]
    fn dickson_by_division() {
        for &q in &[3u32, 5] {
            let p = Prime::new(q).unwrap();
            for n in 1..=3usize {
                if q == 5 && n == 3 {
                    continue;
                }
                let ln = big_l(n, p, n);
                for i in 0..n {
                    let by_div = big_l(n, p, i).div_exact(&ln).unwrap();
                    assert_eq!(by_div, dickson_q(n, p, i).unwrap(), "p={q} n={n} i={i}");
                }
                if n >= 2 {
                    let v = big_l(n, p, n).div_exact(&big_l(n - 1, p, n - 1).pad(n)).unwrap();
                    assert_eq!(v, v_product(n, p));
                }
            }
        }
    }

    #[test]
    fn v_product_examples() {
        let p = p3();
        assert_eq!(v_product(1, p), CohomClass::x(1, p, 1));
        let v2 = v_product(2, p);
        assert_eq!(v2.degree(), Some(6));
        for n in 1..=3 {
            let (lt, c) = leading_term(&v_product(n, p)).unwrap();
            let mut exps = vec![0; n];
            exps[n - 1] = 3u32.pow(n as u32 - 1);
            assert_eq!((lt, c), (CohomMono { ext: 0, exps }, 1));
        }
    }

    #[test]
    fn r_examples() {
        let p = p3();
        let r = mui_r(1, p, &[0]).unwrap();
        assert_eq!(r, CohomClass::monomial(1, p, 1, vec![1], 1));
        assert_eq!(r.degree(), Some(deg_r(p, 1, &[0])));
        let r2 = mui_r(2, p, &[0, 1]).unwrap();
        assert_eq!(r2.degree(), Some(deg_r(p, 2, &[0, 1])));
    }

    #[test]
    fn m_leading_terms() {
        for &q in &[3u32, 5] {
            let p = Prime::new(q).unwrap();
            for n in 1..=3usize {
                for s in 0..n {
                    let (lt, c) = leading_term(&mui_m(n, p, &[s]).unwrap()).unwrap();
                    let exps: Vec<u32> = (0..n).map(|k| if k == s { 0 } else { q.pow(k as u32) }).collect();
                    assert_eq!(lt, CohomMono { ext: 1 << s, exps }, "n={n} s={s}");
                    assert_eq!(c, p.sign(s as i64));
                }
            }
        }
    }

    #[test]
    fn order_examples() {
        let p = p3();
        let a = IndexString::new(vec![(0, 1)]);
        let b = IndexString::new(vec![(1, 1)]);
        assert_eq!(string_compare(&a, &b, p).unwrap(), Ordering::Less);
        let c = IndexString::new(vec![(1, 0)]);
        let d = IndexString::new(vec![(0, 1)]);
        assert_eq!(string_compare(&c, &d, p).unwrap(), Ordering::Greater);
        let e = IndexString::new(vec![(0, 2), (0, 1)]);
        let f = IndexString::new(vec![(0, 2), (0, 3)]);
        assert_eq!(string_compare(&e, &f, p).unwrap(), Ordering::Less);
    }

    #[test]
    fn basis_examples() {
        let p = p3();
        assert_eq!(basis_invariants(1, p, 4), vec![IndexString::new(vec![(0, 1)])]);
        assert_eq!(basis_invariants(1, p, 3), vec![IndexString::new(vec![(1, 0)])]);
        assert!(basis_invariants(1, p, 1).is_empty());
        assert_eq!(basis_b(1, p, 0, 3), vec![IndexString::new(vec![(1, 0)])]);
        for d in 0..40 {
            assert!(basis_cokernel(1, p, d).is_empty());
        }
        let s = IndexString::new(vec![(1, -1), (1, 1)]);
        let d = s.degree(p);
        assert!(basis_b(2, p, 0, d).contains(&s));
        assert!(!basis_cokernel(2, p, d).contains(&s));
        let h = dual_monomial(&IndexString::new(vec![(1, 2)]), p);
        assert_eq!(h, HomClass::monomial(1, p, 1, vec![5], 1));
    }

    #[test]
    fn gl_invariance_examples() {
        let p = p3();
        for n in 1..=2 {
            for i in 0..n {
                assert!(verify_gl_invariance(&dickson_q(n, p, i).unwrap()).unwrap());
                assert!(verify_gl_invariance(&mui_r(n, p, &[i]).unwrap()).unwrap());
            }
        }
        assert!(verify_gl_invariance(&mui_r(2, p, &[0, 1]).unwrap()).unwrap());
        assert!(!verify_gl_invariance(&CohomClass::x(2, p, 1)).unwrap());
    }

    #[test]
    fn q_string_routes_agree() {
        let p = p3();
        for n in 1..=2 {
            let dm = DicksonMui::new(n, p);
            for d in 0..=40 {
                for s in basis_invariants(n, p, d) {
                    let a = dm.q_string(&s).unwrap();
                    let b = dm.q_string_by_division(&s).unwrap();
                    assert_eq!(a, b, "{s}");
                    assert_eq!(a.degree(), Some(d));
                }
            }
        }
    }

    #[test]
    fn r_products() {
        for &q in &[3u32, 5] {
            let p = Prime::new(q).unwrap();
            for n in 1..=2usize {
                let dm = DicksonMui::new(n, p);
                for i in 0..n {
                    assert!(dm.r(&[i]).unwrap().pow(2).is_zero());
                }
                if n == 2 {
                    let lhs = dm.r(&[0]).unwrap().mul(&dm.r(&[1]).unwrap()).unwrap();
                    let rhs = dm.r(&[0, 1]).unwrap().mul(dm.q(0)).unwrap().scale(p.neg(1));
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn leading_terms_of_invariant_monomials() {
        let p = p3();
        for n in 1..=2 {
            let dm = DicksonMui::new(n, p);
            for d in 0..=60 {
                for s in basis_invariants(n, p, d) {
                    let f = dm.q_string(&s).unwrap();
                    let (lt, c) = leading_term(&f).unwrap();
                    let (want, sign) = predicted_leading(&s, p);
                    assert_eq!(lt, want, "{s}");
                    assert_eq!(c, p.sign(sign), "{s}");
                }
            }
        }
    }
}
