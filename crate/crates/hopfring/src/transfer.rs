//! Transfer images in the Hopf ring: E-generators, circle products of them, and
//! their expansion in admissible Q-monomials.

use crate::biv::HomClass;
use crate::dyer_lashof::{word_degree, DlString};
use crate::error::{Error, Result};
use crate::fp::Prime;
use crate::hopf::{HopfElement, HopfEngine, Mono};
use crate::invariants::IndexString;

fn check_shape(s: &IndexString) -> Result<()> {
    if s.is_empty() {
        return Err(Error::Invalid("empty index string".into()));
    }
    if s.pairs.iter().skip(1).any(|&(_, i)| i < 0) {
        return Err(Error::Invalid(format!("{s}: trailing entries must be nonnegative")));
    }
    if !s.meets_invariant_bound() {
        return Err(Error::Invalid(format!("{s}: needs i_1 - m + b >= 0")));
    }
    Ok(())
}

/// E-factor indices (ε_s, p^{s-1}(i_1+..+i_s+b) - Δ_s ε_s), Δ_s = (p^{s-1}-1)/(p-1).
pub fn e_indices(s: &IndexString, p: Prime) -> Vec<(u8, i64)> {
    let pp = p.as_i64();
    let b = s.b();
    let mut out = Vec::with_capacity(s.len());
    let (mut partial, mut pow) = (0, 1);
    for &(e, i) in &s.pairs {
        partial += i;
        let delta = (pow - 1) / (pp - 1);
        out.push((e, pow * (partial + b) - delta * e as i64));
        pow *= pp;
    }
    out
}

/// Closed form for the leading string of σ^k ∘ E ∘ ... ∘ E.
pub fn leading_string(s: &IndexString, p: Prime) -> DlString {
    let n = s.len();
    let pp = p.as_i64();
    let b = s.b();
    let i = |t: usize| s.pairs[t - 1].1;
    let e = |t: usize| s.pairs[t - 1].0 as i64;
    let pw = |k: usize| pp.pow(k as u32);
    let pairs = (1..=n)
        .map(|t| {
            let head: i64 = (1..=t).map(i).sum::<i64>() + b;
            let tail: i64 = (0..n - t).map(|l| pw(l) * (pw(n - t - l) - 1) * i(t + l + 1)).sum();
            let delta: i64 = (t + 1..=n).map(|r| pw(r - t - 1) * e(r)).sum();
            (e(t) as u8, pw(n - t) * head + tail - delta)
        })
        .collect();
    DlString::new(pairs)
}

/// (-1)^{n i_1 + (n-1) i_2 + ... + i_n + n b}.
pub fn leading_sign(s: &IndexString, p: Prime) -> u32 {
    let n = s.len() as i64;
    let e: i64 = s.pairs.iter().enumerate().map(|(t, &(_, i))| (n - t as i64) * i).sum::<i64>() + n * s.b();
    p.sign(e)
}

/// Maps an index string to the admissible string of its leading term.
pub fn string_forward(k: u32, s: &IndexString, p: Prime) -> Result<DlString> {
    check_shape(s)?;
    if 2 * s.i1() + s.b() + s.pairs[0].0 as i64 <= k as i64 {
        return Err(Error::OutOfRange(format!("{s} does not give a generator at level {k}")));
    }
    Ok(leading_string(s, p))
}

/// Inverse of `string_forward`, via p·j_{s+1} - j_s = i_{s+1} + ε_{s+1}.
pub fn string_backward(k: u32, j: &DlString, p: Prime) -> Result<IndexString> {
    if j.is_empty() || !j.is_admissible(p) || j.pairs.iter().any(|&(e, i)| i < e as i64) {
        return Err(Error::Invalid(format!("{j} is not admissible")));
    }
    if j.excess(p) + j.pairs[0].0 as i64 <= k as i64 {
        return Err(Error::OutOfRange(format!("{j} is not a generator at level {k}")));
    }
    let pp = p.as_i64();
    let n = j.len();
    let mut pairs = vec![(0u8, 0i64); n];
    for t in 1..n {
        let (e, jt) = j.pairs[t];
        pairs[t] = (e, pp * jt - j.pairs[t - 1].1 - e as i64);
    }
    let b = j.b();
    let rest: i64 = pairs[1..].iter().map(|&(_, i)| i).sum();
    pairs[0] = (j.pairs[0].0, j.pairs[n - 1].1 - rest - b);
    Ok(IndexString::new(pairs))
}

/// σ^{∘k} ∘ E_{f_1} ∘ ... ∘ E_{f_n}; k = 0 means [1] ∘ ....
pub fn e_product(engine: &HopfEngine, k: u32, factors: &[(u8, i64)]) -> Result<HopfElement> {
    let p = engine.prime();
    let Some((&last, rest)) = factors.split_last() else {
        return Ok(engine.base(k));
    };
    let mut acc = engine.e_gen(last.0, last.1);
    for &(e, i) in rest.iter().rev() {
        if acc.is_zero() {
            break;
        }
        acc = engine.circle(&engine.e_gen(e, i), &acc)?;
    }
    if k > 0 && !acc.is_zero() {
        acc = engine.circle(&HopfElement::sigma(p, k)?, &acc)?;
    }
    Ok(acc)
}

/// The string K with Q^K(base) equal to this monomial, if there is one.
pub fn mono_string(m: &Mono, level: u32, p: Prime) -> Option<DlString> {
    let pp = p.as_i64();
    match m.factors.as_slice() {
        [] if level == 0 => {
            let mut c = m.comp;
            let mut n = 0;
            while c > 1 && c % pp == 0 {
                c /= pp;
                n += 1;
            }
            (c == 1).then(|| DlString::new(vec![(0, 0); n]))
        }
        [(g, e)] if m.offset(p) == 0 || level > 0 => {
            let mut e = *e as i64;
            let mut d = g.degree(p);
            let mut ops = g.ops.clone();
            while e > 1 {
                if e % pp != 0 || d % 2 != 0 {
                    return None;
                }
                ops.insert(0, (0, d / 2));
                d *= pp;
                e /= pp;
            }
            Some(DlString::new(ops))
        }
        _ => None,
    }
}

/// Coordinates of x in the Q^K(base) monomials.
pub fn q_coordinates(x: &HopfElement) -> Result<Vec<(DlString, u32)>> {
    let p = x.prime();
    let mut out = Vec::new();
    for (m, c) in x.sorted_terms() {
        let s = mono_string(&m, x.level(), p)
            .ok_or_else(|| Error::Invalid(format!("term of {x} is not a single Q-monomial")))?;
        out.push((s, c));
    }
    out.sort();
    Ok(out)
}

/// A computed E-product next to the predicted leading term.
#[derive(Clone, Debug)]
pub struct EProductExpansion {
    pub value: HopfElement,
    pub predicted: DlString,
    pub predicted_sign: u32,
    /// Sign without the (-1)^{k b} from moving σ^{∘k} past Bocksteins.
    pub naive_sign: u32,
    pub leading_coef: u32,
    pub residual: Vec<(DlString, u32)>,
    pub bound: i64,
}

impl EProductExpansion {
    /// Leading coefficient equals the predicted sign and every other term has smaller excess.
    pub fn holds(&self, p: Prime) -> bool {
        self.leading_coef == self.predicted_sign && self.residual.iter().all(|(s, _)| s.excess(p) < self.bound)
    }
}

pub fn expand_e_product(engine: &HopfEngine, k: u32, s: &IndexString) -> Result<EProductExpansion> {
    check_shape(s)?;
    let p = engine.prime();
    let value = e_product(engine, k, &e_indices(s, p))?;
    let predicted = leading_string(s, p);
    let mut leading_coef = 0;
    let mut residual = Vec::new();
    for (q, c) in q_coordinates(&value)? {
        if q == predicted {
            leading_coef = c;
        } else {
            residual.push((q, c));
        }
    }
    Ok(EProductExpansion {
        value,
        predicted,
        predicted_sign: p.mul(leading_sign(s, p), p.sign(k as i64 * s.b())),
        naive_sign: leading_sign(s, p),
        leading_coef,
        residual,
        bound: 2 * s.i1() + s.b(),
    })
}

/// Degree of σ^k ∘ E ∘ ... ∘ E for this index string.
pub fn e_product_degree(k: u32, s: &IndexString, p: Prime) -> i64 {
    k as i64 + word_degree(&e_indices(s, p), p)
}

/// Image of a homology class of BV_n under the transfer into H_*QS^0.
pub fn transfer(engine: &HopfEngine, h: &HomClass) -> Result<HopfElement> {
    let p = engine.prime();
    let pm1 = p.get() - 1;
    let mut out = HopfElement::zero(p, 0);
    for (m, &c) in h.terms() {
        let mut factors = Vec::with_capacity(h.rank());
        for (idx, &a) in m.divpow.iter().enumerate() {
            let e = m.ext >> idx & 1;
            if !(a + e).is_multiple_of(pm1) {
                factors.clear();
                break;
            }
            factors.push((e as u8, ((a + e) / pm1) as i64));
        }
        if factors.len() != h.rank() {
            continue;
        }
        out.add_scaled(&e_product(engine, 0, &factors)?, c);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::biv::HomClass;

    fn p3() -> Prime {
        Prime::new(3).unwrap()
    }

    #[test]
    fn worked_example() {
        let p = p3();
        let s = IndexString::from_flat(&[0, 2, 1, 3, 1, 3]);
        assert_eq!(e_indices(&s, p), vec![(0, 4), (1, 20), (1, 86)]);
        let j = leading_string(&s, p);
        assert_eq!(j.pairs, vec![(0, 74), (1, 26), (1, 10)]);
        assert_eq!(leading_sign(&s, p), p.neg(1));
        let eng = HopfEngine::new(p, 400);
        let s6 = HopfElement::sigma(p, 6).unwrap();
        let y = eng.q_act(1, 26, &eng.q_act(1, 10, &s6)).scale(p.neg(1));
        let a = e_product(&eng, 6, &[(1, 7), (1, 29)]).unwrap();
        let b = e_product(&eng, 6, &[(1, 4), (1, 32)]).unwrap();
        assert_eq!(a.add(&b).unwrap(), y);
    }

    #[test]
    fn bijection_small() {
        let p = p3();
        let s = IndexString::from_flat(&[1, 2]);
        assert_eq!(string_forward(0, &s, p).unwrap().pairs, vec![(1, 3)]);
        for flat in [[0i64, 1, 1, 0], [1, 0, 0, 2], [1, -1, 1, 1], [0, 3, 0, 0]] {
            let s = IndexString::from_flat(&flat);
            let j = string_forward(0, &s, p).unwrap();
            assert!(j.is_admissible(p));
            assert_eq!(string_backward(0, &j, p).unwrap(), s);
        }
    }

    #[test]
    fn leading_terms_small() {
        let p = p3();
        let eng = HopfEngine::new(p, 200);
        for flat in [[0i64, 1, 0, 0], [0, 1, 1, 0], [1, 0, 0, 1], [1, -1, 1, 1], [0, 0, 1, 1]] {
            let s = IndexString::from_flat(&flat);
            for k in 0..3 {
                if 2 * s.i1() + s.b() + s.pairs[0].0 as i64 <= k {
                    continue;
                }
                let x = expand_e_product(&eng, k as u32, &s).unwrap();
                assert!(x.holds(p), "{s} k={k}: {}", x.value);
                assert_eq!(x.value.degree(), Some(e_product_degree(k as u32, &s, p)));
            }
        }
    }

    #[test]
    fn rank_one_transfer() {
        let p = p3();
        let eng = HopfEngine::new(p, 200);
        let h = HomClass::v(1, p, 1, 4);
        assert_eq!(transfer(&eng, &h).unwrap(), eng.e_gen(0, 2));
        assert!(transfer(&eng, &HomClass::v(1, p, 1, 3)).unwrap().is_zero());
    }
}
