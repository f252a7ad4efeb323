use std::collections::BTreeMap;

use hopfring::dyer_lashof::DlString;
use hopfring::hopf::{HopfElement, HopfEngine, Mono, Tensor};
use hopfring::invariants::IndexString;
use hopfring::transfer::{string_backward, string_forward};
use hopfring::Prime;
use proptest::prelude::*;

fn p3() -> Prime {
    Prime::new(3).unwrap()
}

fn engine() -> HopfEngine {
    HopfEngine::new(p3(), 200)
}

// homogeneous level-0 elements built from a few generators
fn pool(e: &HopfEngine) -> Vec<HopfElement> {
    let one = e.base(0);
    let q1 = e.q_act(0, 1, &one);
    vec![
        q1.clone(),
        e.q_act(1, 2, &one),
        e.q_act(0, 2, &one),
        e.q_act(0, 3, &q1),
        e.e_gen(1, 1),
        HopfElement::component(e.prime(), 2),
    ]
}

fn element() -> impl Strategy<Value = (usize, usize, i64)> {
    (0usize..6, 0usize..6, 0i64..3)
}

fn build(e: &HopfEngine, (a, b, c): (usize, usize, i64)) -> HopfElement {
    let xs = pool(e);
    let comp = HopfElement::component(e.prime(), c);
    xs[a].star(&xs[b]).unwrap().star(&comp).unwrap()
}

fn mono(p: Prime, m: &Mono) -> HopfElement {
    HopfElement::from_mono(p, 0, m.clone(), 1)
}

fn deg(p: Prime, m: &Mono) -> i64 {
    m.degree(p)
}

/// ψx ⋆ ψy in H ⊗ H with the Koszul sign.
fn tensor_star(p: Prime, a: &Tensor, b: &Tensor) -> BTreeMap<(Mono, Mono), u32> {
    let mut out: BTreeMap<(Mono, Mono), u32> = BTreeMap::new();
    for ((a1, a2), &ca) in a {
        for ((b1, b2), &cb) in b {
            let sign = p.sign(deg(p, a2) * deg(p, b1));
            let l = mono(p, a1).star(&mono(p, b1)).unwrap();
            let r = mono(p, a2).star(&mono(p, b2)).unwrap();
            for (lm, lc) in l.sorted_terms() {
                for (rm, rc) in r.sorted_terms() {
                    let c = p.mul(p.mul(ca, cb), p.mul(sign, p.mul(lc, rc)));
                    let e = out.entry((lm.clone(), rm)).or_insert(0);
                    *e = p.add(*e, c);
                }
            }
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

fn sorted(t: &Tensor) -> BTreeMap<(Mono, Mono), u32> {
    t.iter().filter(|(_, &c)| c != 0).map(|(k, &c)| (k.clone(), c)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn circle_is_graded_commutative(x in element(), y in element()) {
        let e = engine();
        let p = e.prime();
        let (x, y) = (build(&e, x), build(&e, y));
        prop_assume!(!x.is_zero() && !y.is_zero());
        let sign = p.sign(x.degree().unwrap() * y.degree().unwrap());
        prop_assert_eq!(e.circle(&x, &y).unwrap(), e.circle(&y, &x).unwrap().scale(sign));
    }

    #[test]
    fn circle_is_associative(x in element(), y in 0usize..5, z in 0usize..5) {
        let e = engine();
        let x = build(&e, x);
        let xs = pool(&e);
        let (y, z) = (&xs[y], &xs[z]);
        let l = e.circle(&e.circle(&x, y).unwrap(), z);
        let r = e.circle(&x, &e.circle(y, z).unwrap());
        match (l, r) {
            (Ok(l), Ok(r)) => prop_assert_eq!(l, r),
            // both sides exceed the degree budget together
            (l, r) => prop_assert_eq!(l.is_err(), r.is_err()),
        }
    }

    #[test]
    fn circle_distributes_over_star(x in element(), y in 0usize..6, z in 0usize..6) {
        let e = engine();
        let p = e.prime();
        let x = build(&e, x);
        let xs = pool(&e);
        let (y, z) = (&xs[y], &xs[z]);
        let lhs = e.circle(&x, &y.star(z).unwrap()).unwrap();
        let mut rhs = HopfElement::zero(p, 0);
        for ((x1, x2), c) in e.coproduct(&x) {
            let sign = p.sign(deg(p, &x2) * y.degree().unwrap());
            let a = e.circle(&mono(p, &x1), y).unwrap();
            let b = e.circle(&mono(p, &x2), z).unwrap();
            rhs.add_scaled(&a.star(&b).unwrap(), p.mul(c, sign));
        }
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn coproduct_is_a_star_map(x in element(), y in element()) {
        let e = engine();
        let p = e.prime();
        let (x, y) = (build(&e, x), build(&e, y));
        let lhs = sorted(&e.coproduct(&x.star(&y).unwrap()));
        prop_assert_eq!(lhs, tensor_star(p, &e.coproduct(&x), &e.coproduct(&y)));
    }

    #[test]
    fn antipode_is_an_involution(x in element()) {
        let e = engine();
        let x = build(&e, x);
        prop_assert_eq!(e.antipode(&e.antipode(&x)), x);
    }

    #[test]
    fn index_strings_round_trip(
        k in 0u32..4,
        head in (0u8..2, -2i64..8),
        tail in prop::collection::vec((0u8..2, 0i64..6), 0..3),
    ) {
        let p = p3();
        let mut pairs = vec![head];
        pairs.extend(tail);
        let s = IndexString::new(pairs);
        if let Ok(j) = string_forward(k, &s, p) {
            prop_assert!(j.is_admissible(p));
            prop_assert!(j.excess(p) + j.pairs[0].0 as i64 > k as i64);
            prop_assert_eq!(string_backward(k, &j, p).unwrap(), s);
        }
    }

    #[test]
    fn admissible_strings_round_trip(
        k in 0u32..4,
        pairs in prop::collection::vec((0u8..2, 1i64..40), 1..4),
    ) {
        let p = p3();
        let j = DlString::new(pairs);
        if let Ok(s) = string_backward(k, &j, p) {
            prop_assert_eq!(string_forward(k, &s, p).unwrap(), j);
        }
    }
}
