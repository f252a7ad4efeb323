use hopfring::biv::{pair, CohomClass, GlMatrix, HomClass};
use hopfring::invariants::{mui_m, DicksonMui};
use hopfring::Prime;
use proptest::prelude::*;

const RANK: usize = 2;

fn p3() -> Prime {
    Prime::new(3).unwrap()
}

fn cohom() -> impl Strategy<Value = CohomClass> {
    prop::collection::vec((0u32..4, prop::collection::vec(0u32..4, RANK), 1i64..3), 1..4).prop_map(|terms| {
        let p = p3();
        let mut c = CohomClass::zero(RANK, p);
        for (ext, exps, coef) in terms {
            c = c.add(&CohomClass::monomial(RANK, p, ext, exps, coef)).unwrap();
        }
        c
    })
}

// a homogeneous monomial keeps graded signs well defined
fn cohom_mono() -> impl Strategy<Value = CohomClass> {
    (0u32..4, prop::collection::vec(0u32..4, RANK)).prop_map(|(ext, exps)| CohomClass::monomial(RANK, p3(), ext, exps, 1))
}

fn hom_mono() -> impl Strategy<Value = HomClass> {
    (0u32..4, prop::collection::vec(0u32..7, RANK)).prop_map(|(ext, dp)| HomClass::monomial(RANK, p3(), ext, dp, 1))
}

fn invertible(n: usize) -> impl Strategy<Value = GlMatrix> {
    prop::collection::vec(0i64..3, n * n).prop_filter_map("singular", move |v| GlMatrix::new(n, p3(), &v).ok())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cohomology_is_associative(a in cohom(), b in cohom(), c in cohom()) {
        let l = a.mul(&b).unwrap().mul(&c).unwrap();
        let r = a.mul(&b.mul(&c).unwrap()).unwrap();
        prop_assert_eq!(l, r);
    }

    #[test]
    fn cohomology_is_graded_commutative(a in cohom_mono(), b in cohom_mono()) {
        let p = p3();
        let sign = p.sign(a.degree().unwrap() * b.degree().unwrap());
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap().scale(sign));
    }

    #[test]
    fn steenrod_cartan(a in cohom_mono(), b in cohom_mono(), k in 0u32..4) {
        let p = p3();
        let ab = a.mul(&b).unwrap();
        let mut rhs = CohomClass::zero(RANK, p);
        for i in 0..=k {
            rhs = rhs.add(&a.steenrod_up(0, i).mul(&b.steenrod_up(0, k - i)).unwrap()).unwrap();
        }
        prop_assert_eq!(ab.steenrod_up(0, k), rhs);
        let da = a.degree().unwrap();
        let beta = a.steenrod_up(1, 0).mul(&b).unwrap()
            .add(&a.mul(&b.steenrod_up(1, 0)).unwrap().scale(p.sign(da))).unwrap();
        prop_assert_eq!(ab.steenrod_up(1, 0), beta);
    }

    #[test]
    fn steenrod_commutes_with_gl(c in cohom(), g in invertible(RANK), eps in 0u8..2, k in 0u32..3) {
        let l = c.gl_act(&g).unwrap().steenrod_up(eps, k);
        let r = c.steenrod_up(eps, k).gl_act(&g).unwrap();
        prop_assert_eq!(l, r);
    }

    #[test]
    fn homology_action_is_adjoint(c in cohom_mono(), h in hom_mono(), eps in 0u8..2, k in 0u32..3) {
        let l = pair(&c.steenrod_up(eps, k), &h).unwrap();
        let r = pair(&c, &h.steenrod_down(eps, k)).unwrap();
        prop_assert_eq!(l, r);
    }

    #[test]
    fn gl_action_is_a_ring_map(a in cohom(), b in cohom(), g in invertible(RANK)) {
        let l = a.mul(&b).unwrap().gl_act(&g).unwrap();
        let r = a.gl_act(&g).unwrap().mul(&b.gl_act(&g).unwrap()).unwrap();
        prop_assert_eq!(l, r);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn dickson_and_mui_classes_are_invariant(g in invertible(3)) {
        let dm = DicksonMui::new(3, p3());
        for i in 0..3 {
            let q = dm.q(i);
            prop_assert_eq!(&q.gl_act(&g).unwrap(), q);
        }
        // M scales by det(g); R = M L^{p-2} picks up det^{p-1} = 1
        let det = g.det();
        for idx in [vec![0usize], vec![1], vec![0, 2]] {
            let m = mui_m(3, p3(), &idx).unwrap();
            prop_assert_eq!(m.gl_act(&g).unwrap(), m.scale(det));
            let r = dm.r(&idx).unwrap();
            prop_assert_eq!(&r.gl_act(&g).unwrap(), &r);
        }
    }
}
