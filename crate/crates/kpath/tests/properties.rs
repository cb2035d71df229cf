use proptest::prelude::*;

use kpath::action::{shift_off, shift_on};
use kpath::alignment::FaOracle;
use kpath::catalog;
use kpath::groupoid::{axiom_suite, compose_elements, enumerate_elements, invert, Sampling};
use kpath::pspace::{cylinder_membership, enumerate_filters, Cylinder, Space};
use kpath::spielberg::e_hat_witness;
use kpath::{Degree, Morphism};

fn d(c: &[u32]) -> Degree {
    Degree::new(c.iter().copied())
}

fn tg_morphisms() -> (catalog::CatalogEntry, Vec<Morphism>) {
    let e = catalog::lambda_tg(3).unwrap();
    let (ms, _) = e.graph.enumerate_morphisms(&d(&[2, 2]));
    (e, ms)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn factorisations_recompose(i in 0usize..64, p in prop::collection::vec(0u32..3, 2)) {
        let (e, ms) = tg_morphisms();
        let g = &e.graph;
        let lam = &ms[i % ms.len()];
        let p = Degree::new(p.iter().zip(lam.degree().coords()).map(|(a, b)| (*a).min(*b)));
        let (a, b) = g.factorize(lam, &p).unwrap();
        prop_assert_eq!(a.degree(), &p);
        prop_assert_eq!(&g.compose(&a, &b).unwrap(), lam);
        prop_assert!(g.prefix_leq(&a, lam));
    }

    #[test]
    fn composition_is_associative(i in 0usize..64, j in 0usize..64, k in 0usize..64) {
        let e = catalog::grid(3).unwrap();
        let g = &e.graph;
        let (ms, _) = g.enumerate_morphisms(&d(&[2, 2]));
        let (a, b, c) = (&ms[i % ms.len()], &ms[j % ms.len()], &ms[k % ms.len()]);
        let left = g.compose(a, b).and_then(|ab| g.compose(&ab, c));
        let right = g.compose(b, c).and_then(|bc| g.compose(a, &bc));
        prop_assert_eq!(left.ok(), right.ok());
    }

    #[test]
    fn shifts_round_trip(i in 0usize..64, j in 0usize..64) {
        let (e, ms) = tg_morphisms();
        let g = &e.graph;
        let (fs, _) = enumerate_filters(&e, &d(&[2, 2]));
        let x = &fs[i % fs.len()];
        let into: Vec<&Morphism> = ms.iter().filter(|l| l.source() == x.range()).collect();
        let lam = into[j % into.len()];
        let up = shift_on(g, lam, x).unwrap();
        prop_assert!(up.contains(lam));
        prop_assert_eq!(&shift_off(g, lam, &up).unwrap(), x);
    }

    #[test]
    fn sampled_axioms_hold(seed in any::<u64>()) {
        let e = catalog::lambda_tg(2).unwrap();
        let b = d(&[2, 2]);
        let o = FaOracle::new(&e, &b);
        let (fs, _) = enumerate_filters(&e, &b);
        let es = enumerate_elements(&o, &fs);
        for c in axiom_suite(&o, &es, Some(Sampling { seed, triples: 20 })) {
            prop_assert!(c.pass, "{:?}", c);
        }
    }

    #[test]
    fn inverses_cancel(i in 0usize..128) {
        let e = catalog::twisted().unwrap();
        let b = d(&[2, 2]);
        let o = FaOracle::new(&e, &b);
        let (fs, _) = enumerate_filters(&e, &b);
        let es = enumerate_elements(&o, &fs);
        let x = &es[i % es.len()];
        let u = compose_elements(&o, x, &invert(x)).unwrap();
        prop_assert!(u.is_unit());
        prop_assert_eq!(&u.x, &x.x);
    }

    #[test]
    fn e_hat_matches_cylinders(i in 0usize..64, j in 0usize..64, mask in 0u32..256) {
        let (e, ms) = tg_morphisms();
        let g = &e.graph;
        let (fs, _) = enumerate_filters(&e, &d(&[2, 2]));
        let x = &fs[i % fs.len()];
        let at: Vec<&Morphism> = ms.iter().filter(|l| l.range() == x.range()).collect();
        let mu = at[j % at.len()];
        let ext: Vec<Morphism> = ms.iter().filter(|l| g.prefix_leq(mu, l)).cloned().collect();
        let k: Vec<Morphism> = ext.iter().enumerate().filter(|(n, _)| mask >> (n % 8) & 1 == 1).map(|(_, l)| l.clone()).collect();
        let z = cylinder_membership(&x.view(), &Cylinder::basic(mu, k.clone(), Space::Filters));
        prop_assert_eq!(z, e_hat_witness(g, x, mu, &k).is_some());
    }
}
