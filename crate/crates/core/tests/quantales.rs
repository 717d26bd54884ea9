mod common;

use std::collections::BTreeSet;
use std::sync::Arc;

use common::{all_maps, preserves_joins, small_lattices};
use qf_core::forms::{enumerate_two_forms, forms_isomorphic};
use qf_core::quantales::{
    annihilator_map, comparison_hom, constant_map, cyclic_group, endo_quantale, enumerate_nuclei, enumerate_quantales,
    enumerate_quantales_on, form_quantale, phi_of_quantale, powerset_monoid_quantale, quantales_isomorphic,
};
use qf_core::residuation::{check_bimorphism, check_residuation_identities};
use qf_core::{Caps, Lattice, Quantale};

#[test]
fn endomorphism_quantales() {
    let caps = Caps::default();
    let mut shapes: Vec<Arc<Lattice>> = (1..=4).map(|n| Arc::new(Lattice::chain(n))).collect();
    shapes.push(Arc::new(Lattice::diamond()));
    for s in shapes {
        let e = endo_quantale(&s, &caps).unwrap();
        let brute = all_maps(s.len(), s.len()).into_iter().filter(|t| preserves_joins(&s, &s, t)).count();
        assert_eq!(e.quantale.len(), brute);
        let q = &e.quantale;
        let (ls, rs) = (q.ls(), q.rs());
        assert!(ls.lattice.is_isomorphic(&s));
        assert!(rs.lattice.is_isomorphic(&s.dual()));
        assert!(q.is_factor());
        let constants: BTreeSet<usize> = s.elements().map(|v| e.index_of(&constant_map(&s, v)).unwrap()).collect();
        let annihilators: BTreeSet<usize> =
            s.elements().map(|v| e.index_of(&annihilator_map(&s, v)).unwrap()).collect();
        assert_eq!(ls.embed.iter().copied().collect::<BTreeSet<_>>(), constants);
        assert_eq!(rs.embed.iter().copied().collect::<BTreeSet<_>>(), annihilators);
    }
    assert_eq!(endo_quantale(&Arc::new(Lattice::chain(2)), &caps).unwrap().quantale.len(), 2);
    assert_eq!(endo_quantale(&Arc::new(Lattice::chain(3)), &caps).unwrap().quantale.len(), 6);
}

/// All associative join-bimorphic tables on `l`, by filtering every table.
fn brute_quantale_tables(l: &Lattice) -> usize {
    let n = l.len();
    all_maps(n * n, n)
        .into_iter()
        .filter(|t| {
            let m = |a: usize, b: usize| t[a * n + b];
            let rows = (0..n).all(|a| preserves_joins(l, l, &(0..n).map(|b| m(a, b)).collect::<Vec<_>>()));
            let cols = (0..n).all(|b| preserves_joins(l, l, &(0..n).map(|a| m(a, b)).collect::<Vec<_>>()));
            let assoc = (0..n).all(|a| (0..n).all(|b| (0..n).all(|c| m(m(a, b), c) == m(a, m(b, c)))));
            rows && cols && assoc
        })
        .count()
}

#[test]
fn quantale_tables_match_brute_force() {
    for l in small_lattices(3) {
        let tables: BTreeSet<Vec<Vec<usize>>> = enumerate_quantales_on(&l).iter().map(Quantale::mult_table).collect();
        assert_eq!(tables.len(), brute_quantale_tables(&l), "|L| = {}", l.len());
    }
}

#[test]
fn powerset_monoid_quantales() {
    let q = powerset_monoid_quantale(&cyclic_group(2), &Caps::default()).unwrap();
    assert_eq!(q.len(), 4);
    assert!(q.is_commutative());
    // {0} ⊙ X = X
    let e = q.unit().unwrap();
    assert!(q.elements().all(|x| q.mul(e, x) == x && q.mul(x, e) == x));
    check_bimorphism(&q).unwrap();
    check_residuation_identities(&q).unwrap();
    let not_monoid = vec![vec![0, 0], vec![1, 0]];
    assert!(powerset_monoid_quantale(&not_monoid, &Caps::default()).is_err());
}

#[test]
fn comparison_homomorphisms() {
    let caps = Caps::default();
    for q in enumerate_quantales(3, &caps).unwrap() {
        let k = comparison_hom(&q, &caps).unwrap();
        assert!(k.preserves.joins && k.preserves.mult, "{q:?}");
        if q.unit().is_some() {
            assert_eq!(k.preserves.unit, Some(true));
        }
        if q.involution().is_some() {
            assert_eq!(k.target_involutive, Some(true));
            assert_eq!(k.preserves.involution, Some(true));
        }
        assert_eq!(k.injective, k.faithful);
        check_residuation_identities(&q).unwrap();
    }
}

#[test]
fn dense_forms_are_recovered_from_their_quantales() {
    let caps = Caps::default();
    for l in small_lattices(3) {
        for r in small_lattices(3) {
            if l.len() * r.len() > caps.form_quantale_cells {
                continue;
            }
            for form in enumerate_two_forms(&l, &r, &caps).unwrap() {
                if !form.classify().dense() {
                    continue;
                }
                let fq = form_quantale(&form, &caps).unwrap();
                let phi = phi_of_quantale(&fq.quantale);
                assert!(forms_isomorphic(&phi.form, &form));
                assert!(phi.ls.lattice.is_isomorphic(&l));
                assert!(phi.rs.lattice.is_isomorphic(&r));
                assert!(fq.quantale.is_factor());
            }
        }
    }
}

#[test]
fn nucleus_quotients_are_quantales() {
    let q = Arc::new(powerset_monoid_quantale(&cyclic_group(2), &Caps::default()).unwrap());
    let nuclei = enumerate_nuclei(&q);
    assert!(nuclei.len() > 1);
    for j in &nuclei {
        let quot = j.quotient();
        check_bimorphism(&quot.quantale).unwrap();
        // the projection is a multiplicative surjection onto the fixed points
        for a in q.elements() {
            for b in q.elements() {
                assert_eq!(quot.projection[q.mul(a, b)], quot.quantale.mul(quot.projection[a], quot.projection[b]));
            }
        }
    }
    let support = nuclei.iter().find(|j| j.closure.table() == [0, 3, 3, 3]).unwrap();
    assert!(quantales_isomorphic(&support.quotient().quantale, &Quantale::two()));
}
