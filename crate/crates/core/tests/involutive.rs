mod common;

use std::sync::Arc;

use qf_core::involutive::{
    enumerate_involutive_modules, involution_on_form_quantale, involutive_report, involutive_structure_bijection,
    self_adjoint_orthogonalizer, self_dual_adjoint, symmetric_forms, symvsinv_report, upseg_ann_involutive,
};
use qf_core::quantales::enumerate_quantales;
use qf_core::residuation::check_residuation_identities;
use qf_core::{Caps, Lattice, Quantale};

fn involutive_quantales() -> Vec<Arc<Quantale>> {
    enumerate_quantales(3, &Caps::default())
        .unwrap()
        .into_iter()
        .filter(|q| q.involution().is_some())
        .map(Arc::new)
        .collect()
}

#[test]
fn swap_involutions_on_symmetric_forms() {
    let caps = Caps { form_quantale_cells: 16, ..Caps::default() };
    for l in common::small_lattices(4) {
        for form in symmetric_forms(&l, &caps).unwrap() {
            let fq = involution_on_form_quantale(&form, &caps).unwrap();
            let inv = fq.quantale.involution().unwrap();
            for (i, (f, g)) in fq.pairs.iter().enumerate() {
                assert_eq!((&fq.pairs[inv[i]].0, &fq.pairs[inv[i]].1), (g, f));
                if form.classify().faithful() {
                    assert_eq!(self_dual_adjoint(&form, f), g.table());
                }
            }
        }
    }
}

#[test]
fn phi_of_involutive_quantales() {
    for q in involutive_quantales() {
        let rep = symvsinv_report(&q, &Caps::default()).unwrap();
        assert!(rep.symmetric_via_star && rep.phi_involution_valid && rep.matches_swap, "{q:?}");
    }
}

#[test]
fn law_matches_residuation_form() {
    let caps = Caps::default();
    for q in involutive_quantales() {
        for l in common::small_lattices(3) {
            for m in qf_core::qmodules::enumerate_modules_on(&q, &l, qf_core::Side::Left) {
                for form in symmetric_forms(&l, &caps).unwrap() {
                    let rep = involutive_report(&m, &form).unwrap();
                    assert!(rep.consistent(), "{rep:?}");
                }
            }
        }
    }
}

#[test]
fn structures_correspond_to_homomorphisms() {
    let caps = Caps::default();
    let mut nontrivial = 0;
    for q in involutive_quantales().into_iter().filter(|q| q.len() <= 2) {
        for l in common::small_lattices(3) {
            for form in symmetric_forms(&l, &caps).unwrap() {
                let rep = involutive_structure_bijection(&q, &form, &caps).unwrap();
                assert!(rep.holds(), "{q:?} {form:?}");
                nontrivial += usize::from(rep.structures.len() > 1);
            }
        }
    }
    assert!(nontrivial > 0);
    let c3 = Arc::new(Lattice::chain(3));
    let two = Arc::new(Quantale::two().with_involution(vec![0, 1]).unwrap());
    for form in symmetric_forms(&c3, &caps).unwrap() {
        let rep = involutive_structure_bijection(&two, &form, &caps).unwrap();
        assert_eq!(rep.structures.len(), rep.homs.len());
    }
}

#[test]
fn orthogonalizers_and_annihilator_segments() {
    let caps = Caps::default();
    let mut faithful_instances = 0;
    for q in involutive_quantales() {
        for im in enumerate_involutive_modules(&q, 3, &caps).unwrap() {
            check_residuation_identities(&im.module).unwrap();
            for x in im.module.elements() {
                let s = self_adjoint_orthogonalizer(&im, x);
                if !s.generator {
                    assert!(upseg_ann_involutive(&im, x).is_err());
                    continue;
                }
                assert!(s.self_adjoint);
                let u = upseg_ann_involutive(&im, x).unwrap();
                assert_eq!(u.n, s.value);
                assert!(u.holds(), "{u:?}");
                if u.segment_faithful {
                    assert_eq!(u.isomorphism, Some(true));
                    faithful_instances += 1;
                }
            }
        }
    }
    assert!(faithful_instances > 0);
}
