use grouplog_core::iso::{isomorphic, minimal_generating_set, IsoError, ISO_ORDER_CAP};
use grouplog_core::*;

fn group(f: Family) -> FiniteGroup {
    build_group(&f).unwrap()
}

fn prod(a: Family, b: Family) -> Family {
    Family::Product(Box::new(a), Box::new(b))
}

fn assert_bijective_hom(g: &FiniteGroup, h: &FiniteGroup, map: &[usize]) {
    let mut seen = vec![false; h.order()];
    for &y in map {
        assert!(!seen[y]);
        seen[y] = true;
    }
    for a in 0..g.order() {
        for b in 0..g.order() {
            assert_eq!(map[g.mul(a, b)], h.mul(map[a], map[b]));
        }
    }
}

#[test]
fn generating_sets() {
    let z8 = group(Family::Cyclic(8));
    let gens = minimal_generating_set(&z8);
    assert_eq!(gens.len(), 1);
    assert_eq!(z8.element_order(gens[0]), 8);
    assert_eq!(minimal_generating_set(&group(Family::Abelian(vec![2, 2]))).len(), 2);
    assert!(minimal_generating_set(&group(Family::Cyclic(1))).is_empty());
    for f in [Family::Symmetric(4), Family::Abelian(vec![2, 2, 2, 2]), Family::Ut3(3)] {
        let g = group(f);
        let gens = minimal_generating_set(&g);
        assert_eq!(g.subgroup_closure(&gens).0.len(), g.order());
        assert!(gens.len() as f64 <= (g.order() as f64).log2());
    }
}

#[test]
fn invariant_mismatches() {
    let r = isomorphic(&group(Family::Cyclic(4)), &group(Family::Abelian(vec![2, 2]))).unwrap();
    assert!(!r.isomorphic);
    assert_eq!(r.invariant_mismatch.as_deref(), Some("order profile"));
    let r = isomorphic(&group(Family::Quaternion8), &group(Family::Dihedral(4))).unwrap();
    assert!(!r.isomorphic);
    assert_eq!(r.invariant_mismatch.as_deref(), Some("order profile"));
    let r = isomorphic(&group(Family::Cyclic(6)), &group(Family::Cyclic(8))).unwrap();
    assert_eq!(r.invariant_mismatch.as_deref(), Some("order"));
}

#[test]
fn explicit_isomorphisms() {
    for (a, b) in [
        (Family::Symmetric(3), Family::Dihedral(3)),
        (Family::Abelian(vec![2, 4]), prod(Family::Cyclic(2), Family::Cyclic(4))),
        (Family::Ut3(2), Family::Dihedral(4)),
        (Family::Cyclic(6), Family::Abelian(vec![2, 3])),
        (prod(Family::Cyclic(2), Family::Symmetric(3)), Family::Dihedral(6)),
    ] {
        let (g, h) = (group(a), group(b));
        let r = isomorphic(&g, &h).unwrap();
        assert!(r.isomorphic, "{:?} vs {:?}", g.family_tag(), h.family_tag());
        assert_bijective_hom(&g, &h, r.mapping.as_ref().unwrap());
    }
}

#[test]
fn same_profile_but_different() {
    // Z4 x Z4 and Z2 x Q8 share order and order profile
    let a = group(Family::Abelian(vec![4, 4]));
    let b = group(prod(Family::Cyclic(2), Family::Quaternion8));
    assert_eq!(a.order_profile(), b.order_profile());
    let r = isomorphic(&a, &b).unwrap();
    assert!(!r.isomorphic);
    let c = group(prod(Family::Cyclic(4), Family::Cyclic(4)));
    assert!(isomorphic(&a, &c).unwrap().isomorphic);
}

#[test]
fn order_eight_groups_are_pairwise_distinct() {
    let groups: Vec<FiniteGroup> = [
        Family::Cyclic(8),
        Family::Abelian(vec![2, 4]),
        Family::Abelian(vec![2, 2, 2]),
        Family::Dihedral(4),
        Family::Quaternion8,
    ]
    .into_iter()
    .map(group)
    .collect();
    for (i, g) in groups.iter().enumerate() {
        for (j, h) in groups.iter().enumerate() {
            let r = isomorphic(g, h).unwrap();
            assert_eq!(r.isomorphic, i == j);
            assert_eq!(r.isomorphic, isomorphic(h, g).unwrap().isomorphic);
        }
    }
}

#[test]
fn reflexive_on_larger_groups() {
    for f in [
        Family::Abelian(vec![2, 2, 2, 2, 2, 2]),
        Family::Symmetric(5),
        Family::Ut3(4),
    ] {
        let g = group(f);
        let r = isomorphic(&g, &g).unwrap();
        assert!(r.isomorphic);
        assert_bijective_hom(&g, &g, r.mapping.as_ref().unwrap());
    }
}

#[test]
fn size_cap() {
    let big = group(Family::Cyclic(ISO_ORDER_CAP + 1));
    assert_eq!(
        isomorphic(&big, &big),
        Err(IsoError::SizeCap {
            order: ISO_ORDER_CAP + 1,
            cap: ISO_ORDER_CAP
        })
    );
}
