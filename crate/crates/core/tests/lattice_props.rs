mod common;

use common::{lab, objects};
use diskgarside::disk::default_fan;
use diskgarside::lattice::{find_isomorphism, triangles};
use diskgarside::oracle::{classical_tamari, weak_order};
use diskgarside::{interval, tamari, verify_lattice, Engine, Error, Word};

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

#[test]
fn bigon_intervals_are_weak_orders() {
    let e = Engine::default();
    for n in 2..=4 {
        let x = objects(&e, &vec![2; n])[0];
        let l = interval(&e, x, 10_000, 2).unwrap();
        assert_eq!(l.len(), factorial(n));
        let (_, reference) = weak_order(n);
        assert!(find_isomorphism(&l.poset(), &reference).is_some(), "n = {n}");
        assert!(verify_lattice(&e, &l).unwrap().passed());
    }
}

#[test]
fn triangle_intervals_have_catalan_size() {
    let e = Engine::default();
    for (k, want) in [(2, 2), (3, 5), (4, 14)] {
        for x in objects(&e, &vec![3; k]) {
            let l = interval(&e, x, 10_000, 1).unwrap();
            assert_eq!(l.len(), want);
            assert!(verify_lattice(&e, &l).unwrap().passed());
        }
    }
}

#[test]
fn order_is_divisibility() {
    let e = Engine::default();
    for &lbl in &[&[2, 2, 2][..], &[3, 3, 3, 3], &[2, 3, 3], &[3, 4, 3]] {
        for x in objects(&e, lbl) {
            let l = interval(&e, x, 10_000, 1).unwrap();
            let p = l.poset();
            assert_eq!(l.elements[l.bottom], Word::empty(x));
            assert!(e.equal_positive(&l.elements[l.top], &e.delta(x).unwrap()).unwrap());
            for i in 0..l.len() {
                assert!(e.is_simple(&l.elements[i]).unwrap());
                for j in 0..l.len() {
                    let divides = e.left_divides(&l.elements[i], &l.elements[j]).unwrap().is_some();
                    assert_eq!(p.le(i, j), divides);
                }
            }
            for &(i, a, j) in &l.covers {
                let step = e.concat(&l.elements[i], &Word::new(e.target(&l.elements[i]).unwrap(), vec![a])).unwrap();
                assert!(e.equal_positive(&step, &l.elements[j]).unwrap());
            }
        }
    }
}

#[test]
fn single_region_interval_is_a_point() {
    let e = Engine::default();
    let x = objects(&e, &[5])[0];
    let l = interval(&e, x, 10, 1).unwrap();
    assert_eq!(l.len(), 1);
    assert!(l.covers.is_empty());
    assert!(verify_lattice(&e, &l).unwrap().passed());
}

#[test]
fn interval_cap_is_reported() {
    let e = Engine::default();
    let x = objects(&e, &[2, 2, 2, 2])[0];
    assert!(matches!(interval(&e, x, 5, 1), Err(Error::NodeCap(_))));
}

#[test]
fn fan_orders_are_tamari() {
    let e = Engine::default();
    for k in 2..=4 {
        let base = default_fan(&triangles(k), 0).unwrap();
        let t = tamari(&e, &base, 10_000, 2).unwrap();
        let (_, reference) = classical_tamari(k);
        assert!(find_isomorphism(&t.poset(), &reference).is_some(), "k = {k}");
        assert_eq!(t.objects[0], e.pres().intern(&base));
    }
}

#[test]
fn non_fan_base_differs_from_tamari() {
    let e = Engine::default();
    // Inner triangle on every second vertex of the hexagon.
    let base = diskgarside::DiskObject::from_chords(&triangles(4), &[(0, 2), (2, 4), (0, 4)]).unwrap();
    let t = tamari(&e, &base, 10_000, 1).unwrap();
    let (_, reference) = classical_tamari(4);
    assert_eq!(t.objects.len(), reference.len());
    assert!(find_isomorphism(&t.poset(), &reference).is_none());
}

#[test]
fn tamari_needs_triangles() {
    let e = Engine::default();
    let base = default_fan(&lab(&[3, 4]), 0).unwrap();
    assert!(matches!(tamari(&e, &base, 100, 1), Err(Error::NotAllThrees)));
}

#[test]
fn exports_have_the_right_shape() {
    let e = Engine::default();
    let x = objects(&e, &[2, 2, 2])[0];
    let l = interval(&e, x, 100, 1).unwrap();
    let dot = l.to_dot(&e).unwrap();
    assert_eq!(dot.matches("[label=\"").count() - dot.matches("->").count(), 6);
    assert_eq!(dot.matches("->").count(), 6);
    let json = l.to_json(&e).unwrap();
    assert_eq!(json["elements"].as_array().unwrap().len(), 6);

    let base = default_fan(&triangles(3), 0).unwrap();
    let t = tamari(&e, &base, 100, 1).unwrap();
    let dot = t.to_dot(&e);
    assert_eq!(dot.matches("->").count(), 5);
    assert_eq!(dot.matches("[label=").count(), 5);
    assert_eq!(t.to_json(&e)["covers"].as_array().unwrap().len(), 5);
}

#[test]
fn reference_orders_are_lattices() {
    for n in 1..=4 {
        assert!(weak_order(n).1.verify_lattice().passed());
    }
    for k in 1..=5 {
        assert!(classical_tamari(k).1.verify_lattice().passed());
    }
}
