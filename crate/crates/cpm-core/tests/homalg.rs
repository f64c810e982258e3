use cpm_core::homalg::random::{random_closed_map, random_complex};
use cpm_core::homalg::*;
use cpm_core::matrix::Matrix;
use cpm_core::Field;
use proptest::prelude::*;

const P: Field = Field::Fp(32003);

fn pair(field: Field, seed: u64) -> (ChainMap, ChainMap) {
    let v = random_complex(field, seed * 3, 3, 3);
    let w = random_complex(field, seed * 3 + 1, 3, 3);
    let x = random_complex(field, seed * 3 + 2, 3, 3);
    (
        random_closed_map(seed, &v, &w),
        random_closed_map(seed + 77, &w, &x),
    )
}

#[test]
fn octahedral_witness_fp() {
    for s in 0..200 {
        let (f, g) = pair(P, s);
        let (p, wit) = octahedral_comparison(&f, &g).unwrap();
        assert!(wit.is_closed(), "seed {s}");
        assert!(is_quasi_iso(&wit).unwrap(), "seed {s}");
        assert_eq!(cone(&p).unwrap().homology(), cone(&f).unwrap().homology());
    }
}

#[test]
fn octahedral_witness_q() {
    for s in 0..50 {
        let (f, g) = pair(Field::Q, s);
        let (p, wit) = octahedral_comparison(&f, &g).unwrap();
        assert!(p.is_closed() && wit.is_closed(), "seed {s}");
        assert!(is_quasi_iso(&wit).unwrap(), "seed {s}");
    }
}

#[test]
fn connecting_triangle_maps() {
    for s in 0..60 {
        let (f, g) = pair(P, s);
        let (k, iota, pi) = octahedral_connecting(&f, &g).unwrap();
        assert!(k.is_closed());
        assert!(iota.is_closed() && pi.is_closed(), "seed {s}");
        assert!(is_quasi_iso(&iota).unwrap() && is_quasi_iso(&pi).unwrap());
        let gf = g.compose(&f).unwrap();
        assert_eq!(pi.compose(&iota).unwrap(), ChainMap::identity(&cone(&gf).unwrap()));
    }
}

#[test]
fn fiber_lemma() {
    for s in 0..40 {
        let (h, _) = pair(P, s);
        let (_, pi, theta) = fiber_projection(&h).unwrap();
        assert!(pi.is_closed());
        assert!(theta.is_closed(), "seed {s}");
        assert!(is_quasi_iso(&theta).unwrap());
    }
}

#[test]
fn cone_functoriality_maps_closed() {
    for s in 0..40 {
        let (u, h) = pair(P, s);
        assert!(cone_precompose(&u, &h).unwrap().is_closed());
        assert!(cone_postcompose(&u, &h).unwrap().is_closed());
    }
}

#[test]
fn quasi_inverse_roundtrip() {
    for s in 0..30 {
        let c = random_complex(P, s, 3, 3);
        let (i, p) = homology_splitting(&c);
        assert!(is_quasi_iso(&i).unwrap() && is_quasi_iso(&p).unwrap());
        // a quasi-iso that is not an isomorphism: the inclusion of homology
        let q = quasi_inverse(&i).unwrap();
        assert_eq!(q.compose(&i).unwrap(), ChainMap::identity(i.source()));
        assert!(is_quasi_iso(&q).unwrap());
    }
}

#[test]
fn two_term_example() {
    let f = Field::Q;
    let c = ChainComplex::new(
        f,
        [(0, 1), (1, 1)].into(),
        [(0, Matrix::from_i64(f, 1, 1, &[2]))].into(),
    )
    .unwrap();
    assert!(c.is_acyclic());
    let c = ChainComplex::new(
        Field::Fp(2),
        [(0, 1), (1, 1)].into(),
        [(0, Matrix::from_i64(Field::Fp(2), 1, 1, &[2]))].into(),
    )
    .unwrap();
    assert_eq!(c.homology().get(0), 1);
    assert_eq!(c.homology().get(1), 1);
}

#[test]
fn hom_complex_closed_maps_are_cycles() {
    for s in 0..20 {
        let c = random_complex(P, s, 3, 2);
        let d = random_complex(P, s + 500, 3, 2);
        let lay = HomLayout::new(&c, &d).unwrap();
        let h = lay.complex();
        assert!(h.validate().is_empty());
        let f = random_closed_map(s, &c, &d);
        let v = lay.vectorize(&f);
        assert!(h.d(0).mul(&v).is_zero());
        assert_eq!(lay.unvectorize(0, &v), f);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn euler_multiplicative(a in 0u64..10_000, b in 0u64..10_000) {
        let c = random_complex(P, a, 3, 3);
        let d = random_complex(P, b, 3, 3);
        let h = hom_complex(&c, &d).unwrap();
        let expect: i64 = c
            .dims()
            .iter()
            .flat_map(|(m, x)| d.dims().iter().map(move |(n, y)| {
                let s = if (n - m).rem_euclid(2) == 0 { 1 } else { -1 };
                s * (*x * *y) as i64
            }))
            .sum();
        prop_assert_eq!(h.euler(), expect);
        prop_assert_eq!(h.homology().euler(), c.homology().euler() * d.homology().euler());
    }

    #[test]
    fn shift_and_cone_laws(a in 0u64..10_000, k in -3i32..3) {
        let c = random_complex(P, a, 3, 3);
        let s = c.shift(k);
        prop_assert!(s.validate().is_empty());
        prop_assert_eq!(s.homology(), c.homology().shifted(k));
        prop_assert_eq!(s.shift(-k), c.clone());
        let id = ChainMap::identity(&c);
        prop_assert!(cone(&id).unwrap().is_acyclic());
    }

    #[test]
    fn cone_euler_additive(a in 0u64..10_000) {
        let (f, _) = pair(P, a);
        let cf = cone(&f).unwrap();
        prop_assert!(cf.validate().is_empty());
        prop_assert_eq!(cf.euler(), f.target().euler() - f.source().euler());
    }
}
