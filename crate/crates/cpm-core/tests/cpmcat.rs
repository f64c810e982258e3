use cpm_core::cpmcat::random::{lift, random_glued_object, random_rep, skyscraper, two_arc_cover};
use cpm_core::cpmcat::{
    cover_of, direct_sum, euler_pairing, glued_hom, hom_complex_glued, make_glued_object, rep_hom,
    stalk_functor, EdgeSel, StalkSel,
};
use cpm_core::homalg::random::rng;
use cpm_core::homalg::{ChainComplex, ChainMap};
use cpm_core::ribbon::{make_dualizable, make_wheel, DualizableSpec, Side, SpokeRef};
use cpm_core::{CpmError, Field};

fn fp() -> Field {
    Field::Fp(32003)
}

fn two_piece() -> cpm_core::cpmcat::CoverPresentation {
    cover_of(&make_dualizable(&DualizableSpec::new(0, vec![1, 2, 3]).unwrap()).unwrap()).unwrap()
}

#[test]
fn cover_shapes() {
    let w = cover_of(&make_wheel(2, 3).unwrap()).unwrap();
    assert_eq!((w.pieces.len(), w.overlaps.len()), (1, 0));
    let g0 = two_piece();
    assert_eq!((g0.pieces.len(), g0.overlaps.len()), (2, 2));
    let g1 = cover_of(&make_dualizable(&DualizableSpec::new(1, vec![1, 2, 3]).unwrap()).unwrap()).unwrap();
    assert_eq!(g1.pieces.len(), 3);
    let mut fams: Vec<usize> = g1.skeleton.as_ref().unwrap().families.iter().map(|f| f.len()).collect();
    fams.sort_unstable();
    assert_eq!(fams, vec![1, 2, 3]);
}

#[test]
fn stalk_functor_is_closed() {
    let cov = cover_of(&make_wheel(1, 2).unwrap()).unwrap();
    let q = &cov.pieces[0];
    let mut r = rng(11);
    for _ in 0..15 {
        let m = random_rep(q, fp(), &mut r, 3, 2).unwrap();
        let n = random_rep(q, fp(), &mut r, 3, 2).unwrap();
        let rh = rep_hom(&m, &n).unwrap();
        assert!(rh.total.validate().is_empty());
        for a in 0..q.arrows.len() {
            let (_, psi) = stalk_functor(&rh, &m, &n, StalkSel::Arrow(a)).unwrap();
            assert!(psi.is_closed(), "arrow {a}");
        }
        for v in 0..q.nodes.len() {
            let (_, psi) = stalk_functor(&rh, &m, &n, StalkSel::Node(v)).unwrap();
            assert!(psi.is_closed());
        }
    }
}

#[test]
fn generated_objects_are_valid() {
    let cov = two_piece();
    for seed in 0..30 {
        let x = random_glued_object(&cov, fp(), seed).unwrap();
        assert!(x.is_valid(), "seed {seed}: {:?}", x.diagnostics());
        for o in &cov.overlaps {
            let a = x.stalk_at(o.from.0, o.from.1).unwrap().homology();
            let b = x.stalk_at(o.to.0, o.to.1).unwrap().homology();
            assert_eq!(a, b);
        }
    }
}

#[test]
fn glued_hom_squares_to_zero() {
    let cov = two_piece();
    for seed in 0..40 {
        let x = random_glued_object(&cov, fp(), 2 * seed).unwrap();
        let y = random_glued_object(&cov, fp(), 2 * seed + 1).unwrap();
        let h = glued_hom(&x, &y).unwrap();
        assert!(h.t.as_ref().unwrap().is_closed());
        assert!(h.total.validate().is_empty(), "seed {seed}");
    }
}

#[test]
fn single_piece_reduces_to_rep_hom() {
    let cov = cover_of(&make_wheel(1, 1).unwrap()).unwrap();
    let mut r = rng(5);
    for _ in 0..10 {
        let m = random_rep(&cov.pieces[0], fp(), &mut r, 2, 2).unwrap();
        let n = random_rep(&cov.pieces[0], fp(), &mut r, 2, 2).unwrap();
        let direct = rep_hom(&m, &n).unwrap().total;
        let x = lift(&cov, m).unwrap();
        let y = lift(&cov, n).unwrap();
        assert_eq!(hom_complex_glued(&x, &y).unwrap(), direct);
    }
}

#[test]
fn two_arcs_match_the_circle() {
    let cov = cover_of(&make_wheel(1, 2).unwrap()).unwrap();
    let circle = &cov.pieces[0];
    let arcs = two_arc_cover(circle, 2).unwrap();
    let mut r = rng(77);
    for _ in 0..8 {
        let m = random_rep(circle, Field::Q, &mut r, 2, 2).unwrap();
        let n = random_rep(circle, Field::Q, &mut r, 2, 2).unwrap();
        let direct = rep_hom(&m, &n).unwrap().total.homology();
        let glued = hom_complex_glued(&arcs.restrict(&m).unwrap(), &arcs.restrict(&n).unwrap()).unwrap();
        assert_eq!(glued.homology(), direct);
    }
}

#[test]
fn zero_comparison_rejected() {
    let cov = two_piece();
    let x = (0..50)
        .map(|s| random_glued_object(&cov, fp(), s).unwrap())
        .find(|x| x.u.iter().any(|u| !u.source().homology().is_zero()))
        .expect("an object with a non-acyclic shared stalk");
    let u: Vec<ChainMap> = x.u.iter().map(|u| ChainMap::zero(u.source(), u.target(), 0)).collect();
    match make_glued_object(&cov, x.reps.clone(), u) {
        Err(CpmError::NotQuasiIso(msg)) => assert!(msg.contains("comparison not invertible in homotopy category")),
        other => panic!("expected rejection, got {other:?}"),
    }
}

#[test]
fn skyscraper_endomorphisms() {
    let cov = cover_of(&make_wheel(1, 1).unwrap()).unwrap();
    let x = lift(&cov, skyscraper(&cov.pieces[0], Field::Q, 0, 0).unwrap()).unwrap();
    let h = hom_complex_glued(&x, &x).unwrap().homology();
    assert_eq!(h.get(0), 1);
    assert_eq!(euler_pairing(&x, &x).unwrap(), 1);
}

#[test]
fn identity_object_has_endomorphisms() {
    let cov = cover_of(&make_wheel(1, 1).unwrap()).unwrap();
    let q = &cov.pieces[0];
    let k = ChainComplex::concentrated(Field::Q, 0, 1);
    let nodes = vec![k.clone(); q.nodes.len()];
    let arrows = q.arrows.iter().map(|_| ChainMap::identity(&k)).collect();
    let x = lift(&cov, cpm_core::quiverize::QuiverRepObject::new(q.clone(), nodes, arrows).unwrap()).unwrap();
    assert!(hom_complex_glued(&x, &x).unwrap().homology().get(0) >= 1);
    for e in cov.edges().unwrap() {
        if let EdgeSel::Spoke(_) = e {
            assert!(x.stalk(e).unwrap().is_acyclic());
        }
    }
}

#[test]
fn euler_bilinear_and_shift_invariant() {
    let cov = two_piece();
    for seed in 0..12 {
        let x = random_glued_object(&cov, fp(), 3 * seed).unwrap();
        let y = random_glued_object(&cov, fp(), 3 * seed + 1).unwrap();
        let z = random_glued_object(&cov, fp(), 3 * seed + 2).unwrap();
        let yz = direct_sum(&[y.clone(), z.clone()]).unwrap();
        assert_eq!(
            euler_pairing(&x, &yz).unwrap(),
            euler_pairing(&x, &y).unwrap() + euler_pairing(&x, &z).unwrap()
        );
        let (x1, y1) = (x.shift(1).unwrap(), y.shift(1).unwrap());
        assert_eq!(euler_pairing(&x1, &y1).unwrap(), euler_pairing(&x, &y).unwrap());
        let h0 = hom_complex_glued(&x, &y).unwrap().homology();
        let h1 = hom_complex_glued(&x1, &y1).unwrap().homology();
        assert_eq!(h0, h1);
    }
}

#[test]
fn wheel_stalks_follow_the_table() {
    // Λ_{1,1}: one up and one down spoke from V1 into V2
    let cov = cover_of(&make_wheel(1, 1).unwrap()).unwrap();
    let q = &cov.pieces[0];
    let mut r = rng(3);
    let m = random_rep(q, fp(), &mut r, 2, 2).unwrap();
    let x = lift(&cov, m.clone()).unwrap();
    let sk = cov.skeleton.as_ref().unwrap();
    for f in sk.feet() {
        let (p, sel) = cov.resolve(EdgeSel::Cell(f.id)).unwrap();
        assert_eq!(p, 0);
        let StalkSel::Node(v) = sel else { panic!() };
        assert_eq!(x.stalk(EdgeSel::Cell(f.id)).unwrap(), m.nodes[v]);
        for side in [Side::Up, Side::Down] {
            if f.has(side) {
                let s = x.stalk(EdgeSel::Spoke(SpokeRef { foot: f.id, side })).unwrap();
                let a = q.arrows.iter().position(|a| a.side == side).unwrap();
                assert_eq!(s.homology(), m.cone_at(a).unwrap().homology());
            }
        }
    }
}

#[test]
fn json_roundtrip() {
    let cov = two_piece();
    let x = random_glued_object(&cov, Field::Q, 9).unwrap();
    let y = cpm_core::cpmcat::GluedObject::from_json(&x.to_json().unwrap()).unwrap();
    assert_eq!(x, y);
}
