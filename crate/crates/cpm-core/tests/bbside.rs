use cpm_core::bbside::*;
use cpm_core::cpmcat::random::random_rep;
use cpm_core::homalg::random::rng;
use cpm_core::quiverize::{quiver_of, Base, Fishbone};
use cpm_core::ribbon::{dualizable_skeleton, make_dualizable, make_wheel, DualizableSpec};
use cpm_core::cpmcat::CoverPresentation;
use cpm_core::Field;

fn compositions(total: usize) -> Vec<Vec<usize>> {
    (0..1u32 << (total - 1))
        .map(|mask| {
            let mut w = vec![];
            let mut cur = 1;
            for b in 0..total - 1 {
                if mask >> b & 1 == 1 {
                    w.push(cur);
                    cur = 1;
                } else {
                    cur += 1;
                }
            }
            w.push(cur);
            w
        })
        .collect()
}

#[test]
fn pieces_match_wheel_quivers() {
    for a1 in 1..=5 {
        for a2 in 1..=5 {
            let p = perf_bb(a1, a2).unwrap();
            let flags: Vec<(bool, bool)> = (0..a1).map(|_| (true, false)).chain((0..a2).map(|_| (false, true))).collect();
            let q = quiver_of(&Fishbone::evenly(Base::Circle, &flags).unwrap()).unwrap();
            assert_eq!(p.quiver.shape(), q.shape());
            assert_eq!(p.quiver.nodes.len(), a1 + a2);
            assert_eq!(pattern(&p).chars().filter(|c| *c == '←').count(), a1);
            assert!(make_wheel(a1, a2).is_ok());
        }
    }
    assert!(perf_bb(0, 2).is_err());
}

#[test]
fn small_pieces() {
    let p = perf_bb(1, 1).unwrap();
    assert_eq!(p.quiver.shape(), (2, vec![(0, 1), (0, 1)]));
    let p = perf_bb(1, 2).unwrap();
    assert_eq!(p.quiver.nodes.len(), 3);
    assert_eq!(pattern(&p), "←→→");
}

#[test]
fn stalk_functors() {
    let pres = perf_tcnc(&TcncCurve::new(1, vec![2, 3]).unwrap()).unwrap();
    let mut arrows = vec![];
    for chi in 0..3 {
        arrows.push(stalk_functor_s(&pres, 0, 2, chi).unwrap().arrow);
    }
    arrows.sort();
    arrows.dedup();
    assert_eq!(arrows.len(), 3);
    assert!(stalk_functor_s(&pres, 0, 2, 3).is_err());
    assert!(stalk_functor_s(&pres, 0, 3, 0).is_err());
    assert!(stalk_functor_s(&pres, 5, 1, 0).is_err());

    // S¹_0 on •⇉• is the cone of its first arrow
    let p = perf_tcnc(&TcncCurve::new(0, vec![1, 1]).unwrap()).unwrap();
    let s = stalk_functor_s(&p, 0, 1, 0).unwrap();
    let m = random_rep(&p.pieces[0].quiver, Field::Fp(101), &mut rng(3), 2, 2).unwrap();
    assert_eq!(s.eval(&m).unwrap(), m.cone_at(0).unwrap());
}

#[test]
fn relabeling_rotates_cyclically() {
    let p = perf_bb(3, 4).unwrap();
    let q = p.relabel(1, 2);
    for (a, b) in p.labels.iter().zip(&q.labels) {
        let n = if a.point == 1 { 3 } else { 4 };
        let r = if a.point == 1 { 1 } else { 2 };
        assert_eq!(b.chi, (a.chi + r) % n);
    }
}

#[test]
fn tcnc_presentations() {
    let p = perf_tcnc(&TcncCurve::new(0, vec![1, 2, 3]).unwrap()).unwrap();
    assert_eq!(p.pieces.len(), 2);
    assert_eq!((p.pieces[0].curve.a1, p.pieces[0].curve.a2), (1, 2));
    assert_eq!((p.pieces[1].curve.a1, p.pieces[1].curve.a2), (2, 3));
    assert_eq!(p.gluing.len(), 2);
    let p = perf_tcnc(&TcncCurve::new(1, vec![1, 2, 3]).unwrap()).unwrap();
    assert_eq!(p.pieces.len(), 3);
    assert_eq!(p.gluing.len(), 6);
    assert!(p.gluing.iter().all(|(a, b)| b.piece == (a.piece + 1) % 3));
    let p = perf_tcnc(&TcncCurve::new(0, vec![2, 5]).unwrap()).unwrap();
    assert_eq!(p.pieces.len(), 1);
    assert!(p.gluing.is_empty());
    let v = p.to_json();
    assert_eq!(v["pieces"][0]["shape"], "cycle");
    assert!(TcncCurve::new(0, vec![3]).is_err());
    assert!(TcncCurve::new(2, vec![1, 1]).is_err());
}

#[test]
fn hms_all_small_weights() {
    for genus in [0u8, 1] {
        for total in 1..=8 {
            for w in compositions(total) {
                let Ok(c) = TcncCurve::new(genus, w.clone()) else { continue };
                let r = hms_check(&c, 1, total as u64).unwrap();
                assert!(r.passed(), "{genus} {w:?}: {:?}", r.messages);
                assert_eq!(r.symmetry.as_deref(), Some("identity"));
            }
        }
    }
}

#[test]
fn hms_symmetries() {
    let g0 = make_dualizable(&DualizableSpec::new(0, vec![1, 2, 3]).unwrap()).unwrap();
    let r = hms_compare(&TcncCurve::new(0, vec![3, 2, 1]).unwrap(), &g0, 2, 1).unwrap();
    assert!(r.passed(), "{:?}", r.messages);
    assert_eq!(r.symmetry.as_deref(), Some("reversal"));
    let g1 = make_dualizable(&DualizableSpec::new(1, vec![1, 2, 3]).unwrap()).unwrap();
    for w in [vec![2, 3, 1], vec![3, 1, 2], vec![3, 2, 1]] {
        let r = hms_compare(&TcncCurve::new(1, w.clone()).unwrap(), &g1, 2, 1).unwrap();
        assert!(r.passed(), "{w:?}: {:?}", r.messages);
    }
    let r = hms_compare(&TcncCurve::new(0, vec![1, 3, 2]).unwrap(), &g0, 1, 1).unwrap();
    assert!(!r.passed());
}

#[test]
fn braided_gluing_is_rejected() {
    let mut sk = dualizable_skeleton(&DualizableSpec::new(0, vec![1, 3, 1]).unwrap()).unwrap();
    let cov = CoverPresentation::from_skeleton(&sk).unwrap();
    let c = TcncCurve::new(0, vec![1, 3, 1]).unwrap();
    assert!(hms_compare_cover(&c, &cov, 1, 1).unwrap().passed());
    let mut bad = cov.clone();
    let t = bad.overlaps[0].to;
    bad.overlaps[0].to = bad.overlaps[1].to;
    bad.overlaps[1].to = t;
    let r = hms_compare_cover(&c, &bad, 1, 1).unwrap();
    assert!(!r.passed());
    assert!(r.messages.iter().any(|m| m.contains("cyclic rotation")), "{:?}", r.messages);
    sk.families[0].ups.swap(0, 1);
    assert!(cpm_core::cpmcat::cover_of(&sk.to_graph().unwrap()).is_err());
}
