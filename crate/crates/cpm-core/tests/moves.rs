use cpm_core::cpmcat::random::random_glued_object;
use cpm_core::cpmcat::{cover_of, euler_pairing, CoverPresentation, GluedObject};
use cpm_core::homalg::random::{random_closed_map_with, random_complex_with, rng};
use cpm_core::homalg::{cone, ChainComplex, ChainMap};
use cpm_core::moves::*;
use cpm_core::ribbon::{dualizable_skeleton, dualizable_weights, validate_chordal, DualizableSpec, Skeleton};
use cpm_core::Field;
use proptest::prelude::*;

fn fp() -> Field {
    Field::Fp(32003)
}

fn setup(genus: u8, w: &[usize], n: u64) -> (Skeleton, Vec<GluedObject>) {
    let sk = dualizable_skeleton(&DualizableSpec::new(genus, w.to_vec()).unwrap()).unwrap();
    let cov = cover_of(&sk.to_graph().unwrap()).unwrap();
    let xs = (0..n).map(|s| random_glued_object(&cov, fp(), 100 + s).unwrap()).collect();
    (sk, xs)
}

fn chi(c: &ChainComplex) -> i64 {
    c.dims().iter().map(|(n, d)| if n % 2 == 0 { *d as i64 } else { -(*d as i64) }).sum()
}

fn pair(f: Field, seed: u64) -> (ChainMap, ChainMap) {
    let mut r = rng(seed);
    let v = random_complex_with(f, &mut r, 3, 3);
    let w = random_complex_with(f, &mut r, 3, 3);
    let x = random_complex_with(f, &mut r, 3, 3);
    let a = random_closed_map_with(&v, &w, &mut r);
    let b = random_closed_map_with(&w, &x, &mut r);
    (a, b)
}

#[test]
fn genus_one_reaches_unit_weights() {
    let (sk, xs) = setup(1, &[1, 2, 3], 5);
    let (end, ys, tr) = reduce_to_unit_weights(&sk, &xs).unwrap();
    assert_eq!(dualizable_weights(&end).unwrap().weights, vec![1; 6]);
    assert_eq!(ys.len(), 5);
    assert!(tr.steps.iter().zip(tr.steps.iter().skip(1)).all(|(a, b)| b.measure < a.measure));
    let rep = verify_transport(&tr);
    assert!(rep.passed(), "{:?}", rep.first_failure());
    for i in 0..5 {
        for j in 0..5 {
            assert_eq!(euler_pairing(&xs[i], &xs[j]).unwrap(), euler_pairing(&ys[i], &ys[j]).unwrap());
        }
    }
}

#[test]
fn genus_zero_endpoint() {
    let (sk, xs) = setup(0, &[1, 2, 3], 3);
    let (end, _, tr) = reduce_to_unit_weights(&sk, &xs).unwrap();
    let mut w = dualizable_weights(&end).unwrap().weights;
    w.sort();
    assert_eq!(w, vec![1, 1, 1, 3]);
    assert!(verify_transport(&tr).passed());
}

#[test]
fn unit_weights_need_no_steps() {
    let (sk, xs) = setup(1, &[1, 1, 1], 2);
    let (end, ys, tr) = reduce_to_unit_weights(&sk, &xs).unwrap();
    assert!(tr.steps.is_empty());
    assert_eq!(end, sk);
    assert_eq!(ys, xs);
    assert!(verify_transport(&tr).passed());
}

#[test]
fn zeroed_arrows_are_caught() {
    let (sk, xs) = setup(1, &[1, 2, 3], 4);
    let (_, _, tr) = reduce_to_unit_weights(&sk, &xs).unwrap();
    let mut r = rng(77);
    let mut hits = 0;
    for trial in 0..10 {
        let mut bad = tr.clone();
        let step = rand::Rng::gen_range(&mut r, 0..tr.steps.len());
        let obj = rand::Rng::gen_range(&mut r, 0..4);
        assert!(inject_zero_arrow(&mut bad, step, obj, trial));
        let rep = verify_transport(&bad);
        if !rep.passed() && rep.first_failure() == Some(step) {
            hits += 1;
        }
    }
    assert_eq!(hits, 10);
}

#[test]
fn trace_json_round_trip() {
    for g in [0, 1] {
        let (sk, xs) = setup(g, &[1, 2, 3], 3);
        let (_, _, tr) = reduce_to_unit_weights(&sk, &xs).unwrap();
        let text = serde_json::to_string(&tr.to_json().unwrap()).unwrap();
        let back = RewriteTrace::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, tr);
        assert!(verify_transport(&back).passed());
    }
}

#[test]
fn tampered_hash_fails_at_its_step() {
    let (sk, xs) = setup(1, &[1, 2, 3], 2);
    let (_, _, tr) = reduce_to_unit_weights(&sk, &xs).unwrap();
    let mut v = tr.to_json().unwrap();
    v["steps"][1]["after"] = serde_json::Value::String("00".repeat(32));
    let bad = RewriteTrace::from_json(&v).unwrap();
    assert_eq!(verify_transport(&bad).first_failure(), Some(1));
}

#[test]
fn em1_right_graph_is_chordal() {
    assert!(validate_chordal(&em1_right_graph().unwrap()).is_empty());
    let cov: CoverPresentation = em1_right_cover().unwrap();
    assert_eq!(cov.pieces.len(), 2);
}

#[test]
fn em1_shifts_euler_by_known_term() {
    let objs: Vec<_> = (0..4u64)
        .map(|s| {
            let (f, g) = pair(fp(), s);
            let l = chain_object(&[f.clone(), g.clone()]).unwrap();
            let r = em1_object(&f, &g).unwrap();
            (l, r, chi(f.source()), chi(f.target()), chi(g.target()))
        })
        .collect();
    for a in &objs {
        for b in &objs {
            let dl = euler_pairing(&a.0, &b.0).unwrap();
            let dr = euler_pairing(&a.1, &b.1).unwrap();
            assert_eq!(dr - dl, b.2 * (a.3 - a.4));
        }
    }
}

#[test]
fn em1_site_checks() {
    let (f, g) = pair(fp(), 1);
    let x = chain_object(&[f, g]).unwrap();
    let bad = MoveSite { kind: MoveKind::Em1Prime, downs: vec![0, 1], ups: vec![], inserted: vec![] };
    assert!(apply_em1(&chain_skeleton(2), &bad, &[x.clone()]).is_err());
    let short = MoveSite { kind: MoveKind::Em1, downs: vec![0], ups: vec![], inserted: vec![] };
    assert!(apply_em1(&chain_skeleton(2), &short, &[x.clone()]).is_err());
    let ok = MoveSite { kind: MoveKind::Em1, downs: vec![0, 1], ups: vec![], inserted: vec![] };
    let (gr, ys) = apply_em1(&chain_skeleton(2), &ok, &[x]).unwrap();
    assert!(validate_chordal(&gr).is_empty());
    assert_eq!(ys.len(), 1);
}

#[test]
fn em1_prime_on_two_spokes_is_em1() {
    for s in 0..5 {
        let (f, g) = pair(fp(), s);
        let p = em1_prime_objects(&[f.clone(), g.clone()]).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p[0], em1_object(&f, &g).unwrap());
    }
}

#[test]
fn em1_prime_steps_compose() {
    let mut r = rng(12);
    let cs: Vec<_> = (0..4).map(|_| random_complex_with(fp(), &mut r, 3, 2)).collect();
    let arrows: Vec<_> = cs.windows(2).map(|w| random_closed_map_with(&w[0], &w[1], &mut r)).collect();
    let site = MoveSite { kind: MoveKind::Em1Prime, downs: vec![0, 1, 2], ups: vec![], inserted: vec![] };
    let x = chain_object(&arrows).unwrap();
    let (gs, ys) = apply_em1_prime(&chain_skeleton(3), &site, &[x]).unwrap();
    assert_eq!(gs.len(), 2);
    let head = arrows[1].compose(&arrows[0]).unwrap();
    assert_eq!(ys[0][1], em1_object(&head, &arrows[2]).unwrap());
}

#[test]
fn site_json_uses_move_names() {
    let s = MoveSite { kind: MoveKind::Em1Inv, downs: vec![3], ups: vec![4], inserted: vec![(7, 8)] };
    let v = serde_json::to_value(&s).unwrap();
    assert_eq!(v["kind"], "EM1_INV");
    assert_eq!(serde_json::from_value::<MoveSite>(v).unwrap(), s);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn em1_inverse_recovers_chain(seed in 0u64..10_000, q in prop::sample::select(vec![Field::Fp(101), Field::Q])) {
        let (f, g) = pair(q, seed);
        let r = em1_object(&f, &g).unwrap();
        let site = MoveSite { kind: MoveKind::Em1Inv, downs: vec![0, 1], ups: vec![], inserted: vec![] };
        let (sk, back) = apply_em1_inverse(&site, &[r.clone()]).unwrap();
        prop_assert_eq!(sk, chain_skeleton(2));
        let (f2, g2) = em1_inverse_object(&r).unwrap();
        prop_assert_eq!(&f2, &f);
        prop_assert_eq!(g2.target().homology(), g.target().homology());
        prop_assert_eq!(cone(&g2.compose(&f2).unwrap()).unwrap().homology(), cone(&g.compose(&f).unwrap()).unwrap().homology());
        let orig = chain_object(&[f, g]).unwrap();
        prop_assert_eq!(euler_pairing(&back[0], &back[0]).unwrap(), euler_pairing(&orig, &orig).unwrap());
    }
}
