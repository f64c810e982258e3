use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::Rng;

use cpm_core::bbside::{hms_check, hms_compare, TcncCurve};
use cpm_core::cpmcat::random::{lift, random_glued_object, random_rep, two_arc_cover};
use cpm_core::cpmcat::{cover_of, glued_hom, hom_complex_glued, rep_hom};
use cpm_core::homalg::random::{random_closed_map, random_complex, rng};
use cpm_core::homalg::{cone, is_quasi_iso, ChainMap};
use cpm_core::moves::{inject_zero_arrow, reduce_to_unit_weights, verify_transport, RewriteTrace};
use cpm_core::quiverize::{quiver_of, restriction_table, Fishbone, LocalObject, QuiverRepObject, Selector};
use cpm_core::ribbon::{dualizable_skeleton, dualizable_weights, faces, make_dualizable, make_wheel, DualizableSpec, Side};
use cpm_core::Field;

type Check = Result<(), String>;

const P: Field = Field::Fp(32003);

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn fishbone(name: &str) -> Result<Fishbone, String> {
    let text = std::fs::read_to_string(fixture(name)).map_err(|e| e.to_string())?;
    let v = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    Fishbone::from_json(&v).map_err(|e| e.to_string())
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<E: std::fmt::Debug>(x: E) -> String {
    format!("{x:?}")
}

fn quiver_dictionary() -> Check {
    let a5 = quiver_of(&fishbone("botplustop.json")?).map_err(e)?;
    ensure(a5.pattern() == "←←→→", || format!("pattern {}", a5.pattern()))?;
    ensure(a5.shape() == (5, vec![(1, 0), (2, 1), (2, 3), (3, 4)]), || format!("{:?}", a5.shape()))?;
    let kr = quiver_of(&fishbone("double_foot_circle.json")?).map_err(e)?;
    ensure(kr.shape() == (2, vec![(0, 1), (0, 1)]), || format!("{:?}", kr.shape()))?;
    let out = Command::new(env!("CARGO_BIN_EXE_cpm"))
        .args(["quiverize", fixture("botplustop.json").to_str().unwrap()])
        .output()
        .map_err(e)?;
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(e)?;
    ensure(v["pattern"] == "←←→→", || format!("cli pattern {}", v["pattern"]))
}

fn restriction_tables() -> Check {
    let f = fishbone("double_foot_circle.json")?;
    let q = quiver_of(&f).map_err(e)?;
    let up = q.arrow_of(0, Side::Up).ok_or("no up arrow")?;
    let down = q.arrow_of(0, Side::Down).ok_or("no down arrow")?;
    let mut r = rng(2024);
    for i in 0..50 {
        let m: QuiverRepObject = random_rep(&q, P, &mut r, 3, 3).map_err(e)?;
        let prof = |c: &cpm_core::homalg::ChainComplex| c.homology().0;
        let LocalObject::Complex(cell) = restriction_table(&f, &m, Selector::Cell(1)).map_err(e)? else {
            return Err("cell gave a diagram".into());
        };
        ensure(prof(&cell) == prof(&m.nodes[1]), || format!("object {i}: open arc is not V2"))?;
        for (side, a) in [(Side::Up, up), (Side::Down, down)] {
            let LocalObject::Complex(s) = restriction_table(&f, &m, Selector::Spoke { foot: 0, side }).map_err(e)? else {
                return Err("spoke gave a diagram".into());
            };
            let want = cone(&m.arrows[a]).map_err(e)?;
            ensure(prof(&s) == prof(&want), || format!("object {i}: {side:?} spoke is not the cone"))?;
        }
        let LocalObject::Diagram { nodes, arrows } = restriction_table(&f, &m, Selector::Foot(0)).map_err(e)? else {
            return Err("foot gave a complex".into());
        };
        ensure(nodes.len() == 3 && arrows.len() == 2, || format!("object {i}: diagram shape"))?;
        let profs: Vec<_> = nodes.iter().map(prof).collect();
        ensure(profs == vec![prof(&m.nodes[1]), prof(&m.nodes[0]), prof(&m.nodes[1])], || format!("object {i}: diagram nodes"))?;
        for (s, t, g) in &arrows {
            ensure(*s == 1 && *t != 1 && (g == &m.arrows[up] || g == &m.arrows[down]), || format!("object {i}: diagram arrows"))?;
        }
    }
    Ok(())
}

fn pair(field: Field, seed: u64) -> (ChainMap, ChainMap) {
    let v = random_complex(field, seed * 3, 3, 3);
    let w = random_complex(field, seed * 3 + 1, 3, 3);
    let x = random_complex(field, seed * 3 + 2, 3, 3);
    (random_closed_map(seed, &v, &w), random_closed_map(seed + 77, &w, &x))
}

fn octahedral_suite() -> Check {
    for (field, n) in [(P, 200u64), (Field::Q, 50)] {
        for s in 0..n {
            let (f, g) = pair(field, s);
            let (p, wit) = cpm_core::homalg::octahedral_comparison(&f, &g).map_err(e)?;
            ensure(is_quasi_iso(&wit).map_err(e)?, || format!("{field:?} seed {s}: witness not a quasi-iso"))?;
            let (a, b) = (cone(&p).map_err(e)?.homology(), cone(&f).map_err(e)?.homology());
            ensure(a == b, || format!("{field:?} seed {s}: cone homology differs"))?;
        }
    }
    Ok(())
}

fn glued_hom_complexes() -> Check {
    let cov = cover_of(&make_dualizable(&DualizableSpec::new(0, vec![1, 2, 3]).map_err(e)?).map_err(e)?).map_err(e)?;
    ensure(cov.pieces.len() == 2, || "not a 2-piece cover".into())?;
    for s in 0..100u64 {
        let x = random_glued_object(&cov, P, 2 * s).map_err(e)?;
        let y = random_glued_object(&cov, P, 2 * s + 1).map_err(e)?;
        let h = glued_hom(&x, &y).map_err(e)?;
        let closed = h.t.as_ref().map_or(true, |t| t.is_closed());
        ensure(closed && h.total.validate().is_empty(), || format!("seed {s}: d² ≠ 0"))?;
    }
    let one = cover_of(&make_wheel(1, 1).map_err(e)?).map_err(e)?;
    let mut r = rng(5);
    for i in 0..10 {
        let m = random_rep(&one.pieces[0], P, &mut r, 2, 2).map_err(e)?;
        let n = random_rep(&one.pieces[0], P, &mut r, 2, 2).map_err(e)?;
        let direct = rep_hom(&m, &n).map_err(e)?.total;
        let glued = hom_complex_glued(&lift(&one, m).map_err(e)?, &lift(&one, n).map_err(e)?).map_err(e)?;
        ensure(glued == direct, || format!("pair {i}: trivial cover differs from the piece"))?;
    }
    Ok(())
}

fn sheaf_property() -> Check {
    let cov = cover_of(&make_wheel(1, 2).map_err(e)?).map_err(e)?;
    let circle = &cov.pieces[0];
    let arcs = two_arc_cover(circle, 2).map_err(e)?;
    let mut r = rng(77);
    for i in 0..20 {
        let m = random_rep(circle, P, &mut r, 2, 2).map_err(e)?;
        let n = random_rep(circle, P, &mut r, 2, 2).map_err(e)?;
        let direct = rep_hom(&m, &n).map_err(e)?.total.homology();
        let glued = hom_complex_glued(&arcs.restrict(&m).map_err(e)?, &arcs.restrict(&n).map_err(e)?).map_err(e)?;
        ensure(glued.homology() == direct, || format!("pair {i}: profiles differ"))?;
    }
    Ok(())
}

fn genus_counts() -> Check {
    let f1 = faces(&make_dualizable(&DualizableSpec::new(1, vec![1, 2, 3]).map_err(e)?).map_err(e)?).map_err(e)?;
    ensure(f1.count == 6 && f1.genus == 1, || format!("genus 1: {} faces, genus {}", f1.count, f1.genus))?;
    let f0 = faces(&make_dualizable(&DualizableSpec::new(0, vec![1, 2, 3]).map_err(e)?).map_err(e)?).map_err(e)?;
    ensure(f0.genus == 0, || format!("genus 0 graph has genus {}", f0.genus))
}

fn reduction() -> Check {
    let dir = tempfile::tempdir().map_err(e)?;
    let out = Command::new(env!("CARGO_BIN_EXE_cpm"))
        .args(["--out", dir.path().to_str().unwrap(), "reduce", "--genus", "1", "--weights", "1,2,3", "--track-random", "5"])
        .output()
        .map_err(e)?;
    ensure(out.status.success(), || String::from_utf8_lossy(&out.stderr).into_owned())?;
    let text = std::fs::read_to_string(dir.path().join("trace.json")).map_err(e)?;
    let trace = RewriteTrace::from_json(&serde_json::from_str(&text).map_err(e)?).map_err(e)?;
    let w = dualizable_weights(trace.final_graph()).map_err(e)?.weights;
    ensure(w == vec![1; 6], || format!("ended at {w:?}"))?;
    let rep = verify_transport(&trace);
    ensure(rep.passed(), || format!("verify failed at {:?}", rep.first_failure()))?;
    let pairs: usize = trace.snapshot.euler.iter().map(Vec::len).sum();
    ensure(pairs == 25, || format!("{pairs} Euler pairings tracked"))?;
    for s in &rep.steps {
        for k in ["external_stalks", "euler_pairings", "genus", "spoke_total"] {
            ensure(s.checks.get(k) == Some(&true), || format!("step {}: {k}", s.step))?;
        }
    }

    let sk = dualizable_skeleton(&DualizableSpec::new(0, vec![1, 2, 3]).map_err(e)?).map_err(e)?;
    let cov = cover_of(&sk.to_graph().map_err(e)?).map_err(e)?;
    let xs = (0..3).map(|s| random_glued_object(&cov, P, s)).collect::<Result<Vec<_>, _>>().map_err(e)?;
    let (end, _, t0) = reduce_to_unit_weights(&sk, &xs).map_err(e)?;
    let w0 = dualizable_weights(&end).map_err(e)?.weights;
    ensure(w0 == vec![1, 1, 1, 3], || format!("genus 0 ended at {w0:?}"))?;
    ensure(verify_transport(&t0).passed(), || "genus 0 verify failed".into())
}

fn fault_detection() -> Check {
    let sk = dualizable_skeleton(&DualizableSpec::new(1, vec![1, 2, 3]).map_err(e)?).map_err(e)?;
    let cov = cover_of(&sk.to_graph().map_err(e)?).map_err(e)?;
    let xs = (0..5).map(|s| random_glued_object(&cov, P, 40 + s)).collect::<Result<Vec<_>, _>>().map_err(e)?;
    let (_, _, trace) = reduce_to_unit_weights(&sk, &xs).map_err(e)?;
    let mut r = rng(99);
    let mut caught = 0;
    for _ in 0..10 {
        let step = r.gen_range(0..trace.steps.len());
        let obj = r.gen_range(0..xs.len());
        let mut bad = trace.clone();
        ensure(inject_zero_arrow(&mut bad, step, obj, r.gen()), || format!("nothing to zero at step {step}"))?;
        if verify_transport(&bad).first_failure() == Some(step) {
            caught += 1;
        }
    }
    ensure(caught == 10, || format!("{caught}/10 injections detected"))
}

fn hms() -> Check {
    let mut cases = 0;
    for genus in [0u8, 1] {
        for total in 1..=8usize {
            for mask in 0..1u32 << (total - 1) {
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
                let Ok(c) = TcncCurve::new(genus, w.clone()) else { continue };
                let rep = hms_check(&c, 1, total as u64).map_err(e)?;
                ensure(rep.passed(), || format!("genus {genus} {w:?}: {:?}", rep.messages))?;
                cases += 1;
            }
        }
    }
    let g0 = make_dualizable(&DualizableSpec::new(0, vec![1, 2, 3]).map_err(e)?).map_err(e)?;
    let rev = hms_compare(&TcncCurve::new(0, vec![3, 2, 1]).map_err(e)?, &g0, 1, 0).map_err(e)?;
    ensure(rev.passed(), || "reversal rejected".into())?;
    let g1 = make_dualizable(&DualizableSpec::new(1, vec![1, 2, 3]).map_err(e)?).map_err(e)?;
    for w in [vec![2, 3, 1], vec![3, 1, 2]] {
        let rot = hms_compare(&TcncCurve::new(1, w.clone()).map_err(e)?, &g1, 1, 0).map_err(e)?;
        ensure(rot.passed(), || format!("rotation {w:?} rejected"))?;
    }
    ensure(cases == 502, || format!("{cases} weight vectors swept"))
}

fn main() {
    let criteria: [(&str, fn() -> Check, Duration); 9] = [
        ("quiver dictionary", quiver_dictionary, Duration::from_secs(1)),
        ("restriction table on the one-foot wheel, 50 objects", restriction_tables, Duration::from_secs(10)),
        ("octahedral suite, 200 over F_32003 and 50 over Q", octahedral_suite, Duration::from_secs(60)),
        ("glued hom d^2 = 0 on 100 objects, trivial cover reduction", glued_hom_complexes, Duration::from_secs(60)),
        ("sheaf property on two arcs, 20 pairs", sheaf_property, Duration::from_secs(60)),
        ("faces and genus of dualizable graphs", genus_counts, Duration::from_secs(5)),
        ("reduction to unit weights with verified transport", reduction, Duration::from_secs(300)),
        ("fault detection, 10 injections", fault_detection, Duration::from_secs(300)),
        ("HMS comparator, all weights with sum <= 8", hms, Duration::from_secs(30)),
    ];
    let mut failed = 0;
    for (i, (name, f, limit)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let res = f();
        let dt = t.elapsed();
        let res = res.and_then(|_| ensure(dt <= *limit, || format!("took {dt:?}, limit {limit:?}")));
        match res {
            Ok(()) => println!("PASS [{}] {name} ({:.2}s)", i + 1, dt.as_secs_f64()),
            Err(msg) => {
                failed += 1;
                println!("FAIL [{}] {name} ({:.2}s): {msg}", i + 1, dt.as_secs_f64());
            }
        }
    }
    println!("acceptance: {}/{} passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
