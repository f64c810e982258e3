//! The reduction driver, its trace and the re-checking of traces.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use super::family::{rewrite_family, transport_family, FamilyRewrite};
use super::MoveSite;
use crate::cpmcat::{euler_pairing, CoverPresentation, EdgeSel, GluedObject};
use crate::error::{CpmError, Result};
use crate::ribbon::{dualizable_weights, faces, graph_to_json, DualizableSpec, Side, Skeleton, SpokeRef};

/// sha256 of the canonical JSON of the graph (serde_json maps keep keys sorted).
pub fn graph_hash(sk: &Skeleton) -> Result<String> {
    let v = graph_to_json(&sk.to_graph()?);
    Ok(hash_value(&v))
}

pub fn hash_value(v: &Value) -> String {
    let text = serde_json::to_string(v).expect("json values serialize");
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// (glued runs with at least two spokes, Σ (run length − 1) over glued runs)
pub fn measure(sk: &Skeleton) -> (usize, usize) {
    let mut runs = 0;
    let mut excess = 0;
    for f in &sk.families {
        if f.len() >= 2 {
            runs += 2;
        }
        excess += 2 * (f.len().saturating_sub(1));
    }
    (runs, excess)
}

pub fn edge_name(e: &EdgeSel) -> String {
    match e {
        EdgeSel::Cell(f) => format!("cell:{f}"),
        EdgeSel::Spoke(SpokeRef { foot, side: Side::Up }) => format!("up:{foot}"),
        EdgeSel::Spoke(SpokeRef { foot, side: Side::Down }) => format!("down:{foot}"),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Snapshot {
    /// edge name → homology profile per tracked object
    pub stalks: BTreeMap<String, Vec<BTreeMap<i32, usize>>>,
    pub euler: Vec<Vec<i64>>,
    pub genus: i64,
    pub spokes: usize,
}

pub fn snapshot(sk: &Skeleton, objects: &[GluedObject]) -> Result<Snapshot> {
    let cov = CoverPresentation::from_skeleton(sk)?;
    let mut stalks = BTreeMap::new();
    for e in cov.edges()? {
        let mut per = Vec::new();
        for x in objects {
            per.push(x.stalk(e)?.homology().0);
        }
        stalks.insert(edge_name(&e), per);
    }
    let mut euler = Vec::new();
    for x in objects {
        euler.push(objects.iter().map(|y| euler_pairing(x, y)).collect::<Result<Vec<_>>>()?);
    }
    let f = faces(&sk.to_graph()?)?;
    Ok(Snapshot { stalks, euler, genus: f.genus, spokes: sk.spoke_total() })
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceStep {
    pub site: MoveSite,
    pub before: String,
    pub after: String,
    pub measure: (usize, usize),
    pub graph: Skeleton,
    pub objects: Vec<GluedObject>,
    pub snapshot: Snapshot,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RewriteTrace {
    pub graph: Skeleton,
    pub hash: String,
    pub measure: (usize, usize),
    pub objects: Vec<GluedObject>,
    pub snapshot: Snapshot,
    pub steps: Vec<TraceStep>,
}

impl RewriteTrace {
    pub fn final_graph(&self) -> &Skeleton {
        self.steps.last().map_or(&self.graph, |s| &s.graph)
    }
    pub fn final_objects(&self) -> &[GluedObject] {
        self.steps.last().map_or(&self.objects, |s| &s.objects)
    }

    pub fn to_json(&self) -> Result<Value> {
        let objs = |xs: &[GluedObject]| xs.iter().map(GluedObject::to_json).collect::<Result<Vec<_>>>();
        let mut steps = Vec::new();
        for (i, s) in self.steps.iter().enumerate() {
            steps.push(json!({
                "id": i,
                "site": to_val(&s.site)?,
                "before": s.before,
                "after": s.after,
                "measure": [s.measure.0, s.measure.1],
                "graph": to_val(&s.graph)?,
                "objects": objs(&s.objects)?,
                "snapshot": to_val(&s.snapshot)?,
            }));
        }
        Ok(json!({
            "graph": to_val(&self.graph)?,
            "hash": self.hash,
            "measure": [self.measure.0, self.measure.1],
            "objects": objs(&self.objects)?,
            "snapshot": to_val(&self.snapshot)?,
            "steps": steps,
        }))
    }

    pub fn from_json(v: &Value) -> Result<RewriteTrace> {
        let bad = |s: &str| CpmError::Parse(format!("trace: {s}"));
        let get = |v: &Value, k: &str| v.get(k).cloned().ok_or_else(|| bad(&format!("missing {k}")));
        fn de<T: for<'a> Deserialize<'a>>(v: Value) -> Result<T> {
            serde_json::from_value(v).map_err(|e| CpmError::Parse(e.to_string()))
        }
        let objs = |v: Value| -> Result<Vec<GluedObject>> {
            v.as_array()
                .ok_or_else(|| bad("objects must be a list"))?
                .iter()
                .map(GluedObject::from_json)
                .collect()
        };
        let pair = |v: Value| -> Result<(usize, usize)> { de::<[usize; 2]>(v).map(|[a, b]| (a, b)) };
        let mut steps = Vec::new();
        for s in get(v, "steps")?.as_array().ok_or_else(|| bad("steps must be a list"))? {
            steps.push(TraceStep {
                site: de(get(s, "site")?)?,
                before: de(get(s, "before")?)?,
                after: de(get(s, "after")?)?,
                measure: pair(get(s, "measure")?)?,
                graph: de(get(s, "graph")?)?,
                objects: objs(get(s, "objects")?)?,
                snapshot: de(get(s, "snapshot")?)?,
            });
        }
        Ok(RewriteTrace {
            graph: de(get(v, "graph")?)?,
            hash: de(get(v, "hash")?)?,
            measure: pair(get(v, "measure")?)?,
            objects: objs(get(v, "objects")?)?,
            snapshot: de(get(v, "snapshot")?)?,
            steps,
        })
    }
}

fn to_val<T: Serialize>(x: &T) -> Result<Value> {
    serde_json::to_value(x).map_err(|e| CpmError::Parse(e.to_string()))
}

/// Weight vector the reduction must reach.
pub fn target_weights(spec: &DualizableSpec) -> Vec<usize> {
    let a = &spec.weights;
    let m = a.len();
    if spec.genus == 1 {
        return vec![1; a.iter().sum()];
    }
    let mut out = vec![a[0]];
    out.extend(std::iter::repeat(1).take(a[1..m - 1].iter().sum()));
    out.push(a[m - 1]);
    out
}

pub fn same_up_to_symmetry(genus: u8, a: &[usize], b: &[usize]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut rev = b.to_vec();
    rev.reverse();
    if genus == 0 {
        return a == b || a == rev.as_slice();
    }
    (0..b.len()).any(|k| {
        let mut r = b.to_vec();
        r.rotate_left(k);
        let mut rr = rev.clone();
        rr.rotate_left(k);
        a == r.as_slice() || a == rr.as_slice()
    })
}

/// One family rewrite applied to the graph and every object.
pub fn family_step(sk: &Skeleton, fi: usize, objects: &[GluedObject]) -> Result<(Skeleton, FamilyRewrite, Vec<GluedObject>)> {
    let (sk2, rw) = rewrite_family(sk, fi)?;
    let cov2 = CoverPresentation::from_skeleton(&sk2)?;
    let out = objects
        .iter()
        .map(|x| transport_family(x, &cov2, &rw))
        .collect::<Result<Vec<_>>>()?;
    Ok((sk2, rw, out))
}

pub fn reduce_to_unit_weights(sk: &Skeleton, objects: &[GluedObject]) -> Result<(Skeleton, Vec<GluedObject>, RewriteTrace)> {
    let spec = dualizable_weights(sk)?;
    let cov = CoverPresentation::from_skeleton(sk)?;
    for (i, x) in objects.iter().enumerate() {
        if !x.cover.same_shape(&cov) || !x.is_valid() {
            return Err(CpmError::Invalid(format!("object {i} is not a valid object on the graph")));
        }
    }
    let mut trace = RewriteTrace {
        graph: sk.clone(),
        hash: graph_hash(sk)?,
        measure: measure(sk),
        objects: objects.to_vec(),
        snapshot: snapshot(sk, objects)?,
        steps: vec![],
    };
    let mut cur = sk.clone();
    let mut objs = objects.to_vec();
    while let Some(fi) = cur.families.iter().position(|f| f.len() >= 2) {
        let before = graph_hash(&cur)?;
        let (next, rw, moved) = family_step(&cur, fi, &objs)?;
        let m = measure(&next);
        let prev = trace.steps.last().map_or(trace.measure, |s| s.measure);
        if m >= prev {
            return Err(CpmError::Invalid(format!("step {} does not decrease the measure", trace.steps.len())));
        }
        trace.steps.push(TraceStep {
            site: MoveSite::family(&rw),
            before,
            after: graph_hash(&next)?,
            measure: m,
            snapshot: snapshot(&next, &moved)?,
            graph: next.clone(),
            objects: moved.clone(),
        });
        cur = next;
        objs = moved;
    }
    let reached = dualizable_weights(&cur)?;
    let want = target_weights(&spec);
    if !same_up_to_symmetry(spec.genus, &reached.weights, &want) {
        return Err(CpmError::Invalid(format!("reduction reached {:?}, expected {want:?}", reached.weights)));
    }
    Ok((cur, objs, trace))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StepReport {
    pub step: usize,
    pub checks: BTreeMap<String, bool>,
}

impl StepReport {
    pub fn passed(&self) -> bool {
        self.checks.values().all(|b| *b)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub steps: Vec<StepReport>,
    pub initial: BTreeMap<String, bool>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.initial.values().all(|b| *b) && self.steps.iter().all(StepReport::passed)
    }
    pub fn first_failure(&self) -> Option<usize> {
        self.steps.iter().find(|s| !s.passed()).map(|s| s.step)
    }
}

fn check_state(sk: &Skeleton, objs: &[GluedObject], snap: &Snapshot, out: &mut BTreeMap<String, bool>) -> Option<Snapshot> {
    let cov = CoverPresentation::from_skeleton(sk).ok();
    let valid = cov.is_some_and(|c| objs.iter().all(|x| x.cover.same_shape(&c) && x.is_valid()));
    out.insert("validity".into(), valid);
    if !valid {
        return None;
    }
    let fresh = snapshot(sk, objs).ok();
    out.insert("snapshot".into(), fresh.as_ref() == Some(snap));
    fresh
}

/// Re-checks every step of a trace from its recorded data.
pub fn verify_transport(trace: &RewriteTrace) -> VerifyReport {
    let mut initial = BTreeMap::new();
    initial.insert("hash".into(), graph_hash(&trace.graph).ok().as_deref() == Some(trace.hash.as_str()));
    let mut prev_snap = check_state(&trace.graph, &trace.objects, &trace.snapshot, &mut initial);
    let mut prev_graph = &trace.graph;
    let mut prev_objs = &trace.objects;
    let mut prev_hash = trace.hash.clone();
    let mut steps = Vec::new();
    for (i, s) in trace.steps.iter().enumerate() {
        let mut c = BTreeMap::new();
        c.insert("hash_chain".into(), s.before == prev_hash);
        c.insert("hash".into(), graph_hash(&s.graph).ok().as_deref() == Some(s.after.as_str()));
        let snap = check_state(&s.graph, &s.objects, &s.snapshot, &mut c);
        let merged: Vec<String> = s.site.merged_edges();
        match (&prev_snap, &snap) {
            (Some(a), Some(b)) => {
                let ext = a
                    .stalks
                    .iter()
                    .filter(|(k, _)| !merged.contains(k))
                    .filter_map(|(k, v)| b.stalks.get(k).map(|w| v == w))
                    .all(|ok| ok);
                c.insert("external_stalks".into(), ext);
                c.insert("euler_pairings".into(), a.euler == b.euler);
                c.insert("genus".into(), a.genus == b.genus);
                c.insert("spoke_total".into(), a.spokes == b.spokes);
            }
            _ => {
                for k in ["external_stalks", "euler_pairings", "genus", "spoke_total"] {
                    c.insert(k.into(), false);
                }
            }
        }
        // replay the move from the recorded state before it
        let replay = s
            .site
            .family_index(prev_graph)
            .and_then(|fi| family_step(prev_graph, fi, prev_objs))
            .map(|(g, _, o)| g == s.graph && o == s.objects)
            .unwrap_or(false);
        c.insert("replay".into(), replay);
        c.insert("measure".into(), s.measure == measure(&s.graph));
        steps.push(StepReport { step: i, checks: c });
        prev_snap = snap;
        prev_graph = &s.graph;
        prev_objs = &s.objects;
        prev_hash = s.after.clone();
    }
    VerifyReport { steps, initial }
}

/// Zeroes one nonzero arrow map of one transported object at `step`.
/// Returns false when the chosen object has no nonzero arrow.
pub fn inject_zero_arrow(trace: &mut RewriteTrace, step: usize, object: usize, pick: usize) -> bool {
    let Some(s) = trace.steps.get_mut(step) else { return false };
    let Some(x) = s.objects.get_mut(object) else { return false };
    let mut sites = Vec::new();
    for (p, r) in x.reps.iter().enumerate() {
        for (a, m) in r.arrows.iter().enumerate() {
            if !m.is_zero() {
                sites.push((p, a));
            }
        }
    }
    if sites.is_empty() {
        return false;
    }
    let (p, a) = sites[pick % sites.len()];
    let m = &x.reps[p].arrows[a];
    x.reps[p].arrows[a] = crate::homalg::ChainMap::zero(m.source(), m.target(), 0);
    true
}
