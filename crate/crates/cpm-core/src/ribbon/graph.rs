//! Half-edge ribbon graphs with a marked, oriented zero section.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{CpmError, Result};

pub type Id = u32;

/// Involution fixed points are open ends (spoke tips, unbounded rays).
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct RibbonGraph {
    pub vertices: BTreeSet<Id>,
    pub attach: BTreeMap<Id, Id>,
    pub partner: BTreeMap<Id, Id>,
    pub cyclic: BTreeMap<Id, Vec<Id>>,
}

impl RibbonGraph {
    pub fn half_edges(&self) -> impl Iterator<Item = Id> + '_ {
        self.attach.keys().copied()
    }

    pub fn iota(&self, h: Id) -> Id {
        self.partner.get(&h).copied().unwrap_or(h)
    }

    pub fn is_open(&self, h: Id) -> bool {
        self.iota(h) == h
    }

    /// Cyclic successor of h at its vertex.
    pub fn sigma(&self, h: Id) -> Id {
        let v = self.attach[&h];
        let cyc = &self.cyclic[&v];
        let i = cyc.iter().position(|x| *x == h).expect("half-edge in its cyclic order");
        cyc[(i + 1) % cyc.len()]
    }

    pub fn degree(&self, v: Id) -> usize {
        self.cyclic.get(&v).map_or(0, Vec::len)
    }

    pub fn open_ends(&self) -> Vec<Id> {
        self.half_edges().filter(|h| self.is_open(*h)).collect()
    }

    /// Compact edges as (smaller, larger) half-edge pairs.
    pub fn compact_edges(&self) -> Vec<(Id, Id)> {
        self.half_edges()
            .filter_map(|h| {
                let p = self.iota(h);
                (h < p).then_some((h, p))
            })
            .collect()
    }

    /// Edge key: the smaller half-edge of the edge.
    pub fn edge_of(&self, h: Id) -> Id {
        h.min(self.iota(h))
    }

    fn structural_errors(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (&h, &p) in &self.partner {
            if !self.attach.contains_key(&h) || !self.attach.contains_key(&p) {
                out.push(format!("pairing references unknown half-edge {h}"));
            } else if self.iota(p) != h {
                out.push(format!("pairing is not an involution at {h}"));
            }
        }
        for (&h, &v) in &self.attach {
            if !self.vertices.contains(&v) {
                out.push(format!("half-edge {h} attached to unknown vertex {v}"));
            }
        }
        for &v in &self.vertices {
            let Some(cyc) = self.cyclic.get(&v) else {
                out.push(format!("no cyclic order at {v}"));
                continue;
            };
            let set: BTreeSet<Id> = cyc.iter().copied().collect();
            let attached: BTreeSet<Id> = self
                .attach
                .iter()
                .filter(|(_, w)| **w == v)
                .map(|(h, _)| *h)
                .collect();
            if set.len() != cyc.len() || set != attached {
                out.push(format!("cyclic order at {v} does not list its half-edges exactly once"));
            }
        }
        for v in self.cyclic.keys() {
            if !self.vertices.contains(v) {
                out.push(format!("cyclic order for unknown vertex {v}"));
            }
        }
        out
    }
}

/// Ribbon graph with zero section Z given by its half-edges, and an
/// orientation given by the Z half-edges pointing forward out of their vertex.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ChordalRibbonGraph {
    pub graph: RibbonGraph,
    pub zero: BTreeSet<Id>,
    pub forward: BTreeSet<Id>,
}

impl ChordalRibbonGraph {
    pub fn in_zero(&self, h: Id) -> bool {
        self.zero.contains(&h)
    }

    pub fn zero_edges(&self) -> Vec<Id> {
        let mut e: Vec<Id> = self.zero.iter().map(|h| self.graph.edge_of(*h)).collect();
        e.dedup();
        e.sort_unstable();
        e.dedup();
        e
    }
}

/// Diagnostics for the chordal conditions; empty iff valid.
pub fn validate_chordal(g: &ChordalRibbonGraph) -> Vec<String> {
    let r = &g.graph;
    let mut out = r.structural_errors();
    if !out.is_empty() {
        return out;
    }
    for h in &g.zero {
        if !r.attach.contains_key(h) {
            out.push(format!("zero section references unknown half-edge {h}"));
        } else if !g.zero.contains(&r.iota(*h)) {
            out.push(format!("zero section is not a union of edges at {h}"));
        }
    }
    for h in &g.forward {
        if !g.zero.contains(h) {
            out.push(format!("orientation on non-zero-section half-edge {h}"));
        }
    }
    for (h, p) in r.compact_edges() {
        if g.zero.contains(&h) && g.forward.contains(&h) == g.forward.contains(&p) {
            out.push(format!("zero-section edge ({h},{p}) is not consistently oriented"));
        }
    }
    for &v in &r.vertices {
        let cyc = &r.cyclic[&v];
        let deg = cyc.len();
        if deg < 2 {
            out.push(format!("degree < 2 at {v}"));
        }
        if deg > 4 {
            out.push(format!("valency > 4 at {v}"));
        }
        let zs: Vec<usize> = (0..deg).filter(|i| g.zero.contains(&cyc[*i])).collect();
        if zs.is_empty() {
            out.push(format!("vertex {v} not on the zero section"));
        }
        if zs.len() > 2 {
            out.push(format!("zero-section valency > 2 at {v}"));
        }
        if zs.len() == 2 {
            let fw = zs.iter().filter(|i| g.forward.contains(&cyc[**i])).count();
            if fw != 1 {
                out.push(format!("orientation does not pass through {v}"));
            }
            if deg == 4 && (zs[1] - zs[0] == 1 || zs[1] - zs[0] == 3) {
                out.push(format!("minimal pair violation at {v}"));
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceReport {
    pub faces: Vec<Vec<Id>>,
    pub count: usize,
    pub genus: i64,
    pub components: usize,
    pub euler: i64,
}

/// Faces are orbits of h ↦ σ(ι(h)); an open end sends h to σ(h), so the trace
/// doubles back at a tip. Tips count as vertices and open ends as edges.
pub fn faces(g: &ChordalRibbonGraph) -> Result<FaceReport> {
    let errs = validate_chordal(g);
    if !errs.is_empty() {
        return Err(CpmError::Invalid(errs.join("; ")));
    }
    let r = &g.graph;
    let mut seen = BTreeSet::new();
    let mut fs = Vec::new();
    for h0 in r.half_edges() {
        if seen.contains(&h0) {
            continue;
        }
        let mut face = Vec::new();
        let mut h = h0;
        while seen.insert(h) {
            face.push(h);
            h = r.sigma(r.iota(h));
        }
        fs.push(face);
    }
    let open = r.open_ends().len() as i64;
    let v = r.vertices.len() as i64 + open;
    let e = r.compact_edges().len() as i64 + open;
    let f = fs.len() as i64;
    let chi = v - e + f;
    let c = components(r) as i64;
    if (2 * c - chi) % 2 != 0 {
        return Err(CpmError::Invalid("odd Euler defect".into()));
    }
    Ok(FaceReport {
        count: fs.len(),
        faces: fs,
        genus: (2 * c - chi) / 2,
        components: c as usize,
        euler: chi,
    })
}

fn components(r: &RibbonGraph) -> usize {
    let mut seen = BTreeSet::new();
    let mut n = 0;
    for &v in &r.vertices {
        if !seen.insert(v) {
            continue;
        }
        n += 1;
        let mut q = VecDeque::from([v]);
        while let Some(w) = q.pop_front() {
            for h in &r.cyclic[&w] {
                let u = r.attach[&r.iota(*h)];
                if seen.insert(u) {
                    q.push_back(u);
                }
            }
        }
    }
    n
}

/// Canonical code up to relabeling (orientation-preserving ribbon isomorphism).
/// With `chordal` the zero section and its orientation are part of the structure.
pub fn canonical_code(g: &ChordalRibbonGraph, chordal: bool) -> Vec<Vec<u32>> {
    let r = &g.graph;
    let mut done = BTreeSet::new();
    let mut comps = Vec::new();
    for h0 in r.half_edges() {
        if done.contains(&h0) {
            continue;
        }
        let mut best: Option<Vec<u32>> = None;
        let orbit = bfs_labels(r, h0);
        for &start in orbit.keys() {
            let lab = bfs_labels(r, start);
            let mut order: Vec<(u32, Id)> = lab.iter().map(|(h, l)| (*l, *h)).collect();
            order.sort_unstable();
            let mut code = Vec::with_capacity(order.len() * 4);
            for (_, h) in order {
                code.push(lab[&r.iota(h)]);
                code.push(lab[&r.sigma(h)]);
                if chordal {
                    code.push(u32::from(g.zero.contains(&h)));
                    code.push(u32::from(g.forward.contains(&h)));
                }
            }
            if best.as_ref().map_or(true, |b| code < *b) {
                best = Some(code);
            }
        }
        done.extend(orbit.keys().copied());
        comps.push(best.unwrap_or_default());
    }
    comps.sort();
    comps
}

fn bfs_labels(r: &RibbonGraph, start: Id) -> BTreeMap<Id, u32> {
    let mut lab = BTreeMap::new();
    let mut q = VecDeque::from([start]);
    lab.insert(start, 0u32);
    while let Some(h) = q.pop_front() {
        for n in [r.iota(h), r.sigma(h)] {
            if !lab.contains_key(&n) {
                let l = lab.len() as u32;
                lab.insert(n, l);
                q.push_back(n);
            }
        }
    }
    lab
}

pub fn isomorphic(a: &ChordalRibbonGraph, b: &ChordalRibbonGraph, chordal: bool) -> bool {
    canonical_code(a, chordal) == canonical_code(b, chordal)
}

/// DOT export. Vertices are record nodes whose ports list the cyclic order;
/// open ends become point nodes; zero-section edges are bold.
pub fn to_dot(g: &ChordalRibbonGraph) -> String {
    let r = &g.graph;
    let mut s = String::from("graph ribbon {\n  node [shape=record];\n");
    for v in &r.vertices {
        let ports: Vec<String> = r.cyclic[v].iter().map(|h| format!("<h{h}> {h}")).collect();
        s.push_str(&format!("  v{v} [label=\"{}\"];\n", ports.join("|")));
    }
    for h in r.open_ends() {
        s.push_str(&format!("  t{h} [shape=point];\n"));
    }
    let style = |h: Id| {
        if g.zero.contains(&h) {
            if g.forward.contains(&h) {
                " [style=bold, dir=forward]"
            } else {
                " [style=bold, dir=back]"
            }
        } else {
            ""
        }
    };
    let mut lines = Vec::new();
    for (h, p) in r.compact_edges() {
        lines.push(format!(
            "  v{}:h{h} -- v{}:h{p}{};\n",
            r.attach[&h],
            r.attach[&p],
            style(h)
        ));
    }
    for h in r.open_ends() {
        lines.push(format!("  v{}:h{h} -- t{h}{};\n", r.attach[&h], style(h)));
    }
    for l in lines {
        s.push_str(&l);
    }
    s.push_str("}\n");
    s
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    vertices: Vec<Id>,
    half_edges: Vec<Id>,
    pairing: Vec<[Id; 2]>,
    open_ends: Vec<Id>,
    cyclic: BTreeMap<String, Vec<Id>>,
    zero_section: Vec<Vec<Id>>,
    orientations: BTreeMap<String, String>,
}

pub fn graph_to_json(g: &ChordalRibbonGraph) -> serde_json::Value {
    let r = &g.graph;
    let gj = GraphJson {
        vertices: r.vertices.iter().copied().collect(),
        half_edges: r.half_edges().collect(),
        pairing: r.compact_edges().into_iter().map(|(a, b)| [a, b]).collect(),
        open_ends: r.open_ends(),
        cyclic: r.cyclic.iter().map(|(v, c)| (v.to_string(), c.clone())).collect(),
        zero_section: g
            .zero_edges()
            .into_iter()
            .map(|e| {
                let p = r.iota(e);
                if p == e {
                    vec![e]
                } else {
                    vec![e, p]
                }
            })
            .collect(),
        orientations: g
            .zero
            .iter()
            .map(|h| {
                let d = if g.forward.contains(h) { "out" } else { "in" };
                (h.to_string(), d.to_string())
            })
            .collect(),
    };
    serde_json::to_value(gj).expect("graph json")
}

const MAX_HALF_EDGES: usize = 1 << 16;

pub fn graph_from_json(v: &serde_json::Value) -> Result<ChordalRibbonGraph> {
    let gj: GraphJson =
        serde_json::from_value(v.clone()).map_err(|e| CpmError::Parse(e.to_string()))?;
    if gj.half_edges.len() > MAX_HALF_EDGES {
        return Err(CpmError::Parse("graph too large".into()));
    }
    let key = |s: &str| -> Result<Id> {
        s.parse().map_err(|_| CpmError::Parse(format!("bad id {s:?}")))
    };
    let mut r = RibbonGraph {
        vertices: gj.vertices.iter().copied().collect(),
        ..Default::default()
    };
    for (v, cyc) in &gj.cyclic {
        let v = key(v)?;
        for h in cyc {
            if r.attach.insert(*h, v).is_some() {
                return Err(CpmError::Parse(format!("half-edge {h} listed twice")));
            }
        }
        r.cyclic.insert(v, cyc.clone());
    }
    let listed: BTreeSet<Id> = gj.half_edges.iter().copied().collect();
    if listed != r.attach.keys().copied().collect() {
        return Err(CpmError::Parse("half_edges disagree with cyclic orders".into()));
    }
    for [a, b] in &gj.pairing {
        if a == b || r.partner.contains_key(a) || r.partner.contains_key(b) {
            return Err(CpmError::Parse(format!("bad pairing ({a},{b})")));
        }
        r.partner.insert(*a, *b);
        r.partner.insert(*b, *a);
    }
    for h in &gj.open_ends {
        if r.partner.contains_key(h) {
            return Err(CpmError::Parse(format!("open end {h} is also paired")));
        }
    }
    for h in &listed {
        if !r.partner.contains_key(h) && !gj.open_ends.contains(h) {
            return Err(CpmError::Parse(format!("half-edge {h} neither paired nor open")));
        }
    }
    let mut g = ChordalRibbonGraph {
        graph: r,
        ..Default::default()
    };
    for e in &gj.zero_section {
        g.zero.extend(e.iter().copied());
    }
    for (h, d) in &gj.orientations {
        let h = key(h)?;
        match d.as_str() {
            "out" => {
                g.forward.insert(h);
            }
            "in" => {}
            _ => return Err(CpmError::Parse(format!("orientation {d:?}"))),
        }
    }
    let errs = validate_chordal(&g);
    if !errs.is_empty() {
        return Err(CpmError::Invalid(errs.join("; ")));
    }
    Ok(g)
}
