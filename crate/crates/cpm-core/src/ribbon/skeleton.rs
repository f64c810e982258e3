//! Wheel-level description of chordal graphs built from circles and lines with
//! spoke feet, and spoke families glued by a cyclic offset.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::graph::{validate_chordal, ChordalRibbonGraph, Id, RibbonGraph};
use crate::error::{CpmError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Side {
    Up,
    Down,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Up => Side::Down,
            Side::Down => Side::Up,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SpokeRef {
    pub foot: Id,
    pub side: Side,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Foot {
    pub id: Id,
    pub up: bool,
    pub down: bool,
}

impl Foot {
    pub fn up(id: Id) -> Foot {
        Foot { id, up: true, down: false }
    }
    pub fn down(id: Id) -> Foot {
        Foot { id, up: false, down: true }
    }
    pub fn has(&self, s: Side) -> bool {
        match s {
            Side::Up => self.up,
            Side::Down => self.down,
        }
    }
    /// The unique side of a single-sided foot.
    pub fn side(&self) -> Option<Side> {
        match (self.up, self.down) {
            (true, false) => Some(Side::Up),
            (false, true) => Some(Side::Down),
            _ => None,
        }
    }
}

/// One zero-section component, feet listed along its orientation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Piece {
    pub circle: bool,
    pub feet: Vec<Foot>,
}

impl Piece {
    pub fn first_id(&self) -> Id {
        self.feet.iter().map(|f| f.id).min().unwrap_or(Id::MAX)
    }
    pub fn position(&self, foot: Id) -> Option<usize> {
        self.feet.iter().position(|f| f.id == foot)
    }
}

/// Down spokes x_0..x_{n−1} glued to up spokes y_0..y_{n−1}, x_j ↔ y_{(j+offset) mod n}.
/// Runs are listed along the orientations of their circles.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Family {
    pub downs: Vec<Id>,
    pub ups: Vec<Id>,
    pub offset: usize,
}

impl Family {
    pub fn len(&self) -> usize {
        self.downs.len()
    }
    pub fn is_empty(&self) -> bool {
        self.downs.is_empty()
    }
    pub fn partner_of_down(&self, j: usize) -> Id {
        self.ups[(j + self.offset) % self.ups.len()]
    }
    /// (down foot, up foot) strands in run order of the downs.
    pub fn strands(&self) -> Vec<(Id, Id)> {
        (0..self.len()).map(|j| (self.downs[j], self.partner_of_down(j))).collect()
    }
}

/// Offset used for every family built here (see `make_dualizable`).
pub const FAMILY_OFFSET: usize = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct Skeleton {
    pub pieces: Vec<Piece>,
    pub families: Vec<Family>,
}

pub fn zin(f: Id) -> Id {
    4 * f
}
pub fn zout(f: Id) -> Id {
    4 * f + 1
}
pub fn spoke_half(s: SpokeRef) -> Id {
    match s.side {
        Side::Up => 4 * s.foot + 2,
        Side::Down => 4 * s.foot + 3,
    }
}
pub fn spoke_of_half(h: Id) -> Option<SpokeRef> {
    match h % 4 {
        2 => Some(SpokeRef { foot: h / 4, side: Side::Up }),
        3 => Some(SpokeRef { foot: h / 4, side: Side::Down }),
        _ => None,
    }
}

impl Skeleton {
    /// Rotates circles to start at their smallest foot id and sorts pieces and families.
    pub fn normalize(&mut self) {
        for p in &mut self.pieces {
            if p.circle && !p.feet.is_empty() {
                let i = (0..p.feet.len()).min_by_key(|i| p.feet[*i].id).unwrap();
                p.feet.rotate_left(i);
            }
        }
        self.pieces.sort_by_key(Piece::first_id);
        self.families.sort_by_key(|f| f.downs.first().copied());
    }

    pub fn feet(&self) -> impl Iterator<Item = &Foot> {
        self.pieces.iter().flat_map(|p| p.feet.iter())
    }

    pub fn foot(&self, id: Id) -> Option<&Foot> {
        self.feet().find(|f| f.id == id)
    }

    /// (piece index, position) of a foot.
    pub fn locate(&self, id: Id) -> Option<(usize, usize)> {
        self.pieces
            .iter()
            .enumerate()
            .find_map(|(i, p)| p.position(id).map(|j| (i, j)))
    }

    pub fn max_id(&self) -> Id {
        self.feet().map(|f| f.id).max().unwrap_or(0)
    }

    /// Partner spoke across a strand, if any.
    pub fn partner(&self, s: SpokeRef) -> Option<SpokeRef> {
        for fam in &self.families {
            for (d, u) in fam.strands() {
                if s.side == Side::Down && d == s.foot {
                    return Some(SpokeRef { foot: u, side: Side::Up });
                }
                if s.side == Side::Up && u == s.foot {
                    return Some(SpokeRef { foot: d, side: Side::Down });
                }
            }
        }
        None
    }

    pub fn spokes(&self) -> Vec<SpokeRef> {
        let mut out = Vec::new();
        for f in self.feet() {
            for side in [Side::Up, Side::Down] {
                if f.has(side) {
                    out.push(SpokeRef { foot: f.id, side });
                }
            }
        }
        out
    }

    pub fn open_spokes(&self) -> Vec<SpokeRef> {
        self.spokes().into_iter().filter(|s| self.partner(*s).is_none()).collect()
    }

    pub fn to_graph(&self) -> Result<ChordalRibbonGraph> {
        let mut r = RibbonGraph::default();
        let mut g = ChordalRibbonGraph::default();
        let mut seen = BTreeSet::new();
        for p in &self.pieces {
            if p.feet.is_empty() {
                return Err(CpmError::Invalid("piece without feet".into()));
            }
            let k = p.feet.len();
            for (i, f) in p.feet.iter().enumerate() {
                if !seen.insert(f.id) || f.id >= Id::MAX / 4 {
                    return Err(CpmError::Invalid(format!("bad foot id {}", f.id)));
                }
                if !f.up && !f.down {
                    return Err(CpmError::Invalid(format!("foot {} has no spoke", f.id)));
                }
                let (a, b) = (zin(f.id), zout(f.id));
                let mut cyc = vec![b];
                if f.up {
                    cyc.push(spoke_half(SpokeRef { foot: f.id, side: Side::Up }));
                }
                cyc.push(a);
                if f.down {
                    cyc.push(spoke_half(SpokeRef { foot: f.id, side: Side::Down }));
                }
                for h in &cyc {
                    r.attach.insert(*h, f.id);
                }
                r.vertices.insert(f.id);
                r.cyclic.insert(f.id, cyc);
                g.zero.insert(a);
                g.zero.insert(b);
                g.forward.insert(b);
                if p.circle || i + 1 < k {
                    let next = p.feet[(i + 1) % k].id;
                    r.partner.insert(b, zin(next));
                    r.partner.insert(zin(next), b);
                }
            }
        }
        for fam in &self.families {
            if fam.ups.len() != fam.downs.len() || fam.is_empty() {
                return Err(CpmError::Invalid("family runs of unequal length".into()));
            }
            for (d, u) in fam.strands() {
                let hd = spoke_half(SpokeRef { foot: d, side: Side::Down });
                let hu = spoke_half(SpokeRef { foot: u, side: Side::Up });
                if !r.attach.contains_key(&hd) || !r.attach.contains_key(&hu) {
                    return Err(CpmError::Invalid(format!("strand {d}→{u} references a missing spoke")));
                }
                if r.partner.contains_key(&hd) || r.partner.contains_key(&hu) {
                    return Err(CpmError::Invalid(format!("spoke glued twice at {d}→{u}")));
                }
                r.partner.insert(hd, hu);
                r.partner.insert(hu, hd);
            }
        }
        g.graph = r;
        let errs = validate_chordal(&g);
        if !errs.is_empty() {
            return Err(CpmError::Invalid(errs.join("; ")));
        }
        Ok(g)
    }

    /// Recovers the skeleton of a chordal graph whose zero section is a union of
    /// circles and lines with 3- and 4-valent feet.
    pub fn from_graph(g: &ChordalRibbonGraph) -> Result<Skeleton> {
        let errs = validate_chordal(g);
        if !errs.is_empty() {
            return Err(CpmError::Invalid(errs.join("; ")));
        }
        let r = &g.graph;
        struct Local {
            zout: Option<Id>,
            up: Option<Id>,
            down: Option<Id>,
        }
        let mut local = BTreeMap::new();
        for &v in &r.vertices {
            let cyc = &r.cyclic[&v];
            let zo = cyc.iter().copied().find(|h| g.forward.contains(h));
            let zi = cyc.iter().copied().find(|h| g.zero.contains(h) && !g.forward.contains(h));
            let (Some(zo), Some(zi)) = (zo, zi) else {
                return Err(CpmError::Invalid(format!("vertex {v} is an end of the zero section")));
            };
            let start = cyc.iter().position(|h| *h == zo).unwrap();
            let rot: Vec<Id> = (0..cyc.len()).map(|i| cyc[(start + i) % cyc.len()]).collect();
            let zpos = rot.iter().position(|h| *h == zi).unwrap();
            let ups: Vec<Id> = rot[1..zpos].to_vec();
            let downs: Vec<Id> = rot[zpos + 1..].to_vec();
            if ups.len() > 1 || downs.len() > 1 || ups.len() + downs.len() == 0 {
                return Err(CpmError::Invalid(format!("unsupported foot shape at {v}")));
            }
            local.insert(
                v,
                Local {
                    zout: Some(zo),
                    up: ups.first().copied(),
                    down: downs.first().copied(),
                },
            );
        }
        // Trace zero-section components.
        let mut next = BTreeMap::new();
        let mut prev = BTreeMap::new();
        for (&v, l) in &local {
            let zo = l.zout.unwrap();
            if !r.is_open(zo) {
                let w = r.attach[&r.iota(zo)];
                next.insert(v, w);
                prev.insert(w, v);
            }
        }
        let mut done = BTreeSet::new();
        let mut pieces = Vec::new();
        for &v in local.keys() {
            if done.contains(&v) {
                continue;
            }
            let mut s = v;
            let mut circle = true;
            while let Some(&p) = prev.get(&s) {
                s = p;
                if s == v {
                    break;
                }
            }
            if !prev.contains_key(&s) {
                circle = false;
            }
            let mut order = vec![s];
            done.insert(s);
            let mut c = s;
            while let Some(&n) = next.get(&c) {
                if n == s {
                    break;
                }
                order.push(n);
                done.insert(n);
                c = n;
            }
            pieces.push((circle, order));
        }
        // Relabel: foot id = vertex id; spokes keep their own half-edge ids only through the map.
        let mut sk = Skeleton::default();
        let mut spoke_at: BTreeMap<Id, SpokeRef> = BTreeMap::new();
        for (circle, order) in pieces {
            let mut feet = Vec::new();
            for v in order {
                let l = &local[&v];
                feet.push(Foot {
                    id: v,
                    up: l.up.is_some(),
                    down: l.down.is_some(),
                });
                if let Some(h) = l.up {
                    spoke_at.insert(h, SpokeRef { foot: v, side: Side::Up });
                }
                if let Some(h) = l.down {
                    spoke_at.insert(h, SpokeRef { foot: v, side: Side::Down });
                }
            }
            sk.pieces.push(Piece { circle, feet });
        }
        sk.normalize();
        let mut groups: BTreeMap<(usize, usize), Vec<(Id, Id)>> = BTreeMap::new();
        for (&h, s) in &spoke_at {
            if r.is_open(h) || s.side == Side::Up {
                continue;
            }
            let t = spoke_at
                .get(&r.iota(h))
                .ok_or_else(|| CpmError::Invalid(format!("spoke {h} glued to the zero section")))?;
            if t.side != Side::Up {
                return Err(CpmError::Invalid(format!("strand at {h} joins two downward spokes")));
            }
            let pd = sk.locate(s.foot).unwrap().0;
            let pu = sk.locate(t.foot).unwrap().0;
            groups.entry((pd, pu)).or_default().push((s.foot, t.foot));
        }
        for ((pd, pu), pairs) in groups {
            let downs = run_order(&sk.pieces[pd], pairs.iter().map(|p| p.0).collect());
            let ups = run_order(&sk.pieces[pu], pairs.iter().map(|p| p.1).collect());
            let map: BTreeMap<Id, Id> = pairs.into_iter().collect();
            let n = downs.len();
            let off = ups.iter().position(|u| *u == map[&downs[0]]).unwrap();
            let fam = Family { downs, ups, offset: off };
            if (0..n).any(|j| map[&fam.downs[j]] != fam.partner_of_down(j)) {
                return Err(CpmError::Invalid("spoke family is braided".into()));
            }
            sk.families.push(fam);
        }
        sk.normalize();
        Ok(sk)
    }

    /// Total number of spokes counted with strands once: open spokes plus strands.
    pub fn spoke_total(&self) -> usize {
        self.open_spokes().len() + self.families.iter().map(Family::len).sum::<usize>()
    }
}

/// Members of a foot set in order along the piece, starting after a non-member.
pub fn run_order(p: &Piece, members: BTreeSet<Id>) -> Vec<Id> {
    let k = p.feet.len();
    let inset = |i: usize| members.contains(&p.feet[i].id);
    let start = if p.circle {
        (0..k).find(|&i| inset(i) && !inset((i + k - 1) % k)).unwrap_or(0)
    } else {
        0
    };
    (0..k)
        .map(|i| (start + i) % k)
        .filter(|&i| inset(i))
        .map(|i| p.feet[i].id)
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualizableSpec {
    pub genus: u8,
    pub weights: Vec<usize>,
}

impl DualizableSpec {
    pub fn new(genus: u8, weights: Vec<usize>) -> Result<DualizableSpec> {
        if genus > 1 {
            return Err(CpmError::Invalid("genus must be 0 or 1".into()));
        }
        if weights.iter().any(|a| *a == 0) {
            return Err(CpmError::Invalid("weights must be positive".into()));
        }
        if genus == 0 && weights.len() < 2 {
            return Err(CpmError::Invalid("genus 0 needs at least two weights".into()));
        }
        if weights.is_empty() {
            return Err(CpmError::Invalid("empty weight vector".into()));
        }
        if weights.iter().sum::<usize>() > 4096 {
            return Err(CpmError::Invalid("weights too large".into()));
        }
        Ok(DualizableSpec { genus, weights })
    }

    pub fn wheel_count(&self) -> usize {
        self.weights.len() - 1 + self.genus as usize
    }
}

pub fn wheel_piece(first_id: Id, a1: usize, a2: usize) -> Piece {
    let mut feet = Vec::new();
    for i in 0..a1 {
        feet.push(Foot::up(first_id + i as Id));
    }
    for i in 0..a2 {
        feet.push(Foot::down(first_id + (a1 + i) as Id));
    }
    Piece { circle: true, feet }
}

pub fn wheel_skeleton(a1: usize, a2: usize) -> Result<Skeleton> {
    if a1 == 0 || a2 == 0 {
        return Err(CpmError::Invalid("wheel weights must be positive".into()));
    }
    Ok(Skeleton {
        pieces: vec![wheel_piece(0, a1, a2)],
        families: vec![],
    })
}

pub fn make_wheel(a1: usize, a2: usize) -> Result<ChordalRibbonGraph> {
    wheel_skeleton(a1, a2)?.to_graph()
}

/// Wheel i is Λ_{a_i, a_{i+1}}; the downward spokes of wheel i are glued to the
/// upward spokes of wheel i+1 (cyclically in genus 1) with offset `FAMILY_OFFSET`.
pub fn dualizable_skeleton(spec: &DualizableSpec) -> Result<Skeleton> {
    let spec = DualizableSpec::new(spec.genus, spec.weights.clone())?;
    let a = &spec.weights;
    let m = a.len();
    let w = spec.wheel_count();
    let mut sk = Skeleton::default();
    let mut id = 0;
    for i in 0..w {
        let (a1, a2) = (a[i], a[(i + 1) % m]);
        sk.pieces.push(wheel_piece(id, a1, a2));
        id += (a1 + a2) as Id;
    }
    let glue = if spec.genus == 1 { w } else { w - 1 };
    for i in 0..glue {
        let p = &sk.pieces[i];
        let q = &sk.pieces[(i + 1) % w];
        let downs: Vec<Id> = p.feet.iter().filter(|f| f.down).map(|f| f.id).collect();
        let ups: Vec<Id> = q.feet.iter().filter(|f| f.up).map(|f| f.id).collect();
        let n = downs.len();
        sk.families.push(Family { downs, ups, offset: FAMILY_OFFSET % n });
    }
    sk.normalize();
    Ok(sk)
}

pub fn make_dualizable(spec: &DualizableSpec) -> Result<ChordalRibbonGraph> {
    dualizable_skeleton(spec)?.to_graph()
}

/// Reads (genus, weights) back from a skeleton of dualizable shape.
pub fn dualizable_weights(sk: &Skeleton) -> Result<DualizableSpec> {
    let bad = |s: &str| CpmError::Invalid(format!("not dualizable: {s}"));
    let n = sk.pieces.len();
    if n == 0 {
        return Err(bad("empty"));
    }
    let mut down_fam = vec![None; n];
    let mut up_fam = vec![None; n];
    for (k, fam) in sk.families.iter().enumerate() {
        let pd = sk.locate(fam.downs[0]).ok_or_else(|| bad("dangling family"))?.0;
        let pu = sk.locate(fam.ups[0]).ok_or_else(|| bad("dangling family"))?.0;
        if down_fam[pd].replace(k).is_some() || up_fam[pu].replace(k).is_some() {
            return Err(bad("piece carries two families on one side"));
        }
    }
    let count = |p: &Piece, s: Side| p.feet.iter().filter(|f| f.has(s)).count();
    for (i, p) in sk.pieces.iter().enumerate() {
        if !p.circle || p.feet.iter().any(|f| f.side().is_none()) {
            return Err(bad("pieces must be wheels with single-sided feet"));
        }
        if let Some(k) = down_fam[i] {
            if sk.families[k].len() != count(p, Side::Down) {
                return Err(bad("partially glued downward spokes"));
            }
        }
        if let Some(k) = up_fam[i] {
            if sk.families[k].len() != count(p, Side::Up) {
                return Err(bad("partially glued upward spokes"));
            }
        }
    }
    let next = |i: usize| down_fam[i].map(|k| sk.locate(sk.families[k].ups[0]).unwrap().0);
    let starts: Vec<usize> = (0..n).filter(|i| up_fam[*i].is_none()).collect();
    let (genus, start) = match starts.as_slice() {
        [] => (1u8, 0usize),
        [s] => (0u8, *s),
        _ => return Err(bad("disconnected chain")),
    };
    let mut weights = vec![count(&sk.pieces[start], Side::Up)];
    let mut cur = start;
    let mut visited = 1;
    loop {
        match next(cur) {
            None => {
                weights.push(count(&sk.pieces[cur], Side::Down));
                break;
            }
            Some(j) if j == start => break,
            Some(j) => {
                weights.push(count(&sk.pieces[j], Side::Up));
                cur = j;
                visited += 1;
                if visited > n {
                    return Err(bad("cycle without start"));
                }
            }
        }
    }
    if visited != n {
        return Err(bad("pieces not on one chain"));
    }
    if genus == 1 && next(cur) != Some(start) {
        return Err(bad("open cycle"));
    }
    DualizableSpec::new(genus, weights)
}

/// Line with one upward spoke; variant 2 takes the zero section along the
/// left ray and the spoke, leaving the right ray as the only non-zero edge.
pub fn make_pitchfork(variant: u8) -> Result<ChordalRibbonGraph> {
    let mut g = Skeleton {
        pieces: vec![Piece {
            circle: false,
            feet: vec![Foot::up(0)],
        }],
        families: vec![],
    }
    .to_graph()?;
    match variant {
        1 => Ok(g),
        2 => {
            let s = spoke_half(SpokeRef { foot: 0, side: Side::Up });
            g.zero = [zin(0), s].into();
            g.forward = [s].into();
            Ok(g)
        }
        _ => Err(CpmError::Invalid(format!("pitchfork variant {variant}"))),
    }
}
