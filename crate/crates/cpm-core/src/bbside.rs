//! B-side presentations: Perf of orbifold lines ℙ¹(a₁,a₂) as cyclic quivers,
//! tcnc curves as equalizers of such pieces glued along stalk functors, and the
//! comparison against CPM covers of dualizable graphs.
//!
//! Character conventions. At the point with isotropy a₂ the character χ selects
//! the χ-th downward spoke in run order. At the point with isotropy a₁ the
//! labeling runs the other way: χ selects the up spoke at run index −χ mod a₁.
//! A node identifies S²_χ on one branch with S¹_{−χ} on the other.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::cpmcat::random::{random_glued_object_with, GenOptions};
use crate::cpmcat::{cover_of, hom_complex_glued, CoverPresentation, GluedObject, Overlap, StalkSel};
use crate::error::{CpmError, Result};
use crate::field::Field;
use crate::homalg::ChainComplex;
use crate::quiverize::{piece_quiver, Direction, LineQuiver, QuiverRepObject};
use crate::ribbon::{make_dualizable, wheel_piece, ChordalRibbonGraph, DualizableSpec, Skeleton};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BbCurve {
    pub a1: usize,
    pub a2: usize,
}

impl BbCurve {
    pub fn new(a1: usize, a2: usize) -> Result<BbCurve> {
        if a1 == 0 || a2 == 0 {
            return Err(CpmError::Invalid("isotropy orders must be positive".into()));
        }
        Ok(BbCurve { a1, a2 })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TcncCurve {
    pub genus: u8,
    pub w: Vec<usize>,
}

impl TcncCurve {
    pub fn new(genus: u8, w: Vec<usize>) -> Result<TcncCurve> {
        let s = DualizableSpec::new(genus, w)?;
        Ok(TcncCurve { genus: s.genus, w: s.weights })
    }

    /// Components of the normalization.
    pub fn components(&self) -> Vec<BbCurve> {
        let m = self.w.len();
        let k = m - 1 + self.genus as usize;
        (0..k).map(|i| BbCurve { a1: self.w[i], a2: self.w[(i + 1) % m] }).collect()
    }

    pub fn nodes(&self) -> usize {
        self.w.len() + 2 * self.genus as usize - 2
    }

    /// Curves isomorphic to this one by relabeling the W-vector: reversal, and
    /// in genus 1 also cyclic rotation. The first entry is the identity.
    pub fn relabelings(&self) -> Vec<(String, TcncCurve)> {
        let m = self.w.len();
        let mut out = Vec::new();
        for rev in [false, true] {
            let base: Vec<usize> = if rev { self.w.iter().rev().copied().collect() } else { self.w.clone() };
            let rots = if self.genus == 1 { m } else { 1 };
            for r in 0..rots {
                let mut w = base.clone();
                w.rotate_left(r);
                let name = match (rev, r) {
                    (false, 0) => "identity".to_string(),
                    (false, r) => format!("rotation {r}"),
                    (true, 0) => "reversal".to_string(),
                    (true, r) => format!("reversal+rotation {r}"),
                };
                out.push((name, TcncCurve { genus: self.genus, w }));
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Character {
    /// 1 for the point with isotropy a₁, 2 for a₂.
    pub point: u8,
    pub chi: usize,
}

/// One piece: the cyclic quiver with a₁ + a₂ nodes and one arrow per character.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BbPiece {
    pub curve: BbCurve,
    pub quiver: LineQuiver,
    /// Character of each arrow, indexed like `quiver.arrows`.
    pub labels: Vec<Character>,
}

impl BbPiece {
    pub fn arrow_of(&self, c: Character) -> Option<usize> {
        self.labels.iter().position(|l| *l == c)
    }

    /// Rotates the labeling at each point by the given amounts.
    pub fn relabel(&self, r1: usize, r2: usize) -> BbPiece {
        let mut out = self.clone();
        for l in &mut out.labels {
            let (a, r) = if l.point == 1 { (self.curve.a1, r1) } else { (self.curve.a2, r2) };
            l.chi = (l.chi + r) % a;
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let mut q = self.quiver.to_json();
        q["weights"] = json!([self.curve.a1, self.curve.a2]);
        q["characters"] = json!(self.labels.iter().map(|c| json!({"point": c.point, "chi": c.chi})).collect::<Vec<_>>());
        q
    }
}

pub fn perf_bb(a1: usize, a2: usize) -> Result<BbPiece> {
    let curve = BbCurve::new(a1, a2)?;
    let quiver = piece_quiver(&wheel_piece(0, a1, a2))?;
    let mut labels = Vec::with_capacity(a1 + a2);
    for k in 0..a1 {
        labels.push(Character { point: 1, chi: (a1 - k) % a1 });
    }
    for k in 0..a2 {
        labels.push(Character { point: 2, chi: k });
    }
    Ok(BbPiece { curve, quiver, labels })
}

/// S^i_χ on one piece: evaluates objects by the cone of the selected arrow.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StalkFunctor {
    pub piece: usize,
    pub character: Character,
    pub arrow: usize,
}

impl StalkFunctor {
    pub fn eval(&self, rep: &QuiverRepObject) -> Result<ChainComplex> {
        rep.cone_at(self.arrow)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CategoryPresentation {
    pub curve: TcncCurve,
    pub pieces: Vec<BbPiece>,
    /// (S² on piece i, S¹ on the next piece) identified at a node.
    pub gluing: Vec<(StalkFunctor, StalkFunctor)>,
}

pub fn stalk_functor_s(pres: &CategoryPresentation, piece: usize, point: u8, chi: usize) -> Result<StalkFunctor> {
    let p = pres.pieces.get(piece).ok_or_else(|| CpmError::Invalid(format!("no piece {piece}")))?;
    let a = match point {
        1 => p.curve.a1,
        2 => p.curve.a2,
        _ => return Err(CpmError::Invalid(format!("point must be 1 or 2, got {point}"))),
    };
    if chi >= a {
        return Err(CpmError::Invalid(format!("character {chi} out of range mod {a}")));
    }
    let character = Character { point, chi };
    let arrow = p.arrow_of(character).ok_or_else(|| CpmError::Invalid("unlabeled character".into()))?;
    Ok(StalkFunctor { piece, character, arrow })
}

pub fn perf_tcnc(c: &TcncCurve) -> Result<CategoryPresentation> {
    let c = TcncCurve::new(c.genus, c.w.clone())?;
    let pieces = c.components().iter().map(|b| perf_bb(b.a1, b.a2)).collect::<Result<Vec<_>>>()?;
    let k = pieces.len();
    let mut pres = CategoryPresentation { curve: c.clone(), pieces, gluing: vec![] };
    let glued = if c.genus == 1 { k } else { k - 1 };
    for i in 0..glued {
        let j = (i + 1) % k;
        let a = pres.pieces[i].curve.a2;
        for chi in 0..a {
            let s2 = stalk_functor_s(&pres, i, 2, chi)?;
            let s1 = stalk_functor_s(&pres, j, 1, (a - chi) % a)?;
            pres.gluing.push((s2, s1));
        }
    }
    Ok(pres)
}

impl CategoryPresentation {
    pub fn to_json(&self) -> Value {
        json!({
            "genus": self.curve.genus,
            "w": self.curve.w,
            "pieces": self.pieces.iter().map(BbPiece::to_json).collect::<Vec<_>>(),
            "gluing": self.gluing.iter().map(|(a, b)| json!({
                "from": {"piece": a.piece, "arrow": a.arrow, "point": a.character.point, "chi": a.character.chi},
                "to": {"piece": b.piece, "arrow": b.arrow, "point": b.character.point, "chi": b.character.chi},
            })).collect::<Vec<_>>(),
        })
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct HmsReport {
    pub genus: u8,
    pub w: Vec<usize>,
    /// Relabeling of the W-vector under which the match was found.
    pub symmetry: Option<String>,
    /// Graph piece matched to each B-side piece.
    pub piece_map: Vec<usize>,
    /// Node rotation of each piece quiver.
    pub quiver_rotation: Vec<usize>,
    /// Character shift at each node.
    pub node_shift: Vec<usize>,
    pub pieces_ok: bool,
    pub gluing_ok: bool,
    pub sample_ok: bool,
    pub samples: usize,
    pub messages: Vec<String>,
}

impl HmsReport {
    pub fn passed(&self) -> bool {
        self.pieces_ok && self.gluing_ok && self.sample_ok
    }
}

/// r with graph arrow (k + r) matching B arrow k, when the quivers agree up to rotation.
fn quiver_rotation(b: &LineQuiver, g: &LineQuiver) -> Option<usize> {
    let n = b.nodes.len();
    if n != g.nodes.len() || b.arrows.len() != g.arrows.len() || b.cyclic() != g.cyclic() {
        return None;
    }
    let m = b.arrows.len();
    (0..n).find(|&r| {
        (0..m).all(|k| {
            let (x, y) = (&b.arrows[k], &g.arrows[(k + r) % m]);
            x.direction == y.direction && (x.source + r) % n == y.source && (x.target + r) % n == y.target
        })
    })
}

/// Graph piece reached through the family leaving piece p along its down spokes.
fn successor(sk: &Skeleton, p: usize) -> Option<usize> {
    sk.families.iter().find_map(|f| {
        let (pd, _) = sk.locate(f.downs[0])?;
        if pd == p {
            sk.locate(f.ups[0]).map(|x| x.0)
        } else {
            None
        }
    })
}

struct Matched {
    piece_map: Vec<usize>,
    rot: Vec<usize>,
}

fn match_pieces(pres: &CategoryPresentation, cov: &CoverPresentation, sk: &Skeleton) -> Option<Matched> {
    let k = pres.pieces.len();
    if k != cov.pieces.len() {
        return None;
    }
    'start: for p0 in 0..k {
        let mut map = vec![p0];
        for i in 1..k {
            match successor(sk, map[i - 1]) {
                Some(p) if !map.contains(&p) => map.push(p),
                _ => continue 'start,
            }
        }
        let closes = successor(sk, map[k - 1]);
        match pres.curve.genus {
            1 if closes != Some(p0) => continue,
            0 if closes.is_some() || sk.families.iter().any(|f| sk.locate(f.ups[0]).map(|x| x.0) == Some(p0)) => continue,
            _ => {}
        }
        let rot: Option<Vec<usize>> =
            (0..k).map(|i| quiver_rotation(&pres.pieces[i].quiver, &cov.pieces[map[i]])).collect();
        if let Some(rot) = rot {
            return Some(Matched { piece_map: map, rot });
        }
    }
    None
}

/// The B-side cover realizing a matched presentation, and the overlap of the
/// graph cover corresponding to each of its overlaps.
fn b_cover(pres: &CategoryPresentation, cov: &CoverPresentation, m: &Matched, shifts: &[usize]) -> Result<(CoverPresentation, Vec<usize>)> {
    let mut overlaps = Vec::new();
    let mut origin = Vec::new();
    let mut node = 0;
    let mut seen_piece = None;
    for (s2, s1) in &pres.gluing {
        if seen_piece != Some(s2.piece) {
            if seen_piece.is_some() {
                node += 1;
            }
            seen_piece = Some(s2.piece);
        }
        let a = pres.pieces[s2.piece].curve.a2;
        // rotate the partner character by the node shift found on the graph side
        let partner = Character { point: 1, chi: (s1.character.chi + shifts[node]) % a };
        let to_arrow = pres.pieces[s1.piece].arrow_of(partner).ok_or_else(|| CpmError::Invalid("missing label".into()))?;
        let from = (s2.piece, StalkSel::Arrow(s2.arrow));
        let to = (s1.piece, StalkSel::Arrow(to_arrow));
        let gfrom = (m.piece_map[s2.piece], StalkSel::Arrow(graph_arrow(cov, m, s2.piece, s2.arrow)));
        let gto = (m.piece_map[s1.piece], StalkSel::Arrow(graph_arrow(cov, m, s1.piece, to_arrow)));
        let k = cov
            .overlaps
            .iter()
            .position(|o| o.from == gfrom && o.to == gto)
            .ok_or_else(|| CpmError::Invalid("B-side gluing has no graph counterpart".into()))?;
        overlaps.push(Overlap { from, to });
        origin.push(k);
    }
    let pieces = pres.pieces.iter().map(|p| p.quiver.clone()).collect();
    Ok((CoverPresentation { pieces, overlaps, skeleton: None }, origin))
}

fn graph_arrow(cov: &CoverPresentation, m: &Matched, piece: usize, arrow: usize) -> usize {
    (arrow + m.rot[piece]) % cov.pieces[m.piece_map[piece]].arrows.len()
}

fn b_arrow(cov: &CoverPresentation, m: &Matched, piece: usize, garrow: usize) -> usize {
    let n = cov.pieces[m.piece_map[piece]].arrows.len();
    (garrow + n - m.rot[piece] % n) % n
}

/// Checks the node identifications; returns the character shift per node.
fn match_gluing(pres: &CategoryPresentation, cov: &CoverPresentation, m: &Matched, msgs: &mut Vec<String>) -> Option<Vec<usize>> {
    if pres.gluing.len() != cov.overlaps.len() {
        msgs.push(format!("{} gluing pairs against {} graph overlaps", pres.gluing.len(), cov.overlaps.len()));
        return None;
    }
    let inv: BTreeMap<usize, usize> = m.piece_map.iter().enumerate().map(|(i, p)| (*p, i)).collect();
    // graph pairing per node, in characters: S²_χ on piece i ↦ S¹_χ' on piece i+1
    let mut per_node: BTreeMap<usize, BTreeMap<usize, usize>> = BTreeMap::new();
    for o in &cov.overlaps {
        let (StalkSel::Arrow(x), StalkSel::Arrow(y)) = (o.from.1, o.to.1) else {
            msgs.push("graph overlap is not between spoke stalks".into());
            return None;
        };
        let (bi, bj) = (inv[&o.from.0], inv[&o.to.0]);
        let c2 = pres.pieces[bi].labels[b_arrow(cov, m, bi, x)];
        let c1 = pres.pieces[bj].labels[b_arrow(cov, m, bj, y)];
        if c2.point != 2 || c1.point != 1 {
            msgs.push(format!("overlap on pieces {bi}->{bj} does not join a down spoke to an up spoke"));
            return None;
        }
        if bj != (bi + 1) % pres.pieces.len() {
            msgs.push(format!("overlap joins non-adjacent pieces {bi} and {bj}"));
            return None;
        }
        per_node.entry(bi).or_default().insert(c2.chi, c1.chi);
    }
    let mut shifts = Vec::new();
    for (i, pairs) in &per_node {
        let a = pres.pieces[*i].curve.a2;
        if pairs.len() != a {
            msgs.push(format!("node after piece {i}: {} of {a} characters glued", pairs.len()));
            return None;
        }
        // B side pairs χ with −χ; the graph may differ by one rotation
        let diff = |chi: usize| (pairs[&chi] + chi) % a;
        let s = diff(0);
        if (0..a).any(|chi| diff(chi) != s) {
            msgs.push(format!("node after piece {i}: identification is not a cyclic rotation of the character pairing"));
            return None;
        }
        shifts.push(s);
    }
    Some(shifts)
}

fn translate(x: &GluedObject, bcov: &CoverPresentation, m: &Matched, origin: &[usize]) -> Result<GluedObject> {
    let reps = m
        .piece_map
        .iter()
        .zip(&bcov.pieces)
        .zip(&m.rot)
        .map(|((p, q), r)| {
            let src = &x.reps[*p];
            let n = src.nodes.len();
            let na = src.arrows.len();
            // B node k and arrow k sit at graph index k + r
            let nodes = (0..n).map(|k| src.nodes[(k + r) % n].clone()).collect();
            let arrows = (0..na).map(|k| src.arrows[(k + r) % na].clone()).collect();
            QuiverRepObject::new(q.clone(), nodes, arrows)
        })
        .collect::<Result<Vec<_>>>()?;
    let u = origin.iter().map(|k| x.u[*k].clone()).collect();
    Ok(GluedObject { cover: bcov.clone(), reps, u })
}

fn profile(c: &ChainComplex) -> BTreeMap<i32, usize> {
    c.homology().0
}

/// Compares the B-side presentation of `c` with the cover of `g`, trying the
/// W-vector relabelings of `c` in turn. `samples` random objects are pushed
/// through both presentations and their hom homology compared pairwise.
pub fn hms_compare(c: &TcncCurve, g: &ChordalRibbonGraph, samples: usize, seed: u64) -> Result<HmsReport> {
    hms_compare_cover(c, &cover_of(g)?, samples, seed)
}

/// As `hms_compare`, on an explicit skeleton cover.
pub fn hms_compare_cover(c: &TcncCurve, cov: &CoverPresentation, samples: usize, seed: u64) -> Result<HmsReport> {
    let c = TcncCurve::new(c.genus, c.w.clone())?;
    let cov = cov.clone();
    let sk = cov.skeleton()?.clone();
    let mut rep = HmsReport { genus: c.genus, w: c.w.clone(), samples, ..Default::default() };
    let mut found = None;
    for (name, cand) in c.relabelings() {
        let pres = perf_tcnc(&cand)?;
        let Some(m) = match_pieces(&pres, &cov, &sk) else {
            rep.messages.push(format!("{name}: pieces do not match"));
            continue;
        };
        let mut msgs = Vec::new();
        match match_gluing(&pres, &cov, &m, &mut msgs) {
            Some(shifts) => {
                found = Some((name, pres, m, shifts));
                break;
            }
            None => rep.messages.extend(msgs.into_iter().map(|s| format!("{name}: {s}"))),
        }
    }
    let Some((name, pres, m, shifts)) = found else {
        return Ok(rep);
    };
    rep.symmetry = Some(name);
    rep.pieces_ok = true;
    rep.gluing_ok = true;
    rep.piece_map = m.piece_map.clone();
    rep.quiver_rotation = m.rot.clone();
    rep.node_shift = shifts.clone();
    let (bcov, origin) = b_cover(&pres, &cov, &m, &shifts)?;
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let opts = GenOptions { max_summands: 2, fluff: 1, degrees: 1 };
    let xs = (0..samples)
        .map(|_| random_glued_object_with(&cov, Field::Fp(32003), &mut r, &opts))
        .collect::<Result<Vec<_>>>()?;
    let ys = xs.iter().map(|x| translate(x, &bcov, &m, &origin)).collect::<Result<Vec<_>>>()?;
    rep.sample_ok = ys.iter().all(GluedObject::is_valid);
    for i in 0..samples {
        for j in 0..samples {
            let a = profile(&hom_complex_glued(&xs[i], &xs[j])?);
            let b = profile(&hom_complex_glued(&ys[i], &ys[j])?);
            if a != b {
                rep.sample_ok = false;
                rep.messages.push(format!("hom({i},{j}) homology differs: {a:?} vs {b:?}"));
            }
        }
    }
    Ok(rep)
}

/// hms_compare against the dualizable graph built from the curve's own W-vector.
pub fn hms_check(c: &TcncCurve, samples: usize, seed: u64) -> Result<HmsReport> {
    let g = make_dualizable(&DualizableSpec::new(c.genus, c.w.clone())?)?;
    hms_compare(c, &g, samples, seed)
}

/// Arrow direction pattern of a piece, for display.
pub fn pattern(p: &BbPiece) -> String {
    p.quiver
        .arrows
        .iter()
        .map(|a| if a.direction == Direction::Left { '←' } else { '→' })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beilinson_quiver() {
        let p = perf_bb(1, 1).unwrap();
        assert_eq!(p.quiver.shape(), (2, vec![(0, 1), (0, 1)]));
    }

    #[test]
    fn labels_are_a_bijection() {
        for a1 in 1..5 {
            for a2 in 1..5 {
                let p = perf_bb(a1, a2).unwrap();
                let mut l: Vec<_> = p.labels.iter().map(|c| (c.point, c.chi)).collect();
                l.sort();
                l.dedup();
                assert_eq!(l.len(), a1 + a2);
            }
        }
    }

    #[test]
    fn node_count() {
        assert_eq!(TcncCurve::new(0, vec![1, 2, 3]).unwrap().nodes(), 1);
        assert_eq!(TcncCurve::new(1, vec![1, 2, 3]).unwrap().nodes(), 3);
        assert_eq!(TcncCurve::new(0, vec![2, 5]).unwrap().nodes(), 0);
    }
}
