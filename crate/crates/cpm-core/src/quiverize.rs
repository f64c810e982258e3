//! Fishbones over a line or circle, their partition into cells, and the quiver
//! whose arrows are the spokes.

use num::rational::BigRational;
use num::{One, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{CpmError, Result};
use crate::field::{Field, Scalar};
use crate::homalg::{cone, ChainComplex, ChainMap};
use crate::ribbon::{ChordalRibbonGraph, Foot, Piece, Side, Skeleton};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Base {
    Line,
    Circle,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FishFoot {
    pub pos: BigRational,
    pub up: bool,
    pub down: bool,
}

/// Circle positions live in [0, 1).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fishbone {
    pub base: Base,
    pub feet: Vec<FishFoot>,
}

fn rat(s: &str) -> Result<BigRational> {
    match Field::Q.parse(s)? {
        Scalar::Q(q) => Ok(q),
        Scalar::Fp { .. } => unreachable!(),
    }
}

fn rat_text(q: &BigRational) -> String {
    Scalar::Q(q.clone()).to_text()
}

impl Fishbone {
    pub fn new(base: Base, feet: Vec<FishFoot>) -> Result<Fishbone> {
        let f = Fishbone { base, feet };
        f.check()?;
        Ok(f)
    }

    /// Feet at 1, 2, ..., n (or i/(n+1) on the circle) with the given flags.
    pub fn evenly(base: Base, flags: &[(bool, bool)]) -> Result<Fishbone> {
        let n = flags.len() as i64;
        let feet = flags
            .iter()
            .enumerate()
            .map(|(i, (u, d))| FishFoot {
                pos: match base {
                    Base::Line => BigRational::from_integer((i as i64 + 1).into()),
                    Base::Circle => BigRational::new((i as i64).into(), (n + 1).into()),
                },
                up: *u,
                down: *d,
            })
            .collect();
        Fishbone::new(base, feet)
    }

    fn check(&self) -> Result<()> {
        if self.base == Base::Circle && self.feet.is_empty() {
            return Err(CpmError::Invalid("circle fishbone needs at least one spoke".into()));
        }
        for w in self.feet.windows(2) {
            if w[0].pos >= w[1].pos {
                return Err(CpmError::Invalid("foot positions must be strictly increasing".into()));
            }
        }
        for f in &self.feet {
            if !f.up && !f.down {
                return Err(CpmError::Invalid("foot without spokes".into()));
            }
            if self.base == Base::Circle && (f.pos < BigRational::zero() || f.pos >= BigRational::one()) {
                return Err(CpmError::Invalid("circle positions must lie in [0,1)".into()));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "base": self.base,
            "feet": self.feet.iter().map(|f| json!({"pos": rat_text(&f.pos), "up": f.up, "down": f.down})).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Fishbone> {
        #[derive(Deserialize)]
        struct FootJ {
            pos: String,
            up: bool,
            down: bool,
        }
        #[derive(Deserialize)]
        struct FishJ {
            base: Base,
            feet: Vec<FootJ>,
        }
        let fj: FishJ = serde_json::from_value(v.clone()).map_err(|e| CpmError::Parse(e.to_string()))?;
        if fj.feet.len() > 4096 {
            return Err(CpmError::Parse("too many feet".into()));
        }
        let feet = fj
            .feet
            .into_iter()
            .map(|f| Ok(FishFoot { pos: rat(&f.pos)?, up: f.up, down: f.down }))
            .collect::<Result<Vec<_>>>()?;
        Fishbone::new(fj.base, feet)
    }

    /// Mirror image: the base orientation is reversed, so up and down swap.
    pub fn reversed(&self) -> Fishbone {
        let flip = |p: &BigRational| match self.base {
            Base::Line => -p.clone(),
            Base::Circle => {
                if p.is_zero() {
                    p.clone()
                } else {
                    BigRational::one() - p
                }
            }
        };
        let mut feet: Vec<FishFoot> = self
            .feet
            .iter()
            .map(|f| FishFoot { pos: flip(&f.pos), up: f.down, down: f.up })
            .collect();
        feet.sort_by(|a, b| a.pos.cmp(&b.pos));
        Fishbone { base: self.base, feet }
    }

    /// The chordal graph of this fishbone; foot ids follow position order.
    pub fn skeleton(&self) -> Skeleton {
        Skeleton {
            pieces: vec![Piece {
                circle: self.base == Base::Circle,
                feet: self
                    .feet
                    .iter()
                    .enumerate()
                    .map(|(i, f)| Foot { id: i as u32, up: f.up, down: f.down })
                    .collect(),
            }],
            families: vec![],
        }
    }

    pub fn to_graph(&self) -> Result<ChordalRibbonGraph> {
        self.skeleton().to_graph()
    }
}

/// An endpoint; `None` on an interval side means unbounded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct End {
    pub at: BigRational,
    pub closed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PartitionCell {
    Point(BigRational),
    /// On a circle an interval with lo ≥ hi wraps through 0.
    Interval { lo: Option<End>, hi: Option<End> },
}

impl PartitionCell {
    pub fn contains(&self, p: &BigRational, base: Base) -> bool {
        match self {
            PartitionCell::Point(x) => x == p,
            PartitionCell::Interval { lo, hi } => {
                let above = |e: &Option<End>| match e {
                    None => true,
                    Some(e) => p > &e.at || (e.closed && p == &e.at),
                };
                let below = |e: &Option<End>| match e {
                    None => true,
                    Some(e) => p < &e.at || (e.closed && p == &e.at),
                };
                let wraps = base == Base::Circle
                    && matches!((lo, hi), (Some(a), Some(b)) if a.at >= b.at);
                if wraps {
                    above(lo) || below(hi)
                } else {
                    above(lo) && below(hi)
                }
            }
        }
    }

    /// Points of the closure that could meet another cell: endpoints.
    fn closure_points(&self) -> Vec<BigRational> {
        match self {
            PartitionCell::Point(x) => vec![x.clone()],
            PartitionCell::Interval { lo, hi } => {
                lo.iter().chain(hi.iter()).map(|e| e.at.clone()).collect()
            }
        }
    }

    pub fn to_json(&self) -> Value {
        let end = |e: &Option<End>| match e {
            None => Value::Null,
            Some(e) => json!({"at": rat_text(&e.at), "closed": e.closed}),
        };
        match self {
            PartitionCell::Point(x) => json!({"kind": "point", "at": rat_text(x)}),
            PartitionCell::Interval { lo, hi } => json!({"kind": "interval", "lo": end(lo), "hi": end(hi)}),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            PartitionCell::Point(x) => format!("{{{}}}", rat_text(x)),
            PartitionCell::Interval { lo, hi } => {
                let l = match lo {
                    None => "(-inf".to_string(),
                    Some(e) => format!("{}{}", if e.closed { "[" } else { "(" }, rat_text(&e.at)),
                };
                let h = match hi {
                    None => "inf)".to_string(),
                    Some(e) => format!("{}{}", rat_text(&e.at), if e.closed { "]" } else { ")" }),
                };
                format!("{l},{h}")
            }
        }
    }
}

/// Closure of J meets I.
pub fn closure_meets(j: &PartitionCell, i: &PartitionCell, base: Base) -> bool {
    j.closure_points().iter().any(|p| i.contains(p, base))
}

pub fn partition(f: &Fishbone) -> Result<Vec<PartitionCell>> {
    f.check()?;
    let feet = &f.feet;
    let k = feet.len();
    let up_only = |x: &FishFoot| x.up && !x.down;
    let down_only = |x: &FishFoot| x.down && !x.up;
    let after = |i: usize| End { at: feet[i].pos.clone(), closed: up_only(&feet[i]) };
    let before = |i: usize| End { at: feet[i].pos.clone(), closed: down_only(&feet[i]) };
    let mut cells = Vec::new();
    match f.base {
        Base::Line => {
            if k == 0 {
                return Ok(vec![PartitionCell::Interval { lo: None, hi: None }]);
            }
            cells.push(PartitionCell::Interval { lo: None, hi: Some(before(0)) });
            for i in 0..k {
                if feet[i].up && feet[i].down {
                    cells.push(PartitionCell::Point(feet[i].pos.clone()));
                }
                let hi = (i + 1 < k).then(|| before(i + 1));
                cells.push(PartitionCell::Interval { lo: Some(after(i)), hi });
            }
        }
        Base::Circle => {
            for i in 0..k {
                if feet[i].up && feet[i].down {
                    cells.push(PartitionCell::Point(feet[i].pos.clone()));
                }
                cells.push(PartitionCell::Interval {
                    lo: Some(after(i)),
                    hi: Some(before((i + 1) % k)),
                });
            }
        }
    }
    Ok(cells)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Left,
    Right,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuiverArrow {
    pub source: usize,
    pub target: usize,
    pub direction: Direction,
    /// (foot index, side) of the originating spoke.
    pub foot: usize,
    pub side: Side,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineQuiver {
    pub base: Base,
    pub nodes: Vec<PartitionCell>,
    pub arrows: Vec<QuiverArrow>,
}

impl LineQuiver {
    pub fn cyclic(&self) -> bool {
        self.base == Base::Circle
    }

    /// Arrow pattern read left to right, e.g. "←←→→".
    pub fn pattern(&self) -> String {
        self.arrows
            .iter()
            .map(|a| match a.direction {
                Direction::Left => '←',
                Direction::Right => '→',
            })
            .collect()
    }

    pub fn arrow_of(&self, foot: usize, side: Side) -> Option<usize> {
        self.arrows.iter().position(|a| a.foot == foot && a.side == side)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "shape": if self.cyclic() { "cycle" } else { "line" },
            "nodes": self.nodes.iter().map(PartitionCell::to_json).collect::<Vec<_>>(),
            "arrows": self.arrows.iter().map(|a| json!({
                "source": a.source,
                "target": a.target,
                "direction": a.direction,
                "spoke": {"foot": a.foot, "side": a.side},
            })).collect::<Vec<_>>(),
        })
    }

    /// Plain structure: node count and (source, target) pairs.
    pub fn shape(&self) -> (usize, Vec<(usize, usize)>) {
        (self.nodes.len(), self.arrows.iter().map(|a| (a.source, a.target)).collect())
    }
}

/// Arrows follow the spokes: an upward spoke at x gives an arrow from the cell
/// containing x to the cell just left of x, a downward one to the cell just right.
pub fn quiver_of(f: &Fishbone) -> Result<LineQuiver> {
    let cells = partition(f)?;
    let n = cells.len();
    let mut arrows = Vec::new();
    // index of the cell immediately left of foot i, the point cell (if any), and the one right
    let mut idx = match f.base {
        Base::Line => 0usize,
        Base::Circle => n - 1,
    };
    for (i, ft) in f.feet.iter().enumerate() {
        let left = idx % n;
        let (point, right) = if ft.up && ft.down {
            (Some((left + 1) % n), (left + 2) % n)
        } else {
            (None, (left + 1) % n)
        };
        if ft.up {
            let src = point.unwrap_or(right);
            arrows.push(QuiverArrow { source: src, target: left, direction: Direction::Left, foot: i, side: Side::Up });
        }
        if ft.down {
            let src = point.unwrap_or(left);
            arrows.push(QuiverArrow { source: src, target: right, direction: Direction::Right, foot: i, side: Side::Down });
        }
        idx = right;
    }
    Ok(LineQuiver { base: f.base, nodes: cells, arrows })
}

/// Quiver of a skeleton piece. On a circle node i is the cell right of foot i;
/// on a line node 0 is the left ray and node i+1 the cell right of foot i.
pub fn piece_quiver(p: &Piece) -> Result<LineQuiver> {
    let flags: Vec<(bool, bool)> = p.feet.iter().map(|f| (f.up, f.down)).collect();
    if flags.iter().any(|(u, d)| *u && *d) {
        return Err(CpmError::Invalid("piece quivers need single-sided feet".into()));
    }
    quiver_of(&Fishbone::evenly(if p.circle { Base::Circle } else { Base::Line }, &flags)?)
}

/// A representation of a quiver in complexes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuiverRepObject {
    pub quiver: LineQuiver,
    pub nodes: Vec<ChainComplex>,
    pub arrows: Vec<ChainMap>,
}

impl QuiverRepObject {
    pub fn new(quiver: LineQuiver, nodes: Vec<ChainComplex>, arrows: Vec<ChainMap>) -> Result<QuiverRepObject> {
        let o = QuiverRepObject { quiver, nodes, arrows };
        let errs = o.diagnostics();
        if !errs.is_empty() {
            return Err(CpmError::Invalid(errs.join("; ")));
        }
        Ok(o)
    }

    pub fn field(&self) -> Field {
        self.nodes.first().map_or(Field::Q, ChainComplex::field)
    }

    pub fn diagnostics(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.nodes.len() != self.quiver.nodes.len() || self.arrows.len() != self.quiver.arrows.len() {
            out.push("representation does not match quiver size".into());
            return out;
        }
        for (i, c) in self.nodes.iter().enumerate() {
            for e in c.validate() {
                out.push(format!("node {i}: {e}"));
            }
        }
        for (k, (m, a)) in self.arrows.iter().zip(&self.quiver.arrows).enumerate() {
            if m.source() != &self.nodes[a.source] || m.target() != &self.nodes[a.target] {
                out.push(format!("arrow {k}: endpoints do not match"));
            } else if m.check_closed_degree0().is_err() {
                out.push(format!("arrow {k}: not a closed degree-0 map"));
            }
        }
        out
    }

    pub fn cone_at(&self, arrow: usize) -> Result<ChainComplex> {
        cone(&self.arrows[arrow])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Selector {
    Cell(usize),
    Spoke { foot: usize, side: Side },
    Foot(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LocalObject {
    Complex(ChainComplex),
    /// Cells around a foot in base order, with arrows between positions in that list.
    Diagram { nodes: Vec<ChainComplex>, arrows: Vec<(usize, usize, ChainMap)> },
}

pub fn restriction_table(f: &Fishbone, rep: &QuiverRepObject, sel: Selector) -> Result<LocalObject> {
    let q = quiver_of(f)?;
    if q != rep.quiver {
        return Err(CpmError::Invalid("representation is not on this fishbone's quiver".into()));
    }
    match sel {
        Selector::Cell(i) => rep
            .nodes
            .get(i)
            .cloned()
            .map(LocalObject::Complex)
            .ok_or_else(|| CpmError::Invalid(format!("no cell {i}"))),
        Selector::Spoke { foot, side } => {
            let a = q
                .arrow_of(foot, side)
                .ok_or_else(|| CpmError::Invalid(format!("no {side:?} spoke at foot {foot}")))?;
            Ok(LocalObject::Complex(rep.cone_at(a)?))
        }
        Selector::Foot(i) => {
            let arrows: Vec<usize> = (0..q.arrows.len()).filter(|a| q.arrows[*a].foot == i).collect();
            if arrows.is_empty() {
                return Err(CpmError::Invalid(format!("no foot {i}")));
            }
            // local positions: left cell, optional point cell, right cell
            let a0 = &q.arrows[arrows[0]];
            let (left, mid, right) = match (a0.side, arrows.len()) {
                (_, 2) => (a0.target, Some(a0.source), q.arrows[arrows[1]].target),
                (Side::Up, _) => (a0.target, None, a0.source),
                (Side::Down, _) => (a0.source, None, a0.target),
            };
            let mut cells = vec![left];
            cells.extend(mid);
            cells.push(right);
            let (l, r) = (0, cells.len() - 1);
            let m = mid.map(|_| 1);
            let mut arr = Vec::new();
            for &a in &arrows {
                let qa = &q.arrows[a];
                let (s, t) = match (qa.side, m) {
                    (Side::Up, Some(m)) => (m, l),
                    (Side::Down, Some(m)) => (m, r),
                    (Side::Up, None) => (r, l),
                    (Side::Down, None) => (l, r),
                };
                arr.push((s, t, rep.arrows[a].clone()));
            }
            Ok(LocalObject::Diagram {
                nodes: cells.iter().map(|c| rep.nodes[*c].clone()).collect(),
                arrows: arr,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> BigRational {
        rat(s).unwrap()
    }

    fn botplustop() -> Fishbone {
        Fishbone::new(
            Base::Line,
            vec![
                FishFoot { pos: q("-1"), up: true, down: false },
                FishFoot { pos: q("0"), up: true, down: true },
                FishFoot { pos: q("1"), up: false, down: true },
            ],
        )
        .unwrap()
    }

    #[test]
    fn a5_example() {
        let f = botplustop();
        let cells: Vec<String> = partition(&f).unwrap().iter().map(|c| c.describe()).collect();
        assert_eq!(cells, ["(-inf,-1)", "[-1,0)", "{0}", "(0,1]", "(1,inf)"]);
        let qv = quiver_of(&f).unwrap();
        assert_eq!(qv.shape(), (5, vec![(1, 0), (2, 1), (2, 3), (3, 4)]));
        assert_eq!(qv.pattern(), "←←→→");
    }

    #[test]
    fn single_up_spoke() {
        let f = Fishbone::evenly(Base::Line, &[(true, false)]).unwrap();
        let cells: Vec<String> = partition(&f).unwrap().iter().map(|c| c.describe()).collect();
        assert_eq!(cells, ["(-inf,1)", "[1,inf)"]);
    }

    #[test]
    fn kronecker_circle() {
        let f = Fishbone::evenly(Base::Circle, &[(true, true)]).unwrap();
        let qv = quiver_of(&f).unwrap();
        assert_eq!(qv.shape(), (2, vec![(0, 1), (0, 1)]));
    }

    #[test]
    fn closure_rule_agrees() {
        for f in [botplustop(), Fishbone::evenly(Base::Circle, &[(true, false), (false, true), (true, true)]).unwrap()] {
            let qv = quiver_of(&f).unwrap();
            for a in &qv.arrows {
                assert!(closure_meets(&qv.nodes[a.target], &qv.nodes[a.source], f.base));
            }
        }
    }
}
