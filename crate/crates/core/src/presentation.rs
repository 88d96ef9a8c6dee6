//! Atoms, elementary relations, the weight functor and characteristic graphs.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::sync::{Arc, RwLock};

use serde::Serialize;

use crate::disk::{ccw_distance, ArcId, DiskObject};
use crate::error::{Error, Result};

/// Interned object handle, valid inside one [`Presentation`].
pub type ObjId = u32;

/// One letter: the elementary move along `arc` at `source`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Move {
    pub source: ObjId,
    pub arc: ArcId,
}

/// A positive word: arc ids read at successive objects starting at `source`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Word {
    pub source: ObjId,
    pub arcs: Vec<ArcId>,
}

impl Word {
    pub fn empty(source: ObjId) -> Self {
        Word {
            source,
            arcs: Vec::new(),
        }
    }

    pub fn new(source: ObjId, arcs: Vec<ArcId>) -> Self {
        Word { source, arcs }
    }

    pub fn letter(mv: Move) -> Self {
        Word {
            source: mv.source,
            arcs: vec![mv.arc],
        }
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }
}

/// Derived data of a move.
#[derive(Clone, Debug)]
pub struct Step {
    pub target: ObjId,
    /// Arc ids of the source mapped to arc ids of the target.
    pub correspondence: Vec<ArcId>,
    pub weight: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum RelationKind {
    Er1,
    Er2,
    Er3,
    Er4,
}

/// Tails of the relation with first letters `a` and `b`: `a` followed by
/// `ab` equals `b` followed by `ba`. Tails are arc ids read at successive
/// objects.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Complement {
    pub kind: RelationKind,
    pub ab: Vec<ArcId>,
    pub ba: Vec<ArcId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ElementaryRelation {
    pub source: ObjId,
    pub left: Vec<ArcId>,
    pub right: Vec<ArcId>,
    pub kind: RelationKind,
}

type Shifted = (ObjId, Arc<Vec<ArcId>>);

#[derive(Default)]
struct Interner {
    ids: HashMap<String, ObjId>,
    objects: Vec<Arc<DiskObject>>,
}

/// Shared context holding interned objects and memoised moves.
///
/// All caches sit behind read-write locks, so one instance can be used from
/// several threads.
#[derive(Default)]
pub struct Presentation {
    interner: RwLock<Interner>,
    steps: RwLock<HashMap<ObjId, Arc<Vec<Step>>>>,
    complements: RwLock<HashMap<(ObjId, ArcId, ArcId), Arc<Complement>>>,
    shifts: RwLock<HashMap<(ObjId, i64), Shifted>>,
}

/// Saturated diagram spanned by a set of atoms.
#[derive(Clone, Debug, Serialize)]
pub struct CharGraph {
    /// Object of every node; node 0 is the initial one.
    pub nodes: Vec<ObjId>,
    pub edges: Vec<(usize, ArcId, usize)>,
    pub rank: usize,
}

impl Presentation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&self, obj: &DiskObject) -> ObjId {
        if let Some(&id) = self.interner.read().unwrap().ids.get(obj.key()) {
            return id;
        }
        let mut w = self.interner.write().unwrap();
        if let Some(&id) = w.ids.get(obj.key()) {
            return id;
        }
        let id = w.objects.len() as ObjId;
        w.objects.push(Arc::new(obj.clone()));
        w.ids.insert(obj.key().to_string(), id);
        id
    }

    pub fn intern_key(&self, key: &str) -> Result<ObjId> {
        if let Some(&id) = self.interner.read().unwrap().ids.get(key) {
            return Ok(id);
        }
        Ok(self.intern(&DiskObject::parse_key(key)?))
    }

    pub fn object(&self, id: ObjId) -> Arc<DiskObject> {
        self.interner.read().unwrap().objects[id as usize].clone()
    }

    pub fn key(&self, id: ObjId) -> String {
        self.object(id).key().to_string()
    }

    pub fn arc_count(&self, id: ObjId) -> usize {
        self.object(id).arc_count()
    }

    /// Data of every atom at `x`, indexed by arc id.
    pub fn steps(&self, x: ObjId) -> Arc<Vec<Step>> {
        if let Some(s) = self.steps.read().unwrap().get(&x) {
            return s.clone();
        }
        let obj = self.object(x);
        let m = obj.m();
        let mut out = Vec::with_capacity(obj.arc_count());
        for a in 0..obj.arc_count() {
            let moved = obj.move_arcs(&[a]).expect("arc ids of an object are valid");
            let travelled: usize = moved.ends.iter().map(|&(s, t)| ccw_distance(s, t, m)).sum();
            assert!(travelled <= m, "negative weight at {} arc {a}", obj.key());
            out.push(Step {
                target: self.intern(&moved.target),
                correspondence: moved.correspondence,
                weight: m - travelled,
            });
        }
        let out = Arc::new(out);
        self.steps.write().unwrap().insert(x, out.clone());
        out
    }

    pub fn step(&self, mv: Move) -> Result<Step> {
        let steps = self.steps(mv.source);
        steps.get(mv.arc).cloned().ok_or(Error::InvalidArc {
            arc: mv.arc,
            count: steps.len(),
        })
    }

    pub fn target(&self, mv: Move) -> Result<ObjId> {
        Ok(self.step(mv)?.target)
    }

    /// The atoms at `x`, in arc order.
    pub fn atoms(&self, x: ObjId) -> Vec<Move> {
        (0..self.arc_count(x)).map(|arc| Move { source: x, arc }).collect()
    }

    pub fn weight(&self, mv: Move) -> Result<usize> {
        Ok(self.step(mv)?.weight)
    }

    /// Follows a sequence of arc ids from `x` and returns the end object.
    pub fn walk(&self, x: ObjId, arcs: &[ArcId]) -> Result<ObjId> {
        let mut cur = x;
        for &a in arcs {
            cur = self.step(Move { source: cur, arc: a })?.target;
        }
        Ok(cur)
    }

    /// Total weight of a word.
    pub fn word_weight(&self, x: ObjId, arcs: &[ArcId]) -> Result<usize> {
        let mut cur = x;
        let mut w = 0;
        for &a in arcs {
            let s = self.step(Move { source: cur, arc: a })?;
            w += s.weight;
            cur = s.target;
        }
        Ok(w)
    }

    /// Rigid shift of an object by `k` vertices, with the arc correspondence.
    pub fn shift(&self, x: ObjId, k: i64) -> (ObjId, Arc<Vec<ArcId>>) {
        if let Some(r) = self.shifts.read().unwrap().get(&(x, k)) {
            return r.clone();
        }
        let (obj, corr) = self.object(x).shift_with_correspondence(k);
        let r = (self.intern(&obj), Arc::new(corr));
        self.shifts.write().unwrap().insert((x, k), r.clone());
        r
    }

    /// Tails completing `a` and `b` to their elementary relation.
    pub fn complement(&self, x: ObjId, a: ArcId, b: ArcId) -> Result<Arc<Complement>> {
        if a == b {
            return Err(Error::SameMove);
        }
        if let Some(c) = self.complements.read().unwrap().get(&(x, a, b)) {
            return Ok(c.clone());
        }
        let c = Arc::new(self.compute_complement(x, a, b)?);
        let swapped = Arc::new(Complement {
            kind: c.kind,
            ab: c.ba.clone(),
            ba: c.ab.clone(),
        });
        let mut w = self.complements.write().unwrap();
        w.insert((x, a, b), c.clone());
        w.insert((x, b, a), swapped);
        Ok(c)
    }

    /// Complement of two moves, which must share their source.
    pub fn complement_moves(&self, a: Move, b: Move) -> Result<(Vec<Move>, Vec<Move>)> {
        if a.source != b.source {
            return Err(Error::SourceMismatch);
        }
        let c = self.complement(a.source, a.arc, b.arc)?;
        Ok((
            self.letters(self.target(a)?, &c.ab)?,
            self.letters(self.target(b)?, &c.ba)?,
        ))
    }

    /// Expands arc ids read from `x` into moves.
    pub fn letters(&self, x: ObjId, arcs: &[ArcId]) -> Result<Vec<Move>> {
        let mut cur = x;
        let mut out = Vec::with_capacity(arcs.len());
        for &arc in arcs {
            let mv = Move { source: cur, arc };
            cur = self.target(mv)?;
            out.push(mv);
        }
        Ok(out)
    }

    fn compute_complement(&self, x: ObjId, a: ArcId, b: ArcId) -> Result<Complement> {
        let obj = self.object(x);
        let count = obj.arc_count();
        for arc in [a, b] {
            if arc >= count {
                return Err(Error::InvalidArc { arc, count });
            }
        }
        let mut a_then_b = false;
        let mut b_then_a = false;
        let mut shared = false;
        for face in obj.faces() {
            let pos = |arc: ArcId| {
                face.darts
                    .iter()
                    .position(|d| matches!(d, crate::disk::Dart::Arc { arc: t, .. } if *t == arc))
            };
            if let (Some(ia), Some(ib)) = (pos(a), pos(b)) {
                let len = face.darts.len();
                shared = true;
                a_then_b |= (ia + 1) % len == ib;
                b_then_a |= (ib + 1) % len == ia;
            }
        }
        let kind = match (shared, a_then_b, b_then_a) {
            (false, _, _) => RelationKind::Er1,
            (true, false, false) => RelationKind::Er2,
            (true, true, true) => RelationKind::Er4,
            _ => RelationKind::Er3,
        };

        // Arc identities after one move, tracked through correspondences.
        let sa = self.step(Move { source: x, arc: a })?;
        let sb = self.step(Move { source: x, arc: b })?;
        let then = |s: &Step, first: ArcId, second: ArcId| -> Result<Vec<ArcId>> {
            let f = s.correspondence[first];
            let next = self.step(Move { source: s.target, arc: f })?;
            Ok(vec![f, next.correspondence[s.correspondence[second]]])
        };
        let (ab, ba) = match kind {
            RelationKind::Er1 | RelationKind::Er2 => {
                (vec![sa.correspondence[b]], vec![sb.correspondence[a]])
            }
            RelationKind::Er3 if a_then_b => (then(&sa, b, a)?, vec![sb.correspondence[a]]),
            RelationKind::Er3 => (vec![sa.correspondence[b]], then(&sb, a, b)?),
            RelationKind::Er4 => (then(&sa, b, a)?, then(&sb, a, b)?),
        };
        let left = self.walk(sa.target, &ab)?;
        let right = self.walk(sb.target, &ba)?;
        if left != right {
            return Err(Error::Postcondition(format!(
                "relation for arcs {a},{b} at {} does not close",
                obj.key()
            )));
        }
        Ok(Complement { kind, ab, ba })
    }

    /// The relation with first letters `a`, `b`.
    pub fn relation(&self, x: ObjId, a: ArcId, b: ArcId) -> Result<ElementaryRelation> {
        let c = self.complement(x, a, b)?;
        let mut left = vec![a];
        left.extend_from_slice(&c.ab);
        let mut right = vec![b];
        right.extend_from_slice(&c.ba);
        Ok(ElementaryRelation {
            source: x,
            left,
            right,
            kind: c.kind,
        })
    }

    /// One relation per unordered pair of atoms at `x`.
    pub fn relations(&self, x: ObjId) -> Result<Vec<ElementaryRelation>> {
        let n = self.arc_count(x);
        let mut out = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                out.push(self.relation(x, a, b)?);
            }
        }
        Ok(out)
    }

    /// Whether two words from `x` are valid and reach the same object.
    pub fn relation_is_sound(&self, x: ObjId, left: &[ArcId], right: &[ArcId]) -> Result<bool> {
        Ok(self.walk(x, left)? == self.walk(x, right)?)
    }

    /// Saturates the diagram spanned by the atoms `arcs` at `x`.
    pub fn characteristic_graph(&self, x: ObjId, arcs: &[ArcId], cap: usize) -> Result<CharGraph> {
        if arcs.is_empty() {
            return Err(Error::EmptySelection);
        }
        let mut g = Saturation {
            pres: self,
            parent: Vec::new(),
            obj: Vec::new(),
            edges: Vec::new(),
            cap,
        };
        let root = g.node(x)?;
        for &a in arcs {
            if a >= self.arc_count(x) {
                return Err(Error::InvalidArc {
                    arc: a,
                    count: self.arc_count(x),
                });
            }
            g.follow(root, a)?;
        }
        loop {
            let before = (g.parent.len(), g.live());
            let mut done: HashSet<(usize, ArcId, ArcId)> = HashSet::new();
            let mut progress = true;
            while progress {
                progress = false;
                for n in 0..g.parent.len() {
                    if g.find(n) != n {
                        continue;
                    }
                    let labels: Vec<ArcId> = g.edges[n].keys().copied().collect();
                    for (i, &a) in labels.iter().enumerate() {
                        for &b in &labels[i + 1..] {
                            let n = g.find(n);
                            if !done.insert((n, a, b)) {
                                continue;
                            }
                            progress = true;
                            let c = self.complement(g.obj[n], a, b)?;
                            let mut left = g.follow(n, a)?;
                            for &t in &c.ab {
                                left = g.follow(left, t)?;
                            }
                            let start = g.find(n);
                            let mut right = g.follow(start, b)?;
                            for &t in &c.ba {
                                right = g.follow(right, t)?;
                            }
                            g.union(left, right)?;
                        }
                    }
                }
            }
            if (g.parent.len(), g.live()) == before {
                break;
            }
        }
        Ok(g.finish(arcs.len()))
    }
}

struct Saturation<'p> {
    pres: &'p Presentation,
    parent: Vec<usize>,
    obj: Vec<ObjId>,
    edges: Vec<BTreeMap<ArcId, usize>>,
    cap: usize,
}

impl Saturation<'_> {
    fn node(&mut self, x: ObjId) -> Result<usize> {
        if self.parent.len() >= self.cap {
            return Err(Error::NodeCap(self.cap));
        }
        let id = self.parent.len();
        self.parent.push(id);
        self.obj.push(x);
        self.edges.push(BTreeMap::new());
        Ok(id)
    }

    fn find(&mut self, mut n: usize) -> usize {
        while self.parent[n] != n {
            self.parent[n] = self.parent[self.parent[n]];
            n = self.parent[n];
        }
        n
    }

    fn live(&mut self) -> usize {
        (0..self.parent.len()).filter(|&n| self.find(n) == n).count()
    }

    fn follow(&mut self, n: usize, a: ArcId) -> Result<usize> {
        let n = self.find(n);
        if let Some(&t) = self.edges[n].get(&a) {
            return Ok(self.find(t));
        }
        let target = self.pres.target(Move {
            source: self.obj[n],
            arc: a,
        })?;
        let t = self.node(target)?;
        self.edges[n].insert(a, t);
        Ok(t)
    }

    fn union(&mut self, p: usize, q: usize) -> Result<()> {
        let mut pending = vec![(p, q)];
        while let Some((p, q)) = pending.pop() {
            let (p, q) = (self.find(p), self.find(q));
            if p == q {
                continue;
            }
            if self.obj[p] != self.obj[q] {
                return Err(Error::Postcondition(
                    "relation identified nodes with different objects".into(),
                ));
            }
            let (keep, gone) = (p.min(q), p.max(q));
            self.parent[gone] = keep;
            let moved = std::mem::take(&mut self.edges[gone]);
            for (a, t) in moved {
                match self.edges[keep].get(&a) {
                    Some(&u) => pending.push((u, t)),
                    None => {
                        self.edges[keep].insert(a, t);
                    }
                }
            }
        }
        Ok(())
    }

    fn finish(mut self, rank: usize) -> CharGraph {
        let mut index: HashMap<usize, usize> = HashMap::new();
        let mut order = Vec::new();
        let mut queue = VecDeque::from([self.find(0)]);
        index.insert(self.find(0), 0);
        while let Some(n) = queue.pop_front() {
            order.push(n);
            let targets: Vec<(ArcId, usize)> = self.edges[n].iter().map(|(&a, &t)| (a, t)).collect();
            for (_, t) in targets {
                let t = self.find(t);
                if !index.contains_key(&t) {
                    index.insert(t, index.len());
                    queue.push_back(t);
                }
            }
        }
        let mut edges = Vec::new();
        for &n in &order {
            let targets: Vec<(ArcId, usize)> = self.edges[n].iter().map(|(&a, &t)| (a, t)).collect();
            for (a, t) in targets {
                let t = self.find(t);
                edges.push((index[&n], a, index[&t]));
            }
        }
        edges.sort_unstable();
        CharGraph {
            nodes: order.iter().map(|&n| self.obj[n]).collect(),
            edges,
            rank,
        }
    }
}

impl CharGraph {
    pub fn to_dot(&self, pres: &Presentation) -> String {
        let mut s = String::from("digraph chargraph {\n");
        for (i, &x) in self.nodes.iter().enumerate() {
            s.push_str(&format!("  n{i} [label=\"{}\"];\n", pres.key(x)));
        }
        for &(p, a, q) in &self.edges {
            s.push_str(&format!("  n{p} -> n{q} [label=\"{a}\"];\n"));
        }
        s.push_str("}\n");
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disk::{enumerate_objects, fan, Labelling};

    fn lab(l: &[usize]) -> Labelling {
        Labelling::new(l).unwrap()
    }

    #[test]
    fn weights_of_small_moves() {
        let p = Presentation::new();
        let l = lab(&[3, 3, 4, 5]);
        let x = DiskObject::from_chords(&l, &[(3, 5), (7, 0), (0, 3)]).unwrap();
        let a = (0..3).find(|&a| x.arc(a) == (0, 3)).unwrap();
        let id = p.intern(&x);
        assert_eq!(p.weight(Move { source: id, arc: a }).unwrap(), 6);

        let two = p.intern(&DiskObject::from_chords(&lab(&[2, 2]), &[(0, 1)]).unwrap());
        assert_eq!(p.weight(Move { source: two, arc: 0 }).unwrap(), 0);
        let sq = p.intern(&DiskObject::from_chords(&lab(&[3, 3]), &[(1, 3)]).unwrap());
        assert_eq!(p.weight(Move { source: sq, arc: 0 }).unwrap(), 2);
    }

    #[test]
    fn fan_pentagon() {
        let p = Presentation::new();
        let x = p.intern(&fan(&lab(&[3, 3, 3]), 0, &[0, 1, 2]).unwrap());
        let c = p.complement(x, 0, 1).unwrap();
        assert_eq!(c.kind, RelationKind::Er3);
        assert_eq!((c.ab.len(), c.ba.len()), (1, 2));
        let back = p.complement(x, 1, 0).unwrap();
        assert_eq!((back.ab.clone(), back.ba.clone()), (c.ba.clone(), c.ab.clone()));
    }

    #[test]
    fn artin_relations() {
        let p = Presentation::new();
        let objs = enumerate_objects(&lab(&[2, 2, 2, 2]), 10).unwrap();
        assert_eq!(objs.len(), 1);
        let x = p.intern(&objs[0]);
        assert_eq!(p.complement(x, 0, 1).unwrap().kind, RelationKind::Er4);
        assert_eq!(p.complement(x, 1, 2).unwrap().kind, RelationKind::Er4);
        let far = p.complement(x, 0, 2).unwrap();
        assert_eq!(far.kind, RelationKind::Er1);
        assert_eq!((far.ab.len(), far.ba.len()), (1, 1));
    }

    #[test]
    fn rank_one_graph() {
        let p = Presentation::new();
        let x = p.intern(&DiskObject::from_chords(&lab(&[3, 3]), &[(1, 3)]).unwrap());
        let g = p.characteristic_graph(x, &[0], 100).unwrap();
        assert_eq!(g.nodes.len(), 2);
        assert_eq!(g.edges.len(), 1);
    }
}
