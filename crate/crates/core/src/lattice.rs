//! Intervals of simple elements, finite posets and Tamari orderings.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use crate::disk::{enumerate_objects, ArcId, DiskObject, Labelling};
use crate::engine::Engine;
use crate::error::{Error, Result};
use crate::presentation::{ObjId, Word};

/// A finite poset given by its cover relation.
#[derive(Clone, Debug)]
pub struct Poset {
    covers: Vec<(usize, usize)>,
    /// `le[i][j]` is true when `i ≤ j`.
    le: Vec<Vec<bool>>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct LatticeReport {
    pub elements: usize,
    pub pairs_checked: usize,
    pub missing_joins: Vec<(usize, usize)>,
    pub missing_meets: Vec<(usize, usize)>,
    /// Pairs where the engine disagrees with the brute force bound.
    pub engine_mismatches: Vec<(usize, usize)>,
}

impl LatticeReport {
    pub fn passed(&self) -> bool {
        self.missing_joins.is_empty() && self.missing_meets.is_empty() && self.engine_mismatches.is_empty()
    }
}

impl Poset {
    /// Builds the order generated by `covers`. Panics on cycles.
    pub fn from_covers(len: usize, covers: &[(usize, usize)]) -> Self {
        let mut succ = vec![Vec::new(); len];
        for &(a, b) in covers {
            succ[a].push(b);
        }
        let mut le = vec![vec![false; len]; len];
        for (start, row) in le.iter_mut().enumerate() {
            let mut stack = vec![start];
            row[start] = true;
            while let Some(v) = stack.pop() {
                for &w in &succ[v] {
                    if !row[w] {
                        row[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        for (i, row) in le.iter().enumerate() {
            for (j, &up) in row.iter().enumerate() {
                assert!(i == j || !(up && le[j][i]), "cover relation has a cycle");
            }
        }
        let mut covers = covers.to_vec();
        covers.sort_unstable();
        covers.dedup();
        Poset { covers, le }
    }

    pub fn len(&self) -> usize {
        self.le.len()
    }

    pub fn is_empty(&self) -> bool {
        self.le.is_empty()
    }

    pub fn covers(&self) -> &[(usize, usize)] {
        &self.covers
    }

    pub fn le(&self, i: usize, j: usize) -> bool {
        self.le[i][j]
    }

    /// Least upper bound, if it exists.
    pub fn join(&self, i: usize, j: usize) -> Option<usize> {
        let ups: Vec<usize> = (0..self.len()).filter(|&k| self.le[i][k] && self.le[j][k]).collect();
        ups.iter().copied().find(|&c| ups.iter().all(|&k| self.le[c][k]))
    }

    /// Greatest lower bound, if it exists.
    pub fn meet(&self, i: usize, j: usize) -> Option<usize> {
        let downs: Vec<usize> = (0..self.len()).filter(|&k| self.le[k][i] && self.le[k][j]).collect();
        downs.iter().copied().find(|&c| downs.iter().all(|&k| self.le[k][c]))
    }

    pub fn bottom(&self) -> Option<usize> {
        (0..self.len()).find(|&b| (0..self.len()).all(|k| self.le[b][k]))
    }

    pub fn top(&self) -> Option<usize> {
        (0..self.len()).find(|&t| (0..self.len()).all(|k| self.le[k][t]))
    }

    /// Brute force check that all pairs have a join and a meet.
    pub fn verify_lattice(&self) -> LatticeReport {
        let mut r = LatticeReport {
            elements: self.len(),
            ..Default::default()
        };
        for i in 0..self.len() {
            for j in i..self.len() {
                r.pairs_checked += 1;
                if self.join(i, j).is_none() {
                    r.missing_joins.push((i, j));
                }
                if self.meet(i, j).is_none() {
                    r.missing_meets.push((i, j));
                }
            }
        }
        r
    }

    fn up_degree(&self, i: usize) -> usize {
        self.covers.iter().filter(|&&(a, _)| a == i).count()
    }

    fn down_degree(&self, i: usize) -> usize {
        self.covers.iter().filter(|&&(_, b)| b == i).count()
    }

    /// Sorted list of `(down degree, up degree)` over all elements.
    pub fn degree_profile(&self) -> Vec<(usize, usize)> {
        let mut v: Vec<(usize, usize)> = (0..self.len()).map(|i| (self.down_degree(i), self.up_degree(i))).collect();
        v.sort_unstable();
        v
    }

    fn signature(&self, i: usize) -> (usize, usize, usize, usize) {
        let below = (0..self.len()).filter(|&k| self.le[k][i]).count();
        let above = (0..self.len()).filter(|&k| self.le[i][k]).count();
        (self.down_degree(i), self.up_degree(i), below, above)
    }
}

/// An order isomorphism `p → q` as an index map, found by backtracking over
/// elements with matching local signatures.
pub fn find_isomorphism(p: &Poset, q: &Poset) -> Option<Vec<usize>> {
    if p.len() != q.len() || p.covers().len() != q.covers().len() {
        return None;
    }
    let sp: Vec<_> = (0..p.len()).map(|i| p.signature(i)).collect();
    let sq: Vec<_> = (0..q.len()).map(|i| q.signature(i)).collect();
    let mut a = sp.clone();
    let mut b = sq.clone();
    a.sort_unstable();
    b.sort_unstable();
    if a != b {
        return None;
    }
    let mut order: Vec<usize> = (0..p.len()).collect();
    order.sort_by_key(|&i| (sp[i].2, i));
    let mut m = Matcher {
        order: &order,
        p,
        q,
        sp: &sp,
        sq: &sq,
        map: vec![usize::MAX; p.len()],
        used: vec![false; q.len()],
    };
    if m.extend(0) {
        Some(m.map)
    } else {
        None
    }
}

type Signature = (usize, usize, usize, usize);

struct Matcher<'a> {
    order: &'a [usize],
    p: &'a Poset,
    q: &'a Poset,
    sp: &'a [Signature],
    sq: &'a [Signature],
    map: Vec<usize>,
    used: Vec<bool>,
}

impl Matcher<'_> {
    fn extend(&mut self, k: usize) -> bool {
        if k == self.order.len() {
            return true;
        }
        let i = self.order[k];
        for j in 0..self.q.len() {
            if self.used[j] || self.sp[i] != self.sq[j] {
                continue;
            }
            let consistent = self.order[..k].iter().all(|&h| {
                let g = self.map[h];
                self.p.le(h, i) == self.q.le(g, j) && self.p.le(i, h) == self.q.le(j, g)
            });
            if !consistent {
                continue;
            }
            self.map[i] = j;
            self.used[j] = true;
            if self.extend(k + 1) {
                return true;
            }
            self.used[j] = false;
            self.map[i] = usize::MAX;
        }
        false
    }
}

/// The simple elements at an object, ordered by left divisibility.
#[derive(Clone, Debug, Serialize)]
pub struct IntervalLattice {
    pub base: ObjId,
    /// Canonical representatives, sorted by layer and then by word.
    pub elements: Vec<Word>,
    /// Distance from the bottom in the cover graph.
    pub layers: Vec<usize>,
    pub covers: Vec<(usize, ArcId, usize)>,
    pub top: usize,
    pub bottom: usize,
}

/// Parent index, atom, canonical child word and remaining cofactor of Δ.
type Expansion = (usize, ArcId, Word, Word);

/// Layered search over the divisors of the Garside element at `x`.
pub fn interval(engine: &Engine, x: ObjId, node_cap: usize, threads: usize) -> Result<IntervalLattice> {
    let delta = engine.delta(x)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::Postcondition(e.to_string()))?;

    let mut index: HashMap<Vec<ArcId>, usize> = HashMap::new();
    let mut words: Vec<Word> = vec![Word::empty(x)];
    let mut layers = vec![0usize];
    let mut rests: Vec<Word> = vec![delta.clone()];
    let mut covers = Vec::new();
    index.insert(Vec::new(), 0);
    let mut frontier = vec![0usize];
    let mut depth = 0;
    while !frontier.is_empty() {
        depth += 1;
        let expanded: Vec<Result<Vec<Expansion>>> = pool.install(|| {
            frontier
                .par_iter()
                .map(|&i| {
                    let s = &words[i];
                    let r = &rests[i];
                    let at = r.source;
                    let mut out = Vec::new();
                    for a in 0..engine.pres().arc_count(at) {
                        let letter = Word::new(at, vec![a]);
                        if let Some(rest) = engine.left_divides(&letter, r)? {
                            let mut t = s.clone();
                            t.arcs.push(a);
                            out.push((i, a, engine.canonical(&t)?, rest));
                        }
                    }
                    Ok(out)
                })
                .collect()
        });
        let mut next = Vec::new();
        for batch in expanded {
            for (i, a, t, rest) in batch? {
                let j = match index.get(&t.arcs) {
                    Some(&j) => j,
                    None => {
                        if words.len() >= node_cap {
                            return Err(Error::NodeCap(node_cap));
                        }
                        let j = words.len();
                        index.insert(t.arcs.clone(), j);
                        words.push(t);
                        layers.push(depth);
                        rests.push(rest);
                        next.push(j);
                        j
                    }
                };
                covers.push((i, a, j));
            }
        }
        frontier = next;
    }

    let mut order: Vec<usize> = (0..words.len()).collect();
    order.sort_by(|&i, &j| (layers[i], &words[i].arcs).cmp(&(layers[j], &words[j].arcs)));
    let mut rank = vec![0; words.len()];
    for (new, &old) in order.iter().enumerate() {
        rank[old] = new;
    }
    let mut covers: Vec<(usize, ArcId, usize)> = covers.into_iter().map(|(i, a, j)| (rank[i], a, rank[j])).collect();
    covers.sort_unstable();
    covers.dedup();
    let top_word = engine.canonical(&delta)?;
    let top = rank[*index
        .get(&top_word.arcs)
        .ok_or_else(|| Error::Postcondition("delta missing from its interval".into()))?];
    Ok(IntervalLattice {
        base: x,
        elements: order.iter().map(|&i| words[i].clone()).collect(),
        layers: order.iter().map(|&i| layers[i]).collect(),
        covers,
        top,
        bottom: rank[0],
    })
}

impl IntervalLattice {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn poset(&self) -> Poset {
        let covers: Vec<(usize, usize)> = self.covers.iter().map(|&(i, _, j)| (i, j)).collect();
        Poset::from_covers(self.len(), &covers)
    }

    /// Target object of every element.
    pub fn targets(&self, engine: &Engine) -> Result<Vec<ObjId>> {
        self.elements.iter().map(|w| engine.target(w)).collect()
    }

    pub fn to_dot(&self, engine: &Engine) -> Result<String> {
        let mut s = String::from("digraph interval {\n  rankdir=BT;\n");
        for (i, w) in self.elements.iter().enumerate() {
            let factors = engine.greedy_normal_form(w)?;
            let text: Vec<String> = factors
                .iter()
                .map(|f| {
                    let letters: Vec<String> = f.arcs.iter().map(|a| a.to_string()).collect();
                    format!("({})", letters.join(" "))
                })
                .collect();
            s.push_str(&format!("  n{i} [label=\"{i}: {}\"];\n", text.join("")));
        }
        for &(i, a, j) in &self.covers {
            s.push_str(&format!("  n{i} -> n{j} [label=\"{a}\"];\n"));
        }
        s.push_str("}\n");
        Ok(s)
    }

    pub fn to_json(&self, engine: &Engine) -> Result<serde_json::Value> {
        let pres = engine.pres();
        let elements = self
            .elements
            .iter()
            .map(|w| {
                Ok(serde_json::json!({
                    "word": w.arcs,
                    "object": pres.key(engine.target(w)?),
                }))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(serde_json::json!({
            "base": pres.key(self.base),
            "elements": elements,
            "covers": self.covers.iter().map(|&(i, a, j)| [i, a, j]).collect::<Vec<_>>(),
            "top": self.top,
            "bottom": self.bottom,
        }))
    }
}

/// Lattice check of an interval, including agreement of the engine's join
/// and meet with the brute force bounds.
pub fn verify_lattice(engine: &Engine, l: &IntervalLattice) -> Result<LatticeReport> {
    let poset = l.poset();
    let mut report = poset.verify_lattice();
    let index: HashMap<&[ArcId], usize> = l.elements.iter().enumerate().map(|(i, w)| (w.arcs.as_slice(), i)).collect();
    for i in 0..l.len() {
        for j in i..l.len() {
            let (u, v) = (&l.elements[i], &l.elements[j]);
            let join = engine.canonical(&engine.join(u, v)?)?;
            let meet = engine.canonical(&engine.meet(u, v)?)?;
            let ok_join = index.get(join.arcs.as_slice()).copied() == poset.join(i, j);
            let ok_meet = index.get(meet.arcs.as_slice()).copied() == poset.meet(i, j);
            if !(ok_join && ok_meet) {
                report.engine_mismatches.push((i, j));
            }
        }
    }
    Ok(report)
}

/// An order on all triangulations transported from an interval.
#[derive(Clone, Debug, Serialize)]
pub struct TamariOrder {
    pub base: ObjId,
    /// Objects in the order of the interval elements.
    pub objects: Vec<ObjId>,
    pub covers: Vec<(usize, usize)>,
}

impl TamariOrder {
    pub fn poset(&self) -> Poset {
        Poset::from_covers(self.objects.len(), &self.covers)
    }

    pub fn to_dot(&self, engine: &Engine) -> String {
        let pres = engine.pres();
        let mut s = String::from("digraph tamari {\n  rankdir=BT;\n");
        for (i, &x) in self.objects.iter().enumerate() {
            s.push_str(&format!("  n{i} [label=\"{}\"];\n", pres.key(x)));
        }
        for &(i, j) in &self.covers {
            s.push_str(&format!("  n{i} -> n{j};\n"));
        }
        s.push_str("}\n");
        s
    }

    pub fn to_json(&self, engine: &Engine) -> serde_json::Value {
        let pres = engine.pres();
        serde_json::json!({
            "base": pres.key(self.base),
            "elements": self.objects.iter().map(|&x| pres.key(x)).collect::<Vec<_>>(),
            "covers": self.covers,
            "bottom": 0,
        })
    }
}

/// Transports the interval order at `base` to the set of all objects, which
/// requires every label to be 3.
pub fn tamari(engine: &Engine, base: &DiskObject, node_cap: usize, threads: usize) -> Result<TamariOrder> {
    if base.labels().iter().any(|&l| l != 3) {
        return Err(Error::NotAllThrees);
    }
    let pres = engine.pres();
    let x = pres.intern(base);
    let l = interval(engine, x, node_cap, threads)?;
    let targets = l.targets(engine)?;
    let all: BTreeSet<String> = enumerate_objects(&base.labelling(), node_cap)?
        .iter()
        .map(|o| o.key().to_string())
        .collect();
    let hit: BTreeSet<String> = targets.iter().map(|&t| pres.key(t)).collect();
    if hit.len() != targets.len() || hit != all {
        return Err(Error::Postcondition(format!(
            "projection from {} simples onto {} objects is not bijective",
            targets.len(),
            all.len()
        )));
    }
    let mut covers: Vec<(usize, usize)> = l.covers.iter().map(|&(i, _, j)| (i, j)).collect();
    covers.sort_unstable();
    covers.dedup();
    debug_assert_eq!(l.bottom, 0);
    Ok(TamariOrder {
        base: x,
        objects: targets,
        covers,
    })
}

/// Convenience wrapper: the labelling with `k` labels equal to 3.
pub fn triangles(k: usize) -> Labelling {
    Labelling::new(&vec![3; k]).expect("labels of 3 are valid")
}
