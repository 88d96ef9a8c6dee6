//! Independent reference models.
//!
//! Equality of positive words is decided here by brute force: the class of a
//! word is generated by rewriting relation sides anywhere inside it. The
//! classical weak order and Tamari lattice are built from permutations and
//! binary trees, without reference to disks.

use std::collections::{HashMap, HashSet, VecDeque};

use serde::Serialize;

use crate::disk::ArcId;
use crate::error::{Error, Result};
use crate::lattice::Poset;
use crate::presentation::{ObjId, Presentation, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct OracleCaps {
    /// Longest word kept in a class.
    pub max_len: usize,
    /// Largest class explored before giving up.
    pub max_class: usize,
}

impl Default for OracleCaps {
    fn default() -> Self {
        OracleCaps {
            max_len: 12,
            max_class: 50_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Yes,
    No,
    Inconclusive,
}

/// Words reachable from a seed by relation rewriting.
#[derive(Clone, Debug)]
pub struct CongruenceClosure {
    pub source: ObjId,
    pub words: HashSet<Vec<ArcId>>,
    /// False when a cap cut the search short.
    pub complete: bool,
}

type Rules = Vec<(Vec<ArcId>, Vec<ArcId>)>;

struct RuleCache<'p> {
    pres: &'p Presentation,
    rules: HashMap<ObjId, Rules>,
}

impl RuleCache<'_> {
    fn at(&mut self, x: ObjId) -> Result<&Rules> {
        if !self.rules.contains_key(&x) {
            let mut out = Vec::new();
            for r in self.pres.relations(x)? {
                out.push((r.left.clone(), r.right.clone()));
                out.push((r.right, r.left));
            }
            self.rules.insert(x, out);
        }
        Ok(&self.rules[&x])
    }
}

/// Breadth-first closure of `seed` under relation rewriting.
pub fn closure(pres: &Presentation, seed: &Word, caps: OracleCaps) -> Result<CongruenceClosure> {
    closure_until(pres, seed, caps, |_| false).map(|(c, _)| c)
}

fn closure_until(
    pres: &Presentation,
    seed: &Word,
    caps: OracleCaps,
    mut stop: impl FnMut(&[ArcId]) -> bool,
) -> Result<(CongruenceClosure, bool)> {
    let mut cache = RuleCache {
        pres,
        rules: HashMap::new(),
    };
    let mut words: HashSet<Vec<ArcId>> = HashSet::new();
    let mut queue = VecDeque::new();
    let mut complete = seed.arcs.len() <= caps.max_len;
    words.insert(seed.arcs.clone());
    queue.push_back(seed.arcs.clone());
    if stop(&seed.arcs) {
        return Ok((
            CongruenceClosure {
                source: seed.source,
                words,
                complete: false,
            },
            true,
        ));
    }
    while let Some(w) = queue.pop_front() {
        let mut at = seed.source;
        for i in 0..w.len() {
            let rules = cache.at(at)?.clone();
            for (lhs, rhs) in &rules {
                if !w[i..].starts_with(lhs) {
                    continue;
                }
                let len = w.len() - lhs.len() + rhs.len();
                if len > caps.max_len {
                    complete = false;
                    continue;
                }
                let mut next = Vec::with_capacity(len);
                next.extend_from_slice(&w[..i]);
                next.extend_from_slice(rhs);
                next.extend_from_slice(&w[i + lhs.len()..]);
                if words.contains(&next) {
                    continue;
                }
                if stop(&next) {
                    words.insert(next);
                    return Ok((
                        CongruenceClosure {
                            source: seed.source,
                            words,
                            complete: false,
                        },
                        true,
                    ));
                }
                if words.len() >= caps.max_class {
                    return Ok((
                        CongruenceClosure {
                            source: seed.source,
                            words,
                            complete: false,
                        },
                        false,
                    ));
                }
                words.insert(next.clone());
                queue.push_back(next);
            }
            at = pres.walk(at, &w[i..=i])?;
        }
    }
    Ok((
        CongruenceClosure {
            source: seed.source,
            words,
            complete,
        },
        false,
    ))
}

/// Decides equality of two positive words by exhaustive rewriting.
pub fn oracle_equal(pres: &Presentation, u: &Word, v: &Word, caps: OracleCaps) -> Result<Verdict> {
    if u.source != v.source {
        return Err(Error::SourceMismatch);
    }
    if pres.walk(u.source, &u.arcs)? != pres.walk(v.source, &v.arcs)? {
        return Ok(Verdict::No);
    }
    let (c, found) = closure_until(pres, u, caps, |w| w == v.arcs.as_slice())?;
    Ok(if found {
        Verdict::Yes
    } else if c.complete {
        Verdict::No
    } else {
        Verdict::Inconclusive
    })
}

/// Weak order on the permutations of `0..n`; covers swap an adjacent
/// increasing pair. Elements are listed in lexicographic order.
pub fn weak_order(n: usize) -> (Vec<Vec<usize>>, Poset) {
    let mut perms = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    permutations(&mut cur, 0, &mut perms);
    perms.sort();
    let index: HashMap<Vec<usize>, usize> = perms.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
    let mut covers = Vec::new();
    for (i, p) in perms.iter().enumerate() {
        for k in 0..n.saturating_sub(1) {
            if p[k] < p[k + 1] {
                let mut q = p.clone();
                q.swap(k, k + 1);
                covers.push((i, index[&q]));
            }
        }
    }
    let poset = Poset::from_covers(perms.len(), &covers);
    (perms, poset)
}

fn permutations(cur: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == cur.len() {
        out.push(cur.clone());
        return;
    }
    for i in k..cur.len() {
        cur.swap(k, i);
        permutations(cur, k + 1, out);
        cur.swap(k, i);
    }
}

/// Full binary trees with `k` internal nodes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tree {
    Leaf,
    Node(Box<Tree>, Box<Tree>),
}

fn trees(k: usize) -> Vec<Tree> {
    if k == 0 {
        return vec![Tree::Leaf];
    }
    let mut out = Vec::new();
    for left in 0..k {
        for l in trees(left) {
            for r in trees(k - 1 - left) {
                out.push(Tree::Node(Box::new(l.clone()), Box::new(r)));
            }
        }
    }
    out
}

/// Trees obtained by one right rotation `((a b) c) -> (a (b c))` anywhere.
fn right_rotations(t: &Tree) -> Vec<Tree> {
    let mut out = Vec::new();
    if let Tree::Node(l, r) = t {
        if let Tree::Node(a, b) = l.as_ref() {
            out.push(Tree::Node(a.clone(), Box::new(Tree::Node(b.clone(), r.clone()))));
        }
        for l2 in right_rotations(l) {
            out.push(Tree::Node(Box::new(l2), r.clone()));
        }
        for r2 in right_rotations(r) {
            out.push(Tree::Node(l.clone(), Box::new(r2)));
        }
    }
    out
}

/// Tamari lattice on binary trees with `k` internal nodes, which are in
/// bijection with triangulations of a `(k + 2)`-gon.
pub fn classical_tamari(k: usize) -> (Vec<Tree>, Poset) {
    let mut ts = trees(k);
    ts.sort();
    let index: HashMap<Tree, usize> = ts.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
    let mut covers = Vec::new();
    for (i, t) in ts.iter().enumerate() {
        for s in right_rotations(t) {
            covers.push((i, index[&s]));
        }
    }
    covers.sort_unstable();
    covers.dedup();
    let poset = Poset::from_covers(ts.len(), &covers);
    (ts, poset)
}
