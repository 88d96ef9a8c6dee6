//! Word reversing, divisibility, Garside elements and normal forms.

use std::collections::HashMap;
use std::sync::RwLock;

use rayon::prelude::*;
use serde::Serialize;

use crate::disk::ArcId;
use crate::error::{Error, Result};
use crate::oracle::{oracle_equal, OracleCaps, Verdict};
use crate::presentation::{Move, ObjId, Presentation, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EngineConfig {
    /// Maximal number of reversing steps per call.
    pub reverse_cap: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            reverse_cap: 100_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Token {
    mv: Move,
    inverse: bool,
}

/// A groupoid element `den⁻¹ · num`, both words starting at one object.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupoidElement {
    pub den: Word,
    pub num: Word,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CubeStatus {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct CubeTriple {
    pub arcs: (ArcId, ArcId, ArcId),
    pub status: CubeStatus,
}

#[derive(Clone, Debug, Serialize)]
pub struct CubeReport {
    pub object: ObjId,
    pub triples: Vec<CubeTriple>,
}

impl CubeReport {
    pub fn failures(&self) -> usize {
        self.triples.iter().filter(|t| t.status == CubeStatus::Fail).count()
    }

    pub fn inconclusive(&self) -> usize {
        self.triples
            .iter()
            .filter(|t| t.status == CubeStatus::Inconclusive)
            .count()
    }

    pub fn passed(&self) -> bool {
        self.failures() == 0 && self.inconclusive() == 0
    }
}

/// Garside machinery over a shared [`Presentation`].
pub struct Engine {
    pres: Presentation,
    config: EngineConfig,
    deltas: RwLock<HashMap<ObjId, Word>>,
    verified: RwLock<HashMap<ObjId, bool>>,
}

impl Default for Engine {
    fn default() -> Self {
        Engine::new(EngineConfig::default())
    }
}

impl Engine {
    pub fn new(config: EngineConfig) -> Self {
        Engine {
            pres: Presentation::new(),
            config,
            deltas: RwLock::new(HashMap::new()),
            verified: RwLock::new(HashMap::new()),
        }
    }

    pub fn pres(&self) -> &Presentation {
        &self.pres
    }

    pub fn config(&self) -> EngineConfig {
        self.config
    }

    pub fn target(&self, w: &Word) -> Result<ObjId> {
        self.pres.walk(w.source, &w.arcs)
    }

    pub fn concat(&self, u: &Word, v: &Word) -> Result<Word> {
        if self.target(u)? != v.source {
            return Err(Error::NotComposable);
        }
        let mut arcs = u.arcs.clone();
        arcs.extend_from_slice(&v.arcs);
        Ok(Word::new(u.source, arcs))
    }

    /// Total weight of a word.
    pub fn weight(&self, w: &Word) -> Result<usize> {
        self.pres.word_weight(w.source, &w.arcs)
    }

    fn tokens(&self, u: &Word, v: &Word) -> Result<Vec<Token>> {
        let mut out = Vec::with_capacity(u.len() + v.len());
        let mut inv: Vec<Token> = self
            .pres
            .letters(u.source, &u.arcs)?
            .into_iter()
            .map(|mv| Token { mv, inverse: true })
            .collect();
        inv.reverse();
        out.extend(inv);
        out.extend(
            self.pres
                .letters(v.source, &v.arcs)?
                .into_iter()
                .map(|mv| Token { mv, inverse: false }),
        );
        Ok(out)
    }

    /// Computes `(u\v, v\u)` by reversing `u⁻¹v`, always rewriting the
    /// leftmost reversible factor.
    pub fn reverse(&self, u: &Word, v: &Word) -> Result<(Word, Word)> {
        self.reverse_with(u, v, &mut |_| 0)
    }

    /// Reversing where `pick` chooses which of the currently reversible
    /// factors to rewrite, given their count.
    pub fn reverse_with(
        &self,
        u: &Word,
        v: &Word,
        pick: &mut dyn FnMut(usize) -> usize,
    ) -> Result<(Word, Word)> {
        if u.source != v.source {
            return Err(Error::SourceMismatch);
        }
        let mut toks = self.tokens(u, v)?;
        let mut steps = 0usize;
        let mut spots = Vec::new();
        loop {
            spots.clear();
            spots.extend(
                toks.windows(2)
                    .enumerate()
                    .filter(|(_, w)| w[0].inverse && !w[1].inverse)
                    .map(|(i, _)| i),
            );
            if spots.is_empty() {
                break;
            }
            steps += 1;
            if steps > self.config.reverse_cap {
                return Err(Error::Divergence(self.config.reverse_cap));
            }
            let i = spots[pick(spots.len()) % spots.len()];
            let (a, b) = (toks[i].mv, toks[i + 1].mv);
            debug_assert_eq!(a.source, b.source);
            if a.arc == b.arc {
                toks.drain(i..i + 2);
                continue;
            }
            let c = self.pres.complement(a.source, a.arc, b.arc)?;
            let mut repl: Vec<Token> = self
                .pres
                .letters(self.pres.target(a)?, &c.ab)?
                .into_iter()
                .map(|mv| Token { mv, inverse: false })
                .collect();
            let mut back: Vec<Token> = self
                .pres
                .letters(self.pres.target(b)?, &c.ba)?
                .into_iter()
                .map(|mv| Token { mv, inverse: true })
                .collect();
            back.reverse();
            repl.extend(back);
            toks.splice(i..i + 2, repl);
        }
        let split = toks.iter().position(|t| t.inverse).unwrap_or(toks.len());
        let pos: Vec<ArcId> = toks[..split].iter().map(|t| t.mv.arc).collect();
        let mut neg: Vec<Move> = toks[split..].iter().map(|t| t.mv).collect();
        neg.reverse();
        let u_under_v = Word::new(self.target(u)?, pos);
        let v_under_u = Word::new(self.target(v)?, neg.iter().map(|m| m.arc).collect());
        if let Some(first) = neg.first() {
            debug_assert_eq!(first.source, v_under_u.source);
        }
        Ok((u_under_v, v_under_u))
    }

    /// Decides whether two positive words represent the same morphism.
    pub fn equal_positive(&self, u: &Word, v: &Word) -> Result<bool> {
        if u.source != v.source {
            return Err(Error::SourceMismatch);
        }
        if self.target(u)? != self.target(v)? {
            return Ok(false);
        }
        let (a, b) = self.reverse(u, v)?;
        Ok(a.is_empty() && b.is_empty())
    }

    /// `Some(w)` with `u·w = v` when `u` left-divides `v`.
    pub fn left_divides(&self, u: &Word, v: &Word) -> Result<Option<Word>> {
        let (uv, vu) = self.reverse(u, v)?;
        Ok(if vu.is_empty() { Some(uv) } else { None })
    }

    /// Least common right multiple.
    pub fn join(&self, u: &Word, v: &Word) -> Result<Word> {
        let (uv, _) = self.reverse(u, v)?;
        self.concat(u, &uv)
    }

    /// Greatest common left divisor, grown one atom at a time.
    pub fn meet(&self, u: &Word, v: &Word) -> Result<Word> {
        self.meet_in_order(u, v, &mut |n| (0..n).collect())
    }

    /// [`Engine::meet`] with a caller chosen atom order at each step.
    pub fn meet_in_order(
        &self,
        u: &Word,
        v: &Word,
        order: &mut dyn FnMut(usize) -> Vec<ArcId>,
    ) -> Result<Word> {
        if u.source != v.source {
            return Err(Error::SourceMismatch);
        }
        let mut s = Word::empty(u.source);
        let mut ru = u.clone();
        let mut rv = v.clone();
        'grow: loop {
            let at = ru.source;
            for a in order(self.pres.arc_count(at)) {
                let letter = Word::new(at, vec![a]);
                let Some(nu) = self.left_divides(&letter, &ru)? else {
                    continue;
                };
                let Some(nv) = self.left_divides(&letter, &rv)? else {
                    continue;
                };
                s.arcs.push(a);
                ru = nu;
                rv = nv;
                continue 'grow;
            }
            return Ok(s);
        }
    }

    /// Representative of the class of `u` built from the smallest dividing
    /// atom at each step. Equal words give identical representatives.
    pub fn canonical(&self, u: &Word) -> Result<Word> {
        let mut out = Word::empty(u.source);
        let mut r = u.clone();
        while !r.is_empty() {
            let at = r.source;
            let mut found = false;
            for a in 0..self.pres.arc_count(at) {
                if let Some(q) = self.left_divides(&Word::new(at, vec![a]), &r)? {
                    out.arcs.push(a);
                    r = q;
                    found = true;
                    break;
                }
            }
            if !found {
                return Err(Error::Postcondition("nonempty word without atom divisor".into()));
            }
        }
        Ok(out)
    }

    fn delta_word(&self, x: ObjId) -> Result<Word> {
        if let Some(d) = self.deltas.read().unwrap().get(&x) {
            return Ok(d.clone());
        }
        let mut d = Word::empty(x);
        for a in 0..self.pres.arc_count(x) {
            d = self.join(&d, &Word::new(x, vec![a]))?;
        }
        let d = self.canonical(&d)?;
        self.deltas.write().unwrap().insert(x, d.clone());
        Ok(d)
    }

    /// The Garside element at `x`: the join of all atoms, checked to end at
    /// the shifted object, to be divisible by every atom and to commute with
    /// atoms through the shift.
    pub fn delta(&self, x: ObjId) -> Result<Word> {
        let d = self.delta_word(x)?;
        if self.verified.read().unwrap().contains_key(&x) {
            return Ok(d);
        }
        let (shifted, _) = self.pres.shift(x, 1);
        if self.target(&d)? != shifted {
            return Err(Error::Postcondition(format!(
                "delta at {} does not end at the shifted object",
                self.pres.key(x)
            )));
        }
        for a in 0..self.pres.arc_count(x) {
            let letter = Word::new(x, vec![a]);
            if self.left_divides(&letter, &d)?.is_none() {
                return Err(Error::Postcondition(format!(
                    "atom {a} does not divide delta at {}",
                    self.pres.key(x)
                )));
            }
            let y = self.pres.target(Move { source: x, arc: a })?;
            let lhs = self.concat(&letter, &self.delta_word(y)?)?;
            let rhs = self.concat(&d, &self.phi(&letter, 1))?;
            if !self.equal_positive(&lhs, &rhs)? {
                return Err(Error::Postcondition(format!(
                    "atom {a} at {} does not commute with delta",
                    self.pres.key(x)
                )));
            }
        }
        self.verified.write().unwrap().insert(x, true);
        Ok(d)
    }

    /// `Δ` at `x` followed by `Δ` at the shifted object, `k` times.
    pub fn delta_power(&self, x: ObjId, k: usize) -> Result<Word> {
        let mut out = Word::empty(x);
        let mut at = x;
        for _ in 0..k {
            let d = self.delta(at)?;
            at = self.target(&d)?;
            out.arcs.extend_from_slice(&d.arcs);
        }
        Ok(out)
    }

    /// Image of a word under the shift by `k` vertices.
    pub fn phi(&self, w: &Word, k: i64) -> Word {
        let (source, _) = self.pres.shift(w.source, k);
        let mut arcs = Vec::with_capacity(w.len());
        let mut at = w.source;
        for &a in &w.arcs {
            let (_, corr) = self.pres.shift(at, k);
            arcs.push(corr[a]);
            at = self
                .pres
                .target(Move { source: at, arc: a })
                .expect("word letters are valid");
        }
        Word::new(source, arcs)
    }

    pub fn phi_move(&self, mv: Move) -> Move {
        let (source, corr) = self.pres.shift(mv.source, 1);
        Move {
            source,
            arc: corr[mv.arc],
        }
    }

    /// Left-greedy factorisation into simple elements.
    pub fn greedy_normal_form(&self, u: &Word) -> Result<Vec<Word>> {
        let mut out = Vec::new();
        let mut r = u.clone();
        while !r.is_empty() {
            let d = self.delta(r.source)?;
            let head = self.meet(&r, &d)?;
            if head.is_empty() {
                return Err(Error::Postcondition("empty head of a nonempty word".into()));
            }
            let rest = self
                .left_divides(&head, &r)?
                .ok_or_else(|| Error::Postcondition("head does not divide word".into()))?;
            out.push(self.canonical(&head)?);
            r = rest;
        }
        Ok(out)
    }

    /// Whether `s` left-divides the Garside element at its source.
    pub fn is_simple(&self, s: &Word) -> Result<bool> {
        Ok(self.left_divides(s, &self.delta(s.source)?)?.is_some())
    }

    pub fn fraction(&self, den: Word, num: Word) -> Result<GroupoidElement> {
        if den.source != num.source {
            return Err(Error::SourceMismatch);
        }
        self.simplify(&GroupoidElement { den, num })
    }

    /// Cancels the common left divisor of numerator and denominator.
    pub fn simplify(&self, g: &GroupoidElement) -> Result<GroupoidElement> {
        let c = self.meet(&g.den, &g.num)?;
        let den = self.left_divides(&c, &g.den)?.expect("meet divides");
        let num = self.left_divides(&c, &g.num)?.expect("meet divides");
        Ok(GroupoidElement {
            den: self.canonical(&den)?,
            num: self.canonical(&num)?,
        })
    }

    pub fn element_source(&self, g: &GroupoidElement) -> Result<ObjId> {
        self.target(&g.den)
    }

    pub fn element_target(&self, g: &GroupoidElement) -> Result<ObjId> {
        self.target(&g.num)
    }

    pub fn identity(&self, x: ObjId) -> GroupoidElement {
        GroupoidElement {
            den: Word::empty(x),
            num: Word::empty(x),
        }
    }

    pub fn invert(&self, g: &GroupoidElement) -> GroupoidElement {
        GroupoidElement {
            den: g.num.clone(),
            num: g.den.clone(),
        }
    }

    /// Product `g·h`, defined when `g` ends where `h` starts.
    ///
    /// The middle factor `n₁·d₂⁻¹` is rewritten with `d₂·e = Δᵏ` and the
    /// shift relation `w·Δᵏ = Δᵏ·φᵏ(w)`.
    pub fn multiply(&self, g: &GroupoidElement, h: &GroupoidElement) -> Result<GroupoidElement> {
        if self.element_target(g)? != self.element_source(h)? {
            return Err(Error::NotComposable);
        }
        let k = h.den.len();
        if k == 0 {
            let num = self.concat(&g.num, &h.num)?;
            return self.simplify(&GroupoidElement {
                den: g.den.clone(),
                num,
            });
        }
        let dk = self.delta_power(h.den.source, k)?;
        let e = self
            .left_divides(&h.den, &dk)?
            .ok_or_else(|| Error::Postcondition("denominator does not divide a delta power".into()))?;
        let ne = self.concat(&g.num, &e)?;
        let back = self.phi(&ne, -(k as i64));
        let lead = self.delta_power(back.source, k)?;
        let den = self.concat(&lead, &g.den)?;
        let num = self.concat(&back, &h.num)?;
        self.simplify(&GroupoidElement { den, num })
    }

    pub fn is_identity(&self, g: &GroupoidElement) -> Result<bool> {
        let r = self.simplify(g)?;
        Ok(r.den.is_empty() && r.num.is_empty())
    }

    /// Checks the cube condition on every ordered triple of distinct atoms at
    /// `x`, deciding equality with the rewriting oracle.
    pub fn cube_check(&self, x: ObjId, caps: OracleCaps, threads: usize) -> Result<CubeReport> {
        let n = self.pres.arc_count(x);
        let mut triples = Vec::new();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if a != b && b != c && a != c {
                        triples.push((a, b, c));
                    }
                }
            }
        }
        let run = || -> Result<Vec<CubeTriple>> {
            triples
                .par_iter()
                .map(|&t| {
                    Ok(CubeTriple {
                        arcs: t,
                        status: self.cube_triple(x, t, caps)?,
                    })
                })
                .collect()
        };
        let triples = if threads <= 1 {
            rayon::ThreadPoolBuilder::new()
                .num_threads(1)
                .build()
                .map_err(|e| Error::Postcondition(e.to_string()))?
                .install(run)?
        } else {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| Error::Postcondition(e.to_string()))?
                .install(run)?
        };
        Ok(CubeReport { object: x, triples })
    }

    /// Cube condition for one triple of pairwise distinct atoms at `x`.
    pub fn cube_triple(&self, x: ObjId, (a, b, c): (ArcId, ArcId, ArcId), caps: OracleCaps) -> Result<CubeStatus> {
        if a == b || b == c || a == c {
            return Err(Error::SameMove);
        }
        let n = self.pres.arc_count(x);
        for arc in [a, b, c] {
            if arc >= n {
                return Err(Error::InvalidArc { arc, count: n });
            }
        }
        let under = |p: ArcId, q: ArcId| -> Result<Word> {
            let comp = self.pres.complement(x, p, q)?;
            Ok(Word::new(self.pres.target(Move { source: x, arc: p })?, comp.ab.clone()))
        };
        let side = |p: ArcId, q: ArcId, r: ArcId| -> Result<Word> {
            Ok(self.reverse(&under(p, q)?, &under(p, r)?)?.0)
        };
        let lhs = side(a, b, c);
        let rhs = side(b, a, c);
        match (lhs, rhs) {
            (Err(Error::Divergence(_)), Err(Error::Divergence(_))) => Ok(CubeStatus::Inconclusive),
            (Err(Error::Divergence(_)), Ok(_)) | (Ok(_), Err(Error::Divergence(_))) => Ok(CubeStatus::Fail),
            (Err(e), _) | (_, Err(e)) => Err(e),
            (Ok(l), Ok(r)) => {
                if l.source != r.source {
                    return Ok(CubeStatus::Fail);
                }
                Ok(match oracle_equal(&self.pres, &l, &r, caps)? {
                    Verdict::Yes => CubeStatus::Pass,
                    Verdict::No => CubeStatus::Fail,
                    Verdict::Inconclusive => CubeStatus::Inconclusive,
                })
            }
        }
    }
}
