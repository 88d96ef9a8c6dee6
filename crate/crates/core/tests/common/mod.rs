#![allow(dead_code)]

use diskgarside::{enumerate_objects, Engine, Labelling, ObjId, Word};
use rand::Rng;

pub fn lab(l: &[usize]) -> Labelling {
    Labelling::new(l).unwrap()
}

pub fn objects(e: &Engine, l: &[usize]) -> Vec<ObjId> {
    enumerate_objects(&lab(l), 100_000)
        .unwrap()
        .iter()
        .map(|o| e.pres().intern(o))
        .collect()
}

pub fn random_word(e: &Engine, x: ObjId, len: usize, rng: &mut impl Rng) -> Word {
    let mut w = Word::empty(x);
    let mut at = x;
    for _ in 0..len {
        let n = e.pres().arc_count(at);
        if n == 0 {
            break;
        }
        let a = rng.gen_range(0..n);
        w.arcs.push(a);
        at = e.pres().walk(at, &[a]).unwrap();
    }
    w
}

/// Applies random relation rewrites to `w`, keeping it within `max_len`.
pub fn scramble(e: &Engine, w: &Word, steps: usize, max_len: usize, rng: &mut impl Rng) -> Word {
    let p = e.pres();
    let mut cur = w.arcs.clone();
    for _ in 0..steps {
        let mut options = Vec::new();
        let mut at = w.source;
        for i in 0..cur.len() {
            for r in p.relations(at).unwrap() {
                for (lhs, rhs) in [(&r.left, &r.right), (&r.right, &r.left)] {
                    if cur[i..].starts_with(lhs) && cur.len() - lhs.len() + rhs.len() <= max_len {
                        let mut next = cur[..i].to_vec();
                        next.extend_from_slice(rhs);
                        next.extend_from_slice(&cur[i + lhs.len()..]);
                        options.push(next);
                    }
                }
            }
            at = p.walk(at, &cur[i..=i]).unwrap();
        }
        if options.is_empty() {
            break;
        }
        cur = options.swap_remove(rng.gen_range(0..options.len()));
    }
    Word::new(w.source, cur)
}
