//! Acceptance run: one line per criterion, nonzero exit on any failure.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::OnceLock;
use std::time::Instant;

use common::{lab, objects, random_word, scramble};
use diskgarside::disk::default_fan;
use diskgarside::lattice::{find_isomorphism, triangles};
use diskgarside::oracle::classical_tamari;
use diskgarside::{
    interval, oracle_equal, tamari, verify_lattice, DiskObject, Engine, IntervalLattice, Move, ObjId, OracleCaps,
    RelationKind, Verdict, Word,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn engine() -> &'static Engine {
    static E: OnceLock<Engine> = OnceLock::new();
    E.get_or_init(Engine::default)
}

fn threads() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1).min(8)
}

fn err(e: diskgarside::Error) -> String {
    e.to_string()
}

fn artin_reduction() -> Outcome {
    let e = engine();
    let p = e.pres();
    for n in [3, 4] {
        let xs = objects(e, &vec![2; n]);
        ensure!(xs.len() == 1, "{} objects for {n} bigons", xs.len());
        let x = xs[0];
        ensure!(p.atoms(x).len() == n - 1, "{} atoms", p.atoms(x).len());
        let mut want = BTreeSet::new();
        for i in 0..n - 1 {
            for j in i + 1..n - 1 {
                if j == i + 1 {
                    want.insert((vec![i, j, i], vec![j, i, j], RelationKind::Er4));
                } else {
                    want.insert((vec![i, j], vec![j, i], RelationKind::Er1));
                }
            }
        }
        let got: BTreeSet<_> = p.relations(x).map_err(err)?.into_iter().map(|r| (r.left, r.right, r.kind)).collect();
        ensure!(got == want, "n = {n}: {got:?}");
    }
    Ok("n = 3, 4 exact".into())
}

fn pentagon() -> Outcome {
    let e = engine();
    let p = e.pres();
    let l = lab(&[3, 3, 3]);
    let obj = |chords: &[(usize, usize)]| -> Result<ObjId, String> {
        Ok(p.intern(&DiskObject::from_chords(&l, chords).map_err(err)?))
    };
    // Nodes as drawn: n3 is the fan, n5 the opposite corner.
    let n1 = obj(&[(0, 2), (2, 4)])?;
    let n2 = obj(&[(2, 4), (1, 4)])?;
    let n3 = obj(&[(0, 2), (0, 3)])?;
    let n4 = obj(&[(1, 3), (0, 3)])?;
    let n5 = obj(&[(1, 3), (1, 4)])?;
    let r = p.relation(n3, 0, 1).map_err(err)?;
    ensure!(r.kind == RelationKind::Er3, "kind {:?}", r.kind);
    let (short, long) = if r.left.len() < r.right.len() { (&r.left, &r.right) } else { (&r.right, &r.left) };
    ensure!((short.len(), long.len()) == (2, 3), "sides {} and {}", short.len(), long.len());
    let path = |w: &[usize]| -> Result<Vec<ObjId>, String> {
        (1..=w.len()).map(|k| p.walk(n3, &w[..k]).map_err(err)).collect()
    };
    ensure!(path(short)? == vec![n4, n5], "short side does not pass n4");
    ensure!(path(long)? == vec![n1, n2, n5], "long side does not pass n1, n2");
    ensure!(p.relation_is_sound(n3, short, long).map_err(err)?, "relation unsound");

    // Reversing the arrow between n2 and n5 leaves the two sides apart.
    ensure!(!p.relation_is_sound(n3, short, &long[..2]).map_err(err)?, "wrong pentagon accepted");
    // The mirror image swaps which first letter gets the longer tail.
    let c = p.complement(n3, 0, 1).map_err(err)?;
    let mut left = vec![0];
    left.extend_from_slice(&c.ba);
    let mut right = vec![1];
    right.extend_from_slice(&c.ab);
    let mirrored_ok = p.relation_is_sound(n3, &left, &right).unwrap_or(false);
    ensure!(!mirrored_ok, "mirrored pentagon accepted");
    Ok("sides (2,3), mirror rejected".into())
}

fn characteristic_graphs() -> Outcome {
    let cases: &[(usize, &[(usize, usize)])] = &[
        (8, &[(0, 2), (2, 4), (4, 6)]),
        (6, &[(0, 2), (2, 4), (4, 0)]),
        (8, &[(0, 2), (0, 4), (6, 0)]),
        (8, &[(0, 2), (0, 4), (4, 6)]),
        (8, &[(2, 4), (0, 4), (6, 0)]),
        (6, &[(2, 4), (2, 4), (0, 4)]),
        (6, &[(2, 4), (2, 4), (0, 2)]),
        (4, &[(0, 2), (0, 2), (0, 2)]),
    ];
    let want = [12, 14, 14, 14, 14, 18, 18, 24];
    let e = engine();
    let mut got = Vec::new();
    for &(m, chords) in cases {
        let x = e.pres().intern(&DiskObject::from_boundary_chords(m, chords).map_err(err)?);
        got.push(e.pres().characteristic_graph(x, &[0, 1, 2], 10_000).map_err(err)?.nodes.len());
    }
    ensure!(got == want, "counts {got:?}");
    Ok(format!("{got:?}"))
}

fn weights() -> Outcome {
    let e = engine();
    let p = e.pres();
    let x = DiskObject::from_chords(&lab(&[3, 3, 4, 5]), &[(3, 5), (7, 0), (0, 3)]).map_err(err)?;
    let a = (0..3).find(|&a| x.arc(a) == (0, 3)).ok_or("arc 0-3 missing")?;
    let w = p.weight(Move { source: p.intern(&x), arc: a }).map_err(err)?;
    ensure!(w == 6, "weight {w}");
    let mut checked = 0;
    for l in [&[2, 2][..], &[2, 2, 2], &[3, 3], &[3, 3, 3], &[2, 3], &[3, 4], &[2, 2, 3], &[3, 3, 3, 3]] {
        for x in objects(e, l) {
            for r in p.relations(x).map_err(err)? {
                let (a, b) = (p.word_weight(x, &r.left).map_err(err)?, p.word_weight(x, &r.right).map_err(err)?);
                ensure!(a == b, "{l:?}: {a} vs {b} on {r:?}");
                checked += 1;
            }
        }
    }
    Ok(format!("w = 6, {checked} relations balanced"))
}

const CUBE_LABELS: &[&[usize]] = &[&[2, 2, 2, 2], &[3, 3, 3, 3], &[2, 2, 3], &[2, 3, 3], &[3, 4], &[2, 4]];

fn cube() -> Outcome {
    let e = engine();
    let mut triples = 0;
    for &l in CUBE_LABELS {
        for x in objects(e, l) {
            let r = e.cube_check(x, OracleCaps::default(), threads()).map_err(err)?;
            ensure!(r.failures() == 0, "{l:?}: {} failures", r.failures());
            ensure!(r.inconclusive() == 0, "{l:?}: {} inconclusive", r.inconclusive());
            triples += r.triples.len();
        }
    }
    Ok(format!("{triples} triples"))
}

fn garside() -> Outcome {
    let e = engine();
    let mut count = 0;
    for &l in CUBE_LABELS {
        for x in objects(e, l) {
            let d = e.delta(x).map_err(err)?;
            ensure!(e.target(&d).map_err(err)? == e.pres().shift(x, 1).0, "target of delta");
            for mv in e.pres().atoms(x) {
                ensure!(e.left_divides(&Word::letter(mv), &d).map_err(err)?.is_some(), "atom does not divide");
                let lhs = e.concat(&Word::letter(mv), &e.delta(e.pres().target(mv).map_err(err)?).map_err(err)?).map_err(err)?;
                let rhs = e.concat(&d, &Word::letter(e.phi_move(mv))).map_err(err)?;
                ensure!(e.equal_positive(&lhs, &rhs).map_err(err)?, "shift relation fails");
            }
            count += 1;
        }
    }
    Ok(format!("{count} objects"))
}

type Intervals = Result<Vec<(Vec<usize>, IntervalLattice)>, String>;

fn intervals() -> &'static Intervals {
    static I: OnceLock<Intervals> = OnceLock::new();
    I.get_or_init(|| {
        let e = engine();
        let mut out = Vec::new();
        let mut labels: Vec<Vec<usize>> = (2..=4).map(|n| vec![2; n]).collect();
        labels.extend((2..=5).map(|k| vec![3; k]));
        labels.push(vec![2, 3]);
        labels.push(vec![3, 4]);
        for l in labels {
            for x in objects(e, &l) {
                out.push((l.clone(), interval(e, x, 100_000, threads()).map_err(err)?));
            }
        }
        Ok(out)
    })
}

fn interval_sizes() -> Outcome {
    let all = intervals().as_ref().map_err(|e| e.clone())?;
    let want = |l: &[usize]| -> usize {
        let k = l.len();
        if l.iter().all(|&v| v == 2) {
            (1..=k).product()
        } else {
            (1..=k as u64).fold(1u64, |c, i| c * 2 * (2 * i - 1) / (i + 1)) as usize
        }
    };
    let mut sizes = BTreeSet::new();
    for (l, iv) in all.iter().filter(|(l, _)| l.iter().all(|&v| v == l[0])) {
        ensure!(iv.len() == want(l), "{l:?}: {} elements", iv.len());
        sizes.insert((l.len(), l[0], iv.len()));
    }
    let text: Vec<String> = sizes.iter().map(|(n, v, s)| format!("{v}^{n}:{s}")).collect();
    Ok(text.join(" "))
}

fn lattices() -> Outcome {
    let e = engine();
    let all = intervals().as_ref().map_err(|e| e.clone())?;
    let mut pairs = 0;
    for (l, iv) in all {
        let r = verify_lattice(e, iv).map_err(err)?;
        ensure!(r.passed(), "{l:?}: {r:?}");
        pairs += r.pairs_checked;
    }
    Ok(format!("{} intervals, {pairs} pairs", all.len()))
}

fn tamari_orders() -> Outcome {
    let e = engine();
    for k in 3..=5 {
        let base = default_fan(&triangles(k), 0).map_err(err)?;
        let t = tamari(e, &base, 100_000, threads()).map_err(err)?;
        let (_, reference) = classical_tamari(k);
        ensure!(find_isomorphism(&t.poset(), &reference).is_some(), "k = {k} not isomorphic");
    }
    Ok("k = 3, 4, 5 isomorphic".into())
}

fn join_example() -> Outcome {
    let e = engine();
    let x = objects(e, &[2, 2, 2, 2])[0];
    // Letter i is the generator numbered i + 1.
    let j = e.join(&Word::new(x, vec![1]), &Word::new(x, vec![0, 2])).map_err(err)?;
    let expected = Word::new(x, vec![0, 2, 1, 2, 0, 1]);
    ensure!(j.len() == 6, "join has length {}", j.len());
    ensure!(e.equal_positive(&j, &expected).map_err(err)?, "engine disagrees");
    let v = oracle_equal(e.pres(), &j, &expected, OracleCaps::default()).map_err(err)?;
    ensure!(v == Verdict::Yes, "oracle says {v:?}");
    Ok("2 v 13 = 132312".into())
}

const RANDOM_LABELS: &[&[usize]] = &[
    &[2, 2, 2],
    &[2, 2, 2, 2],
    &[3, 3, 3],
    &[3, 3, 3, 3],
    &[2, 3, 3],
    &[2, 2, 3],
    &[3, 4],
    &[3, 4, 3],
];

fn oracle_agreement() -> Outcome {
    let e = engine();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut yes, mut no, mut open) = (0, 0, 0);
    for &l in RANDOM_LABELS {
        let xs = objects(e, l);
        for i in 0..1000 {
            let x = xs[rng.gen_range(0..xs.len())];
            let u = random_word(e, x, rng.gen_range(0..=6), &mut rng);
            let v = if i % 2 == 0 {
                scramble(e, &u, 8, 6, &mut rng)
            } else {
                random_word(e, x, rng.gen_range(0..=6), &mut rng)
            };
            let fast = e.equal_positive(&u, &v).map_err(err)?;
            match oracle_equal(e.pres(), &u, &v, OracleCaps::default()).map_err(err)? {
                Verdict::Yes => {
                    ensure!(fast, "{l:?}: oracle equal, engine not: {u:?} {v:?}");
                    yes += 1;
                }
                Verdict::No => {
                    ensure!(!fast, "{l:?}: engine equal, oracle not: {u:?} {v:?}");
                    no += 1;
                }
                Verdict::Inconclusive => open += 1,
            }
        }
    }
    Ok(format!("{yes} equal, {no} distinct, {open} inconclusive"))
}

fn normal_forms() -> Outcome {
    let e = engine();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut words = 0;
    for &l in RANDOM_LABELS {
        let xs = objects(e, l);
        for _ in 0..500 {
            let x = xs[rng.gen_range(0..xs.len())];
            let u = random_word(e, x, rng.gen_range(0..=8), &mut rng);
            let nf = e.greedy_normal_form(&u).map_err(err)?;
            let mut glued = Word::empty(x);
            for f in &nf {
                ensure!(!f.is_empty() && e.is_simple(f).map_err(err)?, "factor not simple");
                glued = e.concat(&glued, f).map_err(err)?;
            }
            ensure!(e.equal_positive(&glued, &u).map_err(err)?, "recomposition differs");
            for k in 0..nf.len() {
                let mut rest = nf[k].clone();
                for f in &nf[k + 1..] {
                    rest = e.concat(&rest, f).map_err(err)?;
                }
                let head = e.meet(&rest, &e.delta(rest.source).map_err(err)?).map_err(err)?;
                ensure!(e.equal_positive(&head, &nf[k]).map_err(err)?, "factor {k} is not the head");
            }
            let v = scramble(e, &u, 6, 10, &mut rng);
            ensure!(e.greedy_normal_form(&v).map_err(err)? == nf, "equal words, different forms");
            words += 1;
        }
    }
    Ok(format!("{words} words"))
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 12] = [
        ("artin reduction", artin_reduction),
        ("pentagon orientation", pentagon),
        ("characteristic graph counts", characteristic_graphs),
        ("weight functor", weights),
        ("cube condition", cube),
        ("garside axioms", garside),
        ("interval sizes", interval_sizes),
        ("lattice property", lattices),
        ("tamari isomorphism", tamari_orders),
        ("reversing example", join_example),
        ("oracle agreement", oracle_agreement),
        ("greedy normal form", normal_forms),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} ({secs:.1}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} ({secs:.1}s)", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
