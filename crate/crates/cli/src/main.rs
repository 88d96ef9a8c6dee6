use std::fs;
use std::io::{self, Read};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use diskgarside::disk::{default_fan, ObjectJson};
use diskgarside::lattice::find_isomorphism;
use diskgarside::oracle::classical_tamari;
use diskgarside::{
    enumerate_objects, interval, oracle_equal, tamari, verify_lattice, DiskObject, Engine, EngineConfig, Error,
    GroupoidElement, Labelling, Move, ObjId, OracleCaps, Verdict, Word,
};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "diskgarside", version, about = "Groupoids of labelled disk decompositions")]
struct Cli {
    /// Machine readable output.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for interval and cube enumeration.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// TOML file with default settings; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the canonical keys of all objects with the given labels.
    Objects(LabelsArg),
    /// List the elementary moves at an object.
    Atoms(ObjectArg),
    /// Apply one elementary move.
    Rotate {
        #[command(flatten)]
        object: ObjectArg,
        #[arg(long)]
        arc: usize,
        /// Undo a move instead: both ends step clockwise.
        #[arg(long)]
        inverse: bool,
    },
    /// Show the relation starting with two moves.
    Complement {
        #[command(flatten)]
        object: ObjectArg,
        /// Two arc ids, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        arcs: Vec<usize>,
    },
    /// The Garside element at an object.
    Delta(ObjectArg),
    /// Greedy normal form of a word.
    Nf {
        /// Word JSON file, or `-` for stdin.
        #[arg(long)]
        word: String,
    },
    /// Decide equality of two positive words.
    Equal {
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        /// Also ask the rewriting oracle.
        #[arg(long)]
        oracle: bool,
    },
    /// Decide whether a fraction is the identity.
    WordProblem {
        /// Fraction JSON file `{den, num}`, or `-` for stdin.
        #[arg(long)]
        fraction: String,
    },
    /// Check the cube condition on objects.
    CubeCheck(Selection),
    /// The lattice of simple elements at an object.
    Interval {
        #[command(flatten)]
        selection: Selection,
        /// Write a DOT rendering to this path (`-` for stdout).
        #[arg(long)]
        dot: Option<String>,
    },
    /// The order on all triangulations obtained from a base object.
    Tamari {
        #[command(flatten)]
        labels: LabelsArg,
        /// `fan` or an object key.
        #[arg(long, default_value = "fan")]
        base: String,
        #[arg(long)]
        dot: Option<String>,
    },
    /// Saturated diagram spanned by some atoms.
    Chargraph {
        #[command(flatten)]
        object: ObjectArg,
        #[arg(long, value_delimiter = ',', required = true)]
        arcs: Vec<usize>,
        #[arg(long)]
        dot: Option<String>,
    },
    /// Weight of a move or of a word.
    Weight {
        #[arg(long)]
        object: Option<String>,
        #[arg(long, requires = "object")]
        arc: Option<usize>,
        /// Word JSON file instead of a single move.
        #[arg(long, conflicts_with_all = ["object", "arc"])]
        word: Option<String>,
    },
}

#[derive(Args)]
struct LabelsArg {
    /// Comma separated labels, for example `3,3,3`.
    #[arg(long)]
    labels: Option<String>,
}

#[derive(Args)]
struct ObjectArg {
    /// Object key, object JSON file, or `-` for stdin.
    #[arg(long)]
    object: String,
}

#[derive(Args)]
struct Selection {
    #[arg(long, conflicts_with = "labels")]
    object: Option<String>,
    #[arg(long)]
    labels: Option<String>,
}

#[derive(Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct Config {
    labels: Option<String>,
    threads: Option<usize>,
    json: Option<bool>,
    reverse_cap: Option<usize>,
    node_cap: Option<usize>,
    object_cap: Option<usize>,
    oracle_max_len: Option<usize>,
    oracle_max_class: Option<usize>,
}

struct Settings {
    json: bool,
    threads: usize,
    labels: Option<String>,
    node_cap: usize,
    object_cap: usize,
    caps: OracleCaps,
}

enum Failure {
    Usage(String),
    Violation(String),
    Cap(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Outcome<T = ()> = Result<T, Failure>;

#[derive(Serialize, Deserialize)]
struct WordJson {
    source: String,
    arcs: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct FractionJson {
    den: WordJson,
    num: WordJson,
}

fn read_input(path: &str) -> Outcome<String> {
    if path == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::Usage(format!("stdin: {e}")))?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{path}: {e}")))
    }
}

fn write_output(path: &str, text: &str) -> Outcome {
    if path == "-" {
        print!("{text}");
        Ok(())
    } else {
        fs::write(path, text).map_err(|e| Failure::Usage(format!("{path}: {e}")))
    }
}

fn parse_object(arg: &str) -> Outcome<DiskObject> {
    if arg.starts_with("v1:") {
        return Ok(DiskObject::parse_key(arg)?);
    }
    let text = read_input(arg)?;
    let text = text.trim();
    if text.starts_with("v1:") {
        return Ok(DiskObject::parse_key(text)?);
    }
    let json: ObjectJson = serde_json::from_str(text).map_err(Error::from)?;
    Ok(DiskObject::from_json(&json)?)
}

fn word_from_json(e: &Engine, w: &WordJson) -> Outcome<Word> {
    let x = e.pres().intern(&DiskObject::parse_key(&w.source)?);
    let word = Word::new(x, w.arcs.clone());
    e.target(&word)?;
    Ok(word)
}

fn word_to_json(e: &Engine, w: &Word) -> WordJson {
    WordJson {
        source: e.pres().key(w.source),
        arcs: w.arcs.clone(),
    }
}

fn parse_word(e: &Engine, path: &str) -> Outcome<Word> {
    let json: WordJson = serde_json::from_str(&read_input(path)?).map_err(Error::from)?;
    word_from_json(e, &json)
}

fn labelling(arg: Option<&str>, settings: &Settings) -> Outcome<Labelling> {
    let text = arg
        .or(settings.labels.as_deref())
        .ok_or_else(|| Failure::Usage("--labels is required".into()))?;
    Ok(Labelling::parse(text)?)
}

fn selected(e: &Engine, sel: &Selection, settings: &Settings) -> Outcome<Vec<ObjId>> {
    match &sel.object {
        Some(arg) => Ok(vec![e.pres().intern(&parse_object(arg)?)]),
        None => {
            let l = labelling(sel.labels.as_deref(), settings)?;
            Ok(enumerate_objects(&l, settings.object_cap)?
                .iter()
                .map(|o| e.pres().intern(o))
                .collect())
        }
    }
}

fn emit(settings: &Settings, value: Value, text: impl FnOnce() -> String) {
    if settings.json {
        println!("{}", serde_json::to_string_pretty(&value).expect("values serialise"));
    } else {
        print!("{}", text());
    }
}

fn run(cli: Cli) -> Outcome {
    let config: Config = match &cli.config {
        Some(path) => toml::from_str(&read_input(&path.to_string_lossy())?)
            .map_err(|e| Failure::Usage(format!("config: {e}")))?,
        None => Config::default(),
    };
    let defaults = OracleCaps::default();
    let settings = Settings {
        json: cli.json || config.json.unwrap_or(false),
        threads: cli.threads.or(config.threads).unwrap_or(1).max(1),
        labels: config.labels,
        node_cap: config.node_cap.unwrap_or(100_000),
        object_cap: config.object_cap.unwrap_or(100_000),
        caps: OracleCaps {
            max_len: config.oracle_max_len.unwrap_or(defaults.max_len),
            max_class: config.oracle_max_class.unwrap_or(defaults.max_class),
        },
    };
    let engine = Engine::new(EngineConfig {
        reverse_cap: config.reverse_cap.unwrap_or(EngineConfig::default().reverse_cap),
    });
    let e = &engine;
    let p = e.pres();

    match cli.command {
        Command::Objects(arg) => {
            let l = labelling(arg.labels.as_deref(), &settings)?;
            let keys: Vec<String> = enumerate_objects(&l, settings.object_cap)?
                .iter()
                .map(|o| o.key().to_string())
                .collect();
            emit(&settings, json!(keys), || keys.iter().map(|k| format!("{k}\n")).collect());
        }
        Command::Atoms(arg) => {
            let x = p.intern(&parse_object(&arg.object)?);
            let o = p.object(x);
            let mut rows = Vec::new();
            for mv in p.atoms(x) {
                rows.push(json!({
                    "arc": mv.arc,
                    "ends": o.arc(mv.arc),
                    "target": p.key(p.target(mv)?),
                    "weight": p.weight(mv)?,
                }));
            }
            emit(&settings, json!(rows), || {
                rows.iter()
                    .map(|r| format!("{} {} -> {} (weight {})\n", r["arc"], r["ends"], r["target"], r["weight"]))
                    .collect()
            });
        }
        Command::Rotate { object, arc, inverse } => {
            let o = parse_object(&object.object)?;
            let (t, corr) = if inverse { o.unrotate_arc(arc)? } else { o.rotate_arc(arc)? };
            let key = t.key().to_string();
            emit(&settings, json!({ "target": key, "correspondence": corr }), || format!("{key}\n"));
        }
        Command::Complement { object, arcs } => {
            if arcs.len() != 2 {
                return Err(Failure::Usage("--arcs takes exactly two arc ids".into()));
            }
            let x = p.intern(&parse_object(&object.object)?);
            let r = p.relation(x, arcs[0], arcs[1])?;
            emit(&settings, json!({
                "kind": format!("{:?}", r.kind),
                "left": word_to_json(e, &Word::new(x, r.left.clone())),
                "right": word_to_json(e, &Word::new(x, r.right.clone())),
            }), || format!("{:?}: {:?} = {:?}\n", r.kind, r.left, r.right));
        }
        Command::Delta(arg) => {
            let x = p.intern(&parse_object(&arg.object)?);
            let d = e.delta(x)?;
            let target = p.key(e.target(&d)?);
            emit(&settings, json!({ "delta": word_to_json(e, &d), "target": target }), || {
                format!("{:?} -> {target}\n", d.arcs)
            });
        }
        Command::Nf { word } => {
            let w = parse_word(e, &word)?;
            let nf = e.greedy_normal_form(&w)?;
            let out: Vec<WordJson> = nf.iter().map(|f| word_to_json(e, f)).collect();
            emit(&settings, json!(out), || {
                let parts: Vec<String> = nf.iter().map(|f| format!("{:?}", f.arcs)).collect();
                format!("{}\n", parts.join(" "))
            });
        }
        Command::Equal { left, right, oracle } => {
            let u = parse_word(e, &left)?;
            let v = parse_word(e, &right)?;
            let equal = e.equal_positive(&u, &v)?;
            let verdict = if oracle {
                Some(oracle_equal(p, &u, &v, settings.caps)?)
            } else {
                None
            };
            emit(&settings, json!({ "equal": equal, "oracle": verdict }), || match verdict {
                Some(v) => format!("{equal} (oracle: {v:?})\n"),
                None => format!("{equal}\n"),
            });
            match verdict {
                Some(Verdict::Yes) if !equal => return Err(Failure::Violation("oracle disagrees".into())),
                Some(Verdict::No) if equal => return Err(Failure::Violation("oracle disagrees".into())),
                _ => {}
            }
        }
        Command::WordProblem { fraction } => {
            let f: FractionJson = serde_json::from_str(&read_input(&fraction)?).map_err(Error::from)?;
            let g = GroupoidElement {
                den: word_from_json(e, &f.den)?,
                num: word_from_json(e, &f.num)?,
            };
            if g.den.source != g.num.source {
                return Err(Error::SourceMismatch.into());
            }
            let identity = e.is_identity(&g)?;
            let reduced = e.simplify(&g)?;
            emit(&settings, json!({
                "identity": identity,
                "reduced": { "den": word_to_json(e, &reduced.den), "num": word_to_json(e, &reduced.num) },
            }), || format!("{identity}\n"));
        }
        Command::CubeCheck(sel) => {
            let mut reports = Vec::new();
            let (mut failures, mut open) = (0, 0);
            for x in selected(e, &sel, &settings)? {
                let r = e.cube_check(x, settings.caps, settings.threads)?;
                failures += r.failures();
                open += r.inconclusive();
                reports.push(json!({
                    "object": p.key(x),
                    "triples": r.triples.len(),
                    "failures": r.triples.iter().filter(|t| t.status != diskgarside::engine::CubeStatus::Pass).collect::<Vec<_>>(),
                }));
            }
            let count = reports.len();
            emit(&settings, json!(reports), || {
                format!("{count} objects, {failures} failures, {open} inconclusive\n")
            });
            if failures > 0 {
                return Err(Failure::Violation(format!("{failures} cube failures")));
            }
            if open > 0 {
                return Err(Failure::Cap(format!("{open} triples inconclusive at the oracle caps")));
            }
        }
        Command::Interval { selection, dot } => {
            let x = *selected(e, &selection, &settings)?
                .first()
                .ok_or_else(|| Failure::Usage("no object selected".into()))?;
            let l = interval(e, x, settings.node_cap, settings.threads)?;
            let report = verify_lattice(e, &l)?;
            if let Some(path) = &dot {
                write_output(path, &l.to_dot(e)?)?;
            }
            if dot.as_deref() != Some("-") {
                let mut value = l.to_json(e)?;
                value["size"] = json!(l.len());
                value["lattice"] = json!(report.passed());
                emit(&settings, value, || {
                    format!("size {}, {} covers, lattice {}\n", l.len(), l.covers.len(), report.passed())
                });
            }
            if !report.passed() {
                return Err(Failure::Violation("interval is not a lattice".into()));
            }
        }
        Command::Tamari { labels, base, dot } => {
            let base = if base == "fan" {
                default_fan(&labelling(labels.labels.as_deref(), &settings)?, 0)?
            } else {
                parse_object(&base)?
            };
            let t = tamari(e, &base, settings.node_cap, settings.threads)?;
            let k = base.labels().len();
            let iso = find_isomorphism(&t.poset(), &classical_tamari(k).1).is_some();
            if let Some(path) = &dot {
                write_output(path, &t.to_dot(e))?;
            }
            if dot.as_deref() != Some("-") {
                let mut value = t.to_json(e);
                value["classical"] = json!(iso);
                emit(&settings, value, || {
                    format!("size {}, {} covers, classical Tamari {iso}\n", t.objects.len(), t.covers.len())
                });
            }
        }
        Command::Chargraph { object, arcs, dot } => {
            let x = p.intern(&parse_object(&object.object)?);
            let g = p.characteristic_graph(x, &arcs, settings.node_cap)?;
            if let Some(path) = &dot {
                write_output(path, &g.to_dot(p))?;
            }
            if dot.as_deref() != Some("-") {
                let nodes: Vec<String> = g.nodes.iter().map(|&n| p.key(n)).collect();
                emit(&settings, json!({ "nodes": nodes, "edges": g.edges, "rank": g.rank }), || {
                    format!("{} nodes, {} edges, rank {}\n", g.nodes.len(), g.edges.len(), g.rank)
                });
            }
        }
        Command::Weight { object, arc, word } => {
            let w = match (word, object, arc) {
                (Some(path), _, _) => parse_word(e, &path)?,
                (None, Some(arg), Some(a)) => {
                    let x = p.intern(&parse_object(&arg)?);
                    p.weight(Move { source: x, arc: a })?;
                    Word::new(x, vec![a])
                }
                _ => return Err(Failure::Usage("give --word, or --object with --arc".into())),
            };
            let weight = e.weight(&w)?;
            emit(&settings, json!({ "weight": weight }), || format!("{weight}\n"));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Violation(msg)) => {
            eprintln!("violation: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Cap(msg)) => {
            eprintln!("cap reached: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Lib(err)) => {
            eprintln!("error: {err}");
            ExitCode::from(match err {
                e if e.is_cap() => 3,
                Error::Postcondition(_) => 1,
                _ => 2,
            })
        }
    }
}
