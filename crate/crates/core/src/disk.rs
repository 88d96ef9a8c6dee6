//! Combinatorial decompositions of the labelled disk.
//!
//! An object is a set of `n - 1` pairwise non-crossing chords between the
//! `m` boundary vertices of a disk. Vertices are numbered counterclockwise
//! and boundary edge `i` runs from vertex `i` to vertex `i + 1 (mod m)`.
//! Parallel chords are allowed; they bound bigon regions.
//!
//! Each vertex carries a rotation list: the chord ends at that vertex in
//! counterclockwise order, starting just after the boundary edge towards
//! `v + 1` and ending just before the boundary edge towards `v - 1`.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index of an arc inside one [`DiskObject`].
pub type ArcId = usize;

/// Counterclockwise is the positive direction: moves advance arc ends by
/// this many boundary steps in vertex numbering.
pub const POSITIVE_STEP: i64 = 1;

const KEY_VERSION: &str = "v1";

/// The multiset of puncture labels together with the boundary size.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Labelling {
    labels: Vec<usize>,
    m: usize,
}

impl Labelling {
    pub fn new(labels: &[usize]) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::EmptyLabelling);
        }
        if let Some(&bad) = labels.iter().find(|&&l| l < 2) {
            return Err(Error::LabelTooSmall(bad));
        }
        let m = 2 + labels.iter().map(|l| l - 2).sum::<usize>();
        Ok(Labelling {
            labels: labels.to_vec(),
            m,
        })
    }

    /// Parses a comma separated list such as `3,3,4`.
    pub fn parse(text: &str) -> Result<Self> {
        let labels = text
            .split(',')
            .map(|t| t.trim())
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad label `{t}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        Labelling::new(&labels)
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Number of punctures.
    pub fn n(&self) -> usize {
        self.labels.len()
    }

    /// Number of boundary vertices.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn sorted_labels(&self) -> Vec<usize> {
        let mut l = self.labels.clone();
        l.sort_unstable();
        l
    }
}

impl fmt::Display for Labelling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.labels.iter().map(|l| l.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// Checks a label list and computes the boundary size.
pub fn validate(labels: &[usize]) -> Result<Labelling> {
    Labelling::new(labels)
}

/// A directed edge of the map: a boundary edge traversed counterclockwise
/// or an arc traversed in either direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dart {
    Boundary(usize),
    /// `forward` runs from the smaller endpoint to the larger one.
    Arc { arc: ArcId, forward: bool },
}

/// One interior region, traced with the region on the left.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    pub darts: Vec<Dart>,
    pub vertices: Vec<usize>,
}

impl Face {
    pub fn size(&self) -> usize {
        self.darts.len()
    }

    pub fn contains_arc(&self, arc: ArcId) -> bool {
        self.darts
            .iter()
            .any(|d| matches!(d, Dart::Arc { arc: a, .. } if *a == arc))
    }
}

/// Result of moving arcs: the target object, where every source arc went,
/// and how far each moved end travelled.
#[derive(Clone, Debug)]
pub struct Moved {
    pub target: DiskObject,
    /// `correspondence[old] = new` for every arc of the source.
    pub correspondence: Vec<ArcId>,
    /// `(old vertex, new vertex)` for every end of every moved arc.
    pub ends: Vec<(usize, usize)>,
}

/// An admissible decomposition in canonical form.
#[derive(Clone, Debug)]
pub struct DiskObject {
    labels: Vec<usize>,
    m: usize,
    arcs: Vec<(usize, usize)>,
    rot: Vec<Vec<ArcId>>,
    key: String,
}

impl PartialEq for DiskObject {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key
    }
}

impl Eq for DiskObject {}

impl Hash for DiskObject {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.key.hash(state)
    }
}

impl PartialOrd for DiskObject {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DiskObject {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.key.cmp(&other.key)
    }
}

impl fmt::Display for DiskObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key)
    }
}

/// JSON form of an object.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ObjectJson {
    pub labels: Vec<usize>,
    pub arcs: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotation: Option<BTreeMap<String, Vec<ArcId>>>,
}

/// Counterclockwise boundary distance from `from` to `to`.
pub fn ccw_distance(from: usize, to: usize, m: usize) -> usize {
    (to + m - from) % m
}

fn chords_cross(a: (usize, usize), b: (usize, usize)) -> bool {
    let (p, q) = a;
    let (r, s) = b;
    (p < r && r < q && q < s) || (r < p && p < s && s < q)
}

/// Rotation lists forced by a chord list already sorted by `(u, v)`.
fn canonical_rotation(m: usize, arcs: &[(usize, usize)]) -> Vec<Vec<ArcId>> {
    let mut ends: Vec<Vec<(usize, i64, ArcId)>> = vec![Vec::new(); m];
    let mut layer = 0i64;
    for (id, &(u, v)) in arcs.iter().enumerate() {
        if id > 0 && arcs[id - 1] == (u, v) {
            layer += 1;
        } else {
            layer = 0;
        }
        ends[u].push((v - u, layer, id));
        ends[v].push((m - (v - u), -layer, id));
    }
    ends.into_iter()
        .map(|mut list| {
            list.sort_unstable();
            list.into_iter().map(|(_, _, id)| id).collect()
        })
        .collect()
}

fn trace_faces(m: usize, arcs: &[(usize, usize)], rot: &[Vec<ArcId>]) -> Vec<Face> {
    let head = |d: Dart| match d {
        Dart::Boundary(i) => (i + 1) % m,
        Dart::Arc { arc, forward } => {
            if forward {
                arcs[arc].1
            } else {
                arcs[arc].0
            }
        }
    };
    let tail = |d: Dart| match d {
        Dart::Boundary(i) => i,
        Dart::Arc { arc, forward } => {
            if forward {
                arcs[arc].0
            } else {
                arcs[arc].1
            }
        }
    };
    let next = |d: Dart| {
        let w = head(d);
        let p = match d {
            Dart::Boundary(_) => rot[w].len(),
            Dart::Arc { arc, .. } => rot[w].iter().position(|&a| a == arc).unwrap(),
        };
        if p == 0 {
            Dart::Boundary(w)
        } else {
            let a = rot[w][p - 1];
            Dart::Arc {
                arc: a,
                forward: arcs[a].0 == w,
            }
        }
    };

    let mut all: Vec<Dart> = (0..m).map(Dart::Boundary).collect();
    for a in 0..arcs.len() {
        all.push(Dart::Arc { arc: a, forward: true });
        all.push(Dart::Arc { arc: a, forward: false });
    }
    let mut seen: HashSet<Dart> = HashSet::new();
    let mut faces = Vec::new();
    for start in all {
        if seen.contains(&start) {
            continue;
        }
        let mut darts = Vec::new();
        let mut d = start;
        while seen.insert(d) {
            darts.push(d);
            d = next(d);
        }
        let vertices = darts.iter().map(|&d| tail(d)).collect();
        faces.push(Face { darts, vertices });
    }
    faces
}

impl DiskObject {
    /// Builds the object whose arcs are the given chords. Chord order and
    /// orientation are irrelevant.
    pub fn from_chords(labelling: &Labelling, chords: &[(usize, usize)]) -> Result<Self> {
        let m = labelling.m();
        let mut arcs = Vec::with_capacity(chords.len());
        for &(a, b) in chords {
            if a >= m || b >= m {
                return Err(Error::InvalidObject(format!(
                    "chord {a}-{b} leaves the {m} boundary vertices"
                )));
            }
            if a == b {
                return Err(Error::InvalidObject(format!("chord {a}-{b} is a loop")));
            }
            arcs.push((a.min(b), a.max(b)));
        }
        if arcs.len() + 1 != labelling.n() {
            return Err(Error::InvalidObject(format!(
                "{} labels need {} arcs, got {}",
                labelling.n(),
                labelling.n() - 1,
                arcs.len()
            )));
        }
        arcs.sort_unstable();
        for i in 0..arcs.len() {
            for j in i + 1..arcs.len() {
                if chords_cross(arcs[i], arcs[j]) {
                    return Err(Error::InvalidObject(format!(
                        "chords {}-{} and {}-{} cross",
                        arcs[i].0, arcs[i].1, arcs[j].0, arcs[j].1
                    )));
                }
            }
        }
        let rot = canonical_rotation(m, &arcs);
        let obj = DiskObject::assemble(labelling.sorted_labels(), m, arcs, rot);
        obj.check_faces()?;
        Ok(obj)
    }

    /// Builds an object on `m` boundary vertices from its chords alone, taking
    /// the labels from the region sizes.
    pub fn from_boundary_chords(m: usize, chords: &[(usize, usize)]) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidObject(format!("{m} boundary vertices")));
        }
        let mut arcs: Vec<(usize, usize)> = chords.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
        arcs.sort_unstable();
        if arcs.iter().any(|&(a, b)| a == b || b >= m) {
            return Err(Error::InvalidObject("chord endpoints out of range".into()));
        }
        let rot = canonical_rotation(m, &arcs);
        let mut sizes: Vec<usize> = trace_faces(m, &arcs, &rot).iter().map(Face::size).collect();
        sizes.sort_unstable();
        let labelling = Labelling::new(&sizes)?;
        DiskObject::from_chords(&labelling, chords)
    }

    fn assemble(
        labels: Vec<usize>,
        m: usize,
        arcs: Vec<(usize, usize)>,
        rot: Vec<Vec<ArcId>>,
    ) -> Self {
        let mut key = String::new();
        key.push_str(KEY_VERSION);
        key.push(':');
        let ls: Vec<String> = labels.iter().map(|l| l.to_string()).collect();
        key.push_str(&ls.join(","));
        key.push(':');
        let vs: Vec<String> = rot
            .iter()
            .map(|list| {
                list.iter()
                    .map(|a| a.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect();
        key.push_str(&vs.join("|"));
        DiskObject {
            labels,
            m,
            arcs,
            rot,
            key,
        }
    }

    /// Renumbers arcs by first occurrence in a scan of the rotation lists and
    /// returns the old-to-new map.
    fn from_rotation(labels: Vec<usize>, m: usize, rot: Vec<Vec<ArcId>>, count: usize) -> (Self, Vec<ArcId>) {
        let mut map = vec![usize::MAX; count];
        let mut ends: Vec<Vec<usize>> = vec![Vec::new(); count];
        let mut next = 0;
        for (v, list) in rot.iter().enumerate() {
            for &a in list {
                if map[a] == usize::MAX {
                    map[a] = next;
                    next += 1;
                }
                ends[a].push(v);
            }
        }
        let mut arcs = vec![(0, 0); count];
        for old in 0..count {
            arcs[map[old]] = (ends[old][0], ends[old][1]);
        }
        let rot: Vec<Vec<ArcId>> = rot
            .into_iter()
            .map(|list| list.into_iter().map(|a| map[a]).collect())
            .collect();
        debug_assert_eq!(rot, canonical_rotation(m, &arcs));
        (DiskObject::assemble(labels, m, arcs, rot), map)
    }

    fn check_faces(&self) -> Result<()> {
        let faces = self.faces();
        let mut sizes: Vec<usize> = faces.iter().map(Face::size).collect();
        sizes.sort_unstable();
        if sizes != self.labels {
            return Err(Error::InvalidObject(format!(
                "region sizes {:?} do not match labels {:?}",
                sizes, self.labels
            )));
        }
        Ok(())
    }

    pub fn key(&self) -> &str {
        &self.key
    }

    pub fn labelling(&self) -> Labelling {
        Labelling::new(&self.labels).expect("stored labels are valid")
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    /// Endpoints `(u, v)` with `u < v`.
    pub fn arc(&self, a: ArcId) -> (usize, usize) {
        self.arcs[a]
    }

    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }

    pub fn rotation(&self, v: usize) -> &[ArcId] {
        &self.rot[v]
    }

    pub fn faces(&self) -> Vec<Face> {
        trace_faces(self.m, &self.arcs, &self.rot)
    }

    fn check_arc(&self, a: ArcId) -> Result<()> {
        if a >= self.arcs.len() {
            return Err(Error::InvalidArc {
                arc: a,
                count: self.arcs.len(),
            });
        }
        Ok(())
    }

    /// The elementary move along arc `a`, with the arc correspondence.
    pub fn rotate_arc(&self, a: ArcId) -> Result<(DiskObject, Vec<ArcId>)> {
        let moved = self.move_arcs(&[a])?;
        Ok((moved.target, moved.correspondence))
    }

    /// Rotates every chosen arc one step along its merged region at once.
    pub fn diagonal_move(&self, chosen: &[ArcId]) -> Result<DiskObject> {
        Ok(self.move_arcs(chosen)?.target)
    }

    /// The inverse of [`DiskObject::rotate_arc`]: both ends of `a` step one
    /// edge clockwise along the merged region.
    pub fn unrotate_arc(&self, a: ArcId) -> Result<(DiskObject, Vec<ArcId>)> {
        let moved = self.shift_arcs(&[a], false)?;
        Ok((moved.target, moved.correspondence))
    }

    /// Moves the chosen arcs simultaneously and reports the full bookkeeping.
    pub fn move_arcs(&self, chosen: &[ArcId]) -> Result<Moved> {
        self.shift_arcs(chosen, true)
    }

    fn shift_arcs(&self, chosen: &[ArcId], positive: bool) -> Result<Moved> {
        if chosen.is_empty() {
            return Err(Error::EmptySelection);
        }
        let count = self.arcs.len();
        let mut removed = vec![false; count];
        for &a in chosen {
            self.check_arc(a)?;
            if removed[a] {
                return Err(Error::DuplicateArc(a));
            }
            removed[a] = true;
        }
        let m = self.m;
        let t: Vec<Vec<ArcId>> = self
            .rot
            .iter()
            .map(|l| l.iter().copied().filter(|&a| !removed[a]).collect())
            .collect();

        // (vertex, slot, source position, arc): ends arriving through the same
        // corner keep their relative order, as under a rigid shift.
        let mut inserts: Vec<(usize, usize, usize, ArcId)> = Vec::new();
        let mut ends = Vec::new();
        for s in 0..m {
            let mut kept = 0;
            for (pos, &a) in self.rot[s].iter().enumerate() {
                if !removed[a] {
                    kept += 1;
                    continue;
                }
                let other = |b: ArcId| {
                    let (x, y) = self.arcs[b];
                    if x == s {
                        y
                    } else {
                        x
                    }
                };
                let (to, slot) = if positive {
                    if kept > 0 {
                        let b = t[s][kept - 1];
                        let to = other(b);
                        (to, t[to].iter().position(|&c| c == b).unwrap())
                    } else {
                        let to = (s + 1) % m;
                        (to, t[to].len())
                    }
                } else if kept < t[s].len() {
                    let b = t[s][kept];
                    let to = other(b);
                    (to, t[to].iter().position(|&c| c == b).unwrap() + 1)
                } else {
                    ((s + m - 1) % m, 0)
                };
                inserts.push((to, slot, pos, a));
                ends.push((s, to));
            }
        }
        inserts.sort_unstable();

        let mut rot: Vec<Vec<ArcId>> = Vec::with_capacity(m);
        let mut it = inserts.iter().peekable();
        for (w, list) in t.iter().enumerate() {
            let mut out = Vec::with_capacity(list.len() + 2);
            for idx in 0..=list.len() {
                while let Some(&&(v, slot, _, a)) = it.peek() {
                    if v == w && slot == idx {
                        out.push(a);
                        it.next();
                    } else {
                        break;
                    }
                }
                if idx < list.len() {
                    out.push(list[idx]);
                }
            }
            rot.push(out);
        }

        for (a, &r) in removed.iter().enumerate() {
            if !r {
                continue;
            }
            let at: Vec<usize> = (0..m).filter(|&v| rot[v].contains(&a)).collect();
            if at.len() != 2 {
                return Err(Error::Postcondition(format!(
                    "moving arc {a} of {} produced a loop",
                    self.key
                )));
            }
        }

        let (target, correspondence) = DiskObject::from_rotation(self.labels.clone(), m, rot, count);
        Ok(Moved {
            target,
            correspondence,
            ends,
        })
    }

    /// Rigid relabelling of every vertex `v` to `v + k (mod m)`.
    pub fn shift(&self, k: i64) -> DiskObject {
        self.shift_with_correspondence(k).0
    }

    pub fn shift_with_correspondence(&self, k: i64) -> (DiskObject, Vec<ArcId>) {
        let m = self.m as i64;
        let k = k.rem_euclid(m) as usize;
        let mut rot = vec![Vec::new(); self.m];
        for (v, list) in self.rot.iter().enumerate() {
            rot[(v + k) % self.m] = list.clone();
        }
        DiskObject::from_rotation(self.labels.clone(), self.m, rot, self.arcs.len())
    }

    /// Parses a canonical key. Keys whose arc numbering differs from the
    /// canonical one are accepted if they describe a valid object.
    pub fn parse_key(key: &str) -> Result<Self> {
        let mut parts = key.trim().splitn(3, ':');
        let version = parts.next().unwrap_or_default();
        if version != KEY_VERSION {
            return Err(Error::Parse(format!("unknown key version `{version}`")));
        }
        let labels = parts
            .next()
            .ok_or_else(|| Error::Parse("missing labels".into()))?;
        let body = parts
            .next()
            .ok_or_else(|| Error::Parse("missing rotation lists".into()))?;
        let labelling = Labelling::parse(labels)?;
        let mut lists = Vec::new();
        for chunk in body.split('|') {
            let list = chunk
                .split(',')
                .filter(|t| !t.is_empty())
                .map(|t| {
                    t.parse::<ArcId>()
                        .map_err(|_| Error::Parse(format!("bad arc id `{t}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            lists.push(list);
        }
        if lists.len() != labelling.m() {
            return Err(Error::Parse(format!(
                "expected {} rotation lists, got {}",
                labelling.m(),
                lists.len()
            )));
        }
        DiskObject::from_lists(&labelling, &lists)
    }

    fn from_lists(labelling: &Labelling, lists: &[Vec<ArcId>]) -> Result<Self> {
        let count = labelling.n() - 1;
        let mut at: Vec<Vec<usize>> = vec![Vec::new(); count];
        for (v, list) in lists.iter().enumerate() {
            for &a in list {
                if a >= count {
                    return Err(Error::InvalidArc { arc: a, count });
                }
                at[a].push(v);
            }
        }
        let mut chords = Vec::with_capacity(count);
        for (a, vs) in at.iter().enumerate() {
            if vs.len() != 2 || vs[0] == vs[1] {
                return Err(Error::InvalidObject(format!(
                    "arc {a} must have two distinct ends, found {vs:?}"
                )));
            }
            chords.push((vs[0], vs[1]));
        }
        let obj = DiskObject::from_chords(labelling, &chords)?;
        obj.check_lists(&chords, lists)?;
        Ok(obj)
    }

    /// Checks that user supplied rotation lists agree with the forced
    /// embedding of their chords.
    fn check_lists(&self, chords: &[(usize, usize)], lists: &[Vec<ArcId>]) -> Result<()> {
        let norm = |a: ArcId| (chords[a].0.min(chords[a].1), chords[a].0.max(chords[a].1));
        for (v, list) in lists.iter().enumerate() {
            let given: Vec<(usize, usize)> = list.iter().map(|&a| norm(a)).collect();
            let expected: Vec<(usize, usize)> = self.rot[v].iter().map(|&a| self.arcs[a]).collect();
            if given != expected {
                return Err(Error::InvalidObject(format!(
                    "rotation at vertex {v} is not planar"
                )));
            }
        }
        let mut classes: BTreeMap<(usize, usize), Vec<ArcId>> = BTreeMap::new();
        for a in 0..chords.len() {
            classes.entry(norm(a)).or_default().push(a);
        }
        for ((u, v), members) in classes {
            if members.len() < 2 {
                continue;
            }
            let at_u: Vec<ArcId> = lists[u].iter().copied().filter(|a| members.contains(a)).collect();
            let mut at_v: Vec<ArcId> = lists[v].iter().copied().filter(|a| members.contains(a)).collect();
            at_v.reverse();
            if at_u != at_v {
                return Err(Error::InvalidObject(format!(
                    "parallel arcs between {u} and {v} cross"
                )));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> ObjectJson {
        ObjectJson {
            labels: self.labels.clone(),
            arcs: self.arcs.iter().map(|&(u, v)| [u, v]).collect(),
            rotation: Some(
                self.rot
                    .iter()
                    .enumerate()
                    .map(|(v, l)| (v.to_string(), l.clone()))
                    .collect(),
            ),
        }
    }

    pub fn from_json(json: &ObjectJson) -> Result<Self> {
        let labelling = Labelling::new(&json.labels)?;
        let chords: Vec<(usize, usize)> = json.arcs.iter().map(|&[u, v]| (u, v)).collect();
        match &json.rotation {
            None => DiskObject::from_chords(&labelling, &chords),
            Some(map) => {
                let mut lists = vec![Vec::new(); labelling.m()];
                for (v, list) in map {
                    let v: usize = v
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad vertex `{v}`")))?;
                    if v >= lists.len() {
                        return Err(Error::Parse(format!("vertex {v} out of range")));
                    }
                    lists[v] = list.clone();
                }
                let obj = DiskObject::from_chords(&labelling, &chords)?;
                for (a, &(u, v)) in chords.iter().enumerate() {
                    if !lists[u].contains(&a) || !lists[v].contains(&a) {
                        return Err(Error::InvalidObject(format!(
                            "rotation lists disagree with arc {a}"
                        )));
                    }
                }
                DiskObject::from_lists(&labelling, &lists)?;
                Ok(obj)
            }
        }
    }
}

/// The object whose arcs all end at `q0`, with regions in the given label
/// order counterclockwise from `q0`.
pub fn fan(labelling: &Labelling, q0: usize, region_order: &[usize]) -> Result<DiskObject> {
    let n = labelling.n();
    let m = labelling.m();
    let mut seen = vec![false; n];
    if region_order.len() != n {
        return Err(Error::InvalidPermutation(n));
    }
    for &i in region_order {
        if i >= n || seen[i] {
            return Err(Error::InvalidPermutation(n));
        }
        seen[i] = true;
    }
    if q0 >= m {
        return Err(Error::InvalidObject(format!("vertex {q0} out of range")));
    }
    let labels = labelling.labels();
    let mut chords = Vec::with_capacity(n.saturating_sub(1));
    let mut offset = 0;
    for (pos, &region) in region_order.iter().enumerate().take(n.saturating_sub(1)) {
        offset += if pos == 0 { labels[region] - 1 } else { labels[region] - 2 };
        chords.push((q0, (q0 + offset) % m));
    }
    DiskObject::from_chords(labelling, &chords)
}

/// Fan at `q0` with regions in the given label order.
pub fn default_fan(labelling: &Labelling, q0: usize) -> Result<DiskObject> {
    let order: Vec<usize> = (0..labelling.n()).collect();
    fan(labelling, q0, &order)
}

/// Multiset of labels as `(value, count)` pairs with ascending values.
type Counts = Vec<(usize, usize)>;

fn counts_of(labels: &[usize]) -> Counts {
    let mut map: BTreeMap<usize, usize> = BTreeMap::new();
    for &l in labels {
        *map.entry(l).or_default() += 1;
    }
    map.into_iter().collect()
}

fn excess(c: &Counts) -> usize {
    c.iter().map(|&(l, k)| (l - 2) * k).sum()
}

fn total(c: &Counts) -> usize {
    c.iter().map(|&(_, k)| k).sum()
}

/// All sub-multisets of `avail` with the given excess.
fn sub_multisets(avail: &Counts, want: usize) -> Vec<Counts> {
    fn go(avail: &Counts, i: usize, want: usize, cur: &mut Counts, out: &mut Vec<Counts>) {
        if i == avail.len() {
            if want == 0 {
                out.push(cur.iter().copied().filter(|&(_, k)| k > 0).collect());
            }
            return;
        }
        let (l, k) = avail[i];
        for take in 0..=k {
            let e = (l - 2) * take;
            if e > want {
                break;
            }
            cur.push((l, take));
            go(avail, i + 1, want - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(avail, 0, want, &mut Vec::new(), &mut out);
    out
}

fn minus(a: &Counts, b: &Counts) -> Counts {
    a.iter()
        .map(|&(l, k)| {
            let t = b.iter().find(|&&(x, _)| x == l).map_or(0, |&(_, t)| t);
            (l, k - t)
        })
        .filter(|&(_, k)| k > 0)
        .collect()
}

/// Every way to fill the polygon `poly` (vertices in counterclockwise order,
/// closing side from the last vertex back to the first) with regions whose
/// sizes form `labels`. Each result lists the chords used.
fn fillings(poly: &[usize], labels: &Counts) -> Vec<Vec<(usize, usize)>> {
    let k = poly.len();
    let mut out = Vec::new();
    for &(face, _) in labels {
        if face > k {
            continue;
        }
        let rest = minus(labels, &vec![(face, 1)]);
        // Face vertices: indices 0, 1 and face - 2 more from 2..k.
        let mut picks: Vec<usize> = Vec::new();
        choose(2, k, face - 2, &mut picks, &mut |extra| {
            let mut idx = vec![0, 1];
            idx.extend_from_slice(extra);
            idx.push(k);
            // Sides after the first one, as index ranges into poly.
            let sides: Vec<(usize, usize)> = idx.windows(2).skip(1).map(|w| (w[0], w[1])).collect();
            distribute(poly, &sides, 0, &rest, &mut Vec::new(), &mut out);
        });
    }
    out
}

fn choose(from: usize, to: usize, count: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    if count == 0 {
        f(cur);
        return;
    }
    for i in from..to {
        if to - i < count {
            break;
        }
        cur.push(i);
        choose(i + 1, to, count - 1, cur, f);
        cur.pop();
    }
}

fn sub_polygon(poly: &[usize], a: usize, b: usize) -> Vec<usize> {
    let k = poly.len();
    (a..=b).map(|i| poly[i % k]).collect()
}

fn distribute(
    poly: &[usize],
    sides: &[(usize, usize)],
    i: usize,
    rest: &Counts,
    parts: &mut Vec<Vec<Vec<(usize, usize)>>>,
    out: &mut Vec<Vec<(usize, usize)>>,
) {
    if i == sides.len() {
        if total(rest) != 0 {
            return;
        }
        let mut acc: Vec<Vec<(usize, usize)>> = vec![Vec::new()];
        for options in parts.iter() {
            let mut next = Vec::with_capacity(acc.len() * options.len());
            for base in &acc {
                for opt in options {
                    let mut c = base.clone();
                    c.extend_from_slice(opt);
                    next.push(c);
                }
            }
            acc = next;
        }
        out.extend(acc);
        return;
    }
    let (a, b) = sides[i];
    let gap = b - a;
    for sub in sub_multisets(rest, gap - 1) {
        if total(&sub) == 0 {
            if gap != 1 {
                continue;
            }
            parts.push(vec![Vec::new()]);
        } else {
            let poly_sub = sub_polygon(poly, a, b);
            let chord = (poly_sub[0], *poly_sub.last().unwrap());
            let inner: Vec<Vec<(usize, usize)>> = fillings(&poly_sub, &sub)
                .into_iter()
                .map(|mut c| {
                    c.push(chord);
                    c
                })
                .collect();
            if inner.is_empty() {
                continue;
            }
            parts.push(inner);
        }
        distribute(poly, sides, i + 1, &minus(rest, &sub), parts, out);
        parts.pop();
    }
}

/// All objects of a labelling, sorted by canonical key.
pub fn enumerate_objects(labelling: &Labelling, cap: usize) -> Result<Vec<DiskObject>> {
    let m = labelling.m();
    let poly: Vec<usize> = (0..m).collect();
    let counts = counts_of(labelling.labels());
    debug_assert_eq!(excess(&counts), m - 2);
    let mut seen = HashSet::new();
    let mut objects = Vec::new();
    for chords in fillings(&poly, &counts) {
        let obj = DiskObject::from_chords(labelling, &chords)?;
        if seen.insert(obj.key().to_string()) {
            objects.push(obj);
            if objects.len() > cap {
                return Err(Error::ObjectCap(cap));
            }
        }
    }
    objects.sort();
    Ok(objects)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lab(l: &[usize]) -> Labelling {
        Labelling::new(l).unwrap()
    }

    #[test]
    fn boundary_sizes() {
        assert_eq!(lab(&[3, 3]).m(), 4);
        assert_eq!(lab(&[2, 2]).m(), 2);
        assert_eq!(lab(&[3, 4, 5]).m(), 8);
        assert!(matches!(Labelling::new(&[]), Err(Error::EmptyLabelling)));
        assert!(matches!(Labelling::new(&[3, 1]), Err(Error::LabelTooSmall(1))));
    }

    #[test]
    fn small_enumerations() {
        assert_eq!(enumerate_objects(&lab(&[3, 3]), 100).unwrap().len(), 2);
        assert_eq!(enumerate_objects(&lab(&[2, 2]), 100).unwrap().len(), 1);
        assert_eq!(enumerate_objects(&lab(&[3, 3, 3]), 100).unwrap().len(), 5);
        assert_eq!(enumerate_objects(&lab(&[5]), 100).unwrap().len(), 1);
        assert!(matches!(
            enumerate_objects(&lab(&[3, 3, 3, 3]), 3),
            Err(Error::ObjectCap(3))
        ));
    }

    #[test]
    fn square_diagonals_swap() {
        let l = lab(&[3, 3]);
        let x0 = DiskObject::from_chords(&l, &[(1, 3)]).unwrap();
        let x1 = DiskObject::from_chords(&l, &[(0, 2)]).unwrap();
        let (y, corr) = x0.rotate_arc(0).unwrap();
        assert_eq!(y, x1);
        assert_eq!(corr, vec![0]);
        assert_eq!(x0.shift(1), x1);
        assert_eq!(x0.shift(2), x0);
    }

    #[test]
    fn nine_gon_move() {
        let l = lab(&[3, 3, 4, 5]);
        let x = DiskObject::from_chords(&l, &[(3, 5), (7, 0), (0, 3)]).unwrap();
        let a = (0..3).find(|&a| x.arc(a) == (0, 3)).unwrap();
        let (y, corr) = x.rotate_arc(a).unwrap();
        assert_eq!(y.arc(corr[a]), (1, 5));
        let mut sizes: Vec<usize> = x.faces().iter().map(Face::size).collect();
        sizes.sort();
        assert_eq!(sizes, vec![3, 3, 4, 5]);
    }

    #[test]
    fn bigon_arc_returns_to_itself() {
        let l = lab(&[2, 2]);
        let x = DiskObject::from_chords(&l, &[(0, 1)]).unwrap();
        let (y, _) = x.rotate_arc(0).unwrap();
        assert_eq!(x, y);
        assert_eq!(x.faces().len(), 2);
        assert!(x.faces().iter().all(|f| f.size() == 2));
    }

    #[test]
    fn fans() {
        let l = lab(&[3, 3, 3]);
        let f = fan(&l, 0, &[0, 1, 2]).unwrap();
        assert_eq!(f.arcs(), &[(0, 2), (0, 3)]);
        assert_eq!(f.diagonal_move(&[0, 1]).unwrap(), f.shift(1));
        let two = lab(&[2, 2, 2]);
        assert_eq!(fan(&two, 0, &[0, 1, 2]).unwrap(), fan(&two, 1, &[2, 0, 1]).unwrap());
        let l34 = lab(&[3, 4]);
        assert_ne!(fan(&l34, 0, &[0, 1]).unwrap(), fan(&l34, 0, &[1, 0]).unwrap());
        assert!(matches!(fan(&l, 0, &[0, 0, 1]), Err(Error::InvalidPermutation(3))));
    }

    #[test]
    fn key_round_trip() {
        for l in [&[2, 2, 2][..], &[3, 4, 3], &[2, 3, 3, 4]] {
            for x in enumerate_objects(&lab(l), 1000).unwrap() {
                let back = DiskObject::parse_key(x.key()).unwrap();
                assert_eq!(back.key(), x.key());
                let json = serde_json::to_string(&x.to_json()).unwrap();
                let parsed: ObjectJson = serde_json::from_str(&json).unwrap();
                assert_eq!(DiskObject::from_json(&parsed).unwrap(), x);
            }
        }
    }

    #[test]
    fn crossing_chords_rejected() {
        let l = lab(&[3, 3, 3]);
        assert!(DiskObject::from_chords(&l, &[(0, 2), (1, 3)]).is_err());
        assert!(DiskObject::parse_key("v1:3,3,3:0|1|0|1|").is_err());
    }

    #[test]
    fn rotation_is_undone_clockwise() {
        for l in [&[2, 3, 4][..], &[2, 2, 2, 2], &[3, 3, 3, 3], &[2, 3, 2, 4]] {
            for x in enumerate_objects(&lab(l), 1000).unwrap() {
                for a in 0..x.arc_count() {
                    let (y, corr) = x.rotate_arc(a).unwrap();
                    let (z, back) = y.unrotate_arc(corr[a]).unwrap();
                    assert_eq!(z, x);
                    let round: Vec<ArcId> = corr.iter().map(|&c| back[c]).collect();
                    assert_eq!(round, (0..x.arc_count()).collect::<Vec<_>>());
                }
            }
        }
    }
}
