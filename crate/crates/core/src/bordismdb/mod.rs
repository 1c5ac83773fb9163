//! A small database of bordism groups by degree, with recipes that assemble
//! long exact sequence windows from it.
//!
//! ```json
//! {
//!   "entries": [{"name": "Pin-", "groups": {"0": "Z/2"}, "provenance": {"0": "..."}}],
//!   "recipes": [{"name": "...", "columns": [...], "edges": [...], "top": 4, "bottom": 0}]
//! }
//! ```
//!
//! A group value is a group string, `"?"` (unknown) or `"finite"`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::anderson::{dualize_les, Convention, DualizedLes, GradedGroup};
use crate::error::{Error, Result};
use crate::fgab::{FgAbGroup, GroupHom, IntMatrix};
use crate::lescore::format::{error_at, json_error, line_col};
use crate::lescore::{
    parse_constraints, Edge, EdgeState, ExactSequence, Node, NodeSource, NodeState, OrderSet,
    SequenceFile,
};

const SEED: &str = include_str!("../../data/seed.json");

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum DbValue {
    Group(FgAbGroup),
    /// Known to be finite, nothing more.
    Finite,
    Unknown,
}

impl std::str::FromStr for DbValue {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "?" => Ok(DbValue::Unknown),
            "finite" => Ok(DbValue::Finite),
            g => g.parse().map(DbValue::Group),
        }
    }
}

impl DbValue {

    pub fn group(&self) -> Option<&FgAbGroup> {
        match self {
            DbValue::Group(g) => Some(g),
            _ => None,
        }
    }

    pub fn node_state(&self) -> NodeState {
        match self {
            DbValue::Group(g) => NodeState::Known(g.clone()),
            DbValue::Finite => NodeState::OrderConstrained(OrderSet::Finite),
            DbValue::Unknown => NodeState::Unknown,
        }
    }
}

impl fmt::Display for DbValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DbValue::Group(g) => write!(f, "{g}"),
            DbValue::Finite => f.write_str("finite"),
            DbValue::Unknown => f.write_str("?"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DbEntry {
    pub name: String,
    pub groups: BTreeMap<i64, DbValue>,
    /// A citation for every stored degree.
    pub provenance: BTreeMap<i64, String>,
}

impl DbEntry {
    pub fn get(&self, degree: i64) -> Option<&DbValue> {
        self.groups.get(&degree)
    }

    /// Degrees `lo..=hi` without a stored value.
    pub fn gaps(&self, lo: i64, hi: i64) -> Vec<i64> {
        (lo..=hi).filter(|d| !self.groups.contains_key(d)).collect()
    }
}

fn is_false(b: &bool) -> bool {
    !*b
}

fn is_zero(n: &i64) -> bool {
    *n == 0
}

fn is_zero_usize(n: &usize) -> bool {
    *n == 0
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecipeColumn {
    pub label: String,
    pub entry: String,
    /// Row `k` of this column holds degree `k + shift` of the entry.
    #[serde(default, skip_serializing_if = "is_zero")]
    pub shift: i64,
    /// Ignore stored values and treat the column as unknown.
    #[serde(default, skip_serializing_if = "is_false")]
    pub unknown: bool,
}

/// A map fixed by the recipe. `edge` is either a full edge name such as
/// `p_2`, or a column edge name such as `x2` to apply `scalar` in every row.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StatedMap {
    pub edge: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scalar: Option<i64>,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Recipe {
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    pub columns: Vec<RecipeColumn>,
    /// Name of the edge leaving each column; row `k` gets suffix `_k`.
    pub edges: Vec<String>,
    /// Names of the dual edges, column for column.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub dual_edges: Vec<String>,
    pub top: i64,
    pub bottom: i64,
    /// First column present in the top row.
    #[serde(default, skip_serializing_if = "is_zero_usize")]
    pub first_column: usize,
    /// Last column present in the bottom row; defaults to the last column.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub last_column: Option<usize>,
    #[serde(default, skip_serializing_if = "is_false")]
    pub bounded_start: bool,
    #[serde(default, skip_serializing_if = "is_false")]
    pub bounded_end: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub maps: Vec<StatedMap>,
    /// Side constraints in the sequence-file syntax, by node label or edge name.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub constraints: Vec<Value>,
}

impl Recipe {
    pub fn width(&self) -> usize {
        self.columns.len()
    }

    fn last(&self) -> usize {
        self.last_column.unwrap_or(self.width().saturating_sub(1))
    }

    /// The same recipe over rows `top..=bottom`. Partial first and last rows
    /// are kept only where the range ends agree with the recipe's.
    pub fn with_range(&self, top: i64, bottom: i64) -> Recipe {
        let mut r = self.clone();
        if top != self.top {
            r.first_column = 0;
        }
        if bottom != self.bottom {
            r.last_column = None;
            r.bounded_end = false;
        }
        if top != self.top {
            r.bounded_start = false;
        }
        r.top = top;
        r.bottom = bottom;
        r
    }

    /// `(row, column)` of every node, top row first.
    pub fn cells(&self) -> Vec<(i64, usize)> {
        let mut out = Vec::new();
        let mut k = self.top;
        while k >= self.bottom {
            let start = if k == self.top { self.first_column } else { 0 };
            let end = if k == self.bottom { self.last() } else { self.width() - 1 };
            out.extend((start..=end).map(|c| (k, c)));
            k -= 1;
        }
        out
    }

    pub fn node_label(&self, row: i64, column: usize) -> String {
        let c = &self.columns[column];
        format!("{}_{}", c.label, row + c.shift)
    }

    pub fn edge_name(&self, row: i64, column: usize) -> String {
        format!("{}_{}", self.edges[column], row)
    }

    /// Dual name of a primal edge name, following `dual_edges`.
    pub fn dual_edge_name(&self, name: &str) -> String {
        if let Some((prefix, row)) = name.rsplit_once('_') {
            if let Some(c) = self.edges.iter().position(|e| e == prefix) {
                if let Some(d) = self.dual_edges.get(c) {
                    return format!("{d}_{row}");
                }
            }
        }
        format!("I{name}")
    }

    fn validate(&self, entries: &BTreeSet<&str>) -> Result<()> {
        let what = format!("recipe {:?}", self.name);
        let w = self.width();
        if w == 0 {
            return Err(Error::Schema(format!("{what}: no columns")));
        }
        if self.edges.len() != w {
            return Err(Error::Schema(format!("{what}: {} edge names for {w} columns", self.edges.len())));
        }
        if !self.dual_edges.is_empty() && self.dual_edges.len() != w {
            return Err(Error::Schema(format!("{what}: {} dual edge names for {w} columns", self.dual_edges.len())));
        }
        let distinct: BTreeSet<&String> = self.edges.iter().collect();
        if distinct.len() != w {
            return Err(Error::Schema(format!("{what}: edge names repeat")));
        }
        let labels: BTreeSet<&String> = self.columns.iter().map(|c| &c.label).collect();
        if labels.len() != w {
            return Err(Error::Schema(format!("{what}: column labels repeat")));
        }
        for c in &self.columns {
            if !entries.contains(c.entry.as_str()) {
                return Err(Error::Schema(format!("{what}: no entry named {:?}", c.entry)));
            }
        }
        if self.top < self.bottom {
            return Err(Error::Schema(format!("{what}: top {} below bottom {}", self.top, self.bottom)));
        }
        if self.first_column >= w || self.last() >= w {
            return Err(Error::Schema(format!("{what}: first/last column out of range")));
        }
        if self.top == self.bottom && self.first_column > self.last() {
            return Err(Error::Schema(format!("{what}: empty window")));
        }
        for m in &self.maps {
            if m.matrix.is_some() == m.scalar.is_some() {
                return Err(Error::Schema(format!(
                    "{what}: stated map {:?} needs exactly one of matrix, scalar",
                    m.edge
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Database {
    pub entries: Vec<DbEntry>,
    pub recipes: Vec<Recipe>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEntry {
    name: String,
    groups: BTreeMap<String, String>,
    #[serde(default)]
    provenance: BTreeMap<String, String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDb {
    entries: Vec<RawEntry>,
    #[serde(default)]
    recipes: Vec<Recipe>,
}

/// Location of the `n`-th (0-based) occurrence of `"name": <s>`, for
/// duplicate reports.
fn nth_name(src: &str, s: &str, n: usize) -> (usize, usize) {
    let quoted = serde_json::to_string(s).unwrap_or_default();
    let mut from = 0;
    let mut seen = 0;
    while let Some(off) = src[from..].find(&quoted) {
        let at = from + off;
        let before = src[..at].trim_end();
        if before.ends_with(':') && before[..before.len() - 1].trim_end().ends_with("\"name\"") {
            if seen == n {
                return line_col(src, at);
            }
            seen += 1;
        }
        from = at + quoted.len();
    }
    (0, 0)
}

fn parse_degree(src: &str, entry: &str, s: &str) -> Result<i64> {
    s.trim().parse().map_err(|_| {
        error_at(src, s, format!("entry {entry:?}: degree {s:?} is not an integer"))
    })
}

impl Database {
    /// The database shipped with the crate.
    pub fn seed() -> Database {
        Database::parse(SEED).expect("seed database is valid")
    }

    pub fn parse(src: &str) -> Result<Database> {
        let raw: RawDb = serde_json::from_str(src).map_err(json_error)?;
        let mut entries = Vec::with_capacity(raw.entries.len());
        let mut seen: BTreeMap<String, usize> = BTreeMap::new();
        for e in raw.entries {
            let count = seen.entry(e.name.clone()).or_insert(0);
            *count += 1;
            if *count > 1 {
                let (line, column) = nth_name(src, &e.name, 1);
                return Err(Error::parse(line, column, format!("duplicate entry name {:?}", e.name)));
            }
            let mut groups = BTreeMap::new();
            for (d, g) in &e.groups {
                let value = g.parse::<DbValue>().map_err(|err| {
                    error_at(src, g, format!("entry {:?} degree {d}: {err}", e.name))
                })?;
                groups.insert(parse_degree(src, &e.name, d)?, value);
            }
            let mut provenance = BTreeMap::new();
            for (d, p) in &e.provenance {
                provenance.insert(parse_degree(src, &e.name, d)?, p.clone());
            }
            entries.push(DbEntry {
                name: e.name,
                groups,
                provenance,
            });
        }
        let db = Database {
            entries,
            recipes: raw.recipes,
        };
        db.validate()?;
        Ok(db)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Database> {
        let path = path.as_ref();
        let src = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Database::parse(&src)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.print()).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
    }

    /// Checks names, provenance coverage and recipe references.
    pub fn validate(&self) -> Result<()> {
        let mut names = BTreeSet::new();
        for e in &self.entries {
            if !names.insert(e.name.as_str()) {
                return Err(Error::Schema(format!("duplicate entry name {:?}", e.name)));
            }
            for d in e.groups.keys() {
                if !e.provenance.contains_key(d) {
                    return Err(Error::Schema(format!("entry {:?} degree {d} has no provenance", e.name)));
                }
            }
            for d in e.provenance.keys() {
                if !e.groups.contains_key(d) {
                    return Err(Error::Schema(format!(
                        "entry {:?} cites degree {d} but stores no group there",
                        e.name
                    )));
                }
            }
        }
        let mut recipes = BTreeSet::new();
        for r in &self.recipes {
            if !recipes.insert(r.name.as_str()) {
                return Err(Error::Schema(format!("duplicate recipe name {:?}", r.name)));
            }
            r.validate(&names)?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let entries = self
            .entries
            .iter()
            .map(|e| {
                let groups: Map<String, Value> = e
                    .groups
                    .iter()
                    .map(|(d, g)| (d.to_string(), Value::String(g.to_string())))
                    .collect();
                let provenance: Map<String, Value> = e
                    .provenance
                    .iter()
                    .map(|(d, p)| (d.to_string(), Value::String(p.clone())))
                    .collect();
                let mut m = Map::new();
                m.insert("name".into(), Value::String(e.name.clone()));
                m.insert("groups".into(), Value::Object(groups));
                m.insert("provenance".into(), Value::Object(provenance));
                Value::Object(m)
            })
            .collect();
        let recipes = serde_json::to_value(&self.recipes).expect("recipes serialize");
        let mut m = Map::new();
        m.insert("entries".into(), Value::Array(entries));
        m.insert("recipes".into(), recipes);
        Value::Object(m)
    }

    /// Pretty JSON with sorted keys and a trailing newline.
    pub fn print(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("json value");
        s.push('\n');
        s
    }

    pub fn entry(&self, name: &str) -> Option<&DbEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn recipe(&self, name: &str) -> Result<&Recipe> {
        self.recipes
            .iter()
            .find(|r| r.name == name)
            .ok_or_else(|| Error::Contract(format!("no recipe named {name:?}")))
    }

    /// Known groups of every entry as graded groups over their stored range.
    pub fn graded(&self) -> BTreeMap<String, GradedGroup> {
        self.entries
            .iter()
            .filter_map(|e| {
                let lo = *e.groups.keys().next()?;
                let hi = *e.groups.keys().next_back()?;
                let mut g = GradedGroup::new(e.name.clone(), lo, hi);
                for (d, v) in &e.groups {
                    g.set(*d, v.group().cloned()).expect("degree in range");
                }
                Some((e.name.clone(), g))
            })
            .collect()
    }
}

/// Assembles the window of `recipe` with its stated maps and constraints.
///
/// Every degree the window touches must be stored (possibly as `"?"`),
/// except in columns the recipe marks unknown; the error lists all gaps.
pub fn build_les(db: &Database, recipe: &Recipe) -> Result<SequenceFile> {
    let cells = recipe.cells();
    let mut gaps: BTreeMap<String, BTreeSet<i64>> = BTreeMap::new();
    let mut nodes = Vec::with_capacity(cells.len());
    for &(k, c) in &cells {
        let col = &recipe.columns[c];
        let entry = db
            .entry(&col.entry)
            .ok_or_else(|| Error::Contract(format!("no entry named {:?}", col.entry)))?;
        let degree = k + col.shift;
        let state = if col.unknown {
            NodeState::Unknown
        } else if let Some(v) = entry.get(degree) {
            v.node_state()
        } else {
            gaps.entry(col.entry.clone()).or_default().insert(degree);
            NodeState::Unknown
        };
        let mut node = Node::new(k, recipe.node_label(k, c), state);
        node.source = Some(NodeSource {
            entry: col.entry.clone(),
            degree,
        });
        nodes.push(node);
    }
    if !gaps.is_empty() {
        return Err(gap_error(recipe, &gaps));
    }

    let mut edges: Vec<Edge> = cells
        .iter()
        .take(cells.len().saturating_sub(1))
        .map(|&(k, c)| Edge::new(recipe.edge_name(k, c), EdgeState::Unknown))
        .collect();
    for stated in &recipe.maps {
        let mut hit = false;
        for (i, &(_, c)) in cells.iter().enumerate().take(edges.len()) {
            let name = &edges[i].name;
            let matches = match stated.scalar {
                Some(_) => recipe.edges[c] == stated.edge,
                None => *name == stated.edge,
            };
            if !matches {
                continue;
            }
            hit = true;
            let what = format!("recipe {:?} map {name}", recipe.name);
            let (Some(a), Some(b)) = (nodes[i].state.known(), nodes[i + 1].state.known()) else {
                return Err(Error::Contract(format!("{what}: endpoints are not known groups")));
            };
            let f = match (stated.scalar, &stated.matrix) {
                (Some(s), _) => {
                    if a != b {
                        return Err(Error::Contract(format!("{what}: scalar map between {a} and {b}")));
                    }
                    GroupHom::scalar(a, s)
                }
                (None, Some(rows)) => stated_matrix(a, b, rows, &what)?,
                (None, None) => unreachable!("validated"),
            };
            edges[i].state = EdgeState::KnownMap(f);
        }
        if !hit {
            return Err(Error::Contract(format!(
                "recipe {:?}: stated map {:?} matches no edge in rows {}..={}",
                recipe.name, stated.edge, recipe.bottom, recipe.top
            )));
        }
    }

    let mut seq = ExactSequence::new(nodes, edges)?;
    seq.columns = recipe.columns.iter().map(|c| c.label.clone()).collect();
    seq.first_column = recipe.first_column;
    seq.bounded_start = recipe.bounded_start;
    seq.bounded_end = recipe.bounded_end;
    let constraints = if recipe.constraints.is_empty() {
        Vec::new()
    } else {
        let src = serde_json::to_string(&recipe.constraints).expect("json value");
        parse_constraints(&src, &seq)?
    };
    Ok(SequenceFile {
        sequence: seq,
        constraints,
    })
}

fn gap_error(recipe: &Recipe, gaps: &BTreeMap<String, BTreeSet<i64>>) -> Error {
    let parts: Vec<String> = gaps
        .iter()
        .map(|(entry, ds)| {
            let ds: Vec<String> = ds.iter().map(i64::to_string).collect();
            format!("{entry} degrees {}", ds.join(", "))
        })
        .collect();
    Error::Contract(format!(
        "recipe {:?} needs missing database degrees: {}",
        recipe.name,
        parts.join("; ")
    ))
}

fn stated_matrix(a: &FgAbGroup, b: &FgAbGroup, rows: &[Vec<i64>], what: &str) -> Result<GroupHom> {
    let (r, c) = (b.num_generators(), a.num_generators());
    if rows.len() != r || rows.iter().any(|row| row.len() != c) {
        return Err(Error::Schema(format!("{what}: expected a {r}x{c} matrix for {a} -> {b}")));
    }
    let m = if r == 0 || c == 0 {
        IntMatrix::zeros(r, c)
    } else {
        IntMatrix::from_rows(rows)
    };
    GroupHom::new(a.clone(), b.clone(), m)
}

/// The Anderson-dual window of `recipe`; every node must be a known group.
pub fn build_dual_les(db: &Database, recipe: &Recipe, convention: Convention) -> Result<DualizedLes> {
    let file = build_les(db, recipe)?;
    let unknown: Vec<String> = file
        .sequence
        .nodes
        .iter()
        .filter(|n| !n.state.is_known())
        .map(|n| n.label.clone())
        .collect();
    if !unknown.is_empty() {
        return Err(Error::Contract(format!(
            "dualizing needs known groups; unknown: {}",
            unknown.join(", ")
        )));
    }
    // the dual also reads the degrees above the window
    let mut gaps: BTreeMap<String, BTreeSet<i64>> = BTreeMap::new();
    for node in &file.sequence.nodes {
        let src = node.source.as_ref().expect("recipe nodes carry sources");
        let (t, f) = convention.source_degrees(src.degree);
        let entry = db.entry(&src.entry).expect("built from this database");
        for d in [t, f] {
            if entry.get(d).and_then(DbValue::group).is_none() {
                gaps.entry(src.entry.clone()).or_default().insert(d);
            }
        }
    }
    if !gaps.is_empty() {
        return Err(gap_error(recipe, &gaps));
    }
    dualize_les(&file.sequence, &db.graded(), convention, &|name| recipe.dual_edge_name(name))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lescore::solve;

    fn g(s: &str) -> FgAbGroup {
        s.parse().unwrap()
    }

    #[test]
    fn seed_round_trip() {
        let db = Database::seed();
        assert_eq!(db.print(), SEED);
        assert_eq!(Database::parse(&db.print()).unwrap(), db);
    }

    #[test]
    fn seeded_values() {
        let db = Database::seed();
        let pm = db.entry("Pin-").unwrap();
        for (d, s) in [(0, "Z/2"), (1, "Z/2"), (2, "Z/8"), (3, "0"), (4, "0"), (5, "0"), (6, "Z/16")] {
            assert_eq!(pm.get(d), Some(&DbValue::Group(g(s))), "Pin- {d}");
        }
        let pp = db.entry("Pin+").unwrap();
        for (d, s) in [(0, "Z/2"), (1, "0"), (2, "Z/2"), (3, "Z/2"), (4, "Z/16")] {
            assert_eq!(pp.get(d), Some(&DbValue::Group(g(s))), "Pin+ {d}");
        }
    }

    #[test]
    fn peterson_splitting() {
        let db = Database::seed();
        let (spin, pinm, sz2) = (
            db.entry("Spin").unwrap(),
            db.entry("Pin-").unwrap(),
            db.entry("Spin x Z/2").unwrap(),
        );
        let mut checked = 0;
        for (&n, v) in &sz2.groups {
            let (Some(a), Some(b)) = (spin.get(n), pinm.get(n - 1)) else {
                continue;
            };
            let (a, b, v) = (a.group().unwrap(), b.group().unwrap(), v.group().unwrap());
            assert_eq!(*v, a.direct_sum(b), "degree {n}");
            checked += 1;
        }
        assert!(checked >= 8);
    }

    #[test]
    fn recipes_are_contradiction_free() {
        let db = Database::seed();
        for r in &db.recipes {
            let file = build_les(&db, r).unwrap();
            solve(&file.sequence, &file.constraints).unwrap_or_else(|e| panic!("{}: {e}", r.name));
        }
    }

    #[test]
    fn missing_degree_lists_gaps() {
        let db = Database::seed();
        let r = db.recipe("pinm-to-pinp").unwrap().with_range(9, 0);
        let err = build_les(&db, &r).unwrap_err().to_string();
        assert!(err.contains("Pin- degrees 7, 8, 9"), "{err}");
        assert!(err.contains("Pin+ degrees 6, 7"), "{err}");
        let r = db.recipe("pinp-spin-z2").unwrap().with_range(5, -1);
        let err = build_dual_les(&db, &r, Convention::FieldTheory).unwrap_err().to_string();
        assert!(err.contains("Pin+ degrees 6"), "{err}");
    }

    #[test]
    fn unknown_value_is_allowed() {
        let mut db = Database::seed();
        let e = db.entries.iter_mut().find(|e| e.name == "Pin+").unwrap();
        e.groups.insert(3, DbValue::Unknown);
        let r = db.recipe("pinm-to-pinp").unwrap().clone();
        let file = build_les(&db, &r).unwrap();
        let i = file.sequence.node_index("Pin+_3").unwrap();
        assert_eq!(file.sequence.nodes[i].state, NodeState::Unknown);
    }

    #[test]
    fn parse_errors() {
        let dup = r#"{"entries": [
  {"name": "A", "groups": {"0": "Z"}, "provenance": {"0": "x"}},
  {"name": "A", "groups": {"0": "Z"}, "provenance": {"0": "x"}}
]}"#;
        assert!(matches!(Database::parse(dup), Err(Error::Parse { line: 3, .. })));
        let bad = "{\"entries\": [\n  {\"name\": \"A\", \"groups\": {\"0\": \"Z/0\"}, \"provenance\": {\"0\": \"x\"}}\n]}";
        match Database::parse(bad) {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (2, 33)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(Database::parse("{\"entries\": 3}"), Err(Error::Parse { .. })));
        let noprov = r#"{"entries": [{"name": "A", "groups": {"0": "Z"}}]}"#;
        assert!(matches!(Database::parse(noprov), Err(Error::Schema(_))));
    }

    #[test]
    fn save_and_load() {
        let dir = std::env::temp_dir().join(format!("smithles-db-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("db.json");
        let db = Database::seed();
        db.save(&path).unwrap();
        assert_eq!(Database::load(&path).unwrap(), db);
        std::fs::remove_dir_all(&dir).unwrap();
        assert!(matches!(Database::load(dir.join("missing.json")), Err(Error::Io(_))));
    }

    #[test]
    fn spinh_window_shape() {
        let db = Database::seed();
        let file = build_les(&db, db.recipe("spinh").unwrap()).unwrap();
        let labels: Vec<&str> = file.sequence.nodes.iter().map(|n| n.label.as_str()).collect();
        assert_eq!(labels, ["Spin(BSO3)_2", "Spin-c_4", "Spin-h_4", "Spin(BSO3)_1", "Spin-c_3"]);
        assert_eq!(file.sequence.edges[2].name, "sm_V_4");
    }
}
