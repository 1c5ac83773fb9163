//! JSON form of sequence windows and side constraints.
//!
//! ```json
//! {
//!   "nodes": [{"degree": 2, "label": "A", "group": "?"}, ...],
//!   "edges": [{"name": "f", "map": "zero"}, ...],
//!   "constraints": [{"embeds_into": {"node": "A", "group": "Z/8"}}]
//! }
//! ```
//!
//! A node group is a group string, `"?"`, `{"candidates": [..]}` or
//! `{"order": [..] | "finite"}`. An edge map is `"?"`, `"zero"`,
//! `{"matrix": [[..]]}` (row-major, codomain generators by domain
//! generators) or `{"flags": {..}}`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};

use super::sequence::{Edge, EdgeFlags, EdgeState, ExactSequence, Node, NodeSource, NodeState, OrderSet, SideConstraint};
use crate::error::{Error, Result};
use crate::fgab::{FgAbGroup, GroupHom, IntMatrix};

/// A sequence window together with the constraints stored alongside it.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct SequenceFile {
    pub sequence: ExactSequence,
    pub constraints: Vec<SideConstraint>,
}

/// 1-based line and column of byte offset `at`.
pub(crate) fn line_col(src: &str, at: usize) -> (usize, usize) {
    let before = &src[..at.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rfind('\n').map_or(before.len(), |p| before.len() - p - 1) + 1;
    (line, col)
}

/// Parse error pointing at the first occurrence of the JSON string `s`.
pub(crate) fn error_at(src: &str, s: &str, message: String) -> Error {
    let quoted = serde_json::to_string(s).unwrap_or_else(|_| format!("\"{s}\""));
    let (line, column) = src.find(&quoted).map_or((0, 0), |at| line_col(src, at));
    Error::parse(line, column, message)
}

pub(crate) fn json_error(e: serde_json::Error) -> Error {
    Error::parse(e.line(), e.column(), e.to_string())
}

struct Ctx<'a> {
    src: &'a str,
}

impl Ctx<'_> {
    fn group(&self, v: &Value, what: &str) -> Result<FgAbGroup> {
        let s = v
            .as_str()
            .ok_or_else(|| Error::Schema(format!("{what}: expected a group string, found {v}")))?;
        s.parse::<FgAbGroup>()
            .map_err(|e| error_at(self.src, s, format!("{what}: bad group {s:?}: {e}")))
    }

    fn node_state(&self, v: &Value, what: &str) -> Result<NodeState> {
        match v {
            Value::String(s) if s == "?" => Ok(NodeState::Unknown),
            Value::String(_) => Ok(NodeState::Known(self.group(v, what)?)),
            Value::Object(m) if m.len() == 1 && m.contains_key("candidates") => {
                let list = m["candidates"]
                    .as_array()
                    .ok_or_else(|| Error::Schema(format!("{what}: candidates must be a list")))?;
                let set = list
                    .iter()
                    .map(|g| self.group(g, what))
                    .collect::<Result<BTreeSet<_>>>()?;
                if set.is_empty() {
                    return Err(Error::Schema(format!("{what}: empty candidate list")));
                }
                NodeState::candidates(set)
            }
            Value::Object(m) if m.len() == 1 && m.contains_key("order") => match &m["order"] {
                Value::String(s) if s == "finite" => Ok(NodeState::OrderConstrained(OrderSet::Finite)),
                Value::Array(list) => {
                    let set = list
                        .iter()
                        .map(|n| {
                            let n = integer(n, what)?;
                            if n < BigInt::from(1) {
                                return Err(Error::Schema(format!("{what}: orders must be positive")));
                            }
                            Ok(n)
                        })
                        .collect::<Result<BTreeSet<_>>>()?;
                    if set.is_empty() {
                        return Err(Error::Schema(format!("{what}: empty order list")));
                    }
                    Ok(NodeState::OrderConstrained(OrderSet::Orders(set)))
                }
                other => Err(Error::Schema(format!("{what}: bad order {other}"))),
            },
            other => Err(Error::Schema(format!("{what}: bad group state {other}"))),
        }
    }

    fn flags(&self, v: &Value, what: &str) -> Result<EdgeFlags> {
        let m = v
            .as_object()
            .ok_or_else(|| Error::Schema(format!("{what}: flags must be an object")))?;
        let mut fl = EdgeFlags::default();
        for (k, val) in m {
            let b = || {
                val.as_bool()
                    .ok_or_else(|| Error::Schema(format!("{what}: flag {k} must be a boolean")))
            };
            match k.as_str() {
                "injective" => fl.injective = Some(b()?),
                "surjective" => fl.surjective = Some(b()?),
                "zero" => fl.zero = Some(b()?),
                "kernel" => fl.kernel = Some(self.group(val, what)?),
                "image" => fl.image = Some(self.group(val, what)?),
                other => return Err(Error::Schema(format!("{what}: unknown flag {other:?}"))),
            }
        }
        Ok(fl)
    }
}

fn integer(v: &Value, what: &str) -> Result<BigInt> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .ok_or_else(|| Error::Schema(format!("{what}: {n} is not an integer"))),
        Value::String(s) => s
            .parse()
            .map_err(|_| Error::Schema(format!("{what}: {s:?} is not an integer"))),
        other => Err(Error::Schema(format!("{what}: expected an integer, found {other}"))),
    }
}

fn int_json(n: &BigInt) -> Value {
    n.to_i64().map_or_else(|| Value::String(n.to_string()), Value::from)
}

fn matrix_rows(v: &Value, what: &str) -> Result<Vec<Vec<BigInt>>> {
    let rows = v
        .as_array()
        .ok_or_else(|| Error::Schema(format!("{what}: matrix must be a list of rows")))?;
    rows.iter()
        .map(|r| {
            r.as_array()
                .ok_or_else(|| Error::Schema(format!("{what}: matrix rows must be lists")))?
                .iter()
                .map(|x| integer(x, what))
                .collect()
        })
        .collect()
}

fn matrix_from_rows(rows: &[Vec<BigInt>], shape: Option<(usize, usize)>, what: &str) -> Result<IntMatrix> {
    let (r, c) = shape.unwrap_or((rows.len(), rows.first().map_or(0, Vec::len)));
    if rows.len() != r || rows.iter().any(|row| row.len() != c) {
        return Err(Error::Schema(format!(
            "{what}: expected a {r}x{c} matrix, found {} rows",
            rows.len()
        )));
    }
    let cols: Vec<Vec<BigInt>> = (0..c).map(|j| rows.iter().map(|row| row[j].clone()).collect()).collect();
    let mut m = IntMatrix::from_columns(r, &cols);
    if c == 0 {
        m = IntMatrix::zeros(r, 0);
    }
    Ok(m)
}

fn matrix_json(m: &IntMatrix) -> Value {
    Value::Array(
        m.to_rows()
            .iter()
            .map(|row| Value::Array(row.iter().map(int_json).collect()))
            .collect(),
    )
}

fn field<'v>(m: &'v Map<String, Value>, k: &str, what: &str) -> Result<&'v Value> {
    m.get(k).ok_or_else(|| Error::Schema(format!("{what}: missing field {k:?}")))
}

fn node_ref(v: &Value, seq: &ExactSequence, what: &str) -> Result<usize> {
    match v {
        Value::String(s) => seq
            .node_index(s)
            .ok_or_else(|| Error::Schema(format!("{what}: no node labelled {s:?}"))),
        other => index(other, seq.nodes.len(), what),
    }
}

fn edge_ref(v: &Value, seq: &ExactSequence, what: &str) -> Result<usize> {
    match v {
        Value::String(s) => seq
            .edge_index(s)
            .ok_or_else(|| Error::Schema(format!("{what}: no edge named {s:?}"))),
        other => index(other, seq.edges.len(), what),
    }
}

fn index(v: &Value, len: usize, what: &str) -> Result<usize> {
    let i = v
        .as_u64()
        .ok_or_else(|| Error::Schema(format!("{what}: expected an index or a name, found {v}")))? as usize;
    if i >= len {
        return Err(Error::Schema(format!("{what}: index {i} out of range")));
    }
    Ok(i)
}

fn parse_constraint_list(ctx: &Ctx<'_>, v: &Value, seq: &ExactSequence) -> Result<Vec<SideConstraint>> {
    let list = v
        .as_array()
        .ok_or_else(|| Error::Schema("constraints must be a list".into()))?;
    let mut out = Vec::new();
    for (n, c) in list.iter().enumerate() {
        let what = format!("constraint {n}");
        let m = c
            .as_object()
            .filter(|m| m.len() == 1)
            .ok_or_else(|| Error::Schema(format!("{what}: expected an object with one key")))?;
        let (kind, body) = m.iter().next().expect("one key");
        let body = body
            .as_object()
            .ok_or_else(|| Error::Schema(format!("{what}: body must be an object")))?;
        let c = match kind.as_str() {
            "embeds_into" => SideConstraint::EmbedsInto(
                node_ref(field(body, "node", &what)?, seq, &what)?,
                ctx.group(field(body, "group", &what)?, &what)?,
            ),
            "is_quotient_of" => SideConstraint::IsQuotientOf(
                node_ref(field(body, "node", &what)?, seq, &what)?,
                ctx.group(field(body, "group", &what)?, &what)?,
            ),
            "map_equals" => {
                let e = edge_ref(field(body, "edge", &what)?, seq, &what)?;
                let rows = matrix_rows(field(body, "matrix", &what)?, &what)?;
                SideConstraint::MapEquals(e, matrix_from_rows(&rows, None, &what)?)
            }
            other => return Err(Error::Schema(format!("{what}: unknown constraint {other:?}"))),
        };
        out.push(c);
    }
    Ok(out)
}

/// Parses a sequence file. An empty node list is a schema error.
pub fn parse_sequence(src: &str) -> Result<SequenceFile> {
    let v: Value = serde_json::from_str(src).map_err(json_error)?;
    let ctx = Ctx { src };
    let top = v
        .as_object()
        .ok_or_else(|| Error::Schema("sequence file must be a JSON object".into()))?;
    for k in top.keys() {
        if !matches!(
            k.as_str(),
            "nodes" | "edges" | "constraints" | "columns" | "first_column" | "bounded_start" | "bounded_end"
        ) {
            return Err(error_at(src, k, format!("unknown field {k:?}")));
        }
    }
    let nodes_v = field(top, "nodes", "sequence")?
        .as_array()
        .ok_or_else(|| Error::Schema("nodes must be a list".into()))?;
    if nodes_v.is_empty() {
        return Err(Error::Schema("sequence has no nodes".into()));
    }
    let mut nodes = Vec::new();
    for (i, n) in nodes_v.iter().enumerate() {
        let what = format!("node {i}");
        let m = n
            .as_object()
            .ok_or_else(|| Error::Schema(format!("{what}: expected an object")))?;
        let degree = integer(field(m, "degree", &what)?, &what)?
            .to_i64()
            .ok_or_else(|| Error::Schema(format!("{what}: degree out of range")))?;
        let label = field(m, "label", &what)?
            .as_str()
            .ok_or_else(|| Error::Schema(format!("{what}: label must be a string")))?;
        let state = ctx.node_state(field(m, "group", &what)?, &what)?;
        let mut node = Node::new(degree, label, state);
        if let Some(s) = m.get("source") {
            let sm = s
                .as_object()
                .ok_or_else(|| Error::Schema(format!("{what}: source must be an object")))?;
            node.source = Some(NodeSource {
                entry: field(sm, "entry", &what)?
                    .as_str()
                    .ok_or_else(|| Error::Schema(format!("{what}: source entry must be a string")))?
                    .to_string(),
                degree: integer(field(sm, "degree", &what)?, &what)?
                    .to_i64()
                    .ok_or_else(|| Error::Schema(format!("{what}: degree out of range")))?,
            });
        }
        nodes.push(node);
    }

    let edges_v = match top.get("edges") {
        Some(e) => e
            .as_array()
            .ok_or_else(|| Error::Schema("edges must be a list".into()))?
            .clone(),
        None => Vec::new(),
    };
    if edges_v.len() + 1 != nodes.len() {
        return Err(Error::Schema(format!(
            "{} nodes need {} edges, found {}",
            nodes.len(),
            nodes.len() - 1,
            edges_v.len()
        )));
    }
    let mut edges = Vec::new();
    for (i, e) in edges_v.iter().enumerate() {
        let what = format!("edge {i}");
        let m = e
            .as_object()
            .ok_or_else(|| Error::Schema(format!("{what}: expected an object")))?;
        let name = field(m, "name", &what)?
            .as_str()
            .ok_or_else(|| Error::Schema(format!("{what}: name must be a string")))?;
        let state = match field(m, "map", &what)? {
            Value::String(s) if s == "?" => EdgeState::Unknown,
            Value::String(s) if s == "zero" => EdgeState::PropertyConstrained(EdgeFlags {
                zero: Some(true),
                ..Default::default()
            }),
            Value::Object(mm) if mm.len() == 1 && mm.contains_key("matrix") => {
                let (Some(a), Some(b)) = (nodes[i].state.known(), nodes[i + 1].state.known()) else {
                    return Err(Error::Schema(format!("{what}: a matrix needs both endpoint groups known")));
                };
                let rows = matrix_rows(&mm["matrix"], &what)?;
                let m = matrix_from_rows(&rows, Some((b.num_generators(), a.num_generators())), &what)?;
                let f = GroupHom::new(a.clone(), b.clone(), m)
                    .map_err(|e| error_at(src, name, format!("{what}: {e}")))?;
                EdgeState::KnownMap(f)
            }
            Value::Object(mm) if mm.len() == 1 && mm.contains_key("flags") => {
                EdgeState::PropertyConstrained(ctx.flags(&mm["flags"], &what)?)
            }
            other => return Err(Error::Schema(format!("{what}: bad map {other}"))),
        };
        edges.push(Edge::new(name, state));
    }

    let mut seq = ExactSequence::new(nodes, edges)?;
    if let Some(c) = top.get("columns") {
        seq.columns = c
            .as_array()
            .ok_or_else(|| Error::Schema("columns must be a list".into()))?
            .iter()
            .map(|s| {
                s.as_str()
                    .map(str::to_string)
                    .ok_or_else(|| Error::Schema("column labels must be strings".into()))
            })
            .collect::<Result<_>>()?;
    }
    if let Some(f) = top.get("first_column") {
        seq.first_column = index(f, usize::MAX, "first_column")?;
    }
    for (k, slot) in [("bounded_start", &mut seq.bounded_start), ("bounded_end", &mut seq.bounded_end)] {
        if let Some(b) = top.get(k) {
            *slot = b
                .as_bool()
                .ok_or_else(|| Error::Schema(format!("{k} must be a boolean")))?;
        }
    }
    seq.validate()?;
    let constraints = match top.get("constraints") {
        Some(c) => parse_constraint_list(&ctx, c, &seq)?,
        None => Vec::new(),
    };
    Ok(SequenceFile { sequence: seq, constraints })
}

/// Parses a standalone constraints document, either a list or an object with
/// a `constraints` list, resolved against `seq`.
pub fn parse_constraints(src: &str, seq: &ExactSequence) -> Result<Vec<SideConstraint>> {
    let v: Value = serde_json::from_str(src).map_err(json_error)?;
    let ctx = Ctx { src };
    match &v {
        Value::Object(m) => parse_constraint_list(&ctx, field(m, "constraints", "constraints file")?, seq),
        other => parse_constraint_list(&ctx, other, seq),
    }
}

fn node_state_json(s: &NodeState) -> Value {
    match s {
        NodeState::Known(g) => Value::String(g.to_string()),
        NodeState::Unknown => Value::String("?".into()),
        NodeState::Candidates(set) => json!({"candidates": set.iter().map(|g| g.to_string()).collect::<Vec<_>>()}),
        NodeState::OrderConstrained(OrderSet::Finite) => json!({"order": "finite"}),
        NodeState::OrderConstrained(OrderSet::Orders(o)) => {
            json!({"order": o.iter().map(int_json).collect::<Vec<_>>()})
        }
    }
}

fn flags_json(fl: &EdgeFlags) -> Value {
    let mut m = Map::new();
    for (k, v) in [("injective", fl.injective), ("surjective", fl.surjective), ("zero", fl.zero)] {
        if let Some(b) = v {
            m.insert(k.into(), Value::Bool(b));
        }
    }
    if let Some(k) = &fl.kernel {
        m.insert("kernel".into(), Value::String(k.to_string()));
    }
    if let Some(i) = &fl.image {
        m.insert("image".into(), Value::String(i.to_string()));
    }
    Value::Object(m)
}

fn edge_state_json(s: &EdgeState) -> Value {
    match s {
        EdgeState::Unknown => Value::String("?".into()),
        EdgeState::KnownMap(f) => json!({"matrix": matrix_json(f.matrix())}),
        EdgeState::PropertyConstrained(fl) => {
            let zero_only = EdgeFlags {
                zero: Some(true),
                ..Default::default()
            };
            if *fl == zero_only {
                Value::String("zero".into())
            } else {
                json!({"flags": flags_json(fl)})
            }
        }
    }
}

fn constraint_json(c: &SideConstraint) -> Value {
    match c {
        SideConstraint::EmbedsInto(i, g) => json!({"embeds_into": {"node": i, "group": g.to_string()}}),
        SideConstraint::IsQuotientOf(i, g) => json!({"is_quotient_of": {"node": i, "group": g.to_string()}}),
        SideConstraint::MapEquals(e, m) => json!({"map_equals": {"edge": e, "matrix": matrix_json(m)}}),
    }
}

pub fn sequence_json(file: &SequenceFile) -> Value {
    let seq = &file.sequence;
    let mut top = Map::new();
    let nodes: Vec<Value> = seq
        .nodes
        .iter()
        .map(|n| {
            let mut m = Map::new();
            m.insert("degree".into(), Value::from(n.degree));
            m.insert("label".into(), Value::String(n.label.clone()));
            m.insert("group".into(), node_state_json(&n.state));
            if let Some(s) = &n.source {
                m.insert("source".into(), json!({"entry": s.entry, "degree": s.degree}));
            }
            Value::Object(m)
        })
        .collect();
    top.insert("nodes".into(), Value::Array(nodes));
    let edges: Vec<Value> = seq
        .edges
        .iter()
        .map(|e| json!({"name": e.name, "map": edge_state_json(&e.state)}))
        .collect();
    top.insert("edges".into(), Value::Array(edges));
    if !file.constraints.is_empty() {
        top.insert(
            "constraints".into(),
            Value::Array(file.constraints.iter().map(constraint_json).collect()),
        );
    }
    if !seq.columns.is_empty() {
        top.insert("columns".into(), json!(seq.columns));
    }
    if seq.first_column != 0 {
        top.insert("first_column".into(), Value::from(seq.first_column));
    }
    if seq.bounded_start {
        top.insert("bounded_start".into(), Value::Bool(true));
    }
    if seq.bounded_end {
        top.insert("bounded_end".into(), Value::Bool(true));
    }
    Value::Object(top)
}

/// Pretty-printed JSON; keys are sorted, so output is deterministic.
pub fn print_sequence(file: &SequenceFile) -> String {
    let mut s = serde_json::to_string_pretty(&sequence_json(file)).expect("serializable");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"{
      "columns": ["S", "S", "X"],
      "bounded_end": true,
      "nodes": [
        {"degree": 2, "label": "S2", "group": "Z/2"},
        {"degree": 2, "label": "A", "group": {"candidates": ["Z/4", "Z/2+Z/2"]}},
        {"degree": 1, "label": "B", "group": {"order": [2]}},
        {"degree": 1, "label": "C", "group": "?", "source": {"entry": "Spin", "degree": 1}}
      ],
      "edges": [
        {"name": "f", "map": "?"},
        {"name": "g", "map": "zero"},
        {"name": "h", "map": {"flags": {"injective": true, "kernel": "0"}}}
      ],
      "constraints": [{"embeds_into": {"node": "A", "group": "Z/8"}}]
    }"#;

    #[test]
    fn parse_and_round_trip() {
        let f = parse_sequence(SAMPLE).unwrap();
        assert_eq!(f.sequence.nodes.len(), 4);
        assert_eq!(f.constraints, vec![SideConstraint::EmbedsInto(1, "Z/8".parse().unwrap())]);
        let printed = print_sequence(&f);
        let back = parse_sequence(&printed).unwrap();
        assert_eq!(back, f);
        assert_eq!(print_sequence(&back), printed);
    }

    #[test]
    fn matrices() {
        let src = r#"{"nodes": [{"degree": 0, "label": "a", "group": "Z+Z/8"},
                                {"degree": 0, "label": "b", "group": "Z/16"},
                                {"degree": 0, "label": "c", "group": "0"}],
                      "edges": [{"name": "d", "map": {"matrix": [[-1, 2]]}},
                                {"name": "e", "map": {"matrix": []}}]}"#;
        let f = parse_sequence(src).unwrap();
        let m = f.sequence.edges[0].state.map().unwrap();
        assert_eq!(m.matrix()[(0, 0)], BigInt::from(15));
        let back = parse_sequence(&print_sequence(&f)).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn errors() {
        assert!(matches!(parse_sequence(r#"{"nodes": []}"#), Err(Error::Schema(_))));
        match parse_sequence("{\"nodes\": [\n {\"degree\": 0, \"label\": \"a\", \"group\": \"Z/1\"}]}") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (2, 39)),
            other => panic!("unexpected {other:?}"),
        }
        match parse_sequence("{\"nodes\": [\n  ]") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        let bad_matrix = r#"{"nodes": [{"degree": 0, "label": "a", "group": "Z/2"},
                                       {"degree": 0, "label": "b", "group": "Z"}],
                             "edges": [{"name": "f", "map": {"matrix": [[1]]}}]}"#;
        assert!(matches!(parse_sequence(bad_matrix), Err(Error::Parse { .. })));
        let bad_ref = r#"{"nodes": [{"degree": 0, "label": "a", "group": "Z/2"}],
                          "constraints": [{"embeds_into": {"node": "zz", "group": "Z"}}]}"#;
        assert!(matches!(parse_sequence(bad_ref), Err(Error::Schema(_))));
    }
}
