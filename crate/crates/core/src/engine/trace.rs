use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::grid::{GridKind, Node};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TraceMove {
    pub packet: usize,
    pub from: Node,
    pub to: Node,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StepRecord {
    pub step: u64,
    /// Sorted by packet id.
    pub moves: Vec<TraceMove>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Trace {
    pub steps: Vec<StepRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SimResult {
    pub completion_time: u64,
    #[serde(skip)]
    pub arc_usage: BTreeMap<(Node, Node), u64>,
    pub max_queue: usize,
    pub delivered: bool,
}

impl SimResult {
    /// The `n` busiest arcs, ties broken by arc order.
    pub fn top_arcs(&self, n: usize) -> Vec<((Node, Node), u64)> {
        let mut v: Vec<_> = self.arc_usage.iter().map(|(a, c)| (*a, *c)).collect();
        v.sort_by(|x, y| y.1.cmp(&x.1).then(x.0.cmp(&y.0)));
        v.truncate(n);
        v
    }

    pub fn total_hops(&self) -> u64 {
        self.arc_usage.values().sum()
    }
}

impl Trace {
    pub fn len(&self) -> u64 {
        self.steps.last().map(|s| s.step).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// `step <t>: <id> <from> -> <to>; ...` per line, then a `#` summary footer.
    pub fn to_text(&self, kind: GridKind, result: Option<&SimResult>) -> String {
        let mut out = String::new();
        for rec in &self.steps {
            let moves: Vec<String> = rec
                .moves
                .iter()
                .map(|m| format!("{} {} -> {}", m.packet, m.from.format(kind), m.to.format(kind)))
                .collect();
            writeln!(out, "step {}: {}", rec.step, moves.join("; ")).unwrap();
        }
        if let Some(r) = result {
            writeln!(out, "# completion_time {}", r.completion_time).unwrap();
            writeln!(out, "# delivered {}", r.delivered).unwrap();
            writeln!(out, "# max_queue {}", r.max_queue).unwrap();
            for ((a, b), c) in r.top_arcs(10) {
                writeln!(out, "# arc {} -> {} {}", a.format(kind), b.format(kind), c).unwrap();
            }
        }
        out
    }

    /// One JSON object per step, then a summary object.
    pub fn to_json_lines(&self, kind: GridKind, result: Option<&SimResult>) -> String {
        let mut out = String::new();
        for rec in &self.steps {
            let moves: Vec<_> = rec
                .moves
                .iter()
                .map(|m| json!({"packet": m.packet, "from": m.from.format(kind), "to": m.to.format(kind)}))
                .collect();
            writeln!(out, "{}", json!({"step": rec.step, "moves": moves})).unwrap();
        }
        if let Some(r) = result {
            let top: Vec<_> = r
                .top_arcs(10)
                .into_iter()
                .map(|((a, b), c)| json!({"from": a.format(kind), "to": b.format(kind), "count": c}))
                .collect();
            let summary = json!({"summary": {
                "completion_time": r.completion_time,
                "delivered": r.delivered,
                "max_queue": r.max_queue,
                "top_arcs": top,
            }});
            writeln!(out, "{summary}").unwrap();
        }
        out
    }

    /// Reads either format; summary lines are ignored.
    pub fn parse(text: &str) -> Result<(Option<GridKind>, Trace)> {
        let mut kind = None;
        let mut steps = Vec::new();
        let mut note = |k: GridKind, line: usize| -> Result<()> {
            match kind {
                Some(prev) if prev != k => Err(Error::Parse { line, msg: "mixed grid kinds".into() }),
                _ => {
                    kind = Some(k);
                    Ok(())
                }
            }
        };
        for (i, raw) in text.lines().enumerate() {
            let no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: String| Error::Parse { line: no, msg };
            if line.starts_with('{') {
                let rec: JsonStep = match serde_json::from_str(line) {
                    Ok(r) => r,
                    Err(_) if line.contains("\"summary\"") => continue,
                    Err(e) => return Err(err(e.to_string())),
                };
                let mut moves = Vec::new();
                for m in rec.moves {
                    let (k1, from) = Node::parse(&m.from).map_err(|e| err(e.to_string()))?;
                    let (k2, to) = Node::parse(&m.to).map_err(|e| err(e.to_string()))?;
                    note(k1, no)?;
                    note(k2, no)?;
                    moves.push(TraceMove { packet: m.packet, from, to });
                }
                steps.push(StepRecord { step: rec.step, moves });
                continue;
            }
            let rest = line.strip_prefix("step").ok_or_else(|| err(format!("unexpected line `{line}`")))?;
            let (num, body) = rest.split_once(':').ok_or_else(|| err("missing `:` after step".into()))?;
            let step: u64 = num.trim().parse().map_err(|_| err(format!("bad step number `{}`", num.trim())))?;
            let mut moves = Vec::new();
            for part in body.split(';').map(str::trim).filter(|p| !p.is_empty()) {
                let (id, arc) = part.split_once(' ').ok_or_else(|| err(format!("bad move `{part}`")))?;
                let packet: usize = id.parse().map_err(|_| err(format!("bad packet id `{id}`")))?;
                let (a, b) = arc.split_once("->").ok_or_else(|| err(format!("bad move `{part}`")))?;
                let (k1, from) = Node::parse(a).map_err(|e| err(e.to_string()))?;
                let (k2, to) = Node::parse(b).map_err(|e| err(e.to_string()))?;
                note(k1, no)?;
                note(k2, no)?;
                moves.push(TraceMove { packet, from, to });
            }
            steps.push(StepRecord { step, moves });
        }
        Ok((kind, Trace { steps }))
    }
}

#[derive(Deserialize)]
struct JsonStep {
    step: u64,
    moves: Vec<JsonMove>,
}

#[derive(Deserialize)]
struct JsonMove {
    packet: usize,
    from: String,
    to: String,
}
