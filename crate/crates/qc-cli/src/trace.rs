//! JSON-lines trace records for `run` and `simulate`, and the graph format
//! written by `explore`.

use std::io::{self, Write};

use serde::Serialize;

use qc_core::net::{Graph, NodeKind, SysLabel, System};
use qc_core::sem::{Msg, Redex};
use qc_core::chor::Chor;

#[derive(Serialize)]
pub struct ChorStep {
    pub step_index: usize,
    pub redex: String,
    pub chor: String,
}

#[derive(Serialize)]
pub struct LabelRecord {
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub location: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sender: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub recipients: Option<Vec<String>>,
}

impl LabelRecord {
    pub fn of(l: &SysLabel) -> Self {
        let mut r = LabelRecord { kind: l.kind(), location: None, sender: None, message: None, recipients: None };
        match l {
            SysLabel::Iota(loc) => r.location = Some(loc.clone()),
            SysLabel::IotaSync => {}
            SysLabel::Comm { from, msg, to } => {
                r.sender = Some(from.clone());
                r.message = Some(match msg {
                    Msg::Val(v) => v.to_string(),
                    Msg::Sel(d) => d.to_string(),
                });
                r.recipients = Some(to.iter().cloned().collect());
            }
        }
        r
    }
}

#[derive(Serialize)]
pub struct SysStep {
    pub step_index: usize,
    pub label: LabelRecord,
    pub changed_locations: Vec<String>,
}

pub fn changed(before: &System, after: &System) -> Vec<String> {
    after.procs.iter().filter(|(l, e)| before.get(l) != Some(*e)).map(|(l, _)| l.clone()).collect()
}

pub fn write_chor_trace(out: &mut dyn Write, trace: &[(Redex, Chor)]) -> io::Result<()> {
    for (i, (r, c)) in trace.iter().enumerate() {
        let rec = ChorStep { step_index: i, redex: r.to_string(), chor: c.to_string() };
        writeln!(out, "{}", serde_json::to_string(&rec).expect("serializable"))?;
    }
    Ok(())
}

pub fn write_sys_trace(out: &mut dyn Write, start: &System, trace: &[(SysLabel, System)]) -> io::Result<()> {
    let mut prev = start;
    for (i, (l, s)) in trace.iter().enumerate() {
        let rec = SysStep { step_index: i, label: LabelRecord::of(l), changed_locations: changed(prev, s) };
        writeln!(out, "{}", serde_json::to_string(&rec).expect("serializable"))?;
        prev = s;
    }
    Ok(())
}

pub fn kind_name(k: NodeKind) -> &'static str {
    match k {
        NodeKind::AllValues => "all-values",
        NodeKind::Deadlocked => "deadlocked",
        NodeKind::Frontier => "frontier",
        NodeKind::Inner => "inner",
    }
}

#[derive(Serialize)]
pub struct GraphNode {
    pub id: usize,
    pub depth: usize,
    pub kind: &'static str,
    pub state: String,
    pub successors: Vec<GraphEdge>,
}

#[derive(Serialize)]
pub struct GraphEdge {
    pub target: usize,
    pub label: LabelRecord,
}

#[derive(Serialize)]
pub struct GraphFile {
    pub root: usize,
    pub nodes: Vec<GraphNode>,
}

impl GraphFile {
    pub fn of(g: &Graph) -> Self {
        let mut nodes: Vec<GraphNode> = g
            .nodes
            .iter()
            .enumerate()
            .map(|(i, s)| GraphNode {
                id: i,
                depth: g.depth[i],
                kind: kind_name(g.kinds[i]),
                state: s.to_string(),
                successors: Vec::new(),
            })
            .collect();
        for (a, l, b) in &g.edges {
            nodes[*a].successors.push(GraphEdge { target: *b, label: LabelRecord::of(l) });
        }
        GraphFile { root: 0, nodes }
    }
}
