//! Graphviz export. Variables are ellipses, operations boxes, and expansion
//! operations double boxes.

use std::fmt::Write as _;

use super::{Graph, OpId, VarId, VarKind};

/// A labelled group of operations drawn as one `subgraph cluster_*`.
#[derive(Clone, Debug)]
pub struct Cluster {
    pub label: String,
    pub ops: Vec<OpId>,
}

#[derive(Clone, Debug, Default)]
pub struct DotOptions {
    pub title: Option<String>,
    /// Per-variable label placed on every edge leaving that variable.
    pub edge_labels: Option<Vec<String>>,
    pub clusters: Vec<Cluster>,
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn var_node(id: VarId) -> String {
    format!("v{}", id.0)
}

fn op_node(id: OpId) -> String {
    format!("op{}", id.0)
}

pub fn render(graph: &Graph, opts: &DotOptions) -> String {
    let mut s = String::new();
    s.push_str("digraph model {\n");
    s.push_str("  rankdir=TB;\n");
    if let Some(title) = &opts.title {
        let _ = writeln!(s, "  label=\"{}\";\n  labelloc=t;", escape(title));
    }

    for v in graph.variables() {
        let label = match v.kind {
            VarKind::Constant(c) => format!("{} = {c:?}", v.name),
            _ => v.name.clone(),
        };
        let style = match v.kind {
            VarKind::UncertainInput => ", style=filled, fillcolor=lightblue",
            VarKind::Output => ", style=bold",
            _ => "",
        };
        let _ = writeln!(
            s,
            "  {} [shape=ellipse, label=\"{}\"{style}];",
            var_node(v.id),
            escape(&label)
        );
    }

    let mut clustered = vec![false; graph.operations().len()];
    for (i, c) in opts.clusters.iter().enumerate() {
        let _ = writeln!(s, "  subgraph cluster_{i} {{");
        let _ = writeln!(s, "    label=\"{}\";", escape(&c.label));
        for &op in &c.ops {
            clustered[op.0] = true;
            let _ = writeln!(s, "    {};", op_line(graph, op));
        }
        s.push_str("  }\n");
    }
    for op in graph.operations() {
        if !clustered[op.id.0] {
            let _ = writeln!(s, "  {};", op_line(graph, op.id));
        }
    }

    for op in graph.operations() {
        for &v in &op.inputs {
            let _ = writeln!(s, "  {} -> {}{};", var_node(v), op_node(op.id), edge_attr(opts, v));
        }
        let _ = writeln!(
            s,
            "  {} -> {}{};",
            op_node(op.id),
            var_node(op.output),
            edge_attr(opts, op.output)
        );
    }
    s.push_str("}\n");
    s
}

fn op_line(graph: &Graph, id: OpId) -> String {
    let op = graph.operation(id);
    let shape = if op.kind.is_expand() {
        "shape=box, peripheries=2"
    } else {
        "shape=box"
    };
    format!(
        "{} [{shape}, label=\"{}\"]",
        op_node(id),
        escape(&op.kind.label())
    )
}

fn edge_attr(opts: &DotOptions, v: VarId) -> String {
    match &opts.edge_labels {
        Some(labels) => format!(" [label=\"{}\"]", escape(&labels[v.0])),
        None => String::new(),
    }
}
