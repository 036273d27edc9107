//! Dependency analysis, signature partitioning and expansion-node insertion.
//!
//! Each operation is tagged with the set of uncertain inputs its output
//! depends on. An operation with signature `s` only needs to be evaluated at
//! the distinct points of the sub-grid spanned by `s`; wherever a smaller
//! signature feeds a larger one an `expand` operation broadcasts the value.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::dot::{self, Cluster, DotOptions};
use crate::graph::{
    topo_sort, CycleError, Graph, OpId, OpKind, OperationNode, VarId, VarKind, VariableNode,
};
use crate::signature::{DependencySignature, MAX_AXES};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AmtcError {
    #[error(transparent)]
    Cycle(#[from] CycleError),
    #[error("graph has {0} uncertain inputs; at most {MAX_AXES} are supported")]
    TooManyInputs(usize),
    #[error("internal error: {0}")]
    Internal(String),
}

/// Row `i` is the dependency signature of operation `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InfluenceMatrix {
    pub dims: usize,
    pub rows: Vec<DependencySignature>,
    /// Signature of every variable.
    pub variables: Vec<DependencySignature>,
}

impl InfluenceMatrix {
    pub fn row(&self, op: OpId) -> DependencySignature {
        self.rows[op.0]
    }

    /// `1` if operation `op` depends on input `axis`.
    pub fn entry(&self, op: OpId, axis: usize) -> u8 {
        u8::from(self.rows[op.0].contains(axis))
    }

    /// Number of operations depending on each input.
    pub fn dependent_counts(&self) -> Vec<usize> {
        (0..self.dims)
            .map(|a| self.rows.iter().filter(|s| s.contains(a)).count())
            .collect()
    }

    /// CSV with one row per operation and one 0/1 column per uncertain input.
    pub fn to_csv(&self, graph: &Graph) -> String {
        let mut s = String::from("op,kind");
        for name in graph.input_names() {
            s.push(',');
            s.push_str(name);
        }
        s.push('\n');
        for op in graph.operations() {
            let _ = write!(s, "{},{}", op.id, op.kind.label());
            for a in 0..self.dims {
                let _ = write!(s, ",{}", self.entry(op.id, a));
            }
            s.push('\n');
        }
        s
    }
}

/// Forward pass in topological order. Inputs carry their own axis,
/// constants the empty signature, operations the union of their arguments.
/// An existing expand operation carries its target signature.
pub fn compute_influence_matrix(graph: &Graph) -> Result<InfluenceMatrix, AmtcError> {
    let dims = graph.dimension();
    if dims > MAX_AXES {
        return Err(AmtcError::TooManyInputs(dims));
    }
    let order = topo_sort(graph)?;
    let mut variables = vec![DependencySignature::EMPTY; graph.variables().len()];
    for (axis, u) in graph.uncertain_inputs().iter().enumerate() {
        variables[u.var.0] = DependencySignature::single(axis);
    }
    let mut rows = vec![DependencySignature::EMPTY; graph.operations().len()];
    for id in order {
        let op = graph.operation(id);
        let sig = match op.kind {
            OpKind::Expand { to, .. } => to,
            _ => op
                .inputs
                .iter()
                .fold(DependencySignature::EMPTY, |acc, v| acc.union(variables[v.0])),
        };
        rows[id.0] = sig;
        variables[op.output.0] = sig;
    }
    Ok(InfluenceMatrix {
        dims,
        rows,
        variables,
    })
}

/// Operations grouped by signature.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Partition {
    pub groups: BTreeMap<DependencySignature, Vec<OpId>>,
}

impl Partition {
    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn group_of(&self, op: OpId) -> Option<DependencySignature> {
        self.groups
            .iter()
            .find(|(_, ops)| ops.contains(&op))
            .map(|(s, _)| *s)
    }
}

pub fn partition_operations(matrix: &InfluenceMatrix) -> Partition {
    let mut groups: BTreeMap<DependencySignature, Vec<OpId>> = BTreeMap::new();
    for (i, &sig) in matrix.rows.iter().enumerate() {
        groups.entry(sig).or_default().push(OpId(i));
    }
    Partition { groups }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransformedGraph {
    /// The input graph with expand operations appended after the original ones.
    pub graph: Graph,
    /// Partition of the original operations.
    pub partition: Partition,
    /// Signature of every variable of `graph`.
    pub signature_of: Vec<DependencySignature>,
    /// Ids below this are original operations, the rest are expansions.
    pub original_op_count: usize,
}

impl TransformedGraph {
    pub fn expansions(&self) -> &[OperationNode] {
        &self.graph.operations()[self.original_op_count..]
    }

    pub fn op_signature(&self, op: OpId) -> DependencySignature {
        self.signature_of[self.graph.operation(op).output.0]
    }
}

/// Rewires every edge whose producer signature differs from the consumer's
/// through one expand operation. Expansions are shared per
/// (variable, target signature) pair.
pub fn insert_expansions(
    graph: &Graph,
    matrix: &InfluenceMatrix,
) -> Result<TransformedGraph, AmtcError> {
    if matrix.rows.len() != graph.operations().len()
        || matrix.variables.len() != graph.variables().len()
    {
        return Err(AmtcError::Internal(
            "influence matrix does not match the graph".into(),
        ));
    }
    let mut variables: Vec<VariableNode> = graph.variables().to_vec();
    let mut operations: Vec<OperationNode> = graph.operations().to_vec();
    let mut signature_of = matrix.variables.clone();
    let mut taken: HashSet<String> = variables.iter().map(|v| v.name.clone()).collect();
    let mut cache: HashMap<(VarId, DependencySignature), VarId> = HashMap::new();
    let mut expansions: Vec<OperationNode> = Vec::new();
    let original_op_count = operations.len();

    for op in operations.iter_mut() {
        let target = matrix.rows[op.id.0];
        for slot in op.inputs.iter_mut() {
            let source = *slot;
            let from = signature_of[source.0];
            if from == target {
                continue;
            }
            if !from.is_subset_of(target) {
                return Err(AmtcError::Internal(format!(
                    "{} has signature {from} which is not contained in {target} of {}",
                    source, op.id
                )));
            }
            let expanded = *cache.entry((source, target)).or_insert_with(|| {
                let id = VarId(variables.len());
                let base = &graph.variable(source).name;
                let mut n = expansions.len();
                let name = loop {
                    let candidate = format!("{base}__e{n}");
                    if taken.insert(candidate.clone()) {
                        break candidate;
                    }
                    n += 1;
                };
                variables.push(VariableNode {
                    id,
                    name,
                    kind: VarKind::Intermediate,
                });
                signature_of.push(target);
                expansions.push(OperationNode {
                    id: OpId(original_op_count + expansions.len()),
                    kind: OpKind::Expand { from, to: target },
                    inputs: vec![source],
                    output: id,
                });
                id
            });
            *slot = expanded;
        }
    }
    operations.extend(expansions);

    Ok(TransformedGraph {
        graph: Graph::from_parts(
            variables,
            operations,
            graph.uncertain_inputs().to_vec(),
            graph.outputs().to_vec(),
        ),
        partition: partition_operations(matrix),
        signature_of,
        original_op_count,
    })
}

/// Influence analysis followed by expansion insertion.
pub fn transform(graph: &Graph) -> Result<TransformedGraph, AmtcError> {
    let matrix = compute_influence_matrix(graph)?;
    insert_expansions(graph, &matrix)
}

/// Splices every expand operation out, wiring consumers back to the
/// expanded source. Variable and operation ids are re-densified.
pub fn remove_expansions(graph: &Graph) -> Graph {
    let n = graph.variables().len();
    let mut source: Vec<VarId> = (0..n).map(VarId).collect();
    let mut dropped = vec![false; n];
    let producers = graph.producers();
    // Resolve chains of expansions back to a non-expand variable.
    let resolve = |mut v: VarId| loop {
        match producers[v.0].map(|p| graph.operation(p)) {
            Some(op) if op.kind.is_expand() => v = op.inputs[0],
            _ => return v,
        }
    };
    for op in graph.operations().iter().filter(|o| o.kind.is_expand()) {
        dropped[op.output.0] = true;
        source[op.output.0] = resolve(op.inputs[0]);
    }
    let mut remap = vec![VarId(usize::MAX); n];
    let mut variables = Vec::new();
    for v in graph.variables() {
        if !dropped[v.id.0] {
            remap[v.id.0] = VarId(variables.len());
            variables.push(VariableNode {
                id: VarId(variables.len()),
                ..v.clone()
            });
        }
    }
    let map = |v: VarId| remap[source[v.0].0];
    let operations = graph
        .operations()
        .iter()
        .filter(|o| !o.kind.is_expand())
        .enumerate()
        .map(|(i, o)| OperationNode {
            id: OpId(i),
            kind: o.kind,
            inputs: o.inputs.iter().map(|&v| map(v)).collect(),
            output: map(o.output),
        })
        .collect();
    let uncertain = graph
        .uncertain_inputs()
        .iter()
        .map(|u| crate::graph::UncertainInput {
            var: map(u.var),
            distribution: u.distribution,
        })
        .collect();
    let outputs = graph
        .outputs()
        .iter()
        .map(|o| crate::graph::OutputBinding {
            name: o.name.clone(),
            var: map(o.var),
        })
        .collect();
    Graph::from_parts(variables, operations, uncertain, outputs)
}

/// Scheduled scalar work for one evaluation on a grid with `axis_sizes` nodes per axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScheduledCost {
    /// Elementary operations times full-grid points.
    pub naive_scalar_evals: usize,
    /// Elementary operations times the points of their own signature.
    pub amtc_scalar_evals: usize,
    /// Elements written by expand operations and by output broadcasts.
    pub expansion_copies: usize,
}

impl ScheduledCost {
    pub fn reduction(&self) -> f64 {
        if self.naive_scalar_evals == 0 {
            0.0
        } else {
            1.0 - self.amtc_scalar_evals as f64 / self.naive_scalar_evals as f64
        }
    }
}

pub fn scheduled_cost(tg: &TransformedGraph, axis_sizes: &[usize]) -> ScheduledCost {
    let g = &tg.graph;
    let full = DependencySignature::full(g.dimension()).point_count(axis_sizes);
    let mut cost = ScheduledCost {
        naive_scalar_evals: 0,
        amtc_scalar_evals: 0,
        expansion_copies: 0,
    };
    for op in g.operations() {
        let points = tg.op_signature(op.id).point_count(axis_sizes);
        if op.kind.is_expand() {
            cost.expansion_copies += points;
        } else {
            cost.naive_scalar_evals += full;
            cost.amtc_scalar_evals += points;
        }
    }
    for o in g.outputs() {
        if tg.signature_of[o.var.0] != DependencySignature::full(g.dimension()) {
            cost.expansion_copies += full;
        }
    }
    cost
}

/// DOT of the untransformed graph; every edge carries the full-grid size.
pub fn dot_before(graph: &Graph, axis_sizes: &[usize]) -> String {
    let total: usize = axis_sizes.iter().product();
    let labels = graph
        .variables()
        .iter()
        .map(|v| match v.kind {
            VarKind::Constant(_) => "1".to_string(),
            _ => total.to_string(),
        })
        .collect();
    dot::render(
        graph,
        &DotOptions {
            title: Some("full-grid evaluation".into()),
            edge_labels: Some(labels),
            clusters: Vec::new(),
        },
    )
}

/// DOT of a transformed graph with one cluster per signature and edges
/// labelled by the size of the tensor they carry.
pub fn dot_after(tg: &TransformedGraph, axis_sizes: &[usize]) -> String {
    let names = tg.graph.input_names();
    let labels = tg
        .signature_of
        .iter()
        .map(|s| s.point_count(axis_sizes).to_string())
        .collect();
    let clusters = tg
        .partition
        .groups
        .iter()
        .map(|(sig, ops)| Cluster {
            label: format!("sub-graph {}", sig.label_with(&names)),
            ops: ops.clone(),
        })
        .collect();
    dot::render(
        &tg.graph,
        &DotOptions {
            title: Some("AMTC evaluation".into()),
            edge_labels: Some(labels),
            clusters,
        },
    )
}
