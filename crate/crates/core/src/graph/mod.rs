//! Bipartite computational-graph IR of scalar elementary operations.
//!
//! Variables and operations live in separate id spaces, each dense from 0 in
//! insertion order. Insertion order is also the tie-breaker wherever an
//! ordering must be chosen.

pub mod dot;
mod topo;
mod validate;

use std::fmt;

use serde::Serialize;

pub use topo::{topo_sort, CycleError};
pub use validate::{validate, Violation};

use crate::distribution::Distribution;
use crate::signature::{DependencySignature, MAX_AXES};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct VarId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct OpId(pub usize);

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

impl fmt::Display for OpId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "op{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum VarKind {
    UncertainInput,
    Constant(f64),
    Intermediate,
    Output,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VariableNode {
    pub id: VarId,
    pub name: String,
    pub kind: VarKind,
}

impl VariableNode {
    pub fn constant_value(&self) -> Option<f64> {
        match self.kind {
            VarKind::Constant(v) => Some(v),
            _ => None,
        }
    }

    /// Sources have no producing operation.
    pub fn is_source(&self) -> bool {
        matches!(self.kind, VarKind::UncertainInput | VarKind::Constant(_))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OpKind {
    Neg,
    Add,
    Sub,
    Mul,
    Div,
    PowConst(f64),
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    /// Broadcast from a smaller dependency signature to a larger one.
    Expand {
        from: DependencySignature,
        to: DependencySignature,
    },
}

impl OpKind {
    pub fn arity(&self) -> usize {
        match self {
            Self::Add | Self::Sub | Self::Mul | Self::Div => 2,
            _ => 1,
        }
    }

    pub fn is_expand(&self) -> bool {
        matches!(self, Self::Expand { .. })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Neg => "neg",
            Self::Add => "add",
            Self::Sub => "sub",
            Self::Mul => "mul",
            Self::Div => "div",
            Self::PowConst(_) => "pow_const",
            Self::Sin => "sin",
            Self::Cos => "cos",
            Self::Tan => "tan",
            Self::Exp => "exp",
            Self::Log => "log",
            Self::Sqrt => "sqrt",
            Self::Expand { .. } => "expand",
        }
    }

    /// Short label including parameters, used in DOT output and CSV exports.
    pub fn label(&self) -> String {
        match self {
            Self::PowConst(e) => format!("pow({e:?})"),
            Self::Expand { from, to } => format!("expand {from}->{to}"),
            other => other.name().to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OperationNode {
    pub id: OpId,
    pub kind: OpKind,
    pub inputs: Vec<VarId>,
    pub output: VarId,
}

#[derive(Clone, Debug, PartialEq)]
pub struct UncertainInput {
    pub var: VarId,
    pub distribution: Distribution,
}

/// A named model output. Several names may bind the same variable, and an
/// output may alias an uncertain input directly.
#[derive(Clone, Debug, PartialEq)]
pub struct OutputBinding {
    pub name: String,
    pub var: VarId,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    variables: Vec<VariableNode>,
    operations: Vec<OperationNode>,
    uncertain_inputs: Vec<UncertainInput>,
    outputs: Vec<OutputBinding>,
}

impl Graph {
    /// Assembles a graph from raw parts without checking any invariant.
    /// Use [`validate`] before handing such a graph to the engines.
    pub fn from_parts(
        variables: Vec<VariableNode>,
        operations: Vec<OperationNode>,
        uncertain_inputs: Vec<UncertainInput>,
        outputs: Vec<OutputBinding>,
    ) -> Self {
        Self {
            variables,
            operations,
            uncertain_inputs,
            outputs,
        }
    }

    pub fn variables(&self) -> &[VariableNode] {
        &self.variables
    }

    pub fn operations(&self) -> &[OperationNode] {
        &self.operations
    }

    pub fn uncertain_inputs(&self) -> &[UncertainInput] {
        &self.uncertain_inputs
    }

    pub fn outputs(&self) -> &[OutputBinding] {
        &self.outputs
    }

    pub fn variable(&self, id: VarId) -> &VariableNode {
        &self.variables[id.0]
    }

    pub fn operation(&self, id: OpId) -> &OperationNode {
        &self.operations[id.0]
    }

    /// Number of uncertain inputs `d`.
    pub fn dimension(&self) -> usize {
        self.uncertain_inputs.len()
    }

    pub fn distributions(&self) -> Vec<Distribution> {
        self.uncertain_inputs.iter().map(|u| u.distribution).collect()
    }

    pub fn input_names(&self) -> Vec<&str> {
        self.uncertain_inputs
            .iter()
            .map(|u| self.variables[u.var.0].name.as_str())
            .collect()
    }

    /// Axis index of an uncertain-input variable.
    pub fn axis_of(&self, var: VarId) -> Option<usize> {
        self.uncertain_inputs.iter().position(|u| u.var == var)
    }

    /// Number of non-expand operations, i.e. the cost of one single-point evaluation.
    pub fn elementary_op_count(&self) -> usize {
        self.operations.iter().filter(|o| !o.kind.is_expand()).count()
    }

    pub fn has_expansions(&self) -> bool {
        self.operations.iter().any(|o| o.kind.is_expand())
    }

    /// First producing operation of each variable (by op id). Out-of-range
    /// output ids are ignored.
    pub fn producers(&self) -> Vec<Option<OpId>> {
        let mut prod = vec![None; self.variables.len()];
        for op in &self.operations {
            if let Some(slot) = prod.get_mut(op.output.0) {
                if slot.is_none() {
                    *slot = Some(op.id);
                }
            }
        }
        prod
    }

    /// Consuming operations of each variable, ascending by op id.
    pub fn consumers(&self) -> Vec<Vec<OpId>> {
        let mut cons = vec![Vec::new(); self.variables.len()];
        for op in &self.operations {
            for v in &op.inputs {
                if let Some(list) = cons.get_mut(v.0) {
                    if list.last() != Some(&op.id) {
                        list.push(op.id);
                    }
                }
            }
        }
        cons
    }

    pub fn output(&self, name: &str) -> Option<&OutputBinding> {
        self.outputs.iter().find(|o| o.name == name)
    }
}

/// Incremental constructor that keeps ids dense and kinds consistent.
#[derive(Debug, Default)]
pub struct GraphBuilder {
    graph: Graph,
}

impl Default for Graph {
    fn default() -> Self {
        Self::from_parts(Vec::new(), Vec::new(), Vec::new(), Vec::new())
    }
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    fn push_var(&mut self, name: impl Into<String>, kind: VarKind) -> VarId {
        let id = VarId(self.graph.variables.len());
        self.graph.variables.push(VariableNode {
            id,
            name: name.into(),
            kind,
        });
        id
    }

    /// Declares the next uncertain input; axis order follows call order.
    pub fn uncertain_input(&mut self, name: impl Into<String>, distribution: Distribution) -> VarId {
        assert!(
            self.graph.uncertain_inputs.len() < MAX_AXES,
            "at most {MAX_AXES} uncertain inputs are supported"
        );
        let var = self.push_var(name, VarKind::UncertainInput);
        self.graph
            .uncertain_inputs
            .push(UncertainInput { var, distribution });
        var
    }

    pub fn constant(&mut self, name: impl Into<String>, value: f64) -> VarId {
        self.push_var(name, VarKind::Constant(value))
    }

    /// Appends an operation and its fresh intermediate output variable.
    pub fn op(&mut self, kind: OpKind, inputs: &[VarId], output_name: impl Into<String>) -> VarId {
        let output = self.push_var(output_name, VarKind::Intermediate);
        let id = OpId(self.graph.operations.len());
        self.graph.operations.push(OperationNode {
            id,
            kind,
            inputs: inputs.to_vec(),
            output,
        });
        output
    }

    pub fn unary(&mut self, kind: OpKind, a: VarId, name: impl Into<String>) -> VarId {
        self.op(kind, &[a], name)
    }

    pub fn binary(&mut self, kind: OpKind, a: VarId, b: VarId, name: impl Into<String>) -> VarId {
        self.op(kind, &[a, b], name)
    }

    /// Turns an operation-produced intermediate into a named output variable.
    /// Any other variable is bound to the output name as an alias.
    pub fn output(&mut self, name: impl Into<String>, var: VarId) {
        let name = name.into();
        let node = &mut self.graph.variables[var.0];
        if node.kind == VarKind::Intermediate {
            node.kind = VarKind::Output;
            node.name = name.clone();
        }
        self.graph.outputs.push(OutputBinding { name, var });
    }

    /// Binds an output name to an existing variable without touching it.
    pub fn bind_output(&mut self, name: impl Into<String>, var: VarId) {
        self.graph.outputs.push(OutputBinding {
            name: name.into(),
            var,
        });
    }

    pub fn rename(&mut self, var: VarId, name: impl Into<String>) {
        self.graph.variables[var.0].name = name.into();
    }

    pub fn variable(&self, var: VarId) -> &VariableNode {
        &self.graph.variables[var.0]
    }

    pub fn var_count(&self) -> usize {
        self.graph.variables.len()
    }

    pub fn op_count(&self) -> usize {
        self.graph.operations.len()
    }

    pub fn finish(self) -> Graph {
        self.graph
    }
}

/// True when two graphs have the same operations (kinds and wiring, matched
/// in op-id order), the same uncertain inputs and distributions in axis order,
/// equal constants, and the same output bindings in order. Variable ids and
/// names of intermediates may differ.
pub fn is_isomorphic(a: &Graph, b: &Graph) -> bool {
    if a.operations.len() != b.operations.len()
        || a.variables.len() != b.variables.len()
        || a.uncertain_inputs.len() != b.uncertain_inputs.len()
        || a.outputs.len() != b.outputs.len()
    {
        return false;
    }
    let mut map: Vec<Option<VarId>> = vec![None; a.variables.len()];
    let mut taken = vec![false; b.variables.len()];
    for (ua, ub) in a.uncertain_inputs.iter().zip(&b.uncertain_inputs) {
        if ua.distribution != ub.distribution || map[ua.var.0].is_some() {
            return false;
        }
        map[ua.var.0] = Some(ub.var);
        taken[ub.var.0] = true;
    }
    let mut bind = |map: &mut Vec<Option<VarId>>, va: VarId, vb: VarId| -> bool {
        if va.0 >= map.len() || vb.0 >= taken.len() {
            return false;
        }
        match map[va.0] {
            Some(existing) => existing == vb,
            None if taken[vb.0] => false,
            None => {
                let (na, nb) = (&a.variables[va.0], &b.variables[vb.0]);
                let compatible = match (na.kind, nb.kind) {
                    (VarKind::Constant(x), VarKind::Constant(y)) => x.to_bits() == y.to_bits(),
                    (VarKind::UncertainInput, VarKind::UncertainInput) => false,
                    (ka, kb) => std::mem::discriminant(&ka) == std::mem::discriminant(&kb),
                };
                if compatible {
                    map[va.0] = Some(vb);
                    taken[vb.0] = true;
                }
                compatible
            }
        }
    };

    for (oa, ob) in a.operations.iter().zip(&b.operations) {
        if oa.kind != ob.kind || oa.inputs.len() != ob.inputs.len() {
            return false;
        }
        for (&ia, &ib) in oa.inputs.iter().zip(&ob.inputs) {
            if !bind(&mut map, ia, ib) {
                return false;
            }
        }
        if !bind(&mut map, oa.output, ob.output) {
            return false;
        }
    }
    for (oa, ob) in a.outputs.iter().zip(&b.outputs) {
        if oa.name != ob.name || !bind(&mut map, oa.var, ob.var) {
            return false;
        }
    }
    // Unreferenced constants must pair up by value.
    let mut left: Vec<u64> = Vec::new();
    let mut right: Vec<u64> = Vec::new();
    for (i, v) in a.variables.iter().enumerate() {
        if map[i].is_none() {
            match v.kind {
                VarKind::Constant(x) => left.push(x.to_bits()),
                _ => return false,
            }
        }
    }
    for (i, v) in b.variables.iter().enumerate() {
        if !taken[i] {
            match v.kind {
                VarKind::Constant(x) => right.push(x.to_bits()),
                _ => return false,
            }
        }
    }
    left.sort_unstable();
    right.sort_unstable();
    left == right
}
