use std::collections::BTreeMap;

use super::kernel::apply;
use super::{DomainError, EngineError};
use crate::graph::{topo_sort, Graph, OpId, OpKind, VarKind};

#[derive(Clone, Debug)]
struct Instr {
    op: OpId,
    kind: OpKind,
    a: usize,
    b: usize,
    out: usize,
}

/// A graph flattened into a straight-line program over scalar slots, one per
/// variable. Expansions are identities at a single point.
#[derive(Clone, Debug)]
pub struct ScalarProgram {
    instrs: Vec<Instr>,
    init: Vec<f64>,
    input_slots: Vec<usize>,
    output_slots: Vec<(String, usize)>,
}

impl ScalarProgram {
    pub fn compile(graph: &Graph) -> Result<Self, EngineError> {
        let order = topo_sort(graph)?;
        let instrs = order
            .into_iter()
            .map(|id| {
                let op = graph.operation(id);
                Instr {
                    op: id,
                    kind: op.kind,
                    a: op.inputs[0].0,
                    b: op.inputs.get(1).map_or(0, |v| v.0),
                    out: op.output.0,
                }
            })
            .collect();
        let init = graph
            .variables()
            .iter()
            .map(|v| match v.kind {
                VarKind::Constant(c) => c,
                _ => 0.0,
            })
            .collect();
        Ok(Self {
            instrs,
            init,
            input_slots: graph.uncertain_inputs().iter().map(|u| u.var.0).collect(),
            output_slots: graph
                .outputs()
                .iter()
                .map(|o| (o.name.clone(), o.var.0))
                .collect(),
        })
    }

    pub fn dimension(&self) -> usize {
        self.input_slots.len()
    }

    pub fn output_names(&self) -> impl Iterator<Item = &str> {
        self.output_slots.iter().map(|(n, _)| n.as_str())
    }

    pub fn output_index(&self, name: &str) -> Option<usize> {
        self.output_slots
            .iter()
            .position(|(n, _)| n == name)
    }

    /// Fresh slot storage for [`ScalarProgram::run`].
    pub fn scratch(&self) -> Vec<f64> {
        self.init.clone()
    }

    /// Runs the program at `point`; `index` is recorded in any domain error.
    /// Output `i` is then at `scratch[self.output_var(i)]`.
    pub fn run(&self, scratch: &mut [f64], point: &[f64], index: usize) -> Result<(), DomainError> {
        for (&slot, &x) in self.input_slots.iter().zip(point) {
            scratch[slot] = x;
        }
        for ins in &self.instrs {
            let a = scratch[ins.a];
            let b = scratch[ins.b];
            scratch[ins.out] = apply(ins.kind, a, b).ok_or(DomainError {
                op: ins.op,
                kind: ins.kind.name(),
                index,
            })?;
        }
        Ok(())
    }

    /// Slot holding output number `i`.
    pub fn output_var(&self, i: usize) -> usize {
        self.output_slots[i].1
    }
}

/// Plain scalar interpretation of `graph` at one physical point.
pub fn evaluate_single_point(graph: &Graph, point: &[f64]) -> Result<BTreeMap<String, f64>, EngineError> {
    if point.len() != graph.dimension() {
        return Err(EngineError::GridMismatch(format!(
            "point has {} coordinates, graph has {} inputs",
            point.len(),
            graph.dimension()
        )));
    }
    let prog = ScalarProgram::compile(graph)?;
    let mut scratch = prog.scratch();
    prog.run(&mut scratch, point, 0)?;
    Ok(prog
        .output_slots
        .iter()
        .map(|(n, s)| (n.clone(), scratch[*s]))
        .collect())
}
