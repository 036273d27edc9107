use std::fmt;

use super::{topo_sort, Graph, OpId, VarId, VarKind};

/// One broken structural invariant.
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    VariableIdMismatch { index: usize, id: VarId },
    OperationIdMismatch { index: usize, id: OpId },
    Arity { op: OpId, expected: usize, found: usize },
    DanglingInput { op: OpId, var: VarId },
    DanglingOutput { op: OpId, var: VarId },
    MultipleProducers { var: VarId, ops: Vec<OpId> },
    ProducedSource { var: VarId, op: OpId },
    MissingProducer { var: VarId },
    UncertainInputKind { var: VarId },
    UndeclaredUncertainInput { var: VarId },
    DanglingOutputBinding { name: String, var: VarId },
    DegenerateExpand { op: OpId },
    Cycle { op: OpId },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::VariableIdMismatch { index, id } => {
                write!(f, "variable at position {index} carries id {id}")
            }
            Self::OperationIdMismatch { index, id } => {
                write!(f, "operation at position {index} carries id {id}")
            }
            Self::Arity { op, expected, found } => {
                write!(f, "{op} takes {expected} input(s) but has {found}")
            }
            Self::DanglingInput { op, var } => write!(f, "{op} reads unknown variable {var}"),
            Self::DanglingOutput { op, var } => write!(f, "{op} writes unknown variable {var}"),
            Self::MultipleProducers { var, ops } => {
                write!(f, "{var} is produced by {} operations", ops.len())
            }
            Self::ProducedSource { var, op } => {
                write!(f, "source variable {var} is produced by {op}")
            }
            Self::MissingProducer { var } => write!(f, "{var} has no producing operation"),
            Self::UncertainInputKind { var } => {
                write!(f, "{var} is listed as uncertain input but has another kind")
            }
            Self::UndeclaredUncertainInput { var } => {
                write!(f, "{var} has uncertain-input kind but no distribution")
            }
            Self::DanglingOutputBinding { name, var } => {
                write!(f, "output `{name}` binds unknown variable {var}")
            }
            Self::DegenerateExpand { op } => {
                write!(f, "{op} expands to a signature that is not a strict superset")
            }
            Self::Cycle { op } => write!(f, "cycle through {op}"),
        }
    }
}

/// Collects every structural violation; an empty list means the graph is valid.
pub fn validate(graph: &Graph) -> Result<(), Vec<Violation>> {
    let mut out = Vec::new();
    let vars = graph.variables();
    let n_vars = vars.len();

    for (i, v) in vars.iter().enumerate() {
        if v.id.0 != i {
            out.push(Violation::VariableIdMismatch { index: i, id: v.id });
        }
    }
    for (i, op) in graph.operations().iter().enumerate() {
        if op.id.0 != i {
            out.push(Violation::OperationIdMismatch { index: i, id: op.id });
        }
    }

    let mut produced_by: Vec<Vec<OpId>> = vec![Vec::new(); n_vars];
    for op in graph.operations() {
        let expected = op.kind.arity();
        if op.inputs.len() != expected {
            out.push(Violation::Arity {
                op: op.id,
                expected,
                found: op.inputs.len(),
            });
        }
        for &v in &op.inputs {
            if v.0 >= n_vars {
                out.push(Violation::DanglingInput { op: op.id, var: v });
            }
        }
        if op.output.0 >= n_vars {
            out.push(Violation::DanglingOutput { op: op.id, var: op.output });
        } else {
            produced_by[op.output.0].push(op.id);
        }
        if let super::OpKind::Expand { from, to } = op.kind {
            if !from.is_strict_subset_of(to) {
                out.push(Violation::DegenerateExpand { op: op.id });
            }
        }
    }

    for (i, ops) in produced_by.iter().enumerate() {
        let var = VarId(i);
        if ops.len() > 1 {
            out.push(Violation::MultipleProducers { var, ops: ops.clone() });
        }
        let is_source = vars[i].is_source();
        match (is_source, ops.first()) {
            (true, Some(&op)) => out.push(Violation::ProducedSource { var, op }),
            (false, None) => out.push(Violation::MissingProducer { var }),
            _ => {}
        }
    }

    let mut declared = vec![false; n_vars];
    for u in graph.uncertain_inputs() {
        if u.var.0 >= n_vars {
            out.push(Violation::UndeclaredUncertainInput { var: u.var });
            continue;
        }
        declared[u.var.0] = true;
        if vars[u.var.0].kind != VarKind::UncertainInput {
            out.push(Violation::UncertainInputKind { var: u.var });
        }
    }
    for (i, v) in vars.iter().enumerate() {
        if v.kind == VarKind::UncertainInput && !declared[i] {
            out.push(Violation::UndeclaredUncertainInput { var: v.id });
        }
    }

    for o in graph.outputs() {
        if o.var.0 >= n_vars {
            out.push(Violation::DanglingOutputBinding {
                name: o.name.clone(),
                var: o.var,
            });
        }
    }

    if let Err(e) = topo_sort(graph) {
        out.push(Violation::Cycle { op: e.op });
    }

    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::simple;
    use crate::graph::{OpKind, OperationNode, VariableNode};

    #[test]
    fn simple_model_is_valid() {
        assert_eq!(validate(&simple()), Ok(()));
    }

    #[test]
    fn missing_variable_is_one_violation() {
        let g = simple();
        let mut ops = g.operations().to_vec();
        ops[0].inputs[0] = VarId(99);
        let bad = Graph::from_parts(
            g.variables().to_vec(),
            ops,
            g.uncertain_inputs().to_vec(),
            g.outputs().to_vec(),
        );
        let v = validate(&bad).unwrap_err();
        assert_eq!(v, vec![Violation::DanglingInput { op: OpId(0), var: VarId(99) }]);
    }

    #[test]
    fn two_producers_is_one_violation() {
        let g = simple();
        let mut ops = g.operations().to_vec();
        // A second producer of xi3 that reads u1.
        ops.push(OperationNode {
            id: OpId(4),
            kind: OpKind::Sin,
            inputs: vec![VarId(0)],
            output: VarId(4),
        });
        let bad = Graph::from_parts(
            g.variables().to_vec(),
            ops,
            g.uncertain_inputs().to_vec(),
            g.outputs().to_vec(),
        );
        let v = validate(&bad).unwrap_err();
        assert_eq!(
            v,
            vec![Violation::MultipleProducers { var: VarId(4), ops: vec![OpId(2), OpId(4)] }]
        );
    }

    #[test]
    fn arity_and_cycle_are_reported() {
        let vars = vec![
            VariableNode { id: VarId(0), name: "a".into(), kind: VarKind::Intermediate },
            VariableNode { id: VarId(1), name: "b".into(), kind: VarKind::Intermediate },
        ];
        let ops = vec![
            OperationNode { id: OpId(0), kind: OpKind::Add, inputs: vec![VarId(1)], output: VarId(0) },
            OperationNode { id: OpId(1), kind: OpKind::Cos, inputs: vec![VarId(0)], output: VarId(1) },
        ];
        let v = validate(&Graph::from_parts(vars, ops, vec![], vec![])).unwrap_err();
        assert!(v.contains(&Violation::Arity { op: OpId(0), expected: 2, found: 1 }));
        assert!(v.iter().any(|x| matches!(x, Violation::Cycle { .. })));
    }

    #[test]
    fn produced_constant_is_flagged() {
        let vars = vec![
            VariableNode { id: VarId(0), name: "c".into(), kind: VarKind::Constant(1.0) },
            VariableNode { id: VarId(1), name: "d".into(), kind: VarKind::Constant(2.0) },
        ];
        let ops = vec![OperationNode {
            id: OpId(0),
            kind: OpKind::Exp,
            inputs: vec![VarId(0)],
            output: VarId(1),
        }];
        let v = validate(&Graph::from_parts(vars, ops, vec![], vec![])).unwrap_err();
        assert_eq!(v, vec![Violation::ProducedSource { var: VarId(1), op: OpId(0) }]);
    }
}
