use std::cmp::Reverse;
use std::collections::BinaryHeap;

use thiserror::Error;

use super::{Graph, OpId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("computational graph contains a cycle through {op}")]
pub struct CycleError {
    /// An operation lying on the cycle.
    pub op: OpId,
}

/// Kahn's algorithm over operations. Among ready operations the smallest id
/// runs first, so the order is a pure function of the graph.
pub fn topo_sort(graph: &Graph) -> Result<Vec<OpId>, CycleError> {
    let n_vars = graph.variables().len();
    let ops = graph.operations();
    let producers = graph.producers();

    // Pending predecessor count per op: inputs produced by some operation.
    let mut pending = vec![0usize; ops.len()];
    let mut successors: Vec<Vec<OpId>> = vec![Vec::new(); ops.len()];
    for op in ops {
        for v in &op.inputs {
            if v.0 >= n_vars {
                continue;
            }
            if let Some(p) = producers[v.0] {
                pending[op.id.0] += 1;
                successors[p.0].push(op.id);
            }
        }
    }

    let mut ready: BinaryHeap<Reverse<OpId>> = ops
        .iter()
        .filter(|op| pending[op.id.0] == 0)
        .map(|op| Reverse(op.id))
        .collect();
    let mut order = Vec::with_capacity(ops.len());
    while let Some(Reverse(id)) = ready.pop() {
        order.push(id);
        for &s in &successors[id.0] {
            pending[s.0] -= 1;
            if pending[s.0] == 0 {
                ready.push(Reverse(s));
            }
        }
    }

    if order.len() == ops.len() {
        return Ok(order);
    }

    // Every unscheduled op has an unscheduled producer among its inputs; walk
    // backwards until an op repeats, which then lies on a cycle.
    let start = ops
        .iter()
        .find(|op| pending[op.id.0] > 0)
        .map(|op| op.id)
        .expect("unscheduled operation exists");
    let mut seen = vec![false; ops.len()];
    let mut cur = start;
    loop {
        if seen[cur.0] {
            return Err(CycleError { op: cur });
        }
        seen[cur.0] = true;
        cur = ops[cur.0]
            .inputs
            .iter()
            .filter(|v| v.0 < n_vars)
            .filter_map(|v| producers[v.0])
            .find(|p| pending[p.0] > 0)
            .expect("blocked operation has a blocked producer");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::Distribution;
    use crate::graph::fixtures::simple;
    use crate::graph::{GraphBuilder, OpKind, OperationNode, VarId, VarKind, VariableNode};
    use proptest::prelude::*;

    #[test]
    fn simple_model_order() {
        let order = topo_sort(&simple()).unwrap();
        assert_eq!(order, vec![OpId(0), OpId(1), OpId(2), OpId(3)]);
    }

    #[test]
    fn single_operation() {
        let mut b = GraphBuilder::new();
        let u = b.uncertain_input("u", Distribution::normal(0.0, 1.0).unwrap());
        let s = b.unary(OpKind::Sin, u, "s");
        b.output("f", s);
        assert_eq!(topo_sort(&b.finish()).unwrap(), vec![OpId(0)]);
    }

    #[test]
    fn insertion_order_is_not_required() {
        // op0 consumes the output of op1.
        let vars = vec![
            VariableNode { id: VarId(0), name: "u".into(), kind: VarKind::UncertainInput },
            VariableNode { id: VarId(1), name: "a".into(), kind: VarKind::Intermediate },
            VariableNode { id: VarId(2), name: "b".into(), kind: VarKind::Output },
        ];
        let ops = vec![
            OperationNode { id: OpId(0), kind: OpKind::Exp, inputs: vec![VarId(1)], output: VarId(2) },
            OperationNode { id: OpId(1), kind: OpKind::Sin, inputs: vec![VarId(0)], output: VarId(1) },
        ];
        let g = Graph::from_parts(vars, ops, vec![], vec![]);
        assert_eq!(topo_sort(&g).unwrap(), vec![OpId(1), OpId(0)]);
    }

    fn two_op_cycle() -> Graph {
        let vars = vec![
            VariableNode { id: VarId(0), name: "a".into(), kind: VarKind::Intermediate },
            VariableNode { id: VarId(1), name: "b".into(), kind: VarKind::Intermediate },
        ];
        let ops = vec![
            OperationNode { id: OpId(0), kind: OpKind::Sin, inputs: vec![VarId(1)], output: VarId(0) },
            OperationNode { id: OpId(1), kind: OpKind::Cos, inputs: vec![VarId(0)], output: VarId(1) },
        ];
        Graph::from_parts(vars, ops, vec![], vec![])
    }

    #[test]
    fn cycle_is_reported() {
        let err = topo_sort(&two_op_cycle()).unwrap_err();
        assert!(err.op == OpId(0) || err.op == OpId(1));
    }

    #[test]
    fn cycle_error_names_op_on_cycle_not_downstream() {
        // op2 hangs off the cycle but is not part of it.
        let mut g = two_op_cycle();
        let mut vars = g.variables().to_vec();
        let mut ops = g.operations().to_vec();
        vars.push(VariableNode { id: VarId(2), name: "c".into(), kind: VarKind::Output });
        ops.insert(0, OperationNode { id: OpId(0), kind: OpKind::Exp, inputs: vec![VarId(0)], output: VarId(2) });
        for (i, op) in ops.iter_mut().enumerate() {
            op.id = OpId(i);
        }
        g = Graph::from_parts(vars, ops, vec![], vec![]);
        let err = topo_sort(&g).unwrap_err();
        assert_ne!(err.op, OpId(0));
    }

    /// Random DAG: op i consumes inputs chosen from sources and outputs of ops < i,
    /// then op ids are permuted so insertion order is not topological.
    fn random_dag(n_ops: usize, picks: &[usize], perm_seed: u64) -> Graph {
        let mut b = GraphBuilder::new();
        let u = b.uncertain_input("u", Distribution::normal(0.0, 1.0).unwrap());
        let c = b.constant("c", 2.0);
        let mut avail = vec![u, c];
        for i in 0..n_ops {
            let x = avail[picks[2 * i] % avail.len()];
            let y = avail[picks[2 * i + 1] % avail.len()];
            let out = b.binary(OpKind::Add, x, y, format!("t{i}"));
            avail.push(out);
        }
        let g = b.finish();
        let mut perm: Vec<usize> = (0..n_ops).collect();
        let mut s = perm_seed;
        for i in (1..n_ops).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let mut ops = vec![None; n_ops];
        for (old, op) in g.operations().iter().enumerate() {
            let mut op = op.clone();
            op.id = OpId(perm[old]);
            ops[perm[old]] = Some(op);
        }
        Graph::from_parts(
            g.variables().to_vec(),
            ops.into_iter().map(Option::unwrap).collect(),
            g.uncertain_inputs().to_vec(),
            vec![],
        )
    }

    proptest! {
        #[test]
        fn order_respects_edges(n in 1usize..40, picks in prop::collection::vec(0usize..1000, 80), seed in any::<u64>()) {
            let g = random_dag(n, &picks, seed);
            let order = topo_sort(&g).unwrap();
            prop_assert_eq!(order.len(), g.operations().len());
            let mut pos = vec![0; order.len()];
            for (i, id) in order.iter().enumerate() {
                pos[id.0] = i;
            }
            let producers = g.producers();
            for op in g.operations() {
                for v in &op.inputs {
                    if let Some(p) = producers[v.0] {
                        prop_assert!(pos[p.0] < pos[op.id.0]);
                    }
                }
            }
            prop_assert_eq!(topo_sort(&g.clone()).unwrap(), order);
            prop_assert!(crate::graph::validate(&g).is_ok());
        }
    }
}
