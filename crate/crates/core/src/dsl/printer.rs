use std::fmt::Write as _;

use crate::distribution::Distribution;
use crate::graph::{topo_sort, Graph, OpKind, VarId, VarKind};

/// Renders a graph as model text, one statement per operation.
///
/// Constants become `param` declarations so every literal keeps its own
/// node on re-parse. Expansion operations print as plain aliases, so printing
/// a transformed graph yields its untransformed model.
pub fn pretty_print(graph: &Graph) -> String {
    let mut s = String::new();
    for u in graph.uncertain_inputs() {
        let name = &graph.variable(u.var).name;
        let _ = match u.distribution {
            Distribution::Normal { mean, stddev } => {
                writeln!(s, "input {name} ~ Normal({mean:?}, {stddev:?})")
            }
            Distribution::Uniform { lower, upper } => {
                writeln!(s, "input {name} ~ Uniform({lower:?}, {upper:?})")
            }
        };
    }
    for v in graph.variables() {
        if let VarKind::Constant(c) = v.kind {
            let _ = writeln!(s, "param {} = {c:?}", v.name);
        }
    }

    // Expand outputs print as the variable they copy.
    let mut shown: Vec<VarId> = graph.variables().iter().map(|v| v.id).collect();
    let name_of = |shown: &[VarId], v: VarId| graph.variable(shown[v.0]).name.clone();

    let mut defined: Vec<bool> = graph.variables().iter().map(|v| v.is_source()).collect();
    let mut printed_outputs = 0;
    let outputs = graph.outputs();
    let flush = |s: &mut String, printed: &mut usize, defined: &[bool], shown: &[VarId]| {
        while let Some(o) = outputs.get(*printed) {
            let var = graph.variable(o.var);
            let is_own = var.kind == VarKind::Output && var.name == o.name;
            if is_own || !defined[o.var.0] {
                break;
            }
            let _ = writeln!(s, "output {} = {}", o.name, name_of(shown, o.var));
            *printed += 1;
        }
    };

    let order = topo_sort(graph).unwrap_or_else(|_| graph.operations().iter().map(|o| o.id).collect());
    flush(&mut s, &mut printed_outputs, &defined, &shown);
    for id in order {
        let op = graph.operation(id);
        let args: Vec<String> = op.inputs.iter().map(|&v| name_of(&shown, v)).collect();
        if let OpKind::Expand { .. } = op.kind {
            shown[op.output.0] = shown[op.inputs[0].0];
            defined[op.output.0] = true;
            continue;
        }
        let rhs = match op.kind {
            OpKind::Neg => format!("-{}", args[0]),
            OpKind::Add => format!("{} + {}", args[0], args[1]),
            OpKind::Sub => format!("{} - {}", args[0], args[1]),
            OpKind::Mul => format!("{} * {}", args[0], args[1]),
            OpKind::Div => format!("{} / {}", args[0], args[1]),
            OpKind::PowConst(p) => format!("{} ^ {p:?}", args[0]),
            OpKind::Expand { .. } => unreachable!(),
            f => format!("{}({})", f.name(), args[0]),
        };
        let out = graph.variable(op.output);
        if out.kind == VarKind::Output {
            // Emit pending aliases first so output order is preserved.
            flush(&mut s, &mut printed_outputs, &defined, &shown);
            let _ = writeln!(s, "output {} = {rhs}", out.name);
            if outputs
                .get(printed_outputs)
                .is_some_and(|o| o.var == op.output && o.name == out.name)
            {
                printed_outputs += 1;
            }
        } else {
            let _ = writeln!(s, "{} = {rhs}", out.name);
        }
        defined[op.output.0] = true;
        flush(&mut s, &mut printed_outputs, &defined, &shown);
    }
    // Anything left binds variables that are now all defined.
    while let Some(o) = outputs.get(printed_outputs) {
        let var = graph.variable(o.var);
        if !(var.kind == VarKind::Output && var.name == o.name) {
            let _ = writeln!(s, "output {} = {}", o.name, name_of(&shown, o.var));
        }
        printed_outputs += 1;
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{builtin_model, parse_model};
    use crate::graph::is_isomorphic;
    use proptest::prelude::*;

    fn round_trip(src: &str) {
        let g = parse_model(src).unwrap();
        let text = pretty_print(&g);
        let back = parse_model(&text).unwrap_or_else(|e| panic!("{e}\n{text}"));
        assert!(is_isomorphic(&g, &back), "not isomorphic:\n{src}\n---\n{text}");
        assert_eq!(pretty_print(&back), text);
    }

    #[test]
    fn simple_round_trip() {
        round_trip("input u1 ~ Normal(0,1)\ninput u2 ~ Normal(0,1)\noutput f = cos(u1) + exp(-u2)");
    }

    #[test]
    fn builtins_round_trip() {
        for name in ["simple", "piston", "multipoint"] {
            let g = builtin_model(name).unwrap();
            let back = parse_model(&pretty_print(&g)).unwrap();
            assert!(is_isomorphic(&g, &back), "{name}");
        }
    }

    #[test]
    fn declarations_only() {
        let g = parse_model("input x ~ Uniform(-1, 1)\nparam c = 2").unwrap();
        let text = pretty_print(&g);
        assert_eq!(text, "input x ~ Uniform(-1.0, 1.0)\nparam c = 2.0\n");
    }

    #[test]
    fn aliases_and_output_order() {
        round_trip("input x ~ Normal(0,1)\noutput a = x\ny = sin(x)\noutput b = y * 2\noutput c = y\noutput d = -3 ^ -2");
    }

    #[test]
    fn transformed_graph_prints_original_model() {
        let g = builtin_model("simple").unwrap();
        let tg = crate::amtc::transform(&g).unwrap();
        let back = parse_model(&pretty_print(&tg.graph)).unwrap();
        assert!(is_isomorphic(&g, &back));
    }

    /// Random expression source over two inputs.
    fn expr_strategy() -> impl Strategy<Value = String> {
        let leaf = prop_oneof![
            Just("u1".to_string()),
            Just("u2".to_string()),
            Just("pi".to_string()),
            (0u32..100).prop_map(|n| format!("{}.5", n)),
        ];
        leaf.prop_recursive(4, 24, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone(), 0usize..4).prop_map(|(a, b, o)| {
                    let op = ["+", "-", "*", "/"][o];
                    format!("({a} {op} {b})")
                }),
                (inner.clone(), 0usize..6).prop_map(|(a, f)| {
                    let func = ["sin", "cos", "tan", "exp", "log", "sqrt"][f];
                    format!("{func}({a})")
                }),
                inner.clone().prop_map(|a| format!("-{a}")),
                (inner.clone(), -3i32..4).prop_map(|(a, p)| format!("{a} ^ {p}")),
                (inner.clone(), inner).prop_map(|(a, b)| format!("{a} ^ {b}")),
            ]
        })
    }

    proptest! {
        #[test]
        fn parse_print_parse_is_stable(e1 in expr_strategy(), e2 in expr_strategy()) {
            let src = format!("input u1 ~ Normal(0, 1)\ninput u2 ~ Uniform(-1, 2)\nparam k = 3\nt = {e1}\noutput f = t * k + {e2}\noutput g = t\n");
            let g = parse_model(&src).unwrap();
            let text = pretty_print(&g);
            let back = parse_model(&text).unwrap();
            prop_assert!(is_isomorphic(&g, &back));
            prop_assert_eq!(pretty_print(&back), text);
        }
    }
}
