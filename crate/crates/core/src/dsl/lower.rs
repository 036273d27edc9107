use std::collections::{HashMap, HashSet};
use std::f64::consts::PI;

use super::parser::{parse_program, BinOp, DistSpec, Expr, Stmt};
use super::DslError;
use crate::distribution::Distribution;
use crate::graph::{Graph, GraphBuilder, OpKind, VarId, VarKind};

/// Parses model text and lowers it to the graph IR.
pub fn parse_model(src: &str) -> Result<Graph, DslError> {
    let stmts = parse_program(src)?;
    Lowering::new(&stmts).run(&stmts)
}

struct Lowering {
    builder: GraphBuilder,
    scope: HashMap<String, VarId>,
    reserved: HashSet<String>,
    next_temp: usize,
}

impl Lowering {
    fn new(stmts: &[Stmt]) -> Self {
        Self {
            builder: GraphBuilder::new(),
            scope: HashMap::new(),
            reserved: stmts.iter().map(|s| s.name().to_string()).collect(),
            next_temp: 0,
        }
    }

    fn temp(&mut self) -> String {
        loop {
            let name = format!("_t{}", self.next_temp);
            self.next_temp += 1;
            if !self.reserved.contains(&name) {
                return name;
            }
        }
    }

    fn run(mut self, stmts: &[Stmt]) -> Result<Graph, DslError> {
        for stmt in stmts {
            let (name, pos) = match stmt {
                Stmt::Input { name, pos, .. }
                | Stmt::Param { name, pos, .. }
                | Stmt::Assign { name, pos, .. }
                | Stmt::Output { name, pos, .. } => (name, *pos),
            };
            if self.scope.contains_key(name) {
                return Err(DslError::DuplicateName {
                    name: name.clone(),
                    line: pos.line,
                    col: pos.col,
                });
            }
            let var = match stmt {
                Stmt::Input { dist, .. } => {
                    let d = match *dist {
                        DistSpec::Normal(m, s) => Distribution::normal(m, s),
                        DistSpec::Uniform(a, b) => Distribution::uniform(a, b),
                    }
                    .map_err(|e| DslError::InvalidDistribution {
                        line: pos.line,
                        col: pos.col,
                        reason: e.to_string(),
                    })?;
                    self.builder.uncertain_input(name.clone(), d)
                }
                Stmt::Param { value, .. } => self.builder.constant(name.clone(), *value),
                Stmt::Assign { expr, .. } => {
                    let first_var = self.builder.var_count();
                    let v = self.lower(expr)?;
                    if self.is_fresh(v, first_var) {
                        self.builder.rename(v, name.clone());
                    }
                    v
                }
                Stmt::Output { expr, .. } => {
                    let first_var = self.builder.var_count();
                    let v = self.lower(expr)?;
                    if self.is_fresh(v, first_var) {
                        self.builder.output(name.clone(), v);
                    } else {
                        self.builder.bind_output(name.clone(), v);
                    }
                    v
                }
            };
            self.scope.insert(name.clone(), var);
        }
        Ok(self.builder.finish())
    }

    /// The statement's own top operation produced `v`, so the statement may name it.
    fn is_fresh(&self, v: VarId, first_var: usize) -> bool {
        v.0 >= first_var && self.builder.variable(v).kind == VarKind::Intermediate
    }

    fn lower(&mut self, e: &Expr) -> Result<VarId, DslError> {
        Ok(match e {
            Expr::Num(v) => {
                let name = self.temp();
                self.builder.constant(name, *v)
            }
            Expr::Pi => {
                let name = self.temp();
                self.builder.constant(name, PI)
            }
            Expr::Var(name, pos) => *self.scope.get(name).ok_or_else(|| DslError::UndefinedName {
                name: name.clone(),
                line: pos.line,
                col: pos.col,
            })?,
            Expr::Neg(a) => {
                let a = self.lower(a)?;
                let name = self.temp();
                self.builder.unary(OpKind::Neg, a, name)
            }
            Expr::Bin(op, a, b) => {
                let a = self.lower(a)?;
                let b = self.lower(b)?;
                let kind = match op {
                    BinOp::Add => OpKind::Add,
                    BinOp::Sub => OpKind::Sub,
                    BinOp::Mul => OpKind::Mul,
                    BinOp::Div => OpKind::Div,
                };
                let name = self.temp();
                self.builder.binary(kind, a, b, name)
            }
            Expr::Pow(base, exponent) => match literal_exponent(exponent) {
                Some(p) => {
                    let a = self.lower(base)?;
                    let name = self.temp();
                    self.builder.unary(OpKind::PowConst(p), a, name)
                }
                None => {
                    // a ^ b = exp(b * log(a))
                    let a = self.lower(base)?;
                    let b = self.lower(exponent)?;
                    let n = self.temp();
                    let log_a = self.builder.unary(OpKind::Log, a, n);
                    let n = self.temp();
                    let prod = self.builder.binary(OpKind::Mul, b, log_a, n);
                    let n = self.temp();
                    self.builder.unary(OpKind::Exp, prod, n)
                }
            },
            Expr::Call(func, arg) => {
                let a = self.lower(arg)?;
                let kind = match func.as_str() {
                    "sin" => OpKind::Sin,
                    "cos" => OpKind::Cos,
                    "tan" => OpKind::Tan,
                    "exp" => OpKind::Exp,
                    "log" => OpKind::Log,
                    "sqrt" => OpKind::Sqrt,
                    other => unreachable!("parser admitted unknown function {other}"),
                };
                let name = self.temp();
                self.builder.unary(kind, a, name)
            }
        })
    }
}

fn literal_exponent(e: &Expr) -> Option<f64> {
    match e {
        Expr::Num(v) => Some(*v),
        Expr::Neg(inner) => match **inner {
            Expr::Num(v) => Some(-v),
            _ => None,
        },
        _ => None,
    }
}
