//! Recursive-descent parser producing a statement list.

use super::lexer::{tokenize, Pos, Tok, Token};
use super::DslError;

pub const FUNCTIONS: [&str; 6] = ["sin", "cos", "tan", "exp", "log", "sqrt"];
const KEYWORDS: [&str; 6] = ["input", "param", "output", "pi", "Normal", "Uniform"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Pi,
    Var(String, Pos),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(String, Box<Expr>),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DistSpec {
    Normal(f64, f64),
    Uniform(f64, f64),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Stmt {
    Input { name: String, dist: DistSpec, pos: Pos },
    Param { name: String, value: f64, pos: Pos },
    Assign { name: String, expr: Expr, pos: Pos },
    Output { name: String, expr: Expr, pos: Pos },
}

impl Stmt {
    pub fn name(&self) -> &str {
        match self {
            Stmt::Input { name, .. }
            | Stmt::Param { name, .. }
            | Stmt::Assign { name, .. }
            | Stmt::Output { name, .. } => name,
        }
    }
}

struct Parser {
    toks: Vec<Token>,
    at: usize,
}

pub fn parse_program(src: &str) -> Result<Vec<Stmt>, DslError> {
    let mut p = Parser {
        toks: tokenize(src)?,
        at: 0,
    };
    p.program()
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].tok
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].pos
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> DslError {
        let pos = self.pos();
        DslError::Parse {
            line: pos.line,
            col: pos.col,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().describe(),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), DslError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&[what]))
        }
    }

    fn program(&mut self) -> Result<Vec<Stmt>, DslError> {
        let mut stmts = Vec::new();
        loop {
            while *self.peek() == Tok::Newline {
                self.bump();
            }
            if *self.peek() == Tok::Eof {
                break;
            }
            stmts.push(self.stmt()?);
            match self.peek() {
                Tok::Newline | Tok::Eof => {}
                _ => return Err(self.error(&["end of line", "operator"])),
            }
        }
        if stmts.is_empty() {
            return Err(self.error(&["statement"]));
        }
        Ok(stmts)
    }

    fn ident(&mut self) -> Result<(String, Pos), DslError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Ident(name)
                if !KEYWORDS.contains(&name.as_str()) && !FUNCTIONS.contains(&name.as_str()) =>
            {
                self.bump();
                Ok((name, pos))
            }
            _ => Err(self.error(&["identifier"])),
        }
    }

    fn signed_real(&mut self) -> Result<f64, DslError> {
        let negative = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        match *self.peek() {
            Tok::Number(v) => {
                self.bump();
                Ok(if negative { -v } else { v })
            }
            _ => Err(self.error(&["number"])),
        }
    }

    fn stmt(&mut self) -> Result<Stmt, DslError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Ident(kw) if kw == "input" => {
                self.bump();
                let (name, _) = self.ident()?;
                self.expect(Tok::Tilde, "`~`")?;
                let family = match self.peek().clone() {
                    Tok::Ident(f) if f == "Normal" || f == "Uniform" => {
                        self.bump();
                        f
                    }
                    _ => return Err(self.error(&["`Normal`", "`Uniform`"])),
                };
                self.expect(Tok::LParen, "`(`")?;
                let a = self.signed_real()?;
                self.expect(Tok::Comma, "`,`")?;
                let b = self.signed_real()?;
                self.expect(Tok::RParen, "`)`")?;
                let dist = if family == "Normal" {
                    DistSpec::Normal(a, b)
                } else {
                    DistSpec::Uniform(a, b)
                };
                Ok(Stmt::Input { name, dist, pos })
            }
            Tok::Ident(kw) if kw == "param" => {
                self.bump();
                let (name, _) = self.ident()?;
                self.expect(Tok::Eq, "`=`")?;
                let value = self.signed_real()?;
                Ok(Stmt::Param { name, value, pos })
            }
            Tok::Ident(kw) if kw == "output" => {
                self.bump();
                let (name, _) = self.ident()?;
                self.expect(Tok::Eq, "`=`")?;
                let expr = self.expr()?;
                Ok(Stmt::Output { name, expr, pos })
            }
            Tok::Ident(_) => {
                let (name, _) = self
                    .ident()
                    .map_err(|_| self.error(&["`input`", "`param`", "`output`", "identifier"]))?;
                self.expect(Tok::Eq, "`=`")?;
                let expr = self.expr()?;
                Ok(Stmt::Assign { name, expr, pos })
            }
            _ => Err(self.error(&["`input`", "`param`", "`output`", "identifier"])),
        }
    }

    fn expr(&mut self) -> Result<Expr, DslError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, DslError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr, DslError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    /// `^` binds tighter than unary minus on its left and is right-associative.
    fn power(&mut self) -> Result<Expr, DslError> {
        let base = self.primary()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let exponent = self.unary()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, DslError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Number(v) => {
                self.bump();
                Ok(Expr::Num(v))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(name) if name == "pi" => {
                self.bump();
                Ok(Expr::Pi)
            }
            Tok::Ident(name) if FUNCTIONS.contains(&name.as_str()) => {
                self.bump();
                self.expect(Tok::LParen, "`(`")?;
                let arg = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(Expr::Call(name, Box::new(arg)))
            }
            Tok::Ident(name) if !KEYWORDS.contains(&name.as_str()) => {
                self.bump();
                Ok(Expr::Var(name, pos))
            }
            _ => Err(self.error(&["number", "identifier", "function call", "`(`", "`-`"])),
        }
    }
}
