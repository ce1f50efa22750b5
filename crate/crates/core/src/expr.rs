//! Scalar expressions in one variable `x`.
//!
//! Grammar:
//!
//! ```text
//! expr   := term (("+"|"-") term)*
//! term   := factor (("*"|"/") factor)*
//! factor := ("-")? power
//! power  := atom ("^" factor)?
//! atom   := number | "x" | ident "(" expr ")" | "(" expr ")"
//! ```
//!
//! `Display` prints a fully parenthesized form that re-parses to the same tree.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sqrt,
    Sin,
    Cos,
    Exp,
    Log,
    Abs,
    Asin,
    Acos,
}

impl Func {
    const ALL: [Func; 8] = [
        Func::Sqrt,
        Func::Sin,
        Func::Cos,
        Func::Exp,
        Func::Log,
        Func::Abs,
        Func::Asin,
        Func::Acos,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sqrt => "sqrt",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Abs => "abs",
            Func::Asin => "asin",
            Func::Acos => "acos",
        }
    }

    fn lookup(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }

    fn apply(self, v: f64) -> Option<f64> {
        match self {
            Func::Sqrt if v < 0.0 => None,
            Func::Log if v <= 0.0 => None,
            Func::Asin | Func::Acos if !(-1.0..=1.0).contains(&v) => None,
            Func::Sqrt => Some(v.sqrt()),
            Func::Sin => Some(v.sin()),
            Func::Cos => Some(v.cos()),
            Func::Exp => Some(v.exp()),
            Func::Log => Some(v.ln()),
            Func::Abs => Some(v.abs()),
            Func::Asin => Some(v.asin()),
            Func::Acos => Some(v.acos()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Num(f64),
    X,
    Neg(Box<Node>),
    Binary(BinOp, Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

impl Node {
    fn eval(&self, x: f64) -> Result<f64> {
        let domain = |node: &Node| Error::Domain {
            expr: node.to_string(),
            x,
        };
        match self {
            Node::Num(v) => Ok(*v),
            Node::X => Ok(x),
            Node::Neg(a) => Ok(-a.eval(x)?),
            Node::Call(f, a) => f.apply(a.eval(x)?).ok_or_else(|| domain(self)),
            Node::Binary(op, l, r) => {
                let (l, r) = (l.eval(x)?, r.eval(x)?);
                let v = match op {
                    BinOp::Add => l + r,
                    BinOp::Sub => l - r,
                    BinOp::Mul => l * r,
                    BinOp::Div if r == 0.0 => return Err(domain(self)),
                    BinOp::Div => l / r,
                    BinOp::Pow => l.powf(r),
                };
                if v.is_nan() {
                    Err(domain(self))
                } else {
                    Ok(v)
                }
            }
        }
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Num(v) => write!(f, "{v:?}"),
            Node::X => f.write_str("x"),
            Node::Neg(a) => write!(f, "(-{a})"),
            Node::Call(func, a) => write!(f, "{}({a})", func.name()),
            Node::Binary(op, l, r) => {
                let sym = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                    BinOp::Pow => "^",
                };
                write!(f, "({l} {sym} {r})")
            }
        }
    }
}

/// A parsed expression together with its source text.
#[derive(Debug, Clone, PartialEq)]
pub struct Expression {
    pub root: Node,
    pub source: String,
}

impl Expression {
    pub fn eval(&self, x: f64) -> Result<f64> {
        self.root.eval(x)
    }

    pub fn constant(v: f64) -> Self {
        Expression {
            root: Node::Num(v),
            source: format!("{v:?}"),
        }
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.root.fmt(f)
    }
}

impl std::str::FromStr for Expression {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse(s)
    }
}

pub fn parse(text: &str) -> Result<Expression> {
    let tokens = tokenize(text)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        end: text.len(),
    };
    if p.tokens.is_empty() {
        return Err(Error::Syntax {
            position: 0,
            expected: "expression".into(),
        });
    }
    let root = p.expr()?;
    if let Some(t) = p.peek() {
        return Err(Error::Syntax {
            position: t.pos,
            expected: "operator or end of input".into(),
        });
    }
    Ok(Expression {
        root,
        source: text.to_string(),
    })
}

pub fn eval(e: &Expression, x: f64) -> Result<f64> {
    e.eval(x)
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    pos: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut k = i + 1;
                if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                    k += 1;
                }
                if k < bytes.len() && bytes[k].is_ascii_digit() {
                    while k < bytes.len() && bytes[k].is_ascii_digit() {
                        k += 1;
                    }
                    i = k;
                }
            }
            let lit = &text[start..i];
            let v: f64 = lit.parse().map_err(|_| Error::Syntax {
                position: start,
                expected: "number".into(),
            })?;
            if !v.is_finite() {
                return Err(Error::Syntax {
                    position: start,
                    expected: "finite number".into(),
                });
            }
            out.push(Token {
                tok: Tok::Num(v),
                pos: start,
            });
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(text[start..i].to_string()),
                pos: start,
            });
        } else if "+-*/^()".contains(c) {
            out.push(Token {
                tok: Tok::Sym(c),
                pos: i,
            });
            i += 1;
        } else {
            return Err(Error::Syntax {
                position: i,
                expected: "number, identifier, operator or parenthesis".into(),
            });
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn here(&self) -> usize {
        self.peek().map_or(self.end, |t| t.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if matches!(self.peek(), Some(Token { tok: Tok::Sym(s), .. }) if *s == c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(Error::Syntax {
                position: self.here(),
                expected: format!("`{c}`"),
            })
        }
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        loop {
            let op = if self.eat('+') {
                BinOp::Add
            } else if self.eat('-') {
                BinOp::Sub
            } else {
                return Ok(lhs);
            };
            let rhs = self.term()?;
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.factor()?;
        loop {
            let op = if self.eat('*') {
                BinOp::Mul
            } else if self.eat('/') {
                BinOp::Div
            } else {
                return Ok(lhs);
            };
            let rhs = self.factor()?;
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn factor(&mut self) -> Result<Node> {
        if self.eat('-') {
            Ok(Node::Neg(Box::new(self.power()?)))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.atom()?;
        if self.eat('^') {
            let exp = self.factor()?;
            Ok(Node::Binary(BinOp::Pow, Box::new(base), Box::new(exp)))
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Node> {
        let position = self.here();
        let Some(token) = self.peek().cloned() else {
            return Err(Error::Syntax {
                position,
                expected: "number, `x`, function or `(`".into(),
            });
        };
        match token.tok {
            Tok::Num(v) => {
                self.pos += 1;
                Ok(Node::Num(v))
            }
            Tok::Ident(name) => {
                self.pos += 1;
                if name == "x" {
                    return Ok(Node::X);
                }
                let Some(func) = Func::lookup(&name) else {
                    return Err(Error::UnknownIdentifier {
                        name,
                        position: token.pos,
                    });
                };
                self.expect('(')?;
                let arg = self.expr()?;
                self.expect(')')?;
                Ok(Node::Call(func, Box::new(arg)))
            }
            Tok::Sym('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(')')?;
                Ok(inner)
            }
            Tok::Sym(_) => Err(Error::Syntax {
                position,
                expected: "number, `x`, function or `(`".into(),
            }),
        }
    }
}
