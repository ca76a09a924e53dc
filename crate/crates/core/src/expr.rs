//! A small expression language: rational literals, named variables,
//! `+ - * / ^`, parentheses and `sqrt`.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::scalar::{parse_rational, Scalar, ScalarError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("unexpected character `{ch}` at offset {pos} in `{src}`")]
    UnexpectedChar { src: String, ch: char, pos: usize },
    #[error("unexpected end of expression `{0}`")]
    UnexpectedEnd(String),
    #[error("unexpected token `{token}` in `{src}`")]
    UnexpectedToken { src: String, token: String },
    #[error("unknown variable `{name}` (known: {known})")]
    UnknownVariable { name: String, known: String },
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
    #[error(transparent)]
    Number(#[from] ScalarError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error(transparent)]
    Arithmetic(#[from] ScalarError),
    #[error("expected {expected} arguments, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("{0}")]
    Other(String),
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Num(Scalar),
    Var(usize),
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, Box<Node>),
    Sqrt(Box<Node>),
}

impl Node {
    fn eval(&self, vars: &[Scalar]) -> Result<Scalar, EvalError> {
        Ok(match self {
            Node::Num(s) => s.clone(),
            Node::Var(i) => vars.get(*i).cloned().ok_or(EvalError::Arity {
                expected: i + 1,
                got: vars.len(),
            })?,
            Node::Neg(a) => -a.eval(vars)?,
            Node::Add(a, b) => a.eval(vars)? + b.eval(vars)?,
            Node::Sub(a, b) => a.eval(vars)? - b.eval(vars)?,
            Node::Mul(a, b) => a.eval(vars)? * b.eval(vars)?,
            Node::Div(a, b) => a.eval(vars)?.checked_div(&b.eval(vars)?)?,
            Node::Pow(a, b) => a.eval(vars)?.pow(&b.eval(vars)?)?,
            Node::Sqrt(a) => a.eval(vars)?.sqrt()?,
        })
    }
}

/// A parsed expression together with its source text and variable names.
#[derive(Debug, Clone)]
pub struct Expression {
    src: String,
    vars: Vec<String>,
    root: Arc<Node>,
}

impl PartialEq for Expression {
    fn eq(&self, other: &Self) -> bool {
        self.vars == other.vars && self.root == other.root
    }
}

impl Expression {
    /// Parses `src`; identifiers must appear in `vars`, whose order fixes
    /// the argument order of [`Expression::eval`].
    pub fn parse<S: AsRef<str>>(src: &str, vars: &[S]) -> Result<Self, ExprError> {
        let vars: Vec<String> = vars.iter().map(|v| v.as_ref().to_string()).collect();
        let tokens = tokenize(src)?;
        let mut parser = Parser {
            src,
            tokens: &tokens,
            pos: 0,
            vars: &vars,
        };
        let root = parser.expr()?;
        if parser.pos != tokens.len() {
            return Err(ExprError::UnexpectedToken {
                src: src.to_string(),
                token: tokens[parser.pos].to_string(),
            });
        }
        Ok(Expression {
            src: src.trim().to_string(),
            vars,
            root: Arc::new(root),
        })
    }

    /// Parses a one-variable expression in `x`.
    pub fn parse_unary(src: &str) -> Result<Self, ExprError> {
        Self::parse(src, &["x"])
    }

    pub fn eval(&self, vars: &[Scalar]) -> Result<Scalar, EvalError> {
        if vars.len() < self.vars.len() {
            return Err(EvalError::Arity {
                expected: self.vars.len(),
                got: vars.len(),
            });
        }
        self.root.eval(vars)
    }

    pub fn source(&self) -> &str {
        &self.src
    }

    pub fn variables(&self) -> &[String] {
        &self.vars
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.src)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(String),
    Ident(String),
    Op(char),
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Num(s) | Token::Ident(s) => f.write_str(s),
            Token::Op(c) => write!(f, "{c}"),
        }
    }
}

fn tokenize(src: &str) -> Result<Vec<Token>, ExprError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            // exponent suffix, e.g. 1e-9
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '-' || chars[j] == '+') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            out.push(Token::Num(chars[start..i].iter().collect()));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Token::Op(c));
            i += 1;
        } else {
            return Err(ExprError::UnexpectedChar {
                src: src.to_string(),
                ch: c,
                pos: i,
            });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    src: &'a str,
    tokens: &'a [Token],
    pos: usize,
    vars: &'a [String],
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn eat_op(&mut self, op: char) -> bool {
        if self.peek() == Some(&Token::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_op(&mut self, op: char) -> Result<(), ExprError> {
        if self.eat_op(op) {
            Ok(())
        } else {
            Err(self.unexpected())
        }
    }

    fn unexpected(&self) -> ExprError {
        match self.peek() {
            Some(t) => ExprError::UnexpectedToken {
                src: self.src.to_string(),
                token: t.to_string(),
            },
            None => ExprError::UnexpectedEnd(self.src.to_string()),
        }
    }

    fn expr(&mut self) -> Result<Node, ExprError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat_op('+') {
                lhs = Node::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat_op('-') {
                lhs = Node::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Node, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat_op('*') {
                lhs = Node::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat_op('/') {
                lhs = Node::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Node, ExprError> {
        if self.eat_op('-') {
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        if self.eat_op('+') {
            return self.unary();
        }
        self.power()
    }

    // right associative, binds tighter than unary minus on its left
    fn power(&mut self) -> Result<Node, ExprError> {
        let base = self.atom()?;
        if self.eat_op('^') {
            let exp = self.unary()?;
            return Ok(Node::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node, ExprError> {
        let token = self.peek().cloned().ok_or_else(|| self.unexpected())?;
        match token {
            Token::Num(s) => {
                self.pos += 1;
                Ok(Node::Num(Scalar::Exact(parse_rational(&s)?)))
            }
            Token::Ident(name) => {
                self.pos += 1;
                if self.peek() == Some(&Token::Op('(')) {
                    self.pos += 1;
                    let arg = self.expr()?;
                    self.expect_op(')')?;
                    return match name.as_str() {
                        "sqrt" => Ok(Node::Sqrt(Box::new(arg))),
                        _ => Err(ExprError::UnknownFunction(name)),
                    };
                }
                match self.vars.iter().position(|v| *v == name) {
                    Some(i) => Ok(Node::Var(i)),
                    None => Err(ExprError::UnknownVariable {
                        name,
                        known: self.vars.join(", "),
                    }),
                }
            }
            Token::Op('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect_op(')')?;
                Ok(inner)
            }
            Token::Op(_) => Err(self.unexpected()),
        }
    }
}
