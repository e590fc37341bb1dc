//! Recursive-descent parser.
//!
//! ```text
//! or     := and ( "||" and )*
//! and    := until ( "&&" until )*
//! until  := unary ( "U" interval unary )*
//! unary  := "!" unary | ("F" | "G") weight? interval unary | primary
//! primary:= "(" or ")" | "true" | "false" | leaf | ("&&" | "||") weight "(" or ("," or)+ ")"
//! leaf   := ident ( (">" | ">=" | "<" | "<=") number )?
//! weight := "^" ident
//! ```

use super::ast::{flatten_children, Cmp, Formula, FormulaKind, Interval, Logic, Predicate, Span};
use super::error::SyntaxError;
use super::lexer::{tokenize, Tok, Token};
use crate::weights::WeightTable;

pub fn parse_stl(text: &str) -> Result<Formula, SyntaxError> {
    parse(text, Logic::Stl, None)
}

pub fn parse_mtl(text: &str) -> Result<Formula, SyntaxError> {
    parse(text, Logic::Mtl, None)
}

/// Parses weighted STL and checks every weight reference against `weights`.
pub fn parse_wstl(text: &str, weights: &WeightTable) -> Result<Formula, SyntaxError> {
    parse(text, Logic::Wstl, Some(weights))
}

/// Parses `text` under `logic`. For weighted STL, weight references are validated when a table
/// is supplied.
pub fn parse(text: &str, logic: Logic, weights: Option<&WeightTable>) -> Result<Formula, SyntaxError> {
    let tokens = tokenize(text, logic)?;
    let mut p = Parser { tokens, pos: 0, logic, len: text.len() };
    let f = p.or_expr()?;
    if let Some(t) = p.peek() {
        return Err(SyntaxError::Parse {
            span: t.span,
            message: format!("unexpected {}", t.tok.describe()),
            expected: vec!["`&&`".into(), "`||`".into(), "`U`".into(), "end of input".into()],
        });
    }
    if let Some(table) = weights {
        validate_weights(&f, table)?;
    }
    Ok(f)
}

/// Checks that every weight tag exists and has the length its operator requires.
pub fn validate_weights(f: &Formula, table: &WeightTable) -> Result<(), SyntaxError> {
    for node in f.nodes() {
        let Some(name) = node.weight() else { continue };
        let expected = match &node.kind {
            FormulaKind::And { children, .. } | FormulaKind::Or { children, .. } => children.len(),
            FormulaKind::Always { interval, .. } | FormulaKind::Eventually { interval, .. } => interval.width(),
            _ => continue,
        };
        let Some(w) = table.get(name) else {
            return Err(SyntaxError::UnknownWeight { name: name.to_string(), span: node.span });
        };
        if w.len() != expected {
            return Err(SyntaxError::WeightArityMismatch {
                name: name.to_string(),
                expected,
                got: w.len(),
                span: node.span,
            });
        }
    }
    Ok(())
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    logic: Logic,
    len: usize,
}

const PRIMARY_START: [&str; 7] = ["`(`", "`!`", "`F`", "`G`", "identifier", "`true`", "`false`"];

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_tok(&self) -> Option<&Tok> {
        self.peek().map(|t| &t.tok)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn eof_span(&self) -> Span {
        Span::new(self.len, self.len)
    }

    fn error_here(&self, expected: &[&str]) -> SyntaxError {
        let expected = expected.iter().map(|s| s.to_string()).collect();
        match self.peek() {
            Some(t) => {
                SyntaxError::Parse { span: t.span, message: format!("unexpected {}", t.tok.describe()), expected }
            }
            None => SyntaxError::Parse { span: self.eof_span(), message: "unexpected end of input".into(), expected },
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<Token, SyntaxError> {
        if self.peek_tok() == Some(&tok) {
            Ok(self.bump().unwrap())
        } else {
            Err(self.error_here(&[&tok.describe()]))
        }
    }

    fn or_expr(&mut self) -> Result<Formula, SyntaxError> {
        self.chain(false)
    }

    fn and_expr(&mut self) -> Result<Formula, SyntaxError> {
        self.chain(true)
    }

    /// Infix n-ary chain of `&&` (`conj`) or `||`.
    fn chain(&mut self, conj: bool) -> Result<Formula, SyntaxError> {
        let op = if conj { Tok::And } else { Tok::Or };
        let operand = |p: &mut Self| if conj { p.until_expr() } else { p.and_expr() };
        let first = operand(self)?;
        if self.peek_tok() != Some(&op) || self.is_call_form() {
            return Ok(first);
        }
        let mut children = vec![first];
        while self.peek_tok() == Some(&op) && !self.is_call_form() {
            self.bump();
            children.push(operand(self)?);
        }
        let span = children.first().unwrap().span.join(children.last().unwrap().span);
        let children = flatten_children(children, conj);
        let kind =
            if conj { FormulaKind::And { children, weight: None } } else { FormulaKind::Or { children, weight: None } };
        Ok(Formula::with_span(kind, span))
    }

    /// `&&^` / `||^` opens a weighted call rather than continuing an infix chain.
    fn is_call_form(&self) -> bool {
        matches!(self.tokens.get(self.pos + 1), Some(Token { tok: Tok::Caret, .. }))
    }

    fn until_expr(&mut self) -> Result<Formula, SyntaxError> {
        let mut left = self.unary()?;
        while self.peek_tok() == Some(&Tok::Until) {
            let op = self.bump().unwrap();
            let interval = self.interval(op.span)?;
            let right = self.unary()?;
            let span = left.span.join(right.span);
            left =
                Formula::with_span(FormulaKind::Until { interval, left: Box::new(left), right: Box::new(right) }, span);
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Formula, SyntaxError> {
        match self.peek_tok() {
            Some(Tok::Not) => {
                let op = self.bump().unwrap();
                let child = self.unary()?;
                let span = op.span.join(child.span);
                Ok(Formula::with_span(FormulaKind::Not(Box::new(child)), span))
            }
            Some(Tok::Eventually) | Some(Tok::Always) => {
                let op = self.bump().unwrap();
                let weight = self.weight_tag()?;
                let interval = self.interval(op.span)?;
                let child = Box::new(self.unary()?);
                let span = op.span.join(child.span);
                let kind = if op.tok == Tok::Always {
                    FormulaKind::Always { interval, child, weight }
                } else {
                    FormulaKind::Eventually { interval, child, weight }
                };
                Ok(Formula::with_span(kind, span))
            }
            _ => self.primary(),
        }
    }

    fn weight_tag(&mut self) -> Result<Option<String>, SyntaxError> {
        if self.peek_tok() != Some(&Tok::Caret) {
            return Ok(None);
        }
        self.bump();
        match self.bump() {
            Some(Token { tok: Tok::Ident(name), .. }) => Ok(Some(name)),
            _ => {
                self.pos -= 1;
                Err(self.error_here(&["weight name"]))
            }
        }
    }

    fn interval(&mut self, op_span: Span) -> Result<Interval, SyntaxError> {
        if self.peek_tok() != Some(&Tok::LBracket) {
            let span = match self.peek() {
                Some(t) => op_span.join(t.span),
                None => op_span,
            };
            return Err(SyntaxError::MissingInterval { span });
        }
        let open = self.bump().unwrap();
        let a = self.bound()?;
        self.expect(Tok::Comma)?;
        let b = self.bound()?;
        let close = self.expect(Tok::RBracket)?;
        if a > b {
            return Err(SyntaxError::Parse {
                span: open.span.join(close.span),
                message: format!("interval [{a},{b}] has start after end"),
                expected: Vec::new(),
            });
        }
        Ok(Interval::new(a, b))
    }

    fn bound(&mut self) -> Result<u32, SyntaxError> {
        match self.peek().cloned() {
            Some(Token { tok: Tok::Number { integer: Some(v), .. }, span }) => {
                self.bump();
                u32::try_from(v).map_err(|_| SyntaxError::Parse {
                    span,
                    message: "interval bound is too large".into(),
                    expected: Vec::new(),
                })
            }
            Some(Token { tok: Tok::Number { .. }, span }) => Err(SyntaxError::Parse {
                span,
                message: "interval bounds must be nonnegative integers".into(),
                expected: vec!["integer".into()],
            }),
            _ => Err(self.error_here(&["integer"])),
        }
    }

    fn primary(&mut self) -> Result<Formula, SyntaxError> {
        let Some(tok) = self.peek().cloned() else {
            return Err(self.error_here(&PRIMARY_START));
        };
        match tok.tok {
            Tok::LParen => {
                self.bump();
                let inner = self.or_expr()?;
                let close = self.expect(Tok::RParen)?;
                // Parentheses widen the node's span but leave the tree untouched.
                Ok(Formula::with_span(inner.kind, tok.span.join(close.span)))
            }
            Tok::True | Tok::False => {
                self.bump();
                Ok(Formula::with_span(FormulaKind::Const(tok.tok == Tok::True), tok.span))
            }
            Tok::And | Tok::Or if self.is_call_form() => self.call_form(),
            Tok::Ident(name) => {
                self.bump();
                self.leaf(name, tok.span)
            }
            _ => Err(self.error_here(&PRIMARY_START)),
        }
    }

    fn call_form(&mut self) -> Result<Formula, SyntaxError> {
        let op = self.bump().unwrap();
        let weight = self.weight_tag()?;
        self.expect(Tok::LParen)?;
        let mut children = vec![self.or_expr()?];
        while self.peek_tok() == Some(&Tok::Comma) {
            self.bump();
            children.push(self.or_expr()?);
        }
        let close = self.expect(Tok::RParen)?;
        let span = op.span.join(close.span);
        if children.len() < 2 {
            return Err(SyntaxError::Parse {
                span,
                message: "weighted operator needs at least two operands".into(),
                expected: vec!["`,`".into()],
            });
        }
        let kind = if op.tok == Tok::And {
            FormulaKind::And { children, weight }
        } else {
            FormulaKind::Or { children, weight }
        };
        Ok(Formula::with_span(kind, span))
    }

    fn leaf(&mut self, name: String, span: Span) -> Result<Formula, SyntaxError> {
        let cmp = match self.peek_tok() {
            Some(Tok::Gt | Tok::Ge) => Some(Cmp::Ge),
            Some(Tok::Lt | Tok::Le) => Some(Cmp::Le),
            Some(Tok::Equal) => {
                let t = self.peek().unwrap();
                return Err(SyntaxError::Parse {
                    span: span.join(t.span),
                    message: "equality predicates are not supported".into(),
                    expected: vec!["`>`".into(), "`>=`".into(), "`<`".into(), "`<=`".into()],
                });
            }
            _ => None,
        };
        match (self.logic, cmp) {
            (Logic::Mtl, None) => {
                Ok(Formula::with_span(FormulaKind::Pred(Predicate::Atom { name, negated: false }), span))
            }
            (Logic::Mtl, Some(_)) => {
                let t = self.peek().unwrap();
                Err(SyntaxError::Parse {
                    span: span.join(t.span),
                    message: "linear predicates not allowed in MTL".into(),
                    expected: Vec::new(),
                })
            }
            (_, None) => Err(SyntaxError::Parse {
                span,
                message: format!("atomic proposition `{name}` not allowed in {}", self.logic),
                expected: vec!["comparison".into()],
            }),
            (_, Some(cmp)) => {
                self.bump();
                match self.peek().cloned() {
                    Some(Token { tok: Tok::Number { value, .. }, span: num }) => {
                        self.bump();
                        let span = span.join(num);
                        if !value.is_finite() {
                            return Err(SyntaxError::Parse {
                                span,
                                message: "threshold must be finite".into(),
                                expected: Vec::new(),
                            });
                        }
                        Ok(Formula::with_span(
                            FormulaKind::Pred(Predicate::Linear { signal: name, cmp, threshold: value }),
                            span,
                        ))
                    }
                    _ => Err(self.error_here(&["number"])),
                }
            }
        }
    }
}
