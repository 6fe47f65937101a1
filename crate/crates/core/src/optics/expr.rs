//! Arithmetic expressions for phase parameters: numbers, `pi`, `phi`,
//! `+ - * /`, unary minus and parentheses.

use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Pi,
    Phi,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn eval(&self, phi: f64) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::Pi => PI,
            Expr::Phi => phi,
            Expr::Neg(e) => -e.eval(phi),
            Expr::Add(a, b) => a.eval(phi) + b.eval(phi),
            Expr::Sub(a, b) => a.eval(phi) - b.eval(phi),
            Expr::Mul(a, b) => a.eval(phi) * b.eval(phi),
            Expr::Div(a, b) => a.eval(phi) / b.eval(phi),
        }
    }

    /// Parse `text`; errors carry the 0-based character offset.
    pub fn parse(text: &str) -> Result<Expr, (usize, String)> {
        let mut p = Parser { chars: text.char_indices().collect(), pos: 0, len: text.len() };
        let e = p.sum()?;
        p.skip_ws();
        if p.pos < p.chars.len() {
            return Err((p.offset(), format!("unexpected `{}`", p.chars[p.pos].1)));
        }
        Ok(e)
    }
}

struct Parser {
    chars: Vec<(usize, char)>,
    pos: usize,
    len: usize,
}

impl Parser {
    fn offset(&self) -> usize {
        self.chars.get(self.pos).map(|c| c.0).unwrap_or(self.len)
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.1.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).map(|c| c.1)
    }

    fn sum(&mut self) -> Result<Expr, (usize, String)> {
        let mut lhs = self.product()?;
        while let Some(op @ ('+' | '-')) = self.peek() {
            self.pos += 1;
            let rhs = self.product()?;
            lhs = if op == '+' { Expr::Add(lhs.into(), rhs.into()) } else { Expr::Sub(lhs.into(), rhs.into()) };
        }
        Ok(lhs)
    }

    fn product(&mut self) -> Result<Expr, (usize, String)> {
        let mut lhs = self.unary()?;
        while let Some(op @ ('*' | '/')) = self.peek() {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = if op == '*' { Expr::Mul(lhs.into(), rhs.into()) } else { Expr::Div(lhs.into(), rhs.into()) };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, (usize, String)> {
        match self.peek() {
            Some('-') => {
                self.pos += 1;
                Ok(Expr::Neg(self.unary()?.into()))
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Expr, (usize, String)> {
        let start = self.offset();
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.sum()?;
                if self.peek() != Some(')') {
                    return Err((self.offset(), "expected `)`".into()));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => {
                let mut s = String::new();
                while let Some(&(_, c)) = self.chars.get(self.pos) {
                    let exp_sign = (c == '-' || c == '+') && s.ends_with(['e', 'E']);
                    if c.is_ascii_digit() || c == '.' || c == 'e' || c == 'E' || exp_sign {
                        s.push(c);
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
                s.parse::<f64>().map(Expr::Num).map_err(|_| (start, format!("bad number `{s}`")))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let mut s = String::new();
                while let Some(&(_, c)) = self.chars.get(self.pos) {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        s.push(c);
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
                match s.as_str() {
                    "pi" => Ok(Expr::Pi),
                    "phi" => Ok(Expr::Phi),
                    _ => Err((start, format!("unknown name `{s}`"))),
                }
            }
            Some(c) => Err((start, format!("unexpected `{c}`"))),
            None => Err((start, "expression ended early".into())),
        }
    }
}
