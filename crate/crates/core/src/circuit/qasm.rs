//! OpenQASM 2.0 subset used for circuit files.
//!
//! ```text
//! OPENQASM 2.0;
//! include "qelib1.inc";
//! qreg q[3];
//! h q[0];
//! rz(1.5707963267948966e0) q[2];
//! cx q[0],q[1];
//! ```
//!
//! One statement per line; `//` comments and blank lines are ignored. Gate
//! names are `x z h sx rz cx`. Angles are written with 17 significant digits
//! so they parse back to the same `f64`.

use std::fmt::Write as _;

use thiserror::Error;

use super::{canonical_angle, Circuit, CircuitError, Gate};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

const HEADER: &str = "OPENQASM 2.0;";
const INCLUDE: &str = "include \"qelib1.inc\";";

pub fn serialize(circuit: &Circuit) -> String {
    let mut out = String::new();
    out.push_str(HEADER);
    out.push('\n');
    out.push_str(INCLUDE);
    out.push('\n');
    let _ = writeln!(out, "qreg q[{}];", circuit.width());
    for g in circuit.gates() {
        let _ = match *g {
            Gate::X(q) => writeln!(out, "x q[{}];", q - 1),
            Gate::Z(q) => writeln!(out, "z q[{}];", q - 1),
            Gate::H(q) => writeln!(out, "h q[{}];", q - 1),
            Gate::Sx(q) => writeln!(out, "sx q[{}];", q - 1),
            Gate::Rz(q, theta) => writeln!(out, "rz({:.16e}) q[{}];", canonical_angle(theta), q - 1),
            Gate::Cx(c, t) => writeln!(out, "cx q[{}],q[{}];", c - 1, t - 1),
        };
    }
    out
}

struct Cursor<'a> {
    line: usize,
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn err(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            column: self.pos + 1,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.text[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn expect(&mut self, token: &str) -> Result<(), ParseError> {
        self.skip_ws();
        if self.text[self.pos..].starts_with(token) {
            self.pos += token.len();
            Ok(())
        } else {
            Err(self.err(format!("expected `{token}`")))
        }
    }

    fn ident(&mut self) -> Result<&'a str, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.text[start..];
        let len = rest
            .char_indices()
            .find(|&(i, c)| !(c.is_ascii_alphanumeric() || c == '_') || (i == 0 && c.is_ascii_digit()))
            .map_or(rest.len(), |(i, _)| i);
        if len == 0 {
            return Err(self.err("expected identifier"));
        }
        self.pos += len;
        Ok(&self.text[start..start + len])
    }

    fn integer(&mut self) -> Result<usize, ParseError> {
        self.skip_ws();
        let rest = &self.text[self.pos..];
        let len = rest.bytes().take_while(u8::is_ascii_digit).count();
        if len == 0 {
            return Err(self.err("expected integer"));
        }
        let value = rest[..len].parse().map_err(|_| self.err("integer out of range"))?;
        self.pos += len;
        Ok(value)
    }

    fn real(&mut self) -> Result<f64, ParseError> {
        self.skip_ws();
        let rest = &self.text[self.pos..];
        let len = rest
            .find(|c: char| !(c.is_ascii_digit() || matches!(c, '.' | 'e' | 'E' | '+' | '-')))
            .unwrap_or(rest.len());
        let value: f64 = rest[..len]
            .parse()
            .map_err(|_| self.err(format!("malformed angle `{}`", &rest[..len])))?;
        if !value.is_finite() {
            return Err(self.err("angle must be finite"));
        }
        self.pos += len;
        Ok(value)
    }

    /// `q[<i>]`, returning the 1-based qubit.
    fn operand(&mut self, width: usize) -> Result<usize, ParseError> {
        self.skip_ws();
        let at = self.pos;
        let reg = self.ident()?;
        if reg != "q" {
            self.pos = at;
            return Err(self.err(format!("unknown register `{reg}`")));
        }
        self.expect("[")?;
        self.skip_ws();
        let idx_at = self.pos;
        let index = self.integer()?;
        self.expect("]")?;
        if index >= width {
            self.pos = idx_at;
            return Err(self.err(format!("qubit index {index} outside qreg q[{width}]")));
        }
        Ok(index + 1)
    }

    fn finish(&mut self) -> Result<(), ParseError> {
        self.expect(";")?;
        self.skip_ws();
        match self.peek() {
            None => Ok(()),
            Some(_) => Err(self.err("unexpected text after `;`")),
        }
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find("//") {
        Some(i) => &line[..i],
        None => line,
    }
}

pub fn parse(text: &str) -> Result<Circuit, CircuitError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, strip_comment(l)))
        .filter(|(_, l)| !l.trim().is_empty());

    let mut next_statement = |what: &str| {
        lines.next().ok_or_else(|| ParseError {
            line: text.lines().count().max(1),
            column: 1,
            message: format!("unexpected end of input, expected {what}"),
        })
    };

    let (line, body) = next_statement("`OPENQASM 2.0;`")?;
    let mut cur = Cursor {
        line,
        text: body,
        pos: 0,
    };
    cur.expect("OPENQASM")?;
    cur.expect("2.0")?;
    cur.finish()?;

    let (line, body) = next_statement("include")?;
    let mut cur = Cursor {
        line,
        text: body,
        pos: 0,
    };
    cur.expect("include")?;
    cur.expect("\"qelib1.inc\"")?;
    cur.finish()?;

    let (line, body) = next_statement("qreg declaration")?;
    let mut cur = Cursor {
        line,
        text: body,
        pos: 0,
    };
    cur.expect("qreg")?;
    cur.skip_ws();
    let name_at = cur.pos;
    if cur.ident()? != "q" {
        cur.pos = name_at;
        return Err(cur.err("register must be named `q`").into());
    }
    cur.expect("[")?;
    let width = cur.integer()?;
    cur.expect("]")?;
    cur.finish()?;
    let mut circuit = Circuit::new(width).map_err(|_| cur.err("qreg must hold at least one qubit"))?;

    for (line, body) in lines {
        let mut cur = Cursor {
            line,
            text: body,
            pos: 0,
        };
        cur.skip_ws();
        let name_at = cur.pos;
        let name = cur.ident()?;
        let gate = match name {
            "x" | "z" | "h" | "sx" => {
                let q = cur.operand(width)?;
                match name {
                    "x" => Gate::X(q),
                    "z" => Gate::Z(q),
                    "h" => Gate::H(q),
                    _ => Gate::Sx(q),
                }
            }
            "rz" => {
                cur.expect("(")?;
                let theta = cur.real()?;
                cur.expect(")")?;
                Gate::Rz(cur.operand(width)?, theta)
            }
            "cx" => {
                let c = cur.operand(width)?;
                cur.expect(",")?;
                cur.skip_ws();
                let t_at = cur.pos;
                let t = cur.operand(width)?;
                if c == t {
                    cur.pos = t_at;
                    return Err(cur.err("cx control and target must differ").into());
                }
                Gate::Cx(c, t)
            }
            other => {
                cur.pos = name_at;
                return Err(cur.err(format!("unknown gate `{other}`")).into());
            }
        };
        cur.finish()?;
        circuit.push(gate)?;
    }
    Ok(circuit)
}
