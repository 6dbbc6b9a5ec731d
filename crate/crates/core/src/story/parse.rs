//! Story-file parser.
//!
//! ```text
//! # comment
//! sort person: jay, ali
//! rel wears(person, color)
//! t=0:
//! + wears(jay, blue) & !wears(jay, red)
//! t=1:
//! - wears(jay, blue) & !wears(jay, red)
//! ```
//!
//! Formula precedence, loosest first: `->` (right associative), `|`, `&`, `!`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::logic::{Atom, Formula, Limits, RelationSig, Sort, Universe};

use super::fabula::Fabula;
use super::timeline::Timeline;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Number(usize),
    LParen,
    RParen,
    Comma,
    Colon,
    Equals,
    Not,
    And,
    Or,
    Arrow,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Number(n) => format!("`{n}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Equals => "`=`".into(),
            Tok::Not => "`!`".into(),
            Tok::And => "`&`".into(),
            Tok::Or => "`|`".into(),
            Tok::Arrow => "`->`".into(),
        }
    }
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        column,
        message: message.into(),
    }
}

/// Tokenizes `text`, whose first character sits at `column` (1-based).
fn tokenize(text: &str, line: usize, column: usize) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = column + i;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let single = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            ':' => Some(Tok::Colon),
            '=' => Some(Tok::Equals),
            '!' => Some(Tok::Not),
            '&' => Some(Tok::And),
            '|' => Some(Tok::Or),
            _ => None,
        };
        if let Some(tok) = single {
            toks.push((tok, col));
            i += 1;
        } else if c == '-' && chars.get(i + 1) == Some(&'>') {
            toks.push((Tok::Arrow, col));
            i += 2;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            let n = digits
                .parse()
                .map_err(|_| syntax(line, col, format!("number `{digits}` is too large")))?;
            toks.push((Tok::Number(n), col));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            toks.push((Tok::Ident(chars[start..i].iter().collect()), col));
        } else {
            return Err(syntax(line, col, format!("unexpected character `{c}`")));
        }
    }
    Ok(toks)
}

struct Cursor<'a> {
    toks: &'a [(Tok, usize)],
    pos: usize,
    line: usize,
    end_col: usize,
}

impl<'a> Cursor<'a> {
    fn new(toks: &'a [(Tok, usize)], line: usize, end_col: usize) -> Self {
        Cursor {
            toks,
            pos: 0,
            line,
            end_col,
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |(_, c)| *c)
    }

    fn error(&self, message: impl Into<String>) -> Error {
        syntax(self.line, self.col(), message)
    }

    fn unexpected(&self, wanted: &str) -> Error {
        match self.peek() {
            Some(t) => self.error(format!("expected {wanted}, found {}", t.describe())),
            None => self.error(format!("expected {wanted}, found end of line")),
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<()> {
        if self.eat(&tok) {
            Ok(())
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    fn ident(&mut self, wanted: &str) -> Result<String> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.unexpected(wanted)),
        }
    }

    fn finish(&self) -> Result<()> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(self.error(format!("unexpected {} after end of input", t.describe()))),
        }
    }

    /// `ident (, ident)*`
    fn ident_list(&mut self, wanted: &str) -> Result<Vec<String>> {
        let mut out = vec![self.ident(wanted)?];
        while self.eat(&Tok::Comma) {
            out.push(self.ident(wanted)?);
        }
        Ok(out)
    }
}

struct FormulaParser<'a, 'u> {
    cur: Cursor<'a>,
    universe: &'u Universe,
}

impl FormulaParser<'_, '_> {
    fn implication(&mut self) -> Result<Formula> {
        let lhs = self.disjunction()?;
        if self.cur.eat(&Tok::Arrow) {
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula> {
        let mut parts = vec![self.conjunction()?];
        while self.cur.eat(&Tok::Or) {
            parts.push(self.conjunction()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Formula::Or(parts)
        })
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let mut parts = vec![self.unary()?];
        while self.cur.eat(&Tok::And) {
            parts.push(self.unary()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Formula::And(parts)
        })
    }

    fn unary(&mut self) -> Result<Formula> {
        if self.cur.eat(&Tok::Not) {
            return Ok(self.unary()?.negate());
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Formula> {
        if self.cur.eat(&Tok::LParen) {
            let inner = self.implication()?;
            self.cur.expect(Tok::RParen)?;
            return Ok(inner);
        }
        let col = self.cur.col();
        let name = self.cur.ident("a formula")?;
        match name.as_str() {
            "true" => return Ok(Formula::top()),
            "false" => return Ok(Formula::bottom()),
            _ => {}
        }
        self.cur.expect(Tok::LParen)?;
        let args = self.cur.ident_list("a constant")?;
        self.cur.expect(Tok::RParen)?;
        let atom = Atom::new(name, args);
        self.universe
            .resolve(&atom)
            .map_err(|e| syntax(self.cur.line, col, e.to_string()))?;
        Ok(Formula::Atom(atom))
    }
}

/// Parses a single formula, resolving atoms against `u`.
pub fn parse_formula(text: &str, u: &Universe) -> Result<Formula> {
    parse_formula_at(text, u, 1, 1)
}

fn parse_formula_at(text: &str, u: &Universe, line: usize, column: usize) -> Result<Formula> {
    let toks = tokenize(text, line, column)?;
    let end_col = column + text.chars().count();
    let mut p = FormulaParser {
        cur: Cursor::new(&toks, line, end_col),
        universe: u,
    };
    let f = p.implication()?;
    p.cur.finish()?;
    Ok(f)
}

struct Edit {
    formula: Formula,
    line: usize,
    column: usize,
}

#[derive(Default)]
struct Block {
    additions: Vec<Edit>,
    removals: Vec<Edit>,
}

/// Parses a story file using the default enumeration bound.
pub fn parse_story(text: &str) -> Result<Timeline> {
    parse_story_with(text, &Limits::default())
}

pub fn parse_story_with(text: &str, limits: &Limits) -> Result<Timeline> {
    let mut sorts: Vec<Sort> = Vec::new();
    let mut relations: Vec<RelationSig> = Vec::new();
    let mut universe: Option<Arc<Universe>> = None;
    let mut blocks: Vec<Block> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        let indent = content.len() - content.trim_start().len();
        let body = content.trim();
        if body.is_empty() {
            continue;
        }
        let column = content[..indent].chars().count() + 1;

        if let Some(sign) = body.chars().next().filter(|c| *c == '+' || *c == '-') {
            if body.starts_with("->") {
                return Err(syntax(line, column, "expected `+` or `-` before a formula"));
            }
            let Some(block) = blocks.last_mut() else {
                return Err(syntax(line, column, "formula outside a `t=<k>:` block"));
            };
            let u = universe.as_ref().expect("set when the first block opens");
            let rest = &body[1..];
            let formula = parse_formula_at(rest, u, line, column + 1)?;
            let edit = Edit {
                formula,
                line,
                column: column + 1 + (rest.len() - rest.trim_start().len()),
            };
            if sign == '+' {
                block.additions.push(edit);
            } else {
                block.removals.push(edit);
            }
            continue;
        }

        let toks = tokenize(body, line, column)?;
        let mut cur = Cursor::new(&toks, line, column + body.chars().count());
        let keyword = cur.ident("`sort`, `rel`, `t=<k>:` or a `+`/`-` line")?;
        match keyword.as_str() {
            "sort" | "rel" if universe.is_some() => {
                return Err(syntax(line, column, "declarations must precede the first block"));
            }
            "sort" => {
                let name = cur.ident("a sort name")?;
                cur.expect(Tok::Colon)?;
                let constants = cur.ident_list("a constant")?;
                cur.finish()?;
                sorts.push(Sort { name, constants });
            }
            "rel" => {
                let name = cur.ident("a relation name")?;
                cur.expect(Tok::LParen)?;
                let arg_sorts = cur.ident_list("a sort name")?;
                cur.expect(Tok::RParen)?;
                cur.finish()?;
                relations.push(RelationSig { name, arg_sorts });
            }
            "t" => {
                cur.expect(Tok::Equals)?;
                let k_col = cur.col();
                let k = match cur.peek() {
                    Some(Tok::Number(k)) => *k,
                    _ => return Err(cur.unexpected("a step number")),
                };
                cur.pos += 1;
                cur.expect(Tok::Colon)?;
                cur.finish()?;
                if k != blocks.len() {
                    return Err(syntax(line, k_col, format!("expected t={}, found t={k}", blocks.len())));
                }
                if universe.is_none() {
                    let u = Universe::new(std::mem::take(&mut sorts), std::mem::take(&mut relations))
                        .map_err(|e| syntax(line, column, e.to_string()))?;
                    universe = Some(Arc::new(u));
                }
                blocks.push(Block::default());
            }
            other => {
                return Err(syntax(line, column, format!("unknown directive `{other}`")));
            }
        }
    }

    let universe = universe.ok_or(Error::EmptyTimeline)?;
    let mut steps = Vec::with_capacity(blocks.len());
    let mut current = Fabula::empty();
    for (step, block) in blocks.into_iter().enumerate() {
        for r in &block.removals {
            if block.additions.iter().any(|a| a.formula == r.formula) {
                return Err(syntax(r.line, r.column, format!("add/remove conflict on `{}`", r.formula)));
            }
            if !current.remove(&r.formula) {
                return Err(syntax(
                    r.line,
                    r.column,
                    format!("cannot remove `{}`: not asserted before t={step}", r.formula),
                ));
            }
        }
        for a in block.additions {
            current.insert(a.formula, true);
        }
        current.validate(&universe, limits).map_err(|e| match e {
            Error::Inconsistent { conflict } => Error::InconsistentStep { step, conflict },
            other => other,
        })?;
        steps.push(current.clone());
    }
    Timeline::new(universe, steps, limits)
}
