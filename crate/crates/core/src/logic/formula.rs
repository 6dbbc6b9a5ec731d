use std::fmt;

use serde::{Serialize, Serializer};

use super::universe::{Atom, Universe};
use crate::error::Result;

/// A propositional formula over ground atoms.
///
/// `And(vec![])` is the constant `true` and `Or(vec![])` is `false`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom(Atom),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn atom<R, I, S>(relation: R, args: I) -> Self
    where
        R: Into<String>,
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Formula::Atom(Atom::new(relation, args))
    }

    pub fn top() -> Self {
        Formula::And(Vec::new())
    }

    pub fn bottom() -> Self {
        Formula::Or(Vec::new())
    }

    pub fn negate(self) -> Self {
        Formula::Not(Box::new(self))
    }

    pub fn and(parts: impl IntoIterator<Item = Formula>) -> Self {
        Formula::And(parts.into_iter().collect())
    }

    pub fn or(parts: impl IntoIterator<Item = Formula>) -> Self {
        Formula::Or(parts.into_iter().collect())
    }

    pub fn implies(lhs: Formula, rhs: Formula) -> Self {
        Formula::Implies(Box::new(lhs), Box::new(rhs))
    }

    /// Calls `f` on every atom occurrence, left to right.
    pub fn visit_atoms<'a>(&'a self, f: &mut impl FnMut(&'a Atom)) {
        match self {
            Formula::Atom(a) => f(a),
            Formula::Not(inner) => inner.visit_atoms(f),
            Formula::And(parts) | Formula::Or(parts) => {
                parts.iter().for_each(|p| p.visit_atoms(f))
            }
            Formula::Implies(l, r) => {
                l.visit_atoms(f);
                r.visit_atoms(f);
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Formula::Atom(_) => 0,
            Formula::Not(inner) => 1 + inner.depth(),
            Formula::And(parts) | Formula::Or(parts) => {
                1 + parts.iter().map(Formula::depth).max().unwrap_or(0)
            }
            Formula::Implies(l, r) => 1 + l.depth().max(r.depth()),
        }
    }

    /// Collapses one-element conjunctions and disjunctions, which render the
    /// same as their only operand.
    pub fn canonical(self) -> Formula {
        match self {
            Formula::Atom(_) => self,
            Formula::Not(inner) => inner.canonical().negate(),
            Formula::And(parts) | Formula::Or(parts) if parts.len() == 1 => {
                parts.into_iter().next().expect("one part").canonical()
            }
            Formula::And(parts) => Formula::And(parts.into_iter().map(Formula::canonical).collect()),
            Formula::Or(parts) => Formula::Or(parts.into_iter().map(Formula::canonical).collect()),
            Formula::Implies(l, r) => Formula::implies(l.canonical(), r.canonical()),
        }
    }

    /// Resolves atoms against `u`, producing an index-based formula.
    pub fn compile(&self, u: &Universe) -> Result<Compiled> {
        Ok(match self {
            Formula::Atom(a) => Compiled::Var(u.resolve(a)? as u32),
            Formula::Not(inner) => Compiled::Not(Box::new(inner.compile(u)?)),
            Formula::And(parts) => Compiled::And(
                parts.iter().map(|p| p.compile(u)).collect::<Result<_>>()?,
            ),
            Formula::Or(parts) => {
                Compiled::Or(parts.iter().map(|p| p.compile(u)).collect::<Result<_>>()?)
            }
            Formula::Implies(l, r) => {
                Compiled::Implies(Box::new(l.compile(u)?), Box::new(r.compile(u)?))
            }
        })
    }

    /// Checks that every atom belongs to `u`.
    pub fn check(&self, u: &Universe) -> Result<()> {
        let mut result = Ok(());
        self.visit_atoms(&mut |a| {
            if result.is_ok() {
                result = u.resolve(a).map(drop);
            }
        });
        result
    }

    fn is_bare(&self) -> bool {
        match self {
            Formula::Atom(_) | Formula::Not(_) => true,
            Formula::And(p) | Formula::Or(p) => p.is_empty(),
            Formula::Implies(..) => false,
        }
    }
}

/// Renders in the story-file formula syntax. Compound operands are always
/// parenthesised, so the output re-parses to the same tree.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn operand(f: &mut fmt::Formatter<'_>, x: &Formula) -> fmt::Result {
            if x.is_bare() {
                write!(f, "{x}")
            } else {
                write!(f, "({x})")
            }
        }
        fn nary(f: &mut fmt::Formatter<'_>, parts: &[Formula], op: &str) -> fmt::Result {
            for (i, p) in parts.iter().enumerate() {
                if i > 0 {
                    write!(f, " {op} ")?;
                }
                operand(f, p)?;
            }
            Ok(())
        }
        match self {
            Formula::Atom(a) => write!(f, "{a}"),
            Formula::Not(inner) => {
                write!(f, "!")?;
                operand(f, inner)
            }
            Formula::And(parts) if parts.is_empty() => write!(f, "true"),
            Formula::Or(parts) if parts.is_empty() => write!(f, "false"),
            Formula::And(parts) => nary(f, parts, "&"),
            Formula::Or(parts) => nary(f, parts, "|"),
            Formula::Implies(l, r) => {
                operand(f, l)?;
                write!(f, " -> ")?;
                operand(f, r)
            }
        }
    }
}

impl Serialize for Formula {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// A formula whose atoms are resolved to indices into a universe's atom list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Compiled {
    Var(u32),
    Not(Box<Compiled>),
    And(Vec<Compiled>),
    Or(Vec<Compiled>),
    Implies(Box<Compiled>, Box<Compiled>),
}

impl Compiled {
    /// Evaluates under a total assignment; bit `i` of `bits` is atom `i`.
    pub fn eval(&self, bits: u64) -> bool {
        match self {
            Compiled::Var(i) => bits >> i & 1 == 1,
            Compiled::Not(inner) => !inner.eval(bits),
            Compiled::And(parts) => parts.iter().all(|p| p.eval(bits)),
            Compiled::Or(parts) => parts.iter().any(|p| p.eval(bits)),
            Compiled::Implies(l, r) => !l.eval(bits) || r.eval(bits),
        }
    }

    /// Three-valued (Kleene) evaluation under a partial assignment: atoms
    /// outside `assigned` are unknown.
    pub fn eval_partial(&self, assigned: u64, bits: u64) -> Option<bool> {
        match self {
            Compiled::Var(i) => (assigned >> i & 1 == 1).then(|| bits >> i & 1 == 1),
            Compiled::Not(inner) => inner.eval_partial(assigned, bits).map(|v| !v),
            Compiled::And(parts) => {
                let mut unknown = false;
                for p in parts {
                    match p.eval_partial(assigned, bits) {
                        Some(false) => return Some(false),
                        None => unknown = true,
                        Some(true) => {}
                    }
                }
                (!unknown).then_some(true)
            }
            Compiled::Or(parts) => {
                let mut unknown = false;
                for p in parts {
                    match p.eval_partial(assigned, bits) {
                        Some(true) => return Some(true),
                        None => unknown = true,
                        Some(false) => {}
                    }
                }
                (!unknown).then_some(false)
            }
            Compiled::Implies(l, r) => match (l.eval_partial(assigned, bits), r.eval_partial(assigned, bits)) {
                (Some(false), _) | (_, Some(true)) => Some(true),
                (Some(true), Some(false)) => Some(false),
                _ => None,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_parenthesises_compound_operands() {
        let a = Formula::atom("p", ["x"]);
        let b = Formula::atom("q", ["x"]);
        let f = Formula::implies(
            Formula::and([a.clone(), Formula::or([b.clone(), a.clone()])]),
            a.clone().negate().negate(),
        );
        assert_eq!(f.to_string(), "(p(x) & (q(x) | p(x))) -> !!p(x)");
        assert_eq!(Formula::top().to_string(), "true");
        assert_eq!(Formula::bottom().negate().to_string(), "!false");
        assert_eq!(Formula::and([a, b]).negate().to_string(), "!(p(x) & q(x))");
    }

    #[test]
    fn partial_eval_is_kleene() {
        let f = Compiled::Or(vec![Compiled::Var(0), Compiled::Var(1)]);
        assert_eq!(f.eval_partial(0b01, 0b01), Some(true));
        assert_eq!(f.eval_partial(0b01, 0b00), None);
        assert_eq!(f.eval_partial(0b11, 0b00), Some(false));
        let g = Compiled::Implies(Box::new(Compiled::Var(0)), Box::new(Compiled::Var(1)));
        assert_eq!(g.eval_partial(0b01, 0b00), Some(true));
        assert_eq!(g.eval_partial(0b10, 0b10), Some(true));
        assert_eq!(g.eval_partial(0b11, 0b01), Some(false));
    }
}
