use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::logic::{Formula, Limits, Universe};

/// Formulas grouped by logical equivalence, ordered by entailment.
///
/// `edges` holds every pair `(a, b)` of distinct classes with `a ⊨ b`, which
/// is transitively closed. `reduction` drops the edges implied by others.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BooleanLattice {
    /// Each vertex lists its formulas in canonical (rendered) order; vertices
    /// are ordered by their first member.
    pub vertices: Vec<Vec<Formula>>,
    pub edges: Vec<(usize, usize)>,
    pub reduction: Vec<(usize, usize)>,
    /// Vertices with no incoming edge.
    pub sources: Vec<usize>,
}

impl BooleanLattice {
    pub fn vertex_of(&self, f: &Formula) -> Option<usize> {
        self.vertices.iter().position(|v| v.contains(f))
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.binary_search(&(a, b)).is_ok()
    }
}

/// Truth table of each formula over the atoms the formulas mention.
fn truth_tables(q: &[Formula], u: &Universe, limits: &Limits) -> Result<Vec<Vec<u64>>> {
    let mut mentioned = BTreeSet::new();
    for f in q {
        f.check(u)?;
        f.visit_atoms(&mut |a| {
            mentioned.insert(u.atom_index(a).expect("checked above"));
        });
    }
    let vars: Vec<usize> = mentioned.into_iter().collect();
    if vars.len() > limits.max_atoms() {
        return Err(Error::BoundExceeded {
            atoms: vars.len(),
            bound: limits.max_atoms(),
        });
    }
    let rows = 1usize << vars.len();
    let compiled = q.iter().map(|f| f.compile(u)).collect::<Result<Vec<_>>>()?;
    let mut tables = vec![vec![0u64; rows.div_ceil(64)]; q.len()];
    for row in 0..rows {
        let bits = vars
            .iter()
            .enumerate()
            .filter(|(j, _)| row >> j & 1 == 1)
            .fold(0u64, |acc, (_, &v)| acc | 1 << v);
        for (table, c) in tables.iter_mut().zip(&compiled) {
            if c.eval(bits) {
                table[row / 64] |= 1 << (row % 64);
            }
        }
    }
    Ok(tables)
}

fn subset(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}

pub fn boolean_lattice(q: &[Formula], u: &Universe, limits: &Limits) -> Result<BooleanLattice> {
    let mut formulas: Vec<Formula> = q.to_vec();
    formulas.sort_by_cached_key(|f| f.to_string());
    formulas.dedup();
    let tables = truth_tables(&formulas, u, limits)?;

    let mut vertices: Vec<Vec<Formula>> = Vec::new();
    let mut class_tables: Vec<&Vec<u64>> = Vec::new();
    for (f, t) in formulas.into_iter().zip(&tables) {
        match class_tables.iter().position(|c| *c == t) {
            Some(i) => vertices[i].push(f),
            None => {
                vertices.push(vec![f]);
                class_tables.push(t);
            }
        }
    }

    let n = vertices.len();
    let entails = |a: usize, b: usize| a != b && subset(class_tables[a], class_tables[b]);
    let mut edges = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if entails(a, b) {
                edges.push((a, b));
            }
        }
    }
    let reduction = edges
        .iter()
        .copied()
        .filter(|&(a, b)| !(0..n).any(|k| k != a && k != b && entails(a, k) && entails(k, b)))
        .collect();
    let sources = (0..n).filter(|&b| !(0..n).any(|a| entails(a, b))).collect();
    Ok(BooleanLattice {
        vertices,
        edges,
        reduction,
        sources,
    })
}
