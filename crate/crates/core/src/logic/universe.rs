use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

pub(crate) const RESERVED: &[&str] = &["true", "false", "sort", "rel"];

/// A named sort and its constants, in declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Sort {
    pub name: String,
    pub constants: Vec<String>,
}

/// A relation signature: name plus the sort of each argument position.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelationSig {
    pub name: String,
    pub arg_sorts: Vec<String>,
}

/// A ground atom `relation(arg, ...)`.
///
/// The derived ordering is lexicographic by relation name, then by argument
/// names, which is the canonical atom order of a [`Universe`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Atom {
    pub relation: String,
    pub args: Vec<String>,
}

impl Atom {
    pub fn new<R, I, S>(relation: R, args: I) -> Self
    where
        R: Into<String>,
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Atom {
            relation: relation.into(),
            args: args.into_iter().map(Into::into).collect(),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.relation, self.args.join(", "))
    }
}

/// A finite typed universe: sorts of constants and relation signatures over
/// them. Its ground atoms are fixed at construction and indexed canonically.
#[derive(Debug, Clone)]
pub struct Universe {
    sorts: Vec<Sort>,
    relations: Vec<RelationSig>,
    atoms: Vec<Atom>,
    index: HashMap<Atom, usize>,
}

impl PartialEq for Universe {
    fn eq(&self, other: &Self) -> bool {
        self.sorts == other.sorts && self.relations == other.relations
    }
}

impl Eq for Universe {}

impl Universe {
    pub fn builder() -> UniverseBuilder {
        UniverseBuilder::default()
    }

    pub fn new(sorts: Vec<Sort>, relations: Vec<RelationSig>) -> Result<Self> {
        let mut sort_names = BTreeSet::new();
        for sort in &sorts {
            check_name(&sort.name)?;
            if !sort_names.insert(sort.name.as_str()) {
                return Err(Error::DuplicateSort(sort.name.clone()));
            }
            if sort.constants.is_empty() {
                return Err(Error::EmptySort(sort.name.clone()));
            }
            let mut seen = BTreeSet::new();
            for c in &sort.constants {
                check_name(c)?;
                if !seen.insert(c.as_str()) {
                    return Err(Error::DuplicateConstant {
                        sort: sort.name.clone(),
                        constant: c.clone(),
                    });
                }
            }
        }
        let mut rel_names = BTreeSet::new();
        for rel in &relations {
            check_name(&rel.name)?;
            if !rel_names.insert(rel.name.as_str()) {
                return Err(Error::DuplicateRelation(rel.name.clone()));
            }
            if rel.arg_sorts.is_empty() {
                return Err(Error::ZeroArity(rel.name.clone()));
            }
            for s in &rel.arg_sorts {
                if !sort_names.contains(s.as_str()) {
                    return Err(Error::UnknownSort(s.clone()));
                }
            }
        }

        let mut universe = Universe {
            sorts,
            relations,
            atoms: Vec::new(),
            index: HashMap::new(),
        };
        let mut atoms = Vec::new();
        for rel in &universe.relations {
            let domains: Vec<&[String]> = rel
                .arg_sorts
                .iter()
                .map(|s| universe.sort(s).expect("checked above").constants.as_slice())
                .collect();
            let mut tuple = vec![0usize; domains.len()];
            'product: loop {
                atoms.push(Atom {
                    relation: rel.name.clone(),
                    args: tuple
                        .iter()
                        .zip(&domains)
                        .map(|(&i, d)| d[i].clone())
                        .collect(),
                });
                // odometer increment, last position fastest
                for pos in (0..tuple.len()).rev() {
                    tuple[pos] += 1;
                    if tuple[pos] < domains[pos].len() {
                        continue 'product;
                    }
                    tuple[pos] = 0;
                }
                break;
            }
        }
        atoms.sort();
        universe.index = atoms
            .iter()
            .enumerate()
            .map(|(i, a)| (a.clone(), i))
            .collect();
        universe.atoms = atoms;
        Ok(universe)
    }

    pub fn sorts(&self) -> &[Sort] {
        &self.sorts
    }

    pub fn relations(&self) -> &[RelationSig] {
        &self.relations
    }

    pub fn sort(&self, name: &str) -> Option<&Sort> {
        self.sorts.iter().find(|s| s.name == name)
    }

    pub fn relation(&self, name: &str) -> Option<&RelationSig> {
        self.relations.iter().find(|r| r.name == name)
    }

    /// Ground atoms in canonical order.
    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn atom(&self, index: usize) -> &Atom {
        &self.atoms[index]
    }

    pub fn atom_index(&self, atom: &Atom) -> Option<usize> {
        self.index.get(atom).copied()
    }

    /// Resolves an atom to its index, reporting the first signature violation.
    pub fn resolve(&self, atom: &Atom) -> Result<usize> {
        if let Some(i) = self.atom_index(atom) {
            return Ok(i);
        }
        let rel = self
            .relation(&atom.relation)
            .ok_or_else(|| Error::UnknownRelation(atom.relation.clone()))?;
        if rel.arg_sorts.len() != atom.args.len() {
            return Err(Error::ArityMismatch {
                relation: rel.name.clone(),
                expected: rel.arg_sorts.len(),
                found: atom.args.len(),
            });
        }
        for (sort, arg) in rel.arg_sorts.iter().zip(&atom.args) {
            let declared = self.sort(sort).is_some_and(|s| s.constants.contains(arg));
            if !declared {
                return Err(Error::SortMismatch {
                    sort: sort.clone(),
                    constant: arg.clone(),
                });
            }
        }
        Err(Error::UnknownAtom(atom.to_string()))
    }
}

/// Canonically ordered ground atoms of `u`.
pub fn ground_atoms(u: &Universe) -> Vec<Atom> {
    u.atoms().to_vec()
}

fn check_name(name: &str) -> Result<()> {
    if RESERVED.contains(&name) {
        return Err(Error::ReservedName(name.to_string()));
    }
    Ok(())
}

#[derive(Debug, Default, Clone)]
pub struct UniverseBuilder {
    sorts: Vec<Sort>,
    relations: Vec<RelationSig>,
}

impl UniverseBuilder {
    pub fn sort<I, S>(mut self, name: &str, constants: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.sorts.push(Sort {
            name: name.to_string(),
            constants: constants.into_iter().map(Into::into).collect(),
        });
        self
    }

    pub fn relation<I, S>(mut self, name: &str, arg_sorts: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.relations.push(RelationSig {
            name: name.to_string(),
            arg_sorts: arg_sorts.into_iter().map(Into::into).collect(),
        });
        self
    }

    pub fn build(self) -> Result<Universe> {
        Universe::new(self.sorts, self.relations)
    }
}
