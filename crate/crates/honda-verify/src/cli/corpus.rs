//! The textual corpus format: named finite matrix groups given by modulus,
//! dimension and generators (or an explicit element list, which is
//! validated for closure).
//!
//! ```text
//! # comment
//! group sl2_f3 {
//!   modulus 3
//!   dim 2
//!   gen 1 1 0 1
//!   gen 1 0 1 1
//! }
//! ```

use thiserror::Error;

use crate::matgroup::{GroupError, GroupTable, SquareMatrix};
use crate::ring::{ResidueRing, RingError};

/// The corpus shipped with the binary.
pub const BUILTIN_CORPUS: &str = include_str!("../../corpus/standard.groups");

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: group '{name}': {source}")]
    BadGroup {
        line: usize,
        name: String,
        source: GroupError,
    },
    #[error("line {line}: group '{name}': {source}")]
    BadRing {
        line: usize,
        name: String,
        source: RingError,
    },
    #[error("line {line}: group '{name}': element list is not closed (product of listed elements escapes the list)")]
    NotClosed { line: usize, name: String },
    #[error("line {line}: group '{name}': element list does not contain the identity")]
    NoIdentity { line: usize, name: String },
    #[error("no group named '{0}' in the corpus")]
    NoSuchGroup(String),
}

/// One parsed corpus entry, not yet enumerated.
#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub name: String,
    pub line: usize,
    pub modulus: u64,
    pub dim: usize,
    pub generators: Vec<Vec<i64>>,
    pub elements: Vec<Vec<i64>>,
}

impl CorpusEntry {
    /// Builds the full group table. Entries listing explicit elements are
    /// validated: the list must contain the identity and be closed under
    /// products (inverses then come for free in a finite ambient group).
    pub fn realize(&self, cap: usize) -> Result<GroupTable, CorpusError> {
        let ring = ResidueRing::new(self.modulus).map_err(|source| CorpusError::BadRing {
            line: self.line,
            name: self.name.clone(),
            source,
        })?;
        let to_matrix = |rows: &Vec<i64>| {
            SquareMatrix::new(ring, self.dim, rows).map_err(|source| CorpusError::BadGroup {
                line: self.line,
                name: self.name.clone(),
                source,
            })
        };

        if !self.elements.is_empty() {
            let elements: Vec<SquareMatrix> =
                self.elements.iter().map(to_matrix).collect::<Result<_, _>>()?;
            let identity = SquareMatrix::identity(ring, self.dim);
            if !elements.contains(&identity) {
                return Err(CorpusError::NoIdentity {
                    line: self.line,
                    name: self.name.clone(),
                });
            }
            for a in &elements {
                for b in &elements {
                    let ab = a.mul(b).map_err(|source| CorpusError::BadGroup {
                        line: self.line,
                        name: self.name.clone(),
                        source,
                    })?;
                    if !elements.contains(&ab) {
                        return Err(CorpusError::NotClosed {
                            line: self.line,
                            name: self.name.clone(),
                        });
                    }
                }
            }
            return GroupTable::close_generators(ring, self.dim, &elements, cap).map_err(|source| {
                CorpusError::BadGroup {
                    line: self.line,
                    name: self.name.clone(),
                    source,
                }
            });
        }

        let gens: Vec<SquareMatrix> =
            self.generators.iter().map(to_matrix).collect::<Result<_, _>>()?;
        GroupTable::close_generators(ring, self.dim, &gens, cap).map_err(|source| {
            CorpusError::BadGroup {
                line: self.line,
                name: self.name.clone(),
                source,
            }
        })
    }
}

pub fn parse_corpus(src: &str) -> Result<Vec<CorpusEntry>, CorpusError> {
    let mut entries = Vec::new();
    let mut current: Option<CorpusEntry> = None;
    for (lineno, raw) in src.lines().enumerate() {
        let line_number = lineno + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut words = line.split_whitespace();
        let keyword = words.next().expect("nonempty line");
        let err = |message: String| CorpusError::Parse {
            line: line_number,
            message,
        };
        match keyword {
            "group" => {
                if current.is_some() {
                    return Err(err("nested 'group' (missing closing '}')".into()));
                }
                let name = words
                    .next()
                    .ok_or_else(|| err("expected a group name".into()))?;
                match words.next() {
                    Some("{") => {}
                    _ => return Err(err("expected '{' after the group name".into())),
                }
                current = Some(CorpusEntry {
                    name: name.to_owned(),
                    line: line_number,
                    modulus: 0,
                    dim: 0,
                    generators: Vec::new(),
                    elements: Vec::new(),
                });
            }
            "modulus" => {
                let entry = current
                    .as_mut()
                    .ok_or_else(|| err("'modulus' outside a group block".into()))?;
                entry.modulus = words
                    .next()
                    .and_then(|w| w.parse().ok())
                    .ok_or_else(|| err("expected an integer modulus".into()))?;
            }
            "dim" => {
                let entry = current
                    .as_mut()
                    .ok_or_else(|| err("'dim' outside a group block".into()))?;
                entry.dim = words
                    .next()
                    .and_then(|w| w.parse().ok())
                    .ok_or_else(|| err("expected an integer dimension".into()))?;
            }
            "gen" | "elem" => {
                let is_gen = keyword == "gen";
                let entry = current
                    .as_mut()
                    .ok_or_else(|| err(format!("'{keyword}' outside a group block")))?;
                if entry.dim == 0 {
                    return Err(err(format!("'{keyword}' before 'dim'")));
                }
                let values: Vec<i64> = words
                    .map(|w| w.parse::<i64>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| err(format!("'{keyword}' entries must be integers")))?;
                if values.len() != entry.dim * entry.dim {
                    return Err(err(format!(
                        "'{keyword}' needs {} row-major entries, got {}",
                        entry.dim * entry.dim,
                        values.len()
                    )));
                }
                if is_gen {
                    entry.generators.push(values);
                } else {
                    entry.elements.push(values);
                }
            }
            "}" => {
                let entry = current
                    .take()
                    .ok_or_else(|| err("'}' without an open group block".into()))?;
                if entry.modulus < 2 {
                    return Err(err(format!(
                        "group '{}' needs 'modulus' of at least 2",
                        entry.name
                    )));
                }
                if entry.dim == 0 {
                    return Err(err(format!("group '{}' needs 'dim'", entry.name)));
                }
                if !entry.generators.is_empty() && !entry.elements.is_empty() {
                    return Err(err(format!(
                        "group '{}' mixes 'gen' and 'elem' rows",
                        entry.name
                    )));
                }
                entries.push(entry);
            }
            other => return Err(err(format!("unknown keyword '{other}'"))),
        }
    }
    if let Some(entry) = current {
        return Err(CorpusError::Parse {
            line: entry.line,
            message: format!("group '{}' is never closed with '}}'", entry.name),
        });
    }
    Ok(entries)
}

pub fn find_entry<'c>(entries: &'c [CorpusEntry], name: &str) -> Result<&'c CorpusEntry, CorpusError> {
    entries
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| CorpusError::NoSuchGroup(name.to_owned()))
}

pub fn builtin_entries() -> Vec<CorpusEntry> {
    parse_corpus(BUILTIN_CORPUS).expect("the shipped corpus parses")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matgroup::DEFAULT_CLOSURE_CAP;

    #[test]
    fn builtin_corpus_parses_and_realizes() {
        let entries = builtin_entries();
        let expected: &[(&str, usize)] = &[
            ("trivial", 1),
            ("cyclic_6", 6),
            ("cyclic_4", 4),
            ("sl2_f2", 6),
            ("sl2_f3", 24),
            ("sl2_f5", 120),
            ("torus_f5", 4),
            ("borel_f3", 6),
            ("sl2_z4", 48),
            ("sl2_z8", 384),
            ("sl2_z9", 648),
        ];
        assert_eq!(entries.len(), expected.len());
        for (name, order) in expected {
            let entry = find_entry(&entries, name).unwrap();
            let table = entry.realize(DEFAULT_CLOSURE_CAP).unwrap();
            assert_eq!(table.order(), *order, "group {name}");
        }
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = parse_corpus("group x {\n  modulus 3\n  dim 2\n  gen 1 1 0\n}\n").unwrap_err();
        match err {
            CorpusError::Parse { line, .. } => assert_eq!(line, 4),
            other => panic!("unexpected error {other}"),
        }
        let err = parse_corpus("group x {\n  modulus 3\n").unwrap_err();
        match err {
            CorpusError::Parse { line, .. } => assert_eq!(line, 1),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn non_closed_element_list_rejected() {
        // {I, E12, E21} is not closed: E12 * E21 escapes.
        let src = "group bad {\n mododulus\n}";
        assert!(parse_corpus(src).is_err());
        let src = "group bad {\n modulus 2\n dim 2\n elem 1 0 0 1\n elem 1 1 0 1\n elem 1 0 1 1\n}\n";
        let entries = parse_corpus(src).unwrap();
        match entries[0].realize(1000) {
            Err(CorpusError::NotClosed { .. }) => {}
            other => panic!("unexpected outcome {other:?}"),
        }
    }

    #[test]
    fn element_list_without_identity_rejected() {
        let src = "group bad {\n modulus 3\n dim 2\n elem 2 0 0 2\n}\n";
        let entries = parse_corpus(src).unwrap();
        assert!(matches!(
            entries[0].realize(1000),
            Err(CorpusError::NoIdentity { .. })
        ));
    }

    #[test]
    fn closed_element_list_accepted() {
        let src = "group c2 {\n modulus 3\n dim 2\n elem 1 0 0 1\n elem 2 0 0 2\n}\n";
        let entries = parse_corpus(src).unwrap();
        let table = entries[0].realize(1000).unwrap();
        assert_eq!(table.order(), 2);
    }

    #[test]
    fn non_unimodular_generator_is_a_validation_error() {
        let src = "group bad {\n modulus 4\n dim 2\n gen 2 0 0 2\n}\n";
        let entries = parse_corpus(src).unwrap();
        assert!(matches!(
            entries[0].realize(1000),
            Err(CorpusError::BadGroup {
                source: GroupError::NotUnimodular { .. },
                ..
            })
        ));
    }
}
