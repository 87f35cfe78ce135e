use std::fmt;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

/// A symbolic s-expression value.
///
/// Printing with [`fmt::Display`] produces the concrete syntax accepted by
/// [`parse_term`](super::parse_term): atoms and integers print bare, variables
/// print with a leading `?`, text prints between single quotes and compounds
/// print as `(functor arg...)`.
///
/// Serializes as its printed s-expression string.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Atom(String),
    /// Variable name without the `?` sigil.
    Variable(String),
    Integer(i64),
    Text(String),
    Compound { functor: String, args: Vec<Term> },
}

impl Term {
    pub fn atom(name: impl Into<String>) -> Self {
        Term::Atom(name.into())
    }

    pub fn var(name: impl Into<String>) -> Self {
        Term::Variable(name.into())
    }

    pub fn text(value: impl Into<String>) -> Self {
        Term::Text(value.into())
    }

    /// Builds a compound term. Panics on an empty argument list, since a
    /// compound always has at least one argument.
    pub fn compound(functor: impl Into<String>, args: Vec<Term>) -> Self {
        assert!(!args.is_empty(), "compound terms need at least one argument");
        Term::Compound {
            functor: functor.into(),
            args,
        }
    }

    pub fn functor(&self) -> Option<&str> {
        match self {
            Term::Compound { functor, .. } => Some(functor),
            _ => None,
        }
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::Compound { args, .. } => args,
            _ => &[],
        }
    }

    pub fn arity(&self) -> usize {
        self.args().len()
    }

    /// Key under which a fact store indexes this term.
    pub fn index_key(&self) -> Option<(String, usize)> {
        match self {
            Term::Compound { functor, args } => Some((functor.clone(), args.len())),
            Term::Atom(name) => Some((name.clone(), 0)),
            Term::Integer(n) => Some((n.to_string(), 0)),
            Term::Text(s) => Some((format!("'{s}'"), 0)),
            Term::Variable(_) => None,
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Variable(_) => false,
            Term::Compound { args, .. } => args.iter().all(Term::is_ground),
            _ => true,
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Term::Atom(name) => Some(name),
            _ => None,
        }
    }

    pub fn as_integer(&self) -> Option<i64> {
        match self {
            Term::Integer(n) => Some(*n),
            _ => None,
        }
    }

    /// Variables in first-occurrence order, without duplicates.
    pub fn variables(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_variables(&mut out);
        out
    }

    fn collect_variables(&self, out: &mut Vec<String>) {
        match self {
            Term::Variable(name) => {
                if !out.iter().any(|v| v == name) {
                    out.push(name.clone());
                }
            }
            Term::Compound { args, .. } => args.iter().for_each(|a| a.collect_variables(out)),
            _ => {}
        }
    }

    /// True if `needle` occurs anywhere inside this term (including the term
    /// itself). Functors are not considered.
    pub fn mentions(&self, needle: &Term) -> bool {
        if self == needle {
            return true;
        }
        self.args().iter().any(|a| a.mentions(needle))
    }

    /// All non-compound leaves, left to right.
    pub fn leaves(&self) -> Vec<&Term> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a Term>) {
        match self {
            Term::Compound { args, .. } => args.iter().for_each(|a| a.collect_leaves(out)),
            leaf => out.push(leaf),
        }
    }
}

/// Whether `name` can be printed as a bare atom and read back as the same atom.
pub fn is_atom_token(name: &str) -> bool {
    !name.is_empty()
        && !name.starts_with('?')
        && name.parse::<i64>().is_err()
        && name
            .chars()
            .all(|c| !c.is_whitespace() && !matches!(c, '(' | ')' | '\'' | '\\'))
}

fn write_text(f: &mut fmt::Formatter<'_>, s: &str) -> fmt::Result {
    f.write_str("'")?;
    for c in s.chars() {
        if c == '\'' || c == '\\' {
            f.write_str("\\")?;
        }
        write!(f, "{c}")?;
    }
    f.write_str("'")
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Atom(name) => f.write_str(name),
            Term::Variable(name) => write!(f, "?{name}"),
            Term::Integer(n) => write!(f, "{n}"),
            Term::Text(s) => write_text(f, s),
            Term::Compound { functor, args } => {
                write!(f, "({functor}")?;
                for arg in args {
                    write!(f, " {arg}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl Serialize for Term {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Term {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        super::parse_term(&text).map_err(de::Error::custom)
    }
}

impl std::str::FromStr for Term {
    type Err = super::ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        super::parse_term(s)
    }
}

impl From<i64> for Term {
    fn from(n: i64) -> Self {
        Term::Integer(n)
    }
}

impl From<&str> for Term {
    fn from(name: &str) -> Self {
        Term::Atom(name.to_string())
    }
}

/// `term!` style helper: `compound!("IsA", "Levodopa", "pill")`.
#[macro_export]
macro_rules! compound {
    ($functor:expr $(, $arg:expr)+ $(,)?) => {
        $crate::knowledge::Term::compound($functor, vec![$($crate::knowledge::Term::from($arg)),+])
    };
}
