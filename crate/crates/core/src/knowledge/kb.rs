use std::path::Path;

use thiserror::Error;

use super::{parse_term, Fact, FactError, FactStore, ParseError, Source, Term};

/// Relation names recognized when normalizing infix triples.
pub const RELATIONS: &[&str] = &[
    // ConceptNet 5 relations
    "RelatedTo", "FormOf", "IsA", "PartOf", "HasA", "UsedFor", "CapableOf", "AtLocation",
    "Causes", "HasSubevent", "HasFirstSubevent", "HasLastSubevent", "HasPrerequisite",
    "HasProperty", "MotivatedByGoal", "ObstructedBy", "Desires", "CreatedBy", "Synonym",
    "Antonym", "DistinctFrom", "DerivedFrom", "SymbolOf", "DefinedAs", "MannerOf",
    "LocatedNear", "HasContext", "SimilarTo", "CausesDesire", "MadeOf", "ReceivesAction",
    "NotDesires", "InstanceOf",
    // task relations
    "isa", "onDate", "onDay", "atTime", "beforeTime", "activityAt", "prefers",
];

pub fn is_relation(name: &str) -> bool {
    RELATIONS.contains(&name)
}

/// Rewrites an infix triple `(subject Relation object)` into prefix form
/// `(Relation subject object)`. Anything else is returned unchanged.
pub fn normalize_triple(term: Term) -> Term {
    match term {
        Term::Compound { functor, args }
            if args.len() == 2 && !is_relation(&functor) && args[0].as_atom().is_some_and(is_relation) =>
        {
            let mut args = args.into_iter();
            let relation = args.next().and_then(|r| r.as_atom().map(str::to_string)).unwrap_or_default();
            let object = args.next().expect("two arguments");
            Term::Compound {
                functor: relation,
                args: vec![Term::Atom(functor), object],
            }
        }
        other => other,
    }
}

#[derive(Debug, Error)]
pub enum KbError {
    #[error("cannot read knowledge base: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {error}")]
    Parse { line: usize, error: ParseError },
    #[error("line {line}: unknown source tag `{tag}`")]
    UnknownSourceTag { line: usize, tag: String },
    #[error("line {line}: expected `SOURCE_TAG | s-expression`")]
    MissingSeparator { line: usize },
    #[error("line {line}: {error}")]
    Fact { line: usize, error: FactError },
}

impl KbError {
    pub fn line(&self) -> Option<usize> {
        match self {
            KbError::Io(_) => None,
            KbError::Parse { line, .. }
            | KbError::UnknownSourceTag { line, .. }
            | KbError::MissingSeparator { line }
            | KbError::Fact { line, .. } => Some(*line),
        }
    }
}

/// Parses the line-oriented KB format: `SOURCE_TAG | s-expression`, with
/// `#` comment lines and blank lines ignored.
pub fn parse_kb(text: &str) -> Result<FactStore, KbError> {
    let mut store = FactStore::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (tag, expr) = trimmed.split_once('|').ok_or(KbError::MissingSeparator { line })?;
        let tag = tag.trim();
        let source = match tag.parse::<Source>() {
            Ok(Source::RuleFired) | Err(_) => {
                return Err(KbError::UnknownSourceTag {
                    line,
                    tag: tag.to_string(),
                })
            }
            Ok(src) => src,
        };
        let term = parse_term(expr).map_err(|error| KbError::Parse { line, error })?;
        let fact = Fact::new(normalize_triple(term), source).map_err(|error| KbError::Fact { line, error })?;
        store.insert(fact);
    }
    Ok(store)
}

pub fn load_kb(path: impl AsRef<Path>) -> Result<FactStore, KbError> {
    parse_kb(&std::fs::read_to_string(path)?)
}
