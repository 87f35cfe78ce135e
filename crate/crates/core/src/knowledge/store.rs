use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{unify, Bindings, Term};

/// Where a fact came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Source {
    Given,
    ConceptNet,
    #[serde(rename = "calendar")]
    Calendar,
    #[serde(rename = "Given preference")]
    GivenPreference,
    #[serde(rename = "Given knowledge")]
    GivenKnowledge,
    #[serde(rename = "Rule fired")]
    RuleFired,
}

impl Source {
    pub const ALL: [Source; 6] = [
        Source::Given,
        Source::ConceptNet,
        Source::Calendar,
        Source::GivenPreference,
        Source::GivenKnowledge,
        Source::RuleFired,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Source::Given => "Given",
            Source::ConceptNet => "ConceptNet",
            Source::Calendar => "calendar",
            Source::GivenPreference => "Given preference",
            Source::GivenKnowledge => "Given knowledge",
            Source::RuleFired => "Rule fired",
        }
    }

    /// Position of this source's block in an explanation trace.
    pub fn trace_rank(self) -> u8 {
        match self {
            Source::Given => 0,
            Source::ConceptNet => 1,
            Source::GivenPreference => 2,
            Source::GivenKnowledge => 3,
            Source::Calendar => 4,
            Source::RuleFired => 5,
        }
    }

    /// Preference when two explanations are otherwise equally small; lower wins.
    pub fn support_rank(self) -> u8 {
        match self {
            Source::Given => 0,
            Source::GivenPreference => 1,
            Source::Calendar => 2,
            Source::GivenKnowledge => 3,
            Source::RuleFired => 4,
            Source::ConceptNet => 5,
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown source tag `{0}`")]
pub struct UnknownSourceTag(pub String);

impl FromStr for Source {
    type Err = UnknownSourceTag;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Source::ALL
            .into_iter()
            .find(|src| src.label() == s)
            .ok_or_else(|| UnknownSourceTag(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FactError {
    #[error("fact `{0}` contains variables")]
    NonGround(Term),
    #[error("derived facts need at least one premise and a rule id")]
    MissingDerivation,
    #[error("only derived facts may carry the `Rule fired` tag")]
    RuleFiredWithoutDerivation,
}

/// A ground term with provenance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fact {
    pub term: Term,
    pub source: Source,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub premises: Vec<Term>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule_id: Option<String>,
}

impl Fact {
    pub fn new(term: Term, source: Source) -> Result<Self, FactError> {
        if !term.is_ground() {
            return Err(FactError::NonGround(term));
        }
        if source == Source::RuleFired {
            return Err(FactError::RuleFiredWithoutDerivation);
        }
        Ok(Fact {
            term,
            source,
            premises: Vec::new(),
            rule_id: None,
        })
    }

    pub fn derived(term: Term, rule_id: impl Into<String>, premises: Vec<Term>) -> Result<Self, FactError> {
        if !term.is_ground() {
            return Err(FactError::NonGround(term));
        }
        if premises.is_empty() {
            return Err(FactError::MissingDerivation);
        }
        Ok(Fact {
            term,
            source: Source::RuleFired,
            premises,
            rule_id: Some(rule_id.into()),
        })
    }

    /// `[(IsA Levodopa pill), 'Given']`
    pub fn trace_line(&self) -> String {
        format!("[{}, '{}']", self.term, self.source)
    }
}

/// Insertion-ordered set of facts indexed by functor and arity.
#[derive(Debug, Clone, Default)]
pub struct FactStore {
    facts: Vec<Fact>,
    by_term: HashMap<Term, usize>,
    by_key: HashMap<(String, usize), Vec<usize>>,
}

impl FactStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.facts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }

    /// Adds a fact unless its term is already present. Returns whether the
    /// store changed; the first assertion's provenance is kept.
    pub fn insert(&mut self, fact: Fact) -> bool {
        if self.by_term.contains_key(&fact.term) {
            return false;
        }
        let idx = self.facts.len();
        if let Some(key) = fact.term.index_key() {
            self.by_key.entry(key).or_default().push(idx);
        }
        self.by_term.insert(fact.term.clone(), idx);
        self.facts.push(fact);
        true
    }

    /// Functional update: a copy of this store with `facts` added.
    pub fn with_facts(&self, facts: impl IntoIterator<Item = Fact>) -> FactStore {
        let mut next = self.clone();
        next.extend(facts);
        next
    }

    pub fn contains(&self, term: &Term) -> bool {
        self.by_term.contains_key(term)
    }

    pub fn get(&self, term: &Term) -> Option<&Fact> {
        self.by_term.get(term).map(|&i| &self.facts[i])
    }

    pub fn facts(&self) -> &[Fact] {
        &self.facts
    }

    pub fn iter(&self) -> impl Iterator<Item = &Fact> {
        self.facts.iter()
    }

    fn candidates(&self, pattern: &Term) -> Vec<usize> {
        match pattern.index_key() {
            Some(key) => self.by_key.get(&key).cloned().unwrap_or_default(),
            None => (0..self.facts.len()).collect(),
        }
    }

    /// Facts unifying with `pattern` under `env`, in insertion order, with
    /// the extended bindings.
    pub fn matches<'a>(&'a self, pattern: &Term, env: &Bindings) -> Vec<(&'a Fact, Bindings)> {
        let pattern = env.apply(pattern);
        self.candidates(&pattern)
            .into_iter()
            .filter_map(|i| {
                let fact = &self.facts[i];
                unify(&pattern, &fact.term, env).map(|b| (fact, b))
            })
            .collect()
    }

    /// One binding set per stored fact unifying with `pattern`.
    pub fn query(&self, pattern: &Term) -> Vec<Bindings> {
        self.matches(pattern, &Bindings::new())
            .into_iter()
            .map(|(_, b)| b)
            .collect()
    }
}

impl Extend<Fact> for FactStore {
    fn extend<I: IntoIterator<Item = Fact>>(&mut self, iter: I) {
        for fact in iter {
            self.insert(fact);
        }
    }
}

impl FromIterator<Fact> for FactStore {
    fn from_iter<I: IntoIterator<Item = Fact>>(iter: I) -> Self {
        let mut store = FactStore::new();
        store.extend(iter);
        store
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::knowledge::parse_term;

    fn fact(s: &str, src: Source) -> Fact {
        Fact::new(parse_term(s).unwrap(), src).unwrap()
    }

    fn trace_store() -> FactStore {
        [
            fact("(IsA Levodopa pill)", Source::Given),
            fact("(AtLocation pill cabinet)", Source::ConceptNet),
            fact("(IsA Wednesday weekday)", Source::ConceptNet),
            fact("(IsA Wednesday day)", Source::ConceptNet),
        ]
        .into_iter()
        .collect()
    }

    #[test]
    fn query_in_insertion_order() {
        let store = trace_store();
        let got: Vec<_> = store
            .query(&parse_term("(IsA Wednesday ?w)").unwrap())
            .iter()
            .map(|b| b.lookup("w").unwrap())
            .collect();
        assert_eq!(got, vec![Term::atom("weekday"), Term::atom("day")]);
    }

    #[test]
    fn query_edge_cases() {
        let store = trace_store();
        assert!(store.query(&parse_term("(IsA Friday ?w)").unwrap()).is_empty());
        let hits = store.query(&parse_term("(IsA Levodopa pill)").unwrap());
        assert_eq!(hits, vec![Bindings::new()]);
        assert_eq!(store.query(&parse_term("?any").unwrap()).len(), 4);
    }

    #[test]
    fn first_writer_wins() {
        let mut store = trace_store();
        assert!(!store.insert(fact("(IsA Levodopa pill)", Source::ConceptNet)));
        assert_eq!(store.len(), 4);
        assert_eq!(store.get(&parse_term("(IsA Levodopa pill)").unwrap()).unwrap().source, Source::Given);
    }

    #[test]
    fn fact_invariants() {
        assert!(matches!(
            Fact::new(parse_term("(IsA ?x pill)").unwrap(), Source::Given),
            Err(FactError::NonGround(_))
        ));
        assert_eq!(
            Fact::new(Term::atom("a"), Source::RuleFired),
            Err(FactError::RuleFiredWithoutDerivation)
        );
        assert_eq!(Fact::derived(Term::atom("a"), "r", vec![]), Err(FactError::MissingDerivation));
    }

    #[test]
    fn source_tags_round_trip() {
        for src in Source::ALL {
            assert_eq!(src.label().parse::<Source>().unwrap(), src);
            let json = serde_json::to_string(&src).unwrap();
            assert_eq!(json, format!("\"{}\"", src.label()));
        }
        assert!("Wikipedia".parse::<Source>().is_err());
    }

    #[test]
    fn trace_line_shape() {
        assert_eq!(fact("(IsA Levodopa pill)", Source::Given).trace_line(), "[(IsA Levodopa pill), 'Given']");
        assert_eq!(
            fact("(atTime appt '1pm')", Source::Calendar).trace_line(),
            "[(atTime appt '1pm'), 'calendar']"
        );
    }
}
