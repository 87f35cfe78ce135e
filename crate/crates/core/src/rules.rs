//! Horn rules with pluggable builtin relations, evaluated bottom-up to a
//! fixpoint. Every derived fact records the rule and premises that produced
//! it so explanations can walk back through the derivation.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::knowledge::{parse_terms, Bindings, Fact, FactStore, ParseError, Term};

pub const DEFAULT_MAX_DERIVED: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("rule `{0}`: expected `head <- literal...`")]
    Malformed(String),
    #[error("rule `{rule}`: head variable ?{variable} does not occur in the body")]
    RangeRestrictionViolation { rule: String, variable: String },
    #[error("rule `{0}`: the body must start with a pattern literal")]
    BuiltinFirst(String),
    #[error("rule `{rule}`: builtin `{builtin}` has more than one argument left unbound")]
    UngroundedBuiltin { rule: String, builtin: String },
    #[error("rule `{rule}`: builtin `{builtin}` expects {expected} arguments")]
    BuiltinArity { rule: String, builtin: String, expected: usize },
    #[error("builtin `{builtin}` called with two or more unbound arguments")]
    InsufficientlyGround { builtin: String },
    #[error("rule `{0}` instantiated a non-ground head")]
    NonGroundHead(String),
    #[error("derived more than {0} facts; aborting")]
    DepthExceeded(usize),
    #[error("line {line}: {message}")]
    File { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Literal {
    Pattern { term: Term },
    Builtin { name: String, args: Vec<Term> },
}

impl Literal {
    pub fn term(&self) -> Term {
        match self {
            Literal::Pattern { term } => term.clone(),
            Literal::Builtin { name, args } => Term::compound(name.clone(), args.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rule {
    pub id: String,
    pub head: Term,
    pub body: Vec<Literal>,
}

impl Rule {
    pub fn patterns(&self) -> impl Iterator<Item = &Term> {
        self.body.iter().filter_map(|l| match l {
            Literal::Pattern { term } => Some(term),
            Literal::Builtin { .. } => None,
        })
    }
}

impl std::fmt::Display for Rule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} <-", self.head)?;
        for lit in &self.body {
            write!(f, " {}", lit.term())?;
        }
        Ok(())
    }
}

/// A backward decomposition rule: the head goal holds when every body goal
/// holds. Used by the explanation search, never forward chained.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoalRule {
    pub id: String,
    pub head: Term,
    pub body: Vec<Term>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Derivation {
    pub conclusion: Fact,
    pub rule_id: String,
    pub premises: Vec<Fact>,
}

pub type BuiltinFn = fn(&[Term], &Bindings) -> Result<Vec<Bindings>, RuleError>;

#[derive(Clone, Copy)]
struct BuiltinEntry {
    arity: usize,
    eval: BuiltinFn,
}

/// Builtin relations available to rule bodies, by name.
#[derive(Clone)]
pub struct Builtins {
    entries: BTreeMap<String, BuiltinEntry>,
}

impl std::fmt::Debug for Builtins {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.entries.keys()).finish()
    }
}

impl Default for Builtins {
    fn default() -> Self {
        let mut b = Builtins::empty();
        b.register("difference", 3, |args, env| eval_difference(&args[0], &args[1], &args[2], env));
        b
    }
}

impl Builtins {
    pub fn empty() -> Self {
        Builtins {
            entries: BTreeMap::new(),
        }
    }

    pub fn register(&mut self, name: impl Into<String>, arity: usize, eval: BuiltinFn) {
        self.entries.insert(name.into(), BuiltinEntry { arity, eval });
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.contains_key(name)
    }

    fn arity(&self, name: &str) -> Option<usize> {
        self.entries.get(name).map(|e| e.arity)
    }

    fn eval(&self, name: &str, args: &[Term], env: &Bindings) -> Result<Vec<Bindings>, RuleError> {
        match self.entries.get(name) {
            Some(entry) => (entry.eval)(args, env),
            None => Ok(Vec::new()),
        }
    }
}

/// The integer relation `a - b = d`. With one argument unbound it is solved
/// for; with none it is a test.
pub fn eval_difference(a: &Term, b: &Term, d: &Term, env: &Bindings) -> Result<Vec<Bindings>, RuleError> {
    let resolved = [env.apply(a), env.apply(b), env.apply(d)];
    let mut values = [None; 3];
    let mut unbound = Vec::new();
    for (i, t) in resolved.iter().enumerate() {
        match t {
            Term::Integer(n) => values[i] = Some(*n),
            Term::Variable(name) => unbound.push((i, name.clone())),
            _ => return Ok(Vec::new()),
        }
    }
    if unbound.len() > 1 {
        return Err(RuleError::InsufficientlyGround {
            builtin: "difference".into(),
        });
    }
    let solved = match (values, unbound.first()) {
        ([Some(a), Some(b), Some(d)], None) => return Ok(if a.checked_sub(b) == Some(d) { vec![env.clone()] } else { vec![] }),
        ([None, Some(b), Some(d)], Some((_, v))) => b.checked_add(d).map(|x| (v, x)),
        ([Some(a), None, Some(d)], Some((_, v))) => a.checked_sub(d).map(|x| (v, x)),
        ([Some(a), Some(b), None], Some((_, v))) => a.checked_sub(b).map(|x| (v, x)),
        _ => None,
    };
    Ok(solved
        .and_then(|(var, value)| env.bind(var, Term::Integer(value)))
        .into_iter()
        .collect())
}

/// Names that stay constants when a rule is read with bare-word variables.
pub type Vocabulary = HashSet<String>;

fn bare_words_to_variables(term: &Term, constants: &Vocabulary) -> Term {
    match term {
        Term::Atom(name) if !constants.contains(name) => Term::Variable(name.clone()),
        Term::Compound { functor, args } => Term::Compound {
            functor: functor.clone(),
            args: args.iter().map(|a| bare_words_to_variables(a, constants)).collect(),
        },
        other => other.clone(),
    }
}

/// Reads rules. Variables are `?name`; when a vocabulary is supplied, any
/// bare argument atom outside it is read as a variable too.
#[derive(Debug, Clone, Default)]
pub struct RuleParser {
    builtins: Builtins,
    constants: Option<Vocabulary>,
}

impl RuleParser {
    pub fn new(builtins: Builtins) -> Self {
        RuleParser {
            builtins,
            constants: None,
        }
    }

    pub fn with_vocabulary(mut self, constants: Vocabulary) -> Self {
        self.constants = Some(constants);
        self
    }

    fn normalize(&self, term: Term) -> Term {
        match &self.constants {
            Some(c) => bare_words_to_variables(&term, c),
            None => term,
        }
    }

    fn split(&self, id: &str, text: &str, arrow: &str) -> Result<(Term, Vec<Term>), RuleError> {
        let mut terms = parse_terms(text)?.into_iter();
        let head = terms.next().ok_or_else(|| RuleError::Malformed(id.into()))?;
        if terms.next() != Some(Term::atom(arrow)) {
            return Err(RuleError::Malformed(id.into()));
        }
        let body: Vec<Term> = terms.collect();
        if body.is_empty() || body.iter().any(|t| t.as_atom() == Some(arrow)) {
            return Err(RuleError::Malformed(id.into()));
        }
        Ok((self.normalize(head), body.into_iter().map(|t| self.normalize(t)).collect()))
    }

    pub fn parse(&self, id: &str, text: &str) -> Result<Rule, RuleError> {
        let (head, body_terms) = self.split(id, text, "<-")?;
        let mut body = Vec::with_capacity(body_terms.len());
        let mut bound: BTreeSet<String> = BTreeSet::new();
        for term in body_terms {
            let name = term.functor().unwrap_or_default().to_string();
            if let Some(arity) = self.builtins.arity(&name) {
                if body.is_empty() {
                    return Err(RuleError::BuiltinFirst(id.into()));
                }
                if term.arity() != arity {
                    return Err(RuleError::BuiltinArity {
                        rule: id.into(),
                        builtin: name,
                        expected: arity,
                    });
                }
                let vars = term.variables();
                if vars.iter().filter(|v| !bound.contains(*v)).count() > 1 {
                    return Err(RuleError::UngroundedBuiltin {
                        rule: id.into(),
                        builtin: name,
                    });
                }
                bound.extend(vars);
                body.push(Literal::Builtin {
                    name,
                    args: term.args().to_vec(),
                });
            } else {
                bound.extend(term.variables());
                body.push(Literal::Pattern { term });
            }
        }
        if let Some(variable) = head.variables().into_iter().find(|v| !bound.contains(v)) {
            return Err(RuleError::RangeRestrictionViolation {
                rule: id.into(),
                variable,
            });
        }
        Ok(Rule {
            id: id.into(),
            head,
            body,
        })
    }

    pub fn parse_goal(&self, id: &str, text: &str) -> Result<GoalRule, RuleError> {
        let (head, body) = self.split(id, text, "<=")?;
        Ok(GoalRule {
            id: id.into(),
            head,
            body,
        })
    }

    /// Parses a rule file: entries `rule <id>: <head> <- <literal>...` or
    /// `goal <id>: <head> <= <goal>...`, separated by blank lines. An entry
    /// may continue over several lines; `#` starts a comment line.
    pub fn parse_file(&self, text: &str) -> Result<RuleFile, RuleError> {
        let mut file = RuleFile::default();
        let mut entry: Option<(usize, String)> = None;
        let lines = text.lines().map(Some).chain(std::iter::once(None));
        for (i, line) in lines.enumerate() {
            let trimmed = line.map(str::trim);
            if trimmed.is_some_and(|l| l.starts_with('#')) {
                continue;
            }
            match trimmed {
                Some(l) if !l.is_empty() => match &mut entry {
                    Some((_, buf)) => {
                        buf.push(' ');
                        buf.push_str(l);
                    }
                    None => entry = Some((i + 1, l.to_string())),
                },
                _ => {
                    if let Some((line, buf)) = entry.take() {
                        self.parse_entry(line, &buf, &mut file)?;
                    }
                }
            }
        }
        Ok(file)
    }

    fn parse_entry(&self, line: usize, entry: &str, file: &mut RuleFile) -> Result<(), RuleError> {
        let at_line = |e: RuleError| RuleError::File {
            line,
            message: e.to_string(),
        };
        let (kind, rest) = entry.split_once(char::is_whitespace).ok_or(RuleError::File {
            line,
            message: "expected `rule <id>: ...` or `goal <id>: ...`".into(),
        })?;
        let (id, body) = rest.split_once(':').ok_or(RuleError::File {
            line,
            message: "missing `:` after the rule id".into(),
        })?;
        let id = id.trim();
        match kind {
            "rule" => file.rules.push(self.parse(id, body).map_err(at_line)?),
            "goal" => file.goals.push(self.parse_goal(id, body).map_err(at_line)?),
            other => {
                return Err(RuleError::File {
                    line,
                    message: format!("unknown entry kind `{other}`"),
                })
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RuleFile {
    pub rules: Vec<Rule>,
    pub goals: Vec<GoalRule>,
}

/// Parses a single rule `head <- literal...` with `?`-prefixed variables and
/// the default builtins. The rule id is `rule`.
pub fn parse_rule(text: &str) -> Result<Rule, RuleError> {
    RuleParser::default().parse("rule", text)
}

/// Result of [`ForwardChainer::run`].
#[derive(Debug, Clone)]
pub struct Closure {
    pub store: FactStore,
    pub derivations: Vec<Derivation>,
}

#[derive(Debug, Clone)]
pub struct ForwardChainer {
    builtins: Builtins,
    max_derived: usize,
}

impl Default for ForwardChainer {
    fn default() -> Self {
        ForwardChainer {
            builtins: Builtins::default(),
            max_derived: DEFAULT_MAX_DERIVED,
        }
    }
}

impl ForwardChainer {
    pub fn new(builtins: Builtins) -> Self {
        ForwardChainer {
            builtins,
            ..Default::default()
        }
    }

    pub fn with_max_derived(mut self, cap: usize) -> Self {
        self.max_derived = cap;
        self
    }

    fn solve<'s>(
        &self,
        store: &'s FactStore,
        body: &[Literal],
        env: Bindings,
        premises: Vec<&'s Fact>,
        out: &mut Vec<(Bindings, Vec<&'s Fact>)>,
    ) -> Result<(), RuleError> {
        let Some((first, rest)) = body.split_first() else {
            out.push((env, premises));
            return Ok(());
        };
        match first {
            Literal::Pattern { term } => {
                for (fact, next) in store.matches(term, &env) {
                    let mut p = premises.clone();
                    p.push(fact);
                    self.solve(store, rest, next, p, out)?;
                }
            }
            Literal::Builtin { name, args } => {
                for next in self.builtins.eval(name, args, &env)? {
                    self.solve(store, rest, next, premises.clone(), out)?;
                }
            }
        }
        Ok(())
    }

    /// All body instantiations of `rule` against `store`, as
    /// (bindings, matched facts) in deterministic order.
    pub fn instantiate<'s>(&self, store: &'s FactStore, rule: &Rule) -> Result<Vec<(Bindings, Vec<&'s Fact>)>, RuleError> {
        let mut out = Vec::new();
        self.solve(store, &rule.body, Bindings::new(), Vec::new(), &mut out)?;
        Ok(out)
    }

    /// Least fixpoint of `rules` over `store`. Each round matches every rule
    /// against the facts present at the start of the round.
    pub fn run(&self, store: &FactStore, rules: &[Rule]) -> Result<Closure, RuleError> {
        let mut current = store.clone();
        let mut derivations = Vec::new();
        loop {
            let snapshot = current.clone();
            let mut added = false;
            for rule in rules {
                for (env, premises) in self.instantiate(&snapshot, rule)? {
                    let head = env.apply(&rule.head);
                    if !head.is_ground() {
                        return Err(RuleError::NonGroundHead(rule.id.clone()));
                    }
                    if current.contains(&head) {
                        continue;
                    }
                    let premise_terms = premises.iter().map(|f| f.term.clone()).collect();
                    let fact = Fact::derived(head, rule.id.clone(), premise_terms)
                        .map_err(|_| RuleError::NonGroundHead(rule.id.clone()))?;
                    current.insert(fact.clone());
                    derivations.push(Derivation {
                        conclusion: fact,
                        rule_id: rule.id.clone(),
                        premises: premises.into_iter().cloned().collect(),
                    });
                    added = true;
                    if derivations.len() > self.max_derived {
                        return Err(RuleError::DepthExceeded(self.max_derived));
                    }
                }
            }
            if !added {
                return Ok(Closure {
                    store: current,
                    derivations,
                });
            }
        }
    }
}

/// Forward chains with the default builtins and derivation cap.
pub fn forward_chain(store: &FactStore, rules: &[Rule]) -> Result<(FactStore, Vec<Derivation>), RuleError> {
    let Closure { store, derivations } = ForwardChainer::default().run(store, rules)?;
    Ok((store, derivations))
}
