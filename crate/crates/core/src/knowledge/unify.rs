use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::Term;

/// Variable substitution. Stored triangularly; [`Bindings::apply`] resolves
/// chains fully, so applying the result again changes nothing.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bindings(BTreeMap<String, Term>);

impl Bindings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, var: &str) -> Option<&Term> {
        self.0.get(var)
    }

    /// Fully resolved value of `var`, if bound.
    pub fn lookup(&self, var: &str) -> Option<Term> {
        self.0.get(var).map(|t| self.apply(t))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Term)> {
        self.0.iter()
    }

    /// Binds `var` to `value` when that keeps the substitution acyclic.
    pub fn bind(&self, var: &str, value: Term) -> Option<Bindings> {
        let value = self.apply(&value);
        if value == Term::Variable(var.to_string()) {
            return Some(self.clone());
        }
        if occurs(var, &value) {
            return None;
        }
        let mut next = self.clone();
        next.0.insert(var.to_string(), value);
        Some(next)
    }

    pub fn apply(&self, term: &Term) -> Term {
        match term {
            Term::Variable(name) => match self.0.get(name) {
                Some(bound) => self.apply(bound),
                None => term.clone(),
            },
            Term::Compound { functor, args } => Term::Compound {
                functor: functor.clone(),
                args: args.iter().map(|a| self.apply(a)).collect(),
            },
            _ => term.clone(),
        }
    }

    /// The substitution with every right-hand side fully resolved.
    pub fn resolved(&self) -> BTreeMap<String, Term> {
        self.0.keys().map(|k| (k.clone(), self.apply(&self.0[k]))).collect()
    }
}

impl FromIterator<(String, Term)> for Bindings {
    fn from_iter<I: IntoIterator<Item = (String, Term)>>(iter: I) -> Self {
        Bindings(iter.into_iter().collect())
    }
}

fn occurs(var: &str, term: &Term) -> bool {
    match term {
        Term::Variable(name) => name == var,
        Term::Compound { args, .. } => args.iter().any(|a| occurs(var, a)),
        _ => false,
    }
}

/// Most general unifier of `a` and `b` extending `env`, with occurs check.
pub fn unify(a: &Term, b: &Term, env: &Bindings) -> Option<Bindings> {
    let a = env.apply(a);
    let b = env.apply(b);
    unify_resolved(&a, &b, env.clone())
}

fn unify_resolved(a: &Term, b: &Term, env: Bindings) -> Option<Bindings> {
    match (a, b) {
        (Term::Variable(x), _) => env.bind(x, b.clone()),
        (_, Term::Variable(y)) => env.bind(y, a.clone()),
        (
            Term::Compound { functor: fa, args: aa },
            Term::Compound { functor: fb, args: ab },
        ) => {
            if fa != fb || aa.len() != ab.len() {
                return None;
            }
            let mut env = env;
            for (x, y) in aa.iter().zip(ab) {
                let x = env.apply(x);
                let y = env.apply(y);
                env = unify_resolved(&x, &y, env)?;
            }
            Some(env)
        }
        _ if a == b => Some(env),
        _ => None,
    }
}
