//! Answers "why?" about a hint.
//!
//! A question becomes a ground query such as `(onDate Levodopa Wednesday)`.
//! Its concepts select tagged facts from the scenario and the knowledge base,
//! the constraint rules are forward chained over them, and a goal-tree search
//! from the query picks the smallest supporting tree.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hint::AssistiveAction;
use crate::knowledge::{normalize_triple, parse_kb, unify, Bindings, Fact, FactStore, Source, Term};
use crate::rules::{ForwardChainer, GoalRule, Rule, RuleError, RuleParser};
use crate::scenario::{Constraint, Day, Slot, TaskState};

pub const BUNDLED_RULES: &str = include_str!("../data/explain.rules");
pub const BUNDLED_KB: &str = include_str!("../data/conceptnet_mini.kb");

const DEFAULT_MAX_DEPTH: usize = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExplainError {
    #[error("there is no earlier hint to explain")]
    NoContext,
    #[error("cannot tell what `{0}` asks about")]
    UnrecognizedQuestion(String),
    #[error("no explanation supports {0}")]
    NoExplanation(Term),
    #[error(transparent)]
    Rules(#[from] RuleError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Query {
    pub term: Term,
    /// The hint or question being interrogated.
    pub origin: String,
}

fn words(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric() && c != '_')
        .filter(|w| !w.is_empty())
        .map(str::to_lowercase)
        .collect()
}

fn day_in(words: &[String]) -> Option<Day> {
    words.iter().find_map(|w| {
        let d = Day::parse(w).ok()?;
        // bare digits are not day names here
        (!w.chars().all(|c| c.is_ascii_digit())).then_some(d)
    })
}

/// Turns a question into a query. A bare "why" refers to the operator of
/// `context`; otherwise medication and day are picked out by keyword, with
/// gaps filled from `context`.
pub fn parse_question(question: &str, context: Option<&AssistiveAction>, state: &TaskState) -> Result<Query, ExplainError> {
    let ws = words(question);
    let operator = context.and_then(|a| a.operator.as_ref());
    let med = ws
        .iter()
        .find_map(|w| state.medications.iter().find(|m| m.name.to_lowercase() == *w))
        .map(|m| m.name.clone());
    let day = day_in(&ws);
    let origin = match context {
        Some(a) if med.is_none() && day.is_none() => a.utterance.clone(),
        _ => question.trim().to_string(),
    };
    let med = med.or_else(|| operator.map(|o| o.med.clone()));
    let day = day.or_else(|| operator.map(|o| o.day));
    match (med, day) {
        (Some(med), Some(day)) => Ok(Query {
            term: Term::compound("onDate", vec![Term::atom(med), Term::atom(day.name())]),
            origin,
        }),
        _ if operator.is_none() && ws.iter().all(|w| w == "why") => Err(ExplainError::NoContext),
        _ => Err(ExplainError::UnrecognizedQuestion(question.trim().to_string())),
    }
}

/// Scenario facts with their source tags, in the order they are reported.
pub fn tagged_state_facts(state: &TaskState) -> Vec<Fact> {
    let mut out = Vec::new();
    let mut push = |term: Term, source: Source| {
        if let Ok(f) = Fact::new(normalize_triple(term), source) {
            out.push(f);
        }
    };
    for m in &state.medications {
        push(Term::compound("IsA", vec![Term::atom(&m.name), Term::atom("pill")]), Source::Given);
    }
    for t in &state.given {
        push(t.clone(), Source::Given);
    }
    for m in &state.medications {
        if let Constraint::FixedSlot(slot) = m.constraint {
            push(
                Term::compound("dailyAt", vec![Term::atom(&m.name), Term::atom(slot.word())]),
                Source::Given,
            );
        }
    }
    for p in &state.preferences {
        push(p.term().clone(), Source::GivenPreference);
    }
    for t in &state.knowledge {
        push(t.clone(), Source::GivenKnowledge);
    }
    for a in &state.calendar {
        let period = state.time_to_slot(a.clock).period_word();
        push(
            Term::compound("IsA", vec![Term::text(a.clock.spoken()), Term::atom(period)]),
            Source::GivenKnowledge,
        );
    }
    for a in &state.calendar {
        push(
            Term::compound("atTime", vec![Term::atom(&a.name), Term::text(a.clock.spoken())]),
            Source::Calendar,
        );
        push(
            Term::compound("onDay", vec![Term::atom(&a.name), Term::atom(a.day.name())]),
            Source::Calendar,
        );
    }
    out
}

fn push_unique(out: &mut Vec<Term>, t: &Term) {
    if !out.contains(t) {
        out.push(t.clone());
    }
}

/// One node of a goal tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GoalTree {
    /// A fact from the set; derived facts carry their premises as children.
    Fact {
        term: Term,
        source: Source,
        #[serde(skip_serializing_if = "Option::is_none")]
        rule: Option<String>,
        children: Vec<GoalTree>,
    },
    /// A query split into subgoals by a goal rule.
    Goal {
        term: Term,
        rule: String,
        children: Vec<GoalTree>,
    },
}

impl GoalTree {
    pub fn term(&self) -> &Term {
        match self {
            GoalTree::Fact { term, .. } | GoalTree::Goal { term, .. } => term,
        }
    }

    pub fn children(&self) -> &[GoalTree] {
        match self {
            GoalTree::Fact { children, .. } | GoalTree::Goal { children, .. } => children,
        }
    }

    fn distinct_terms<'a>(&'a self, out: &mut BTreeSet<&'a Term>) {
        out.insert(self.term());
        self.children().iter().for_each(|c| c.distinct_terms(out));
    }

    pub fn size(&self) -> usize {
        let mut set = BTreeSet::new();
        self.distinct_terms(&mut set);
        set.len()
    }

    /// Leaf facts left to right, with their sources.
    pub fn leaves(&self) -> Vec<(&Term, Source)> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<(&'a Term, Source)>) {
        match self {
            GoalTree::Fact { term, source, children, .. } if children.is_empty() => out.push((term, *source)),
            _ => self.children().iter().for_each(|c| c.collect_leaves(out)),
        }
    }

    pub fn contains(&self, term: &Term) -> bool {
        self.term() == term || self.children().iter().any(|c| c.contains(term))
    }

    /// The decomposition node farthest from the root, first in preorder on ties.
    fn deepest_goal(&self) -> Option<&GoalTree> {
        fn walk<'a>(node: &'a GoalTree, depth: usize, best: &mut Option<(usize, &'a GoalTree)>) {
            if let GoalTree::Goal { children, .. } = node {
                if best.is_none_or(|(d, _)| depth > d) {
                    *best = Some((depth, node));
                }
                children.iter().for_each(|c| walk(c, depth + 1, best));
            }
        }
        let mut best = None;
        walk(self, 0, &mut best);
        best.map(|(_, n)| n)
    }

    fn render(&self, indent: usize, out: &mut String) {
        let pad = "  ".repeat(indent);
        match self {
            GoalTree::Fact { term, source, rule, .. } => {
                let via = rule.as_ref().map(|r| format!(" by {r}")).unwrap_or_default();
                out.push_str(&format!("{pad}{term} [{source}{via}]\n"));
            }
            GoalTree::Goal { term, rule, .. } => out.push_str(&format!("{pad}{term} <= {rule}\n")),
        }
        self.children().iter().for_each(|c| c.render(indent + 1, out));
    }
}

impl fmt::Display for GoalTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        self.render(0, &mut out);
        f.write_str(out.trim_end())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub triple: Term,
    pub source: Source,
}

impl TraceEntry {
    /// `[(IsA Levodopa pill), 'Given']`
    pub fn line(&self) -> String {
        format!("[{}, '{}']", self.triple, self.source.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Explanation {
    pub query: Term,
    pub justification: Vec<Term>,
    pub chain: Vec<Term>,
    pub text: String,
    pub trace: Vec<TraceEntry>,
    pub tree: GoalTree,
}

impl Explanation {
    pub fn trace_lines(&self) -> Vec<String> {
        self.trace.iter().map(TraceEntry::line).collect()
    }
}

fn rename(term: &Term, suffix: &str) -> Term {
    match term {
        Term::Variable(v) => Term::Variable(format!("{v}#{suffix}")),
        Term::Compound { functor, args } => Term::Compound {
            functor: functor.clone(),
            args: args.iter().map(|a| rename(a, suffix)).collect(),
        },
        other => other.clone(),
    }
}

/// Replaces variables by their first-occurrence index so that variants
/// compare equal.
fn canonical(term: &Term) -> Term {
    fn go(t: &Term, seen: &mut Vec<String>) -> Term {
        match t {
            Term::Variable(v) => {
                let i = seen.iter().position(|s| s == v).unwrap_or_else(|| {
                    seen.push(v.clone());
                    seen.len() - 1
                });
                Term::Variable(i.to_string())
            }
            Term::Compound { functor, args } => Term::Compound {
                functor: functor.clone(),
                args: args.iter().map(|a| go(a, seen)).collect(),
            },
            other => other.clone(),
        }
    }
    go(term, &mut Vec::new())
}

struct Search<'a> {
    facts: &'a FactStore,
    goals: &'a [GoalRule],
    max_depth: usize,
    fresh: std::cell::Cell<usize>,
}

type Solution = (Bindings, GoalTree);

impl Search<'_> {
    fn fact_tree(&self, fact: &Fact) -> GoalTree {
        let children = fact
            .premises
            .iter()
            .filter_map(|p| self.facts.get(p))
            .map(|p| self.fact_tree(p))
            .collect();
        GoalTree::Fact {
            term: fact.term.clone(),
            source: fact.source,
            rule: fact.rule_id.clone(),
            children,
        }
    }

    fn solve(&self, goal: &Term, env: &Bindings, depth: usize, path: &mut Vec<Term>) -> Vec<Solution> {
        let g = env.apply(goal);
        let key = canonical(&g);
        if depth > self.max_depth || path.contains(&key) {
            return Vec::new();
        }
        let mut out: Vec<Solution> = self
            .facts
            .matches(&g, env)
            .into_iter()
            .map(|(fact, b)| (b, self.fact_tree(fact)))
            .collect();
        path.push(key);
        for rule in self.goals {
            let n = self.fresh.get();
            self.fresh.set(n + 1);
            let suffix = n.to_string();
            let head = rename(&rule.head, &suffix);
            let Some(start) = unify(&head, &g, env) else {
                continue;
            };
            let body: Vec<Term> = rule.body.iter().map(|t| rename(t, &suffix)).collect();
            for (b, children) in self.solve_all(&body, start, depth + 1, path) {
                let term = b.apply(&g);
                out.push((
                    b,
                    GoalTree::Goal {
                        term,
                        rule: rule.id.clone(),
                        children,
                    },
                ));
            }
        }
        path.pop();
        out
    }

    fn solve_all(&self, goals: &[Term], env: Bindings, depth: usize, path: &mut Vec<Term>) -> Vec<(Bindings, Vec<GoalTree>)> {
        let Some((first, rest)) = goals.split_first() else {
            return vec![(env, Vec::new())];
        };
        let mut out = Vec::new();
        for (b, tree) in self.solve(first, &env, depth, path) {
            for (b2, mut trees) in self.solve_all(rest, b, depth, path) {
                trees.insert(0, tree.clone());
                out.push((b2, trees));
            }
        }
        out
    }
}

fn score(tree: &GoalTree) -> (usize, Vec<u8>, String) {
    let ranks = tree.leaves().iter().map(|(_, s)| s.support_rank()).collect();
    (tree.size(), ranks, format!("{tree}"))
}

/// The explanation synthesizer with its knowledge base and constraint rules.
#[derive(Debug, Clone)]
pub struct Explainer {
    pub kb: FactStore,
    pub rules: Vec<Rule>,
    pub goals: Vec<GoalRule>,
    pub max_depth: usize,
    chainer: ForwardChainer,
}

impl Explainer {
    pub fn new(kb: FactStore, rules: Vec<Rule>, goals: Vec<GoalRule>) -> Self {
        Explainer {
            kb,
            rules,
            goals,
            max_depth: DEFAULT_MAX_DEPTH,
            chainer: ForwardChainer::default(),
        }
    }

    pub fn bundled() -> Self {
        let kb = parse_kb(BUNDLED_KB).expect("bundled knowledge base parses");
        let file = RuleParser::default()
            .parse_file(BUNDLED_RULES)
            .expect("bundled rules parse");
        Explainer::new(kb, file.rules, file.goals)
    }

    pub fn with_chainer(mut self, chainer: ForwardChainer) -> Self {
        self.chainer = chainer;
        self
    }

    /// The query's arguments, each followed by its `IsA` generalizations
    /// among the scenario facts.
    pub fn extract_concepts(&self, query: &Term, state: &TaskState) -> Vec<Term> {
        let query = normalize_triple(query.clone());
        let scenario = tagged_state_facts(state);
        let mut out = Vec::new();
        for arg in query.args() {
            for leaf in arg.leaves() {
                if matches!(leaf, Term::Variable(_)) {
                    continue;
                }
                push_unique(&mut out, leaf);
                for f in &scenario {
                    let t = &f.term;
                    if matches!(t.functor(), Some("IsA" | "isa")) && t.arity() == 2 && &t.args()[0] == leaf {
                        push_unique(&mut out, &t.args()[1]);
                    }
                }
            }
        }
        out
    }

    /// Facts mentioning any concept, grouped by source in trace order.
    /// Within a group, facts about earlier concepts come first. Calendar
    /// entries pull in their activity's other entries.
    pub fn gather_facts(&self, concepts: &[Term], state: &TaskState) -> FactStore {
        let mut concepts = concepts.to_vec();
        let mut candidates = tagged_state_facts(state);
        candidates.extend(self.kb.iter().cloned());
        let calendar: Vec<&Fact> = candidates.iter().filter(|f| f.source == Source::Calendar).collect();
        let subjects: Vec<Term> = calendar
            .iter()
            .filter(|f| concepts.iter().any(|c| f.term.mentions(c)))
            .filter_map(|f| f.term.args().first().cloned())
            .collect();
        for s in &subjects {
            push_unique(&mut concepts, s);
            for f in calendar.iter().filter(|f| f.term.args().first() == Some(s)) {
                for obj in &f.term.args()[1..] {
                    push_unique(&mut concepts, obj);
                }
            }
        }
        let mut picked: Vec<&Fact> = candidates
            .iter()
            .filter(|f| concepts.iter().any(|c| f.term.mentions(c)))
            .collect();
        let subject_rank = |f: &Fact| {
            f.term
                .args()
                .first()
                .and_then(|s| concepts.iter().position(|c| c == s))
                .unwrap_or(usize::MAX)
        };
        picked.sort_by_key(|f| (f.source.trace_rank(), subject_rank(f)));
        picked.into_iter().cloned().collect()
    }

    pub fn check_constraints(&self, facts: &FactStore) -> Result<FactStore, ExplainError> {
        Ok(self.chainer.run(facts, &self.rules)?.store)
    }

    /// Builds the smallest goal tree for `query` over the closed fact set.
    pub fn synthesize(&self, query: &Term, facts: &FactStore) -> Result<Explanation, ExplainError> {
        let query = normalize_triple(query.clone());
        let search = Search {
            facts,
            goals: &self.goals,
            max_depth: self.max_depth,
            fresh: std::cell::Cell::new(0),
        };
        let tree = search
            .solve(&query, &Bindings::new(), 0, &mut Vec::new())
            .into_iter()
            .map(|(_, t)| t)
            .filter(|t| t.term().is_ground())
            .min_by_key(score)
            .ok_or_else(|| ExplainError::NoExplanation(query.clone()))?;

        let support: Vec<&GoalTree> = match tree.deepest_goal() {
            Some(node) => node.children().iter().collect(),
            None => vec![&tree],
        };
        let justification: Vec<Term> = support.iter().map(|n| n.term().clone()).collect();

        let position: HashMap<&Term, usize> = facts.iter().enumerate().map(|(i, f)| (&f.term, i)).collect();
        let is_activity = |t: &Term| {
            facts.contains(&Term::compound("IsA", vec![t.clone(), Term::atom("activity")]))
        };
        let mut leaves: Vec<Term> = Vec::new();
        for node in &support {
            for (t, _) in node.leaves() {
                push_unique(&mut leaves, t);
            }
        }
        let group = |t: &Term| {
            if t.functor() == Some("prefers") {
                0
            } else if t.args().first().is_some_and(is_activity) {
                1
            } else {
                2
            }
        };
        leaves.sort_by_key(|t| (group(t), position.get(t).copied().unwrap_or(usize::MAX)));

        Ok(Explanation {
            query,
            justification,
            chain: leaves,
            text: String::new(),
            trace: facts
                .iter()
                .map(|f| TraceEntry {
                    triple: f.term.clone(),
                    source: f.source,
                })
                .collect(),
            tree,
        })
    }

    /// The whole pipeline: concepts, gathering, constraint checking,
    /// synthesis and rendering.
    pub fn explain(&self, query: &Term, state: &TaskState) -> Result<Explanation, ExplainError> {
        let concepts = self.extract_concepts(query, state);
        let gathered = self.gather_facts(&concepts, state);
        let closed = self.check_constraints(&gathered)?;
        let mut explanation = self.synthesize(query, &closed)?;
        explanation.text = render_nl(&explanation, state);
        Ok(explanation)
    }
}

impl Default for Explainer {
    fn default() -> Self {
        Explainer::bundled()
    }
}

fn period_phrase(slot: Slot) -> String {
    if slot.index() == 3 {
        "at bedtime".into()
    } else {
        format!("in the {}", slot.period_word())
    }
}

fn distance_phrase(distance: i64) -> &'static str {
    if distance == 0 {
        "immediately before activity"
    } else {
        "a few hours before activity"
    }
}

/// Renders the explanation as a sentence addressed to the user.
pub fn render_nl(explanation: &Explanation, state: &TaskState) -> String {
    let subject = explanation.query.args().first().and_then(Term::as_atom);
    let med = subject.and_then(|s| state.medication(s));
    let fallback = || {
        let parts: Vec<String> = explanation.justification.iter().map(ToString::to_string).collect();
        format!("{} holds because {}.", explanation.query, parts.join(" and "))
    };
    let Some(med) = med else {
        return fallback();
    };
    match med.constraint {
        Constraint::FixedSlot(slot) => format!("You take {} every {}.", med.name, slot.word()),
        Constraint::BeforeActivity => {
            let activity = explanation
                .chain
                .iter()
                .filter_map(|t| t.args().first().and_then(Term::as_atom))
                .find_map(|name| state.activity(name));
            let distance = state
                .effective_distances()
                .ok()
                .and_then(|d| d.into_iter().find(|(m, _)| *m == med.name))
                .map(|(_, d)| d);
            let (Some(a), Some(distance)) = (activity, distance) else {
                return fallback();
            };
            let slot = i64::from(state.time_to_slot(a.clock).index()) - distance;
            let Ok(slot) = Slot::new(slot) else {
                return fallback();
            };
            format!(
                "{} needs to be taken before any physical activity, and you have a {} at {} on {}. \
                 Since you prefer to take it {}, you should take it {}.",
                med.name,
                a.label,
                a.clock.spoken(),
                a.day,
                distance_phrase(distance),
                period_phrase(slot)
            )
        }
        Constraint::Unconstrained => fallback(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hint::AssistanceLevel;
    use crate::planner::{Operator, OperatorKind};
    use crate::scenario::parse_scenario;

    fn state8() -> TaskState {
        parse_scenario(include_str!("../data/scenarios/state8.scn")).unwrap()
    }

    fn t(s: &str) -> Term {
        s.parse().unwrap()
    }

    fn removal_hint() -> AssistiveAction {
        AssistiveAction {
            level: AssistanceLevel::L4,
            operator: Some(Operator {
                kind: OperatorKind::RemovePill,
                med: "Levodopa".into(),
                day: Day::new(3).unwrap(),
                slot: Slot::new(1).unwrap(),
            }),
            utterance: "Try removing a Levodopa from Wednesday.".into(),
        }
    }

    #[test]
    fn questions() {
        let s = state8();
        let q = parse_question("Why?", Some(&removal_hint()), &s).unwrap();
        assert_eq!(q.term, t("(onDate Levodopa Wednesday)"));
        assert_eq!(q.origin, "Try removing a Levodopa from Wednesday.");
        assert_eq!(parse_question("Why?", None, &s), Err(ExplainError::NoContext));
        let q = parse_question("why levodopa friday", None, &s).unwrap();
        assert_eq!(q.term, t("(onDate Levodopa Friday)"));
        assert!(matches!(
            parse_question("what is the weather", None, &s),
            Err(ExplainError::UnrecognizedQuestion(_))
        ));
    }

    #[test]
    fn concepts() {
        let e = Explainer::bundled();
        let s = state8();
        assert_eq!(e.extract_concepts(&t("(pill onDate Friday)"), &s), vec![t("pill"), t("Friday")]);
        assert_eq!(
            e.extract_concepts(&t("(onDate Levodopa Wednesday)"), &s),
            vec![t("Levodopa"), t("pill"), t("Wednesday")]
        );
        assert_eq!(e.extract_concepts(&t("(onDate Zzz Qqq)"), &s), vec![t("Zzz"), t("Qqq")]);
    }

    #[test]
    fn gathering() {
        let e = Explainer::bundled();
        let s = state8();
        let lines: Vec<String> = e
            .gather_facts(&[t("Levodopa"), t("pill"), t("Wednesday")], &s)
            .iter()
            .map(Fact::trace_line)
            .collect();
        for want in [
            "[(IsA Levodopa pill), 'Given']",
            "[(AtLocation pill cabinet), 'ConceptNet']",
            "[(IsA Wednesday weekday), 'ConceptNet']",
            "[(onDay appt Wednesday), 'calendar']",
        ] {
            assert!(lines.iter().any(|l| l == want), "missing {want}");
        }
        assert!(!lines.iter().any(|l| l.contains("dance")));
        assert!(e.gather_facts(&[], &s).is_empty());
    }

    #[test]
    fn constraint_checking() {
        let e = Explainer::bundled();
        let s = state8();
        let gathered = e.gather_facts(&e.extract_concepts(&t("(onDate Levodopa Wednesday)"), &s), &s);
        let closed = e.check_constraints(&gathered).unwrap();
        let appt = closed.get(&t("(atTime appt afternoon)")).unwrap();
        assert_eq!(appt.source, Source::RuleFired);
        assert!(closed.contains(&t("(beforeTime pill afternoon)")));
        let bare = Explainer::new(FactStore::new(), Vec::new(), Vec::new());
        assert_eq!(bare.check_constraints(&gathered).unwrap().facts(), gathered.facts());
    }

    #[test]
    fn golden_explanation() {
        let e = Explainer::bundled();
        let s = state8();
        let x = e.explain(&t("(onDate Levodopa Wednesday)"), &s).unwrap();
        assert_eq!(x.justification, vec![t("(onDay pill Wednesday)"), t("(beforeTime pill afternoon)")]);
        let chain: Vec<String> = x.chain.iter().map(ToString::to_string).collect();
        assert_eq!(
            chain.join(" "),
            "(prefers user (before pill activity)) (IsA appt activity) (atTime appt '1pm') \
             (onDay appt Wednesday) (IsA '1pm' afternoon)"
        );
        assert_eq!(
            x.text,
            "Levodopa needs to be taken before any physical activity, and you have a physical therapy \
             appointment at 1pm on Wednesday. Since you prefer to take it a few hours before activity, \
             you should take it in the morning."
        );
        for term in x.justification.iter().chain(&x.chain) {
            assert!(x.tree.contains(term));
        }
    }

    #[test]
    fn distance_zero_text() {
        let e = Explainer::bundled();
        let s = state8().with_distance("Levodopa", 0).unwrap();
        let x = e.explain(&t("(onDate Levodopa Wednesday)"), &s).unwrap();
        assert!(x
            .text
            .ends_with("Since you prefer to take it immediately before activity, you should take it in the afternoon."));
    }

    #[test]
    fn leaf_and_missing_explanations() {
        let e = Explainer::bundled();
        let s = state8();
        let facts: FactStore = [Fact::new(t("(onDate pill Monday)"), Source::Given).unwrap()]
            .into_iter()
            .collect();
        let x = e.synthesize(&t("(onDate pill Monday)"), &facts).unwrap();
        assert_eq!(x.chain, vec![t("(onDate pill Monday)")]);
        assert!(x.tree.children().is_empty());
        let err = e.explain(&t("(onDate Aspirin Monday)"), &s).unwrap_err();
        assert!(matches!(err, ExplainError::NoExplanation(_)));
    }

    #[test]
    fn fixed_slot_text() {
        let e = Explainer::bundled();
        let x = e.explain(&t("(onDate VitaminD Monday)"), &state8()).unwrap();
        assert_eq!(x.justification, vec![t("(dailyAt VitaminD morning)")]);
        assert_eq!(x.text, "You take VitaminD every morning.");
    }
}
