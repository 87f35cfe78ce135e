//! Seeded generators and brute-force oracles shared by the property suites.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use carebot_core::hint::{NeedConfig, NeedEvent};
use carebot_core::knowledge::Term;
use carebot_core::rules::{parse_rule, Rule};
use carebot_core::scenario::{
    Activity, Cell, Clock, Constraint, Day, Medication, Preference, PreferenceKind, Slot, SlotBoundaries, TaskState,
};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------- terms

const ATOMS: [&str; 8] = ["a", "b", "pill", "Levodopa", "IsA", "x-y", "café", "<="];
const TEXTS: [&str; 6] = ["", "1pm", "business day", "it's", "back\\slash", "(paren)"];

pub fn random_term(r: &mut impl Rng, depth: u32) -> Term {
    let leaf = depth == 0 || r.random_bool(0.4);
    if leaf {
        match r.random_range(0..4) {
            0 => Term::atom(*ATOMS.choose(r).unwrap()),
            1 => Term::var(format!("v{}", r.random_range(0..4))),
            2 => Term::Integer(r.random_range(-1000..1000)),
            _ => Term::text(*TEXTS.choose(r).unwrap()),
        }
    } else {
        let n = r.random_range(1..4);
        let args = (0..n).map(|_| random_term(r, depth - 1)).collect();
        Term::compound(*ATOMS.choose(r).unwrap(), args)
    }
}

/// A term over a tiny vocabulary, so that random pairs unify often.
pub fn small_term(r: &mut impl Rng, depth: u32) -> Term {
    if depth == 0 || r.random_bool(0.45) {
        match r.random_range(0..3) {
            0 => Term::atom(*["a", "b"].choose(r).unwrap()),
            _ => Term::var(*["x", "y", "z"].choose(r).unwrap()),
        }
    } else {
        let f = *["f", "g"].choose(r).unwrap();
        let n = if f == "f" { 1 } else { 2 };
        Term::compound(f, (0..n).map(|_| small_term(r, depth - 1)).collect())
    }
}

/// True if `a` and `b` are equal up to a consistent renaming of variables.
pub fn variant(a: &Term, b: &Term) -> bool {
    fn go(a: &Term, b: &Term, fw: &mut BTreeMap<String, String>, bw: &mut BTreeMap<String, String>) -> bool {
        match (a, b) {
            (Term::Variable(x), Term::Variable(y)) => {
                let f = fw.entry(x.clone()).or_insert_with(|| y.clone()).clone();
                let g = bw.entry(y.clone()).or_insert_with(|| x.clone()).clone();
                f == *y && g == *x
            }
            (Term::Compound { functor: f, args: xs }, Term::Compound { functor: g, args: ys }) => {
                f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| go(x, y, fw, bw))
            }
            _ => a == b,
        }
    }
    go(a, b, &mut BTreeMap::new(), &mut BTreeMap::new())
}

/// One-way matching of `pattern` against a ground `fact`, by direct
/// structural comparison.
pub fn naive_match(pattern: &Term, fact: &Term, env: &mut BTreeMap<String, Term>) -> bool {
    match (pattern, fact) {
        (Term::Variable(v), _) => match env.get(v) {
            Some(bound) => bound == fact,
            None => {
                env.insert(v.clone(), fact.clone());
                true
            }
        },
        (Term::Compound { functor: f, args: xs }, Term::Compound { functor: g, args: ys }) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| naive_match(x, y, env))
        }
        _ => pattern == fact,
    }
}

// ---------------------------------------------------------------- rules

const PREDICATES: [(&str, usize); 4] = [("p", 1), ("q", 2), ("r", 2), ("s", 1)];
const CONSTANTS: [&str; 4] = ["c0", "c1", "c2", "c3"];
const RULE_VARS: [&str; 3] = ["x", "y", "z"];

fn random_atom_arg(r: &mut impl Rng, vars: bool) -> String {
    if vars && r.random_bool(0.7) {
        format!("?{}", RULE_VARS.choose(r).unwrap())
    } else {
        CONSTANTS.choose(r).unwrap().to_string()
    }
}

fn random_literal(r: &mut impl Rng, vars: bool) -> String {
    let (p, n) = *PREDICATES.choose(r).unwrap();
    let args: Vec<String> = (0..n).map(|_| random_atom_arg(r, vars)).collect();
    format!("({p} {})", args.join(" "))
}

pub fn random_facts(r: &mut impl Rng) -> Vec<Term> {
    let n = r.random_range(0..10);
    (0..n).map(|_| random_literal(r, false).parse().unwrap()).collect()
}

/// A range-restricted, builtin-free rule set over the shared vocabulary.
pub fn random_rules(r: &mut impl Rng) -> Vec<Rule> {
    let n = r.random_range(1..5);
    let mut rules = Vec::new();
    while rules.len() < n {
        let body: Vec<String> = (0..r.random_range(1..4)).map(|_| random_literal(r, true)).collect();
        let bound: BTreeSet<String> = body
            .iter()
            .flat_map(|l| l.split([' ', ')']))
            .filter(|t| t.starts_with('?'))
            .map(str::to_string)
            .collect();
        let (p, arity) = *PREDICATES.choose(r).unwrap();
        let pool: Vec<String> = bound.iter().cloned().chain(CONSTANTS.iter().map(|c| c.to_string())).collect();
        let args: Vec<String> = (0..arity).map(|_| pool.choose(r).unwrap().clone()).collect();
        let text = format!("({p} {}) <- {}", args.join(" "), body.join(" "));
        rules.push(parse_rule(&text).expect("generated rule is valid"));
    }
    rules
}

/// Least fixpoint by enumerating every assignment of constants to rule
/// variables.
pub fn oracle_closure(facts: &[Term], rules: &[Rule]) -> BTreeSet<Term> {
    let mut known: BTreeSet<Term> = facts.iter().cloned().collect();
    let mut domain: BTreeSet<Term> = CONSTANTS.iter().map(|c| Term::atom(*c)).collect();
    for f in facts {
        domain.extend(f.args().iter().cloned());
    }
    let domain: Vec<Term> = domain.into_iter().collect();
    loop {
        let mut next = known.clone();
        for rule in rules {
            let mut vars: Vec<String> = rule.head.variables();
            for p in rule.patterns() {
                for v in p.variables() {
                    if !vars.contains(&v) {
                        vars.push(v);
                    }
                }
            }
            let total = domain.len().pow(vars.len() as u32);
            for code in 0..total {
                let mut env = BTreeMap::new();
                let mut c = code;
                for v in &vars {
                    env.insert(v.clone(), domain[c % domain.len()].clone());
                    c /= domain.len();
                }
                let subst = |t: &Term| substitute(t, &env);
                if rule.patterns().all(|p| known.contains(&subst(p))) {
                    next.insert(subst(&rule.head));
                }
            }
        }
        if next == known {
            return known;
        }
        known = next;
    }
}

pub fn substitute(t: &Term, env: &BTreeMap<String, Term>) -> Term {
    match t {
        Term::Variable(v) => env.get(v).cloned().unwrap_or_else(|| t.clone()),
        Term::Compound { functor, args } => Term::compound(functor.clone(), args.iter().map(|a| substitute(a, env)).collect()),
        other => other.clone(),
    }
}

// ---------------------------------------------------------------- scenarios

const MED_NAMES: [&str; 3] = ["Levodopa", "VitaminD", "Aspirin"];
const ACTIVITY_NAMES: [&str; 2] = ["appt", "dance"];

fn random_clock(r: &mut impl Rng) -> Clock {
    // quarter hours keep boundary cases common
    Clock::from_minutes(r.random_range(0..96u16) * 15).unwrap()
}

fn random_boundaries(r: &mut impl Rng) -> SlotBoundaries {
    if r.random_bool(0.5) {
        return SlotBoundaries::default();
    }
    loop {
        let mut b = [random_clock(r), random_clock(r), random_clock(r)];
        b.sort();
        if let Ok(sb) = SlotBoundaries::new(b) {
            return sb;
        }
    }
}

/// A scenario with up to three medications and two activities. Nothing
/// guarantees that its goal is consistent.
pub fn random_raw_scenario(r: &mut impl Rng) -> TaskState {
    let mut s = TaskState::new(format!("state{}", r.random_range(0..20)));
    s.slot_boundaries = random_boundaries(r);
    for name in ACTIVITY_NAMES.iter().take(r.random_range(0..=2)) {
        s.calendar.push(Activity {
            name: (*name).into(),
            label: (*name).into(),
            day: Day::new(r.random_range(0..7)).unwrap(),
            clock: random_clock(r),
        });
    }
    for name in MED_NAMES.iter().take(r.random_range(1..=3)) {
        let constraint = match r.random_range(0..3) {
            0 => Constraint::FixedSlot(Slot::new(r.random_range(0..4)).unwrap()),
            1 => Constraint::BeforeActivity,
            _ => Constraint::Unconstrained,
        };
        s.medications.push(Medication {
            name: name.to_string(),
            max_per_day: r.random_range(1..=2),
            constraint,
            weekly_supply: r.random_range(0..=10),
        });
        if constraint == Constraint::BeforeActivity && r.random_bool(0.8) {
            s.preferences.push(Preference::before_activity(name, r.random_range(0..=3)));
        }
    }
    s
}

fn boundary_slot(s: &TaskState, clock: Clock) -> i64 {
    s.slot_boundaries.values().iter().filter(|b| **b <= clock).count() as i64
}

#[derive(Debug, PartialEq, Eq)]
pub enum OracleError {
    Underflow,
    DailyLimit,
}

/// Goal counts per (medication, day, slot), by checking all 28 cells.
pub fn oracle_goal(s: &TaskState) -> Result<BTreeMap<(String, u8, u8), u32>, OracleError> {
    let distance_of = |name: &str| {
        s.preferences
            .iter()
            .rev()
            .find_map(|p| match p.kind() {
                PreferenceKind::BeforeActivityBy { med, distance } if med == name => Some(distance),
                _ => None,
            })
            .unwrap_or(0)
    };
    for m in &s.medications {
        let d = distance_of(&m.name);
        if m.constraint == Constraint::BeforeActivity && s.calendar.iter().any(|a| boundary_slot(s, a.clock) - d < 0) {
            return Err(OracleError::Underflow);
        }
    }
    let mut out = BTreeMap::new();
    for m in &s.medications {
        let d = distance_of(&m.name);
        for day in 0..7u8 {
            let mut day_total = 0;
            for slot in 0..4u8 {
                let n = match m.constraint {
                    Constraint::FixedSlot(fs) => u32::from(fs.index() == slot),
                    Constraint::BeforeActivity => s
                        .calendar
                        .iter()
                        .filter(|a| a.day.index() == day && boundary_slot(s, a.clock) - d == i64::from(slot))
                        .count() as u32,
                    Constraint::Unconstrained => 0,
                };
                if n > 0 {
                    out.insert((m.name.clone(), day, slot), n);
                }
                day_total += n;
            }
            if day_total > m.max_per_day {
                return Err(OracleError::DailyLimit);
            }
        }
    }
    Ok(out)
}

/// A random scenario whose goal is consistent and within supply, with a
/// random partial grid.
pub fn random_feasible_scenario(r: &mut impl Rng) -> TaskState {
    loop {
        let mut s = random_raw_scenario(r);
        let Ok(goal) = oracle_goal(&s) else { continue };
        for m in &mut s.medications {
            let need: u32 = goal.iter().filter(|((n, _, _), _)| *n == m.name).map(|(_, c)| c).sum();
            m.weekly_supply = need + r.random_range(0..=3);
        }
        for m in s.medications.clone() {
            let pills = r.random_range(0..=m.weekly_supply);
            for _ in 0..pills {
                let cell = Cell::new(Day::new(r.random_range(0..7)).unwrap(), Slot::new(r.random_range(0..4)).unwrap());
                // bias toward goal cells so that partial solutions are common
                let cell = match goal.keys().filter(|(n, _, _)| *n == m.name).collect::<Vec<_>>().choose(r) {
                    Some((_, d, sl)) if r.random_bool(0.6) => {
                        Cell::new(Day::new((*d).into()).unwrap(), Slot::new((*sl).into()).unwrap())
                    }
                    _ => cell,
                };
                s.grid.add(&m.name, cell, 1);
            }
        }
        return s;
    }
}

pub fn grid_counts(g: &carebot_core::scenario::Grid) -> BTreeMap<(String, u8, u8), u32> {
    g.entries()
        .into_iter()
        .map(|e| ((e.med, e.day.index(), e.slot.index()), e.count))
        .collect()
}

// ---------------------------------------------------------------- need

pub fn random_need_config(r: &mut impl Rng) -> NeedConfig {
    let mut edges = [r.random::<f64>(), r.random::<f64>(), r.random::<f64>(), r.random::<f64>()];
    edges.sort_by(f64::total_cmp);
    NeedConfig {
        request_set: r.random_range(0.0..2.0),
        hesitation_threshold_s: r.random_range(0.0..10.0),
        hesitation_bump: r.random_range(0.0..3.0),
        error_bump: r.random_range(0.0..3.0),
        success_decay: r.random_range(0.0..2.0),
        assist_threshold: edges[0],
        bands: [edges[1], edges[2], edges[3]],
    }
}

pub fn random_need_event(r: &mut impl Rng) -> NeedEvent {
    match r.random_range(0..5) {
        0 => NeedEvent::HelpRequest,
        1 => NeedEvent::Hesitation {
            seconds: r.random_range(0.0..20.0),
        },
        2 => NeedEvent::Error,
        3 => NeedEvent::Progress,
        _ => NeedEvent::Neutral,
    }
}
