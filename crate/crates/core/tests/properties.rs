mod support;

use carebot_core::explain::Explainer;
use carebot_core::hint::{select_assistance, NeedModel};
use carebot_core::knowledge::{parse_term, unify, Bindings, Term};
use carebot_core::planner::{check_plan, plan_for, Operator, OperatorKind, Plan};
use carebot_core::scenario::{parse_scenario, Day, Slot};
use proptest::prelude::*;
use support::*;

fn arb_leaf() -> impl Strategy<Value = Term> {
    prop_oneof![
        "[A-Za-z][A-Za-z0-9_\\-]{0,6}".prop_map(Term::atom),
        "[a-z][a-z0-9]{0,3}".prop_map(Term::var),
        any::<i64>().prop_map(Term::Integer),
        "[ -~]{0,8}".prop_map(Term::text),
    ]
}

fn arb_term() -> impl Strategy<Value = Term> {
    arb_leaf().prop_recursive(4, 32, 4, |inner| {
        ("[A-Za-z][A-Za-z0-9]{0,5}", prop::collection::vec(inner, 1..4))
            .prop_map(|(f, args)| Term::compound(f, args))
    })
}

proptest! {
    #[test]
    fn print_parse_round_trip(t in arb_term()) {
        prop_assert_eq!(parse_term(&t.to_string()).unwrap(), t);
    }

    #[test]
    fn json_round_trip(t in arb_term()) {
        let json = serde_json::to_string(&t).unwrap();
        prop_assert_eq!(serde_json::from_str::<Term>(&json).unwrap(), t);
    }

    #[test]
    fn unifiers_are_sound_and_symmetric(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = small_term(&mut r, 3);
        let b = small_term(&mut r, 3);
        let ab = unify(&a, &b, &Bindings::new());
        let ba = unify(&b, &a, &Bindings::new());
        prop_assert_eq!(ab.is_some(), ba.is_some());
        if let (Some(ab), Some(ba)) = (ab, ba) {
            prop_assert_eq!(ab.apply(&a), ab.apply(&b));
            prop_assert!(variant(&ab.apply(&a), &ba.apply(&a)));
        }
    }

    #[test]
    fn occurs_check(seed in any::<u64>()) {
        let mut r = rng(seed);
        let inner = small_term(&mut r, 2);
        let wrapped = Term::compound("g", vec![Term::var("x"), inner]);
        prop_assert!(unify(&Term::var("x"), &wrapped, &Bindings::new()).is_none());
    }

    #[test]
    fn need_level_stays_clamped(seed in any::<u64>()) {
        let mut r = rng(seed);
        let mut m = NeedModel::new(random_need_config(&mut r));
        for _ in 0..50 {
            m = m.update(random_need_event(&mut r));
            prop_assert!((0.0..=1.0).contains(&m.level));
        }
    }

    #[test]
    fn assistance_is_monotone_in_need(a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        let plan = plan_for(&parse_scenario(carebot_core::bundle::STATE8).unwrap()).unwrap();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let level = |l| select_assistance(&plan, &NeedModel::default().with_level(l)).map(|x| x.level);
        prop_assert!(level(lo) <= level(hi));
    }

    #[test]
    fn plans_are_sound(seed in any::<u64>()) {
        let s = random_feasible_scenario(&mut rng(seed));
        let plan = plan_for(&s).unwrap();
        let check = check_plan(&s, &plan);
        prop_assert!(check.valid, "{:?} {}", check.reasons, plan.plan_form());
        prop_assert_eq!(plan.steps.len(), s.diff_grid().unwrap().cost());
    }
}

#[test]
fn l4_utterances_are_injective() {
    let mut seen = std::collections::HashMap::new();
    let plan = |op: Operator| Plan {
        state_id: "s".into(),
        context: Vec::new(),
        steps: vec![op],
    };
    for med in ["Levodopa", "VitaminD"] {
        for day in Day::all() {
            for slot in Slot::all() {
                for kind in [OperatorKind::AddPill, OperatorKind::RemovePill] {
                    let op = Operator { kind, med: med.into(), day, slot };
                    let text = select_assistance(&plan(op.clone()), &NeedModel::default().with_level(1.0))
                        .unwrap()
                        .utterance;
                    // a removal names no slot, so it stands for the whole day
                    let key = match kind {
                        OperatorKind::AddPill => op.clone(),
                        OperatorKind::RemovePill => Operator { slot: Slot::new(0).unwrap(), ..op.clone() },
                    };
                    if let Some(prev) = seen.insert(text.clone(), key.clone()) {
                        assert_eq!(prev, key, "{text}");
                    }
                }
            }
        }
    }
}

#[test]
fn synthesis_is_deterministic() {
    let explainer = Explainer::bundled();
    let state = parse_scenario(carebot_core::bundle::STATE8).unwrap();
    let q: Term = "(onDate Levodopa Wednesday)".parse().unwrap();
    let first = explainer.explain(&q, &state).unwrap();
    for _ in 0..20 {
        assert_eq!(explainer.explain(&q, &state).unwrap(), first);
    }
}
