use proptest::prelude::*;

use iel_kernel::corpus::{GenConfig, TermGenerator, TypedSample};
use iel_kernel::cps::check_lemmas;
use iel_kernel::decide::decide;
use iel_kernel::degree::degree;
use iel_kernel::formula::subformulas;
use iel_kernel::hilbert::{hilbert_to_nd, HilbertProof, Scheme};
use iel_kernel::oracle::oracle_provable;
use iel_kernel::rewrite::{normal_form, successors, Family, Strategy as Order};
use iel_kernel::term::var;
use iel_kernel::{alpha_eq, check, infer, parse_formula, parse_term_in, Formula};

fn formula(depth: u32) -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        4 => prop_oneof![Just("p"), Just("r"), Just("s")].prop_map(Formula::atom),
        1 => Just(Formula::Bot),
        1 => Just(Formula::Top),
    ];
    leaf.prop_recursive(depth, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            inner.prop_map(Formula::boxed),
        ]
    })
}

fn sample(bot: bool) -> impl Strategy<Value = TypedSample> {
    any::<u64>().prop_map(move |seed| TermGenerator::new(seed, GenConfig::open(bot)).sample())
}

proptest! {
    #[test]
    fn formulas_print_and_parse_back(f in formula(4)) {
        prop_assert_eq!(parse_formula(&f.to_string()).unwrap(), f);
    }

    #[test]
    fn terms_print_and_parse_back(s in sample(true)) {
        let back = parse_term_in(&s.ctx, &s.term.to_string()).unwrap();
        prop_assert!(alpha_eq(&back, &s.term), "{} vs {}", back, s.term);
    }

    #[test]
    fn substituting_a_variable_for_itself_is_the_identity(s in sample(true)) {
        for x in s.term.free_vars() {
            prop_assert!(alpha_eq(&s.term.subst(&x, &var(&x)), &s.term));
        }
        prop_assert!(alpha_eq(&s.term.subst("fresh", &var("other")), &s.term));
    }

    #[test]
    fn subformulas_are_closed_downwards(f in formula(4)) {
        let all = subformulas(&f);
        prop_assert!(all.contains(&f));
        for g in &all {
            prop_assert!(subformulas(g).is_subset(&all));
        }
    }

    #[test]
    fn decide_proves_its_hypotheses(h in formula(3), g in formula(2)) {
        prop_assert!(decide(std::slice::from_ref(&h), &h));
        prop_assert!(decide(&[h.clone(), g.clone()], &Formula::and(h, g)));
    }

    #[test]
    fn decide_is_monotone_under_weakening(h in formula(2), extra in formula(2), g in formula(2)) {
        if decide(std::slice::from_ref(&h), &g) {
            prop_assert!(decide(&[h, extra], &g));
        }
    }

    #[test]
    fn decide_agrees_with_proof_search(g in formula(2)) {
        prop_assert_eq!(decide(&[], &g), oracle_provable(&[], &g, 24), "{}", g);
    }

    #[test]
    fn every_successor_keeps_the_type(s in sample(true)) {
        for (path, kind, u) in successors(&s.ctx, &s.term, Family::All) {
            prop_assert_eq!(infer(&s.ctx, &u).ok(), Some(s.ty.clone()), "{} at {:?}", kind, path);
        }
    }

    #[test]
    fn normal_forms_keep_the_type(s in sample(true)) {
        for strategy in [Order::LeftmostOutermost, Order::LeftmostInnermost] {
            let (nf, _) = normal_form(&s.ctx, &s.term, strategy, 1_000_000).unwrap();
            prop_assert!(check(&s.ctx, &nf, &s.ty));
        }
    }

    #[test]
    fn degree_is_invariant_under_renaming(s in sample(false)) {
        prop_assert_eq!(degree(&s.term).unwrap(), degree(&s.term.canonical()).unwrap());
    }

    #[test]
    fn hilbert_proofs_translate_to_typed_terms(
        hyps in prop::collection::vec(formula(2), 1..4),
        picks in prop::collection::vec((0usize..11, any::<[usize; 3]>()), 1..8),
        order in any::<u64>(),
    ) {
        let mut proof = HilbertProof::new();
        for (i, h) in hyps.iter().enumerate() {
            proof.hyp(&format!("h{i}"), h.clone());
        }
        for (scheme, idx) in picks {
            let scheme = Scheme::ALL[scheme];
            let parts: Vec<Formula> = idx
                .iter()
                .take(scheme.arity())
                .map(|&i| proof.lines[i % proof.lines.len()].formula.clone())
                .collect();
            proof.axiom(scheme, parts).unwrap();
        }
        let mut rotate = order;
        for _ in 0..6 {
            let n = proof.lines.len();
            let pairs: Vec<(usize, usize)> = (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .filter(|&(i, j)| proof.lines[i].formula.as_impl().is_some_and(|(a, _)| *a == proof.lines[j].formula))
                .collect();
            if pairs.is_empty() {
                break;
            }
            let (i, j) = pairs[(rotate % pairs.len() as u64) as usize];
            rotate = rotate.rotate_left(7) ^ 0x9e37;
            proof.mp(i, j).unwrap();
        }
        let t = hilbert_to_nd(&proof).unwrap();
        let goal = proof.conclusion().unwrap().clone();
        prop_assert!(check(&proof.context(), &t, &goal), "{} : {}", t, goal);
        prop_assert!(decide(&hyps, &goal));
    }

    #[test]
    fn translation_lemmas_hold_on_random_terms(s in sample(false)) {
        for c in check_lemmas(&s.ctx, &s.term).unwrap() {
            let later_box_argument = c.at.starts_with("P4") && !c.at.ends_with(" 0]") && !c.at.ends_with("[0]");
            if c.lemma == "permutation-invariance" && later_box_argument {
                continue;
            }
            prop_assert!(c.holds, "{} {} on {}", c.lemma, c.at, s.term);
        }
    }
}
