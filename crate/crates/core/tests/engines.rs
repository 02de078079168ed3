use grouplog_core::gen::random_formula;
use grouplog_core::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn group(f: Family) -> FiniteGroup {
    build_group(&f).unwrap()
}

fn small_groups() -> Vec<FiniteGroup> {
    [
        Family::Cyclic(1),
        Family::Cyclic(2),
        Family::Cyclic(3),
        Family::Abelian(vec![2, 2]),
        Family::Cyclic(6),
        Family::Symmetric(3),
        Family::Cyclic(8),
        Family::Dihedral(4),
        Family::Quaternion8,
    ]
    .into_iter()
    .map(group)
    .collect()
}

fn parse(s: &str) -> Formula {
    parse_formula(s).unwrap()
}

fn with_mode(g: &FiniteGroup, f: &Formula, env: &Env, mode: Mode) -> bool {
    eval_with(g, f, env, &EvalOptions::mode(mode)).unwrap().0
}

#[test]
fn eval_examples() {
    let z4 = group(Family::Cyclic(4));
    assert!(eval(&z4, &parse("(all x (= (* x x) (* x x)))"), &Env::new()).unwrap().0);
    let z2 = group(Family::Cyclic(2));
    assert!(eval(&z2, &parse("(ex x (not (= x 1)))"), &Env::new()).unwrap().0);
    let s3 = group(Family::Symmetric(3));
    let comm = parse("(all x (all y (= (* x y) (* y x))))");
    for mode in [Mode::Naive, Mode::Grounded, Mode::Relational, Mode::Auto] {
        assert!(!with_mode(&s3, &comm, &Env::new(), mode));
        assert!(with_mode(&z4, &comm, &Env::new(), mode));
    }
}

#[test]
fn eval_errors() {
    let z4 = group(Family::Cyclic(4));
    let f = parse("(= x 1)");
    assert_eq!(eval(&z4, &f, &Env::new()), Err(EvalError::UnboundVariable("x".into())));
    let env: Env = [("x".to_string(), 9)].into_iter().collect();
    assert!(matches!(eval(&z4, &f, &env), Err(EvalError::ElementOutOfRange { .. })));
    let deep = parse("(all a (all b (all c (all d (all e (= (* a (* b (* c (* d e)))) 1))))))");
    let s5 = group(Family::Symmetric(5));
    let tight = EvalOptions {
        mode: Mode::Naive,
        budget: 1e6,
        force: false,
    };
    assert!(matches!(
        eval_with(&s5, &deep, &Env::new(), &tight),
        Err(EvalError::BudgetExceeded { .. })
    ));
    let wide = parse("(ex a (ex b (ex c (ex d (ex e (= (* a (* b (* c (* d e)))) 1))))))");
    assert!(matches!(relation(&z4, &wide), Err(EvalError::ArityCapExceeded { .. })));
    assert!(matches!(
        eval_sentence_grounded(&z4, &parse("(all x (= x x))"), &EvalOptions::default()),
        Err(EvalError::ShapeMismatch)
    ));
}

#[test]
fn relation_examples() {
    let z4 = group(Family::Cyclic(4));
    let r = relation(&z4, &parse("(= x 1)")).unwrap();
    assert_eq!(r.columns(), ["x"]);
    assert_eq!(r.rows(), vec![vec![0]]);
    let r = relation(&z4, &parse("(= (* x x) 1)")).unwrap();
    assert_eq!(r.rows(), vec![vec![0], vec![2]]);
    let r = relation(&z4, &parse("(ex z (= (* x z) y))")).unwrap();
    assert_eq!(r.len(), 16);
    let r = relation(&z4, &parse("(= (* x y) (* y (* x w)))")).unwrap();
    assert_eq!(r.columns(), ["w", "x", "y"]);
    assert_eq!(r.len(), 16);
    assert!(r.contains(&[0, 3, 1]));
    assert!(!r.contains(&[1, 3, 1]));
}

#[test]
fn estimates() {
    let z8 = group(Family::Cyclic(8));
    let closed = parse("(= (* 1 1) 1)");
    assert!(cost_estimate(&z8, &closed, Mode::Naive) <= 10.0);
    let f = parse("(all x (all y (= (* x y) (* y x))))");
    let e8 = cost_estimate(&z8, &f, Mode::Naive);
    let e4 = cost_estimate(&group(Family::Cyclic(4)), &f, Mode::Naive);
    assert!(e8 >= 64.0 && e8 <= 64.0 * 16.0, "{e8}");
    assert!(e8 / e4 > 3.0, "{e8} {e4}");
}

#[test]
fn auto_picks_naive_for_small_inputs() {
    let z4 = group(Family::Cyclic(4));
    let (_, stats) = eval(&z4, &parse("(ex x (= x 1))"), &Env::new()).unwrap();
    assert_eq!(stats.mode, Mode::Naive);
    let u3 = group(Family::Ut3(3));
    let s = grouplog_core::gen::sentence_ut3(3).unwrap();
    let (holds, stats) = eval(&u3, &s.formula, &Env::new()).unwrap();
    assert!(holds);
    assert_eq!(stats.mode, Mode::Grounded);
}

#[test]
fn macro_commutator_matches_table() {
    let f = Formula::eq(macro_commutator(Term::var("x"), Term::var("y")), Term::var("z"));
    for fam in [Family::Symmetric(3), Family::Quaternion8, Family::Alternating(4)] {
        let g = group(fam);
        let r = relation(&g, &f).unwrap();
        for x in 0..g.order() {
            for y in 0..g.order() {
                for z in 0..g.order() {
                    assert_eq!(r.contains(&[x, y, z]), g.commutator(x, y) == z);
                }
            }
        }
    }
}

#[test]
fn bigand_is_conjunction() {
    let g = group(Family::Dihedral(4));
    let atoms: Vec<Formula> = ["(= (* x x) 1)", "(= (* x y) (* y x))", "(not (= y 1))"]
        .iter()
        .map(|s| parse(s))
        .collect();
    let all = bigand(atoms.clone()).unwrap();
    for x in 0..8 {
        for y in 0..8 {
            let env: Env = [("x".to_string(), x), ("y".to_string(), y)].into_iter().collect();
            let each = atoms.iter().all(|a| eval(&g, a, &env).unwrap().0);
            assert_eq!(eval(&g, &all, &env).unwrap().0, each);
        }
    }
    assert!(bigand(vec![]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn modes_agree(seed in any::<u64>(), gi in 0usize..9, p in 0usize..8) {
        let groups = small_groups();
        let g = &groups[gi];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_formula(&mut rng, 3, &["p"]);
        let env: Env = [("p".to_string(), p % g.order())].into_iter().collect();
        let naive = with_mode(g, &f, &env, Mode::Naive);
        prop_assert_eq!(naive, with_mode(g, &f, &env, Mode::Grounded));
        prop_assert_eq!(naive, with_mode(g, &f, &env, Mode::Relational));

        let rel = relation(g, &f).unwrap();
        if f.free_vars().is_empty() {
            prop_assert_eq!(rel.is_empty(), !naive);
        } else {
            prop_assert_eq!(rel.contains(&[p % g.order()]), naive);
        }

        let closed = Formula::exists("p", f.clone());
        let expected = with_mode(g, &closed, &Env::new(), Mode::Naive);
        let out = eval_sentence(g, &closed, &EvalOptions::default()).unwrap();
        prop_assert_eq!(out.holds, expected);
        prop_assert_eq!(!rel.is_empty(), expected);
        if let Some(w) = out.witness {
            let least = (0..g.order()).find(|&v| {
                let e: Env = [("p".to_string(), v)].into_iter().collect();
                with_mode(g, &f, &e, Mode::Naive)
            });
            prop_assert_eq!(Some(w[0].1), least);
        }
    }

    #[test]
    fn definable_sets_match_pointwise(seed in any::<u64>(), gi in 0usize..9, q in 0usize..8) {
        let groups = small_groups();
        let g = &groups[gi];
        let f = random_formula(&mut ChaCha8Rng::seed_from_u64(seed), 2, &["p", "q"]);
        let env: Env = [("q".to_string(), q % g.order())].into_iter().collect();
        let (set, _) = definable_set(g, &f, "p", &env, &EvalOptions::default()).unwrap();
        for v in 0..g.order() {
            let mut e = env.clone();
            e.insert("p".to_string(), v);
            prop_assert_eq!(set.contains(v), with_mode(g, &f, &e, Mode::Naive));
        }
    }

    #[test]
    fn print_parse_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_formula(&mut rng, 4, &["x", "y"]);
        let text = print_formula(&f);
        prop_assert_eq!(parse_formula(&text).unwrap(), f);
    }

    #[test]
    fn length_and_scope_identities(s1 in any::<u64>(), s2 in any::<u64>()) {
        let a = random_formula(&mut ChaCha8Rng::seed_from_u64(s1), 2, &["x"]);
        let b = random_formula(&mut ChaCha8Rng::seed_from_u64(s2), 2, &["y"]);
        prop_assert_eq!(Formula::and(a.clone(), b.clone()).length(), a.length() + b.length() + 1);
        prop_assert_eq!(Formula::not(a.clone()).length(), a.length() + 1);
        let mut expect = a.free_vars();
        expect.remove("x");
        prop_assert_eq!(Formula::forall("x", a).free_vars(), expect);
    }
}
