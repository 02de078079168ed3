use grouplog_core::gen::*;
use grouplog_core::iso::isomorphic;
use grouplog_core::*;

fn group(f: Family) -> FiniteGroup {
    build_group(&f).unwrap()
}

fn sat(s: &FamilySentence, g: &FiniteGroup) -> bool {
    eval_sentence(g, &s.formula, &EvalOptions::default()).unwrap().holds
}

fn sat_on(s: &FamilySentence, f: Family) -> bool {
    sat(s, &group(f))
}

#[test]
fn cyclic2_examples() {
    let s = sentence_cyclic2(3).unwrap();
    assert_eq!(s.target_order, 8);
    assert!(s.formula.is_closed());
    assert!(sat_on(&s, Family::Cyclic(8)));
    assert!(!sat_on(&s, Family::Cyclic(4)));
    assert!(!sat_on(&s, Family::Abelian(vec![2, 2, 2])));
    assert!(!sat_on(&s, Family::Quaternion8));
    assert!(sentence_cyclic2(0).is_err());
}

#[test]
fn simple_examples() {
    let s = sentence_a5();
    assert_eq!(s.target_order, 60);
    assert!(sat_on(&s, Family::Alternating(5)));
    assert!(!sat_on(&s, Family::Cyclic(60)));
    assert!(!sat_on(&s, Family::Cyclic(1)));
    assert!(!sat_on(&s, Family::Symmetric(4)));
}

#[test]
fn symmetric_examples() {
    let s4 = sentence_symmetric(4, None).unwrap();
    assert_eq!(s4.target_order, 24);
    assert!(sat_on(&s4, Family::Symmetric(4)));
    assert!(!sat_on(&s4, Family::Cyclic(24)));
    assert!(!sat_on(
        &s4,
        Family::Product(Box::new(Family::Cyclic(2)), Box::new(Family::Alternating(4)))
    ));
    let s3 = sentence_symmetric(3, None).unwrap();
    assert!(sat_on(&s3, Family::Symmetric(3)));
    assert!(!sat_on(&s3, Family::Cyclic(6)));
    assert!(sentence_symmetric(2, None).is_err());
}

#[test]
fn symmetric_needs_a_cycle_relator() {
    let p = Presentation::new(2, vec![Word::new([(1, 2)]), Word::new([(0, 1), (1, 1)]).pow(3)]).unwrap();
    assert!(matches!(
        sentence_symmetric(3, Some(&p)),
        Err(GenError::NoCycleGenerator(3))
    ));
    let custom = Presentation::parse(&Presentation::symmetric(3).to_text()).unwrap();
    let s = sentence_symmetric(3, Some(&custom)).unwrap();
    assert!(sat_on(&s, Family::Dihedral(3)));
}

#[test]
fn abelian_examples() {
    let s = sentence_abelian(&[2, 4]).unwrap();
    assert_eq!(s.target_order, 8);
    assert!(sat_on(&s, Family::Abelian(vec![2, 4])));
    assert!(sat_on(
        &s,
        Family::Product(Box::new(Family::Cyclic(2)), Box::new(Family::Cyclic(4)))
    ));
    assert!(!sat_on(&s, Family::Cyclic(8)));
    assert!(!sat_on(&s, Family::Abelian(vec![2, 2, 2])));
    assert!(!sat_on(&sentence_abelian(&[4]).unwrap(), Family::Abelian(vec![2, 2])));
    assert!(matches!(sentence_abelian(&[6]), Err(GenError::NotPrimePower(6))));
}

#[test]
fn abelian_mixed_primes() {
    let s = sentence_abelian(&[2, 4, 3]).unwrap();
    assert_eq!(s.target_order, 24);
    assert!(sat_on(&s, Family::Abelian(vec![2, 4, 3])));
    assert!(sat_on(
        &s,
        Family::Product(Box::new(Family::Cyclic(2)), Box::new(Family::Cyclic(12)))
    ));
    assert!(!sat_on(&s, Family::Cyclic(24)));
    assert!(!sat_on(&s, Family::Abelian(vec![2, 2, 2, 3])));
    assert!(!sat_on(&s, Family::Symmetric(4)));
}

#[test]
fn literal_xi_form_admits_smaller_groups() {
    let literal = sentence_abelian_with(&[2, 2, 2], XiForm::Divisors).unwrap();
    assert!(sat_on(&literal, Family::Abelian(vec![2, 2, 2])));
    assert!(sat_on(&literal, Family::Cyclic(2)));
    let fixed = sentence_abelian(&[2, 2, 2]).unwrap();
    assert!(sat_on(&fixed, Family::Abelian(vec![2, 2, 2])));
    assert!(!sat_on(&fixed, Family::Cyclic(2)));
    assert!(!sat_on(&fixed, Family::Abelian(vec![2, 2])));
}

#[test]
fn ut3_small_cases() {
    let d4 = group(Family::Dihedral(4));
    let u2 = group(Family::Ut3(2));
    assert!(isomorphic(&u2, &d4).unwrap().isomorphic);

    let s = sentence_ut3(2).unwrap();
    assert!(s.formula.is_closed());
    assert_eq!(s.target_order, 8);
    assert!(sat(&s, &u2));
    assert!(sat(&s, &d4));
    assert!(!sat_on(&s, Family::Quaternion8));
    assert!(!sat_on(&s, Family::Abelian(vec![2, 4])));

    let s3 = sentence_ut3(3).unwrap();
    assert!(sat_on(&s3, Family::Ut3(3)));
    assert!(!sat_on(&s3, Family::Cyclic(27)));
    assert!(!sat_on(&s3, Family::Abelian(vec![3, 9])));
    assert!(!sat_on(&s3, Family::Abelian(vec![3, 3, 3])));
}

#[test]
fn ut3_phi_and_estimate() {
    let u3 = group(Family::Ut3(3));
    let s = sentence_ut3(3).unwrap();
    let grounded = cost_estimate(&u3, &s.formula, Mode::Grounded);
    let naive = cost_estimate(&u3, &s.formula, Mode::Naive);
    assert!(grounded <= 1e9, "{grounded:e}");
    assert!(naive > 1e12, "{naive:e}");
}

#[test]
fn grounded_witness() {
    let z8 = group(Family::Cyclic(8));
    let s = sentence_abelian(&[8]).unwrap();
    let out = eval_sentence_grounded(&z8, &s.formula, &EvalOptions::default()).unwrap();
    assert!(out.holds);
    let witness = out.witness.unwrap();
    assert_eq!(witness.len(), 1);
    assert_eq!(z8.element_order(witness[0].1), 8);
    assert_eq!(witness[0].1, 1);
    let d4 = group(Family::Dihedral(4));
    assert!(
        !eval_sentence_grounded(&d4, &s.formula, &EvalOptions::default())
            .unwrap()
            .holds
    );

    let trivial = parse_formula("(ex a (= a a))").unwrap();
    for f in [Family::Cyclic(1), Family::Symmetric(3)] {
        let out = eval_sentence_grounded(&group(f), &trivial, &EvalOptions::default()).unwrap();
        assert_eq!(out.witness, Some(vec![("a".to_string(), 0)]));
    }
}

#[test]
fn grounded_agrees_with_naive_on_cyclic_target() {
    let z2 = group(Family::Cyclic(2));
    let z4 = group(Family::Cyclic(4));
    let s = sentence_abelian(&[2]).unwrap();
    for g in [&z2, &z4] {
        let naive = eval_with(g, &s.formula, &Env::new(), &EvalOptions::mode(Mode::Naive).forced())
            .unwrap()
            .0;
        let grounded = eval_sentence_grounded(g, &s.formula, &EvalOptions::default())
            .unwrap()
            .holds;
        assert_eq!(naive, grounded);
        assert_eq!(grounded, g.order() == 2);
    }
}

fn all_generated() -> Vec<FamilySentence> {
    let mut out = Vec::new();
    for n in [1, 2, 3, 4, 10, 64] {
        out.push(sentence_cyclic2(n).unwrap());
    }
    for qs in [vec![4], vec![2, 2], vec![2, 4, 3], vec![9, 3, 27], vec![5, 25, 7]] {
        out.push(sentence_abelian(&qs).unwrap());
    }
    for n in [3, 4, 5, 9] {
        out.push(sentence_symmetric(n, None).unwrap());
    }
    out.push(sentence_a5());
    for n in [2, 3, 4, 12, 1_000_000] {
        out.push(sentence_ut3(n).unwrap());
    }
    out
}

#[test]
fn generated_sentences_round_trip() {
    for s in all_generated() {
        assert!(s.formula.is_closed(), "{}", s.id());
        assert_eq!(s.length, s.formula.length());
        let text = print_formula(&s.formula);
        assert_eq!(parse_formula(&text).unwrap(), s.formula, "{}", s.id());
    }
}

#[test]
fn sentence_ids() {
    assert_eq!(sentence_abelian(&[2, 4]).unwrap().id(), "abelian-2.4");
    assert_eq!(sentence_ut3(3).unwrap().id(), "ut3-3");
    assert_eq!(sentence_a5().id(), "simple-60");
    assert_eq!(sentence_cyclic2(5).unwrap().id(), "cyclic2-5");
    assert_eq!("ut3".parse::<SentenceFamily>().unwrap(), SentenceFamily::Ut3);
}
