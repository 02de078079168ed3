use grouplog::lengths::{abelian_sample, parse_range};
use grouplog::sentences::{read_sentence_dir, soundness_sentences, uniqueness_sentences, write_sentence_in};
use grouplog::{
    corpus_build, resolve_group, verify_soundness, verify_uniqueness, Corpus, CorpusEntry, GroupSource, HarnessError,
    LengthFamily, Report, Status, Sweep, VerifyOptions,
};
use grouplog_core::iso::isomorphic;
use grouplog_core::Family;

fn classes(groups: &[grouplog::NamedGroup], order: usize) -> usize {
    let mut reps: Vec<&grouplog_core::FiniteGroup> = Vec::new();
    for g in groups.iter().map(|n| &n.group).filter(|g| g.order() == order) {
        if reps.iter().all(|r| !isomorphic(r, g).unwrap().isomorphic) {
            reps.push(g);
        }
    }
    reps.len()
}

#[test]
fn small_corpus_covers_orders_four_and_eight() {
    let groups = corpus_build(8).unwrap().load().unwrap();
    assert_eq!(classes(&groups, 4), 2);
    assert_eq!(classes(&groups, 8), 5);
    assert!(groups.windows(2).all(|w| w[0].group.order() <= w[1].group.order()));
}

#[test]
fn trivial_corpus() {
    let groups = corpus_build(1).unwrap().load().unwrap();
    assert_eq!(groups.len(), 1);
    assert_eq!(groups[0].group.order(), 1);
}

#[test]
fn corpus_cap() {
    assert!(matches!(corpus_build(5000), Err(HarnessError::CorpusCap(5000))));
}

#[test]
fn corpus_is_deterministic() {
    assert_eq!(corpus_build(64).unwrap(), corpus_build(64).unwrap());
}

#[test]
fn duplicate_names_rejected() {
    let e = CorpusEntry {
        name: "Z2".into(),
        source: GroupSource::Builtin(Family::Cyclic(2)),
    };
    assert!(Corpus::new(vec![e.clone(), e]).is_err());
}

#[test]
fn corpus_dir_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = corpus_build(12).unwrap();
    let files = corpus.write_dir(dir.path()).unwrap();
    assert_eq!(files.len(), corpus.len());
    let back = Corpus::from_dir(dir.path()).unwrap();
    let names: Vec<_> = back.entries().iter().map(|e| e.name.clone()).collect();
    let original: Vec<_> = corpus.entries().iter().map(|e| e.name.clone()).collect();
    assert_eq!(names, original);
    let (a, b) = (corpus.load().unwrap(), back.load().unwrap());
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.group.to_cayley_string(), y.group.to_cayley_string(), "{}", x.name);
    }
}

#[test]
fn resolve_builtin_and_file() {
    assert_eq!(resolve_group("UT3(3)").unwrap().order(), 27);
    assert_eq!(resolve_group("Z2xS3").unwrap().order(), 12);
    assert!(resolve_group("no-such-group").is_err());
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("q8.cayley");
    std::fs::write(&path, resolve_group("Q8").unwrap().to_cayley_string()).unwrap();
    let g = resolve_group(path.to_str().unwrap()).unwrap();
    assert!(isomorphic(&g, &resolve_group("Q8").unwrap()).unwrap().isomorphic);
}

#[test]
fn sentence_dir_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let sents = soundness_sentences();
    for s in &sents {
        write_sentence_in(dir.path(), s).unwrap();
    }
    let mut back = read_sentence_dir(dir.path()).unwrap();
    let mut want = sents.clone();
    back.sort_by_key(|s| s.id());
    want.sort_by_key(|s| s.id());
    for (b, w) in back.iter().zip(&want) {
        assert_eq!(b.formula, w.formula, "{}", w.id());
        assert_eq!(
            (&b.family, &b.params, b.target_order, b.length),
            (&w.family, &w.params, w.target_order, w.length),
            "{}",
            w.id()
        );
        assert_eq!(b.notes, w.notes, "{}", w.id());
        assert_eq!(b.target.as_ref().map(Family::name), w.target.as_ref().map(Family::name));
    }
    assert_eq!(back.len(), want.len());
}

#[test]
fn uniqueness_sentences_respect_order() {
    let u = uniqueness_sentences(64);
    assert!(u.iter().all(|s| s.target_order <= 64));
    assert_eq!(u.len(), soundness_sentences().len() - 1);
}

#[test]
fn report_jsonl_round_trip_and_csv() {
    let sents = uniqueness_sentences(8);
    let groups = corpus_build(8).unwrap().load().unwrap();
    let report = verify_uniqueness(&sents, &groups, &VerifyOptions::default()).unwrap();
    assert!(report.passed());
    assert_eq!(report.rows.len(), sents.len() * groups.len());
    let text = report.to_jsonl();
    assert_eq!(Report::from_jsonl(&text).unwrap().to_jsonl(), text);
    let csv = report.to_csv();
    assert!(csv.lines().count() > 1);
    assert_eq!(report.count(Status::Pass), report.rows.len());
    let accepted: Vec<_> = report.rows.iter().filter(|r| r.satisfied == Some(true)).collect();
    assert!(accepted.iter().all(|r| r.isomorphic == Some(true)));
}

#[test]
fn report_write_creates_csv_sibling() {
    let dir = tempfile::tempdir().unwrap();
    let report = verify_soundness(&soundness_sentences()[..4], &VerifyOptions::default()).unwrap();
    let path = dir.path().join("sound.jsonl");
    report.write(&path).unwrap();
    assert!(path.with_extension("csv").exists());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn tight_budget_is_reported() {
    let mut opts = VerifyOptions::default();
    opts.eval.budget = 1.0;
    let report = verify_soundness(&soundness_sentences(), &opts).unwrap();
    assert!(report.count(Status::BudgetExceeded) > 0);
    assert!(!report.passed());
}

#[test]
fn ranges() {
    assert_eq!(parse_range("2..10").unwrap(), 2..=10);
    assert_eq!(parse_range("2..=10").unwrap(), 2..=10);
    assert!(parse_range("10..2").is_err());
    assert!(parse_range("x").is_err());
}

#[test]
fn sampled_sweeps() {
    let s = Sweep {
        range: 2..=1_000_000,
        samples: Some(20),
    };
    let v = s.values();
    assert_eq!(v.len(), 20);
    assert_eq!((v[0], v[19]), (2, 1_000_000));
    assert!(v.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(v, s.values());
    assert_eq!(
        Sweep {
            range: 1..=5,
            samples: Some(9)
        }
        .values(),
        vec![1, 2, 3, 4, 5]
    );
}

#[test]
fn abelian_samples_stay_bounded() {
    for seed in 0..200 {
        let qs = abelian_sample(seed);
        assert!(qs.iter().product::<u64>() <= 1 << 20);
        assert_eq!(qs, abelian_sample(seed));
    }
}

#[test]
fn length_reports() {
    let r = grouplog::length_report(
        LengthFamily::Theta,
        &Sweep {
            range: 1..=64,
            samples: None,
        },
    )
    .unwrap();
    assert!(r.monotone());
    assert_eq!(r.rows.len(), 64);
    let sym = grouplog::length_report(
        LengthFamily::Symmetric,
        &Sweep {
            range: 3..=5,
            samples: None,
        },
    )
    .unwrap();
    assert!(sym.to_csv().starts_with("# symmetric:"));
    assert!(sym.within_golden());
}
