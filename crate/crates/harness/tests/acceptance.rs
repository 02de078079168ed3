//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use grouplog::checks::{
    engines_agree, pi_vs_closure, theta_vs_power, ut3_center, ut3_commutator_identity, ut3_multiplication_law,
    CheckOutcome,
};
use grouplog::sentences::{soundness_sentences, uniqueness_sentences};
use grouplog::{
    corpus_build, length_report, verify_soundness, verify_uniqueness, LengthFamily, NamedGroup, Report, Status,
    VerifyOptions,
};
use grouplog_core::iso::isomorphic;
use grouplog_core::Mode;

const SOUNDNESS_LIMIT: Duration = Duration::from_secs(600);

struct Verdict {
    ok: bool,
    detail: String,
}

fn report_line(n: usize, title: &str, v: &Verdict) {
    println!(
        "criterion {n} ({title}): {} {}",
        if v.ok { "PASS" } else { "FAIL" },
        v.detail
    );
}

fn outcome_text(o: &CheckOutcome) -> String {
    match &o.first {
        Some(first) => format!("{}: {} of {} mismatched, first {first}", o.name, o.mismatches, o.cases),
        None => format!("{}: {} cases", o.name, o.cases),
    }
}

fn first_bad(r: &Report) -> String {
    r.rows
        .iter()
        .find(|row| row.status != Status::Pass)
        .map(|row| format!(", first {} on {} ({})", row.sentence, row.group, row.status.as_str()))
        .unwrap_or_default()
}

/// Counts isomorphism classes among the groups of the given order.
fn iso_classes(groups: &[NamedGroup], order: usize) -> usize {
    let mut reps: Vec<&NamedGroup> = Vec::new();
    for g in groups.iter().filter(|g| g.group.order() == order) {
        let fresh = reps
            .iter()
            .all(|r| !isomorphic(&r.group, &g.group).expect("small groups").isomorphic);
        if fresh {
            reps.push(g);
        }
    }
    reps.len()
}

fn soundness(report: &Report, elapsed: Duration) -> Verdict {
    let heavy_grounded = report
        .rows
        .iter()
        .filter(|r| r.sentence.starts_with("ut3") || r.sentence.starts_with("simple"))
        .all(|r| r.stats.as_ref().is_some_and(|s| s.mode == Mode::Grounded));
    let pass = report.count(Status::Pass);
    Verdict {
        ok: report.passed() && elapsed <= SOUNDNESS_LIMIT && heavy_grounded && pass == report.rows.len(),
        detail: format!(
            "{pass}/{} sentences hold in their targets in {:.1}s, ut3 and A5 grounded: {heavy_grounded}{}",
            report.rows.len(),
            elapsed.as_secs_f64(),
            first_bad(report)
        ),
    }
}

fn uniqueness(report: &Report, groups: &[NamedGroup]) -> Verdict {
    let budget = report.count(Status::BudgetExceeded);
    let disagreements = report
        .rows
        .iter()
        .filter(|r| r.satisfied.is_some() && r.satisfied != r.isomorphic)
        .count();
    let order8 = iso_classes(groups, 8);
    let order4 = iso_classes(groups, 4);
    Verdict {
        ok: report.passed() && budget == 0 && disagreements == 0 && groups.len() >= 25 && order8 == 5,
        detail: format!(
            "{} cells over {} groups ({order4} classes of order 4, {order8} of order 8), \
             {disagreements} disagreements, {budget} over budget{}",
            report.rows.len(),
            groups.len(),
            first_bad(report)
        ),
    }
}

fn oracles(groups: &[NamedGroup]) -> Verdict {
    let upto = |max: usize| -> Vec<NamedGroup> { groups.iter().filter(|g| g.group.order() <= max).cloned().collect() };
    let small = upto(24);
    let tiny = upto(8);
    let outcomes = [
        theta_vs_power(&small, 100),
        pi_vs_closure(&small),
        engines_agree(&tiny, 200, 0x5eed),
    ];
    Verdict {
        ok: outcomes.iter().all(CheckOutcome::passed),
        detail: format!(
            "{} groups of order <= 24, {} of order <= 8; {}",
            small.len(),
            tiny.len(),
            outcomes.iter().map(outcome_text).collect::<Vec<_>>().join("; ")
        ),
    }
}

fn lengths() -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for fam in LengthFamily::ALL {
        let r = length_report(fam, &fam.default_sweep()).expect("default sweeps generate");
        let mut good = r.within_golden();
        if fam == LengthFamily::Theta {
            good &= r.monotone();
        }
        if fam == LengthFamily::Symmetric {
            good &= r.to_csv().starts_with("# symmetric:");
        }
        ok &= good;
        let golden = r.golden.map_or_else(|| "missing".to_string(), |g| format!("{g:.3}"));
        parts.push(format!(
            "{} {:.3}<={golden} over {} rows",
            fam.as_str(),
            r.max_ratio,
            r.rows.len()
        ));
    }
    Verdict {
        ok,
        detail: parts.join(", "),
    }
}

fn ut3_identities() -> Verdict {
    let outcomes: Vec<CheckOutcome> = [2, 3, 4]
        .into_iter()
        .flat_map(|n| [ut3_multiplication_law(n), ut3_commutator_identity(n), ut3_center(n)])
        .collect();
    let cases: u64 = outcomes.iter().map(|o| o.cases).sum();
    let bad: Vec<String> = outcomes.iter().filter(|o| !o.passed()).map(outcome_text).collect();
    Verdict {
        ok: bad.is_empty(),
        detail: if bad.is_empty() {
            format!("{cases} cases, zero violations")
        } else {
            bad.join("; ")
        },
    }
}

fn determinism(parallel: (&Report, &Report), serial: (&Report, &Report), threads: usize) -> Verdict {
    let same_s = parallel.0.to_jsonl() == serial.0.to_jsonl();
    let same_u = parallel.1.to_jsonl() == serial.1.to_jsonl();
    Verdict {
        ok: same_s && same_u,
        detail: format!("1 vs {threads} threads: soundness identical {same_s}, uniqueness identical {same_u}"),
    }
}

fn main() -> ExitCode {
    let threads = std::thread::available_parallelism().map_or(4, |n| n.get()).max(4);
    let parallel = VerifyOptions {
        threads,
        ..VerifyOptions::default()
    };
    let serial = VerifyOptions {
        threads: 1,
        ..VerifyOptions::default()
    };

    let sentences = soundness_sentences();
    let start = Instant::now();
    let sound = verify_soundness(&sentences, &parallel).expect("soundness runs");
    let elapsed = start.elapsed();

    let groups = corpus_build(64).and_then(|c| c.load()).expect("corpus builds");
    let targets = uniqueness_sentences(64);
    let unique = verify_uniqueness(&targets, &groups, &parallel).expect("uniqueness runs");

    let sound_serial = verify_soundness(&sentences, &serial).expect("soundness runs");
    let unique_serial = verify_uniqueness(&targets, &groups, &serial).expect("uniqueness runs");

    let verdicts = [
        ("soundness", soundness(&sound, elapsed)),
        ("uniqueness", uniqueness(&unique, &groups)),
        ("oracle equivalence", oracles(&groups)),
        ("length scaling", lengths()),
        ("ut3 identities", ut3_identities()),
        (
            "determinism",
            determinism((&sound, &unique), (&sound_serial, &unique_serial), threads),
        ),
    ];
    for (i, (title, v)) in verdicts.iter().enumerate() {
        report_line(i + 1, title, v);
    }
    if verdicts.iter().all(|(_, v)| v.ok) {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
