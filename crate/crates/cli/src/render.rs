//! Plain-text rendering. Numbers are shown to three decimals; the JSON
//! output carries full precision.

use std::fmt::Write;

use melodic_measure::distribution::{DistributionCheck, SpacingLabReport};
use melodic_measure::experiments::{Claim, ExperimentReport, Verdict};
use melodic_measure::search::Rejection;
use melodic_measure::{AestheticScore, CandidateReport, Decomposition, PermutationReport, Piece, SweepReport};

fn list(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v}")).collect::<Vec<_>>().join(", ")
}

fn header(out: &mut String, piece: &Piece, shift: i32) {
    let _ = write!(out, "{}: {}", piece.label(), list(piece.frequencies()));
    if shift != 0 {
        let _ = write!(out, "  (shifted {shift:+} octave(s))");
    }
    out.push('\n');
}

pub fn score(piece: &Piece, shift: i32, score: &AestheticScore) -> String {
    let mut out = String::new();
    header(&mut out, piece, shift);
    let _ = writeln!(out, "{:<6}{:>14}{:>14}{:>10}", "level", "entropy", "energy", "ratio");
    for (name, level) in score.levels() {
        let _ = writeln!(out, "{:<6}{:>14.3}{:>14.3}{:>10.3}", name, level.entropy, level.energy, level.ratio);
    }
    let _ = writeln!(out, "M = {:.3}", score.m);
    out
}

pub fn decomposition(piece: &Piece, shift: i32, dec: &Decomposition) -> String {
    let mut out = String::new();
    header(&mut out, piece, shift);
    let _ = writeln!(out, "  l1 = [{}]", list(&dec.l1));
    let _ = writeln!(out, "  t  = [{}]", list(&dec.t));
    let _ = writeln!(out, "  w  = [{}]", list(&dec.w));
    let _ = writeln!(out, "  d  = {}", dec.d);
    out
}

pub fn check(piece: &Piece, check: &DistributionCheck) -> String {
    let clusters: Vec<String> = check.partition.clusters.iter().map(|c| format!("[{}]", list(c))).collect();
    format!(
        "{}: clusters {} sizes {:?} expected {:?} -> {}\n",
        piece.label(),
        clusters.join(" "),
        check.partition.signature,
        check.expected,
        if check.passed { "pass" } else { "fail" }
    )
}

fn rejection(r: &Rejection) -> String {
    match r {
        Rejection::NonPositiveFrequency { index, value } => format!("frequency {index} is {value}"),
        Rejection::Signature { found } => format!("cluster sizes {found:?}"),
        Rejection::Unscorable { message } => message.clone(),
    }
}

fn candidate_line(out: &mut String, c: &CandidateReport) {
    let rank = c.rank.map_or_else(|| "-".to_owned(), |r| r.to_string());
    let m = c.m().map_or_else(|| "-".to_owned(), |m| format!("{m:.3}"));
    let _ = write!(out, "{rank:>5}  {:<22}{m:>8}", c.pattern.to_string());
    if let Some(r) = &c.rejection {
        let _ = write!(out, "  rejected: {}", rejection(r));
    }
    out.push('\n');
}

pub fn candidate_rows(candidates: &[CandidateReport]) -> Vec<Vec<String>> {
    candidates
        .iter()
        .map(|c| {
            vec![
                c.pattern.to_string(),
                c.m().map(|m| m.to_string()).unwrap_or_default(),
                c.passed_filter.to_string(),
                c.rank.map(|r| r.to_string()).unwrap_or_default(),
            ]
        })
        .collect()
}

pub fn permutation(report: &PermutationReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{}: original {} L1 ratio {:.3}, {} arrangement(s)",
        report.label,
        report.original,
        report.original_l1_ratio,
        report.candidates.len()
    );
    let _ = writeln!(out, "{:>5}  {:<22}{:>8}", "rank", "pattern", "M");
    for c in &report.candidates {
        candidate_line(&mut out, c);
    }
    let _ = writeln!(
        out,
        "original has the highest L1 ratio among passing arrangements: {}",
        if report.original_is_argmax { "yes" } else { "no" }
    );
    out
}

pub fn sweep(report: &SweepReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "energy level {}: {} pattern(s), {} passing",
        report.config.target_level.0, report.enumerated, report.passing
    );
    let _ = writeln!(out, "{:>5}  {:<22}{:>8}", "rank", "pattern", "M");
    for c in report.candidates.iter().filter(|c| c.passed_filter) {
        candidate_line(&mut out, c);
    }
    out
}

fn claim_line(out: &mut String, c: &Claim) {
    let mark = match c.verdict {
        Verdict::Pass => "pass",
        Verdict::Divergence => "DIVERGENCE",
    };
    let _ = writeln!(out, "{mark:<11}{:<28} expected {}  computed {}", c.id, fmt_value(&c.expected), fmt_value(&c.computed));
    if let Some(note) = &c.note {
        let _ = writeln!(out, "           {note}");
    }
}

fn fmt_value(v: &serde_json::Value) -> String {
    match v.as_f64() {
        Some(x) if !v.is_u64() && !v.is_i64() => format!("{x:.3}"),
        _ => v.to_string(),
    }
}

pub fn experiment(report: &ExperimentReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", report.experiment);
    for c in &report.claims {
        claim_line(&mut out, c);
    }
    let _ = writeln!(out, "{} of {} claims reproduced", report.passed(), report.claims.len());
    out
}

pub fn fig3(lab: &SpacingLabReport, claim: &Claim) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{} spacing(s) summing to {} on a step-{} grid up to {}: {} multiset(s)",
        lab.count,
        lab.target_sum,
        lab.step,
        lab.max_value,
        lab.ranked.len()
    );
    for m in lab.ranked.iter().take(10) {
        let _ = writeln!(out, "  R = {:>8.3}  [{}]", m.r, list(&m.values));
    }
    if lab.ranked.len() > 10 {
        let _ = writeln!(out, "  ... {} more", lab.ranked.len() - 10);
    }
    if !lab.histogram.is_empty() {
        let _ = writeln!(out, "argmax histogram (surmise beta = {}):", lab.beta.get());
        for bin in &lab.histogram {
            let _ = writeln!(out, "  {:>6} {:<6} {:.3}", bin.value, "#".repeat(bin.count), bin.surmise);
        }
    }
    claim_line(&mut out, claim);
    out
}
