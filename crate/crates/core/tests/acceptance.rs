//! Acceptance gate: runs every verification suite once at its default size
//! and checks the nine acceptance criteria against the records.
//!
//! Each criterion selects records by id, requires the expected number of
//! them, requires every one to pass, and where a time limit applies, bounds
//! the summed wall time of the selected records.

use msogrid::report::{CheckRecord, Status, VerificationReport};
use msogrid::verify::{run_suite, Suite, VerifyOptions};
use std::collections::HashMap;

enum Match {
    Prefix(&'static str),
    Custom(&'static str, fn(&str) -> bool),
}

impl Match {
    fn describe(&self) -> &'static str {
        match self {
            Match::Prefix(p) | Match::Custom(p, _) => p,
        }
    }

    fn accepts(&self, id: &str) -> bool {
        match self {
            Match::Prefix(p) => id.starts_with(p),
            Match::Custom(_, f) => f(id),
        }
    }
}

/// Records of one suite accepted by `matches`; exactly `count` are required.
struct Selection {
    suite: Suite,
    matches: Match,
    count: usize,
}

fn sel(suite: Suite, what: &'static str, f: fn(&str) -> bool, count: usize) -> Selection {
    Selection {
        suite,
        matches: Match::Custom(what, f),
        count,
    }
}

fn prefix(suite: Suite, p: &'static str, count: usize) -> Selection {
    Selection {
        suite,
        matches: Match::Prefix(p),
        count,
    }
}

struct Criterion {
    number: usize,
    title: &'static str,
    selections: Vec<Selection>,
    limit_s: Option<f64>,
}

fn criteria() -> Vec<Criterion> {
    use Suite::*;
    vec![
        Criterion {
            number: 1,
            title: "bichain grids: Psi(Z_{n+2}) isomorphic to grid(n,n), n = 1..5",
            selections: vec![prefix(Bichain, "bichain/psi/", 5)],
            limit_s: Some(60.0),
        },
        Criterion {
            number: 2,
            title: "word-class grids: Delta, both contractions agree on U_2n, grid(n,n) embeds",
            selections: vec![sel(Word, "word stages", |id| id.starts_with("word/") && !id.ends_with("/ground-truth"), 4 * 3 * 5)],
            limit_s: Some(300.0),
        },
        Criterion {
            number: 3,
            title: "power-graph embedding: explicit map for (2,12),(2,20),(3,40), search for (2,12)",
            selections: vec![prefix(Power, "power/embedding/", 3), prefix(Power, "power/search/", 1)],
            limit_s: Some(120.0),
        },
        Criterion {
            number: 4,
            title: "predicate ground truth on H_1,H_2, Z_4..Z_7 and D_10..D_20",
            selections: vec![
                sel(Word, "word ground truth", |id| id.starts_with("word/") && id.ends_with("/ground-truth"), 4 * 2),
                prefix(Bichain, "bichain/ground-truth/", 4),
                prefix(Power, "power/ground-truth/", 6),
            ],
            limit_s: None,
        },
        Criterion {
            number: 5,
            title: "relativization on 200 seeded random triples",
            selections: vec![prefix(Relativize, "relativize/", 1)],
            limit_s: Some(60.0),
        },
        Criterion {
            number: 6,
            title: "TC primitive vs naive encoding; between vs set form on D_n, n <= 14",
            selections: vec![prefix(Tc, "tc/", 3), prefix(Power, "power/between/", 14)],
            limit_s: None,
        },
        Criterion {
            number: 7,
            title: "widths: twd and cwd values, subdivision extension, cwd-twd bound, cwd(grid 3x3) = 4",
            selections: vec![
                prefix(Widths, "widths/twd/", 3),
                prefix(Widths, "widths/cwd/", 5),
                prefix(Widths, "widths/subdivision-extension/", 3),
                prefix(Widths, "widths/cwd-twd-bound", 1),
            ],
            limit_s: None,
        },
        Criterion {
            number: 8,
            title: "Gamma class: T_n shape, antichains, branch vertices and mn",
            selections: vec![
                prefix(GammaClass, "gamma/Tn/", 6),
                prefix(GammaClass, "gamma/antichain/", 2),
                prefix(GammaClass, "gamma/branch/", 6),
            ],
            limit_s: None,
        },
        Criterion {
            number: 9,
            title: "split round trip for n <= 6; P_n embeds in the alpha = 2 word family, n <= 5",
            selections: vec![prefix(Split, "split/round-trip/", 6), prefix(Bpg, "bpg/", 10)],
            limit_s: None,
        },
    ]
}

fn select<'a>(report: &'a VerificationReport, s: &Selection) -> Vec<&'a CheckRecord> {
    report.records.iter().filter(|r| s.matches.accepts(&r.id)).collect()
}

#[test]
fn acceptance() {
    let mut reports: HashMap<Suite, VerificationReport> = HashMap::new();
    for suite in Suite::ALL {
        let opts = VerifyOptions {
            extended: suite == Suite::Widths,
            ..VerifyOptions::default()
        };
        reports.insert(suite, run_suite(suite, &opts));
    }

    let mut failed = vec![];
    for c in criteria() {
        let mut problems = vec![];
        let mut total_ms = 0.0;
        let mut count = 0;
        for s in &c.selections {
            let recs = select(&reports[&s.suite], s);
            if recs.len() != s.count {
                problems.push(format!("{}: {} records, expected {}", s.matches.describe(), recs.len(), s.count));
            }
            for r in recs {
                total_ms += r.wall_ms;
                count += 1;
                if r.status != Status::Pass {
                    problems.push(format!("{} {}: expected {}, observed {}", r.status, r.id, r.expected, r.observed));
                }
            }
        }
        if let Some(limit) = c.limit_s {
            if total_ms / 1e3 > limit {
                problems.push(format!("took {:.1} s, limit {limit} s", total_ms / 1e3));
            }
        }
        let verdict = if problems.is_empty() { "PASS" } else { "FAIL" };
        println!(
            "criterion {}: {verdict}  {}  ({count} checks, {:.1} s)",
            c.number,
            c.title,
            total_ms / 1e3
        );
        for p in &problems {
            println!("    {p}");
        }
        if !problems.is_empty() {
            failed.push(c.number);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
