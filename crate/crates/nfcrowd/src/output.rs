//! Table and CSV renderings of reports, receipts and agent logs.

use anyhow::Result;
use clap::ValueEnum;
use nfcrowd_core::harness::{CompareReport, MatrixRow, ScenarioReport};
use nfcrowd_core::ledger::GasReceipt;
use nfcrowd_core::offchain::LogRecord;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Table,
    Csv,
    Json,
}

fn csv_of<T: Serialize>(rows: impl IntoIterator<Item = T>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(headers.to_vec());
    out += &line(widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().iter().map(String::as_str).collect());
    for row in rows {
        out += &line(row.iter().map(String::as_str).collect());
    }
    out
}

fn usd(x: f64) -> String {
    format!("{x:.2}")
}

#[derive(Serialize)]
struct ReceiptRow<'a> {
    tx_index: usize,
    function: &'a str,
    caller: String,
    gas_used: u64,
    cost_usd: String,
    phase: &'a str,
}

pub fn receipts_csv(receipts: &[GasReceipt]) -> Result<String> {
    csv_of(receipts.iter().map(|r| ReceiptRow {
        tx_index: r.tx_index,
        function: r.function.name(),
        caller: r.caller.to_string(),
        gas_used: r.gas_used,
        cost_usd: format!("{:.4}", r.cost_usd),
        phase: r.phase,
    }))
}

#[derive(Serialize)]
struct LogRow<'a> {
    at: u64,
    agent: String,
    phase: &'a str,
    action: &'a str,
    reason: &'a str,
}

pub fn log_csv(log: &[LogRecord]) -> Result<String> {
    csv_of(log.iter().map(|l| LogRow {
        at: l.at,
        agent: l.agent.to_string(),
        phase: &l.phase,
        action: &l.action,
        reason: &l.reason,
    }))
}

#[derive(Serialize)]
struct SummaryRow<'a> {
    label: &'a str,
    mode: &'a str,
    designers: usize,
    reviewers: usize,
    seed: u64,
    total_gas: u64,
    total_usd: String,
    cost_low_usd: String,
    cost_high_usd: String,
    tx_count: usize,
    verdict_source: &'a str,
    winners_match: bool,
    violations_expected: usize,
    violations_detected: usize,
    conservation_ok: bool,
    deposit_justice_ok: bool,
    passed: bool,
}

fn summary_row<'a>(label: &'a str, r: &'a ScenarioReport) -> SummaryRow<'a> {
    SummaryRow {
        label,
        mode: r.mode.name(),
        designers: r.designers,
        reviewers: r.reviewers,
        seed: r.seed,
        total_gas: r.total_gas,
        total_usd: format!("{:.4}", r.total_usd),
        cost_low_usd: format!("{:.4}", r.bounds.low),
        cost_high_usd: format!("{:.4}", r.bounds.high),
        tx_count: r.tx_count,
        verdict_source: &r.verdict_source,
        winners_match: r.winners_match,
        violations_expected: r.violations_expected,
        violations_detected: r.violations_detected,
        conservation_ok: r.conservation.ok,
        deposit_justice_ok: r.deposit_justice_ok,
        passed: r.passed(),
    }
}

fn verdict(r: &ScenarioReport) -> String {
    if r.passed() {
        "PASS".into()
    } else {
        format!("FAIL ({})", r.failures().join(", "))
    }
}

pub fn render_run(r: &ScenarioReport, format: Format) -> Result<String> {
    match format {
        Format::Csv => csv_of([summary_row("run", r)]),
        Format::Json => Ok(serde_json::to_string_pretty(r)? + "\n"),
        Format::Table => {
            let mut rows = vec![
                vec!["mode".into(), r.mode.name().into()],
                vec!["designers / reviewers".into(), format!("{} / {}", r.designers, r.reviewers)],
                vec!["contest transactions".into(), r.tx_count.to_string()],
                vec!["total gas".into(), r.total_gas.to_string()],
                vec!["total USD".into(), usd(r.total_usd)],
                vec!["cost bounds USD".into(), format!("[{}, {}]", usd(r.bounds.low), usd(r.bounds.high))],
            ];
            for (phase, v) in &r.per_phase_usd {
                rows.push(vec![format!("  phase {phase}"), usd(*v)]);
            }
            for (role, v) in &r.per_role_usd {
                rows.push(vec![format!("  paid by {role}"), usd(*v)]);
            }
            for (f, n) in &r.onchain_actions {
                rows.push(vec![format!("  {f}"), n.to_string()]);
            }
            let winners = |w: &[nfcrowd_core::ledger::Address]| {
                w.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
            };
            rows.push(vec!["verdict source".into(), r.verdict_source.clone()]);
            rows.push(vec!["final winners".into(), r.final_winners.as_deref().map_or("-".into(), winners)]);
            rows.push(vec!["oracle winners".into(), winners(&r.oracle_winners)]);
            rows.push(vec![
                "violations detected".into(),
                format!("{} of {}", r.violations_detected, r.violations_expected),
            ]);
            rows.push(vec!["conservation".into(), r.conservation.ok.to_string()]);
            rows.push(vec!["deposit justice".into(), r.deposit_justice_ok.to_string()]);
            rows.push(vec!["result".into(), verdict(r)]);
            Ok(table(&["field", "value"], &rows))
        }
    }
}

pub fn render_matrix(rows: &[MatrixRow], format: Format) -> Result<String> {
    match format {
        Format::Csv => csv_of(rows.iter().map(|m| summary_row(&m.label, &m.report))),
        Format::Json => {
            let v: Vec<_> = rows.iter().map(|m| serde_json::json!({ "label": m.label, "report": m.report })).collect();
            Ok(serde_json::to_string_pretty(&v)? + "\n")
        }
        Format::Table => {
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|m| {
                    let r = &m.report;
                    vec![
                        m.label.clone(),
                        usd(r.total_usd),
                        r.tx_count.to_string(),
                        r.verdict_source.clone(),
                        format!("{}/{}", r.violations_detected, r.violations_expected),
                        verdict(r),
                    ]
                })
                .collect();
            Ok(table(&["scenario", "usd", "txs", "verdict", "violations", "result"], &body))
        }
    }
}

#[derive(Serialize)]
struct CompareCsvRow {
    n: usize,
    strawman_usd: String,
    nfcrowd_usd: String,
    centralized_fee_usd: String,
    external_usd: String,
    break_even_reward_usd: String,
}

pub fn render_compare(c: &CompareReport, format: Format) -> Result<String> {
    let opt = |x: Option<f64>, dp: usize| x.map_or(String::new(), |v| format!("{v:.dp$}"));
    match format {
        Format::Csv => csv_of(c.rows.iter().map(|r| CompareCsvRow {
            n: r.n,
            strawman_usd: format!("{:.4}", r.strawman_usd),
            nfcrowd_usd: format!("{:.4}", r.nfcrowd_usd),
            centralized_fee_usd: format!("{:.4}", r.centralized_fee_usd),
            external_usd: opt(r.external_usd, 4),
            break_even_reward_usd: format!("{:.4}", c.break_even_reward_usd),
        })),
        Format::Json => Ok(serde_json::to_string_pretty(c)? + "\n"),
        Format::Table => {
            let body: Vec<Vec<String>> = c
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.n.to_string(),
                        usd(r.strawman_usd),
                        usd(r.nfcrowd_usd),
                        usd(r.centralized_fee_usd),
                        opt(r.external_usd, 2),
                    ]
                })
                .collect();
            let mut out = table(&["n", "strawman", "nf-crowd", "15% fee", "external"], &body);
            out += &format!("break-even reward: ${}\n", usd(c.break_even_reward_usd));
            Ok(out)
        }
    }
}
