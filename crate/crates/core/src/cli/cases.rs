//! Evidence-case files and report tables.
//!
//! A case file is CSV. The first column holds the case number, the others
//! are component names. A blank cell leaves the component unknown, an
//! integer fixes it and a brace list such as `{0 1}` restricts it to a set.

use std::fmt::Write as _;

use crate::catalog::{EvidenceCase, GroupResult, Report};
use crate::error::{Error, Result};
use crate::fuzzy::DirectProductSet;

/// Marker printed instead of numbers when the evidence has zero weight.
pub const NO_OUTPUT: &str = "no output";

fn cell_values(text: &str) -> Option<Vec<i32>> {
    if let Some(inner) = text.strip_prefix('{').and_then(|t| t.strip_suffix('}')) {
        let v: Option<Vec<i32>> = inner
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty())
            .map(|s| s.parse().ok())
            .collect();
        return v.filter(|v| !v.is_empty());
    }
    text.parse().ok().map(|v| vec![v])
}

/// Returns the component columns and the cases in file order. Columns are
/// numbered from 1 in errors.
pub fn parse_cases(text: &str) -> Result<(Vec<String>, Vec<EvidenceCase>)> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(text.as_bytes());
    let header = rdr.headers().map_err(|e| Error::parse(1, 1, e.to_string()))?.clone();
    if header.is_empty() {
        return Ok((Vec::new(), Vec::new()));
    }
    if header.get(0) != Some("case") {
        return Err(Error::parse(1, 1, "first column must be `case`"));
    }
    let columns: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    for (i, c) in columns.iter().enumerate() {
        if c.is_empty() || columns[..i].contains(c) {
            return Err(Error::parse(1, i + 2, format!("bad or repeated column name `{c}`")));
        }
    }
    let mut cases = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            Error::parse(line, 1, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let number: u32 = rec[0]
            .parse()
            .map_err(|_| Error::parse(line, 1, format!("`{}` is not a case number", &rec[0])))?;
        let mut evidence = DirectProductSet::full();
        for (k, cell) in rec.iter().enumerate().skip(1) {
            if cell.is_empty() {
                continue;
            }
            let v = cell_values(cell).ok_or_else(|| Error::parse(line, k + 1, format!("cannot read `{cell}`")))?;
            evidence.insert(&columns[k - 1], v)?;
        }
        cases.push(EvidenceCase { number, evidence });
    }
    Ok((columns, cases))
}

pub fn emit_cases(columns: &[&str], cases: &[EvidenceCase]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut head = vec!["case"];
    head.extend_from_slice(columns);
    w.write_record(&head).unwrap();
    for c in cases {
        let mut row = vec![c.number.to_string()];
        for col in columns {
            row.push(match c.evidence.get(col) {
                None => String::new(),
                Some(s) if s.len() == 1 => s.iter().next().unwrap().to_string(),
                Some(s) => format!("{{{}}}", s.iter().map(i32::to_string).collect::<Vec<_>>().join(" ")),
            });
        }
        w.write_record(&row).unwrap();
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}

/// Twelve significant digits, fixed-point for ordinary magnitudes.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let exp: i32 = sci.split_once('e').and_then(|(_, e)| e.parse().ok()).unwrap_or(0);
    if (-6..12).contains(&exp) {
        format!("{:.*}", (11 - exp).max(0) as usize, x)
    } else {
        sci
    }
}

pub fn fmt_values(v: &[i32]) -> String {
    v.iter().map(i32::to_string).collect::<Vec<_>>().join(",")
}

pub fn fmt_evidence(e: &DirectProductSet) -> String {
    if e.is_unconstrained() {
        "no evidence".into()
    } else {
        e.to_string()
    }
}

fn groups(r: &crate::catalog::ReportRow) -> Vec<(&'static str, &GroupResult)> {
    let mut g = vec![("CB", &r.classical)];
    if let Some(q) = &r.quantum {
        g.push(("QB", q));
    }
    g
}

pub fn render_text(report: &Report) -> String {
    let mut out = String::new();
    for b in &report.blocks {
        writeln!(out, "case {}: {}", b.number, fmt_evidence(&b.evidence)).unwrap();
        if b.contradiction {
            writeln!(out, "  {NO_OUTPUT}").unwrap();
            continue;
        }
        for row in &b.rows {
            let h = row.hypothesis.join(" ");
            for (i, (net, g)) in groups(row).into_iter().enumerate() {
                let label = if i == 0 { h.as_str() } else { "" };
                let body = match g {
                    GroupResult::Values(d) => {
                        let mut s: Vec<String> = d
                            .probabilities
                            .iter()
                            .map(|(v, p)| format!("P({})={}", fmt_values(v), fmt_num(*p)))
                            .collect();
                        s.push(format!("f_qna={}", fmt_num(d.f_qna)));
                        s.join("  ")
                    }
                    GroupResult::Contradiction => NO_OUTPUT.into(),
                    GroupResult::Failed(m) => format!("error: {m}"),
                };
                writeln!(out, "  {label:<24} {net}  {body}").unwrap();
            }
        }
    }
    out
}

pub fn render_csv(report: &Report) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["case", "hypothesis", "net", "value", "probability", "f_qna"])
        .unwrap();
    for b in &report.blocks {
        let case = b.number.to_string();
        for row in &b.rows {
            let h = row.hypothesis.join(" ");
            for (net, g) in groups(row) {
                match g {
                    GroupResult::Values(d) => {
                        let f = fmt_num(d.f_qna);
                        for (v, p) in &d.probabilities {
                            w.write_record([&case, &h, net, &fmt_values(v), &fmt_num(*p), &f])
                                .unwrap();
                        }
                    }
                    GroupResult::Contradiction => w.write_record([&case, &h, net, "", NO_OUTPUT, ""]).unwrap(),
                    GroupResult::Failed(m) => w
                        .write_record([&case, &h, net, "", &format!("error: {m}"), ""])
                        .unwrap(),
                }
            }
        }
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}
