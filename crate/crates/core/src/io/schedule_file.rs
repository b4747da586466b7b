//! Text form of a [`Schedule`], one item per line:
//!
//! ```text
//! # comments
//! diag  <weight> | <symbol>
//! chin  <scheme> <t2> <swapped> | <T symbol> | <V symbol>
//! phase <weight> | <constant in hbar>
//! ```

use std::path::Path;

use crate::error::{Error, Result};
use crate::moyal::{parse_hbar_poly, parse_polynomial};
use crate::schemes::{GeneratorPair, Schedule, ScheduleItem, SchemeKind};

pub fn format_schedule(schedule: &Schedule, comments: &[String]) -> String {
    let mut s = String::from("# nonsep schedule\n");
    for c in comments {
        for line in c.lines() {
            s.push_str("# ");
            s.push_str(line);
            s.push('\n');
        }
    }
    for item in &schedule.items {
        match item {
            ScheduleItem::Diagonal { symbol, weight } => {
                s.push_str(&format!("diag {weight:?} | {symbol}\n"));
            }
            ScheduleItem::Chin { kind, t2, pair } => {
                s.push_str(&format!(
                    "chin {} {t2:?} {} | {} | {}\n",
                    kind.name(),
                    pair.swapped,
                    pair.t_symbol,
                    pair.v_symbol
                ));
            }
            ScheduleItem::Phase { constant, weight } => {
                s.push_str(&format!("phase {weight:?} | {constant}\n"));
            }
        }
    }
    s
}

pub fn parse_schedule(text: &str) -> Result<Schedule> {
    let mut items = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let cerr = |message: String| Error::Config { line, message };
        let parts: Vec<&str> = body.split('|').map(str::trim).collect();
        let head: Vec<&str> = parts[0].split_whitespace().collect();
        let real = |s: &str| s.parse::<f64>().map_err(|_| cerr(format!("'{s}' is not a real number")));
        let poly = |s: &str| parse_polynomial(s).map_err(|e| cerr(e.to_string()));
        match (head.as_slice(), parts.len()) {
            (["diag", w], 2) => items.push(ScheduleItem::Diagonal {
                weight: real(w)?,
                symbol: poly(parts[1])?,
            }),
            (["phase", w], 2) => items.push(ScheduleItem::Phase {
                weight: real(w)?,
                constant: parse_hbar_poly(parts[1]).map_err(|e| cerr(e.to_string()))?,
            }),
            (["chin", kind, t2, swapped], 3) => {
                let swapped = match *swapped {
                    "true" => true,
                    "false" => false,
                    other => return Err(cerr(format!("swapped flag '{other}'"))),
                };
                let pair = GeneratorPair::new(poly(parts[1])?, poly(parts[2])?)
                    .map_err(|e| cerr(e.to_string()))?
                    .with_swapped(swapped);
                items.push(ScheduleItem::Chin {
                    kind: SchemeKind::parse(kind).map_err(|e| cerr(e.to_string()))?,
                    t2: real(t2)?,
                    pair,
                });
            }
            _ => return Err(cerr(format!("unrecognized schedule line '{body}'"))),
        }
    }
    let schedule = Schedule::new(items);
    schedule.validate()?;
    Ok(schedule)
}

pub fn write_schedule(path: &Path, schedule: &Schedule, comments: &[String]) -> Result<()> {
    std::fs::write(path, format_schedule(schedule, comments))
        .map_err(|e| Error::io(format!("writing schedule {}", path.display()), e))
}

pub fn read_schedule(path: &Path) -> Result<Schedule> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::io(format!("reading schedule {}", path.display()), e))?;
    parse_schedule(&text)
}
