//! Text formats for sequences, phase vectors and iteration traces.
//!
//! Sequence files start with `# seqforge sequence P=<P>` followed by one
//! `re im` pair per line in 17 significant digits. Phase files start with
//! `# seqforge phases P=<P>` followed by one radian value per line. Trace
//! files are CSV with header `iter,isl,elapsed_s,bound_m` and a trailing
//! `# stop_reason=<reason>` comment.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::num::Real;
use crate::sequence::{PhaseVector, Sequence};
use crate::solvers::{IterationTrace, StopReason, TraceRecord};

const SEQUENCE_TAG: &str = "# seqforge sequence P=";
const PHASES_TAG: &str = "# seqforge phases P=";
pub const TRACE_HEADER: &str = "iter,isl,elapsed_s,bound_m";

pub fn format_sequence<T: Real>(z: &Sequence<T>) -> String {
    let mut out = format!("{SEQUENCE_TAG}{}\n", z.len());
    for s in z.samples() {
        writeln!(out, "{:.16e} {:.16e}", s.re, s.im).expect("writing to a String cannot fail");
    }
    out
}

pub fn format_phases<T: Real>(phases: &PhaseVector<T>) -> String {
    let mut out = format!("{PHASES_TAG}{}\n", phases.len());
    for p in phases.as_slice() {
        writeln!(out, "{p:.16e}").expect("writing to a String cannot fail");
    }
    out
}

fn parse_header(line: Option<&str>, tag: &str) -> Result<usize> {
    let line = line.ok_or(Error::Parse {
        line: 1,
        msg: "empty input".into(),
    })?;
    let len = line
        .trim()
        .strip_prefix(tag)
        .ok_or_else(|| Error::Parse {
            line: 1,
            msg: format!("expected header `{tag}<P>`, found `{line}`"),
        })?;
    len.trim().parse().map_err(|_| Error::Parse {
        line: 1,
        msg: format!("bad length `{len}`"),
    })
}

fn parse_number<T: Real>(token: &str, line: usize) -> Result<T> {
    let v: f64 = token.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("bad number `{token}`"),
    })?;
    Ok(T::from_f64_lossy(v))
}

fn body(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .skip(1)
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn check_count(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::Parse {
            line: 1,
            msg: format!("header declares P={expected} but {got} samples follow"),
        });
    }
    Ok(())
}

/// Parses either the sequence or the phase-only format.
pub fn parse_sequence<T: Real>(text: &str) -> Result<Sequence<T>> {
    let first = text.lines().next();
    if first.is_some_and(|l| l.trim_start().starts_with(PHASES_TAG)) {
        return parse_phases(text)?.to_sequence();
    }
    let len = parse_header(first, SEQUENCE_TAG)?;
    let mut samples = Vec::with_capacity(len);
    for (line, content) in body(text) {
        let mut parts = content.split_whitespace();
        let (Some(re), Some(im), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::Parse {
                line,
                msg: "expected `re im`".into(),
            });
        };
        samples.push(Complex::new(parse_number(re, line)?, parse_number(im, line)?));
    }
    check_count(len, samples.len())?;
    Sequence::new(samples)
}

pub fn parse_phases<T: Real>(text: &str) -> Result<PhaseVector<T>> {
    let len = parse_header(text.lines().next(), PHASES_TAG)?;
    let phases = body(text)
        .map(|(line, content)| parse_number(content, line))
        .collect::<Result<Vec<T>>>()?;
    check_count(len, phases.len())?;
    Ok(PhaseVector::new(phases))
}

pub fn read_sequence<T: Real>(path: impl AsRef<Path>) -> Result<Sequence<T>> {
    parse_sequence(&fs::read_to_string(path)?)
}

pub fn write_sequence<T: Real>(path: impl AsRef<Path>, z: &Sequence<T>) -> Result<()> {
    fs::write(path, format_sequence(z))?;
    Ok(())
}

pub fn format_trace(trace: &IterationTrace) -> String {
    let mut out = format!("{TRACE_HEADER}\n");
    for r in &trace.records {
        let bound = r.bound_m.map(|m| format!("{m:.16e}")).unwrap_or_default();
        writeln!(
            out,
            "{},{:.16e},{:.9},{}",
            r.iteration, r.isl, r.elapsed_seconds, bound
        )
        .expect("writing to a String cannot fail");
    }
    writeln!(out, "# stop_reason={}", trace.stop_reason).expect("writing to a String cannot fail");
    out
}

pub fn parse_trace(text: &str) -> Result<IterationTrace> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == TRACE_HEADER => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                msg: format!("expected header `{TRACE_HEADER}`"),
            })
        }
    }
    let mut records = Vec::new();
    let mut stop_reason = None;
    for (i, l) in lines {
        let line = i + 1;
        let l = l.trim();
        if let Some(reason) = l.strip_prefix("# stop_reason=") {
            stop_reason = Some(reason.parse::<StopReason>().map_err(|e| Error::Parse {
                line,
                msg: e.to_string(),
            })?);
            continue;
        }
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = l.split(',').collect();
        if fields.len() != 4 {
            return Err(Error::Parse {
                line,
                msg: "expected 4 fields".into(),
            });
        }
        let bad = |what: &str| Error::Parse {
            line,
            msg: format!("bad {what}"),
        };
        records.push(TraceRecord {
            iteration: fields[0].parse().map_err(|_| bad("iteration"))?,
            isl: fields[1].parse().map_err(|_| bad("isl"))?,
            elapsed_seconds: fields[2].parse().map_err(|_| bad("elapsed_s"))?,
            bound_m: if fields[3].is_empty() {
                None
            } else {
                Some(fields[3].parse().map_err(|_| bad("bound_m"))?)
            },
        });
    }
    Ok(IterationTrace {
        records,
        stop_reason: stop_reason.ok_or(Error::Parse {
            line: 0,
            msg: "missing `# stop_reason=` line".into(),
        })?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequence::random_sequence;
    use proptest::prelude::*;

    #[test]
    fn sequence_text_layout() {
        let z = Sequence::from_phases(&[0.0, std::f64::consts::FRAC_PI_2]).unwrap();
        let text = format_sequence(&z);
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "# seqforge sequence P=2");
        assert_eq!(lines[1], "1.0000000000000000e0 0.0000000000000000e0");
        assert_eq!(lines.len(), 3);
    }

    #[test]
    fn phases_text() {
        let phases = PhaseVector::new(vec![0.5, 1.5]);
        let text = format_phases(&phases);
        assert!(text.starts_with("# seqforge phases P=2\n"));
        assert_eq!(parse_phases::<f64>(&text).unwrap(), phases);
        let z = parse_sequence::<f64>(&text).unwrap();
        assert!((z.samples()[0].arg() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn parse_errors() {
        assert!(parse_sequence::<f64>("").is_err());
        assert!(parse_sequence::<f64>("# seqforge sequence P=2\n1 0\n").is_err());
        assert!(parse_sequence::<f64>("# seqforge sequence P=1\n1 0 3\n").is_err());
        assert!(parse_sequence::<f64>("# seqforge sequence P=1\nx 0\n").is_err());
        assert!(matches!(
            parse_sequence::<f64>("# seqforge sequence P=1\n0.5 0\n"),
            Err(Error::NotUnimodular { .. })
        ));
        assert!(parse_sequence::<f64>("hello\n").is_err());
    }

    #[test]
    fn trace_csv() {
        let trace = IterationTrace {
            records: vec![
                TraceRecord {
                    iteration: 0,
                    isl: 12.5,
                    elapsed_seconds: 0.0,
                    bound_m: None,
                },
                TraceRecord {
                    iteration: 1,
                    isl: 10.0,
                    elapsed_seconds: 0.001,
                    bound_m: Some(24.0),
                },
            ],
            stop_reason: StopReason::Converged,
        };
        let text = format_trace(&trace);
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "iter,isl,elapsed_s,bound_m");
        assert!(lines[1].ends_with(','));
        assert_eq!(*lines.last().unwrap(), "# stop_reason=converged");
        assert_eq!(parse_trace(&text).unwrap(), trace);
        assert!(parse_trace("iter,isl,elapsed_s,bound_m\n").is_err());
    }

    proptest! {
        #[test]
        fn sequence_text_round_trips_bit_exactly(len in 1usize..64, seed in any::<u64>()) {
            let z = random_sequence::<f64>(len, seed).unwrap();
            let back: Sequence<f64> = parse_sequence(&format_sequence(&z)).unwrap();
            prop_assert_eq!(back, z);
        }
    }
}
