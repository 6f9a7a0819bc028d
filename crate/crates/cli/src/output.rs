//! CSV and JSON writers.

use crate::CliError;
use num_complex::Complex64;
use reslocus::{Locus, LocusEvent};
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};

/// Decimal formatting: 17 significant digits in scientific notation, which
/// round-trips exactly, unless `digits` asks for fewer; rounded values use
/// plain notation when the exponent is moderate, like C's `%g`.
#[derive(Debug, Clone, Copy)]
pub struct Format {
    pub digits: Option<usize>,
}

impl Format {
    pub fn full() -> Self {
        Format { digits: None }
    }

    pub fn real(&self, x: f64) -> String {
        let Some(d) = self.digits else {
            return format!("{:.16e}", x);
        };
        let d = d.clamp(1, 17);
        let sci = format!("{:.*e}", d - 1, x);
        let exp: i32 = match sci.split_once('e') {
            Some((_, e)) if x.is_finite() => e.parse().unwrap_or(0),
            _ => return sci,
        };
        if (-4..d as i32).contains(&exp) {
            format!("{:.*}", (d as i32 - 1 - exp) as usize, x)
        } else {
            sci
        }
    }

    /// `a+bi` / `a-bi`, or just `a` for a real value.
    pub fn complex(&self, z: Complex64) -> String {
        if z.im == 0.0 {
            return self.real(z.re);
        }
        let sign = if z.im.is_sign_negative() { '-' } else { '+' };
        format!("{}{}{}i", self.real(z.re), sign, self.real(z.im.abs()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub k: f64,
    pub branch: usize,
    pub re: f64,
    pub im: f64,
    pub vel_re: f64,
    pub vel_im: f64,
}

pub const CSV_HEADER: [&str; 6] = ["k", "branch", "re", "im", "vel_re", "vel_im"];

pub fn locus_rows(locus: &Locus<f64>) -> Vec<CsvRow> {
    let mut rows = Vec::with_capacity(locus.len() * locus.branches.len());
    for i in 0..locus.len() {
        for (j, branch) in locus.branches.iter().enumerate() {
            let s = branch[i];
            rows.push(CsvRow {
                k: s.k,
                branch: j,
                re: s.pole.re,
                im: s.pole.im,
                vel_re: s.velocity.re,
                vel_im: s.velocity.im,
            });
        }
    }
    rows
}

pub fn write_locus_csv<W: Write>(locus: &Locus<f64>, fmt: Format, out: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER).map_err(io_err)?;
    for r in locus_rows(locus) {
        w.write_record([
            fmt.real(r.k),
            r.branch.to_string(),
            fmt.real(r.re),
            fmt.real(r.im),
            fmt.real(r.vel_re),
            fmt.real(r.vel_im),
        ])
        .map_err(io_err)?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}

pub fn read_locus_csv<R: Read>(input: R) -> Result<Vec<CsvRow>, CliError> {
    let mut r = csv::Reader::from_reader(input);
    r.deserialize().map(|row| row.map_err(|e| CliError::Parse(e.to_string()))).collect()
}

#[derive(Debug, Serialize)]
struct EventRecord<'a> {
    k: f64,
    kind: String,
    detail: &'a str,
}

pub fn write_events<W: Write>(events: &[LocusEvent<f64>], out: W) -> Result<(), CliError> {
    let records: Vec<EventRecord> = events
        .iter()
        .map(|e| EventRecord {
            k: e.k,
            kind: e.kind.to_string(),
            detail: &e.detail,
        })
        .collect();
    serde_json::to_writer_pretty(out, &records).map_err(|e| CliError::Io(e.to_string()))
}

fn io_err(e: csv::Error) -> CliError {
    CliError::Io(e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_precision_round_trips() {
        let f = Format::full();
        for x in [0.1, -1.0 / 3.0, 1e-300, 12345.678901234567, f64::MIN_POSITIVE] {
            assert_eq!(f.real(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(f.real(f64::INFINITY), "inf");
    }

    #[test]
    fn digits_round_for_display() {
        let f = Format { digits: Some(4) };
        assert_eq!(f.real(-1.2307692), "-1.231");
        assert_eq!(f.real(-4.0), "-4.000");
        assert_eq!(f.real(9.99996), "10.00");
        assert_eq!(f.real(1.5e-7), "1.500e-7");
        assert_eq!(f.real(0.0), "0.000");
        assert_eq!(f.complex(Complex64::new(-0.615, -0.0769)), "-0.6150-0.07690i");
    }
}
