use std::fmt::Write as _;
use std::path::Path;

use charpoly_core::{Precision, Real};
use rug::Float;

/// Most significant digits ever written for one value.
pub const MAX_DIGITS: usize = 25;

/// Shortest decimal that reads back to `x` rounded to `prec`, capped at
/// [`MAX_DIGITS`] significant digits.
pub fn format_real(x: &Real, prec: Precision) -> String {
    let target = Float::with_val(prec.bits(), x);
    if !target.is_finite() || target.is_zero() {
        return target.to_string_radix(10, Some(1));
    }
    for digits in 1..MAX_DIGITS {
        let text = target.to_string_radix(10, Some(digits));
        if parse_back(&text, prec).as_ref() == Some(&target) {
            return text;
        }
    }
    trim_zeros(target.to_string_radix(10, Some(MAX_DIGITS)))
}

/// Drops trailing zeros of the fractional part, keeping any exponent.
fn trim_zeros(text: String) -> String {
    let (mantissa, exponent) = match text.find('e') {
        Some(i) => text.split_at(i),
        None => (text.as_str(), ""),
    };
    if !mantissa.contains('.') {
        return text;
    }
    let kept = mantissa.trim_end_matches('0').trim_end_matches('.');
    format!("{kept}{exponent}")
}

pub fn format_f64(x: f64) -> String {
    format_real(&Precision::P53.real(x), Precision::P53)
}

/// Reads a value written by [`format_real`] back at `prec`.
pub fn parse_back(text: &str, prec: Precision) -> Option<Real> {
    Float::parse(text)
        .ok()
        .map(|p| Float::with_val(prec.bits(), p))
}

/// A CSV table with a fixed header and numeric or bare-token cells.
#[derive(Clone, Debug, Default)]
pub struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Table {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.header.len(), "row width must match header");
        self.rows.push(row);
    }

    pub fn header(&self) -> &[&'static str] {
        &self.header
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// A gnuplot script drawing columns `ys` of `data` against column 1 (`N`).
pub fn gnuplot_script(data: &Path, table: &Table, ys: &[usize], log_y: bool) -> String {
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str("set key top right\n");
    s.push_str("set xlabel 'N'\n");
    s.push_str("set logscale x\n");
    if log_y {
        s.push_str("set logscale y\n");
    }
    let file = data.display().to_string().replace('\'', "''");
    let plots: Vec<String> = ys
        .iter()
        .map(|&col| {
            format!(
                "'{file}' using 1:{} skip 1 with linespoints title '{}'",
                col + 1,
                table.header()[col]
            )
        })
        .collect();
    let _ = writeln!(s, "plot {}", plots.join(", \\\n     "));
    s
}
