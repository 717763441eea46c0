use std::io::{Read, Write};

use tailsum_core::DiagnosticsRow;

use crate::error::CliError;

pub const CSV_HEADER: [&str; 10] = [
    "u",
    "asympt1",
    "asympt2",
    "mc",
    "mc_stderr",
    "ratio1",
    "ratio2",
    "epsilon",
    "exp_epsilon",
    "rho_hat",
];

fn fields(r: &DiagnosticsRow) -> [f64; 10] {
    [
        r.u,
        r.asympt1,
        r.asympt2,
        r.mc,
        r.mc_stderr,
        r.ratio1,
        r.ratio2,
        r.epsilon,
        r.exp_epsilon,
        r.rho_hat,
    ]
}

/// Shortest decimal that parses back to the same `f64`; scientific below
/// 1e-3 in magnitude.
pub fn full_precision(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x != 0.0 && x.abs() < 1e-3 {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

/// `printf("%.{digits}g")` with trailing zeros removed and a two-digit
/// exponent, e.g. `1.58e-05`.
pub fn significant(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn write_csv<W: Write>(rows: &[DiagnosticsRow], out: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record(fields(r).map(full_precision))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<DiagnosticsRow>, CliError> {
    let mut rd = csv::Reader::from_reader(input);
    let header: Vec<String> = rd.headers()?.iter().map(str::to_owned).collect();
    if header != CSV_HEADER {
        return Err(CliError::Io(format!("unexpected CSV header {header:?}")));
    }
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let mut v = [0.0; 10];
        for (slot, field) in v.iter_mut().zip(rec.iter()) {
            *slot = field
                .parse()
                .map_err(|_| CliError::Io(format!("not a number: '{field}'")))?;
        }
        rows.push(DiagnosticsRow {
            u: v[0],
            asympt1: v[1],
            asympt2: v[2],
            mc: v[3],
            mc_stderr: v[4],
            ratio1: v[5],
            ratio2: v[6],
            epsilon: v[7],
            exp_epsilon: v[8],
            rho_hat: v[9],
        });
    }
    Ok(rows)
}

/// Three significant digits everywhere except the threshold column.
pub fn markdown(rows: &[DiagnosticsRow], title: &str) -> String {
    let mut s = String::new();
    if !title.is_empty() {
        s.push_str(&format!("{title}\n\n"));
    }
    s.push_str("| u | Asympt 1 | Asympt 2 | MC | MC stderr | Ratio 1 | Ratio 2 | ε | e^ε | ρ̂ |\n");
    s.push_str("|---|---|---|---|---|---|---|---|---|---|\n");
    for r in rows {
        let f = fields(r);
        let cells: Vec<String> = f
            .iter()
            .enumerate()
            .map(|(k, &x)| if k == 0 { significant(x, 6) } else { significant(x, 3) })
            .collect();
        s.push_str(&format!("| {} |\n", cells.join(" | ")));
    }
    s
}
