//! Number and CSV formatting. Output is locale-free with 12 significant
//! digits so that results diff cleanly.

use std::io::Write;

use renyi_core::analysis::SweepRow;
use renyi_core::divergences::DivergenceValue;

pub const SIG_DIGITS: usize = 12;

pub const CSV_HEADER: &str = "alpha,z,divergence_nats,trace_functional,finite";

/// `%g`-style rendering: positional for exponents in `-5..12`,
/// `d.ddde±x` otherwise; trailing zeros trimmed; `inf`, `-inf`, `nan`.
pub fn number(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIG_DIGITS - 1, x.abs());
    let (mant, exp) = sci.split_once('e').expect("exponent in {:e} output");
    let exp: i32 = exp.parse().expect("integer exponent");
    let digits: String = mant.chars().filter(|c| c.is_ascii_digit()).collect();
    let sign = if x < 0.0 { "-" } else { "" };
    if (-5..SIG_DIGITS as i32).contains(&exp) {
        let (int, frac) = if exp >= 0 {
            let k = exp as usize + 1;
            (digits[..k].to_string(), digits[k..].to_string())
        } else {
            ("0".to_string(), "0".repeat((-exp - 1) as usize) + &digits)
        };
        let frac = frac.trim_end_matches('0');
        if frac.is_empty() {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{frac}")
        }
    } else {
        let frac = digits[1..].trim_end_matches('0');
        let dot = if frac.is_empty() { "" } else { "." };
        format!("{sign}{}{dot}{frac}e{exp}", &digits[..1])
    }
}

/// The compute output line: a number or `inf <reason>`.
pub fn divergence(v: DivergenceValue) -> String {
    match v {
        DivergenceValue::Finite(x) => number(x),
        DivergenceValue::Infinite(r) => format!("inf {r}"),
    }
}

pub fn write_csv(out: &mut impl Write, rows: &[SweepRow]) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        let trace = r.trace.map_or_else(|| "inf".to_string(), number);
        writeln!(
            out,
            "{},{},{},{},{}",
            number(r.alpha),
            number(r.z),
            number(r.divergence.value()),
            trace,
            r.is_finite()
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use renyi_core::divergences::InfinityReason;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(number((8.0f64 / 3.0).ln()), "0.980829253012");
        assert_eq!(number(0.0), "0");
        assert_eq!(number(-0.0), "0");
        assert_eq!(number(1.5), "1.5");
        assert_eq!(number(-2.0), "-2");
        assert_eq!(number(1e-5), "0.00001");
        assert_eq!(number(1.234e-7), "1.234e-7");
        assert_eq!(number(123456789012.0), "123456789012");
        assert_eq!(number(1234567890123.0), "1.23456789012e12");
        assert_eq!(number(9.9999999999996), "10");
        assert_eq!(number(f64::INFINITY), "inf");
    }

    #[test]
    fn infinite_divergence_names_reason() {
        assert_eq!(divergence(DivergenceValue::Infinite(InfinityReason::SupportViolation)), "inf support_violation");
    }

    #[test]
    fn csv_rows() {
        let rows = [
            SweepRow { alpha: 2.0, z: 1.0, divergence: DivergenceValue::Finite(0.5), trace: Some(1.5) },
            SweepRow {
                alpha: 2.0,
                z: 2.0,
                divergence: DivergenceValue::Infinite(InfinityReason::SupportViolation),
                trace: None,
            },
        ];
        let mut buf = Vec::new();
        write_csv(&mut buf, &rows).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "alpha,z,divergence_nats,trace_functional,finite\n2,1,0.5,1.5,true\n2,2,inf,inf,false\n"
        );
    }
}
