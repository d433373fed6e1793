//! Flat reachtube records: CSV and JSON writers sharing one column schema.

use std::io::Write;

use reachtube::reachtube::{ReachsetStep, RunSummary};
use serde_json::{json, Map, Value};

/// Column names: `t, x1..xn, delta, delta_M0, sigma, A11..Ann, X1_lo, X1_hi, ..., vol_ell, vol_ball, vol_box`.
pub fn columns(n: usize) -> Vec<String> {
    let mut cols = vec!["t".to_string()];
    cols.extend((1..=n).map(|j| format!("x{j}")));
    cols.extend(["delta", "delta_M0", "sigma"].map(String::from));
    for i in 1..=n {
        cols.extend((1..=n).map(|j| format!("A{i}{j}")));
    }
    for j in 1..=n {
        cols.push(format!("X{j}_lo"));
        cols.push(format!("X{j}_hi"));
    }
    cols.extend(["vol_ell", "vol_ball", "vol_box"].map(String::from));
    cols
}

pub fn record(s: &ReachsetStep) -> Vec<f64> {
    let n = s.center.len();
    let mut v = Vec::with_capacity(1 + n + 3 + n * n + 2 * n + 3);
    v.push(s.t);
    v.extend_from_slice(&s.center);
    v.extend([s.delta, s.delta_m0, s.sigma]);
    let a = s.frame.a();
    for i in 0..n {
        v.extend((0..n).map(|j| a[(i, j)]));
    }
    for iv in s.enclosure.iter() {
        v.push(iv.lo());
        v.push(iv.hi());
    }
    v.extend([s.vol_ellipsoid, s.vol_ball, s.vol_box]);
    v
}

/// Shortest decimal that parses back to the same `f64`.
pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) || !a.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn summary_line(s: &RunSummary) -> String {
    format!(
        "AV={} steps={} completed={}",
        fmt_f64(s.average_volume),
        s.steps_computed,
        s.completed
    )
}

pub fn write_csv<W: Write>(out: W, n: usize, steps: &[ReachsetStep]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(columns(n))?;
    for s in steps {
        w.write_record(record(s).into_iter().map(fmt_f64))?;
    }
    w.flush()?;
    Ok(())
}

fn number(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

pub fn to_json(model: &str, n: usize, summary: &RunSummary) -> Value {
    let cols = columns(n);
    let records: Vec<Value> = summary
        .steps
        .iter()
        .map(|s| {
            let obj: Map<String, Value> = cols.iter().cloned().zip(record(s).into_iter().map(number)).collect();
            Value::Object(obj)
        })
        .collect();
    json!({
        "model": model,
        "columns": cols,
        "records": records,
        "summary": {
            "AV": number(summary.average_volume),
            "steps": summary.steps_computed,
            "completed": summary.completed,
            "failure_time": summary.failure_time.map(number),
            "failure": summary.failure.as_ref().map(|e| e.to_string()),
            "floored": summary.floored.iter().map(|j| j + 1).collect::<Vec<_>>(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn column_count() {
        for n in 1..6 {
            assert_eq!(columns(n).len(), 1 + n + 3 + n * n + 2 * n + 3);
        }
        assert_eq!(columns(2)[..4], ["t", "x1", "x2", "delta"]);
    }

    #[test]
    fn floats_round_trip() {
        for x in [0.0, -0.0, 1.0, 0.1, 1.0 / 3.0, 1e-300, 2.5e-88, 6.02e23, f64::MAX, f64::MIN_POSITIVE, -7.25e-6] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
        }
        assert_eq!(fmt_f64(0.01), "0.01");
        assert_eq!(fmt_f64(2.5e-88), "2.5e-88");
    }
}
