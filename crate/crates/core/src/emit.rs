//! Number formatting shared by every CSV and JSON emission.
//!
//! Values are first rounded to 15 significant digits and then printed in shortest
//! round-trip form, so a CSV cell and the corresponding JSON number parse to the same `f64`.

/// Round to 15 significant digits.
pub fn sig15(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{v:.14e}").parse().unwrap_or(v)
}

/// Decimal literal of [`sig15`]`(v)`; scientific notation outside `[1e-5, 1e16)`.
pub fn fmt15(v: f64) -> String {
    let r = sig15(v);
    if r == 0.0 || (r.abs() >= 1e-5 && r.abs() < 1e16) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

/// CSV document: `#`-prefixed metadata lines, a header row, then numeric rows.
pub fn csv_document(metadata: &[(String, String)], header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut out = String::new();
    for (k, v) in metadata {
        out.push_str(&format!("# {k}: {v}\n"));
    }
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| fmt15(*v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding() {
        assert_eq!(fmt15(2.183_538_057_775_918_7), "2.18353805777592");
        assert_eq!(fmt15(1.0), "1");
        assert_eq!(fmt15(0.0), "0");
        assert_eq!(fmt15(-1.5e-9), "-1.5e-9");
        assert_eq!(fmt15(1.0 / 3.0).parse::<f64>().unwrap(), sig15(1.0 / 3.0));
    }

    #[test]
    fn csv_layout() {
        let doc = csv_document(
            &[("seed".into(), "7".into())],
            &["a", "b"],
            &[vec![1.0, 0.25]],
        );
        assert_eq!(doc, "# seed: 7\na,b\n1,0.25\n");
    }
}
