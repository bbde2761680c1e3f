//! Human-readable table rendering with space-grouped fraction digits,
//! matching the layout used for the convergence and comparison tables.
//! Full-precision values go to the CSV/JSON outputs; these helpers only
//! serve the rounded display tables (<= 14 significant digits).

use nopair_core::Real;

/// Format with `decimals` fraction digits, grouped in threes:
/// `-0.249 997 552 650`.
pub fn grouped(v: &Real, decimals: usize) -> String {
    let plain = format_fixed(v, decimals);
    let (head, frac) = match plain.split_once('.') {
        Some((h, f)) => (h.to_string(), f.to_string()),
        None => (plain, String::new()),
    };
    if frac.is_empty() {
        return head;
    }
    let mut out = head;
    out.push('.');
    for (i, ch) in frac.chars().enumerate() {
        if i > 0 && i % 3 == 0 {
            out.push(' ');
        }
        out.push(ch);
    }
    out
}

/// Plain fixed-point rendering with `decimals` fraction digits.
pub fn format_fixed(v: &Real, decimals: usize) -> String {
    format!("{:.*}", decimals, v.to_f64())
}
