//! Shared formatting for CSV/JSON reports.

/// Fixed ten-decimal rendering used in every CSV report. A negative zero is
/// printed without its sign.
pub fn format_real(v: f64) -> String {
    format_fixed(v, 10)
}

/// `places` decimals, negative zero printed unsigned.
pub fn format_fixed(v: f64, places: usize) -> String {
    let s = format!("{v:.places$}");
    if s.starts_with('-') && s[1..].bytes().all(|b| b == b'0' || b == b'.') {
        s[1..].to_string()
    } else {
        s
    }
}

/// Quotes a CSV cell when it contains a separator, quote or line break.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
