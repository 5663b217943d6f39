//! Locale-free number formatting for CSV output.

use dtlab_core::poly::ratio_string;
use dtlab_core::Rational;

/// 17 significant digits in scientific notation, which round-trips every `f64`.
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

/// `"p/q"` with the denominator always present.
pub fn ratio(r: &Rational) -> String {
    ratio_string(r)
}

/// Joins already formatted fields with commas.
pub fn row<I, S>(fields: I) -> String
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut out = String::new();
    for (i, f) in fields.into_iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(f.as_ref());
    }
    out
}
