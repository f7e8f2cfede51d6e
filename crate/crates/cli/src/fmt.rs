//! Numeric text output: 12 significant digits, plain decimal where the
//! magnitude allows it, scientific otherwise. Chosen over shortest
//! round-trip so distances print identically however they were computed.

/// Format with 12 significant digits. Zero prints as `0`.
pub fn sig12(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let exp = v.abs().log10().floor() as i32;
    if (-4..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        format!("{v:.decimals$}")
    } else {
        format!("{v:.11e}")
    }
}
