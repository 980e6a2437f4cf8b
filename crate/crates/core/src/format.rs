//! Number formatting shared by every CSV and report writer.

/// Scientific notation with 17 significant digits; round-trips exactly.
pub fn float17(x: f64) -> String {
    format!("{x:.16e}")
}
