//! Named custom symbols selectable from a config file.

use conewave_core::Symbol;

pub const NAMES: [&str; 2] = ["quartic", "cosh"];

/// `quartic`: `p²/2 + p⁴/12`. `cosh`: `cosh p`.
pub fn lookup(name: &str) -> Option<Symbol> {
    match name {
        "quartic" => Some(Symbol::custom(
            "quartic",
            |p| 0.5 * p * p + p.powi(4) / 12.0,
            |p| p + p.powi(3) / 3.0,
            |p| 1.0 + p * p,
            |p| 2.0 * p,
        )),
        "cosh" => Some(Symbol::custom("cosh", f64::cosh, f64::sinh, f64::cosh, f64::sinh)),
        _ => None,
    }
}
