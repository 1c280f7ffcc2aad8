//! Extended reals `[−∞, +∞]`.
//!
//! Values are plain `f64` where `f64::INFINITY` and `f64::NEG_INFINITY` are the
//! two infinite points. NaN is never produced by the helpers below; the
//! conventions are `x + (+∞) = +∞` for `x > −∞`, `sup ∅ = −∞`, `inf ∅ = +∞`
//! and `−log 0 = +∞`.

use std::cmp::Ordering;

pub type ExtReal = f64;

pub const POS_INF: ExtReal = f64::INFINITY;
pub const NEG_INF: ExtReal = f64::NEG_INFINITY;

/// Sum with `+∞` absorbing. `(−∞) + (+∞)` resolves to `+∞`.
pub fn add(a: ExtReal, b: ExtReal) -> ExtReal {
    if a == POS_INF || b == POS_INF {
        POS_INF
    } else {
        a + b
    }
}

/// `a − b` where subtracting `+∞` gives `−∞` and subtracting `−∞` gives `+∞`
/// unless `a = −∞`.
pub fn sub(a: ExtReal, b: ExtReal) -> ExtReal {
    if b == POS_INF {
        NEG_INF
    } else if b == NEG_INF {
        if a == NEG_INF {
            NEG_INF
        } else {
            POS_INF
        }
    } else {
        a - b
    }
}

pub fn neg_log(x: f64) -> ExtReal {
    if x <= 0.0 {
        POS_INF
    } else {
        -x.ln()
    }
}

pub fn total_cmp(a: &ExtReal, b: &ExtReal) -> Ordering {
    a.total_cmp(b)
}

pub fn sup<I: IntoIterator<Item = ExtReal>>(it: I) -> ExtReal {
    it.into_iter().fold(NEG_INF, f64::max)
}

pub fn inf<I: IntoIterator<Item = ExtReal>>(it: I) -> ExtReal {
    it.into_iter().fold(POS_INF, f64::min)
}

/// `log Σ exp(xᵢ)` with the maximum shifted out before exponentiation.
pub fn log_sum_exp<I: IntoIterator<Item = ExtReal>>(it: I) -> ExtReal {
    let xs: Vec<f64> = it.into_iter().collect();
    log_sum_exp_slice(&xs)
}

pub fn log_sum_exp_slice(xs: &[f64]) -> ExtReal {
    let m = sup(xs.iter().copied());
    if m == NEG_INF || m == POS_INF {
        return m;
    }
    let s: f64 = xs.iter().map(|&x| (x - m).exp()).sum();
    m + s.ln()
}

/// `log(e^a + e^b)`.
pub fn log_add_exp(a: ExtReal, b: ExtReal) -> ExtReal {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == NEG_INF || hi == POS_INF {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// Equality with infinities compared exactly and finite values within `tol`.
pub fn approx_eq(a: ExtReal, b: ExtReal, tol: f64) -> bool {
    if a.is_infinite() || b.is_infinite() {
        a == b
    } else {
        (a - b).abs() <= tol
    }
}

/// `|a − b|`, zero for equal infinities and `+∞` for mismatched ones.
pub fn distance(a: ExtReal, b: ExtReal) -> f64 {
    if a.is_infinite() || b.is_infinite() {
        if a == b {
            0.0
        } else {
            POS_INF
        }
    } else {
        (a - b).abs()
    }
}

/// Amount by which `a ≤ b` is violated (zero when it holds).
pub fn le_violation(a: ExtReal, b: ExtReal) -> f64 {
    if a <= b {
        0.0
    } else if a.is_infinite() || b.is_infinite() {
        POS_INF
    } else {
        a - b
    }
}

pub fn format(x: ExtReal) -> String {
    if x == POS_INF {
        "inf".to_string()
    } else if x == NEG_INF {
        "-inf".to_string()
    } else {
        format!("{x:?}")
    }
}

pub fn parse(s: &str) -> Option<ExtReal> {
    match s.trim() {
        "inf" | "+inf" | "Infinity" | "+Infinity" => Some(POS_INF),
        "-inf" | "-Infinity" => Some(NEG_INF),
        other => other.parse::<f64>().ok().filter(|v| !v.is_nan()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conventions() {
        assert_eq!(add(3.0, POS_INF), POS_INF);
        assert_eq!(add(NEG_INF, POS_INF), POS_INF);
        assert_eq!(sup(std::iter::empty()), NEG_INF);
        assert_eq!(inf(std::iter::empty()), POS_INF);
        assert_eq!(neg_log(0.0), POS_INF);
        assert_eq!(sub(1.0, POS_INF), NEG_INF);
        assert_eq!(sub(1.0, NEG_INF), POS_INF);
    }

    #[test]
    fn lse_is_stable() {
        let v = log_sum_exp([1e8, 1e8]);
        assert!((v - (1e8 + 2f64.ln())).abs() < 1e-6);
        assert_eq!(log_sum_exp([NEG_INF, NEG_INF]), NEG_INF);
        assert!((log_add_exp(0.0, 0.0) - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn format_roundtrip() {
        for x in [POS_INF, NEG_INF, 0.1, -3.25e-12] {
            assert_eq!(parse(&format(x)), Some(x));
        }
        assert_eq!(parse("nan"), None);
    }
}
