//! Fixed 15-point Gauss–Legendre rule on [-1, 1].

use num_complex::Complex64;

pub(crate) const ORDER: usize = 15;

#[rustfmt::skip]
pub(crate) const NODES: [f64; ORDER] = [
    -0.987_992_518_020_485_428_49, -0.937_273_392_400_705_904_31, -0.848_206_583_410_427_216_2,
    -0.724_417_731_360_170_047_42, -0.570_972_172_608_538_847_54, -0.394_151_347_077_563_369_9,
    -0.201_194_093_997_434_522_3,   0.0,                            0.201_194_093_997_434_522_3,
     0.394_151_347_077_563_369_9,   0.570_972_172_608_538_847_54,  0.724_417_731_360_170_047_42,
     0.848_206_583_410_427_216_2,   0.937_273_392_400_705_904_31,  0.987_992_518_020_485_428_49,
];

#[rustfmt::skip]
pub(crate) const WEIGHTS: [f64; ORDER] = [
    0.030_753_241_996_117_268_355, 0.070_366_047_488_108_124_709, 0.107_159_220_467_171_935_01,
    0.139_570_677_926_154_314_45,  0.166_269_205_816_993_933_55,  0.186_161_000_015_562_211_03,
    0.198_431_485_327_111_576_46,  0.202_578_241_925_561_272_88,  0.198_431_485_327_111_576_46,
    0.186_161_000_015_562_211_03,  0.166_269_205_816_993_933_55,  0.139_570_677_926_154_314_45,
    0.107_159_220_467_171_935_01,  0.070_366_047_488_108_124_709, 0.030_753_241_996_117_268_355,
];

/// Applies the rule on `[a, b]`.
#[inline]
pub(crate) fn rule<G: Fn(f64) -> Complex64 + ?Sized>(g: &G, a: f64, b: f64) -> Complex64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, w) in NODES.iter().zip(WEIGHTS.iter()) {
        acc += g(mid + half * x) * *w;
    }
    acc * half
}

/// Maps the rule onto `[a, b]`, returning `(node, weight)` pairs.
pub(crate) fn panel_nodes(a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    NODES.iter().zip(WEIGHTS.iter()).map(move |(x, w)| (mid + half * x, half * w))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two() {
        let s: f64 = WEIGHTS.iter().sum();
        assert!((s - 2.0).abs() < 1e-15);
    }

    #[test]
    fn exact_for_degree_29() {
        // ∫_{-1}^{1} x^28 dx = 2/29
        let v = rule(&|x: f64| Complex64::new(num_traits::Float::powi(x, 28), 0.0), -1.0, 1.0);
        assert!((v.re - 2.0 / 29.0).abs() < 1e-14);
    }
}
