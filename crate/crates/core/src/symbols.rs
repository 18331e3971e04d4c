//! Strictly convex dispersion symbols `f` and their first three derivatives.

use alloc::string::String;
use alloc::sync::Arc;
use core::fmt;

use num_traits::Float;

use crate::error::{domain, Error, Result};

/// Uniform scan resolution for symbols without closed-form extrema.
pub const EXTREMA_SCAN: usize = 4096;

/// Newton iterations before [`Symbol::invert_velocity`] falls back to pure bisection.
const NEWTON_ITERATIONS: usize = 50;

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Which family a [`Symbol`] belongs to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SymbolKind {
    FreeSchrodinger,
    KleinGordon { mass: f64 },
    Custom,
}

/// User-supplied symbol: `f` together with its first three derivatives.
#[derive(Clone)]
pub struct CustomSymbol {
    name: String,
    f: RealFn,
    df: RealFn,
    d2f: RealFn,
    d3f: RealFn,
}

impl fmt::Debug for CustomSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomSymbol").field("name", &self.name).finish_non_exhaustive()
    }
}

/// A dispersion relation `f`, the symbol of the Fourier multiplier `f(D)`.
#[derive(Debug, Clone)]
pub enum Symbol {
    /// `f(p) = p²/2`.
    FreeSchrodinger,
    /// `f(p) = √(p² + m²)`.
    KleinGordon { mass: f64 },
    Custom(CustomSymbol),
}

/// `(f, f', f'', f''')` at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivs {
    pub f: f64,
    pub df: f64,
    pub d2f: f64,
    pub d3f: f64,
}

/// Extrema of `f''` and `|f'''|` over an interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandExtrema {
    pub sup_d2f: f64,
    pub inf_d2f: f64,
    pub sup_abs_d3f: f64,
}

impl Symbol {
    /// Klein–Gordon symbol with the given mass.
    pub fn klein_gordon(mass: f64) -> Result<Self> {
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(domain("Klein-Gordon mass must be positive and finite"));
        }
        Ok(Symbol::KleinGordon { mass })
    }

    /// Builds a custom symbol from `f` and its first three derivatives.
    pub fn custom<F0, F1, F2, F3>(name: &str, f: F0, df: F1, d2f: F2, d3f: F3) -> Self
    where
        F0: Fn(f64) -> f64 + Send + Sync + 'static,
        F1: Fn(f64) -> f64 + Send + Sync + 'static,
        F2: Fn(f64) -> f64 + Send + Sync + 'static,
        F3: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Symbol::Custom(CustomSymbol {
            name: String::from(name),
            f: Arc::new(f),
            df: Arc::new(df),
            d2f: Arc::new(d2f),
            d3f: Arc::new(d3f),
        })
    }

    pub fn kind(&self) -> SymbolKind {
        match self {
            Symbol::FreeSchrodinger => SymbolKind::FreeSchrodinger,
            Symbol::KleinGordon { mass } => SymbolKind::KleinGordon { mass: *mass },
            Symbol::Custom(_) => SymbolKind::Custom,
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Symbol::FreeSchrodinger => "free_schrodinger",
            Symbol::KleinGordon { .. } => "klein_gordon",
            Symbol::Custom(c) => &c.name,
        }
    }

    #[inline]
    pub fn f(&self, p: f64) -> f64 {
        match self {
            Symbol::FreeSchrodinger => 0.5 * p * p,
            Symbol::KleinGordon { mass } => (p * p + mass * mass).sqrt(),
            Symbol::Custom(c) => (c.f)(p),
        }
    }

    /// Group velocity `f'(p)`.
    #[inline]
    pub fn df(&self, p: f64) -> f64 {
        match self {
            Symbol::FreeSchrodinger => p,
            Symbol::KleinGordon { mass } => p / (p * p + mass * mass).sqrt(),
            Symbol::Custom(c) => (c.df)(p),
        }
    }

    #[inline]
    pub fn d2f(&self, p: f64) -> f64 {
        match self {
            Symbol::FreeSchrodinger => 1.0,
            Symbol::KleinGordon { mass } => {
                let r2 = p * p + mass * mass;
                mass * mass / (r2 * r2.sqrt())
            }
            Symbol::Custom(c) => (c.d2f)(p),
        }
    }

    #[inline]
    pub fn d3f(&self, p: f64) -> f64 {
        match self {
            Symbol::FreeSchrodinger => 0.0,
            Symbol::KleinGordon { mass } => {
                let r2 = p * p + mass * mass;
                -3.0 * mass * mass * p / (r2 * r2 * r2.sqrt())
            }
            Symbol::Custom(c) => (c.d3f)(p),
        }
    }

    /// All four derivative values at `p`.
    pub fn eval_derivs(&self, p: f64) -> Result<Derivs> {
        if !p.is_finite() {
            return Err(domain("frequency must be finite"));
        }
        let d = Derivs { f: self.f(p), df: self.df(p), d2f: self.d2f(p), d3f: self.d3f(p) };
        if d.f.is_finite() && d.df.is_finite() && d.d2f.is_finite() && d.d3f.is_finite() {
            Ok(d)
        } else {
            Err(domain("symbol derivative is not finite"))
        }
    }

    /// `sup f''`, `inf f''` and `sup |f'''|` over `[a, b]`.
    ///
    /// Built-in symbols use closed forms. Custom symbols are scanned on
    /// [`EXTREMA_SCAN`] uniform points, the best sample of each quantity is
    /// polished by a golden-section search on its neighbouring cells.
    pub fn band_extrema(&self, a: f64, b: f64) -> Result<BandExtrema> {
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(domain("band extrema need finite a < b"));
        }
        let ext = match self {
            Symbol::FreeSchrodinger => BandExtrema { sup_d2f: 1.0, inf_d2f: 1.0, sup_abs_d3f: 0.0 },
            Symbol::KleinGordon { mass } => klein_gordon_extrema(*mass, a, b),
            Symbol::Custom(c) => BandExtrema {
                sup_d2f: scan_max(&*c.d2f, a, b),
                inf_d2f: -scan_max(&|p| -(c.d2f)(p), a, b),
                sup_abs_d3f: scan_max(&|p| (c.d3f)(p).abs(), a, b),
            },
        };
        if !(ext.inf_d2f > 0.0) {
            return Err(Error::Convexity { a, b, inf_d2f: ext.inf_d2f });
        }
        Ok(ext)
    }

    /// Solves `f'(p) = v` for `p ∈ [a, b]`.
    ///
    /// Newton steps inside a shrinking bisection bracket; after
    /// 50 iterations only bisection is used.
    pub fn invert_velocity(&self, v: f64, a: f64, b: f64) -> Result<f64> {
        if !(a < b) {
            return Err(domain("velocity inversion needs a < b"));
        }
        let (lo_v, hi_v) = (self.df(a), self.df(b));
        if !(v >= lo_v && v <= hi_v) {
            return Err(Error::Range { v, lo: lo_v, hi: hi_v });
        }
        increasing_root(&|p| self.df(p), &|p| self.d2f(p), v, a, b, 1e-12 * v.abs().max(1.0))
    }

    /// Checks `f'' > 0` on `n` uniform samples of `[a, b]`.
    pub fn is_strictly_convex_on(&self, a: f64, b: f64, n: usize) -> bool {
        let n = n.max(2);
        (0..n).all(|k| self.d2f(a + (b - a) * k as f64 / (n - 1) as f64) > 0.0)
    }
}

/// Solves `g(p) = v` on `[a, b]` for increasing `g` with derivative `dg`,
/// assuming `g(a) <= v <= g(b)`.
pub(crate) fn increasing_root(
    g: &dyn Fn(f64) -> f64,
    dg: &dyn Fn(f64) -> f64,
    v: f64,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<f64> {
    let (ga, gb) = (g(a), g(b));
    if (ga - v).abs() <= tol {
        return Ok(a);
    }
    if (gb - v).abs() <= tol {
        return Ok(b);
    }
    let (mut lo, mut hi) = (a, b);
    let mut p = a + (b - a) * (v - ga) / (gb - ga);
    if !(p > lo && p < hi) {
        p = 0.5 * (lo + hi);
    }
    for iter in 0..400 {
        let r = g(p) - v;
        if r.abs() <= tol {
            return Ok(p);
        }
        if r < 0.0 {
            lo = p;
        } else {
            hi = p;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok(p);
        }
        p = if iter < NEWTON_ITERATIONS {
            let step = p - r / dg(p);
            if step > lo && step < hi {
                step
            } else {
                mid
            }
        } else {
            mid
        };
    }
    Ok(p)
}

fn klein_gordon_extrema(m: f64, a: f64, b: f64) -> BandExtrema {
    let d2 = |p: f64| {
        let r2 = p * p + m * m;
        m * m / (r2 * r2.sqrt())
    };
    let d3 = |p: f64| {
        let r2 = p * p + m * m;
        3.0 * m * m * p.abs() / (r2 * r2 * r2.sqrt())
    };
    // f'' is decreasing in |p|.
    let nearest = if a <= 0.0 && b >= 0.0 { 0.0 } else { a.abs().min(b.abs()) };
    let farthest = a.abs().max(b.abs());
    // |f'''| increases on [0, m/2] and decreases beyond.
    let mut sup3 = d3(a).max(d3(b));
    for crit in [-0.5 * m, 0.5 * m] {
        if crit >= a && crit <= b {
            sup3 = sup3.max(d3(crit));
        }
    }
    BandExtrema { sup_d2f: d2(nearest), inf_d2f: d2(farthest), sup_abs_d3f: sup3 }
}

/// Maximum of `g` over `[a, b]`: uniform scan plus golden-section polish.
pub(crate) fn scan_max(g: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let n = EXTREMA_SCAN;
    let h = (b - a) / n as f64;
    let mut best_k = 0usize;
    let mut best = g(a);
    for k in 1..=n {
        let x = if k == n { b } else { a + h * k as f64 };
        let v = g(x);
        if v > best {
            best = v;
            best_k = k;
        }
    }
    let lo = a + h * best_k.saturating_sub(1) as f64;
    let hi = (a + h * (best_k + 1) as f64).min(b);
    best.max(golden_max(g, lo, hi, 60))
}

fn golden_max(g: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64, iters: usize) -> f64 {
    let r = 0.5 * (5.0.sqrt() - 1.0);
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut g1, mut g2) = (g(x1), g(x2));
    for _ in 0..iters {
        if g1 < g2 {
            lo = x1;
            x1 = x2;
            g1 = g2;
            x2 = lo + r * (hi - lo);
            g2 = g(x2);
        } else {
            hi = x2;
            x2 = x1;
            g2 = g1;
            x1 = hi - r * (hi - lo);
            g1 = g(x1);
        }
    }
    g1.max(g2)
}
