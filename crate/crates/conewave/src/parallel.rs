//! Rayon-backed grid filling and the process-wide thread pool.

use conewave_core::moments::{GridExecutor, GridFn};
use conewave_core::Complex64;
use rayon::prelude::*;

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "CONEWAVE_THREADS";

/// Grid chunk handed to one task. A multiple of the kernel's reseed block, so
/// every sample is computed exactly as in a serial fill.
pub const CHUNK: usize = 1024;

/// [`GridExecutor`] splitting the grid into [`CHUNK`]-sized pieces.
#[derive(Debug, Clone, Copy, Default)]
pub struct Rayon;

impl GridExecutor for Rayon {
    fn fill(&self, f: &dyn GridFn, x_start: f64, dx: f64, first: usize, out: &mut [Complex64]) {
        out.par_chunks_mut(CHUNK)
            .enumerate()
            .for_each(|(c, chunk)| f.fill(x_start, dx, first + c * CHUNK, chunk));
    }
}

/// Sizes the global pool from [`THREADS_ENV`] when set. Later calls are no-ops.
pub fn init_thread_pool() -> Result<(), String> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("{THREADS_ENV} must be a positive integer, got '{raw}'"))?;
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use conewave_core::band_profile::{make_profile, Shape};
    use conewave_core::wavepacket::SolutionKernel;
    use conewave_core::{Serial, Symbol};

    #[test]
    fn parallel_fill_is_bitwise_serial() {
        let sym = Symbol::FreeSchrodinger;
        let prof = make_profile(1.0, 2.0, Shape::ChirpedBump { tau: 2.0 }, &sym).unwrap();
        let k = SolutionKernel::new(&sym, &prof, 30.0, -50.0, 150.0).with_step(0.05);
        let mut a = vec![Complex64::new(0.0, 0.0); 4000];
        let mut b = a.clone();
        Serial.fill(&k, -50.0, 0.05, 0, &mut a);
        Rayon.fill(&k, -50.0, 0.05, 0, &mut b);
        assert_eq!(a, b);
        let mut c = vec![Complex64::new(0.0, 0.0); 1440];
        // Offsets on a reseed boundary reproduce the serial samples exactly.
        Rayon.fill(&k, -50.0, 0.05, 2560, &mut c);
        assert_eq!(&a[2560..], &c[..]);
    }
}
