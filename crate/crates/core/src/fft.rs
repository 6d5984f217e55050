//! Complex DFT of arbitrary length: iterative radix-2 for powers of two,
//! Bluestein's chirp-z convolution otherwise.
//!
//! Convention: `X_ω = Σ_k x_k exp(-2πi ωk/n)`; the inverse carries the `1/n`.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

#[derive(Debug, Clone)]
pub(crate) struct Fft {
    n: usize,
    algo: Algo,
}

#[derive(Debug, Clone)]
enum Algo {
    Radix2(Radix2),
    Bluestein(Box<Bluestein>),
}

#[derive(Debug, Clone)]
struct Radix2 {
    n: usize,
    // exp(-2πi k/n), k < n/2
    twiddles: Vec<Complex64>,
    bitrev: Vec<usize>,
}

#[derive(Debug, Clone)]
struct Bluestein {
    chirp: Vec<Complex64>,
    kernel_hat: Vec<Complex64>,
    inner: Radix2,
}

impl Fft {
    pub(crate) fn new(n: usize) -> Self {
        assert!(n > 0);
        let algo = if n.is_power_of_two() {
            Algo::Radix2(Radix2::new(n))
        } else {
            Algo::Bluestein(Box::new(Bluestein::new(n)))
        };
        Self { n, algo }
    }

    pub(crate) fn forward(&self, data: &mut [Complex64]) {
        assert_eq!(data.len(), self.n);
        match &self.algo {
            Algo::Radix2(r) => r.run(data),
            Algo::Bluestein(b) => b.run(data),
        }
    }

    pub(crate) fn inverse(&self, data: &mut [Complex64]) {
        for z in data.iter_mut() {
            *z = z.conj();
        }
        self.forward(data);
        let scale = 1.0 / self.n as f64;
        for z in data.iter_mut() {
            *z = z.conj() * scale;
        }
    }

    /// Spectrum of a real vector.
    pub(crate) fn spectrum(&self, v: &[f64]) -> Vec<Complex64> {
        let mut data: Vec<Complex64> = v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.forward(&mut data);
        data
    }

    /// Real part of the inverse transform; callers pass Hermitian spectra.
    pub(crate) fn synthesize_real(&self, mut spectrum: Vec<Complex64>) -> Vec<f64> {
        self.inverse(&mut spectrum);
        spectrum.into_iter().map(|z| z.re).collect()
    }
}

fn unit(angle: f64) -> Complex64 {
    Complex64::new(libm::cos(angle), libm::sin(angle))
}

impl Radix2 {
    fn new(n: usize) -> Self {
        let twiddles = (0..n / 2).map(|k| unit(-2.0 * PI * k as f64 / n as f64)).collect();
        let bits = n.trailing_zeros();
        let bitrev = (0..n).map(|i| if bits == 0 { 0 } else { i.reverse_bits() >> (usize::BITS - bits) }).collect();
        Self { n, twiddles, bitrev }
    }

    fn run(&self, data: &mut [Complex64]) {
        let n = self.n;
        for i in 0..n {
            let j = self.bitrev[i];
            if i < j {
                data.swap(i, j);
            }
        }
        let mut len = 2;
        while len <= n {
            let half = len / 2;
            let stride = n / len;
            for start in (0..n).step_by(len) {
                for k in 0..half {
                    let w = self.twiddles[k * stride];
                    let a = data[start + k];
                    let b = data[start + k + half] * w;
                    data[start + k] = a + b;
                    data[start + k + half] = a - b;
                }
            }
            len <<= 1;
        }
    }
}

impl Bluestein {
    fn new(n: usize) -> Self {
        let m = (2 * n - 1).next_power_of_two();
        // exp(-iπ k²/n), with k² reduced mod 2n to keep the angle small
        let chirp: Vec<Complex64> = (0..n)
            .map(|k| {
                let k2 = (k as u128 * k as u128 % (2 * n as u128)) as f64;
                unit(-PI * k2 / n as f64)
            })
            .collect();
        let mut kernel = vec![Complex64::new(0.0, 0.0); m];
        kernel[0] = chirp[0].conj();
        for k in 1..n {
            kernel[k] = chirp[k].conj();
            kernel[m - k] = chirp[k].conj();
        }
        let inner = Radix2::new(m);
        inner.run(&mut kernel);
        Self { chirp, kernel_hat: kernel, inner }
    }

    fn run(&self, data: &mut [Complex64]) {
        let n = self.chirp.len();
        let m = self.inner.n;
        let mut work = vec![Complex64::new(0.0, 0.0); m];
        for k in 0..n {
            work[k] = data[k] * self.chirp[k];
        }
        self.inner.run(&mut work);
        for (w, h) in work.iter_mut().zip(&self.kernel_hat) {
            *w = (*w * h).conj();
        }
        // inverse via conjugation
        self.inner.run(&mut work);
        let scale = 1.0 / m as f64;
        for k in 0..n {
            data[k] = work[k].conj() * scale * self.chirp[k];
        }
    }
}
