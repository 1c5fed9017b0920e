//! Trigonometric and Chebyshev series helpers shared by the curve types and
//! the boundary-integral solver.

use num_complex::Complex64;
use rustfft::FftPlanner;

/// Complex trigonometric polynomial f(t) = sum_{k=k_min..} c_k e^{ikt}.
#[derive(Debug, Clone)]
pub struct TrigPoly {
    pub k_min: i32,
    pub coeffs: Vec<Complex64>,
}

impl TrigPoly {
    pub fn new(k_min: i32, coeffs: Vec<Complex64>) -> Self {
        Self { k_min, coeffs }
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        // Horner in e^{it} starting from the top coefficient.
        let q = Complex64::from_polar(1.0, t);
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * q + c;
        }
        acc * Complex64::from_polar(1.0, self.k_min as f64 * t)
    }

    /// Termwise derivative of the given order.
    pub fn deriv(&self, order: u32) -> TrigPoly {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| {
                let k = self.k_min + j as i32;
                let ik = Complex64::new(0.0, k as f64);
                c * ik.powu(order)
            })
            .collect();
        TrigPoly::new(self.k_min, coeffs)
    }

    /// Reversed parametrization t -> -t (swaps k and -k).
    pub fn reversed(&self) -> TrigPoly {
        let k_max = self.k_min + self.coeffs.len() as i32 - 1;
        let mut coeffs: Vec<Complex64> = self.coeffs.clone();
        coeffs.reverse();
        TrigPoly::new(-k_max, coeffs)
    }

    /// Interpolating trigonometric polynomial through equispaced samples
    /// f(2*pi*j/n), with wave numbers in [-n/2, n/2).
    pub fn fit(samples: &[Complex64]) -> TrigPoly {
        let n = samples.len();
        assert!(n >= 2 && n % 2 == 0, "need an even number of samples");
        let mut buf = samples.to_vec();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        let half = (n / 2) as i32;
        let scale = 1.0 / n as f64;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
        for (j, v) in buf.iter().enumerate() {
            let k = if (j as i32) < half { j as i32 } else { j as i32 - n as i32 };
            coeffs[(k + half) as usize] = v * scale;
        }
        TrigPoly::new(-half, coeffs)
    }

    /// Drop negligible leading/trailing coefficients.
    pub fn trim(mut self, tol: f64) -> TrigPoly {
        let max = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let cut = tol * max.max(f64::MIN_POSITIVE);
        while self.coeffs.len() > 1 && self.coeffs.last().unwrap().norm() < cut {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|c| c.norm() < cut).count();
        if lead > 0 && lead < self.coeffs.len() {
            self.coeffs.drain(..lead);
            self.k_min += lead as i32;
        }
        self
    }

    /// Largest coefficient magnitude in the top decade of wave numbers,
    /// relative to the overall largest one. Small values indicate the series
    /// resolves the function to the reported level.
    pub fn tail_level(&self) -> f64 {
        let max = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if max == 0.0 {
            return 0.0;
        }
        let n = self.coeffs.len();
        let top = n.saturating_sub((n / 10).max(2));
        let tail = self.coeffs[top..].iter().map(|c| c.norm()).fold(0.0, f64::max);
        let head = self.coeffs[..top].iter().map(|c| c.norm()).fold(0.0, f64::max);
        if head == 0.0 {
            return 1.0;
        }
        tail / head
    }
}

/// Forward FFT of real samples returning the signed-index spectrum, used for
/// spectral interpolation of solved layer densities.
pub fn real_spectrum(samples: &[f64]) -> TrigPoly {
    let complex: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    TrigPoly::fit(&complex)
}

/// Evaluate a Chebyshev series sum c_k T_k(x) by Clenshaw recurrence.
pub fn cheb_eval(coeffs: &[f64], x: f64) -> f64 {
    if coeffs.is_empty() {
        return 0.0;
    }
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for &c in coeffs.iter().skip(1).rev() {
        let b0 = 2.0 * x * b1 - b2 + c;
        b2 = b1;
        b1 = b0;
    }
    coeffs[0] + x * b1 - b2
}

/// Coefficients of the derivative of a Chebyshev series.
pub fn cheb_deriv(coeffs: &[f64]) -> Vec<f64> {
    let n = coeffs.len();
    if n <= 1 {
        return vec![0.0];
    }
    let mut d = vec![0.0; n + 1];
    for k in (0..n - 1).rev() {
        d[k] = d[k + 2] + 2.0 * (k as f64 + 1.0) * coeffs[k + 1];
    }
    d[0] *= 0.5;
    d.truncate(n - 1);
    d
}

/// Chebyshev interpolation coefficients for f on [-1, 1] from m+1
/// Chebyshev-Lobatto nodes x_j = cos(pi j / m).
pub fn cheb_fit(m: usize, f: impl Fn(f64) -> f64) -> Vec<f64> {
    assert!(m >= 1);
    let vals: Vec<f64> = (0..=m).map(|j| f((std::f64::consts::PI * j as f64 / m as f64).cos())).collect();
    let mut coeffs = vec![0.0; m + 1];
    for (k, ck) in coeffs.iter_mut().enumerate() {
        let mut acc = 0.5 * (vals[0] + if k % 2 == 0 { vals[m] } else { -vals[m] });
        for (j, vj) in vals.iter().enumerate().take(m).skip(1) {
            acc += vj * (std::f64::consts::PI * (k * j) as f64 / m as f64).cos();
        }
        *ck = 2.0 * acc / m as f64;
    }
    coeffs[0] *= 0.5;
    coeffs[m] *= 0.5;
    coeffs
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn trig_fit_reproduces_circle() {
        let n = 64;
        let samples: Vec<Complex64> = (0..n)
            .map(|j| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / n as f64))
            .collect();
        let p = TrigPoly::fit(&samples).trim(1e-13);
        assert_eq!(p.k_min, 1);
        assert_eq!(p.coeffs.len(), 1);
        assert_abs_diff_eq!(p.eval(0.7).re, 0.7f64.cos(), epsilon = 1e-13);
        let d = p.deriv(1);
        assert_abs_diff_eq!(d.eval(0.7).im, 0.7f64.cos(), epsilon = 1e-13);
    }

    #[test]
    fn cheb_derivative_matches_power_rule() {
        // f = T_3, f' = 3 U_2 = 3(4x^2-1)... check against finite differences.
        let coeffs = vec![0.0, 0.0, 0.0, 1.0];
        let d = cheb_deriv(&coeffs);
        let x = 0.3;
        let h = 1e-6;
        let fd = (cheb_eval(&coeffs, x + h) - cheb_eval(&coeffs, x - h)) / (2.0 * h);
        assert_abs_diff_eq!(cheb_eval(&d, x), fd, epsilon = 1e-7);
    }

    #[test]
    fn cheb_fit_recovers_polynomial() {
        let c = cheb_fit(8, |x| x * x);
        // x^2 = (T_0 + T_2)/2
        assert_abs_diff_eq!(c[0], 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(c[2], 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(cheb_eval(&c, 0.37), 0.37 * 0.37, epsilon = 1e-14);
    }
}
