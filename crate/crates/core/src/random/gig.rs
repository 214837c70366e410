//! Generalized inverse Gaussian variates, density `∝ x^{ν−1} exp{−(ax + b/x)/2}`.
//!
//! The sampler works on the standardized two-parameter form
//! `x^{λ−1} exp{−ω(x + 1/x)/2}` with `ω = √(ab)`, `λ = |ν|`, and maps back
//! with `α = √(b/a)`. Three rejection schemes cover the parameter plane
//! (Hörmann and Leydold, 2014), plus a Gamma-proposal scheme for tiny `ω`.

use rand::Rng;
use rand_distr::{Distribution, Gamma};

use crate::diagnostics::bessel::gig_ln_normalizer;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GigParams {
    pub nu: f64,
    pub a: f64,
    pub b: f64,
}

impl GigParams {
    pub fn new(nu: f64, a: f64, b: f64) -> Result<Self> {
        let p = Self { nu, a, b };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let Self { nu, a, b } = *self;
        if !(nu.is_finite() && a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidParams(format!("non-finite GIG parameters ({nu:?}, {a:?}, {b:?})")));
        }
        if a < 0.0 || b < 0.0 || (a == 0.0 && b == 0.0) {
            return Err(Error::InvalidParams(format!("GIG rates must be >= 0, not both 0: a={a}, b={b}")));
        }
        if b == 0.0 && nu <= 0.0 {
            return Err(Error::InvalidParams(format!("GIG with b=0 needs nu > 0, got {nu}")));
        }
        if a == 0.0 && nu >= 0.0 {
            return Err(Error::InvalidParams(format!("GIG with a=0 needs nu < 0, got {nu}")));
        }
        Ok(())
    }

    /// Unnormalized log-density.
    pub fn ln_kernel(&self, x: f64) -> f64 {
        (self.nu - 1.0) * x.ln() - 0.5 * (self.a * x + self.b / x)
    }

    /// Normalized log-density.
    pub fn ln_pdf(&self, x: f64) -> f64 {
        self.ln_kernel(x) - gig_ln_normalizer(self)
    }

    /// The reciprocal variate: `1/X ∼ GIG(−ν, b, a)`.
    pub fn reciprocal(&self) -> Self {
        Self {
            nu: -self.nu,
            a: self.b,
            b: self.a,
        }
    }
}

impl Distribution<f64> for GigParams {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        sample_gig(self, rng)
    }
}

/// One GIG draw. Parameters are assumed valid (see [`GigParams::validate`]).
pub fn sample_gig<R: Rng + ?Sized>(p: &GigParams, rng: &mut R) -> f64 {
    let GigParams { nu, a, b } = *p;
    if b == 0.0 {
        return gamma(nu, 2.0 / a, rng);
    }
    if a == 0.0 {
        return 1.0 / gamma(-nu, 2.0 / b, rng);
    }
    let omega = (a * b).sqrt();
    let alpha = (b / a).sqrt();
    let lambda = nu.abs();
    if omega == 0.0 || !omega.is_normal() {
        // ab underflowed; the draw is governed by the dominant boundary
        return if nu > 0.0 {
            gamma(nu, 2.0 / a, rng)
        } else {
            1.0 / gamma(-nu, 2.0 / b, rng)
        };
    }
    let x = if lambda > 1.0 && omega <= 0.1 {
        standard_gamma_proposal(lambda, omega, rng)
    } else if lambda > 2.0 || omega > 3.0 {
        rou_shift(lambda, omega, rng)
    } else if lambda >= 1.0 - 2.25 * omega * omega || omega > 0.2 {
        rou_noshift(lambda, omega, rng)
    } else {
        concave_free(lambda, omega, rng)
    };
    if nu < 0.0 {
        alpha / x
    } else {
        alpha * x
    }
}

fn gamma<R: Rng + ?Sized>(shape: f64, scale: f64, rng: &mut R) -> f64 {
    Gamma::new(shape, scale).expect("valid gamma parameters").sample(rng)
}

fn mode(lambda: f64, omega: f64) -> f64 {
    if lambda >= 1.0 {
        ((lambda - 1.0).hypot(omega) + (lambda - 1.0)) / omega
    } else {
        omega / ((1.0 - lambda).hypot(omega) + (1.0 - lambda))
    }
}

// Gamma(λ, rate ω/2) proposal, accepted with probability exp(−ω/(2x)).
fn standard_gamma_proposal<R: Rng + ?Sized>(lambda: f64, omega: f64, rng: &mut R) -> f64 {
    let g = Gamma::new(lambda, 2.0 / omega).expect("valid gamma parameters");
    loop {
        let x: f64 = g.sample(rng);
        let u: f64 = rng.random();
        if x > 0.0 && u.ln() <= -0.5 * omega / x {
            return x;
        }
    }
}

fn rou_noshift<R: Rng + ?Sized>(lambda: f64, omega: f64, rng: &mut R) -> f64 {
    let t = 0.5 * (lambda - 1.0);
    let s = 0.25 * omega;
    let xm = mode(lambda, omega);
    let nc = t * xm.ln() - s * (xm + 1.0 / xm);
    let ym = ((lambda + 1.0) + (lambda + 1.0).hypot(omega)) / omega;
    let um = (0.5 * (lambda + 1.0) * ym.ln() - s * (ym + 1.0 / ym) - nc).exp();
    loop {
        let u = um * rng.random::<f64>();
        let v: f64 = rng.random();
        let x = u / v;
        if x > 0.0 && x.is_finite() && v.ln() <= t * x.ln() - s * (x + 1.0 / x) - nc {
            return x;
        }
    }
}

fn rou_shift<R: Rng + ?Sized>(lambda: f64, omega: f64, rng: &mut R) -> f64 {
    let t = 0.5 * (lambda - 1.0);
    let s = 0.25 * omega;
    let xm = mode(lambda, omega);
    let nc = t * xm.ln() - s * (xm + 1.0 / xm);
    // roots of the cubic locating the extremes of (x − m)·√f(x)
    let a = -(2.0 * (lambda + 1.0) / omega + xm);
    let b = 2.0 * (lambda - 1.0) * xm / omega - 1.0;
    let c = xm;
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let fi = (-q / (2.0 * (-(p * p * p) / 27.0).sqrt())).clamp(-1.0, 1.0).acos();
    let fak = 2.0 * (-p / 3.0).sqrt();
    let y1 = fak * (fi / 3.0).cos() - a / 3.0;
    let y2 = fak * (fi / 3.0 + 4.0 / 3.0 * std::f64::consts::PI).cos() - a / 3.0;
    let uplus = (y1 - xm) * (t * y1.ln() - s * (y1 + 1.0 / y1) - nc).exp();
    let uminus = (y2 - xm) * (t * y2.ln() - s * (y2 + 1.0 / y2) - nc).exp();
    loop {
        let u = uminus + rng.random::<f64>() * (uplus - uminus);
        let v: f64 = rng.random();
        let x = u / v + xm;
        if x > 0.0 && x.is_finite() && v.ln() <= t * x.ln() - s * (x + 1.0 / x) - nc {
            return x;
        }
    }
}

// Three-piece hat for 0 ≤ λ < 1 and small ω, where the density is not
// T-concave: constant on (0, x0), power law on (x0, 2/ω), exponential tail.
fn concave_free<R: Rng + ?Sized>(lambda: f64, omega: f64, rng: &mut R) -> f64 {
    let xm = mode(lambda, omega);
    let x0 = omega / (1.0 - lambda);
    let k0 = ((lambda - 1.0) * xm.ln() - 0.5 * omega * (xm + 1.0 / xm)).exp();
    let a0 = k0 * x0;
    let (k1, a1, k2, a2);
    if x0 >= 2.0 / omega {
        k1 = 0.0;
        a1 = 0.0;
        k2 = x0.powf(lambda - 1.0);
        a2 = k2 * 2.0 * (-omega * x0 / 2.0).exp() / omega;
    } else {
        k1 = (-omega).exp();
        a1 = if lambda == 0.0 {
            k1 * (2.0 / (omega * omega)).ln()
        } else {
            k1 / lambda * ((2.0 / omega).powf(lambda) - x0.powf(lambda))
        };
        k2 = (2.0 / omega).powf(lambda - 1.0);
        a2 = k2 * 2.0 * (-1.0f64).exp() / omega;
    }
    let total = a0 + a1 + a2;
    loop {
        let mut v = total * rng.random::<f64>();
        let (x, hx);
        if v <= a0 {
            x = x0 * v / a0;
            hx = k0;
        } else if v <= a0 + a1 {
            v -= a0;
            if lambda == 0.0 {
                x = omega * (omega.exp() * v).exp();
                hx = k1 / x;
            } else {
                x = (x0.powf(lambda) + lambda / k1 * v).powf(1.0 / lambda);
                hx = k1 * x.powf(lambda - 1.0);
            }
        } else {
            v -= a0 + a1;
            let lo = x0.max(2.0 / omega);
            x = -2.0 / omega * ((-omega / 2.0 * lo).exp() - omega / (2.0 * k2) * v).ln();
            hx = k2 * (-omega / 2.0 * x).exp();
        }
        let u = rng.random::<f64>() * hx;
        if x > 0.0 && x.is_finite() && u.ln() <= (lambda - 1.0) * x.ln() - omega / 2.0 * (x + 1.0 / x) {
            return x;
        }
    }
}
