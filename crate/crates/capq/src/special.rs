//! Complete elliptic integrals, the Jacobi elliptic sine, and the ring
//! moduli built from them.
//!
//! Everything uses the modulus convention: `K(k) = ∫₀^{π/2} dθ/√(1−k² sin²θ)`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::{Error, Result};

/// Maximum depth of the descending Landen recursion.
pub const LANDEN_DEPTH: usize = 32;

/// Below this modulus `sn(u, k)` is taken to be `sin u`.
pub const SMALL_MODULUS: f64 = 1e-8;

/// An elliptic modulus `k ∈ [0, 1)` with its complement `k' = √(1 − k²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticModulus {
    pub k: f64,
    pub k_prime: f64,
}

impl EllipticModulus {
    pub fn new(k: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&k) {
            return Err(Error::domain(format!("elliptic modulus must lie in [0, 1), got {k}")));
        }
        Ok(EllipticModulus {
            k,
            k_prime: complement(k),
        })
    }
}

/// `√(1 − k²)` without cancellation near `k = 1`.
pub fn complement(k: f64) -> f64 {
    ((1.0 - k) * (1.0 + k)).sqrt()
}

fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..64 {
        if (a - b).abs() <= 1e-16 * a {
            break;
        }
        (a, b) = (0.5 * (a + b), (a * b).sqrt());
    }
    0.5 * (a + b)
}

/// Complete elliptic integral of the first kind, `K(k) = π / (2·agm(1, k'))`.
pub fn elliptic_k(k: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&k.abs()) {
        return Err(Error::domain(format!("K(k) needs |k| < 1, got {k}")));
    }
    if k == 0.0 {
        return Ok(FRAC_PI_2);
    }
    Ok(FRAC_PI_2 / agm(1.0, complement(k)))
}

/// Complementary integral `K'(k) = K(√(1 − k²))`.
pub fn elliptic_k_prime(k: f64) -> Result<f64> {
    if !(k > 0.0 && k < 1.0) {
        return Err(Error::domain(format!("K'(k) needs 0 < k < 1, got {k}")));
    }
    Ok(FRAC_PI_2 / agm(1.0, k))
}

/// `(sn, cn, dn)` of a real argument by descending Landen transformation.
pub fn sn_cn_dn(u: f64, k: f64) -> Result<(f64, f64, f64)> {
    if !(0.0..1.0).contains(&k) {
        return Err(Error::domain(format!("sn needs modulus in [0, 1), got {k}")));
    }
    if k < SMALL_MODULUS {
        return Ok((u.sin(), u.cos(), 1.0));
    }
    landen(u, complement(k))
}

/// The Landen scheme in terms of the complementary modulus `kc`; `kc = 0`
/// is the degenerate modulus 1.
fn landen(u: f64, kc: f64) -> Result<(f64, f64, f64)> {
    if kc == 0.0 {
        let cn = 1.0 / u.cosh();
        return Ok((u.tanh(), cn, cn));
    }
    let mut em = [0.0; LANDEN_DEPTH];
    let mut en = [0.0; LANDEN_DEPTH];
    let (mut a, mut emc) = (1.0, kc * kc);
    let mut c = 1.0;
    let mut depth = None;
    for l in 0..LANDEN_DEPTH {
        em[l] = a;
        emc = emc.sqrt();
        en[l] = emc;
        c = 0.5 * (a + emc);
        if (a - emc).abs() <= 1e-9 * a {
            depth = Some(l);
            break;
        }
        emc *= a;
        a = c;
    }
    let Some(depth) = depth else {
        return Err(Error::NonConvergence {
            what: "Landen recursion",
            iterations: LANDEN_DEPTH,
            residual: (a - emc).abs(),
        });
    };
    let v = c * u;
    let (mut sn, mut cn) = v.sin_cos();
    let mut dn = 1.0;
    if sn != 0.0 {
        let mut a = cn / sn;
        c *= a;
        for l in (0..=depth).rev() {
            let b = em[l];
            a *= c;
            c *= dn;
            dn = (en[l] + a) / (b + a);
            a = c / b;
        }
        let a = 1.0 / (c * c + 1.0).sqrt();
        sn = if sn >= 0.0 { a } else { -a };
        cn = c * sn;
    }
    Ok((sn, cn, dn))
}

/// Jacobi elliptic sine of a complex argument.
///
/// Uses the addition formula with the real and imaginary parts evaluated
/// at moduli `k` and `k'` respectively.
pub fn jacobi_sn(u: Complex64, k: f64) -> Result<Complex64> {
    let (s, c, d) = sn_cn_dn(u.re, k)?;
    if u.im == 0.0 {
        return Ok(Complex64::new(s, 0.0));
    }
    // Jacobi's imaginary transformation: sn(iy, k) = i·sc(y, k').
    let (s1, c1, d1) = if k < SMALL_MODULUS {
        let c1 = 1.0 / u.im.cosh();
        (u.im.tanh(), c1, c1)
    } else {
        landen(u.im, k)?
    };
    let den = c1 * c1 + k * k * s * s * s1 * s1;
    Ok(Complex64::new(s * d1, c * d * s1 * c1) / den)
}

/// Grötzsch ring modulus `μ(r) = (π/2)·K'(r)/K(r)`.
pub fn groetzsch_mu(r: f64) -> Result<f64> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::domain(format!("μ(r) needs 0 < r < 1, got {r}")));
    }
    Ok(FRAC_PI_2 * elliptic_k_prime(r)? / elliptic_k(r)?)
}

/// Modulus of the Teichmüller ring `ℂ \ ([−1, 0] ∪ [√2 − 1, ∞))`, which is
/// `2·μ(1/√(1 + P))` with `P = √2 − 1`, i.e. `2·μ(2^(−1/4))`.
pub fn teichmuller_ring_modulus() -> f64 {
    2.0 * groetzsch_mu(2f64.powf(-0.25)).expect("2^(-1/4) lies in (0, 1)")
}

/// Left side of the modulus equation, `(π/4)·K'(m)/K(m)`.
pub fn modulus_equation_lhs(m: f64) -> Result<f64> {
    Ok(0.25 * PI * elliptic_k_prime(m)? / elliptic_k(m)?)
}

/// Solves `(π/4)·K'(m)/K(m) = log(1/r²)` for `m ∈ (0, 1)` by bisection.
pub fn solve_modulus_equation(r: f64) -> Result<f64> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::domain(format!("modulus equation needs 0 < r < 1, got {r}")));
    }
    let target = -2.0 * r.ln();
    // The left side decreases from +∞ to 0 on (0, 1).
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            return Ok(mid);
        }
        let lhs = modulus_equation_lhs(mid)?;
        // Near m = 1 the equation is steep, so a small bracket alone is not
        // enough; also require a small residual.
        if hi - lo <= 1e-12 * mid && (lhs - target).abs() <= 1e-12 * (1.0 + target) {
            return Ok(mid);
        }
        if lhs > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::NonConvergence {
        what: "modulus-equation bisection",
        iterations: 200,
        residual: hi - lo,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate;
    use proptest::prelude::*;

    fn k_by_quadrature(k: f64) -> f64 {
        integrate(
            |t: f64| 1.0 / (1.0 - k * k * t.sin().powi(2)).sqrt(),
            0.0,
            FRAC_PI_2,
            1e-14,
        )
        .unwrap()
    }

    #[test]
    fn k_at_zero_is_exact() {
        assert_eq!(elliptic_k(0.0).unwrap(), FRAC_PI_2);
    }

    #[test]
    fn k_matches_quadrature() {
        for i in 1..=9 {
            let k = i as f64 / 10.0;
            let (a, b) = (elliptic_k(k).unwrap(), k_by_quadrature(k));
            assert!((a - b).abs() < 1e-12 * b, "k={k}: {a} vs {b}");
        }
        let kp = elliptic_k_prime(0.3).unwrap();
        assert!((kp - k_by_quadrature(complement(0.3))).abs() < 1e-12);
    }

    #[test]
    fn k_reference_values() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((elliptic_k(s).unwrap() - 1.854_074_677_301_372).abs() < 1e-13);
        assert!((elliptic_k_prime(s).unwrap() - elliptic_k(s).unwrap()).abs() < 1e-14);
        assert!(elliptic_k_prime(1e-4).unwrap() > 9.0);
    }

    #[test]
    fn k_rejects_unit_modulus() {
        assert!(elliptic_k(1.0).is_err());
        assert!(elliptic_k_prime(0.0).is_err());
        assert!(elliptic_k_prime(1.0).is_err());
    }

    #[test]
    fn k_is_increasing() {
        let mut prev = 0.0;
        for i in 0..=999 {
            let v = elliptic_k(i as f64 / 1000.0).unwrap();
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn sn_quarter_period_and_degenerate_modulus() {
        for i in 1..=9 {
            let k = i as f64 / 10.0;
            let (s, _, _) = sn_cn_dn(elliptic_k(k).unwrap(), k).unwrap();
            assert!((s - 1.0).abs() < 1e-9, "k={k}: {s}");
            assert_eq!(sn_cn_dn(0.0, k).unwrap().0, 0.0);
        }
        for i in 0..=100 {
            let u = 2.0 * PI * i as f64 / 100.0;
            assert!((sn_cn_dn(u, 0.0).unwrap().0 - u.sin()).abs() < 1e-12);
        }
    }

    #[test]
    fn sn_matches_inverse_quadrature() {
        // u = F(φ, k) implies sn(u, k) = sin φ.
        let k = 0.8;
        for phi in [0.2, 0.7, 1.3] {
            let u = integrate(|t: f64| 1.0 / (1.0 - k * k * t.sin().powi(2)).sqrt(), 0.0, phi, 1e-14)
                .unwrap();
            let (s, c, d) = sn_cn_dn(u, k).unwrap();
            assert!((s - phi.sin()).abs() < 1e-12);
            assert!((c - phi.cos()).abs() < 1e-12);
            assert!((d - (1.0 - k * k * phi.sin().powi(2)).sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn complex_sn_periods() {
        let k = 0.6;
        let big_k = elliptic_k(k).unwrap();
        let big_kp = elliptic_k_prime(k).unwrap();
        let u = Complex64::new(0.3, 0.2);
        let a = jacobi_sn(u, k).unwrap();
        // sn(u + 2iK') = sn(u), sn(u + 2K) = −sn(u)
        let b = jacobi_sn(u + Complex64::new(0.0, 2.0 * big_kp), k).unwrap();
        let c = jacobi_sn(u + Complex64::new(2.0 * big_k, 0.0), k).unwrap();
        assert!((a - b).norm() < 1e-10, "{a} {b}");
        assert!((a + c).norm() < 1e-10, "{a} {c}");
        // sn(K + iK') = 1/k
        let top = jacobi_sn(Complex64::new(big_k, big_kp), k).unwrap();
        assert!((top - 1.0 / k).norm() < 1e-9, "{top}");
    }

    #[test]
    fn complex_sn_is_holomorphic() {
        let k = 0.7;
        let z = Complex64::new(0.4, 0.3);
        let h = 1e-6;
        let dx = (jacobi_sn(z + h, k).unwrap() - jacobi_sn(z - h, k).unwrap()) / (2.0 * h);
        let i = Complex64::i();
        let dy = (jacobi_sn(z + i * h, k).unwrap() - jacobi_sn(z - i * h, k).unwrap()) / (2.0 * h);
        assert!((dy - i * dx).norm() < 1e-8);
        // and sn' = cn·dn on the real axis
        let (_, c, d) = sn_cn_dn(0.4, k).unwrap();
        let re = (jacobi_sn(Complex64::new(0.4 + h, 0.0), k).unwrap()
            - jacobi_sn(Complex64::new(0.4 - h, 0.0), k).unwrap())
            / (2.0 * h);
        assert!((re.re - c * d).abs() < 1e-8);
    }

    #[test]
    fn mu_identities() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((groetzsch_mu(s).unwrap() - FRAC_PI_2).abs() < 1e-12);
        for r in [0.1, 0.3, 0.5, 0.9] {
            let prod = groetzsch_mu(r).unwrap() * groetzsch_mu(complement(r)).unwrap();
            assert!((prod - PI * PI / 4.0).abs() < 1e-10);
        }
        let quad = FRAC_PI_2 * k_by_quadrature(complement(0.5)) / k_by_quadrature(0.5);
        assert!((groetzsch_mu(0.5).unwrap() - quad).abs() < 1e-10);
    }

    #[test]
    fn teichmuller_modulus_value() {
        // mpmath: 2·(π/2)·K(1 − 2^(−1/2))/K(2^(−1/2)) in parameter form
        assert!((teichmuller_ring_modulus() - 2.574_988_161_087_928_7).abs() < 1e-12);
    }

    #[test]
    fn modulus_equation_symmetry_point() {
        let r = (-PI / 8.0).exp();
        let m = solve_modulus_equation(r).unwrap();
        assert!((m - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-8);
    }

    #[test]
    fn modulus_equation_is_monotone_and_accurate() {
        // Above r = 0.9 the root sits within 1e-9 of 1, where the spacing of
        // doubles alone moves the residual past 1e-10.
        let mut prev = 0.0;
        for i in 1..=36 {
            let r = i as f64 / 40.0;
            let m = solve_modulus_equation(r).unwrap();
            let res = modulus_equation_lhs(m).unwrap() + 2.0 * r.ln();
            assert!(res.abs() < 1e-10, "r={r}: residual {res}");
            assert!(m > prev);
            prev = m;
        }
    }

    proptest! {
        #[test]
        fn pythagorean_identities(u in -20.0f64..20.0, k in 0.0f64..0.999) {
            let (s, c, d) = sn_cn_dn(u, k).unwrap();
            prop_assert!((s * s + c * c - 1.0).abs() < 1e-9);
            prop_assert!((d * d + k * k * s * s - 1.0).abs() < 1e-9);
            prop_assert!(s.abs() <= 1.0);
        }

        #[test]
        fn modulus_complement(k in 0.0f64..1.0) {
            let m = EllipticModulus::new(k).unwrap();
            prop_assert!((m.k * m.k + m.k_prime * m.k_prime - 1.0).abs() < 1e-15);
        }

        #[test]
        fn sn_is_odd(u in -5.0f64..5.0, v in -1.0f64..1.0, k in 0.05f64..0.95) {
            let z = Complex64::new(u, v);
            let a = jacobi_sn(z, k).unwrap();
            let b = jacobi_sn(-z, k).unwrap();
            prop_assert!((a + b).norm() < 1e-9 * (1.0 + a.norm()));
        }
    }
}
