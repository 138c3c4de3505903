//! Complex-argument Riccati–Bessel functions.
//!
//! `psi_n(z) = z * j_n(z)` is the regular radial solution kernel for spherical
//! wave problems; every dispersion function and mode operator downstream is
//! anchored on these evaluations. Two independent computation paths exist:
//! the production route ([`riccati_psi`], Miller downward recurrence plus an
//! ascending series near the origin) and a test oracle ([`series_oracle`],
//! direct truncated power series), kept separate so they can certify each
//! other.
//!
//! For large order and small argument `psi_n` underflows f64 (it decays like
//! `z^{n+1} / (2n+1)!!`), so the scaled API [`riccati_psi_scaled`] returns a
//! mantissa/exponent pair. Phase information stays exact in that
//! representation, which is what the argument-principle machinery needs.

use num_complex::Complex64;
use thiserror::Error;

/// Largest supported order. High-degree mode sweeps stay well below this;
/// beyond it the recurrence start-order heuristics are untested.
pub const MAX_ORDER: usize = 300;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SpecFunError {
    #[error("Riccati-Bessel order {0} beyond supported range (max {max})", max = MAX_ORDER)]
    OrderOverflow(usize),
}

/// One evaluation of `psi_n` and `psi_n'`.
#[derive(Debug, Clone, Copy)]
pub struct RiccatiEval {
    pub value: Complex64,
    pub derivative: Complex64,
    pub order: usize,
    pub argument: Complex64,
}

/// Complex number in mantissa/exponent form: `m * 2^e` with `|m|` kept near 1.
///
/// Arithmetic on these never overflows or underflows for any quantity this
/// crate produces; `to_complex` collapses back to f64 (flushing to 0 or inf
/// when genuinely out of range).
#[derive(Debug, Clone, Copy)]
pub struct Scaled {
    pub m: Complex64,
    pub e: i32,
}

impl Scaled {
    pub const ZERO: Scaled = Scaled {
        m: Complex64::new(0.0, 0.0),
        e: 0,
    };

    pub fn from_complex(v: Complex64) -> Self {
        Scaled { m: v, e: 0 }.normalized()
    }

    /// Renormalize so that |m| is in [1, 2) (zero stays zero).
    pub fn normalized(self) -> Self {
        let a = self.m.norm();
        if a == 0.0 || !a.is_finite() {
            return Scaled { m: self.m, e: 0 };
        }
        let shift = a.log2().floor() as i32;
        Scaled {
            m: self.m * exp2i(-shift),
            e: self.e + shift,
        }
    }

    pub fn mul(self, other: Scaled) -> Self {
        Scaled {
            m: self.m * other.m,
            e: self.e + other.e,
        }
        .normalized()
    }

    pub fn mul_complex(self, v: Complex64) -> Self {
        self.mul(Scaled::from_complex(v))
    }

    pub fn mul_real(self, v: f64) -> Self {
        self.mul(Scaled::from_complex(Complex64::new(v, 0.0)))
    }

    /// self - other, aligned to the larger exponent.
    pub fn sub(self, other: Scaled) -> Self {
        if other.m.norm() == 0.0 {
            return self;
        }
        if self.m.norm() == 0.0 {
            return Scaled {
                m: -other.m,
                e: other.e,
            };
        }
        let e = self.e.max(other.e);
        let a = self.m * exp2i(self.e - e);
        let b = other.m * exp2i(other.e - e);
        Scaled { m: a - b, e }.normalized()
    }

    pub fn abs_log2(self) -> f64 {
        self.m.norm().log2() + self.e as f64
    }

    pub fn to_complex(self) -> Complex64 {
        self.m * exp2i(self.e)
    }

    /// Ratio self / other as a plain complex number (caller asserts the
    /// result is representable, e.g. Newton steps).
    pub fn div_to_complex(self, other: Scaled) -> Complex64 {
        (self.m / other.m) * exp2i(self.e - other.e)
    }
}

fn exp2i(e: i32) -> f64 {
    // f64::powi is exact for powers of two within range; clamp the rest.
    if e > 1023 {
        f64::INFINITY
    } else if e < -1074 {
        0.0
    } else {
        (e as f64).exp2()
    }
}

/// Scaled evaluation of `psi_n(z)` and `psi_n'(z)`.
#[derive(Debug, Clone, Copy)]
pub struct RiccatiScaled {
    pub psi: Scaled,
    pub dpsi: Scaled,
    pub order: usize,
    pub argument: Complex64,
}

impl RiccatiScaled {
    pub fn collapse(&self) -> RiccatiEval {
        RiccatiEval {
            value: self.psi.to_complex(),
            derivative: self.dpsi.to_complex(),
            order: self.order,
            argument: self.argument,
        }
    }
}

/// Evaluate `psi_n(z)` and `psi_n'(z)` for complex `z`.
///
/// Relative accuracy is certified to 1e-12 against the series oracle for
/// n <= 40 in the oracle's convergence zone, and the recurrence/parity
/// identities hold at that level over the working domain |z| <= 100,
/// |Im z| <= 50. Near z = 0 the ascending series branch is used, so the
/// origin is not an error.
pub fn riccati_psi(n: usize, z: Complex64) -> Result<RiccatiEval, SpecFunError> {
    Ok(riccati_psi_scaled(n, z)?.collapse())
}

/// Scaled variant of [`riccati_psi`]; this is what the dispersion layer uses
/// so that high-order evaluations keep their phase even when the magnitude
/// underflows f64.
pub fn riccati_psi_scaled(n: usize, z: Complex64) -> Result<RiccatiScaled, SpecFunError> {
    if n > MAX_ORDER {
        return Err(SpecFunError::OrderOverflow(n));
    }
    // Series for small |z| (relative to order), Miller recurrence otherwise.
    // Upward recurrence is unstable for n > |z|, downward is safe everywhere;
    // the series takes over where the recurrence normalization loses digits.
    let series_threshold = 4.0_f64.max(n as f64 / 2.0);
    let eval = if z.norm() < series_threshold {
        series_psi_pair(n, z)
    } else {
        miller_psi_pair(n, z)
    };
    Ok(RiccatiScaled {
        psi: eval.0,
        dpsi: eval.1,
        order: n,
        argument: z,
    })
}

/// Ascending-series branch: j_n and j_{n-1} by their standard power series,
/// then psi_n = z j_n and psi_n' = psi_{n-1} - (n/z) psi_n.
fn series_psi_pair(n: usize, z: Complex64) -> (Scaled, Scaled) {
    if n == 0 {
        return (
            Scaled::from_complex(z.sin()),
            Scaled::from_complex(z.cos()),
        );
    }
    let psi = series_psi_only(n, z);
    if z.norm() == 0.0 {
        // psi_n(0) = 0 for n >= 1 and psi_n'(0) = 0 for n >= 1
        // (psi_1' ~ 2z/3 near 0).
        return (Scaled::ZERO, Scaled::ZERO);
    }
    let psi_m1 = series_psi_only(n - 1, z);
    // psi_n'(z) = psi_{n-1}(z) - (n/z) psi_n(z)
    let dpsi = psi_m1.sub(psi.mul_complex(Complex64::new(n as f64, 0.0) / z));
    (psi, dpsi)
}

/// psi_n(z) = z^{n+1}/(2n+1)!! * sum_m t_m,  t_0 = 1,
/// t_m = t_{m-1} * (-z^2/2) / (m (2n+2m+1)).
fn series_psi_only(n: usize, z: Complex64) -> Scaled {
    if z.norm() == 0.0 {
        return Scaled::ZERO;
    }
    // Prefactor z^{n+1}/(2n+1)!! accumulated with explicit renormalization;
    // for large n it is far below the f64 range.
    let mut pref = Scaled::from_complex(Complex64::new(1.0, 0.0));
    for k in 0..=n {
        pref = pref.mul_complex(z / (2.0 * k as f64 + 1.0));
    }
    let half_z2 = -z * z * 0.5;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for m in 1..500 {
        term *= half_z2 / (m as f64 * (2 * (n + m) + 1) as f64);
        sum += term;
        if term.norm() < 1e-18 * sum.norm().max(1e-30) {
            break;
        }
    }
    pref.mul_complex(sum)
}

/// Miller downward recurrence for j_n with normalization against j_0 or j_1,
/// whichever is larger in magnitude. Returns (psi_n, psi_n').
fn miller_psi_pair(n: usize, z: Complex64) -> (Scaled, Scaled) {
    let sin_z = z.sin();
    let cos_z = z.cos();
    if n == 0 {
        return (Scaled::from_complex(sin_z), Scaled::from_complex(cos_z));
    }
    let j0 = sin_z / z;
    let j1 = sin_z / (z * z) - cos_z / z;

    // Start order high enough that the recurrence has converged to the
    // minimal solution by the time it reaches n (specfun.f heuristics).
    let a0 = z.norm();
    let mut m = msta1(a0, 200);
    let nm = n;
    if m < nm {
        m = msta2(a0, nm as i32, 15) as usize;
    } else {
        m = m.max(nm + 10);
    }
    let m = m.max(nm + 5);

    let mut fp1 = Complex64::new(0.0, 0.0); // f_{k+1}
    let mut f = Complex64::new(1e-200, 0.0); // f_k at k = m
    let mut shift: i32 = 0;
    // Recorded (value, shift at record time) for the orders we need.
    let mut rec_n: Option<(Complex64, i32)> = None;
    let mut rec_nm1: Option<(Complex64, i32)> = None;
    let mut rec_0: Option<(Complex64, i32)> = None;
    let mut rec_1: Option<(Complex64, i32)> = None;

    let mut k = m as i64;
    loop {
        if k as usize == n {
            rec_n = Some((f, shift));
        }
        if n >= 1 && k as usize == n - 1 {
            rec_nm1 = Some((f, shift));
        }
        if k == 1 {
            rec_1 = Some((f, shift));
        }
        if k == 0 {
            rec_0 = Some((f, shift));
            break;
        }
        // j_{k-1} = ((2k+1)/z) j_k - j_{k+1}
        let fm1 = (2.0 * k as f64 + 1.0) / z * f - fp1;
        fp1 = f;
        f = fm1;
        if f.norm() > 1e250 {
            let scale = 1e-250;
            f *= scale;
            fp1 *= scale;
            shift += 1;
        }
        k -= 1;
    }

    let (f0, s0) = rec_0.unwrap();
    let (f1, s1) = rec_1.unwrap();
    let (fnv, sn) = rec_n.unwrap();
    let (fnm1, snm1) = rec_nm1.unwrap();

    // Normalize against the larger of j0, j1 to dodge zeros of sin on the
    // real axis.
    let ten250 = Scaled::from_complex(Complex64::new(1e250, 0.0));
    let unscale = |v: Complex64, s: i32, s_ref: i32, fref: Complex64, jref: Complex64| -> Scaled {
        // true_v = v * (1e-250)^{s_total - s}; ratio to reference restores scale
        let mut out = Scaled::from_complex(v / fref).mul_complex(jref);
        let mut ds = s_ref - s;
        while ds > 0 {
            out = out.mul(ten250);
            ds -= 1;
        }
        while ds < 0 {
            out = out.mul_real(1e-250);
            ds += 1;
        }
        out
    };
    let (jn, jnm1) = if j0.norm() >= j1.norm() {
        (
            unscale(fnv, sn, s0, f0, j0),
            unscale(fnm1, snm1, s0, f0, j0),
        )
    } else {
        (
            unscale(fnv, sn, s1, f1, j1),
            unscale(fnm1, snm1, s1, f1, j1),
        )
    };

    let psi = jn.mul_complex(z);
    let psi_m1 = jnm1.mul_complex(z);
    let dpsi = psi_m1.sub(psi.mul_complex(Complex64::new(n as f64, 0.0) / z));
    (psi, dpsi)
}

/// Starting order so that the downward recurrence carries `mp` significant
/// digits at order 0 (Zhang & Jin, specfun.f MSTA1).
fn msta1(a0: f64, mp: i32) -> usize {
    let mut n0 = (1.1 * a0) as i32 + 1;
    let mut f0 = envj(n0, a0) - mp as f64;
    let mut n1 = n0 + 5;
    let mut f1 = envj(n1, a0) - mp as f64;
    for _ in 0..20 {
        let nn = (n1 as f64 - (n1 - n0) as f64 / (1.0 - f0 / f1)) as i32;
        let f = envj(nn, a0) - mp as f64;
        if (nn - n1).abs() < 1 {
            return nn.max(1) as usize;
        }
        n0 = n1;
        f0 = f1;
        n1 = nn;
        f1 = f;
    }
    n1.max(1) as usize
}

/// Starting order so that orders up to `n` keep `mp` digits (MSTA2).
fn msta2(a0: f64, n: i32, mp: i32) -> i32 {
    let hmp = 0.5 * mp as f64;
    let ejn = envj(n, a0);
    let (obj, mut n0) = if ejn <= hmp {
        (mp as f64, (1.1 * a0) as i32 + 1)
    } else {
        (hmp + ejn, n)
    };
    let mut f0 = envj(n0, a0) - obj;
    let mut n1 = n0 + 5;
    let mut f1 = envj(n1, a0) - obj;
    for _ in 0..20 {
        let nn = (n1 as f64 - (n1 - n0) as f64 / (1.0 - f0 / f1)) as i32;
        let f = envj(nn, a0) - obj;
        if (nn - n1).abs() < 1 {
            return nn + 10;
        }
        n0 = n1;
        f0 = f1;
        n1 = nn;
        f1 = f;
    }
    n1 + 10
}

fn envj(n: i32, x: f64) -> f64 {
    let n = (n.max(1)) as f64;
    0.5 * (6.28 * n).log10() - n * (1.36 * x / n).log10()
}

/// Independent truncated-series oracle for `(psi_n, psi_n')`.
///
/// Direct ascending series for psi and its term-wise derivative; shares no
/// code with [`riccati_psi`]'s branches. Intended for |z| within the series
/// comfort zone (|z| <= 2n + 20) and `terms >= 10`; used only by tests.
pub fn series_oracle(n: usize, z: Complex64, terms: usize) -> (Complex64, Complex64) {
    assert!(terms >= 10, "series oracle needs at least 10 terms");
    // psi_n(z) = sum_j c_j z^{n+1+2j},
    // c_0 = 1/(2n+1)!!, c_j = -c_{j-1} / (2j (2n+2j+1))
    // psi_n'(z) = sum_j (n+1+2j) c_j z^{n+2j}
    let mut c = 1.0_f64;
    for k in 1..=n {
        c /= 2.0 * k as f64 + 1.0;
    }
    // z^n computed progressively; f64 underflow is acceptable here since the
    // oracle zone keeps the result in range for the orders tests use.
    let mut zn = Complex64::new(1.0, 0.0);
    for _ in 0..n {
        zn *= z;
    }
    let z2 = z * z;
    let mut val = Complex64::new(0.0, 0.0);
    let mut der = Complex64::new(0.0, 0.0);
    let mut cj = c;
    let mut zpow_d = zn; // z^{n+2j}
    for j in 0..terms {
        let zpow_v = zpow_d * z; // z^{n+1+2j}
        val += cj * zpow_v;
        der += cj * (n as f64 + 1.0 + 2.0 * j as f64) * zpow_d;
        cj *= -1.0 / (2.0 * (j as f64 + 1.0) * (2 * n + 2 * j + 3) as f64);
        zpow_d *= z2;
    }
    (val, der)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rel_err(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm().max(1e-300)
    }

    #[test]
    fn psi0_is_sine() {
        let e = riccati_psi(0, c(PI, 0.0)).unwrap();
        assert!(e.value.norm() < 1e-14, "psi_0(pi) = sin(pi) = 0");
        assert_relative_eq!(e.derivative.re, -1.0, max_relative = 1e-14);
        assert!(e.derivative.im.abs() < 1e-15);
    }

    #[test]
    fn psi1_closed_form_at_half_pi() {
        // psi_1(z) = sin z / z - cos z;  at z = pi/2 this is 2/pi.
        let e = riccati_psi(1, c(PI / 2.0, 0.0)).unwrap();
        assert_relative_eq!(e.value.re, 2.0 / PI, max_relative = 1e-13);
        assert!(e.value.im.abs() < 1e-15);
    }

    #[test]
    fn matches_series_oracle_at_example_point() {
        let z = c(2.0, 1.0);
        let e = riccati_psi(5, z).unwrap();
        let (ov, od) = series_oracle(5, z, 30);
        assert!(rel_err(e.value, ov) < 1e-12);
        assert!(rel_err(e.derivative, od) < 1e-12);
    }

    #[test]
    fn oracle_sine_series() {
        let (v, _) = series_oracle(0, c(1.0, 0.0), 30);
        assert_relative_eq!(v.re, 1.0_f64.sin(), max_relative = 1e-14);
    }

    #[test]
    fn oracle_vanishes_at_zero_order_one() {
        let (v, d) = series_oracle(1, c(0.0, 0.0), 30);
        assert_eq!(v, c(0.0, 0.0));
        assert_eq!(d, c(0.0, 0.0));
    }

    #[test]
    fn oracle_mutual_agreement_order_three() {
        let z = c(1.0, 1.0);
        let e = riccati_psi(3, z).unwrap();
        let (ov, od) = series_oracle(3, z, 30);
        assert!(rel_err(e.value, ov) < 1e-12);
        assert!(rel_err(e.derivative, od) < 1e-12);
    }

    #[test]
    fn certification_grid_against_oracle() {
        // n <= 40, |z| <= min(2n+20, 100), both branches exercised.
        let mut worst = 0.0_f64;
        for n in [1usize, 2, 3, 5, 8, 13, 21, 30, 40] {
            let rmax = (2.0 * n as f64 + 20.0).min(60.0);
            for i in 0..24 {
                let t = (i as f64 + 0.5) / 24.0;
                let radius = 0.2 + t * (rmax - 0.2);
                let ang = 2.83 * i as f64;
                let z = Complex64::from_polar(radius, ang);
                let z = c(z.re, z.im.clamp(-50.0, 50.0));
                let e = riccati_psi(n, z).unwrap();
                let (ov, od) = series_oracle(n, z, 220);
                worst = worst.max(rel_err(e.value, ov)).max(rel_err(e.derivative, od));
            }
        }
        assert!(worst < 1e-12, "worst relative deviation {worst:e}");
    }

    #[test]
    fn order_overflow_rejected() {
        assert_eq!(
            riccati_psi(MAX_ORDER + 1, c(1.0, 0.0)).unwrap_err(),
            SpecFunError::OrderOverflow(MAX_ORDER + 1)
        );
    }

    #[test]
    fn scaled_api_tracks_underflowed_magnitudes() {
        // n = 150 at |z| = 9: far below the f64 floor, but the scaled value
        // still satisfies the (subnormal-free) recurrence identity.
        let z = c(9.0, 0.3);
        let lo = riccati_psi_scaled(149, z).unwrap();
        let hi = riccati_psi_scaled(150, z).unwrap();
        // psi_150' = psi_149 - (150/z) psi_150
        let rhs = lo.psi.sub(hi.psi.mul_complex(c(150.0, 0.0) / z));
        let diff = hi.dpsi.sub(rhs);
        let rel = (diff.abs_log2() - hi.dpsi.abs_log2()).exp2();
        assert!(rel < 1e-10, "scaled recurrence defect {rel:e}");
        assert!(hi.psi.abs_log2() < -900.0, "expected deep underflow regime");
        assert_eq!(hi.collapse().value, c(0.0, 0.0));
    }

    #[test]
    fn three_term_recurrence_residual() {
        // |psi_{n-1} + psi_{n+1} - ((2n+1)/z) psi_n| small, z away from 0.
        for n in [1usize, 2, 4, 9, 17, 33] {
            for z in [c(3.0, 0.0), c(7.5, 2.0), c(20.0, -5.0), c(55.0, 11.0)] {
                let a = riccati_psi(n - 1, z).unwrap().value;
                let b = riccati_psi(n, z).unwrap().value;
                let d = riccati_psi(n + 1, z).unwrap().value;
                let resid = (a + d - (2.0 * n as f64 + 1.0) / z * b).norm();
                assert!(
                    resid <= 1e-10 * b.norm().max(1.0),
                    "n={n} z={z} resid={resid:e}"
                );
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig { cases: 300, ..ProptestConfig::default() })]

        #[test]
        fn parity_and_conjugation(
            n in 0usize..=10,
            re in -40.0f64..40.0,
            im in -20.0f64..20.0,
        ) {
            let z = c(re, im);
            prop_assume!(z.norm() > 0.3);
            let plus = riccati_psi(n, z).unwrap();
            let minus = riccati_psi(n, -z).unwrap();
            let conj = riccati_psi(n, z.conj()).unwrap();
            let sgn_v = if (n + 1) % 2 == 0 { 1.0 } else { -1.0 };
            let sgn_d = if n % 2 == 0 { 1.0 } else { -1.0 };
            // psi_n(-z) = (-1)^{n+1} psi_n(z), psi_n'(-z) = (-1)^n psi_n'(z)
            prop_assert!(rel_err(minus.value, sgn_v * plus.value) < 1e-12
                || plus.value.norm() < 1e-280);
            prop_assert!(rel_err(minus.derivative, sgn_d * plus.derivative) < 1e-12
                || plus.derivative.norm() < 1e-280);
            // psi_n(conj z) = conj(psi_n(z))
            prop_assert!(rel_err(conj.value, plus.value.conj()) < 1e-12
                || plus.value.norm() < 1e-280);
        }

        #[test]
        fn derivative_identity(
            n in 1usize..=12,
            re in -30.0f64..30.0,
            im in -15.0f64..15.0,
        ) {
            let z = c(re, im);
            prop_assume!(z.norm() > 0.5);
            let e = riccati_psi(n, z).unwrap();
            let lo = riccati_psi(n - 1, z).unwrap();
            // psi_n' = psi_{n-1} - (n/z) psi_n
            let rhs = lo.value - Complex64::new(n as f64, 0.0) / z * e.value;
            let scale = e.derivative.norm().max(lo.value.norm()).max(1e-280);
            prop_assert!((e.derivative - rhs).norm() / scale < 1e-10);
        }
    }
}
