use super::{Cubic, ModelError, ModelParams};
use num_complex::Complex64;
use twofloat::TwoFloat;

/// The three roots of the characteristic cubic at one radial frequency.
///
/// Ordering: the conjugate pair first (`Im λ₁ ≥ 0`), then the real root.
/// When all three roots are real they are sorted by decreasing value.
/// Each root carries a low-order correction so that `roots[j] + tails[j]`
/// resolves the root beyond double precision; the residual contract is
/// checked against that extended value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharacteristicRoots {
    pub r: f64,
    pub roots: [Complex64; 3],
    pub tails: [Complex64; 3],
    pub near_degenerate: bool,
    pub cubic: Cubic,
    pub params: ModelParams,
}

fn degeneracy_tol(r: f64) -> f64 {
    1e-8 * (1.0 + r * r)
}

impl CharacteristicRoots {
    /// True when the three roots form a conjugate pair plus one real root.
    pub fn has_pair(&self) -> bool {
        self.roots[0].im != 0.0
    }

    pub fn min_separation(&self) -> f64 {
        let z = self.roots;
        (z[0] - z[1]).norm().min((z[0] - z[2]).norm()).min((z[1] - z[2]).norm())
    }

    /// |Λ(λⱼ)| evaluated in double-double arithmetic at the extended roots.
    pub fn residuals(&self) -> [f64; 3] {
        let c = DdCubic::new(&self.params, self.r);
        let mut out = [0.0; 3];
        for j in 0..3 {
            let z = DdComplex::from_parts(self.roots[j], self.tails[j]);
            out[j] = c.eval(z).norm();
        }
        out
    }

    /// Relative defects of the three Vieta identities.
    pub fn vieta_defects(&self) -> [f64; 3] {
        let [l1, l2, l3] = self.roots;
        let c = self.cubic;
        let rel = |a: Complex64, b: f64| {
            let s = b.abs().max(f64::MIN_POSITIVE);
            (a - b).norm() / s
        };
        [
            rel(l1 + l2 + l3, -c.a2),
            rel(l1 * l2 + l1 * l3 + l2 * l3, c.a1),
            rel(l1 * l2 * l3, -c.a0),
        ]
    }
}

/// Roots of the characteristic cubic of `params` at frequency `r ≥ 0`.
pub fn characteristic_roots(params: &ModelParams, r: f64) -> Result<CharacteristicRoots, ModelError> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(ModelError::BadFrequency(r, "finite and nonnegative"));
    }
    let cubic = params.cubic(r);
    let zero = Complex64::new(0.0, 0.0);
    if r == 0.0 {
        return Ok(CharacteristicRoots {
            r,
            roots: [zero; 3],
            tails: [zero; 3],
            near_degenerate: true,
            cubic,
            params: *params,
        });
    }
    let x = polish_real(&cubic, real_root(&cubic));
    let cq = -cubic.a0 / x;
    let bq = if x * x > cq.abs() {
        (cq - cubic.a1) / x
    } else {
        cubic.a2 + x
    };
    let disc = bq * bq - 4.0 * cq;
    let mut roots = if disc < 0.0 {
        let z = Complex64::new(-0.5 * bq, 0.5 * (-disc).sqrt());
        let z = polish_complex(&cubic, z);
        let z = if z.im < 0.0 { z.conj() } else { z };
        [z, z.conj(), Complex64::new(x, 0.0)]
    } else {
        let q = -0.5 * (bq + bq.signum() * disc.sqrt());
        let (u, v) = if q == 0.0 { (0.0, 0.0) } else { (q, cq / q) };
        let mut re = [x, polish_real(&cubic, u), polish_real(&cubic, v)];
        re.sort_by(|a, b| b.total_cmp(a));
        re.map(|v| Complex64::new(v, 0.0))
    };
    let dd = DdCubic::new(params, r);
    let mut tails = [zero; 3];
    for j in 0..3 {
        let (hi, lo) = refine(&dd, &cubic, roots[j]);
        roots[j] = hi;
        tails[j] = lo;
    }
    if roots[0].im != 0.0 {
        roots[1] = roots[0].conj();
        tails[1] = tails[0].conj();
    }
    let mut out = CharacteristicRoots {
        r,
        roots,
        tails,
        near_degenerate: false,
        cubic,
        params: *params,
    };
    out.near_degenerate = out.min_separation() < degeneracy_tol(r);
    Ok(out)
}

/// Safeguarded Newton iteration for a real root in `[-B, 0]`, where `B` is
/// Fujiwara's bound; Λ(0) = a0 > 0 and Λ(−B) < 0 bracket a sign change.
fn real_root(c: &Cubic) -> f64 {
    let bound = 2.0 * c.a2.abs().max(c.a1.abs().sqrt()).max((0.5 * c.a0.abs()).cbrt());
    let (mut lo, mut hi) = (-bound, 0.0);
    let mut x = -c.a0 / c.a1.max(f64::MIN_POSITIVE);
    if !(x > lo && x < hi) {
        x = 0.5 * lo;
    }
    for _ in 0..400 {
        let (p, d) = c.eval_real(x);
        if p == 0.0 {
            return x;
        }
        if p > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let newton = x - p / d;
        let next = if d != 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - x).abs() <= 4.0 * f64::EPSILON * x.abs() || hi - lo <= 4.0 * f64::EPSILON * hi.abs() {
            return next;
        }
        x = next;
    }
    x
}

fn polish_real(c: &Cubic, mut x: f64) -> f64 {
    let (mut p, _) = c.eval_real(x);
    for _ in 0..8 {
        let (_, d) = c.eval_real(x);
        if d == 0.0 || p == 0.0 {
            break;
        }
        let y = x - p / d;
        let (q, _) = c.eval_real(y);
        if q.abs() >= p.abs() {
            break;
        }
        x = y;
        p = q;
    }
    x
}

fn polish_complex(c: &Cubic, mut z: Complex64) -> Complex64 {
    let mut p = c.eval(z);
    for _ in 0..8 {
        let d = c.deriv(z);
        if d.norm() == 0.0 || p.norm() == 0.0 {
            break;
        }
        let w = z - p / d;
        let q = c.eval(w);
        if q.norm() >= p.norm() {
            break;
        }
        z = w;
        p = q;
    }
    z
}

/// One Newton step in extended precision, returned as a rounded head plus tail.
fn refine(dd: &DdCubic, c: &Cubic, z: Complex64) -> (Complex64, Complex64) {
    let d = c.deriv(z);
    if d.norm() == 0.0 {
        return (z, Complex64::new(0.0, 0.0));
    }
    let p = dd.eval(DdComplex::from_parts(z, Complex64::new(0.0, 0.0)));
    let step = -Complex64::new(p.re.hi() + p.re.lo(), p.im.hi() + p.im.lo()) / d;
    let re = TwoFloat::new_add(z.re, step.re);
    let im = TwoFloat::new_add(z.im, step.im);
    (Complex64::new(re.hi(), im.hi()), Complex64::new(re.lo(), im.lo()))
}

#[derive(Debug, Clone, Copy)]
struct DdComplex {
    re: TwoFloat,
    im: TwoFloat,
}

impl DdComplex {
    fn from_parts(hi: Complex64, lo: Complex64) -> Self {
        Self {
            re: TwoFloat::new_add(hi.re, lo.re),
            im: TwoFloat::new_add(hi.im, lo.im),
        }
    }

    fn mul(self, o: Self) -> Self {
        Self {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }

    fn add_real(self, x: TwoFloat) -> Self {
        Self {
            re: self.re + x,
            im: self.im,
        }
    }

    fn norm(self) -> f64 {
        let re = self.re.hi() + self.re.lo();
        let im = self.im.hi() + self.im.lo();
        re.hypot(im)
    }
}

/// Cubic coefficients formed in double-double from the stored parameters.
struct DdCubic {
    a2: TwoFloat,
    a1: TwoFloat,
    a0: TwoFloat,
}

impl DdCubic {
    fn new(p: &ModelParams, r: f64) -> Self {
        let r2 = TwoFloat::new_mul(r, r);
        let k = TwoFloat::from(p.kappa());
        let bnu = if p.is_inviscid() {
            TwoFloat::from(0.0)
        } else {
            TwoFloat::new_mul(p.b(), p.nu())
        };
        let gm1 = TwoFloat::new_sub(p.gamma(), 1.0);
        let delta = bnu + gm1 * k;
        let gt = TwoFloat::from(p.gamma()) * bnu * k;
        Self {
            a2: (delta + k) * r2,
            a1: (TwoFloat::from(1.0) + gt * r2) * r2,
            a0: k * r2 * r2,
        }
    }

    fn eval(&self, z: DdComplex) -> DdComplex {
        z.add_real(self.a2).mul(z).add_real(self.a1).mul(z).add_real(self.a0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{derive_params, large_freq_expansion, logspace, small_freq_expansion};
    use proptest::prelude::*;

    fn defaults() -> ModelParams {
        ModelParams::default()
    }

    fn check_contract(p: &ModelParams, r: f64) {
        let roots = characteristic_roots(p, r).unwrap();
        let scale = 1e-10 * 1f64.max(r.powi(4));
        for (j, res) in roots.residuals().iter().enumerate() {
            assert!(*res <= scale, "r={r} root {j} residual {res:e} > {scale:e}");
        }
        if r > 0.0 {
            for d in roots.vieta_defects() {
                assert!(d <= 1e-10, "r={r} Vieta defect {d:e}");
            }
            assert!(roots.roots.iter().all(|z| z.re < 0.0), "r={r}: {:?}", roots.roots);
        }
    }

    #[test]
    fn zero_frequency_is_triple_zero() {
        let roots = characteristic_roots(&defaults(), 0.0).unwrap();
        assert!(roots.roots.iter().all(|z| z.norm() == 0.0));
        assert!(roots.near_degenerate);
        assert!(characteristic_roots(&defaults(), -1.0).is_err());
    }

    #[test]
    fn unit_frequency_satisfies_vieta() {
        let roots = characteristic_roots(&defaults(), 1.0).unwrap();
        let s: Complex64 = roots.roots.iter().sum();
        assert!((s.re + 1.347_333_333_333_333).abs() < 1e-12);
        let prod = roots.roots[0] * roots.roots[1] * roots.roots[2];
        assert!((prod.re + 0.01).abs() < 1e-14);
        for res in roots.residuals() {
            assert!(res < 1e-12);
        }
        assert!(roots.has_pair());
        assert!(roots.roots[0].im > 0.0);
        assert_eq!(roots.roots[1], roots.roots[0].conj());
    }

    #[test]
    fn heat_root_at_low_frequency() {
        let roots = characteristic_roots(&defaults(), 1e-3).unwrap();
        let l3 = roots.roots[2].re / 1e-6;
        assert!((l3 + 0.01).abs() < 1e-4);
    }

    #[test]
    fn contract_across_frequency_range() {
        let p = defaults();
        for r in logspace(1e-6, 1e6, 400) {
            check_contract(&p, r);
            check_contract(&p.with_inviscid(true), r);
        }
    }

    #[test]
    fn all_real_branch_is_sorted() {
        let roots = characteristic_roots(&defaults(), 100.0).unwrap();
        assert!(!roots.has_pair());
        assert!(roots.roots[0].re >= roots.roots[1].re && roots.roots[1].re >= roots.roots[2].re);
    }

    #[test]
    fn small_frequency_error_is_cubic() {
        let p = defaults();
        let mut worst: f64 = 0.0;
        for r in logspace(1e-4, 1e-2, 30) {
            let exact = characteristic_roots(&p, r).unwrap().roots;
            let approx = small_freq_expansion(&p, r).unwrap();
            for j in 0..3 {
                worst = worst.max((exact[j] - approx[j]).norm() / r.powi(3));
            }
        }
        assert!(worst < 10.0, "ratio {worst}");
    }

    #[test]
    fn large_frequency_real_root_error_is_inverse_linear() {
        let p = defaults();
        let mut worst: f64 = 0.0;
        for r in logspace(1e2, 1e4, 30) {
            let exact = characteristic_roots(&p, r).unwrap().roots;
            let approx = large_freq_expansion(&p, r).unwrap()[2];
            let nearest = exact.iter().map(|z| (z - approx).norm()).fold(f64::INFINITY, f64::min);
            worst = worst.max(nearest / approx.norm() * r);
        }
        assert!(worst < 10.0, "ratio {worst}");
    }

    #[test]
    fn inviscid_imaginary_part_tracks_sound_speed() {
        let p = defaults().with_inviscid(true);
        let roots = characteristic_roots(&p, 1e4).unwrap();
        assert!((roots.roots[0].im / 1e4 - (1.0f64 / 1.4).sqrt()).abs() < 1e-4);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn random_parameters_keep_contract(
            kappa in 1e-4f64..0.1,
            b in 0.1f64..3.0,
            nu in 0.1f64..3.0,
            gamma in 1.01f64..1.666,
            lr in -4.0f64..3.0,
            inviscid in any::<bool>(),
        ) {
            let p = derive_params(kappa, b, nu, gamma, 1.0, inviscid).unwrap();
            let r = 10f64.powf(lr);
            check_contract(&p, r);
            let roots = characteristic_roots(&p, r).unwrap();
            let mut conj: Vec<Complex64> = roots.roots.iter().map(|z| z.conj()).collect();
            let mut orig = roots.roots.to_vec();
            let key = |z: &Complex64| (z.re, z.im);
            orig.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
            conj.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
            for (a, b) in orig.iter().zip(&conj) {
                prop_assert!((a - b).norm() <= 1e-12 * (1.0 + a.norm()));
            }
        }
    }
}
