//! Second divided differences of `λ^m e^{λt}` over three complex nodes,
//! evaluated without the cancellation of the textbook Vandermonde sums.

use num_complex::Complex64;

type C = Complex64;

const TAYLOR_SPREAD: f64 = 1.5;

/// Returns `D_m = (λ^m e^{λt})[x₀, x₁, x₂]` for `m = 0, 1, 2`.
pub(crate) fn exp_divided_differences(x: [C; 3], t: f64) -> [C; 3] {
    let zero = C::new(0.0, 0.0);
    if t == 0.0 {
        return [zero, zero, C::new(1.0, 0.0)];
    }
    let mu = (x[0] + x[1] + x[2]) / 3.0;
    let z = [x[0] - mu, x[1] - mu, x[2] - mu];
    let spread = z.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if spread * t <= TAYLOR_SPREAD {
        taylor(mu, z, t)
    } else {
        pairwise(x, t)
    }
}

/// Series in complete homogeneous symmetric polynomials of the centred nodes.
fn taylor(mu: C, z: [C; 3], t: f64) -> [C; 3] {
    let b1 = z[0] * z[1] + z[0] * z[2] + z[1] * z[2];
    let b0 = -(z[0] * z[1] * z[2]);
    // h_k t^k, carried scaled so the recursion stays O(1).
    let (tb1, tb0) = (b1 * (t * t), b0 * (t * t * t));
    let mut h = [C::new(1.0, 0.0), C::new(0.0, 0.0), -tb1];
    // S_j = Σ_k h_k t^k · t^{2-j} / (k+2-j)!
    let mut s = [C::new(0.0, 0.0); 3];
    let mut fact = [2.0, 1.0, 1.0];
    let mut k = 0usize;
    loop {
        let hk = h[k % 3];
        for j in 0..3 {
            s[j] += hk * (1.0 / fact[j]);
        }
        let term = hk.norm() / fact[2];
        k += 1;
        for (j, f) in fact.iter_mut().enumerate() {
            *f *= (k + 2 - j) as f64;
        }
        if k >= 3 && term < 1e-18 || k > 80 {
            break;
        }
        if k >= 3 {
            let next = -tb1 * h[(k - 2) % 3] - tb0 * h[(k - 3) % 3];
            h[k % 3] = next;
        }
    }
    let s0 = s[0] * (t * t);
    let s1 = s[1] * t;
    let s2 = s[2];
    let e = (mu * t).exp();
    [e * s0, e * (mu * s0 + s1), e * (mu * mu * s0 + mu * s1 * 2.0 + s2)]
}

fn phi1(w: C) -> C {
    if w.norm() < 0.5 {
        let mut term = C::new(1.0, 0.0);
        let mut sum = term;
        for k in 2..30 {
            term = term * w / k as f64;
            sum += term;
            if term.norm() < 1e-18 {
                break;
            }
        }
        sum
    } else {
        (w.exp() - 1.0) / w
    }
}

/// First divided differences of `λ^m e^{λt}`, m = 0, 1, 2, on the pair (p, q).
fn first(p: C, q: C, t: f64) -> [C; 3] {
    let (p, q) = if p.re > q.re { (q, p) } else { (p, q) };
    let w = (p - q) * t;
    let eq = (q * t).exp();
    if w.norm() >= 1.0 {
        let ep = (p * t).exp();
        let d = p - q;
        [(ep - eq) / d, (p * ep - q * eq) / d, (p * p * ep - q * q * eq) / d]
    } else {
        let e = eq * phi1(w) * t;
        [e, p * e + eq, p * p * e + (p + q) * eq]
    }
}

fn pairwise(x: [C; 3], t: f64) -> [C; 3] {
    let d01 = (x[0] - x[1]).norm();
    let d02 = (x[0] - x[2]).norm();
    let d12 = (x[1] - x[2]).norm();
    let (a, b, c) = if d02 >= d01 && d02 >= d12 {
        (x[0], x[1], x[2])
    } else if d01 >= d12 {
        (x[0], x[2], x[1])
    } else {
        (x[1], x[0], x[2])
    };
    let fab = first(a, b, t);
    let fbc = first(b, c, t);
    let den = a - c;
    [
        (fab[0] - fbc[0]) / den,
        (fab[1] - fbc[1]) / den,
        (fab[2] - fbc[2]) / den,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive(x: [C; 3], t: f64, m: i32) -> C {
        let mut s = C::new(0.0, 0.0);
        for k in 0..3 {
            let mut den = C::new(1.0, 0.0);
            for j in 0..3 {
                if j != k {
                    den *= x[k] - x[j];
                }
            }
            s += x[k].powi(m) * (x[k] * t).exp() / den;
        }
        s
    }

    #[test]
    fn both_paths_agree_with_naive_on_separated_nodes() {
        let x = [C::new(-0.3, 1.2), C::new(-0.3, -1.2), C::new(-0.9, 0.0)];
        for t in [0.05, 0.5, 1.0, 3.0, 20.0] {
            let d = exp_divided_differences(x, t);
            for m in 0..3 {
                let n = naive(x, t, m as i32);
                assert!((d[m] - n).norm() < 1e-13 * (1.0 + n.norm()), "t={t} m={m}");
            }
        }
    }

    #[test]
    fn confluent_limit_is_half_second_derivative() {
        let l = C::new(-0.7, 0.2);
        let eps = 1e-9;
        let x = [l, l + eps, l - C::new(0.0, eps)];
        let t = 2.0;
        let d = exp_divided_differences(x, t);
        let expect0 = 0.5 * t * t * (l * t).exp();
        assert!((d[0] - expect0).norm() < 1e-8);
        // (λ e^{λt})'' / 2 = (t + λ t²/2) e^{λt}
        let expect1 = (t + l * t * t / 2.0) * (l * t).exp();
        assert!((d[1] - expect1).norm() < 1e-8);
    }

    fn complete_homogeneous(x: [C; 3], k: usize) -> C {
        let mut s = C::new(0.0, 0.0);
        for i in 0..=k {
            for j in 0..=(k - i) {
                s += x[0].powi(i as i32) * x[1].powi(j as i32) * x[2].powi((k - i - j) as i32);
            }
        }
        s
    }

    #[test]
    fn stiff_spread_stays_accurate() {
        let x = [C::new(-0.5, 0.0), C::new(-1.4e2, 0.0), C::new(-1.3e4, 0.0)];
        for t in [0.1, 5.0] {
            let d = exp_divided_differences(x, t);
            let n = naive(x, t, 0);
            assert!((d[0] - n).norm() <= 1e-12 * n.norm(), "t={t}");
        }
        for t in [1e-7, 1e-6] {
            let d = exp_divided_differences(x, t);
            let mut series = C::new(0.0, 0.0);
            let mut fact = 2.0;
            for k in 0..6 {
                series += complete_homogeneous(x, k) * t.powi(k as i32 + 2) / fact;
                fact *= (k + 3) as f64;
            }
            assert!((d[0] - series).norm() <= 1e-10 * series.norm(), "t={t}");
        }
    }

    #[test]
    fn initial_values() {
        let x = [C::new(-0.1, 2.0), C::new(-0.1, -2.0), C::new(-0.01, 0.0)];
        let d = exp_divided_differences(x, 0.0);
        assert_eq!(d[2], C::new(1.0, 0.0));
        let d = exp_divided_differences(x, 1e-12);
        assert!((d[0].re - 0.5e-24).abs() < 1e-36);
    }
}
