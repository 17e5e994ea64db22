//! Shared brute-force oracles, independent of the library's
//! piecewise-exact antiderivative path: every smooth piece is integrated
//! numerically (adaptive-refinement trapezoid with Richardson control),
//! and tails are carried as explicit windows.

#![allow(dead_code)]

/// A value with an explicit uncertainty window (tail midpoint + numeric
/// slack), suitable for interval-overlap comparisons against certified
/// brackets.
#[derive(Debug, Clone, Copy)]
pub struct OracleValue {
    pub value: f64,
    pub slack: f64,
}

/// Trapezoid refinement with Richardson extrapolation on a smooth piece.
fn trapezoid_richardson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let h = b - a;
    if h <= 0.0 {
        return (0.0, 0.0);
    }
    let mut n = 1usize;
    let mut t_prev = 0.5 * h * (f(a) + f(b));
    let mut r_prev = t_prev;
    for level in 0..14 {
        // midpoint refinement: T_{2n} from T_n
        let mut mid_sum = 0.0;
        let step = h / n as f64;
        for i in 0..n {
            mid_sum += f(a + (i as f64 + 0.5) * step);
        }
        let t_next = 0.5 * (t_prev + step * mid_sum);
        let r_next = (4.0 * t_next - t_prev) / 3.0;
        let delta = (r_next - r_prev).abs();
        if level >= 1 && delta <= tol {
            return (r_next, delta + f64::EPSILON * r_next.abs());
        }
        t_prev = t_next;
        r_prev = r_next;
        n *= 2;
    }
    (r_prev, (r_prev - t_prev).abs() + f64::EPSILON * r_prev.abs())
}

/// Brute-force `<rho_a, rho_b>`: integrate `{au}{bu}/u^2` between
/// consecutive sawtooth breakpoints by trapezoid/Richardson up to
/// `cutoff`, and report the tail `[0, 1/cutoff]` as a centered window.
pub fn oracle_inner_rho_rho(a: f64, b: f64, cutoff: f64) -> OracleValue {
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    let mut value = 0.0;
    let mut num_slack = 0.0;

    let mut m: u64 = 0;
    let mut n: u64 = 0;
    let mut next_a = 1.0 / a;
    let mut next_b = 1.0 / b;
    let mut u_prev = 0.0_f64;
    // Per-piece tolerance: split a global budget across the piece count.
    let est_pieces = ((a + b) * cutoff).max(16.0);
    let piece_tol = 1e-8 / est_pieces;

    while u_prev < cutoff {
        let u_next = next_a.min(next_b).min(cutoff);
        if u_next > u_prev {
            if m == 0 && n == 0 {
                value += a * b * (u_next - u_prev);
            } else {
                let (mf, nf) = (m as f64, n as f64);
                let f = |u: f64| (a * u - mf) * (b * u - nf) / (u * u);
                let (v, s) = trapezoid_richardson(&f, u_prev, u_next, piece_tol);
                value += v;
                num_slack += s;
            }
        }
        if u_next >= cutoff {
            break;
        }
        if next_a <= u_next {
            m += 1;
            next_a = (m + 1) as f64 / a;
        }
        if next_b <= u_next {
            n += 1;
            next_b = (n + 1) as f64 / b;
        }
        u_prev = u_next;
    }

    // True tail lies in [0, 1/cutoff]; center the window.
    let half_tail = 0.5 / cutoff;
    OracleValue { value: value + half_tail, slack: half_tail + num_slack }
}

/// Brute-force `<chi, rho_theta> = theta int_theta^inf {v} v^-2 dv`.
pub fn oracle_inner_chi_rho(theta: f64, cutoff: f64) -> OracleValue {
    let mut value = 0.0;
    let mut num_slack = 0.0;
    let mut v_prev = theta;
    let mut n = theta.floor();
    let piece_tol = 1e-9 / (cutoff - theta).max(16.0);
    while v_prev < cutoff {
        let v_next = (n + 1.0).min(cutoff);
        if v_next > v_prev {
            let nf = n;
            let f = |v: f64| (v - nf) / (v * v);
            let (v, s) = trapezoid_richardson(&f, v_prev, v_next, piece_tol);
            value += v;
            num_slack += s;
        }
        if v_next >= cutoff {
            break;
        }
        n += 1.0;
        v_prev = v_next;
    }
    let half_tail = 0.5 / cutoff;
    OracleValue {
        value: theta * (value + half_tail),
        slack: theta * (half_tail + num_slack),
    }
}

/// Welford-style mean and standard error of a sample.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Deterministic low-state PRNG for test point generation (independent of
/// the library's stream machinery).
pub struct TestRng(u64);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        TestRng(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        // splitmix64
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in (0, 1].
    pub fn unit(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 1.0) / (1u64 << 53) as f64
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }
}
