//! Internal numerical routines: exact floating-point summation, adaptive
//! quadrature, and the handful of special functions the library needs.

/// Exact sum of a slice of finite `f64` values, correctly rounded.
///
/// Tracks the running sum as a list of non-overlapping partials built from
/// two-sum error-free transformations, then rounds once at the end. The
/// result is the correctly rounded value of the exact real sum, so it does
/// not depend on the order of the inputs. Estimator sums rely on this for
/// bit-identical results under sample permutation.
pub fn exact_sum(values: &[f64]) -> f64 {
    let mut partials: Vec<f64> = Vec::new();
    for &v in values {
        let mut x = v;
        let mut i = 0;
        for j in 0..partials.len() {
            let mut y = partials[j];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                partials[i] = lo;
                i += 1;
            }
            x = hi;
        }
        partials.truncate(i);
        partials.push(x);
    }

    // Sum partials from largest to smallest with a round-half-even fixup,
    // as in the classic msum/fsum recipe.
    let mut n = partials.len();
    if n == 0 {
        return 0.0;
    }
    n -= 1;
    let mut hi = partials[n];
    let mut lo = 0.0;
    while n > 0 {
        n -= 1;
        let x = hi;
        let y = partials[n];
        hi = x + y;
        let yr = hi - x;
        lo = y - yr;
        if lo != 0.0 {
            break;
        }
    }
    if n > 0 && ((lo < 0.0 && partials[n - 1] < 0.0) || (lo > 0.0 && partials[n - 1] > 0.0)) {
        let y = lo * 2.0;
        let x = hi + y;
        if y == x - hi {
            hi = x;
        }
    }
    hi
}

// 7-point Gauss / 15-point Kronrod rule on [-1, 1] (QUADPACK constants).
const KRONROD_NODES: [f64; 8] = [
    0.991_455_371_120_813,
    0.949_107_912_342_759,
    0.864_864_423_359_769,
    0.741_531_185_599_394,
    0.586_087_235_467_691,
    0.405_845_151_377_397,
    0.207_784_955_007_898,
    0.0,
];
const KRONROD_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529,
    0.063_092_092_629_979,
    0.104_790_010_322_250,
    0.140_653_259_715_525,
    0.169_004_726_639_267,
    0.190_350_578_064_785,
    0.204_432_940_075_298,
    0.209_482_141_084_728,
];
const GAUSS_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_870,
    0.279_705_391_489_277,
    0.381_830_050_505_119,
    0.417_959_183_673_469,
];

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut kronrod = 0.0;
    let mut gauss = 0.0;
    for (i, &x) in KRONROD_NODES.iter().enumerate() {
        let fsum = if x == 0.0 {
            f(mid)
        } else {
            f(mid - half * x) + f(mid + half * x)
        };
        kronrod += KRONROD_WEIGHTS[i] * fsum;
        // Gauss nodes are the odd-indexed Kronrod nodes.
        if i % 2 == 1 {
            gauss += GAUSS_WEIGHTS[i / 2] * fsum;
        }
    }
    kronrod *= half;
    gauss *= half;
    (kronrod, (kronrod - gauss).abs())
}

/// Adaptive Gauss–Kronrod quadrature of `f` over `[a, b]` to absolute
/// tolerance `tol`, by interval bisection.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    fn recurse<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let (value, err) = gauss_kronrod(f, a, b);
        if err <= tol || depth >= 40 {
            return value;
        }
        let mid = 0.5 * (a + b);
        recurse(f, a, mid, 0.5 * tol, depth + 1) + recurse(f, mid, b, 0.5 * tol, depth + 1)
    }
    recurse(&f, a, b, tol, 0)
}

/// Gamma(d/2 + 1) for positive integer d, by the recurrence from
/// Gamma(1) = 1 and Gamma(1/2) = sqrt(pi). Exact in the range we use.
pub fn gamma_half_plus_one(d: usize) -> f64 {
    debug_assert!(d >= 1);
    if d % 2 == 0 {
        // (d/2)!
        (1..=d / 2).fold(1.0, |acc, i| acc * i as f64)
    } else {
        // Gamma(m + 1/2) for m = (d + 1)/2, via Gamma(x + 1) = x Gamma(x).
        let m = (d + 1) / 2;
        let mut value = std::f64::consts::PI.sqrt();
        for i in 0..m {
            value *= i as f64 + 0.5;
        }
        value
    }
}

/// Modified Bessel function of the first kind, order zero, by power series
/// with term-ratio stopping at 1e-16. Adequate for the concentration range
/// used here (kappa <= 20).
pub fn bessel_i0(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut m = 1.0;
    loop {
        term *= q / (m * m);
        sum += term;
        if term < 1e-16 * sum {
            return sum;
        }
        m += 1.0;
    }
}

/// Standard normal cumulative distribution function.
pub fn standard_normal_cdf(z: f64) -> f64 {
    0.5 * (1.0 + statrs::function::erf::erf(z / std::f64::consts::SQRT_2))
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Deterministic orthonormal pair completing the unit vector `mu` to a
/// right-handed frame (e1, e2, mu).
pub fn orthonormal_frame(mu: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    // Seed with the coordinate axis least aligned with mu.
    let seed = if mu[0].abs() <= mu[1].abs() && mu[0].abs() <= mu[2].abs() {
        [1.0, 0.0, 0.0]
    } else if mu[1].abs() <= mu[2].abs() {
        [0.0, 1.0, 0.0]
    } else {
        [0.0, 0.0, 1.0]
    };
    let raw = cross(mu, seed);
    let norm = (raw[0] * raw[0] + raw[1] * raw[1] + raw[2] * raw[2]).sqrt();
    let e1 = [raw[0] / norm, raw[1] / norm, raw[2] / norm];
    let e2 = cross(mu, e1);
    (e1, e2)
}

/// Orthogonal matrix (row-major) whose third column is `mu`; it carries the
/// z-axis onto `mu`.
pub fn rotation_from_z(mu: [f64; 3]) -> [[f64; 3]; 3] {
    let (e1, e2) = orthonormal_frame(mu);
    [
        [e1[0], e2[0], mu[0]],
        [e1[1], e2[1], mu[1]],
        [e1[2], e2[2], mu[2]],
    ]
}

/// Apply a row-major 3x3 matrix to a vector.
pub fn mat_apply(m: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    [
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    ]
}
