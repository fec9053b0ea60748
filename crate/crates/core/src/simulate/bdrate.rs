//! Bjontegaard delta rate between two rate-distortion curves.
//!
//! Each curve's log-rate is fitted with a cubic polynomial in quality;
//! the fitted difference is integrated in closed form over the common
//! quality interval. The result is the average rate difference in
//! percent, negative when the test curve saves rate at equal quality.

use thiserror::Error;

use super::codec::RdPoint;

#[derive(Debug, Error, PartialEq)]
pub enum BdRateError {
    #[error("curve needs at least 4 points, got {0}")]
    TooFewPoints(usize),
    #[error("curve contains a non-finite rate or quality value")]
    NonFiniteValue,
    #[error("rates must be positive to take logarithms, got {0}")]
    NonPositiveRate(f64),
    #[error("curve contains duplicate quality value {0}")]
    DuplicateQuality(f64),
    #[error("quality ranges do not overlap")]
    NoQualityOverlap,
}

// Cubic polynomial in the centered variable (q - center).
struct CenteredCubic {
    center: f64,
    coeffs: [f64; 4],
}

impl CenteredCubic {
    fn integral(&self, lo: f64, hi: f64) -> f64 {
        let (a, b) = (lo - self.center, hi - self.center);
        let mut total = 0.0;
        for (k, &c) in self.coeffs.iter().enumerate() {
            let p = (k + 1) as f64;
            total += c / p * (b.powi(k as i32 + 1) - a.powi(k as i32 + 1));
        }
        total
    }
}

struct Curve {
    quality: Vec<f64>,
    log_rate: Vec<f64>,
}

impl Curve {
    fn prepare(points: &[RdPoint]) -> Result<Self, BdRateError> {
        if points.len() < 4 {
            return Err(BdRateError::TooFewPoints(points.len()));
        }
        for p in points {
            if !p.rate.is_finite() || !p.quality.is_finite() {
                return Err(BdRateError::NonFiniteValue);
            }
            if p.rate <= 0.0 {
                return Err(BdRateError::NonPositiveRate(p.rate));
            }
        }
        let mut sorted: Vec<RdPoint> = points.to_vec();
        sorted.sort_by(|a, b| a.quality.total_cmp(&b.quality));
        for pair in sorted.windows(2) {
            if pair[0].quality == pair[1].quality {
                return Err(BdRateError::DuplicateQuality(pair[0].quality));
            }
        }
        Ok(Self {
            quality: sorted.iter().map(|p| p.quality).collect(),
            log_rate: sorted.iter().map(|p| p.rate.ln()).collect(),
        })
    }

    fn min_quality(&self) -> f64 {
        self.quality[0]
    }

    fn max_quality(&self) -> f64 {
        *self.quality.last().unwrap()
    }

    // Least-squares cubic fit of log-rate against centered quality.
    fn fit(&self) -> CenteredCubic {
        let center = self.quality.iter().sum::<f64>() / self.quality.len() as f64;
        let mut moments = [0.0f64; 7];
        let mut rhs = [0.0f64; 4];
        for (&q, &y) in self.quality.iter().zip(&self.log_rate) {
            let t = q - center;
            let mut power = 1.0;
            for (k, m) in moments.iter_mut().enumerate() {
                *m += power;
                if k < 4 {
                    rhs[k] += power * y;
                }
                power *= t;
            }
        }
        let mut matrix = [[0.0f64; 4]; 4];
        for (i, row) in matrix.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = moments[i + j];
            }
        }
        let coeffs = solve4(matrix, rhs);
        CenteredCubic { center, coeffs }
    }
}

// Gaussian elimination with partial pivoting. The normal matrix of a
// cubic fit through >= 4 distinct abscissae is nonsingular, so the pivot
// cannot vanish for validated inputs.
fn solve4(mut m: [[f64; 4]; 4], mut rhs: [f64; 4]) -> [f64; 4] {
    for col in 0..4 {
        let pivot = (col..4)
            .max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))
            .unwrap();
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in col + 1..4 {
            let factor = m[row][col] / m[col][col];
            for k in col..4 {
                m[row][k] -= factor * m[col][k];
            }
            rhs[row] -= factor * rhs[col];
        }
    }
    let mut x = [0.0f64; 4];
    for row in (0..4).rev() {
        let mut acc = rhs[row];
        for k in row + 1..4 {
            acc -= m[row][k] * x[k];
        }
        x[row] = acc / m[row][row];
    }
    x
}

/// Average rate difference of `test` against `anchor` in percent over the
/// overlapping quality range. Points may be given in any order; each
/// curve needs at least four points with distinct quality values.
pub fn bd_rate(anchor: &[RdPoint], test: &[RdPoint]) -> Result<f64, BdRateError> {
    let anchor = Curve::prepare(anchor)?;
    let test = Curve::prepare(test)?;

    let lo = anchor.min_quality().max(test.min_quality());
    let hi = anchor.max_quality().min(test.max_quality());
    if !(lo < hi) {
        return Err(BdRateError::NoQualityOverlap);
    }

    let fit_anchor = anchor.fit();
    let fit_test = test.fit();
    let mean_diff = (fit_test.integral(lo, hi) - fit_anchor.integral(lo, hi)) / (hi - lo);
    Ok(100.0 * (mean_diff.exp() - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point(rate: f64, quality: f64) -> RdPoint {
        RdPoint { rate, quality }
    }

    fn ladder(rates: &[f64], qualities: &[f64]) -> Vec<RdPoint> {
        rates
            .iter()
            .zip(qualities)
            .map(|(&r, &q)| point(r, q))
            .collect()
    }

    #[test]
    fn identical_curves_give_zero() {
        let curve = ladder(&[1000.0, 2200.0, 4100.0, 9000.0], &[32.0, 35.0, 38.0, 41.0]);
        let d = bd_rate(&curve, &curve).unwrap();
        assert!(d.abs() < 1e-9, "got {d}");
    }

    #[test]
    fn doubled_rate_gives_plus_hundred_percent() {
        let anchor = ladder(&[800.0, 1700.0, 3900.0, 8100.0], &[31.0, 34.5, 38.0, 41.5]);
        let test: Vec<RdPoint> = anchor
            .iter()
            .map(|p| point(p.rate * 2.0, p.quality))
            .collect();
        let d = bd_rate(&anchor, &test).unwrap();
        assert!((d - 100.0).abs() < 1e-6, "got {d}");
        let back = bd_rate(&test, &anchor).unwrap();
        assert!((back + 50.0).abs() < 1e-6, "got {back}");
    }

    #[test]
    fn matches_trapezoid_oracle() {
        // Distinct monotone synthetic curves with offset quality grids.
        let anchor = ladder(
            &[900.0, 2100.0, 4600.0, 9800.0, 20000.0],
            &[30.0, 33.0, 36.5, 40.0, 43.0],
        );
        let test = ladder(
            &[700.0, 1600.0, 3400.0, 7600.0],
            &[30.5, 34.0, 37.5, 41.0],
        );
        let fast = bd_rate(&anchor, &test).unwrap();

        // Oracle: same fits, but the integral is evaluated by trapezoid
        // quadrature on a dense grid instead of in closed form.
        let a = Curve::prepare(&anchor).unwrap().fit();
        let t = Curve::prepare(&test).unwrap().fit();
        // Common quality interval of the two ladders above.
        let (lo, hi) = (30.5f64, 41.0f64);
        let samples = 10_000usize;
        let step = (hi - lo) / samples as f64;
        let eval = |c: &CenteredCubic, q: f64| {
            let x = q - c.center;
            c.coeffs[0] + c.coeffs[1] * x + c.coeffs[2] * x * x + c.coeffs[3] * x * x * x
        };
        let mut integral = 0.0;
        for k in 0..samples {
            let q0 = lo + step * k as f64;
            let q1 = q0 + step;
            let d0 = eval(&t, q0) - eval(&a, q0);
            let d1 = eval(&t, q1) - eval(&a, q1);
            integral += 0.5 * (d0 + d1) * step;
        }
        let slow = 100.0 * ((integral / (hi - lo)).exp() - 1.0);
        assert!(
            (fast - slow).abs() < 0.01 * fast.abs().max(1.0),
            "{fast} vs {slow}"
        );
    }

    #[test]
    fn roughly_antisymmetric() {
        let anchor = ladder(&[1000.0, 2000.0, 4000.0, 8000.0], &[32.0, 35.0, 38.0, 41.0]);
        let test = ladder(&[900.0, 1900.0, 3700.0, 7800.0], &[32.2, 35.1, 38.3, 41.2]);
        let fwd = bd_rate(&anchor, &test).unwrap();
        let rev = bd_rate(&test, &anchor).unwrap();
        // For small deltas the swapped result is the negation, up to the
        // interpolation tolerance.
        assert!((fwd + rev).abs() < 0.1, "fwd={fwd} rev={rev}");
        // Exact invariant at any magnitude: the two compose to no change.
        let product = (1.0 + fwd / 100.0) * (1.0 + rev / 100.0);
        assert!((product - 1.0).abs() < 1e-3, "fwd={fwd} rev={rev}");
    }

    #[test]
    fn accepts_unsorted_input() {
        let curve = ladder(&[4100.0, 1000.0, 9000.0, 2200.0], &[38.0, 32.0, 41.0, 35.0]);
        let sorted = ladder(&[1000.0, 2200.0, 4100.0, 9000.0], &[32.0, 35.0, 38.0, 41.0]);
        assert_eq!(bd_rate(&curve, &sorted).unwrap(), 0.0);
    }

    #[test]
    fn rejects_bad_curves() {
        let good = ladder(&[1000.0, 2000.0, 4000.0, 8000.0], &[32.0, 35.0, 38.0, 41.0]);
        let short = ladder(&[1000.0, 2000.0, 4000.0], &[32.0, 35.0, 38.0]);
        assert_eq!(bd_rate(&short, &good), Err(BdRateError::TooFewPoints(3)));

        let dup = ladder(&[1000.0, 2000.0, 4000.0, 8000.0], &[32.0, 32.0, 38.0, 41.0]);
        assert_eq!(
            bd_rate(&dup, &good),
            Err(BdRateError::DuplicateQuality(32.0))
        );

        let zero_rate = ladder(&[0.0, 2000.0, 4000.0, 8000.0], &[32.0, 35.0, 38.0, 41.0]);
        assert_eq!(
            bd_rate(&zero_rate, &good),
            Err(BdRateError::NonPositiveRate(0.0))
        );

        let inf = ladder(
            &[1000.0, 2000.0, 4000.0, 8000.0],
            &[32.0, 35.0, 38.0, f64::INFINITY],
        );
        assert_eq!(bd_rate(&inf, &good), Err(BdRateError::NonFiniteValue));

        let disjoint = ladder(&[1.0, 2.0, 4.0, 8.0], &[10.0, 12.0, 14.0, 16.0]);
        assert_eq!(
            bd_rate(&disjoint, &good),
            Err(BdRateError::NoQualityOverlap)
        );
    }
}
