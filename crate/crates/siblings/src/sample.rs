//! Deterministic sample-point generation over a chart's sampling box.
//!
//! Halton sequences (bases 2, 3, 5, ...) give low-discrepancy coverage
//! without any RNG state, so two runs of the same configuration visit
//! byte-identical points.

use crate::geometry::Chart;

const PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

/// Radical-inverse of `index` in the given base.
pub fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let mut result = 0.0;
    let mut f = 1.0 / base as f64;
    while index > 0 {
        result += f * (index % base) as f64;
        index /= base;
        f /= base as f64;
    }
    result
}

/// First `count` Halton points mapped into the chart's sampling box
/// (indices start at 1 to avoid the origin corner).
pub fn halton_box(chart: &Chart, count: usize) -> Vec<Vec<f64>> {
    let n = chart.dim();
    assert!(n <= PRIMES.len(), "Halton bases exhausted for dim {n}");
    (1..=count as u64)
        .map(|idx| {
            (0..n)
                .map(|d| {
                    let u = radical_inverse(idx, PRIMES[d]);
                    chart.box_lo[d] + u * (chart.box_hi[d] - chart.box_lo[d])
                })
                .collect()
        })
        .collect()
}

/// Uniform interior grid with at least `count` points (k points per axis,
/// k = ceil(count^(1/n)), placed at cell midpoints).
pub fn grid_box(chart: &Chart, count: usize) -> Vec<Vec<f64>> {
    let n = chart.dim();
    let per_axis = (count as f64).powf(1.0 / n as f64).ceil().max(1.0) as usize;
    let mut points = Vec::new();
    let mut index = vec![0usize; n];
    loop {
        let p: Vec<f64> = (0..n)
            .map(|d| {
                let u = (index[d] as f64 + 0.5) / per_axis as f64;
                chart.box_lo[d] + u * (chart.box_hi[d] - chart.box_lo[d])
            })
            .collect();
        points.push(p);
        // odometer increment
        let mut d = 0;
        loop {
            index[d] += 1;
            if index[d] < per_axis {
                break;
            }
            index[d] = 0;
            d += 1;
            if d == n {
                return points;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radical_inverse_base_two() {
        assert_eq!(radical_inverse(1, 2), 0.5);
        assert_eq!(radical_inverse(2, 2), 0.25);
        assert_eq!(radical_inverse(3, 2), 0.75);
    }

    #[test]
    fn halton_points_stay_in_box_and_are_deterministic() {
        let chart = Chart::new(&["a", "b", "c"], vec![-2.0, 0.0, 1.0], vec![2.0, 1.0, 3.0]);
        let pts = halton_box(&chart, 100);
        assert_eq!(pts.len(), 100);
        for p in &pts {
            assert!(chart.contains(p));
        }
        assert_eq!(pts, halton_box(&chart, 100));
    }

    #[test]
    fn grid_covers_requested_count() {
        let chart = Chart::new(&["a", "b"], vec![0.0, 0.0], vec![1.0, 1.0]);
        let pts = grid_box(&chart, 10);
        assert!(pts.len() >= 10);
        for p in &pts {
            assert!(chart.contains(p));
        }
    }
}
