use skewlab::phasespace::{box_volume_points, minkowski_dimension, BoxGrid, PhasePoint};

fn deltas() -> Vec<f64> {
    (0..6).map(|i| 0.002 * 2f64.powi(i)).collect()
}

fn dimension(points: &[PhasePoint], deltas: &[f64]) -> f64 {
    let vols: Vec<f64> = deltas
        .iter()
        .map(|d| box_volume_points(points, *d, &BoxGrid::default()).unwrap())
        .collect();
    minkowski_dimension(deltas, &vols, 2).unwrap().dimension
}

#[test]
fn full_square() {
    let n = 600;
    let pts: Vec<PhasePoint> = (0..n * n)
        .map(|i| PhasePoint::new((i % n) as f64 / n as f64, (i / n) as f64 / (n - 1) as f64))
        .collect();
    let d = dimension(&pts, &deltas());
    assert!((d - 2.0).abs() <= 0.05, "{d}");
}

#[test]
fn line() {
    let pts: Vec<PhasePoint> = (0..2000).map(|i| PhasePoint::new(i as f64 / 2000.0, 0.0)).collect();
    let d = dimension(&pts, &deltas());
    assert!((d - 1.0).abs() <= 0.05, "{d}");
}

/// Middle-thirds Cantor set in `ξ` times the full circle in `x`.
#[test]
fn cantor_times_circle() {
    let level = 9;
    let mut ends = vec![0.0f64];
    let mut width = 1.0;
    for _ in 0..level {
        width /= 3.0;
        ends = ends.iter().flat_map(|a| [*a, a + 2.0 * width]).collect();
    }
    let cantor: Vec<f64> = ends.iter().flat_map(|a| [*a, a + width]).collect();
    let nx = 800;
    let pts: Vec<PhasePoint> = (0..nx)
        .flat_map(|i| {
            let x = i as f64 / nx as f64;
            cantor.iter().map(move |xi| PhasePoint::new(x, *xi))
        })
        .collect();
    let ds: Vec<f64> = (0..10).map(|i| 0.003 * 10f64.powf(i as f64 * 1.6 / 9.0)).collect();
    let d = dimension(&pts, &ds);
    let exact = 1.0 + 2f64.ln() / 3f64.ln();
    assert!((d - exact).abs() <= 0.05, "{d} vs {exact}");
}
