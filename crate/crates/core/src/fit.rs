//! Small least-squares helpers.

/// Least-squares line `y = intercept + slope * x`.
pub fn linear_fit(points: &[(f64, f64)]) -> Option<(f64, f64)> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Some((my - slope * mx, slope))
}

/// Slope of `log y` against `log x`; points must be positive.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    linear_fit(&logs).map(|(_, s)| s)
}

/// Root-mean-square residual of a log-log line fit.
pub fn loglog_residual(points: &[(f64, f64)], intercept: f64, slope: f64) -> f64 {
    let ss: f64 = points
        .iter()
        .map(|&(x, y)| (y.ln() - intercept - slope * x.ln()).powi(2))
        .sum();
    (ss / points.len() as f64).sqrt()
}
