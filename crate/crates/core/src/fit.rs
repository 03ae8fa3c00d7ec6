//! Least-squares plane and conic fits used to classify trajectories.

use nalgebra::{DMatrix, Vector3};

/// Best-fit plane through a point cloud.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlaneFit {
    pub centroid: [f64; 3],
    /// Unit normal.
    pub normal: [f64; 3],
    /// Root mean square of the signed point-to-plane distances.
    pub rms: f64,
}

fn centroid(points: &[[f64; 3]]) -> Vector3<f64> {
    let sum = points.iter().fold(Vector3::zeros(), |acc, p| acc + Vector3::from(*p));
    sum / points.len() as f64
}

/// Smallest right singular vector of `m` (rows are observations).
fn null_direction(m: DMatrix<f64>) -> Option<Vec<f64>> {
    let cols = m.ncols();
    // pad so the thin SVD always yields a full set of right singular vectors
    let m = if m.nrows() < cols { m.resize_vertically(cols, 0.) } else { m };
    let svd = m.svd(false, true);
    let v_t = svd.v_t?;
    let imin = svd.singular_values.imin();
    Some(v_t.row(imin).iter().copied().collect())
}

/// Returns `None` for fewer than three points.
pub fn plane_fit(points: &[[f64; 3]]) -> Option<PlaneFit> {
    if points.len() < 3 {
        return None;
    }
    let c = centroid(points);
    let m = DMatrix::from_fn(points.len(), 3, |r, k| points[r][k] - c[k]);
    let n = null_direction(m)?;
    let normal = Vector3::new(n[0], n[1], n[2]).normalize();
    let ms = points.iter().map(|p| (Vector3::from(*p) - c).dot(&normal).powi(2)).sum::<f64>() / points.len() as f64;
    Some(PlaneFit { centroid: c.into(), normal: normal.into(), rms: ms.sqrt() })
}

/// Algebraic residual of the best conic through the projection of `points`
/// onto `plane`.
///
/// Points are centered and scaled to unit RMS radius; the residual is the RMS
/// of `[u², uv, v², u, v, 1]·w` for the unit coefficient vector `w`
/// minimizing it. Returns `None` for fewer than six points or a degenerate
/// cloud.
pub fn conic_residual(points: &[[f64; 3]], plane: &PlaneFit) -> Option<f64> {
    if points.len() < 6 {
        return None;
    }
    let n = Vector3::from(plane.normal);
    let helper = if n.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
    let e1 = n.cross(&helper).normalize();
    let e2 = n.cross(&e1);
    let c = Vector3::from(plane.centroid);
    let uv: Vec<(f64, f64)> = points
        .iter()
        .map(|p| {
            let d = Vector3::from(*p) - c;
            (d.dot(&e1), d.dot(&e2))
        })
        .collect();
    let radius = (uv.iter().map(|(u, v)| u * u + v * v).sum::<f64>() / uv.len() as f64).sqrt();
    if !(radius > 0.) {
        return None;
    }
    let row = |(u, v): (f64, f64)| {
        let (u, v) = (u / radius, v / radius);
        [u * u, u * v, v * v, u, v, 1.]
    };
    let m = DMatrix::from_fn(uv.len(), 6, |r, k| row(uv[r])[k]);
    let w = null_direction(m)?;
    let ms = uv
        .iter()
        .map(|&p| row(p).iter().zip(&w).map(|(a, b)| a * b).sum::<f64>().powi(2))
        .sum::<f64>()
        / uv.len() as f64;
    Some(ms.sqrt())
}

/// Spread of a curve around the z-axis: `(max |z − z̄|, max |r − r̄|)` where
/// `r` is the distance to the z-axis. Both vanish for horizontal circles
/// centered on the axis.
pub fn axial_circle_deviation(points: &[[f64; 3]]) -> Option<(f64, f64)> {
    if points.is_empty() {
        return None;
    }
    let n = points.len() as f64;
    let radii: Vec<f64> = points.iter().map(|p| p[0].hypot(p[1])).collect();
    let z_mean = points.iter().map(|p| p[2]).sum::<f64>() / n;
    let r_mean = radii.iter().sum::<f64>() / n;
    let dz = points.iter().fold(0., |m: f64, p| m.max((p[2] - z_mean).abs()));
    let dr = radii.iter().fold(0., |m: f64, r| m.max((r - r_mean).abs()));
    Some((dz, dr))
}
