use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::math::sqrt;

#[derive(Clone, Debug, PartialEq)]
pub struct MdsEmbedding {
    pub points: Vec<[f64; 2]>,
    /// Frobenius norm of the difference between embedded and input distances.
    pub reconstruction_error: f64,
}

/// Classical (Torgerson) scaling of a distance matrix into the plane.
pub fn mds_embed(d: &[Vec<f64>]) -> Result<MdsEmbedding> {
    let n = d.len();
    if n < 3 {
        return Err(Error::NotEnoughEntries { required: 3, actual: n });
    }
    for (i, row) in d.iter().enumerate() {
        if row.len() != n || row[i].abs() > 1e-12 {
            return Err(Error::NonSymmetric);
        }
        for j in 0..i {
            let (a, b) = (row[j], d[j][i]);
            if !a.is_finite() || (a - b).abs() > 1e-12 * a.abs().max(b.abs()).max(1.0) {
                return Err(Error::NonSymmetric);
            }
        }
    }
    let sq = DMatrix::from_fn(n, n, |i, j| {
        let v = 0.5 * (d[i][j] + d[j][i]);
        v * v
    });
    let row_mean: Vec<f64> = (0..n).map(|i| sq.row(i).sum() / n as f64).collect();
    let total = row_mean.iter().sum::<f64>() / n as f64;
    let b = DMatrix::from_fn(n, n, |i, j| -0.5 * (sq[(i, j)] - row_mean[i] - row_mean[j] + total));
    let eig = b.symmetric_eigen();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let mut points = alloc::vec![[0.0; 2]; n];
    for (axis, &e) in order.iter().take(2).enumerate() {
        let scale = sqrt(eig.eigenvalues[e].max(0.0));
        let col = eig.eigenvectors.column(e);
        let sign = col
            .iter()
            .find(|c| (*c * scale).abs() > 1e-12)
            .map_or(1.0, |c| if *c < 0.0 { -1.0 } else { 1.0 });
        for (i, p) in points.iter_mut().enumerate() {
            p[axis] = sign * col[i] * scale;
        }
    }

    let mut err = 0.0;
    for i in 0..n {
        for j in 0..n {
            let dx = points[i][0] - points[j][0];
            let dy = points[i][1] - points[j][1];
            let diff = sqrt(dx * dx + dy * dy) - d[i][j];
            err += diff * diff;
        }
    }
    Ok(MdsEmbedding {
        points,
        reconstruction_error: sqrt(err),
    })
}
