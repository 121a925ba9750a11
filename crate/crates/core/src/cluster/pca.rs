use nalgebra::DMatrix;
use ndarray::{Array2, ArrayView2};

use crate::error::{Error, Result};

/// Two-dimensional principal-component projection.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection2d {
    /// `n × 2` scores of the mean-centred rows.
    pub coords: Array2<f64>,
    /// Unit principal axes, `2 × d`.
    pub components: Array2<f64>,
    /// Sample variance (denominator `n - 1`) along each axis.
    pub variances: [f64; 2],
}

/// Projects rows onto the top two principal components.
///
/// Each axis is oriented so that its largest-magnitude loading is positive.
pub fn pca_2d(data: ArrayView2<'_, f64>) -> Result<Projection2d> {
    let (n, d) = data.dim();
    if n < 2 || d < 2 {
        return Err(Error::InvalidArgument(format!(
            "PCA needs at least 2 rows and 2 columns, got {n}x{d}"
        )));
    }
    if data.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("non-finite input to PCA".into()));
    }
    let mean = data.mean_axis(ndarray::Axis(0)).expect("n >= 2");
    let centred = &data - &mean;
    let m = DMatrix::from_fn(n, d, |i, j| centred[[i, j]]);
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");

    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[b]
            .total_cmp(&svd.singular_values[a])
            .then(a.cmp(&b))
    });

    let mut components = Array2::zeros((2, d));
    let mut variances = [0.0; 2];
    for (slot, &idx) in order.iter().take(2).enumerate() {
        let axis: Vec<f64> = v_t.row(idx).iter().copied().collect();
        let pivot = axis
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()).then(b.0.cmp(&a.0)))
            .map(|(_, v)| *v)
            .unwrap_or(1.0);
        let sign = if pivot < 0.0 { -1.0 } else { 1.0 };
        for (j, v) in axis.iter().enumerate() {
            components[[slot, j]] = sign * v;
        }
        let s = svd.singular_values[idx];
        variances[slot] = s * s / (n - 1) as f64;
    }
    // fewer than two singular values only when min(n, d) < 2, excluded above
    let coords = centred.dot(&components.t());
    Ok(Projection2d {
        coords,
        components,
        variances,
    })
}
