//! Least-squares fit of `S(A) = alpha |∂A| - gamma`.

use super::StateBackend;
use crate::error::{Error, Result};
use crate::lattice::{is_disk, Region};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AreaPoint {
    pub boundary: usize,
    pub entropy: f64,
    pub deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AreaLawFit {
    /// Bits per boundary edge.
    pub alpha: f64,
    /// Constant correction in bits.
    pub gamma: f64,
    /// Largest absolute deviation from the fitted line.
    pub residual: f64,
    pub points: Vec<AreaPoint>,
}

impl AreaLawFit {
    /// Indices of regions deviating from the line by more than `tol`.
    pub fn outliers(&self, tol: f64) -> Vec<usize> {
        (0..self.points.len()).filter(|&i| self.points[i].deviation.abs() > tol).collect()
    }
}

/// Fit over disks with at least two distinct boundary lengths.
pub fn fit_area_law(backend: &StateBackend, regions: &[Region]) -> Result<AreaLawFit> {
    if regions.iter().any(|r| !is_disk(r)) {
        return Err(Error::Precondition("area-law fit takes disks only".into()));
    }
    let xs: Vec<f64> = regions.iter().map(|r| r.boundary_len() as f64).collect();
    let ys: Vec<f64> = regions.iter().map(|r| backend.entropy(r)).collect::<Result<_>>()?;
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Precondition("area-law fit needs two distinct boundary lengths".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let alpha = sxy / sxx;
    let gamma = alpha * mx - my;
    let points: Vec<AreaPoint> = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| AreaPoint { boundary: *x as usize, entropy: *y, deviation: y - (alpha * x - gamma) })
        .collect();
    let residual = points.iter().map(|p| p.deviation.abs()).fold(0.0, f64::max);
    Ok(AreaLawFit { alpha, gamma, residual, points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{Extent, FaceCoord};
    use crate::stabilizer::product_state;

    #[test]
    fn product_state_is_flat() {
        let s = product_state(Extent::torus(8, 8), 1).unwrap();
        let b = StateBackend::stabilizer(&s);
        let regions: Vec<Region> = (0..3).map(|r| Region::ball(FaceCoord::new(3, 3), r)).collect();
        let fit = fit_area_law(&b, &regions).unwrap();
        assert_eq!((fit.alpha, fit.gamma, fit.residual), (0.0, 0.0, 0.0));
    }

    #[test]
    fn needs_two_lengths() {
        let s = product_state(Extent::torus(8, 8), 1).unwrap();
        let b = StateBackend::stabilizer(&s);
        let one = vec![Region::single(FaceCoord::new(1, 1)), Region::single(FaceCoord::new(2, 2))];
        assert!(fit_area_law(&b, &one).is_err());
    }
}
