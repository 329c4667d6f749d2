use ndarray::{s, Array1, Array2, ArrayView1, Axis};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{sym_eigh, sym_sqrt};

/// Relative threshold below which an eigenvalue counts as zero.
pub const RANK_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct DenseCov {
    matrix: Array2<f64>,
    eigvals: Array1<f64>,
    eigvecs: Array2<f64>,
    sqrt: Array2<f64>,
}

impl DenseCov {
    fn from_eigen(eigvals: Array1<f64>, eigvecs: Array2<f64>) -> Self {
        let mut scaled = eigvecs.clone();
        for (mut c, &l) in scaled.axis_iter_mut(Axis(1)).zip(eigvals.iter()) {
            c *= l;
        }
        let mut matrix = scaled.dot(&eigvecs.t());
        symmetrize(&mut matrix);
        let sqrt = sym_sqrt(&eigvals, &eigvecs);
        DenseCov { matrix, eigvals, eigvecs, sqrt }
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.matrix
    }

    /// Eigenvalues ascending, clamped at zero.
    pub fn eigvals(&self) -> &Array1<f64> {
        &self.eigvals
    }

    pub fn eigvecs(&self) -> &Array2<f64> {
        &self.eigvecs
    }

    pub fn sqrt(&self) -> &Array2<f64> {
        &self.sqrt
    }
}

fn symmetrize(m: &mut Array2<f64>) {
    let d = m.nrows();
    for i in 0..d {
        for j in 0..i {
            let v = 0.5 * (m[[i, j]] + m[[j, i]]);
            m[[i, j]] = v;
            m[[j, i]] = v;
        }
    }
}

/// Structured positive semidefinite covariance.
///
/// The spiked kind places the spikes on the first `s` coordinates and the
/// tail, with variance `tail_scale²`, on the remaining `tail_dim`.
#[derive(Clone, Debug)]
pub enum CovarianceSpec {
    Dense(DenseCov),
    Diagonal(Array1<f64>),
    Isotropic { dim: usize, scale: f64 },
    Spiked { spikes: Array1<f64>, tail_scale: f64, tail_dim: usize },
}

fn check_nonneg(name: &'static str, v: ArrayView1<f64>) -> Result<()> {
    if let Some(bad) = v.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
        return Err(Error::arg(name, format!("entries must be finite and nonnegative, found {bad}")));
    }
    Ok(())
}

impl CovarianceSpec {
    pub fn dense(matrix: Array2<f64>) -> Result<Self> {
        let (r, c) = matrix.dim();
        check_dim(r, c)?;
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::arg("matrix", "non-finite entry"));
        }
        let mut asym = 0.0f64;
        for i in 0..r {
            for j in 0..i {
                asym = asym.max((matrix[[i, j]] - matrix[[j, i]]).abs());
            }
        }
        if asym > 0.0 {
            return Err(Error::NotSymmetric { asym });
        }
        let (mut vals, vecs) = sym_eigh(&matrix)?;
        let top = vals.iter().cloned().fold(0.0, f64::max);
        let low = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        if r > 0 && low < -1e-10 * top.max(f64::MIN_POSITIVE) {
            return Err(Error::NotPsd { min_eig: low });
        }
        vals.mapv_inplace(|v| v.max(0.0));
        let sqrt = sym_sqrt(&vals, &vecs);
        Ok(CovarianceSpec::Dense(DenseCov { matrix, eigvals: vals, eigvecs: vecs, sqrt }))
    }

    pub fn diagonal(diag: Array1<f64>) -> Result<Self> {
        check_nonneg("diag", diag.view())?;
        Ok(CovarianceSpec::Diagonal(diag))
    }

    pub fn isotropic(dim: usize, scale: f64) -> Result<Self> {
        if !(scale.is_finite() && scale >= 0.0) {
            return Err(Error::arg("scale", format!("must be finite and nonnegative, got {scale}")));
        }
        Ok(CovarianceSpec::Isotropic { dim, scale })
    }

    pub fn identity(dim: usize) -> Self {
        CovarianceSpec::Isotropic { dim, scale: 1.0 }
    }

    pub fn spiked(spikes: Array1<f64>, tail_scale: f64, tail_dim: usize) -> Result<Self> {
        check_nonneg("spikes", spikes.view())?;
        if !(tail_scale.is_finite() && tail_scale >= 0.0) {
            return Err(Error::arg("tail_scale", format!("must be finite and nonnegative, got {tail_scale}")));
        }
        Ok(CovarianceSpec::Spiked { spikes, tail_scale, tail_dim })
    }

    pub fn dim(&self) -> usize {
        match self {
            CovarianceSpec::Dense(m) => m.matrix.nrows(),
            CovarianceSpec::Diagonal(v) => v.len(),
            CovarianceSpec::Isotropic { dim, .. } => *dim,
            CovarianceSpec::Spiked { spikes, tail_dim, .. } => spikes.len() + tail_dim,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CovarianceSpec::Dense(_) => "dense",
            CovarianceSpec::Diagonal(_) => "diagonal",
            CovarianceSpec::Isotropic { .. } => "isotropic",
            CovarianceSpec::Spiked { .. } => "spiked",
        }
    }

    /// Diagonal entries when the matrix is diagonal in the standard basis.
    pub fn as_diagonal(&self) -> Option<Array1<f64>> {
        match self {
            CovarianceSpec::Dense(_) => None,
            CovarianceSpec::Diagonal(v) => Some(v.clone()),
            CovarianceSpec::Isotropic { dim, scale } => Some(Array1::from_elem(*dim, *scale)),
            CovarianceSpec::Spiked { spikes, tail_scale, tail_dim } => {
                let mut v = Array1::from_elem(spikes.len() + tail_dim, tail_scale * tail_scale);
                v.slice_mut(s![..spikes.len()]).assign(spikes);
                Some(v)
            }
        }
    }

    pub fn diag_entries(&self) -> Array1<f64> {
        match self {
            CovarianceSpec::Dense(m) => m.matrix.diag().to_owned(),
            _ => self.as_diagonal().expect("diagonal kind"),
        }
    }

    pub fn max_diag(&self) -> f64 {
        match self {
            CovarianceSpec::Isotropic { scale, .. } => *scale,
            CovarianceSpec::Spiked { spikes, tail_scale, tail_dim } => {
                let tail = if *tail_dim > 0 { tail_scale * tail_scale } else { 0.0 };
                spikes.iter().cloned().fold(tail, f64::max)
            }
            _ => self.diag_entries().iter().cloned().fold(0.0, f64::max),
        }
    }

    pub fn trace(&self) -> f64 {
        match self {
            CovarianceSpec::Dense(m) => m.matrix.diag().sum(),
            CovarianceSpec::Diagonal(v) => v.sum(),
            CovarianceSpec::Isotropic { dim, scale } => *dim as f64 * scale,
            CovarianceSpec::Spiked { spikes, tail_scale, tail_dim } => {
                spikes.sum() + *tail_dim as f64 * tail_scale * tail_scale
            }
        }
    }

    /// Tr(Σ²).
    pub fn trace_sq(&self) -> f64 {
        match self {
            CovarianceSpec::Dense(m) => m.eigvals.iter().map(|l| l * l).sum(),
            CovarianceSpec::Diagonal(v) => v.iter().map(|l| l * l).sum(),
            CovarianceSpec::Isotropic { dim, scale } => *dim as f64 * scale * scale,
            CovarianceSpec::Spiked { spikes, tail_scale, tail_dim } => {
                spikes.iter().map(|l| l * l).sum::<f64>() + *tail_dim as f64 * tail_scale.powi(4)
            }
        }
    }

    pub fn op_norm(&self) -> f64 {
        match self {
            CovarianceSpec::Dense(m) => m.eigvals.iter().cloned().fold(0.0, f64::max),
            _ => self.max_diag(),
        }
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut v: Vec<f64> = match self {
            CovarianceSpec::Dense(m) => m.eigvals.to_vec(),
            _ => self.as_diagonal().expect("diagonal kind").to_vec(),
        };
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }

    pub fn min_eig(&self) -> f64 {
        match self {
            CovarianceSpec::Isotropic { dim, scale } => {
                if *dim > 0 {
                    *scale
                } else {
                    0.0
                }
            }
            _ => self.eigenvalues().last().cloned().unwrap_or(0.0),
        }
    }

    pub fn rank(&self) -> usize {
        let top = self.op_norm();
        if top <= 0.0 {
            return 0;
        }
        match self {
            CovarianceSpec::Isotropic { dim, .. } => *dim,
            CovarianceSpec::Spiked { spikes, tail_scale, tail_dim } => {
                let tail = if tail_scale * tail_scale > RANK_TOL * top { *tail_dim } else { 0 };
                spikes.iter().filter(|&&l| l > RANK_TOL * top).count() + tail
            }
            _ => self.eigenvalues().iter().filter(|&&l| l > RANK_TOL * top).count(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.op_norm() == 0.0
    }

    /// Σv.
    pub fn apply(&self, v: ArrayView1<f64>) -> Result<Array1<f64>> {
        check_dim(self.dim(), v.len())?;
        Ok(match self {
            CovarianceSpec::Dense(m) => m.matrix.dot(&v),
            CovarianceSpec::Isotropic { scale, .. } => v.to_owned() * *scale,
            _ => self.as_diagonal().expect("diagonal kind") * v,
        })
    }

    /// Σ^{1/2}v.
    pub fn sqrt_apply(&self, v: ArrayView1<f64>) -> Result<Array1<f64>> {
        check_dim(self.dim(), v.len())?;
        Ok(match self {
            CovarianceSpec::Dense(m) => m.sqrt.dot(&v),
            CovarianceSpec::Isotropic { scale, .. } => v.to_owned() * scale.sqrt(),
            _ => self.as_diagonal().expect("diagonal kind").mapv(f64::sqrt) * v,
        })
    }

    /// vᵀΣv.
    pub fn quad_form(&self, v: ArrayView1<f64>) -> Result<f64> {
        check_dim(self.dim(), v.len())?;
        Ok(match self {
            CovarianceSpec::Dense(m) => v.dot(&m.matrix.dot(&v)),
            CovarianceSpec::Diagonal(d) => d.iter().zip(v.iter()).map(|(a, x)| a * x * x).sum(),
            CovarianceSpec::Isotropic { scale, .. } => scale * v.dot(&v),
            CovarianceSpec::Spiked { spikes, tail_scale, .. } => {
                let s = spikes.len();
                let head: f64 = spikes.iter().zip(v.iter()).map(|(a, x)| a * x * x).sum();
                let tail = v.slice(s![s..]);
                head + tail_scale * tail_scale * tail.dot(&tail)
            }
        })
    }

    /// Maps rows of standard normals to rows distributed N(0, Σ), in place.
    pub fn color_rows(&self, z: &mut Array2<f64>) -> Result<()> {
        check_dim(self.dim(), z.ncols())?;
        match self {
            CovarianceSpec::Dense(m) => {
                let x = z.dot(&m.sqrt);
                z.assign(&x);
            }
            CovarianceSpec::Isotropic { scale, .. } => {
                if *scale != 1.0 {
                    let sc = scale.sqrt();
                    z.mapv_inplace(|v| v * sc);
                }
            }
            _ => {
                let sd = self.as_diagonal().expect("diagonal kind").mapv(f64::sqrt);
                for mut row in z.axis_iter_mut(Axis(0)) {
                    row *= &sd;
                }
            }
        }
        Ok(())
    }

    pub fn to_dense(&self) -> Array2<f64> {
        match self {
            CovarianceSpec::Dense(m) => m.matrix.clone(),
            _ => Array2::from_diag(&self.as_diagonal().expect("diagonal kind")),
        }
    }

    /// Σ = Σ₁ ⊕ Σ₂ with Σ₁ the projection onto the top-k eigenspace.
    /// Ties among equal eigenvalues go to the lower coordinate index.
    pub fn split(&self, k: usize) -> Result<CovSplit> {
        let d = self.dim();
        if k > d {
            return Err(Error::arg("k", format!("split rank {k} exceeds dimension {d}")));
        }
        let (sigma1, sigma2) = match self {
            CovarianceSpec::Dense(m) => {
                let cut = d - k;
                let split_part = |range: std::ops::Range<usize>| {
                    let mut vals = m.eigvals.clone();
                    for (i, v) in vals.iter_mut().enumerate() {
                        if !range.contains(&i) {
                            *v = 0.0;
                        }
                    }
                    CovarianceSpec::Dense(DenseCov::from_eigen(vals, m.eigvecs.clone()))
                };
                (split_part(cut..d), split_part(0..cut))
            }
            CovarianceSpec::Isotropic { dim, scale } if k == 0 || k == *dim => {
                let zero = CovarianceSpec::Isotropic { dim: *dim, scale: 0.0 };
                if k == 0 {
                    (zero, self.clone())
                } else {
                    (self.clone(), zero)
                }
            }
            CovarianceSpec::Spiked { spikes, tail_scale, tail_dim }
                if spikes.iter().filter(|&&l| l >= tail_scale * tail_scale).count() >= k =>
            {
                let mut order: Vec<usize> = (0..spikes.len()).collect();
                order.sort_by(|&a, &b| spikes[b].total_cmp(&spikes[a]).then(a.cmp(&b)));
                let mut head = Array1::zeros(spikes.len());
                let mut rest = spikes.clone();
                for &i in &order[..k] {
                    head[i] = spikes[i];
                    rest[i] = 0.0;
                }
                (
                    CovarianceSpec::Spiked { spikes: head, tail_scale: 0.0, tail_dim: *tail_dim },
                    CovarianceSpec::Spiked { spikes: rest, tail_scale: *tail_scale, tail_dim: *tail_dim },
                )
            }
            _ => {
                let diag = self.as_diagonal().expect("diagonal kind");
                let mut order: Vec<usize> = (0..d).collect();
                order.sort_by(|&a, &b| diag[b].total_cmp(&diag[a]).then(a.cmp(&b)));
                let mut head = Array1::zeros(d);
                let mut rest = diag.clone();
                for &i in &order[..k] {
                    head[i] = diag[i];
                    rest[i] = 0.0;
                }
                (CovarianceSpec::Diagonal(head), CovarianceSpec::Diagonal(rest))
            }
        };
        let rank1 = sigma1.rank();
        Ok(CovSplit { sigma1, sigma2, rank1 })
    }
}

/// Orthogonal decomposition Σ = Σ₁ + Σ₂.
#[derive(Clone, Debug)]
pub struct CovSplit {
    pub sigma1: CovarianceSpec,
    pub sigma2: CovarianceSpec,
    pub rank1: usize,
}

/// Effective ranks (r, R) = (Tr Σ / ‖Σ‖, (Tr Σ)² / Tr Σ²).
pub fn effective_ranks(cov: &CovarianceSpec) -> Result<(f64, f64)> {
    let op = cov.op_norm();
    if op <= 0.0 {
        return Err(Error::ZeroCovariance);
    }
    let tr = cov.trace();
    Ok((tr / op, tr * tr / cov.trace_sq()))
}

pub fn split_covariance(cov: &CovarianceSpec, k: usize) -> Result<CovSplit> {
    cov.split(k)
}
