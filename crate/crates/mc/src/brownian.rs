use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::evd::{self, ComputeEigenvectors};
use faer::linalg::matmul::matmul;
use faer::diag::Diag;
use faer::{c64, Accum, Mat, Par};
use rand::Rng;

use crate::gue::fill_gue;
use crate::McError;

/// Scratch space for one thread of Brownian motion sampling.
///
/// Everything runs with sequential kernels so that a sample depends only on
/// its random stream, never on thread scheduling.
pub struct Workspace {
    n: usize,
    increment: Mat<c64>,
    eigenvectors: Mat<c64>,
    eigenvalues: Diag<c64>,
    tmp: Mat<c64>,
    buffer: MemBuffer,
}

impl Workspace {
    pub fn new(n: usize) -> Self {
        let scratch = evd::self_adjoint_evd_scratch::<c64>(
            n,
            ComputeEigenvectors::Yes,
            Par::Seq,
            Default::default(),
        );
        Self {
            n,
            increment: Mat::zeros(n, n),
            eigenvectors: Mat::zeros(n, n),
            eigenvalues: Diag::zeros(n),
            tmp: Mat::zeros(n, n),
            buffer: MemBuffer::new(scratch),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Endpoint at time `t` of unitary Brownian motion started at the
    /// identity, by `steps` geometric Euler steps `h ← exp(iΔW) h` with GUE
    /// increments of variance `t/steps`. Each factor is the exponential of a
    /// Hermitian matrix taken through its eigendecomposition, so `h` stays
    /// unitary up to rounding.
    pub fn endpoint<R: Rng + ?Sized>(
        &mut self,
        t: f64,
        steps: usize,
        rng: &mut R,
    ) -> Result<Mat<c64>, McError> {
        let mut h = Mat::identity(self.n, self.n);
        if t == 0.0 {
            return Ok(h);
        }
        let steps = steps.max(1);
        let dt = t / steps as f64;
        for _ in 0..steps {
            self.step(&mut h, dt, rng)?;
        }
        Ok(h)
    }

    fn step<R: Rng + ?Sized>(&mut self, h: &mut Mat<c64>, dt: f64, rng: &mut R) -> Result<(), McError> {
        fill_gue(self.increment.as_mut(), dt, rng);
        evd::self_adjoint_evd(
            self.increment.as_ref(),
            self.eigenvalues.as_mut(),
            Some(self.eigenvectors.as_mut()),
            Par::Seq,
            MemStack::new(&mut self.buffer),
            Default::default(),
        )
        .map_err(|_| McError::NoConvergence)?;

        // h ← V diag(e^{iλ}) V* h
        let one = c64::new(1.0, 0.0);
        matmul(
            self.tmp.as_mut(),
            Accum::Replace,
            self.eigenvectors.adjoint(),
            h.as_ref(),
            one,
            Par::Seq,
        );
        for i in 0..self.n {
            let lambda = self.eigenvalues[i].re;
            let phase = c64::new(lambda.cos(), lambda.sin());
            for j in 0..self.n {
                self.tmp[(i, j)] *= phase;
            }
        }
        matmul(
            h.as_mut(),
            Accum::Replace,
            self.eigenvectors.as_ref(),
            self.tmp.as_ref(),
            one,
            Par::Seq,
        );
        Ok(())
    }
}

/// [`Workspace::endpoint`] with a throwaway workspace.
pub fn unitary_bm_endpoint<R: Rng + ?Sized>(
    n: usize,
    t: f64,
    steps: usize,
    rng: &mut R,
) -> Result<Mat<c64>, McError> {
    Workspace::new(n).endpoint(t, steps.max(1), rng)
}

/// `max |(h*h − I)_ij|`.
pub fn unitarity_defect(h: &Mat<c64>) -> f64 {
    let n = h.nrows();
    let mut product = Mat::<c64>::zeros(n, n);
    matmul(
        product.as_mut(),
        Accum::Replace,
        h.adjoint(),
        h.as_ref(),
        c64::new(1.0, 0.0),
        Par::Seq,
    );
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((product[(i, j)] - c64::new(target, 0.0)).norm());
        }
    }
    worst
}
