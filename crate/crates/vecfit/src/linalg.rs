use nalgebra::DMatrix;

pub(crate) struct Lstsq {
    pub x: DMatrix<f64>,
    /// Ratio of extreme singular values of the column-scaled system.
    pub condition: f64,
    pub rank: usize,
}

/// Least squares through SVD of the column-normalized matrix. Singular values
/// below `rcond · σ_max` are dropped, giving the minimum-norm solution.
pub(crate) fn lstsq(a: &DMatrix<f64>, b: &DMatrix<f64>, rcond: f64) -> Lstsq {
    let scale: Vec<f64> = a
        .column_iter()
        .map(|c| {
            let n = c.norm();
            if n > 0.0 {
                n
            } else {
                1.0
            }
        })
        .collect();
    let mut scaled = a.clone();
    for (j, s) in scale.iter().enumerate() {
        scaled.column_mut(j).unscale_mut(*s);
    }
    let svd = scaled.svd(true, true);
    let sv = &svd.singular_values;
    let smax = sv.max();
    let smin = sv.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    let cut = rcond * smax;
    let u = svd.u.as_ref().expect("u requested");
    let vt = svd.v_t.as_ref().expect("v_t requested");
    let mut utb = u.transpose() * b;
    let mut rank = 0;
    for (i, &s) in sv.iter().enumerate() {
        if s > cut && s > 0.0 {
            utb.row_mut(i).unscale_mut(s);
            rank += 1;
        } else {
            utb.row_mut(i).fill(0.0);
        }
    }
    let mut x = vt.transpose() * utb;
    for (j, s) in scale.iter().enumerate() {
        x.row_mut(j).unscale_mut(*s);
    }
    Lstsq { x, condition, rank }
}
