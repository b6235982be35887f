//! Central finite-difference verification of analytic gradients.

use super::{Gradients, ModelParams};

/// Max relative error per parameter block.
#[derive(Debug, Clone)]
pub struct GradCheckReport {
    pub blocks: Vec<(String, f64)>,
}

impl GradCheckReport {
    pub fn max_error(&self) -> f64 {
        self.blocks.iter().map(|(_, e)| *e).fold(0.0, f64::max)
    }

    pub fn block_error(&self, name: &str) -> Option<f64> {
        self.blocks.iter().find(|(n, _)| n == name).map(|(_, e)| *e)
    }
}

fn set_coord(params: &mut ModelParams, block_idx: usize, coord: usize, value: f64) {
    let mut idx = 0;
    params.for_each_block_mut(|_, data| {
        if idx == block_idx {
            data[coord] = value;
        }
        idx += 1;
    });
}

/// Compares `analytic` against central differences of `loss_fn` at the
/// current parameters, coordinate by coordinate. The loss must be
/// deterministic (dropout, noise, and clipping disabled). At most
/// `max_coords_per_block` evenly spaced coordinates are probed per
/// block (0 means all). Relative error per coordinate is
/// |a - n| / max(|a|, |n|, 1e-8).
pub fn gradient_check(
    params: &mut ModelParams,
    analytic: &Gradients,
    mut loss_fn: impl FnMut(&ModelParams) -> f64,
    eps: f64,
    max_coords_per_block: usize,
) -> GradCheckReport {
    let names: Vec<String> = params.blocks().iter().map(|(n, _)| n.to_string()).collect();
    let analytic_blocks: Vec<Vec<f64>> =
        analytic.blocks().iter().map(|(_, d)| d.to_vec()).collect();
    let mut report = Vec::with_capacity(names.len());
    for (bi, name) in names.iter().enumerate() {
        let len = analytic_blocks[bi].len();
        let stride = if max_coords_per_block == 0 || len <= max_coords_per_block {
            1
        } else {
            len.div_ceil(max_coords_per_block)
        };
        let mut max_err = 0.0f64;
        let mut k = 0;
        while k < len {
            let orig = params.blocks()[bi].1[k];
            set_coord(params, bi, k, orig + eps);
            let up = loss_fn(params);
            set_coord(params, bi, k, orig - eps);
            let down = loss_fn(params);
            set_coord(params, bi, k, orig);
            let numeric = (up - down) / (2.0 * eps);
            let a = analytic_blocks[bi][k];
            let err = (a - numeric).abs() / a.abs().max(numeric.abs()).max(1e-8);
            max_err = max_err.max(err);
            k += stride;
        }
        report.push((name.clone(), max_err));
    }
    GradCheckReport { blocks: report }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::neural::Hyperparams;

    #[test]
    fn linear_loss_agrees_to_machine_precision() {
        let h = Hyperparams {
            word_dim: 2,
            char_dim: 2,
            hidden_dim: 2,
            ..Hyperparams::default()
        };
        let mut params = ModelParams::zeros(&h, 4, 3);
        // loss = sum of tag_b; gradient is 1 for tag_b, 0 elsewhere
        let mut analytic = params.zeros_like();
        analytic.tag_b.iter_mut().for_each(|v| *v = 1.0);
        let report = gradient_check(
            &mut params,
            &analytic,
            |p| p.tag_b.iter().sum(),
            1e-4,
            0,
        );
        assert!(report.max_error() < 1e-9, "{:?}", report.blocks);
    }

    #[test]
    fn report_covers_every_block() {
        let h = Hyperparams {
            word_dim: 2,
            char_dim: 2,
            hidden_dim: 2,
            ..Hyperparams::default()
        };
        let mut params = ModelParams::zeros(&h, 4, 3);
        let analytic = params.zeros_like();
        let report = gradient_check(&mut params, &analytic, |_| 0.0, 1e-4, 1);
        let expected: Vec<&str> = params.blocks().iter().map(|(n, _)| *n).collect();
        let got: Vec<&str> = report.blocks.iter().map(|(n, _)| n.as_str()).collect();
        assert_eq!(expected, got);
    }
}
