//! Dense matrix/vector primitives and the LSTM cell with exact
//! backpropagation through time.

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Mat {
        Mat {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// y = A x
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.cols);
        let mut y = vec![0.0; self.rows];
        for r in 0..self.rows {
            let row = self.row(r);
            let mut acc = 0.0;
            for (a, b) in row.iter().zip(x) {
                acc += a * b;
            }
            y[r] = acc;
        }
        y
    }

    /// y += A x
    pub fn matvec_add(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.cols);
        debug_assert_eq!(y.len(), self.rows);
        for r in 0..self.rows {
            let row = self.row(r);
            let mut acc = 0.0;
            for (a, b) in row.iter().zip(x) {
                acc += a * b;
            }
            y[r] += acc;
        }
    }

    /// dx += A^T dy
    pub fn matvec_t_add(&self, dy: &[f64], dx: &mut [f64]) {
        debug_assert_eq!(dy.len(), self.rows);
        debug_assert_eq!(dx.len(), self.cols);
        for r in 0..self.rows {
            let row = self.row(r);
            let d = dy[r];
            if d == 0.0 {
                continue;
            }
            for (g, a) in dx.iter_mut().zip(row) {
                *g += d * a;
            }
        }
    }

    /// dA += dy x^T
    pub fn outer_add(&mut self, dy: &[f64], x: &[f64]) {
        debug_assert_eq!(dy.len(), self.rows);
        debug_assert_eq!(x.len(), self.cols);
        for r in 0..self.rows {
            let d = dy[r];
            if d == 0.0 {
                continue;
            }
            let row = self.row_mut(r);
            for (g, v) in row.iter_mut().zip(x) {
                *g += d * v;
            }
        }
    }
}

pub fn add_assign(dst: &mut [f64], src: &[f64]) {
    debug_assert_eq!(dst.len(), src.len());
    for (d, s) in dst.iter_mut().zip(src) {
        *d += s;
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Numerically stable softmax.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&l| (l - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// Stable log(softmax(logits)[idx]).
pub fn log_softmax_at(logits: &[f64], idx: usize) -> f64 {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lse: f64 = logits.iter().map(|&l| (l - max).exp()).sum::<f64>().ln() + max;
    logits[idx] - lse
}

/// One direction's LSTM parameters. Gate order inside the 4H dimension
/// is input, forget, cell (candidate), output.
#[derive(Debug, Clone, PartialEq)]
pub struct LstmParams {
    /// 4H x X
    pub wx: Mat,
    /// 4H x H
    pub wh: Mat,
    /// 4H
    pub b: Vec<f64>,
}

impl LstmParams {
    pub fn zeros(input_dim: usize, hidden_dim: usize) -> LstmParams {
        LstmParams {
            wx: Mat::zeros(4 * hidden_dim, input_dim),
            wh: Mat::zeros(4 * hidden_dim, hidden_dim),
            b: vec![0.0; 4 * hidden_dim],
        }
    }

    pub fn hidden_dim(&self) -> usize {
        self.b.len() / 4
    }
}

/// Forward activations kept for backpropagation.
#[derive(Debug, Clone)]
pub struct LstmCache {
    pub inputs: Vec<Vec<f64>>,
    /// Post-activation gates per step, 4H each (i, f, g, o).
    gates: Vec<Vec<f64>>,
    cells: Vec<Vec<f64>>,
    pub hiddens: Vec<Vec<f64>>,
    h0: Vec<f64>,
    c0: Vec<f64>,
}

impl LstmCache {
    pub fn last_hidden(&self) -> &[f64] {
        self.hiddens.last().expect("empty LSTM sequence")
    }

    pub fn last_cell(&self) -> &[f64] {
        self.cells.last().expect("empty LSTM sequence")
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }
}

/// Runs the LSTM over `inputs` from the given initial state.
pub fn lstm_forward(p: &LstmParams, h0: &[f64], c0: &[f64], inputs: Vec<Vec<f64>>) -> LstmCache {
    let hd = p.hidden_dim();
    debug_assert_eq!(h0.len(), hd);
    let mut gates = Vec::with_capacity(inputs.len());
    let mut cells = Vec::with_capacity(inputs.len());
    let mut hiddens = Vec::with_capacity(inputs.len());
    let mut h_prev = h0.to_vec();
    let mut c_prev = c0.to_vec();
    for x in &inputs {
        let mut pre = p.wx.matvec(x);
        p.wh.matvec_add(&h_prev, &mut pre);
        add_assign(&mut pre, &p.b);
        let mut gate = vec![0.0; 4 * hd];
        for j in 0..hd {
            gate[j] = sigmoid(pre[j]); // i
            gate[hd + j] = sigmoid(pre[hd + j]); // f
            gate[2 * hd + j] = pre[2 * hd + j].tanh(); // g
            gate[3 * hd + j] = sigmoid(pre[3 * hd + j]); // o
        }
        let mut c = vec![0.0; hd];
        let mut h = vec![0.0; hd];
        for j in 0..hd {
            c[j] = gate[hd + j] * c_prev[j] + gate[j] * gate[2 * hd + j];
            h[j] = gate[3 * hd + j] * c[j].tanh();
        }
        h_prev = h.clone();
        c_prev = c.clone();
        gates.push(gate);
        cells.push(c);
        hiddens.push(h);
    }
    LstmCache {
        inputs,
        gates,
        cells,
        hiddens,
        h0: h0.to_vec(),
        c0: c0.to_vec(),
    }
}

/// Gradients flowing out of [`lstm_backward`].
pub struct LstmBackward {
    pub d_inputs: Vec<Vec<f64>>,
    pub d_h0: Vec<f64>,
    pub d_c0: Vec<f64>,
}

/// Backpropagates through time. `d_hiddens` carries the externally
/// injected gradient on each step's hidden state; parameter gradients
/// accumulate into `grads`.
pub fn lstm_backward(
    p: &LstmParams,
    cache: &LstmCache,
    d_hiddens: &[Vec<f64>],
    grads: &mut LstmParams,
) -> LstmBackward {
    let hd = p.hidden_dim();
    let steps = cache.inputs.len();
    debug_assert_eq!(d_hiddens.len(), steps);
    let mut d_inputs = vec![Vec::new(); steps];
    let mut dh_next = vec![0.0; hd];
    let mut dc_next = vec![0.0; hd];
    for t in (0..steps).rev() {
        let gate = &cache.gates[t];
        let c = &cache.cells[t];
        let c_prev = if t == 0 { &cache.c0 } else { &cache.cells[t - 1] };
        let h_prev = if t == 0 { &cache.h0 } else { &cache.hiddens[t - 1] };

        let mut d_pre = vec![0.0; 4 * hd];
        let mut dc = vec![0.0; hd];
        for j in 0..hd {
            let dh = d_hiddens[t][j] + dh_next[j];
            let i = gate[j];
            let f = gate[hd + j];
            let g = gate[2 * hd + j];
            let o = gate[3 * hd + j];
            let tanh_c = c[j].tanh();
            let d_o = dh * tanh_c;
            dc[j] = dh * o * (1.0 - tanh_c * tanh_c) + dc_next[j];
            let d_i = dc[j] * g;
            let d_f = dc[j] * c_prev[j];
            let d_g = dc[j] * i;
            d_pre[j] = d_i * i * (1.0 - i);
            d_pre[hd + j] = d_f * f * (1.0 - f);
            d_pre[2 * hd + j] = d_g * (1.0 - g * g);
            d_pre[3 * hd + j] = d_o * o * (1.0 - o);
        }
        grads.wx.outer_add(&d_pre, &cache.inputs[t]);
        grads.wh.outer_add(&d_pre, h_prev);
        add_assign(&mut grads.b, &d_pre);

        let mut d_x = vec![0.0; p.wx.cols];
        p.wx.matvec_t_add(&d_pre, &mut d_x);
        d_inputs[t] = d_x;

        dh_next = vec![0.0; hd];
        p.wh.matvec_t_add(&d_pre, &mut dh_next);
        for j in 0..hd {
            dc_next[j] = dc[j] * gate[hd + j];
        }
    }
    LstmBackward {
        d_inputs,
        d_h0: dh_next,
        d_c0: dc_next,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_params_propagate_zero() {
        let p = LstmParams::zeros(3, 2);
        let cache = lstm_forward(&p, &[0.0; 2], &[0.0; 2], vec![vec![1.0, 2.0, 3.0]; 4]);
        for h in &cache.hiddens {
            assert_eq!(h, &vec![0.0; 2]);
        }
    }

    #[test]
    fn softmax_normalizes_and_shifts() {
        let p = softmax(&[1.0, 2.0, 3.0]);
        let q = softmax(&[11.0, 12.0, 13.0]);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for (a, b) in p.iter().zip(&q) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!((log_softmax_at(&[0.0; 17], 3) - (1.0f64 / 17.0).ln()).abs() < 1e-12);
    }

    /// BPTT against central finite differences on a random tiny LSTM.
    #[test]
    fn lstm_gradients_match_finite_differences() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let (x_dim, h_dim, steps) = (3, 2, 4);
        let mut p = LstmParams::zeros(x_dim, h_dim);
        for v in p
            .wx
            .data
            .iter_mut()
            .chain(p.wh.data.iter_mut())
            .chain(p.b.iter_mut())
        {
            *v = rng.gen_range(-0.5..0.5);
        }
        let inputs: Vec<Vec<f64>> = (0..steps)
            .map(|_| (0..x_dim).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        // loss = sum of all hidden states
        let loss = |p: &LstmParams| -> f64 {
            let cache = lstm_forward(p, &[0.0; 2], &[0.0; 2], inputs.clone());
            cache.hiddens.iter().flatten().sum()
        };
        let cache = lstm_forward(&p, &[0.0; 2], &[0.0; 2], inputs.clone());
        let d_h = vec![vec![1.0; h_dim]; steps];
        let mut grads = LstmParams::zeros(x_dim, h_dim);
        lstm_backward(&p, &cache, &d_h, &mut grads);

        fn coord(p: &mut LstmParams, k: usize) -> &mut f64 {
            let wx = p.wx.data.len();
            let wh = p.wh.data.len();
            if k < wx {
                &mut p.wx.data[k]
            } else if k < wx + wh {
                &mut p.wh.data[k - wx]
            } else {
                &mut p.b[k - wx - wh]
            }
        }

        let eps = 1e-5;
        let total = p.wx.data.len() + p.wh.data.len() + p.b.len();
        for k in 0..total {
            let analytic = *coord(&mut grads, k);
            let orig = *coord(&mut p, k);
            *coord(&mut p, k) = orig + eps;
            let up = loss(&p);
            *coord(&mut p, k) = orig - eps;
            let down = loss(&p);
            *coord(&mut p, k) = orig;
            let numeric = (up - down) / (2.0 * eps);
            let denom = analytic.abs().max(numeric.abs()).max(1e-8);
            assert!(
                ((analytic - numeric) / denom).abs() < 1e-6,
                "coord {k}: analytic {analytic} vs numeric {numeric}"
            );
        }
    }
}
