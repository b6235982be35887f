//! The trainable model: hierarchical char/word bi-LSTM tagger, the
//! character seq2seq decoder sharing the char encoder, losses, exact
//! gradients, and the finite-difference oracle.

pub mod checkpoint;
pub mod gradcheck;
mod loss;
pub mod math;
mod model;

pub use gradcheck::{gradient_check, GradCheckReport};
pub use loss::{loss_autoencode, loss_tagging_ambiguous, loss_tagging_masked};
pub use model::{
    char_encode, classify, decode_chars, decode_greedy, joint_step, predict_tags,
    word_context_encode, AuxItem, LogFreqItem, LossParts, Mode, TaggingItem,
};

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::dict::EmbeddingTable;
use crate::error::{Error, Result};
use crate::tags::NUM_TAGS;
use crate::vocab::Vocabulary;
use math::{LstmParams, Mat};

/// Bucket count for the log-frequency auxiliary head. int(ln f) for any
/// realistic corpus frequency fits well below this.
pub const LOGFREQ_BUCKETS: usize = 24;

/// Training configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Hyperparams {
    pub word_dim: usize,
    pub char_dim: usize,
    pub hidden_dim: usize,
    pub char_dropout_rate: f64,
    pub word_noise_sigma: f64,
    pub learning_rate: f64,
    pub min_epochs: usize,
    pub max_epochs: usize,
    pub patience: usize,
    pub seed: u64,
}

impl Default for Hyperparams {
    fn default() -> Hyperparams {
        Hyperparams {
            word_dim: 64,
            char_dim: 100,
            hidden_dim: 100,
            char_dropout_rate: 0.25,
            word_noise_sigma: 0.2,
            learning_rate: 0.1,
            min_epochs: 15,
            max_epochs: 30,
            patience: 3,
            seed: 1,
        }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<()> {
        if self.word_dim == 0 || self.char_dim == 0 || self.hidden_dim == 0 {
            return Err(Error::Config("dimensions must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.char_dropout_rate) {
            return Err(Error::Config("char_dropout_rate must lie in [0,1]".into()));
        }
        if self.word_noise_sigma < 0.0 {
            return Err(Error::Config("word_noise_sigma must be nonnegative".into()));
        }
        if self.learning_rate <= 0.0 {
            return Err(Error::Config("learning_rate must be positive".into()));
        }
        Ok(())
    }
}

/// All trainable tensors. The char embedding and char-LSTM blocks are
/// shared storage between the tagging encoder and the seq2seq path.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub char_embed: Mat,
    pub char_fwd: LstmParams,
    pub char_bwd: LstmParams,
    pub word_embed: Mat,
    pub word_fwd: LstmParams,
    pub word_bwd: LstmParams,
    pub tag_w: Mat,
    pub tag_b: Vec<f64>,
    pub logfreq_w: Mat,
    pub logfreq_b: Vec<f64>,
    pub dec: LstmParams,
    pub dec_h0_w: Mat,
    pub dec_h0_b: Vec<f64>,
    pub dec_c0_w: Mat,
    pub dec_c0_b: Vec<f64>,
    pub out_w: Mat,
    pub out_b: Vec<f64>,
}

/// Gradients share the parameter catalog's shape block by block.
pub type Gradients = ModelParams;

impl ModelParams {
    /// All-zero catalog for the given dimensions.
    pub fn zeros(h: &Hyperparams, char_vocab: usize, word_vocab: usize) -> ModelParams {
        let hd = h.hidden_dim;
        ModelParams {
            char_embed: Mat::zeros(char_vocab, h.char_dim),
            char_fwd: LstmParams::zeros(h.char_dim, hd),
            char_bwd: LstmParams::zeros(h.char_dim, hd),
            word_embed: Mat::zeros(word_vocab, h.word_dim),
            word_fwd: LstmParams::zeros(h.word_dim + 2 * hd, hd),
            word_bwd: LstmParams::zeros(h.word_dim + 2 * hd, hd),
            tag_w: Mat::zeros(NUM_TAGS, 2 * hd),
            tag_b: vec![0.0; NUM_TAGS],
            logfreq_w: Mat::zeros(LOGFREQ_BUCKETS, 2 * hd),
            logfreq_b: vec![0.0; LOGFREQ_BUCKETS],
            dec: LstmParams::zeros(h.char_dim + 2 * hd, hd),
            dec_h0_w: Mat::zeros(hd, 2 * hd),
            dec_h0_b: vec![0.0; hd],
            dec_c0_w: Mat::zeros(hd, 2 * hd),
            dec_c0_b: vec![0.0; hd],
            out_w: Mat::zeros(char_vocab, hd),
            out_b: vec![0.0; char_vocab],
        }
    }

    pub fn zeros_like(&self) -> ModelParams {
        let mut g = self.clone();
        g.for_each_block_mut(|_, data| data.iter_mut().for_each(|v| *v = 0.0));
        g
    }

    pub fn hidden_dim(&self) -> usize {
        self.char_fwd.hidden_dim()
    }

    pub fn word_dim(&self) -> usize {
        self.word_embed.cols
    }

    pub fn char_dim(&self) -> usize {
        self.char_embed.cols
    }

    pub fn char_vocab(&self) -> usize {
        self.char_embed.rows
    }

    /// Named views of every parameter block, in a fixed order.
    pub fn blocks(&self) -> Vec<(&'static str, &[f64])> {
        vec![
            ("char_embed", &self.char_embed.data[..]),
            ("char_fwd.wx", &self.char_fwd.wx.data[..]),
            ("char_fwd.wh", &self.char_fwd.wh.data[..]),
            ("char_fwd.b", &self.char_fwd.b[..]),
            ("char_bwd.wx", &self.char_bwd.wx.data[..]),
            ("char_bwd.wh", &self.char_bwd.wh.data[..]),
            ("char_bwd.b", &self.char_bwd.b[..]),
            ("word_embed", &self.word_embed.data[..]),
            ("word_fwd.wx", &self.word_fwd.wx.data[..]),
            ("word_fwd.wh", &self.word_fwd.wh.data[..]),
            ("word_fwd.b", &self.word_fwd.b[..]),
            ("word_bwd.wx", &self.word_bwd.wx.data[..]),
            ("word_bwd.wh", &self.word_bwd.wh.data[..]),
            ("word_bwd.b", &self.word_bwd.b[..]),
            ("tag_w", &self.tag_w.data[..]),
            ("tag_b", &self.tag_b[..]),
            ("logfreq_w", &self.logfreq_w.data[..]),
            ("logfreq_b", &self.logfreq_b[..]),
            ("dec.wx", &self.dec.wx.data[..]),
            ("dec.wh", &self.dec.wh.data[..]),
            ("dec.b", &self.dec.b[..]),
            ("dec_h0_w", &self.dec_h0_w.data[..]),
            ("dec_h0_b", &self.dec_h0_b[..]),
            ("dec_c0_w", &self.dec_c0_w.data[..]),
            ("dec_c0_b", &self.dec_c0_b[..]),
            ("out_w", &self.out_w.data[..]),
            ("out_b", &self.out_b[..]),
        ]
    }

    pub fn for_each_block_mut(&mut self, mut f: impl FnMut(&'static str, &mut Vec<f64>)) {
        f("char_embed", &mut self.char_embed.data);
        f("char_fwd.wx", &mut self.char_fwd.wx.data);
        f("char_fwd.wh", &mut self.char_fwd.wh.data);
        f("char_fwd.b", &mut self.char_fwd.b);
        f("char_bwd.wx", &mut self.char_bwd.wx.data);
        f("char_bwd.wh", &mut self.char_bwd.wh.data);
        f("char_bwd.b", &mut self.char_bwd.b);
        f("word_embed", &mut self.word_embed.data);
        f("word_fwd.wx", &mut self.word_fwd.wx.data);
        f("word_fwd.wh", &mut self.word_fwd.wh.data);
        f("word_fwd.b", &mut self.word_fwd.b);
        f("word_bwd.wx", &mut self.word_bwd.wx.data);
        f("word_bwd.wh", &mut self.word_bwd.wh.data);
        f("word_bwd.b", &mut self.word_bwd.b);
        f("tag_w", &mut self.tag_w.data);
        f("tag_b", &mut self.tag_b);
        f("logfreq_w", &mut self.logfreq_w.data);
        f("logfreq_b", &mut self.logfreq_b);
        f("dec.wx", &mut self.dec.wx.data);
        f("dec.wh", &mut self.dec.wh.data);
        f("dec.b", &mut self.dec.b);
        f("dec_h0_w", &mut self.dec_h0_w.data);
        f("dec_h0_b", &mut self.dec_h0_b);
        f("dec_c0_w", &mut self.dec_c0_w.data);
        f("dec_c0_b", &mut self.dec_c0_b);
        f("out_w", &mut self.out_w.data);
        f("out_b", &mut self.out_b);
    }

    /// Global L2 norm over every block.
    pub fn global_norm(&self) -> f64 {
        self.blocks()
            .iter()
            .flat_map(|(_, data)| data.iter())
            .map(|v| v * v)
            .sum::<f64>()
            .sqrt()
    }

    /// Scales every gradient block so the global norm does not exceed
    /// `max_norm`.
    pub fn clip_global_norm(&mut self, max_norm: f64) {
        let norm = self.global_norm();
        if norm > max_norm {
            let scale = max_norm / norm;
            self.for_each_block_mut(|_, data| data.iter_mut().for_each(|v| *v *= scale));
        }
    }
}

/// Seeded uniform initialization in [-0.1, 0.1]; rows present in the
/// pretrained table are copied verbatim afterwards. Identical inputs
/// produce bit-identical catalogs.
pub fn init_params(
    h: &Hyperparams,
    vocab: &Vocabulary,
    pretrained: Option<&EmbeddingTable>,
) -> Result<ModelParams> {
    h.validate()?;
    if let Some(table) = pretrained {
        if table.dimension != h.word_dim {
            return Err(Error::Dimension(format!(
                "pretrained embeddings have dimension {}, expected word_dim {}",
                table.dimension, h.word_dim
            )));
        }
    }
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(h.seed);
    let mut params = ModelParams::zeros(h, vocab.char_count(), vocab.word_count());
    params.for_each_block_mut(|_, data| {
        for v in data.iter_mut() {
            *v = rng.gen_range(-0.1..0.1);
        }
    });
    if let Some(table) = pretrained {
        for (id, word) in vocab.words().iter().enumerate() {
            if let Some(vector) = table.get(word) {
                params.word_embed.row_mut(id).copy_from_slice(vector);
            }
        }
    }
    Ok(params)
}

/// Plain SGD: theta <- theta - lr * grad, elementwise.
pub fn sgd_update(params: &mut ModelParams, grads: &Gradients, learning_rate: f64) -> Result<()> {
    let mut mismatch = None;
    let shapes: Vec<(&'static str, usize)> =
        grads.blocks().iter().map(|(n, d)| (*n, d.len())).collect();
    let mut idx = 0;
    params.for_each_block_mut(|name, data| {
        let (gname, glen) = shapes[idx];
        if gname != name || glen != data.len() {
            mismatch = Some(format!("block {name}: expected {} values, found {glen}", data.len()));
        }
        idx += 1;
    });
    if let Some(msg) = mismatch {
        return Err(Error::Data(format!("gradient shape mismatch: {msg}")));
    }
    let grad_blocks: Vec<Vec<f64>> = grads.blocks().iter().map(|(_, d)| d.to_vec()).collect();
    let mut idx = 0;
    params.for_each_block_mut(|_, data| {
        for (p, g) in data.iter_mut().zip(&grad_blocks[idx]) {
            *p -= learning_rate * g;
        }
        idx += 1;
    });
    Ok(())
}
