//! Model checkpoints: a versioned text format carrying hyperparameters,
//! vocabulary, and every parameter block. Floats are stored as the hex
//! encoding of their IEEE 754 bits, so loading is bit-exact.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::vocab::Vocabulary;

use super::{Hyperparams, ModelParams};

const MAGIC: &str = "lowpos-checkpoint";
const VERSION: u32 = 1;

fn f64_hex(v: f64) -> String {
    format!("{:016x}", v.to_bits())
}

fn parse_f64_hex(s: &str) -> Result<f64> {
    u64::from_str_radix(s, 16)
        .map(f64::from_bits)
        .map_err(|_| Error::Checkpoint(format!("bad float encoding `{s}`")))
}

pub fn write_checkpoint(params: &ModelParams, h: &Hyperparams, vocab: &Vocabulary) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC} {VERSION}");
    let _ = writeln!(out, "word_dim {}", h.word_dim);
    let _ = writeln!(out, "char_dim {}", h.char_dim);
    let _ = writeln!(out, "hidden_dim {}", h.hidden_dim);
    let _ = writeln!(out, "char_dropout_rate {}", f64_hex(h.char_dropout_rate));
    let _ = writeln!(out, "word_noise_sigma {}", f64_hex(h.word_noise_sigma));
    let _ = writeln!(out, "learning_rate {}", f64_hex(h.learning_rate));
    let _ = writeln!(out, "min_epochs {}", h.min_epochs);
    let _ = writeln!(out, "max_epochs {}", h.max_epochs);
    let _ = writeln!(out, "patience {}", h.patience);
    let _ = writeln!(out, "seed {}", h.seed);
    let _ = writeln!(out, "words {}", vocab.word_count());
    for w in vocab.words() {
        let _ = writeln!(out, "{w}");
    }
    let _ = writeln!(out, "chars {}", vocab.char_count());
    for &c in vocab.chars() {
        let _ = writeln!(out, "{}", c as u32);
    }
    for (name, data) in params.blocks() {
        let _ = writeln!(out, "block {name} {}", data.len());
        let mut line = String::with_capacity(data.len() * 17);
        for (i, v) in data.iter().enumerate() {
            if i > 0 {
                line.push(' ');
            }
            line.push_str(&f64_hex(*v));
        }
        let _ = writeln!(out, "{line}");
    }
    let _ = writeln!(out, "end");
    out
}

struct LineReader<'a> {
    lines: std::str::Lines<'a>,
    lineno: usize,
}

impl<'a> LineReader<'a> {
    fn next(&mut self) -> Result<&'a str> {
        self.lineno += 1;
        self.lines
            .next()
            .ok_or_else(|| Error::Checkpoint("unexpected end of checkpoint".into()))
    }

    fn keyed(&mut self, key: &str) -> Result<&'a str> {
        let line = self.next()?;
        line.strip_prefix(key)
            .and_then(|rest| rest.strip_prefix(' '))
            .ok_or_else(|| Error::Checkpoint(format!("expected `{key}` at line {}", self.lineno)))
    }

    fn keyed_usize(&mut self, key: &str) -> Result<usize> {
        let v = self.keyed(key)?;
        v.parse()
            .map_err(|_| Error::Checkpoint(format!("bad integer `{v}` for `{key}`")))
    }
}

pub fn read_checkpoint(text: &str) -> Result<(ModelParams, Hyperparams, Vocabulary)> {
    let mut r = LineReader {
        lines: text.lines(),
        lineno: 0,
    };
    let header = r.next()?;
    if header != format!("{MAGIC} {VERSION}") {
        return Err(Error::Checkpoint(format!("unsupported header `{header}`")));
    }
    let word_dim = r.keyed_usize("word_dim")?;
    let char_dim = r.keyed_usize("char_dim")?;
    let hidden_dim = r.keyed_usize("hidden_dim")?;
    let char_dropout_rate = parse_f64_hex(r.keyed("char_dropout_rate")?)?;
    let word_noise_sigma = parse_f64_hex(r.keyed("word_noise_sigma")?)?;
    let learning_rate = parse_f64_hex(r.keyed("learning_rate")?)?;
    let min_epochs = r.keyed_usize("min_epochs")?;
    let max_epochs = r.keyed_usize("max_epochs")?;
    let patience = r.keyed_usize("patience")?;
    let seed: u64 = r
        .keyed("seed")?
        .parse()
        .map_err(|_| Error::Checkpoint("bad seed".into()))?;
    let h = Hyperparams {
        word_dim,
        char_dim,
        hidden_dim,
        char_dropout_rate,
        word_noise_sigma,
        learning_rate,
        min_epochs,
        max_epochs,
        patience,
        seed,
    };

    let word_count = r.keyed_usize("words")?;
    let words: Vec<String> = (0..word_count)
        .map(|_| r.next().map(str::to_string))
        .collect::<Result<_>>()?;
    let char_count = r.keyed_usize("chars")?;
    let chars: Vec<char> = (0..char_count)
        .map(|_| {
            let cp: u32 = r
                .next()?
                .parse()
                .map_err(|_| Error::Checkpoint("bad codepoint".into()))?;
            char::from_u32(cp).ok_or_else(|| Error::Checkpoint(format!("invalid codepoint {cp}")))
        })
        .collect::<Result<_>>()?;
    let vocab = Vocabulary::from_parts(words, chars);

    let mut params = ModelParams::zeros(&h, vocab.char_count(), vocab.word_count());
    let expected: Vec<(String, usize)> = params
        .blocks()
        .iter()
        .map(|(n, d)| (n.to_string(), d.len()))
        .collect();
    for (name, len) in &expected {
        let header = r.next()?;
        let mut parts = header.split(' ');
        match (parts.next(), parts.next(), parts.next()) {
            (Some("block"), Some(n), Some(l)) if n == name && l == &len.to_string() => {}
            _ => {
                return Err(Error::Checkpoint(format!(
                    "expected `block {name} {len}`, found `{header}`"
                )))
            }
        }
        let values = r.next()?;
        let parsed: Vec<f64> = values
            .split(' ')
            .map(parse_f64_hex)
            .collect::<Result<_>>()?;
        if parsed.len() != *len {
            return Err(Error::Checkpoint(format!(
                "block {name}: expected {len} values, found {}",
                parsed.len()
            )));
        }
        let mut idx = 0;
        params.for_each_block_mut(|n, data| {
            if n == name {
                data.copy_from_slice(&parsed);
            }
            idx += 1;
        });
    }
    if r.next()? != "end" {
        return Err(Error::Checkpoint("missing end marker".into()));
    }
    Ok((params, h, vocab))
}
