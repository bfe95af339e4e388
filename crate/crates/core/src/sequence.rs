//! Observed sample sequences and their columnar text format.
//!
//! A sample is a point of `[0, 1]^k`. For classification data the last
//! coordinate encodes the label: `0` for `-1` and `1` for `+1`, so that the
//! label also lives in the unit interval and takes part in history
//! comparisons. The leading `k - 1` coordinates are the features.
//!
//! Text format: a header line `k N`, then one sample per line as `k`
//! whitespace-separated decimals, optionally followed by an integer latent
//! state (either on every line or on none).

use std::fmt::Write as _;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SampleSequence {
    k: usize,
    data: Vec<f64>,
    latent_states: Option<Vec<usize>>,
}

/// Maps a label in {-1, +1} to its unit-interval code.
#[inline]
pub fn encode_label(y: i8) -> f64 {
    if y >= 0 {
        1.0
    } else {
        0.0
    }
}

/// Inverse of [`encode_label`]; codes at or above one half read as `+1`.
#[inline]
pub fn decode_label(code: f64) -> i8 {
    if code >= 0.5 {
        1
    } else {
        -1
    }
}

impl SampleSequence {
    /// Builds a sequence from row-major data of `N * k` values.
    pub fn new(k: usize, data: Vec<f64>) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("sample dimension k must be at least 1"));
        }
        if data.len() % k != 0 {
            return Err(Error::invalid(format!(
                "data length {} is not a multiple of k = {k}",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::invalid(format!(
                "sample {} coordinate {} = {} lies outside [0, 1]",
                pos / k,
                pos % k,
                data[pos]
            )));
        }
        Ok(Self { k, data, latent_states: None })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let k = rows.first().map(Vec::len).unwrap_or(1);
        if let Some(r) = rows.iter().find(|r| r.len() != k) {
            return Err(Error::DimensionMismatch { expected: k, actual: r.len() });
        }
        Self::new(k, rows.concat())
    }

    pub fn with_latent_states(mut self, states: Vec<usize>) -> Result<Self> {
        if states.len() != self.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), actual: states.len() });
        }
        self.latent_states = Some(states);
        Ok(self)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.k
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn latent_states(&self) -> Option<&[usize]> {
        self.latent_states.as_deref()
    }

    /// Sample `i` (0-based).
    #[inline]
    pub fn sample(&self, i: usize) -> &[f64] {
        &self.data[i * self.k..(i + 1) * self.k]
    }

    /// Samples `start .. start + len` flattened oldest-first.
    #[inline]
    pub fn window(&self, start: usize, len: usize) -> &[f64] {
        &self.data[start * self.k..(start + len) * self.k]
    }

    /// The last `d` samples flattened oldest-first.
    pub fn last_history(&self, d: usize) -> Result<&[f64]> {
        if d > self.len() {
            return Err(Error::SequenceTooShort { needed: d, have: self.len() });
        }
        Ok(self.window(self.len() - d, d))
    }

    /// Feature part (all but the last coordinate) of sample `i`.
    #[inline]
    pub fn features(&self, i: usize) -> &[f64] {
        let s = self.sample(i);
        &s[..self.k - 1]
    }

    #[inline]
    pub fn label(&self, i: usize) -> i8 {
        decode_label(self.data[(i + 1) * self.k - 1])
    }

    /// Samples `from..` as a new sequence (latent states carried along).
    pub fn suffix(&self, from: usize) -> SampleSequence {
        self.slice(from, self.len())
    }

    /// Samples `..to` as a new sequence.
    pub fn prefix(&self, to: usize) -> SampleSequence {
        self.slice(0, to)
    }

    fn slice(&self, from: usize, to: usize) -> SampleSequence {
        let to = to.min(self.len());
        let from = from.min(to);
        SampleSequence {
            k: self.k,
            data: self.data[from * self.k..to * self.k].to_vec(),
            latent_states: self.latent_states.as_ref().map(|s| s[from..to].to_vec()),
        }
    }

    /// Serializes to the columnar text format.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.data.len() * 20);
        let _ = writeln!(out, "{} {}", self.k, self.len());
        for i in 0..self.len() {
            let row = self.sample(i);
            for (j, v) in row.iter().enumerate() {
                if j > 0 {
                    out.push(' ');
                }
                let _ = write!(out, "{v}");
            }
            if let Some(states) = &self.latent_states {
                let _ = write!(out, " {}", states[i]);
            }
            out.push('\n');
        }
        out
    }

    /// Parses the columnar text format.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (hline, header) =
            lines.next().ok_or(Error::Parse { line: 1, msg: "missing header".into() })?;
        let parse_err = |line, msg: String| Error::Parse { line, msg };
        let head: Vec<&str> = header.split_whitespace().collect();
        if head.len() != 2 {
            return Err(parse_err(hline, format!("header must be 'k N', got '{header}'")));
        }
        let k: usize = head[0].parse().map_err(|e| parse_err(hline, format!("bad k: {e}")))?;
        let n: usize = head[1].parse().map_err(|e| parse_err(hline, format!("bad N: {e}")))?;

        let mut data = Vec::with_capacity(n * k);
        let mut states = Vec::new();
        let mut has_state: Option<bool> = None;
        let mut rows = 0;
        for (line, body) in lines {
            let tokens: Vec<&str> = body.split_whitespace().collect();
            let with_state = match tokens.len() {
                t if t == k => false,
                t if t == k + 1 => true,
                t => return Err(parse_err(line, format!("expected {k} or {} fields, got {t}", k + 1))),
            };
            if *has_state.get_or_insert(with_state) != with_state {
                return Err(parse_err(line, "latent state column present on some lines only".into()));
            }
            for tok in &tokens[..k] {
                let v: f64 = tok.parse().map_err(|e| parse_err(line, format!("bad value '{tok}': {e}")))?;
                data.push(v);
            }
            if with_state {
                let s: usize = tokens[k]
                    .parse()
                    .map_err(|e| parse_err(line, format!("bad latent state '{}': {e}", tokens[k])))?;
                states.push(s);
            }
            rows += 1;
        }
        if rows != n {
            return Err(parse_err(hline, format!("header announces {n} samples, found {rows}")));
        }
        let seq = SampleSequence::new(k, data)?;
        if has_state == Some(true) {
            seq.with_latent_states(states)
        } else {
            Ok(seq)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_range() {
        assert!(SampleSequence::new(2, vec![0.0, 1.5]).is_err());
        assert!(SampleSequence::new(2, vec![0.0, 0.5, 0.1]).is_err());
        assert!(SampleSequence::new(0, vec![]).is_err());
    }

    #[test]
    fn windows_are_time_major() {
        let s = SampleSequence::from_rows(&[vec![0.1, 0.0], vec![0.2, 1.0], vec![0.3, 1.0]]).unwrap();
        assert_eq!(s.window(1, 2), &[0.2, 1.0, 0.3, 1.0]);
        assert_eq!(s.last_history(1).unwrap(), &[0.3, 1.0]);
        assert_eq!(s.features(0), &[0.1]);
        assert_eq!((s.label(0), s.label(1)), (-1, 1));
    }

    #[test]
    fn text_roundtrip_with_states() {
        let s = SampleSequence::from_rows(&[vec![0.125, 1.0], vec![1.0 / 3.0, 0.0]])
            .unwrap()
            .with_latent_states(vec![3, 0])
            .unwrap();
        let back = SampleSequence::from_text(&s.to_text()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn parse_errors_carry_lines() {
        assert!(matches!(SampleSequence::from_text(""), Err(Error::Parse { line: 1, .. })));
        let mixed = "1 2\n0.5 1\n0.5\n";
        assert!(matches!(SampleSequence::from_text(mixed), Err(Error::Parse { line: 3, .. })));
        let short = "1 3\n0.5\n0.5\n";
        assert!(SampleSequence::from_text(short).is_err());
    }
}
