//! Encoder and decoder for symbol streams, with a self-describing container.
//!
//! Container layout (all integers big-endian):
//!
//! ```text
//! offset  size  field
//! 0       4     magic "ESCC" (0x45 0x53 0x43 0x43)
//! 4       1     version (0x01)
//! 5       1     alphabet size D
//! 6       8     symbol count
//! 14      4     codebook section length n
//! 18      n     codebook in its text form (`#D=..` header + `label<TAB>codeword`)
//! 18+n    ..    payload
//! ```
//!
//! For `D = 2` the payload packs 8 digits per byte, most significant bit
//! first, zero-padded at the end. For `D > 2` each digit takes one byte.
//! Decoding is bounded by the symbol count, so padding is never read as data.

use crate::coder::Codebook;
use crate::error::{Error, Result};

pub const MAGIC: [u8; 4] = *b"ESCC";
pub const VERSION: u8 = 1;
const HEADER_LEN: usize = 18;

/// An encoded symbol stream together with the codebook needed to decode it.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedStream {
    pub symbol_count: u64,
    pub codebook: Codebook,
    pub payload: Vec<u8>,
}

impl EncodedStream {
    pub fn alphabet_size(&self) -> u32 {
        self.codebook.alphabet_size()
    }

    /// Serializes to the container format.
    pub fn to_bytes(&self) -> Vec<u8> {
        let book = self.codebook.to_tsv();
        let mut out = Vec::with_capacity(HEADER_LEN + book.len() + self.payload.len());
        out.extend_from_slice(&MAGIC);
        out.push(VERSION);
        out.push(self.alphabet_size() as u8);
        out.extend_from_slice(&self.symbol_count.to_be_bytes());
        out.extend_from_slice(&(book.len() as u32).to_be_bytes());
        out.extend_from_slice(book.as_bytes());
        out.extend_from_slice(&self.payload);
        out
    }

    /// Parses a container. Only the structure is checked here; the payload
    /// is validated by [`decode`].
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN {
            return Err(Error::CorruptHeader(format!(
                "{} bytes is shorter than the {HEADER_LEN}-byte header",
                bytes.len()
            )));
        }
        if bytes[..4] != MAGIC {
            return Err(Error::CorruptHeader("bad magic".into()));
        }
        if bytes[4] != VERSION {
            return Err(Error::CorruptHeader(format!("unsupported version {}", bytes[4])));
        }
        let d = bytes[5] as u32;
        let symbol_count = u64::from_be_bytes(bytes[6..14].try_into().unwrap());
        let book_len = u32::from_be_bytes(bytes[14..18].try_into().unwrap()) as usize;
        let book_end = HEADER_LEN
            .checked_add(book_len)
            .filter(|&end| end <= bytes.len())
            .ok_or_else(|| Error::CorruptHeader("codebook section runs past end of stream".into()))?;
        let text = std::str::from_utf8(&bytes[HEADER_LEN..book_end])
            .map_err(|_| Error::CorruptHeader("codebook section is not UTF-8".into()))?;
        let codebook = Codebook::parse_tsv(text).map_err(|e| match e {
            Error::NonPrefixCodebook { .. } => e,
            other => Error::CorruptHeader(format!("codebook: {other}")),
        })?;
        if codebook.alphabet_size() != d {
            return Err(Error::CorruptHeader(format!(
                "alphabet size {d} disagrees with codebook ({})",
                codebook.alphabet_size()
            )));
        }
        if symbol_count > 0 && codebook.is_empty() {
            return Err(Error::CorruptHeader(format!(
                "{symbol_count} symbols declared but codebook is empty"
            )));
        }
        Ok(EncodedStream {
            symbol_count,
            codebook,
            payload: bytes[book_end..].to_vec(),
        })
    }
}

/// Number of code digits needed for `symbols` under `book`.
pub fn encoded_digit_count(symbols: &[usize], book: &Codebook) -> Result<u64> {
    symbols.iter().try_fold(0u64, |acc, &s| {
        book.codeword(s)
            .map(|w| acc + w.len() as u64)
            .ok_or(Error::UnknownSymbol(s))
    })
}

/// Concatenates the codewords of `symbols`.
pub fn encode(symbols: &[usize], book: &Codebook) -> Result<EncodedStream> {
    let digits = encoded_digit_count(symbols, book)?;
    let mut payload;
    if book.alphabet_size() == 2 {
        payload = Vec::with_capacity(digits.div_ceil(8) as usize);
        let mut acc = 0u8;
        let mut filled = 0;
        for &s in symbols {
            for &bit in book.codeword(s).expect("checked above") {
                acc = (acc << 1) | bit;
                filled += 1;
                if filled == 8 {
                    payload.push(acc);
                    acc = 0;
                    filled = 0;
                }
            }
        }
        if filled > 0 {
            payload.push(acc << (8 - filled));
        }
    } else {
        payload = Vec::with_capacity(digits as usize);
        for &s in symbols {
            payload.extend_from_slice(book.codeword(s).expect("checked above"));
        }
    }
    Ok(EncodedStream {
        symbol_count: symbols.len() as u64,
        codebook: book.clone(),
        payload,
    })
}

const NO_CHILD: u32 = u32::MAX;

/// Code tree for decoding; node 0 is the root.
struct Trie {
    d: usize,
    children: Vec<u32>,
    symbol: Vec<Option<usize>>,
}

impl Trie {
    fn new(book: &Codebook) -> Self {
        let d = book.alphabet_size() as usize;
        let mut trie = Trie {
            d,
            children: vec![NO_CHILD; d],
            symbol: vec![None],
        };
        for (s, word) in book.codewords().iter().enumerate() {
            let mut node = 0usize;
            for &digit in word {
                let slot = node * d + digit as usize;
                if trie.children[slot] == NO_CHILD {
                    trie.children[slot] = trie.symbol.len() as u32;
                    trie.symbol.push(None);
                    trie.children.extend(std::iter::repeat_n(NO_CHILD, d));
                }
                node = trie.children[slot] as usize;
            }
            trie.symbol[node] = Some(s);
        }
        trie
    }
}

/// Decodes exactly `symbol_count` symbols.
pub fn decode(stream: &EncodedStream) -> Result<Vec<usize>> {
    decode_counting(stream).map(|(symbols, _)| symbols)
}

/// Like [`decode`], also returning the number of code digits consumed.
pub fn decode_counting(stream: &EncodedStream) -> Result<(Vec<usize>, u64)> {
    let expected = stream.symbol_count;
    if expected == 0 {
        return Ok((Vec::new(), 0));
    }
    let book = &stream.codebook;
    if book.is_empty() {
        return Err(Error::CorruptHeader(
            "symbols declared but codebook is empty".into(),
        ));
    }
    let trie = Trie::new(book);
    let d = trie.d;
    let digits: Box<dyn Iterator<Item = u8> + '_> = if d == 2 {
        Box::new(
            stream
                .payload
                .iter()
                .flat_map(|&byte| (0..8).rev().map(move |k| (byte >> k) & 1)),
        )
    } else {
        Box::new(stream.payload.iter().copied())
    };

    // Every codeword has at least one digit, so the payload bounds the count.
    let capacity = expected.min(stream.payload.len() as u64 * 8) as usize;
    let mut out = Vec::with_capacity(capacity);
    let mut node = 0usize;
    let mut consumed = 0u64;
    for digit in digits {
        if digit as usize >= d {
            return Err(Error::CorruptPayload(format!(
                "digit {digit} at position {consumed} is outside alphabet of size {d}"
            )));
        }
        consumed += 1;
        let next = trie.children[node * d + digit as usize];
        if next == NO_CHILD {
            return Err(Error::CorruptPayload(format!(
                "no codeword matches the digits ending at position {}",
                consumed - 1
            )));
        }
        node = next as usize;
        if let Some(s) = trie.symbol[node] {
            out.push(s);
            node = 0;
            if out.len() as u64 == expected {
                return Ok((out, consumed));
            }
        }
    }
    Err(Error::DanglingBits {
        decoded: out.len() as u64,
        expected,
    })
}
