//! graph6 parsing and serialization, bit-exact per the published format.
//!
//! A record is `N(n) R(x)`: the node count in 6-bit chunks offset by 63,
//! followed by the upper triangle of the adjacency matrix read column by
//! column (`x_{0,1}, x_{0,2}, x_{1,2}, x_{0,3}, ...`), packed six bits per
//! printable byte. The optional `>>graph6<<` header is accepted. graph6
//! carries no colors; parsed graphs get color 0 everywhere.

use thiserror::Error;

use crate::graph::Graph;

const HEADER: &str = ">>graph6<<";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Graph6Error {
    #[error("malformed header at byte {offset}: expected `>>graph6<<`")]
    MalformedHeader { offset: usize },
    #[error("empty graph6 record")]
    Empty,
    #[error("byte {byte:#04x} at offset {offset} outside graph6 range 63..=126")]
    InvalidByte { offset: usize, byte: u8 },
    #[error("truncated node count at byte {offset}")]
    TruncatedNodeCount { offset: usize },
    #[error("truncated bit field at byte {offset}: need {expected} data bytes, found {found}")]
    TruncatedBits {
        offset: usize,
        expected: usize,
        found: usize,
    },
    #[error("trailing garbage at byte {offset}")]
    TrailingGarbage { offset: usize },
    #[error("padding bits at byte {offset} are not zero")]
    NonZeroPadding { offset: usize },
    #[error("node count {n} exceeds supported maximum {max}")]
    TooLarge { n: u64, max: u64 },
}

/// Largest node count we accept; far above anything this toolkit runs.
const MAX_N: u64 = 1 << 20;

/// Parses a single graph6 record. A trailing newline is tolerated;
/// anything else beyond the record is reported as trailing garbage
/// with its byte offset in the input.
pub fn parse_graph6(text: &str) -> Result<Graph, Graph6Error> {
    let bytes = text.as_bytes();
    let end = trim_trailing_newline(bytes);
    let mut pos = 0usize;

    if bytes[..end].starts_with(b">>") {
        if end >= HEADER.len() && &bytes[..HEADER.len()] == HEADER.as_bytes() {
            pos = HEADER.len();
        } else {
            return Err(Graph6Error::MalformedHeader { offset: 0 });
        }
    }
    if pos == end {
        return Err(Graph6Error::Empty);
    }

    let (n, mut pos) = parse_node_count(bytes, pos, end)?;
    if n > MAX_N {
        return Err(Graph6Error::TooLarge { n, max: MAX_N });
    }
    let n = n as usize;

    let bit_count = n * n.saturating_sub(1) / 2;
    let data_bytes = bit_count.div_ceil(6);
    let found = end - pos;
    if found < data_bytes {
        return Err(Graph6Error::TruncatedBits {
            offset: pos,
            expected: data_bytes,
            found,
        });
    }

    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut bit_index = 0usize;
    let mut pair_iter = UpperTrianglePairs::new(n);
    for k in 0..data_bytes {
        let byte = bytes[pos + k];
        if !(63..=126).contains(&byte) {
            return Err(Graph6Error::InvalidByte {
                offset: pos + k,
                byte,
            });
        }
        let chunk = byte - 63;
        for shift in (0..6).rev() {
            let bit = (chunk >> shift) & 1;
            if bit_index < bit_count {
                let (i, j) = pair_iter.next().expect("pair iterator matches bit count");
                if bit == 1 {
                    edges.push((i, j));
                }
            } else if bit == 1 {
                return Err(Graph6Error::NonZeroPadding { offset: pos + k });
            }
            bit_index += 1;
        }
    }
    pos += data_bytes;
    if pos != end {
        return Err(Graph6Error::TrailingGarbage { offset: pos });
    }

    Ok(Graph::new(n, &edges).expect("graph6 bits are structurally valid"))
}

/// Serializes to a graph6 record (no header, no newline). Colors are dropped;
/// graph6 has nowhere to put them.
pub fn to_graph6(g: &Graph) -> String {
    let n = g.node_count();
    let mut out: Vec<u8> = Vec::new();
    encode_node_count(n as u64, &mut out);

    let mut chunk = 0u8;
    let mut filled = 0u8;
    for (i, j) in UpperTrianglePairs::new(n) {
        chunk <<= 1;
        if g.has_edge(i, j) {
            chunk |= 1;
        }
        filled += 1;
        if filled == 6 {
            out.push(chunk + 63);
            chunk = 0;
            filled = 0;
        }
    }
    if filled > 0 {
        chunk <<= 6 - filled;
        out.push(chunk + 63);
    }
    String::from_utf8(out).expect("graph6 bytes are printable")
}

fn trim_trailing_newline(bytes: &[u8]) -> usize {
    let mut end = bytes.len();
    if end > 0 && bytes[end - 1] == b'\n' {
        end -= 1;
    }
    if end > 0 && bytes[end - 1] == b'\r' {
        end -= 1;
    }
    end
}

fn parse_node_count(bytes: &[u8], pos: usize, end: usize) -> Result<(u64, usize), Graph6Error> {
    let check = |off: usize| -> Result<u8, Graph6Error> {
        if off >= end {
            return Err(Graph6Error::TruncatedNodeCount { offset: off });
        }
        let b = bytes[off];
        if !(63..=126).contains(&b) {
            return Err(Graph6Error::InvalidByte {
                offset: off,
                byte: b,
            });
        }
        Ok(b)
    };
    let first = check(pos)?;
    if first != 126 {
        return Ok(((first - 63) as u64, pos + 1));
    }
    let second = check(pos + 1)?;
    if second != 126 {
        // 3-byte form: 18 bits, big-endian 6-bit chunks.
        let mut n = 0u64;
        for k in 0..3 {
            n = n << 6 | (check(pos + 1 + k)? - 63) as u64;
        }
        Ok((n, pos + 4))
    } else {
        // 6-byte form: 36 bits.
        let mut n = 0u64;
        for k in 0..6 {
            n = n << 6 | (check(pos + 2 + k)? - 63) as u64;
        }
        Ok((n, pos + 8))
    }
}

fn encode_node_count(n: u64, out: &mut Vec<u8>) {
    if n <= 62 {
        out.push(n as u8 + 63);
    } else if n <= 258047 {
        out.push(126);
        for shift in [12u32, 6, 0] {
            out.push(((n >> shift) & 63) as u8 + 63);
        }
    } else {
        out.push(126);
        out.push(126);
        for shift in [30u32, 24, 18, 12, 6, 0] {
            out.push(((n >> shift) & 63) as u8 + 63);
        }
    }
}

/// Upper-triangle pairs in graph6 bit order: for each column `j`,
/// rows `i < j` ascending.
struct UpperTrianglePairs {
    n: usize,
    i: usize,
    j: usize,
}

impl UpperTrianglePairs {
    fn new(n: usize) -> Self {
        UpperTrianglePairs { n, i: 0, j: 1 }
    }
}

impl Iterator for UpperTrianglePairs {
    type Item = (usize, usize);

    fn next(&mut self) -> Option<(usize, usize)> {
        if self.j >= self.n {
            return None;
        }
        let out = (self.i, self.j);
        self.i += 1;
        if self.i == self.j {
            self.i = 0;
            self.j += 1;
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_documented_record() {
        let g = parse_graph6("E?~o").unwrap();
        assert_eq!(g.node_count(), 6);
        // Round-trip identity.
        assert_eq!(parse_graph6(&to_graph6(&g)).unwrap(), g);
    }

    #[test]
    fn single_node_empty_graph() {
        let g = parse_graph6("@").unwrap();
        assert_eq!(g.node_count(), 1);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn c6_encodes_as_derived_by_hand_encoder() {
        // Independent encoder: write the 15 upper-triangle bits of C6 in
        // graph6 column order and pack them manually.
        let c6_edges = [(0usize, 1usize), (1, 2), (2, 3), (3, 4), (4, 5), (0, 5)];
        let mut bits = Vec::new();
        for j in 1..6 {
            for i in 0..j {
                let is_edge = c6_edges
                    .iter()
                    .any(|&(a, b)| (a, b) == (i, j) || (b, a) == (i, j));
                bits.push(u8::from(is_edge));
            }
        }
        while bits.len() % 6 != 0 {
            bits.push(0);
        }
        let mut expected = vec![6u8 + 63];
        for chunk in bits.chunks(6) {
            let mut val = 0u8;
            for &b in chunk {
                val = val << 1 | b;
            }
            expected.push(val + 63);
        }
        let expected = String::from_utf8(expected).unwrap();

        let g = Graph::new(6, &c6_edges).unwrap();
        assert_eq!(to_graph6(&g), expected);

        let parsed = parse_graph6(&expected).unwrap();
        assert_eq!(parsed.node_count(), 6);
        assert_eq!(parsed.edge_count(), 6);
        assert!((0..6).all(|v| parsed.degree(v) == 2));
        assert_eq!(parsed, g);
    }

    #[test]
    fn accepts_optional_header() {
        let g = parse_graph6(">>graph6<<E?~o").unwrap();
        assert_eq!(g.node_count(), 6);
    }

    #[test]
    fn rejects_bad_header() {
        assert_eq!(
            parse_graph6(">>graph5<<E?~o"),
            Err(Graph6Error::MalformedHeader { offset: 0 })
        );
    }

    #[test]
    fn rejects_truncated_bits() {
        assert_eq!(
            parse_graph6("E?~"),
            Err(Graph6Error::TruncatedBits {
                offset: 1,
                expected: 3,
                found: 2
            })
        );
    }

    #[test]
    fn rejects_trailing_garbage() {
        assert_eq!(
            parse_graph6("E?~oZ"),
            Err(Graph6Error::TrailingGarbage { offset: 4 })
        );
    }

    #[test]
    fn rejects_invalid_byte_with_offset() {
        assert_eq!(
            parse_graph6("E?\t~"),
            Err(Graph6Error::InvalidByte {
                offset: 2,
                byte: b'\t'
            })
        );
    }

    #[test]
    fn rejects_nonzero_padding() {
        // n=2 needs 1 bit; '~' = 63 sets all six, so padding is dirty.
        assert_eq!(
            parse_graph6("A~"),
            Err(Graph6Error::NonZeroPadding { offset: 1 })
        );
    }

    #[test]
    fn tolerates_trailing_newline() {
        assert!(parse_graph6("E?~o\n").is_ok());
        assert!(parse_graph6("E?~o\r\n").is_ok());
    }

    #[test]
    fn medium_node_count_round_trips() {
        // 63 nodes forces the 3-byte count form.
        let edges: Vec<(usize, usize)> = (0..62).map(|i| (i, i + 1)).collect();
        let g = Graph::new(63, &edges).unwrap();
        let s = to_graph6(&g);
        assert_eq!(s.as_bytes()[0], 126);
        assert_eq!(parse_graph6(&s).unwrap(), g);
    }
}
