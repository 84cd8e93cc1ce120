//! Order-preserving byte encoding of value tuples.
//!
//! Integers encode as a tag byte and the big-endian two's complement with
//! the sign bit flipped; strings as a tag byte, the UTF-8 bytes with `00`
//! escaped to `00 FF`, and a `00 01` terminator. Byte order of encodings
//! equals the order of the value tuples, and every encoding is
//! self-delimiting, so the encoding of a tuple prefix is a byte prefix.

use crate::relcore::Value;

const INT: u8 = 0x01;
const STR: u8 = 0x02;

pub fn encode_value(value: &Value, out: &mut Vec<u8>) {
    match value {
        Value::Int(i) => {
            out.push(INT);
            out.extend_from_slice(&((*i as u64) ^ (1 << 63)).to_be_bytes());
        }
        Value::Str(s) => {
            out.push(STR);
            for &b in s.as_bytes() {
                out.push(b);
                if b == 0 {
                    out.push(0xFF);
                }
            }
            out.extend_from_slice(&[0x00, 0x01]);
        }
    }
}

pub fn encode<'a>(values: impl IntoIterator<Item = &'a Value>) -> Vec<u8> {
    let mut out = Vec::new();
    for v in values {
        encode_value(v, &mut out);
    }
    out
}

/// Decodes one value from the front of `bytes`, returning it and the rest.
pub fn decode_value(bytes: &[u8]) -> Option<(Value, &[u8])> {
    let (&tag, rest) = bytes.split_first()?;
    match tag {
        INT => {
            let raw: [u8; 8] = rest.get(..8)?.try_into().ok()?;
            let i = (u64::from_be_bytes(raw) ^ (1 << 63)) as i64;
            Some((Value::Int(i), &rest[8..]))
        }
        STR => {
            let mut s = Vec::new();
            let mut i = 0;
            loop {
                match (rest.get(i)?, rest.get(i + 1)) {
                    (0x00, Some(0x01)) => break,
                    (0x00, Some(0xFF)) => {
                        s.push(0);
                        i += 2;
                    }
                    (0x00, _) => return None,
                    (&b, _) => {
                        s.push(b);
                        i += 1;
                    }
                }
            }
            Some((Value::Str(String::from_utf8(s).ok()?), &rest[i + 2..]))
        }
        _ => None,
    }
}

/// Decodes exactly `n` values; trailing bytes are returned.
pub fn decode_n(mut bytes: &[u8], n: usize) -> Option<(Vec<Value>, &[u8])> {
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let (v, rest) = decode_value(bytes)?;
        out.push(v);
        bytes = rest;
    }
    Some((out, bytes))
}

/// Smallest byte string greater than every string with prefix `p`, or
/// `None` when no such bound exists.
pub fn prefix_successor(p: &[u8]) -> Option<Vec<u8>> {
    let mut s = p.to_vec();
    while let Some(last) = s.pop() {
        if last < 0xFF {
            s.push(last + 1);
            return Some(s);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn value() -> impl Strategy<Value = Value> {
        prop_oneof![any::<i64>().prop_map(Value::Int), "[a\\x00b\u{e9}\u{ff}]{0,6}".prop_map(Value::Str)]
    }

    proptest! {
        #[test]
        fn round_trip(vs in proptest::collection::vec(value(), 0..4)) {
            let bytes = encode(&vs);
            let (back, rest) = decode_n(&bytes, vs.len()).unwrap();
            prop_assert_eq!(back, vs);
            prop_assert!(rest.is_empty());
        }

        #[test]
        fn order_preserved(a in proptest::collection::vec(value(), 1..3), b in proptest::collection::vec(value(), 1..3)) {
            prop_assume!(a.len() == b.len());
            prop_assert_eq!(encode(&a).cmp(&encode(&b)), a.cmp(&b));
        }

        #[test]
        fn prefix_is_byte_prefix(a in value(), b in value()) {
            let one = encode([&a]);
            let two = encode([&a, &b]);
            prop_assert!(two.starts_with(&one));
            prop_assert!(two.as_slice() < prefix_successor(&one).unwrap().as_slice());
        }
    }

    #[test]
    fn negative_before_positive() {
        assert!(encode([&Value::Int(-1)]) < encode([&Value::Int(0)]));
        assert_eq!(prefix_successor(&[0x01, 0xFF]), Some(vec![0x02]));
        assert_eq!(prefix_successor(&[0xFF]), None);
    }
}
