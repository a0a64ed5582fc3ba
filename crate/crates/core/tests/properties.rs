use proptest::prelude::*;

use tdgd::bitio::{BitReader, BitWriter, Codeword};
use tdgd::codec::CodeFamily;
use tdgd::fringe2::{sign_sequence, WeightedSource};
use tdgd::oracle::{huffman_lengths, kraft_is_exact};

fn family() -> impl Strategy<Value = CodeFamily> {
    prop_oneof![
        (1u64..=40).prop_map(CodeFamily::Ck),
        (2u64..=10).prop_map(CodeFamily::Cminus),
        Just(CodeFamily::Limit),
        (1u64..=40).prop_map(CodeFamily::GolombPair),
    ]
}

proptest! {
    #[test]
    fn fragments_roundtrip(parts in prop::collection::vec((any::<u64>(), 0u32..=64), 0..40)) {
        let words: Vec<Codeword> = parts
            .into_iter()
            .map(|(v, len)| {
                let v = if len == 64 { v } else { v & ((1u64 << len) - 1) };
                Codeword::new(v, len)
            })
            .collect();
        let mut w = BitWriter::new();
        for &cw in &words {
            w.write_codeword(cw);
        }
        let total: u64 = words.iter().map(|cw| u64::from(cw.len())).sum();
        prop_assert_eq!(w.bit_len(), total);
        let buf = w.finish();
        prop_assert_eq!(buf.len() as u64 * 8, total.div_ceil(8) * 8);
        let mut r = BitReader::new(&buf);
        for cw in words {
            prop_assert_eq!(r.read_bits(cw.len()).unwrap(), cw.value());
        }
        prop_assert_eq!(r.position(), total);
    }

    #[test]
    fn codecs_roundtrip(f in family(), pairs in prop::collection::vec((0u64..600, 0u64..600), 1..30)) {
        let codec = f.codec().unwrap();
        let mut w = BitWriter::new();
        for &p in &pairs {
            codec.encode_into(&mut w, p).unwrap();
        }
        let buf = w.finish();
        let mut r = BitReader::new(&buf);
        for &p in &pairs {
            prop_assert_eq!(codec.decode(&mut r).unwrap(), p);
        }
    }

    #[test]
    fn huffman_is_complete(mut w in prop::collection::vec(1e-6f64..1.0, 1..300)) {
        w.sort_by(|a, b| b.total_cmp(a));
        let l = huffman_lengths(&w).unwrap();
        prop_assert!(kraft_is_exact(&l));
        prop_assert_eq!(l.clone(), huffman_lengths(&w).unwrap());
    }

    #[test]
    fn four_uniform_sign_sequences_are_monotone(mut w in prop::collection::vec(25u64..=100, 2..200)) {
        w.sort_unstable_by(|a, b| b.cmp(a));
        let src = WeightedSource::new(w).unwrap();
        let signs: Vec<i8> = sign_sequence(&src).unwrap().into_iter().map(|(_, s)| s).collect();
        prop_assert!(signs.windows(2).all(|p| p[0] <= p[1]), "{:?}", signs);
    }
}
