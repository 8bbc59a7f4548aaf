//! Message fragmentation for payloads above one datagram and order-tolerant
//! reassembly.

use std::collections::BTreeMap;

use super::NetError;

/// Splits `payload` into (frag_index, frag_count, chunk) triples. All chunks
/// but the last have exactly `max_fragment` octets; an empty payload becomes
/// a single empty fragment.
pub fn fragment(payload: &[u8], max_fragment: usize) -> Vec<(u16, u16, Vec<u8>)> {
    assert!(max_fragment >= 1, "max_fragment must be at least 1");
    if payload.is_empty() {
        return vec![(0, 1, Vec::new())];
    }
    let chunks: Vec<Vec<u8>> = payload.chunks(max_fragment).map(<[u8]>::to_vec).collect();
    let count = u16::try_from(chunks.len()).expect("fragment count fits in u16");
    chunks.into_iter().enumerate().map(|(i, c)| (i as u16, count, c)).collect()
}

/// Accumulates fragments of one message in any arrival order. Duplicate
/// indices and count mismatches are rejected as conflicts.
#[derive(Debug, Default)]
pub struct Reassembler {
    frag_count: Option<u16>,
    chunks: BTreeMap<u16, Vec<u8>>,
}

impl Reassembler {
    pub fn new() -> Self {
        Self::default()
    }

    /// Feeds one fragment; returns the whole payload once the set completes.
    pub fn accept(
        &mut self,
        frag_index: u16,
        frag_count: u16,
        chunk: Vec<u8>,
    ) -> Result<Option<Vec<u8>>, NetError> {
        if frag_count == 0 || frag_index >= frag_count {
            return Err(NetError::InvalidFrame("frag_index must be below frag_count"));
        }
        match self.frag_count {
            None => self.frag_count = Some(frag_count),
            Some(established) if established != frag_count => {
                return Err(NetError::ConflictingDuplicate)
            }
            Some(_) => {}
        }
        if self.chunks.contains_key(&frag_index) {
            return Err(NetError::ConflictingDuplicate);
        }
        self.chunks.insert(frag_index, chunk);
        if self.chunks.len() == frag_count as usize {
            Ok(Some(self.chunks.values().flatten().copied().collect()))
        } else {
            Ok(None)
        }
    }

    pub fn is_empty(&self) -> bool {
        self.chunks.is_empty()
    }
}

/// One-shot reassembly of a complete fragment list in any order. An
/// incomplete set is the missing-fragment error.
pub fn reassemble(frags: &[(u16, u16, Vec<u8>)]) -> Result<Vec<u8>, NetError> {
    let mut r = Reassembler::new();
    for (index, count, chunk) in frags {
        if let Some(payload) = r.accept(*index, *count, chunk.clone())? {
            return Ok(payload);
        }
    }
    Err(NetError::MissingFragment)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn exact_multiple_is_one_fragment() {
        let frags = fragment(&[7u8; 100], 100);
        assert_eq!(frags.len(), 1);
        assert_eq!(frags[0], (0, 1, vec![7u8; 100]));
    }

    #[test]
    fn ceiling_arithmetic() {
        let frags = fragment(&[1u8; 201], 100);
        assert_eq!(frags.len(), 3);
        assert_eq!(frags[0].2.len(), 100);
        assert_eq!(frags[1].2.len(), 100);
        assert_eq!(frags[2].2.len(), 1);
        assert!(frags.iter().all(|(_, count, _)| *count == 3));
    }

    #[test]
    fn empty_payload_single_empty_fragment() {
        let frags = fragment(&[], 100);
        assert_eq!(frags, vec![(0, 1, Vec::new())]);
        assert_eq!(reassemble(&frags).unwrap(), Vec::<u8>::new());
    }

    #[test]
    fn arrival_permutations_reassemble_identically() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut payload = vec![0u8; 4321];
        rng.fill(&mut payload[..]);
        let frags = fragment(&payload, 500);
        assert_eq!(frags.len(), 9);
        for _ in 0..100 {
            let mut shuffled = frags.clone();
            shuffled.shuffle(&mut rng);
            assert_eq!(reassemble(&shuffled).unwrap(), payload);
        }
    }

    #[test]
    fn duplicate_rejected() {
        let mut r = Reassembler::new();
        assert!(r.accept(0, 2, vec![1]).unwrap().is_none());
        assert!(matches!(r.accept(0, 2, vec![1]), Err(NetError::ConflictingDuplicate)));
        assert!(matches!(r.accept(0, 2, vec![9]), Err(NetError::ConflictingDuplicate)));
    }

    #[test]
    fn count_conflict_rejected() {
        let mut r = Reassembler::new();
        assert!(r.accept(0, 3, vec![1]).unwrap().is_none());
        assert!(matches!(r.accept(1, 2, vec![2]), Err(NetError::ConflictingDuplicate)));
    }

    #[test]
    fn missing_fragment_detected() {
        let frags = fragment(&[9u8; 300], 100);
        assert!(matches!(reassemble(&frags[..2]), Err(NetError::MissingFragment)));
    }

    #[test]
    fn fragment_roundtrip_random_sizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..200 {
            let len = rng.gen_range(0..5000);
            let max = rng.gen_range(1..1500);
            let mut payload = vec![0u8; len];
            rng.fill(&mut payload[..]);
            assert_eq!(reassemble(&fragment(&payload, max)).unwrap(), payload);
        }
    }
}
