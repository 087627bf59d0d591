//! Counter-based random streams keyed by `(master_seed, trial, voter)`.
//!
//! Every voter of every trial reads from its own ChaCha8 block range, so the
//! draws depend only on the key and never on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Random stream for one trial. Voter generators are derived on demand.
#[derive(Clone, Debug)]
pub struct RandomStream {
    base: ChaCha8Rng,
    master_seed: u64,
    trial: u64,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RandomStream {
    pub fn new(master_seed: u64, trial: u64) -> Self {
        let mut state = master_seed;
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        let mut base = ChaCha8Rng::from_seed(key);
        base.set_stream(trial);
        RandomStream {
            base,
            master_seed,
            trial,
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn trial(&self) -> u64 {
        self.trial
    }

    /// Generator for one voter. Each voter owns 2^32 words of the stream.
    pub fn voter(&self, voter: u64) -> ChaCha8Rng {
        let mut rng = self.base.clone();
        rng.set_word_pos((voter as u128) << 32);
        rng
    }

    /// Repositions `rng` (a clone of this stream) at the start of `voter`.
    pub(crate) fn seek(rng: &mut ChaCha8Rng, voter: u64) {
        rng.set_word_pos((voter as u128) << 32);
    }

    pub(crate) fn base(&self) -> &ChaCha8Rng {
        &self.base
    }
}
