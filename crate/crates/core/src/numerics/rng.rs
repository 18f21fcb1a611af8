//! Counter-based random streams keyed by (master seed, stream index).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SeededStream {
    pub master_seed: u64,
    pub stream_index: u64,
}

impl SeededStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        SeededStream {
            master_seed,
            stream_index,
        }
    }

    pub fn rng(&self) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_index);
        rng
    }
}

/// N i.i.d. uniform points in [0, side]².
pub fn uniform_points(stream: SeededStream, n: usize, side: f64) -> Result<Vec<[f64; 2]>> {
    if n == 0 {
        return Err(Error::invalid("n", "need at least one point"));
    }
    if !(side > 0.0 && side.is_finite()) {
        return Err(Error::invalid("side", format!("must be positive, got {side}")));
    }
    let mut rng = stream.rng();
    Ok((0..n).map(|_| [side * rng.random::<f64>(), side * rng.random::<f64>()]).collect())
}
