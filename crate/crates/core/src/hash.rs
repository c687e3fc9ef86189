//! Small stable hash used for content fingerprints and seed derivation.
//!
//! `std::hash` makes no cross-version stability promise, so fingerprints that
//! end up inside checkpoints (vocabulary hash, rate-table hash) and seeds that
//! must reproduce across builds use this fixed FNV-1a implementation instead.

/// 64-bit FNV-1a over a byte slice.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Incremental FNV-1a accumulator for hashing heterogeneous records without
/// building an intermediate buffer.
#[derive(Clone, Copy)]
pub struct Fnv1a(u64);

impl Fnv1a {
    pub fn new() -> Self {
        Fnv1a(0xcbf2_9ce4_8422_2325)
    }

    pub fn write(mut self, bytes: &[u8]) -> Self {
        for &b in bytes {
            self.0 ^= u64::from(b);
            self.0 = self.0.wrapping_mul(0x0000_0100_0000_01b3);
        }
        self
    }

    /// Feed a string plus a separator byte so that ["ab","c"] and ["a","bc"]
    /// hash differently.
    pub fn write_str(self, s: &str) -> Self {
        self.write(s.as_bytes()).write(&[0xff])
    }

    pub fn write_u64(self, v: u64) -> Self {
        self.write(&v.to_le_bytes())
    }

    pub fn write_f64(self, v: f64) -> Self {
        self.write(&v.to_bits().to_le_bytes())
    }

    pub fn finish(self) -> u64 {
        self.0
    }
}

impl Default for Fnv1a {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_vectors() {
        // Reference values for the 64-bit FNV-1a parameters.
        assert_eq!(fnv1a64(b""), 0xcbf29ce484222325);
        assert_eq!(fnv1a64(b"a"), 0xaf63dc4c8601ec8c);
        assert_eq!(fnv1a64(b"foobar"), 0x85944171f73967e8);
    }

    #[test]
    fn separator_prevents_concatenation_collisions() {
        let a = Fnv1a::new().write_str("ab").write_str("c").finish();
        let b = Fnv1a::new().write_str("a").write_str("bc").finish();
        assert_ne!(a, b);
    }
}
