use crate::error::{Error, Result};
use crate::ring::GadgetSpec;

/// Smallest ring dimension accepted without the insecure flag.
pub const MIN_SECURE_N: usize = 2048;

/// `σ/q` shared by both published sets.
pub const SIGMA_REL_DEFAULT: f64 = 1.1 / (1u64 << 51) as f64;

/// TFHE parameters. The ciphertext modulus is fixed at `q = 2^64`.
#[derive(Clone, Debug, PartialEq)]
pub struct HeParams {
    pub name: String,
    pub n: usize,
    pub sigma_rel: f64,
    pub gadget: GadgetSpec,
    pub ks_gadget: GadgetSpec,
    /// `log2(p)` of the plaintext modulus.
    pub p_log: u32,
    pub insecure: bool,
}

impl HeParams {
    /// `HE_0`: `N = 2^11`, `ℓ = 1`, `β = 2^23`, `ℓ_KS = 2`, `β_KS = 2^15`.
    pub fn he0(p_log: u32) -> Self {
        Self::named("HE_0", 2048, (1, 23), (2, 15), p_log)
    }

    /// `HE_1`: `N = 2^11`, `ℓ = 2`, `β = 2^15`, `ℓ_KS = 3`, `β_KS = 2^11`.
    pub fn he1(p_log: u32) -> Self {
        Self::named("HE_1", 2048, (2, 15), (3, 11), p_log)
    }

    /// A small-ring set for exhaustive testing. It provides no security.
    pub fn insecure(n: usize, p_log: u32) -> Self {
        let mut p = Self::named("INSECURE", n, (2, 15), (3, 11), p_log);
        p.name = format!("INSECURE_{n}");
        p.insecure = true;
        p
    }

    fn named(name: &str, n: usize, g: (usize, u32), ks: (usize, u32), p_log: u32) -> Self {
        Self {
            name: name.to_string(),
            n,
            sigma_rel: SIGMA_REL_DEFAULT,
            gadget: GadgetSpec::new(g.0, g.1).expect("static gadget"),
            ks_gadget: GadgetSpec::new(ks.0, ks.1).expect("static gadget"),
            p_log,
            insecure: false,
        }
    }

    /// Looks up `HE_0` / `HE_1` by name.
    pub fn by_name(name: &str, p_log: u32) -> Result<Self> {
        match name.to_ascii_uppercase().as_str() {
            "HE_0" | "HE0" => Ok(Self::he0(p_log)),
            "HE_1" | "HE1" => Ok(Self::he1(p_log)),
            other => Err(Error::InvalidParams(format!("unknown parameter set {other}"))),
        }
    }

    pub fn with_sigma_rel(mut self, sigma_rel: f64) -> Self {
        self.sigma_rel = sigma_rel;
        self
    }

    pub fn with_p_log(mut self, p_log: u32) -> Self {
        self.p_log = p_log;
        self
    }

    pub fn log_n(&self) -> u32 {
        self.n.trailing_zeros()
    }

    pub fn p(&self) -> u64 {
        1u64 << self.p_log
    }

    /// Scaling factor `q/p`.
    pub fn delta(&self) -> u64 {
        1u64 << (64 - self.p_log)
    }

    /// Decryption margin `q/(2p)`.
    pub fn margin(&self) -> u64 {
        1u64 << (63 - self.p_log)
    }

    /// Absolute noise standard deviation, `σ/q · 2^64`.
    pub fn sigma(&self) -> f64 {
        self.sigma_rel * 2f64.powi(64)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.n.is_power_of_two() || self.n < 4 {
            return Err(Error::NotPowerOfTwo(self.n));
        }
        if self.p_log == 0 || self.p_log > 32 {
            return Err(Error::InvalidParams(format!("plaintext modulus 2^{} unsupported", self.p_log)));
        }
        if !(self.sigma_rel >= 0.0 && self.sigma_rel < 1e-3) {
            return Err(Error::InvalidParams(format!("sigma_rel {} out of range", self.sigma_rel)));
        }
        if self.n < MIN_SECURE_N && !self.insecure {
            return Err(Error::InsecureNotAllowed(self.name.clone()));
        }
        Ok(())
    }

    /// Fails unless the set is secure or the caller opted in.
    pub fn check_allowed(&self, allow_insecure: bool) -> Result<()> {
        self.validate()?;
        if self.insecure && !allow_insecure {
            return Err(Error::InsecureNotAllowed(self.name.clone()));
        }
        Ok(())
    }

    /// True when two sets produce interchangeable ciphertexts.
    pub fn compatible(&self, other: &Self) -> bool {
        self.n == other.n
            && self.gadget == other.gadget
            && self.ks_gadget == other.ks_gadget
            && self.p_log == other.p_log
            && self.insecure == other.insecure
    }

    pub(crate) fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.compatible(other) {
            Ok(())
        } else {
            Err(Error::Mismatch(format!("parameter sets {} and {} differ", self.name, other.name)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn published_sets() {
        let h0 = HeParams::he0(8);
        assert_eq!((h0.n, h0.gadget.levels(), h0.gadget.base_log()), (2048, 1, 23));
        assert_eq!((h0.ks_gadget.levels(), h0.ks_gadget.base_log()), (2, 15));
        let h1 = HeParams::he1(12);
        assert_eq!((h1.gadget.levels(), h1.gadget.base_log()), (2, 15));
        assert_eq!((h1.ks_gadget.levels(), h1.ks_gadget.base_log()), (3, 11));
        assert_eq!(h0.sigma_rel, 1.1 * 2f64.powi(-51));
        assert!(h0.validate().is_ok() && h1.validate().is_ok());
    }

    #[test]
    fn small_rings_need_the_flag() {
        let mut p = HeParams::insecure(64, 4);
        assert!(p.validate().is_ok());
        assert!(p.check_allowed(false).is_err());
        assert!(p.check_allowed(true).is_ok());
        p.insecure = false;
        assert!(matches!(p.validate(), Err(Error::InsecureNotAllowed(_))));
    }

    #[test]
    fn scaling() {
        let p = HeParams::he0(8);
        assert_eq!(p.delta(), 1 << 56);
        assert_eq!(p.margin(), 1 << 55);
        assert_eq!(p.delta().wrapping_mul(p.p()), 0);
    }
}
