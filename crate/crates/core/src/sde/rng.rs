//! Reproducible per-path random streams.
//!
//! Path `i` of a simulation seeded with `seed` draws from ChaCha8 stream `i` of the
//! key derived from `seed`, so any partition of paths over workers sees the same
//! numbers.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

/// How standard normal variates are produced from uniforms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum GaussianSampler {
    /// One uniform per variate through the inverse normal CDF.
    #[default]
    InverseCdf,
    /// Two uniforms per pair of variates.
    BoxMuller,
}

/// Factory for path streams sharing one seed.
#[derive(Debug, Clone)]
pub struct StreamFamily {
    base: ChaCha8Rng,
    sampler: GaussianSampler,
}

impl StreamFamily {
    pub fn new(seed: u64, sampler: GaussianSampler) -> Self {
        StreamFamily { base: ChaCha8Rng::seed_from_u64(seed), sampler }
    }

    pub fn path(&self, index: u64) -> NormalStream {
        let mut rng = self.base.clone();
        rng.set_stream(index);
        NormalStream { rng, sampler: self.sampler, spare: None }
    }
}

/// Standard normal variates for one path.
#[derive(Debug, Clone)]
pub struct NormalStream {
    rng: ChaCha8Rng,
    sampler: GaussianSampler,
    spare: Option<f64>,
}

const TWO_POW_M53: f64 = 1.0 / (1u64 << 53) as f64;

impl NormalStream {
    /// Uniform on the open interval `(0, 1)`.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) as f64 + 0.5) * TWO_POW_M53
    }

    #[inline]
    pub fn next_normal(&mut self) -> f64 {
        match self.sampler {
            GaussianSampler::InverseCdf => inverse_normal_cdf(self.uniform()),
            GaussianSampler::BoxMuller => {
                if let Some(z) = self.spare.take() {
                    return z;
                }
                let r = (-2.0 * self.uniform().ln()).sqrt();
                let (s, c) = (std::f64::consts::TAU * self.uniform()).sin_cos();
                self.spare = Some(r * s);
                r * c
            }
        }
    }
}

/// Inverse of the standard normal CDF on `(0, 1)` (Wichura's AS241, about 1e-16 relative).
pub fn inverse_normal_cdf(p: f64) -> f64 {
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180625 - q * q;
        let num = ((((((2.509_080_928_730_122_672_7e3 * r + 3.343_057_558_358_812_810_5e4) * r
            + 6.726_577_092_700_870_085_3e4)
            * r
            + 4.592_195_393_154_987_145_7e4)
            * r
            + 1.373_169_376_550_946_112_5e4)
            * r
            + 1.971_590_950_306_551_442_7e3)
            * r
            + 1.331_416_678_917_843_774_5e2)
            * r
            + 3.387_132_872_796_366_608_0;
        let den = ((((((5.226_495_278_852_854_561_0e3 * r + 2.872_908_573_572_194_267_4e4) * r
            + 3.930_789_580_009_271_061_0e4)
            * r
            + 2.121_379_430_158_659_586_7e4)
            * r
            + 5.394_196_021_424_751_107_7e3)
            * r
            + 6.871_870_074_920_579_083_0e2)
            * r
            + 4.231_333_070_160_091_125_2e1)
            * r
            + 1.0;
        return q * num / den;
    }
    let tail = if q < 0.0 { p } else { 1.0 - p };
    if tail <= 0.0 {
        return if q < 0.0 { f64::NEG_INFINITY } else { f64::INFINITY };
    }
    let mut r = (-tail.ln()).sqrt();
    let value = if r <= 5.0 {
        r -= 1.6;
        let num = ((((((7.745_450_142_783_414_076_4e-4 * r + 2.272_384_498_926_918_458_3e-2) * r
            + 2.417_807_251_774_506_117_7e-1)
            * r
            + 1.270_458_252_452_368_382_58)
            * r
            + 3.647_848_324_763_204_605_04)
            * r
            + 5.769_497_221_460_691_405_5)
            * r
            + 4.630_337_846_156_545_295_9)
            * r
            + 1.423_437_110_749_683_577_34;
        let den = ((((((1.050_750_071_644_416_843_24e-9 * r + 5.475_938_084_995_344_946e-4) * r
            + 1.519_866_656_361_645_719_66e-2)
            * r
            + 1.481_039_764_274_800_745_9e-1)
            * r
            + 6.897_673_349_851_000_045_5e-1)
            * r
            + 1.676_384_830_183_803_849_4)
            * r
            + 2.053_191_626_637_758_821_87)
            * r
            + 1.0;
        num / den
    } else {
        r -= 5.0;
        let num = ((((((2.010_334_399_292_288_132_65e-7 * r + 2.711_555_568_743_487_578_15e-5)
            * r
            + 1.242_660_947_388_078_438_6e-3)
            * r
            + 2.653_218_952_657_612_309_3e-2)
            * r
            + 2.965_605_718_285_048_912_3e-1)
            * r
            + 1.784_826_539_917_291_335_8)
            * r
            + 5.463_784_911_164_114_369_9)
            * r
            + 6.657_904_643_501_103_777_2;
        let den = ((((((2.044_263_103_389_939_785_64e-15 * r + 1.421_511_758_316_445_888_7e-7)
            * r
            + 1.846_318_317_510_054_681_8e-5)
            * r
            + 7.868_691_311_456_132_591e-4)
            * r
            + 1.487_536_129_085_061_485_25e-2)
            * r
            + 1.369_298_809_227_358_053_1e-1)
            * r
            + 5.998_322_065_558_879_376_9e-1)
            * r
            + 1.0;
        num / den
    };
    if q < 0.0 {
        -value
    } else {
        value
    }
}
