//! ViT encoder parameter counts and MAE masked-encoder cost.
//!
//! Parameter accounting: patch embedding with bias; per block two
//! layer-norms, q/k/v/output projections with biases and a two-layer MLP
//! with biases; a final layer-norm; a class token; learned positional
//! embeddings for the 224 px grid plus the class token. No decoder.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::scalar::floor_tolerant;

/// Side length the positional embedding table is sized for.
pub const CANONICAL_SIDE: u64 = 224;

#[derive(Debug, Error, PartialEq)]
pub enum ArchError {
    #[error("width {width} is not divisible by {heads} heads")]
    HeadsDoNotDivideWidth { width: u64, heads: u64 },
    #[error("{0} must be positive")]
    NonPositive(&'static str),
    #[error("image side {side} is smaller than the patch size {patch}")]
    SideTooSmall { side: u64, patch: u64 },
    #[error("mask ratio must lie in [0, 1), got {0}")]
    InvalidMaskRatio(f64),
    #[error("masking leaves no visible tokens out of {0}")]
    NoVisibleTokens(u64),
    #[error("unknown preset `{0}` (expected vit-s14, vit-b14, vit-l14 or vit-h14)")]
    UnknownPreset(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct VitConfig {
    pub name: String,
    pub width: u64,
    pub depth: u64,
    pub heads: u64,
    pub patch: u64,
    pub mlp_ratio: f64,
    pub channels: u64,
}

impl VitConfig {
    pub fn new(name: impl Into<String>, width: u64, depth: u64, heads: u64) -> Result<Self, ArchError> {
        let cfg = Self {
            name: name.into(),
            width,
            depth,
            heads,
            patch: 14,
            mlp_ratio: 4.0,
            channels: 3,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ArchError> {
        if self.width == 0 {
            return Err(ArchError::NonPositive("width"));
        }
        if self.heads == 0 {
            return Err(ArchError::NonPositive("heads"));
        }
        if self.patch == 0 {
            return Err(ArchError::NonPositive("patch"));
        }
        if self.channels == 0 {
            return Err(ArchError::NonPositive("channels"));
        }
        if !(self.mlp_ratio.is_finite() && self.mlp_ratio > 0.0) {
            return Err(ArchError::NonPositive("mlp_ratio"));
        }
        if !self.width.is_multiple_of(self.heads) {
            return Err(ArchError::HeadsDoNotDivideWidth {
                width: self.width,
                heads: self.heads,
            });
        }
        Ok(())
    }

    pub fn vit_s14() -> Self {
        Self::new("ViT-S/14", 384, 12, 6).expect("valid preset")
    }

    pub fn vit_b14() -> Self {
        Self::new("ViT-B/14", 768, 12, 12).expect("valid preset")
    }

    pub fn vit_l14() -> Self {
        Self::new("ViT-L/14", 1024, 24, 16).expect("valid preset")
    }

    pub fn vit_h14() -> Self {
        Self::new("ViT-H/14", 1280, 32, 16).expect("valid preset")
    }

    pub fn presets() -> [VitConfig; 4] {
        [Self::vit_s14(), Self::vit_b14(), Self::vit_l14(), Self::vit_h14()]
    }

    /// MLP hidden width, `round(mlp_ratio · width)`.
    pub fn mlp_hidden(&self) -> u64 {
        (self.mlp_ratio * self.width as f64).round() as u64
    }
}

impl FromStr for VitConfig {
    type Err = ArchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "vit-s14" => Ok(Self::vit_s14()),
            "vit-b14" => Ok(Self::vit_b14()),
            "vit-l14" => Ok(Self::vit_l14()),
            "vit-h14" => Ok(Self::vit_h14()),
            other => Err(ArchError::UnknownPreset(other.to_string())),
        }
    }
}

impl fmt::Display for VitConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} (width {}, depth {}, heads {}, patch {})",
            self.name, self.width, self.depth, self.heads, self.patch
        )
    }
}

/// Encoder parameter count.
pub fn param_count(cfg: &VitConfig) -> u64 {
    let w = cfg.width;
    let h = cfg.mlp_hidden();
    let patch_embed = cfg.channels * cfg.patch * cfg.patch * w + w;
    let attention = 4 * w * w + 4 * w;
    let mlp = 2 * w * h + h + w;
    let norms = 4 * w;
    let grid = CANONICAL_SIDE / cfg.patch;
    let positions = (grid * grid + 1) * w;
    patch_embed + cfg.depth * (attention + mlp + norms) + 2 * w + w + positions
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaskSpec {
    mask_ratio: f64,
}

impl MaskSpec {
    pub fn new(mask_ratio: f64) -> Result<Self, ArchError> {
        if (0.0..1.0).contains(&mask_ratio) {
            Ok(Self { mask_ratio })
        } else {
            Err(ArchError::InvalidMaskRatio(mask_ratio))
        }
    }

    pub fn ratio(&self) -> f64 {
        self.mask_ratio
    }

    /// Tokens kept out of `total`: `floor(total · (1 − ratio))`.
    pub fn visible(&self, total: u64) -> u64 {
        floor_tolerant(total as f64 * (1.0 - self.mask_ratio)) as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TokenBudget {
    pub side: u64,
    pub patch: u64,
    pub grid: u64,
    pub total_tokens: u64,
    pub visible_tokens: u64,
}

pub fn token_budget(side: u64, patch: u64, mask: MaskSpec) -> Result<TokenBudget, ArchError> {
    if patch == 0 {
        return Err(ArchError::NonPositive("patch"));
    }
    if side < patch {
        return Err(ArchError::SideTooSmall { side, patch });
    }
    let grid = side / patch;
    let total_tokens = grid * grid;
    let visible_tokens = mask.visible(total_tokens);
    if visible_tokens == 0 {
        return Err(ArchError::NoVisibleTokens(total_tokens));
    }
    Ok(TokenBudget {
        side,
        patch,
        grid,
        total_tokens,
        visible_tokens,
    })
}

/// Leading-order encoder forward cost for `tokens` tokens:
/// `depth · (12·T·w² + 2·T²·w)`.
pub fn encoder_cost(cfg: &VitConfig, tokens: u64) -> f64 {
    let t = tokens as f64;
    let w = cfg.width as f64;
    cfg.depth as f64 * (12.0 * t * w * w + 2.0 * t * t * w)
}

/// Encoder cost with masking relative to encoding every token.
pub fn encoder_flops_ratio(mask: MaskSpec, total_tokens: u64, cfg: &VitConfig) -> f64 {
    let visible = mask.visible(total_tokens);
    if visible == total_tokens || cfg.depth == 0 {
        return 1.0;
    }
    encoder_cost(cfg, visible) / encoder_cost(cfg, total_tokens)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mask(r: f64) -> MaskSpec {
        MaskSpec::new(r).unwrap()
    }

    #[test]
    fn preset_counts() {
        let s = param_count(&VitConfig::vit_s14());
        assert!((21_500_000..=22_500_000).contains(&s), "{s}");
        let h = param_count(&VitConfig::vit_h14());
        assert!((h as f64 - 633e6).abs() / 633e6 < 0.01, "{h}");
        // hand totals under the documented conventions
        assert_eq!(s, 21_619_584);
        assert_eq!(param_count(&VitConfig::vit_b14()), 85_706_496);
        assert_eq!(param_count(&VitConfig::vit_l14()), 303_178_752);
        assert_eq!(h, 630_764_800);
    }

    #[test]
    fn embeddings_only() {
        let mut cfg = VitConfig::new("tiny", 8, 0, 1).unwrap();
        cfg.patch = 14;
        // patch embed 3·196·8 + 8, final norm 16, cls 8, positions 257·8
        assert_eq!(param_count(&cfg), 4712 + 16 + 8 + 2056);
    }

    #[test]
    fn config_validation() {
        assert_eq!(
            VitConfig::new("x", 10, 2, 3).unwrap_err(),
            ArchError::HeadsDoNotDivideWidth { width: 10, heads: 3 }
        );
        assert!(VitConfig::new("x", 0, 2, 1).is_err());
        assert!("vit-g14".parse::<VitConfig>().is_err());
        assert_eq!("vit-l14".parse::<VitConfig>().unwrap(), VitConfig::vit_l14());
    }

    #[test]
    fn budgets() {
        let b = token_budget(224, 14, mask(0.8)).unwrap();
        assert_eq!((b.grid, b.total_tokens, b.visible_tokens), (16, 256, 51));
        let b = token_budget(476, 14, mask(0.8)).unwrap();
        assert_eq!((b.grid, b.total_tokens, b.visible_tokens), (34, 1156, 231));
        assert_eq!(token_budget(224, 14, mask(0.0)).unwrap().visible_tokens, 256);
        assert_eq!(
            token_budget(10, 14, mask(0.8)).unwrap_err(),
            ArchError::SideTooSmall { side: 10, patch: 14 }
        );
        // 10·(1 − 0.9) is just below 1 in binary
        assert_eq!(mask(0.9).visible(10), 1);
        assert_eq!(
            token_budget(14, 14, mask(0.5)).unwrap_err(),
            ArchError::NoVisibleTokens(1)
        );
        assert!(MaskSpec::new(1.0).is_err());
        assert!(MaskSpec::new(-0.1).is_err());
    }

    #[test]
    fn flops_ratio_values() {
        let h = VitConfig::vit_h14();
        assert_eq!(encoder_flops_ratio(mask(0.0), 1156, &h), 1.0);
        // per unit depth·w: 12·231·1280 + 2·231² over 12·1156·1280 + 2·1156²
        let expected = 3_654_882.0 / 20_428_832.0;
        let r = encoder_flops_ratio(mask(0.8), 1156, &h);
        assert!((r - expected).abs() < 1e-12, "{r}");
        assert!(r < 0.2 && r > 0.17);
        for cfg in VitConfig::presets() {
            let r = encoder_flops_ratio(mask(0.5), 256, &cfg);
            assert!(r > 0.25 && r < 0.5);
        }
    }
}
