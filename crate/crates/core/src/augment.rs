//! Four-factor stochastic augmentation of test volumes: z-axis rotation,
//! translation, gamma contrast, and additive Gaussian noise, each driven by
//! one coordinate of a unit hypercube point so the whole model plugs into a
//! variance-based sampling design.
//!
//! Factor marginals:
//! - rotation angle α ~ N(0°, 5°), applied about the world z-axis through
//!   the volume center
//! - displacement d ~ U(0, 2) mm, applied along world +x (one scalar factor
//!   must fully determine its effect, so the direction is fixed)
//! - contrast γ = exp(β) with β ~ N(0, 0.05)
//! - noise σ ~ U(0, 0.03) in normalized-intensity units
//!
//! Intensities are normalized with a fixed window before any intensity op so
//! γ and σ act on a comparable `[0,1]` scale across cases.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::grid::{LabelMask, ScalarBuffer, VoxelGrid};

/// Fixed intensity normalization window (CT Hounsfield units).
pub const WINDOW_MIN: f64 = -1024.0;
pub const WINDOW_MAX: f64 = 3071.0;

/// Number of augmentation factors in the model.
pub const FACTOR_COUNT: usize = 4;

/// One point of the four-factor augmentation model.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentationParams {
    /// Rotation about the z-axis, degrees.
    pub alpha_deg: f64,
    /// Translation magnitude along world +x, mm; in [0, 2].
    pub d_mm: f64,
    /// Log-gamma; γ = exp(β).
    pub beta: f64,
    /// Additive noise standard deviation, normalized units; in [0, 0.03].
    pub sigma: f64,
    /// The generating hypercube coordinates.
    pub unit_point: [f64; 4],
    /// Seed for the per-voxel noise stream.
    pub noise_seed: u64,
}

impl AugmentationParams {
    pub fn gamma(&self) -> f64 {
        self.beta.exp()
    }

    /// The identity augmentation (no rotation, translation, contrast change,
    /// or noise).
    pub fn identity(noise_seed: u64) -> Self {
        sample_params([0.5, 0.0, 0.5, 0.0], noise_seed).expect("identity point is in domain")
    }
}

/// One augmented test volume with its transformed ground truth and the
/// parameters that produced it.
#[derive(Debug, Clone)]
pub struct AugmentedCase {
    pub image: VoxelGrid,
    pub mask: LabelMask,
    pub params: AugmentationParams,
    pub base_case_id: String,
    pub design_row: usize,
}

/// Map a unit hypercube point to augmentation parameters. Coordinates
/// feeding the normal inverse CDF are clamped away from the endpoints so the
/// transform stays finite.
pub fn sample_params(unit_point: [f64; 4], noise_seed: u64) -> Result<AugmentationParams> {
    for (i, &u) in unit_point.iter().enumerate() {
        if !(0.0..=1.0).contains(&u) || u.is_nan() {
            return Err(Error::DomainError(format!(
                "unit point coordinate {i} = {u} outside [0,1]"
            )));
        }
    }
    let clamp = |u: f64| u.clamp(1e-9, 1.0 - 1e-9);
    let std_normal = Normal::standard();
    Ok(AugmentationParams {
        alpha_deg: 5.0 * std_normal.inverse_cdf(clamp(unit_point[0])),
        d_mm: 2.0 * unit_point[1],
        beta: 0.05 * std_normal.inverse_cdf(clamp(unit_point[2])),
        sigma: 0.03 * unit_point[3],
        unit_point,
        noise_seed,
    })
}

/// Normalize intensities to `[0,1]` with the fixed window; output is f32.
pub fn normalize_intensities(image: &VoxelGrid) -> VoxelGrid {
    let span = WINDOW_MAX - WINDOW_MIN;
    let values: Vec<f32> = (0..image.values().len())
        .map(|i| {
            let v = image.values().get_f64(i);
            (((v - WINDOW_MIN) / span).clamp(0.0, 1.0)) as f32
        })
        .collect();
    VoxelGrid::new(image.geometry().clone(), ScalarBuffer::F32(values))
        .expect("same geometry, same length")
}

/// Resample image and mask under rotation by `alpha` about the world z-axis
/// through the volume center, followed by translation along world +x. Image
/// is trilinearly interpolated, mask nearest-neighbor; out-of-field samples
/// take the image's minimum value (mask: background).
pub fn apply_geometric(
    image: &VoxelGrid,
    mask: &LabelMask,
    params: &AugmentationParams,
) -> Result<(VoxelGrid, LabelMask)> {
    if !image.geometry().same_lattice(mask.geometry()) {
        return Err(Error::GeometryMismatch(
            "image and mask must share a grid".into(),
        ));
    }
    if params.alpha_deg == 0.0 && params.d_mm == 0.0 {
        return Ok((image.clone(), mask.clone()));
    }

    let g = image.geometry();
    let n = g.len();
    let center = g.world_center();
    let angle = -params.alpha_deg.to_radians(); // inverse rotation
    let (sin_a, cos_a) = angle.sin_cos();
    let translation = [params.d_mm, 0.0, 0.0];

    let background = (0..n)
        .map(|i| image.values().get_f64(i))
        .fold(f64::INFINITY, f64::min);

    let mut out_image = vec![0f32; n];
    let mut out_mask = vec![0u8; n];
    for idx in 0..n {
        let [i, j, k] = g.unlinear(idx);
        let world = g.index_to_world([i as f64, j as f64, k as f64]);
        // invert: forward is w' = R(w − c) + c + t
        let v = [
            world[0] - center[0] - translation[0],
            world[1] - center[1] - translation[1],
            world[2] - center[2] - translation[2],
        ];
        let rotated = [
            cos_a * v[0] - sin_a * v[1] + center[0],
            sin_a * v[0] + cos_a * v[1] + center[1],
            v[2] + center[2],
        ];
        let src = g.world_to_index(rotated);
        out_image[idx] = sample_trilinear(image, src, background) as f32;
        out_mask[idx] = sample_nearest(mask, src);
    }

    let image_out = VoxelGrid::new(g.clone(), ScalarBuffer::F32(out_image))?;
    let mask_out = LabelMask::new(g.clone(), out_mask)?;
    Ok((image_out, mask_out))
}

fn sample_trilinear(image: &VoxelGrid, p: [f64; 3], background: f64) -> f64 {
    let g = image.geometry();
    let [nx, ny, nz] = g.dims();
    let base = [p[0].floor(), p[1].floor(), p[2].floor()];
    let frac = [p[0] - base[0], p[1] - base[1], p[2] - base[2]];
    let at = |di: usize, dj: usize, dk: usize| -> f64 {
        let i = base[0] as i64 + di as i64;
        let j = base[1] as i64 + dj as i64;
        let k = base[2] as i64 + dk as i64;
        if i < 0 || j < 0 || k < 0 || i >= nx as i64 || j >= ny as i64 || k >= nz as i64 {
            background
        } else {
            image
                .values()
                .get_f64(g.linear(i as usize, j as usize, k as usize))
        }
    };
    let mut acc = 0.0;
    for dk in 0..2 {
        for dj in 0..2 {
            for di in 0..2 {
                let w = (if di == 0 { 1.0 - frac[0] } else { frac[0] })
                    * (if dj == 0 { 1.0 - frac[1] } else { frac[1] })
                    * (if dk == 0 { 1.0 - frac[2] } else { frac[2] });
                if w != 0.0 {
                    acc += w * at(di, dj, dk);
                }
            }
        }
    }
    acc
}

fn sample_nearest(mask: &LabelMask, p: [f64; 3]) -> u8 {
    let g = mask.geometry();
    let [nx, ny, nz] = g.dims();
    let i = p[0].round() as i64;
    let j = p[1].round() as i64;
    let k = p[2].round() as i64;
    if i < 0 || j < 0 || k < 0 || i >= nx as i64 || j >= ny as i64 || k >= nz as i64 {
        0
    } else {
        u8::from(mask.get(i as usize, j as usize, k as usize))
    }
}

/// Gamma contrast followed by additive Gaussian noise, clamped back to
/// `[0,1]`. The noise stream is a counter-based construction keyed by
/// (noise_seed, voxel index), so output is independent of evaluation order.
pub fn apply_intensity(image: &VoxelGrid, params: &AugmentationParams) -> Result<VoxelGrid> {
    let n = image.values().len();
    for i in 0..n {
        let v = image.values().get_f64(i);
        if !(-1e-6..=1.0 + 1e-6).contains(&v) {
            return Err(Error::DomainError(format!(
                "intensity {v} at voxel {i} outside normalized [0,1]"
            )));
        }
    }
    let gamma = params.gamma();
    let values: Vec<f32> = (0..n)
        .map(|i| {
            let mut v = image.values().get_f64(i).clamp(0.0, 1.0);
            if gamma != 1.0 {
                v = v.powf(gamma);
            }
            if params.sigma != 0.0 {
                v += params.sigma * standard_normal(params.noise_seed, i as u64);
            }
            v.clamp(0.0, 1.0) as f32
        })
        .collect();
    VoxelGrid::new(image.geometry().clone(), ScalarBuffer::F32(values))
}

/// Full augmentation of one case: fixed-window normalization, geometric
/// resampling of image and ground truth together, then intensity ops on the
/// image alone. Deterministic given (params, noise_seed).
pub fn augment_case(
    image: &VoxelGrid,
    mask: &LabelMask,
    params: &AugmentationParams,
    base_case_id: &str,
    design_row: usize,
) -> Result<AugmentedCase> {
    let normalized = normalize_intensities(image);
    let (moved_image, moved_mask) = apply_geometric(&normalized, mask, params)?;
    let final_image = apply_intensity(&moved_image, params)?;
    Ok(AugmentedCase {
        image: final_image,
        mask: moved_mask,
        params: params.clone(),
        base_case_id: base_case_id.to_string(),
        design_row,
    })
}

/// Deterministic standard normal for voxel `index` under `seed`: a SplitMix64
/// finalizer feeds the normal inverse CDF with a (0,1) uniform.
pub fn standard_normal(seed: u64, index: u64) -> f64 {
    let h = mix64(seed.wrapping_add(index.wrapping_mul(0x9e37_79b9_7f4a_7c15)));
    let u = ((h >> 11) as f64 + 0.5) / (1u64 << 53) as f64;
    Normal::standard().inverse_cdf(u)
}

fn mix64(mut x: u64) -> u64 {
    x ^= x >> 30;
    x = x.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x ^= x >> 27;
    x = x.wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^= x >> 31;
    x
}
