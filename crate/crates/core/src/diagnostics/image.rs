use crate::error::{ensure_len, Error, Result};

pub const SSIM_WINDOW: usize = 8;
pub const SSIM_K1: f64 = 0.01;
pub const SSIM_K2: f64 = 0.03;

/// Peak signal-to-noise ratio in dB, `10 log10(peak^2 / MSE)`. Identical
/// images give `+inf`.
pub fn psnr(reference: &[f64], candidate: &[f64], peak: f64) -> Result<f64> {
    ensure_len("psnr candidate", reference.len(), candidate.len())?;
    if reference.is_empty() {
        return Err(Error::InvalidArgument("psnr of empty images".into()));
    }
    if !(peak > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "psnr peak must be positive, got {peak}"
        )));
    }
    let mse = reference
        .iter()
        .zip(candidate)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        / reference.len() as f64;
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (peak * peak / mse).log10())
}

/// Mean structural similarity over all `8 x 8` windows (stride 1, uniform
/// weights, population statistics, `k1 = 0.01`, `k2 = 0.03`).
pub fn ssim(reference: &[f64], candidate: &[f64], height: usize, width: usize, peak: f64) -> Result<f64> {
    ensure_len("ssim reference", height * width, reference.len())?;
    ensure_len("ssim candidate", height * width, candidate.len())?;
    if height < SSIM_WINDOW || width < SSIM_WINDOW {
        return Err(Error::InvalidArgument(format!(
            "image {height}x{width} is smaller than the {SSIM_WINDOW}x{SSIM_WINDOW} window"
        )));
    }
    let c1 = (SSIM_K1 * peak).powi(2);
    let c2 = (SSIM_K2 * peak).powi(2);
    let n = (SSIM_WINDOW * SSIM_WINDOW) as f64;
    let mut total = 0.0;
    let mut count = 0usize;
    for i0 in 0..=height - SSIM_WINDOW {
        for j0 in 0..=width - SSIM_WINDOW {
            let (mut sx, mut sy, mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
            for i in i0..i0 + SSIM_WINDOW {
                for j in j0..j0 + SSIM_WINDOW {
                    let a = reference[i * width + j];
                    let b = candidate[i * width + j];
                    sx += a;
                    sy += b;
                    sxx += a * a;
                    syy += b * b;
                    sxy += a * b;
                }
            }
            let mx = sx / n;
            let my = sy / n;
            let vx = (sxx / n - mx * mx).max(0.0);
            let vy = (syy / n - my * my).max(0.0);
            let cov = sxy / n - mx * my;
            total += ((2.0 * mx * my + c1) * (2.0 * cov + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
            count += 1;
        }
    }
    Ok(total / count as f64)
}
