use crate::codec::ImageRaster;
use crate::{Error, Result};

pub const SSIM_WINDOW: usize = 11;
pub const SSIM_SIGMA: f64 = 1.5;
pub const SSIM_K1: f64 = 0.01;
pub const SSIM_K2: f64 = 0.03;
const DYNAMIC_RANGE: f64 = 255.0;

/// Rec.601 luma of an RGB raster, row-major, in `[0, 255]`.
pub fn luma(img: &ImageRaster) -> Vec<f64> {
    img.pixels()
        .chunks_exact(3)
        .map(|p| 0.299 * p[0] as f64 + 0.587 * p[1] as f64 + 0.114 * p[2] as f64)
        .collect()
}

fn gaussian(len: usize) -> Vec<f64> {
    let c = (len as f64 - 1.0) / 2.0;
    let w: Vec<f64> = (0..len)
        .map(|i| {
            let d = i as f64 - c;
            (-d * d / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp()
        })
        .collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|v| v / s).collect()
}

// valid-mode separable correlation; output is (h - kh + 1) x (w - kw + 1)
fn filter(src: &[f64], w: usize, h: usize, kx: &[f64], ky: &[f64]) -> Vec<f64> {
    let ow = w - kx.len() + 1;
    let oh = h - ky.len() + 1;
    let mut horiz = vec![0.0; h * ow];
    for y in 0..h {
        let row = &src[y * w..(y + 1) * w];
        for x in 0..ow {
            horiz[y * ow + x] = kx.iter().zip(&row[x..]).map(|(k, v)| k * v).sum();
        }
    }
    let mut out = vec![0.0; oh * ow];
    for y in 0..oh {
        for x in 0..ow {
            out[y * ow + x] = ky
                .iter()
                .enumerate()
                .map(|(j, k)| k * horiz[(y + j) * ow + x])
                .sum();
        }
    }
    out
}

/// Mean SSIM between two luma planes of `w x h`, averaged over the windows
/// that lie fully inside the image. Windows are Gaussian (`11x11`, σ = 1.5),
/// truncated to the image on axes shorter than 11.
pub fn ssim_luma(a: &[f64], b: &[f64], w: usize, h: usize) -> Result<f64> {
    if a.len() != w * h || b.len() != w * h {
        return Err(Error::DimensionMismatch(format!(
            "luma planes of {} and {} samples for {w}x{h}",
            a.len(),
            b.len()
        )));
    }
    if w == 0 || h == 0 {
        return Err(Error::InvalidInput("SSIM of an empty image".into()));
    }
    let kx = gaussian(w.min(SSIM_WINDOW));
    let ky = gaussian(h.min(SSIM_WINDOW));
    let c1 = (SSIM_K1 * DYNAMIC_RANGE).powi(2);
    let c2 = (SSIM_K2 * DYNAMIC_RANGE).powi(2);

    let aa: Vec<f64> = a.iter().map(|v| v * v).collect();
    let bb: Vec<f64> = b.iter().map(|v| v * v).collect();
    let ab: Vec<f64> = a.iter().zip(b).map(|(x, y)| x * y).collect();
    let mu_a = filter(a, w, h, &kx, &ky);
    let mu_b = filter(b, w, h, &kx, &ky);
    let e_aa = filter(&aa, w, h, &kx, &ky);
    let e_bb = filter(&bb, w, h, &kx, &ky);
    let e_ab = filter(&ab, w, h, &kx, &ky);

    let mut sum = 0.0;
    for i in 0..mu_a.len() {
        let (ma, mb) = (mu_a[i], mu_b[i]);
        let va = e_aa[i] - ma * ma;
        let vb = e_bb[i] - mb * mb;
        let cov = e_ab[i] - ma * mb;
        sum +=
            ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
    }
    Ok(sum / mu_a.len() as f64)
}

/// Mean SSIM on the Rec.601 luma of two equally sized rasters.
pub fn ssim(a: &ImageRaster, b: &ImageRaster) -> Result<f64> {
    if a.dimensions() != b.dimensions() {
        return Err(Error::DimensionMismatch(format!(
            "{:?} vs {:?}",
            a.dimensions(),
            b.dimensions()
        )));
    }
    let (w, h) = a.dimensions();
    ssim_luma(&luma(a), &luma(b), w as usize, h as usize)
}
