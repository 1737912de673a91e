//! Naive single-threaded saliency, written for clarity rather than speed.
//!
//! Everything is plain nested loops over `Vec<Vec<f64>>` grids indexed
//! `[y][x]`: the low-pass filter is applied as one 2-D stencil evaluated only
//! at the retained samples, the Gabor kernel is recomputed from its formula,
//! and resampling evaluates the bilinear formula per pixel. It shares no code
//! with [`crate::saliency`] beyond the input and configuration types.

use crate::config::PipelineConfig;
use crate::image::{ImageBuffer, RgbImage};
use crate::Result;

type Grid = Vec<Vec<f64>>;

const LEVELS: usize = 9;
const PAIRS: [(usize, usize); 6] = [(2, 5), (2, 6), (3, 6), (3, 7), (4, 7), (4, 8)];
const ANGLES: [f64; 4] = [0.0, 45.0, 90.0, 135.0];

fn width(g: &Grid) -> usize {
    g[0].len()
}

fn height(g: &Grid) -> usize {
    g.len()
}

fn zeros(w: usize, h: usize) -> Grid {
    vec![vec![0.0; w]; h]
}

fn clamp(i: i64, n: usize) -> usize {
    if i < 0 {
        0
    } else if i >= n as i64 {
        n - 1
    } else {
        i as usize
    }
}

/// One pyramid step: the 2-D outer-product stencil at even positions only.
fn downsample(src: &Grid, k: &[f64]) -> Grid {
    let (w, h) = (width(src), height(src));
    let (nw, nh) = ((w + 1) / 2, (h + 1) / 2);
    let sum: f64 = k.iter().sum();
    let r = (k.len() / 2) as i64;
    let mut out = zeros(nw, nh);
    for y in 0..nh {
        for x in 0..nw {
            let mut acc = 0.0;
            for j in 0..k.len() {
                for i in 0..k.len() {
                    let sy = clamp(2 * y as i64 + j as i64 - r, h);
                    let sx = clamp(2 * x as i64 + i as i64 - r, w);
                    acc += (k[j] / sum) * (k[i] / sum) * src[sy][sx];
                }
            }
            out[y][x] = acc;
        }
    }
    out
}

fn pyramid(base: Grid, k: &[f64]) -> Vec<Grid> {
    let mut p = vec![base];
    while p.len() < LEVELS {
        let next = downsample(p.last().unwrap(), k);
        p.push(next);
    }
    p
}

/// Position in a source axis of length `src` of destination sample `i`
/// when the destination has length `dst`; the lengths differ by ceil-halving.
fn source_position(i: usize, src: usize, dst: usize) -> f64 {
    let mut octaves: i32 = 0;
    if src >= dst {
        let mut n = src;
        while n > dst {
            n = (n + 1) / 2;
            octaves += 1;
        }
    } else {
        let mut n = dst;
        while n > src {
            n = (n + 1) / 2;
            octaves -= 1;
        }
    }
    let pos = i as f64 * 2f64.powi(octaves);
    pos.min((src - 1) as f64)
}

fn bilinear(src: &Grid, w: usize, h: usize) -> Grid {
    let (sw, sh) = (width(src), height(src));
    let mut out = zeros(w, h);
    for y in 0..h {
        let py = source_position(y, sh, h);
        let y0 = py.floor() as usize;
        let y1 = (y0 + 1).min(sh - 1);
        let fy = py - y0 as f64;
        for x in 0..w {
            let px = source_position(x, sw, w);
            let x0 = px.floor() as usize;
            let x1 = (x0 + 1).min(sw - 1);
            let fx = px - x0 as f64;
            out[y][x] = (1.0 - fy) * ((1.0 - fx) * src[y0][x0] + fx * src[y0][x1])
                + fy * ((1.0 - fx) * src[y1][x0] + fx * src[y1][x1]);
        }
    }
    out
}

fn center_surround(c: &Grid, s: &Grid) -> Grid {
    let up = bilinear(s, width(c), height(c));
    let mut out = zeros(width(c), height(c));
    for y in 0..height(c) {
        for x in 0..width(c) {
            out[y][x] = (c[y][x] - up[y][x]).abs();
        }
    }
    out
}

fn gabor(src: &Grid, cfg: &PipelineConfig, theta_deg: f64) -> Grid {
    let p = &cfg.gabor;
    let n = p.kernel_size;
    let r = (n / 2) as i64;
    let t = theta_deg.to_radians();
    let mut k = vec![vec![0.0; n]; n];
    for j in 0..n {
        for i in 0..n {
            let (dx, dy) = ((i as i64 - r) as f64, (j as i64 - r) as f64);
            let xp = dx * t.sin() + dy * t.cos();
            let yp = dx * t.cos() - dy * t.sin();
            k[j][i] = (-(xp * xp + p.aspect * p.aspect * yp * yp) / (2.0 * p.sigma * p.sigma))
                .exp()
                * (2.0 * std::f64::consts::PI * xp / p.wavelength + p.phase_deg.to_radians()).cos();
        }
    }
    let mean = k.iter().flatten().sum::<f64>() / (n * n) as f64;
    let mut energy = 0.0;
    for row in k.iter_mut() {
        for v in row.iter_mut() {
            *v -= mean;
            energy += *v * *v;
        }
    }
    let norm = energy.sqrt();
    let (w, h) = (width(src), height(src));
    let mut out = zeros(w, h);
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for j in 0..n {
                for i in 0..n {
                    let sy = clamp(y as i64 + j as i64 - r, h);
                    let sx = clamp(x as i64 + i as i64 - r, w);
                    acc += k[j][i] / norm * src[sy][sx];
                }
            }
            out[y][x] = acc.abs();
        }
    }
    out
}

fn normalize(m: &Grid) -> Grid {
    let (w, h) = (width(m), height(m));
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for row in m {
        for &v in row {
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    if hi <= lo {
        return zeros(w, h);
    }
    let mut s = zeros(w, h);
    let (mut px, mut py, mut best) = (0, 0, f64::NEG_INFINITY);
    for y in 0..h {
        for x in 0..w {
            s[y][x] = (m[y][x] - lo) / (hi - lo);
            if s[y][x] > best {
                best = s[y][x];
                px = x;
                py = y;
            }
        }
    }
    let mut total = 0.0;
    let mut n = 0;
    for y in 0..h {
        for x in 0..w {
            if (x, y) == (px, py) || s[y][x] <= 0.0 {
                continue;
            }
            let mut is_max = true;
            for ny in y as i64 - 1..=y as i64 + 1 {
                for nx in x as i64 - 1..=x as i64 + 1 {
                    if ny < 0 || nx < 0 || ny >= h as i64 || nx >= w as i64 {
                        continue;
                    }
                    if s[ny as usize][nx as usize] > s[y][x] {
                        is_max = false;
                    }
                }
            }
            if is_max {
                total += s[y][x];
                n += 1;
            }
        }
    }
    let mbar = if n > 0 { total / n as f64 } else { 0.0 };
    let gain = (1.0 - mbar) * (1.0 - mbar);
    for row in s.iter_mut() {
        for v in row.iter_mut() {
            *v *= gain;
        }
    }
    s
}

fn add_into(acc: &mut Grid, m: &Grid) {
    for (ra, rm) in acc.iter_mut().zip(m) {
        for (a, b) in ra.iter_mut().zip(rm) {
            *a += b;
        }
    }
}

fn across_scale(maps: &[Grid], w: usize, h: usize) -> Grid {
    let mut acc = zeros(w, h);
    for m in maps {
        add_into(&mut acc, &bilinear(m, w, h));
    }
    acc
}

fn combine(a: &Grid, b: &Grid, f: impl Fn(f64, f64) -> f64) -> Grid {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(&x, &y)| f(x, y)).collect())
        .collect()
}

/// Saliency map of `img` at the fusion scale.
pub fn reference_saliency(img: &RgbImage, cfg: &PipelineConfig) -> Result<ImageBuffer> {
    cfg.validate()?;
    let (w, h) = img.dims();
    let k = &cfg.downsample_kernel;
    let mut intensity = zeros(w, h);
    let mut planes = [zeros(w, h), zeros(w, h), zeros(w, h)];
    let mut imax: f64 = 0.0;
    for y in 0..h {
        for x in 0..w {
            let [r, g, b] = img.pixel(x, y);
            intensity[y][x] = (r + g + b) / 3.0;
            imax = imax.max(intensity[y][x]);
        }
    }
    for y in 0..h {
        for x in 0..w {
            let i = intensity[y][x];
            let px = img.pixel(x, y);
            for c in 0..3 {
                planes[c][y][x] = if i > cfg.hue_decouple_threshold * imax {
                    px[c] / i
                } else {
                    0.0
                };
            }
        }
    }
    let ip = pyramid(intensity, k);
    let [rp, gp, bp] = planes.map(|p| pyramid(p, k));

    // Broadly tuned channels per level.
    let mut rr = Vec::new();
    let mut gg = Vec::new();
    let mut bb = Vec::new();
    let mut yy = Vec::new();
    for l in 0..LEVELS {
        let (lw, lh) = (width(&rp[l]), height(&rp[l]));
        let (mut a, mut b2, mut c, mut d) =
            (zeros(lw, lh), zeros(lw, lh), zeros(lw, lh), zeros(lw, lh));
        for y in 0..lh {
            for x in 0..lw {
                let (r, g, b) = (rp[l][y][x], gp[l][y][x], bp[l][y][x]);
                a[y][x] = f64::max(0.0, r - (g + b) / 2.0);
                b2[y][x] = f64::max(0.0, g - (r + b) / 2.0);
                c[y][x] = f64::max(0.0, b - (r + g) / 2.0);
                d[y][x] = f64::max(0.0, (r + g) / 2.0 - (r - g).abs() / 2.0 - b);
            }
        }
        rr.push(a);
        gg.push(b2);
        bb.push(c);
        yy.push(d);
    }
    let minus = |a: &Grid, b: &Grid| combine(a, b, |x, y| x - y);

    let fs = cfg.fusion_scale as usize;
    let (fw, fh) = (width(&ip[fs]), height(&ip[fs]));

    let mut i_maps = Vec::new();
    let mut c_maps = Vec::new();
    for &(c, s) in &PAIRS {
        i_maps.push(normalize(&center_surround(&ip[c], &ip[s])));
        let rg = center_surround(&minus(&rr[c], &gg[c]), &minus(&gg[s], &rr[s]));
        let by = center_surround(&minus(&bb[c], &yy[c]), &minus(&yy[s], &bb[s]));
        c_maps.push(combine(&normalize(&rg), &normalize(&by), |a, b| a + b));
    }
    let i_bar = across_scale(&i_maps, fw, fh);
    let c_bar = across_scale(&c_maps, fw, fh);

    let mut o_bar = zeros(fw, fh);
    for theta in ANGLES {
        let op: Vec<Grid> = ip.iter().map(|l| gabor(l, cfg, theta)).collect();
        let maps: Vec<Grid> = PAIRS
            .iter()
            .map(|&(c, s)| normalize(&center_surround(&op[c], &op[s])))
            .collect();
        add_into(&mut o_bar, &normalize(&across_scale(&maps, fw, fh)));
    }

    let (ni, nc, no) = (normalize(&i_bar), normalize(&c_bar), normalize(&o_bar));
    let mut data = Vec::with_capacity(fw * fh);
    for y in 0..fh {
        for x in 0..fw {
            data.push((ni[y][x] + nc[y][x] + no[y][x]) / 3.0);
        }
    }
    ImageBuffer::from_vec(fw, fh, data)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn source_positions() {
        assert_eq!(source_position(3, 40, 640), 3.0 / 16.0);
        assert_eq!(source_position(3, 640, 40), 48.0);
        // Clamped to the last sample when the coarse grid runs short.
        assert_eq!(source_position(9, 5, 10), 4.0);
    }

    #[test]
    fn flat_image_has_flat_saliency() {
        let img = RgbImage::gray(64, 48, 0.4).unwrap();
        let s = reference_saliency(&img, &PipelineConfig::default()).unwrap();
        assert_eq!(s.dims(), (4, 3));
        assert!(s.data().iter().all(|&v| v == 0.0));
    }
}
