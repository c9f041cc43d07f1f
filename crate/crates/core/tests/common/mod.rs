#![allow(dead_code)]

use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Writes a binary dataset shaped like the packaged assay subset: `n` rows,
/// the first `positives` of them active, an id column and two descriptor
/// blocks `A` (`pa` columns) and `B` (`pb` columns). Actives are shifted in
/// the first few columns of each block, more strongly in `A`.
pub fn write_binary_dataset(path: &Path, n: usize, positives: usize, pa: usize, pb: usize, seed: u64) {
    write_binary_dataset_scaled(path, n, positives, pa, pb, seed, 1.0);
}

/// As `write_binary_dataset`, with the class shifts multiplied by `scale`.
pub fn write_binary_dataset_scaled(
    path: &Path,
    n: usize,
    positives: usize,
    pa: usize,
    pb: usize,
    seed: u64,
    scale: f64,
) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = std::fs::File::create(path).unwrap();
    let mut header = vec!["CID".to_string(), "Outcome".to_string()];
    header.extend((1..=pa).map(|j| format!("a{j}")));
    header.extend((1..=pb).map(|j| format!("b{j}")));
    writeln!(f, "{}", header.join(",")).unwrap();
    for i in 0..n {
        let y = usize::from(i < positives);
        let mut row = vec![format!("C{}", 1000 + i), y.to_string()];
        for j in 0..pa {
            let shift = if j < 3 { 2.0 * scale * y as f64 } else { 0.0 };
            let z: f64 = rng.sample(StandardNormal);
            row.push(format!("{}", z + shift));
        }
        for j in 0..pb {
            let shift = if j < 4 { 1.5 * scale * y as f64 } else { 0.0 };
            let z: f64 = rng.sample(StandardNormal);
            row.push(format!("{}", z + shift));
        }
        writeln!(f, "{}", row.join(",")).unwrap();
    }
}

/// Continuous-response dataset with a single descriptor block.
pub fn write_continuous_dataset(path: &Path, n: usize, p: usize, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = std::fs::File::create(path).unwrap();
    let mut header = vec!["y".to_string()];
    header.extend((1..=p).map(|j| format!("x{j}")));
    writeln!(f, "{}", header.join(",")).unwrap();
    for _ in 0..n {
        let x: Vec<f64> = (0..p).map(|_| rng.sample(StandardNormal)).collect();
        let noise: f64 = rng.sample(StandardNormal);
        let y = 2.0 * x[0] - x[1] + 0.5 * noise;
        let mut row = vec![y.to_string()];
        row.extend(x.iter().map(|v| v.to_string()));
        writeln!(f, "{}", row.join(",")).unwrap();
    }
}

/// Minimal well-formedness check: one root `svg` element and balanced,
/// properly nested tags.
pub fn svg_well_formed(svg: &str) -> Result<(), String> {
    let mut stack: Vec<String> = Vec::new();
    let mut rest = svg;
    let mut roots = 0;
    while let Some(start) = rest.find('<') {
        let end = rest[start..].find('>').ok_or("unterminated tag")? + start;
        let tag = &rest[start + 1..end];
        if let Some(name) = tag.strip_prefix('/') {
            let open = stack.pop().ok_or_else(|| format!("stray </{name}>"))?;
            if open != name.trim() {
                return Err(format!("</{name}> closes <{open}>"));
            }
        } else {
            let name: String = tag.chars().take_while(|c| !c.is_whitespace() && *c != '/').collect();
            if stack.is_empty() {
                roots += 1;
                if name != "svg" {
                    return Err(format!("root element is <{name}>"));
                }
            }
            if !tag.ends_with('/') {
                stack.push(name);
            }
        }
        rest = &rest[end + 1..];
    }
    if !stack.is_empty() {
        return Err(format!("unclosed <{}>", stack.join(">, <")));
    }
    if roots != 1 {
        return Err(format!("{roots} root elements"));
    }
    Ok(())
}
