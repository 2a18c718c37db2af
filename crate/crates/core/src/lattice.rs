//! Lattice point generators used by packing and covering constructions.

/// Points of the lattice with the given `spacing` lying in the closed box
/// `[lo, hi]`. Dimension 2 uses the triangular lattice, other dimensions the
/// cubic lattice. The lattice contains the origin.
pub fn lattice_points(dim: usize, spacing: f64, lo: &[f64], hi: &[f64]) -> Vec<Vec<f64>> {
    assert!(spacing > 0.0);
    assert_eq!(lo.len(), dim);
    assert_eq!(hi.len(), dim);
    if dim == 2 {
        triangular(spacing, lo, hi)
    } else {
        cubic(dim, spacing, lo, hi)
    }
}

fn triangular(spacing: f64, lo: &[f64], hi: &[f64]) -> Vec<Vec<f64>> {
    let dy = spacing * 3f64.sqrt() / 2.0;
    let j0 = (lo[1] / dy).ceil() as i64;
    let j1 = (hi[1] / dy).floor() as i64;
    let mut out = Vec::new();
    for j in j0..=j1 {
        let y = j as f64 * dy;
        let off = if j.rem_euclid(2) == 1 { spacing / 2.0 } else { 0.0 };
        let i0 = ((lo[0] - off) / spacing).ceil() as i64;
        let i1 = ((hi[0] - off) / spacing).floor() as i64;
        for i in i0..=i1 {
            out.push(vec![i as f64 * spacing + off, y]);
        }
    }
    out
}

fn cubic(dim: usize, spacing: f64, lo: &[f64], hi: &[f64]) -> Vec<Vec<f64>> {
    let ranges: Vec<(i64, i64)> =
        (0..dim).map(|k| ((lo[k] / spacing).ceil() as i64, (hi[k] / spacing).floor() as i64)).collect();
    if ranges.iter().any(|(a, b)| a > b) {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut idx: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    loop {
        out.push(idx.iter().map(|&i| i as f64 * spacing).collect());
        let mut k = 0;
        while k < dim && idx[k] == ranges[k].1 {
            idx[k] = ranges[k].0;
            k += 1;
        }
        if k == dim {
            break;
        }
        idx[k] += 1;
    }
    out
}

/// Spacing of the lattice whose balls of radius `radius` cover space:
/// triangular in the plane (circumradius `radius`), intervals of length
/// `2·radius` on the line, cubes of circumradius `radius` otherwise.
pub fn covering_spacing(dim: usize, radius: f64) -> f64 {
    match dim {
        1 => 2.0 * radius,
        2 => radius * 3f64.sqrt(),
        d => 2.0 * radius / (d as f64).sqrt(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        assert_eq!(lattice_points(1, 1.0, &[-2.0], &[2.0]).len(), 5);
        assert_eq!(lattice_points(3, 1.0, &[0.0; 3], &[1.0; 3]).len(), 8);
        let t = lattice_points(2, 1.0, &[-0.1, -0.1], &[1.1, 0.9]);
        // Row 0: x = 0, 1; row 1 (y ≈ 0.866): x = 0.5.
        assert_eq!(t.len(), 3);
    }
}
