use std::io::Write;

use crate::error::Result;

use super::profile::{PhiColumns, RadialProfile};

pub const PROFILE_VERSION: &str = "profile/1";
pub const PROFILE_HEADER: &str = "r,H,D,G,I,N,W,M,Phi,Phi_tilde";

fn num(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v:.16e}")
    }
}

fn write_preamble<W: Write>(w: &mut W, preamble: &str) -> Result<()> {
    writeln!(w, "# version = {PROFILE_VERSION}")?;
    for line in preamble.lines() {
        writeln!(w, "# {line}")?;
    }
    Ok(())
}

/// Profile table with 17 significant digits. `preamble` lines are written
/// first as `#` comments; missing columns are written as `nan`.
pub fn write_profile_csv<W: Write>(
    mut w: W,
    preamble: &str,
    profile: &RadialProfile,
    kappa: f64,
    monneau: Option<&[f64]>,
    phi: Option<&PhiColumns>,
) -> Result<()> {
    write_preamble(&mut w, preamble)?;
    writeln!(w, "{PROFILE_HEADER}")?;
    let freq = profile.frequency();
    let weiss = profile.weiss(kappa);
    for i in 0..profile.len() {
        let m = monneau.map_or(f64::NAN, |c| c[i]);
        let (p, pt) = phi.map_or((f64::NAN, f64::NAN), |c| (c.phi[i], c.phi_tilde[i]));
        let row = [
            profile.radii[i],
            profile.h[i],
            profile.d[i],
            profile.g[i],
            profile.i[i],
            freq[i],
            weiss.w[i],
            m,
            p,
            pt,
        ];
        let cells: Vec<String> = row.iter().map(|&v| num(v)).collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    Ok(())
}

/// Two-column `r value` table for plotting.
pub fn write_pairs<W: Write>(mut w: W, preamble: &str, name: &str, radii: &[f64], values: &[f64]) -> Result<()> {
    write_preamble(&mut w, preamble)?;
    writeln!(w, "# r {name}")?;
    for (r, v) in radii.iter().zip(values) {
        writeln!(w, "{} {}", num(*r), num(*v))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let p = RadialProfile {
            n: 2,
            center: vec![0.0, 0.0],
            radii: vec![0.1, 0.2, 0.3],
            h: vec![1.0, 2.0, 3.0],
            d: vec![1.0, 1.0, 1.0],
            g: vec![0.0; 3],
            i: vec![0.0; 3],
            spacing: 0.01,
        };
        let phi = p.phi_k(2, 0.0).unwrap();
        let mut buf = Vec::new();
        write_profile_csv(&mut buf, "n = 2", &p, 1.5, None, Some(&phi)).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# version = profile/1");
        assert_eq!(lines[1], "# n = 2");
        assert_eq!(lines[2], PROFILE_HEADER);
        assert_eq!(lines.len(), 6);
        assert!(lines[3].starts_with("1.0000000000000001e-1,1.0000000000000000e0,"));
        assert_eq!(lines[3].split(',').nth(7), Some("nan"));
    }
}
