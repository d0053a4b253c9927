//! Golden densities with closed-form factors or determinants.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numcore::{LaurentPoly, LaurentPolyMatrix};

pub const FIXTURE_NAMES: [&str; 2] = ["ieee0", "sa4"];

#[derive(Clone, Debug, Serialize)]
pub struct Fixture {
    pub name: &'static str,
    pub density: LaurentPolyMatrix,
    /// A causal factor with `density = F F*`, when one is known in closed form.
    pub known_factor: Option<LaurentPolyMatrix>,
    pub det: LaurentPoly,
    pub notes: &'static str,
}

pub fn fixture(name: &str) -> Result<Fixture> {
    match name.to_ascii_lowercase().as_str() {
        "ieee0" => Ok(ieee0()),
        "sa4" => Ok(sa4()),
        _ => Err(Error::UnknownFixture(name.to_string())),
    }
}

fn real_matrix(entries: [LaurentPoly; 4]) -> LaurentPolyMatrix {
    LaurentPolyMatrix::from_entries(2, 2, &entries).expect("2x2 entries")
}

fn ieee0() -> Fixture {
    let p = LaurentPoly::from_real;
    let density = real_matrix([
        p(-1, &[2.0, 6.0, 2.0]),
        p(-1, &[11.0, 22.0, 7.0]),
        p(-1, &[7.0, 22.0, 11.0]),
        p(-1, &[38.0, 84.0, 38.0]),
    ]);
    let factor = real_matrix([p(0, &[2.0, 1.0]), p(0, &[1.0, 0.0]), p(0, &[7.0, 5.0]), p(0, &[3.0, 1.0])]);
    Fixture {
        name: "ieee0",
        density,
        known_factor: Some(factor),
        det: p(-2, &[-1.0, 0.0, 2.0, 0.0, -1.0]),
        notes: "factor [[2+z, 1], [7+5z, 3+z]]; det S = -z^-2 + 2 - z^2 vanishes at z = ±1",
    }
}

fn sa4() -> Fixture {
    let sq = 15f64.sqrt();
    let (a, ab) = (4.0 + sq, 4.0 - sq);
    let c3 = (1.0 - 4.0 * ab) / 64.0;
    let c1 = (1.0 + 4.0 * a) / 64.0;
    let (e3, e1) = (ab / 16.0, a / 16.0);
    let p = LaurentPoly::from_real;
    let density = real_matrix([
        p(-3, &[-c3, 0.0, c1, 1.0, c1, 0.0, -c3]),
        p(-3, &[e3, 0.0, -e1, 0.0, e1, 0.0, -e3]),
        p(-3, &[-e3, 0.0, e1, 0.0, -e1, 0.0, e3]),
        p(-3, &[c3, 0.0, -c1, 1.0, -c1, 0.0, c3]),
    ]);
    // z^-6 (z^2 - 1)^4 (z^2 + 1)^2 scaled by (8ᾱ - 1)/4096
    let z2m1 = p(0, &[-1.0, 0.0, 1.0]);
    let z2p1 = p(0, &[1.0, 0.0, 1.0]);
    let sq1 = z2m1.mul(&z2m1);
    let shape = sq1.mul(&sq1).mul(&z2p1).mul(&z2p1);
    let scale = (8.0 * ab - 1.0) / 4096.0;
    let det = LaurentPoly::new(-6, shape.coeffs().iter().map(|c| c * scale).collect());
    Fixture {
        name: "sa4",
        density,
        known_factor: None,
        det,
        notes: "alpha = 4 + sqrt(15); det S = (8*conj(alpha) - 1)/4096 z^-6 (z+1)^4 (z-1)^4 (z+i)^2 (z-i)^2",
    }
}
