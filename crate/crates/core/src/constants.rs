//! Information constants derived from c, hbar and G_N.
//!
//! With the minimal mean distance fixed at one bit, the Planck time sets
//! every other scale:
//!
//! | constant | closed form | units |
//! |----------|-------------|-------|
//! | `nu_c`   | `lambda_c / t_P` = sqrt(lambda_c^2 c^5 / (hbar G_N)) | bit/s |
//! | `Q_c`    | `lambda_c^3 / t_P` | bit^3/s |
//! | `hbar_c` | `lambda_c^5 c^5 / (2 pi hbar G_N)` = `Q_c nu_c^2 t_P / (2 pi)` | bit^5/s^2 |
//!
//! In natural mode `lambda_c = t_P = 1`, which forces `nu_c = Q_c = 1` and
//! `hbar_c = 1/(2 pi)`. Numerical modules work in natural units.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum UnitMode {
    #[serde(rename = "SI", alias = "si")]
    Si,
    #[default]
    #[serde(rename = "NATURAL", alias = "natural")]
    Natural,
}

impl fmt::Display for UnitMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnitMode::Si => f.write_str("SI"),
            UnitMode::Natural => f.write_str("NATURAL"),
        }
    }
}

impl std::str::FromStr for UnitMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "si" => Ok(UnitMode::Si),
            "natural" => Ok(UnitMode::Natural),
            other => Err(Error::invalid("unit_mode", format!("unknown unit mode `{other}`"))),
        }
    }
}

/// Fundamental physical constants in SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    /// Speed of light (m/s).
    pub c: f64,
    /// Reduced Planck constant (J s).
    pub hbar: f64,
    /// Gravitational constant (m^3 kg^-1 s^-2).
    #[serde(rename = "G_N")]
    pub g_n: f64,
}

impl PhysicalConstants {
    /// CODATA 2002 recommended values.
    pub const CODATA_2002: PhysicalConstants = PhysicalConstants {
        c: 299_792_458.0,
        hbar: 1.054_571_68e-34,
        g_n: 6.6742e-11,
    };

    /// Planck time sqrt(hbar G / c^5).
    pub fn planck_time(&self) -> f64 {
        (self.hbar * self.g_n / self.c.powi(5)).sqrt()
    }

    /// Planck length sqrt(hbar G / c^3).
    pub fn planck_length(&self) -> f64 {
        (self.hbar * self.g_n / self.c.powi(3)).sqrt()
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [("c", self.c), ("hbar", self.hbar), ("G_N", self.g_n)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(
                    "derive_constants",
                    format!("physical constant {name} = {v} must be positive and finite"),
                ));
            }
        }
        Ok(())
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::CODATA_2002
    }
}

/// The derived constant set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InfoConstants {
    /// Minimal mean distance (bit).
    pub lambda_c: f64,
    /// Invariant information-transfer velocity (bit/s).
    pub nu_c: f64,
    /// Generalized information emotion constant (bit^3/s).
    #[serde(rename = "Q_c")]
    pub q_c: f64,
    /// Information action constant (bit^5/s^2).
    pub hbar_c: f64,
    /// Planck time (s).
    #[serde(rename = "t_P")]
    pub t_p: f64,
    /// Planck length (m).
    #[serde(rename = "l_P")]
    pub l_p: f64,
    pub unit_mode: UnitMode,
}

impl InfoConstants {
    /// The normalized set with `lambda_c = t_P = 1`.
    pub const NATURAL: InfoConstants = InfoConstants {
        lambda_c: 1.0,
        nu_c: 1.0,
        q_c: 1.0,
        hbar_c: 1.0 / (2.0 * PI),
        t_p: 1.0,
        l_p: 1.0,
        unit_mode: UnitMode::Natural,
    };

    pub fn natural() -> Self {
        Self::NATURAL
    }

    /// Units string for each named constant in the current mode.
    pub fn units(&self, key: &str) -> &'static str {
        match (self.unit_mode, key) {
            (UnitMode::Si, "lambda_c") => "bit",
            (UnitMode::Si, "nu_c") => "bit/s",
            (UnitMode::Si, "Q_c") => "bit^3/s",
            (UnitMode::Si, "hbar_c") => "bit^5/s^2",
            (UnitMode::Si, "t_P") => "s",
            (UnitMode::Si, "l_P") => "m",
            (UnitMode::Natural, "lambda_c") => "lambda_c",
            (UnitMode::Natural, "nu_c") => "lambda_c/t_P",
            (UnitMode::Natural, "Q_c") => "lambda_c^3/t_P",
            (UnitMode::Natural, "hbar_c") => "lambda_c^5/t_P^2",
            (UnitMode::Natural, "t_P") => "t_P",
            (UnitMode::Natural, "l_P") => "l_P",
            _ => "",
        }
    }

    /// `(key, value)` pairs in a fixed order.
    pub fn entries(&self) -> [(&'static str, f64); 6] {
        [
            ("lambda_c", self.lambda_c),
            ("nu_c", self.nu_c),
            ("Q_c", self.q_c),
            ("hbar_c", self.hbar_c),
            ("t_P", self.t_p),
            ("l_P", self.l_p),
        ]
    }
}

/// Splits `x > 0` into `(mantissa, exponent)` with `x = mantissa * 2^exponent`
/// and `1 <= mantissa < 2`.
pub fn binary_exponent_form(x: f64) -> (f64, i32) {
    assert!(x > 0.0 && x.is_finite(), "binary form needs a positive finite value");
    let mut e = x.log2().floor() as i32;
    let mut m = x / 2f64.powi(e);
    // log2 may land one ulp on the wrong side of an integer
    if m >= 2.0 {
        m /= 2.0;
        e += 1;
    } else if m < 1.0 {
        m *= 2.0;
        e -= 1;
    }
    (m, e)
}

/// Derives the information constants from physical constants.
pub fn derive_constants(phys: &PhysicalConstants, mode: UnitMode) -> Result<InfoConstants> {
    phys.validate()?;
    Ok(match mode {
        UnitMode::Natural => InfoConstants::NATURAL,
        UnitMode::Si => {
            let lambda_c = 1.0;
            let hg = phys.hbar * phys.g_n;
            let c5 = phys.c.powi(5);
            InfoConstants {
                lambda_c,
                nu_c: (lambda_c * lambda_c * c5 / hg).sqrt(),
                q_c: (lambda_c.powi(6) * c5 / hg).sqrt(),
                hbar_c: lambda_c.powi(5) * c5 / (2.0 * PI * hg),
                t_p: phys.planck_time(),
                l_p: phys.planck_length(),
                unit_mode: UnitMode::Si,
            }
        }
    })
}
