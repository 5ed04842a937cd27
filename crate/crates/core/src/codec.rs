//! JSON encodings of grid objects. Rationals travel as `"p/q"` strings;
//! plain JSON numbers and decimal strings are accepted on input.

use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::grid::{CellId, DyadicInterval, DyadicRect, Grain, Measure, RectFamily, WeightFamily};
use crate::Rational;

/// Parses `"p/q"`, `"p"` or a decimal such as `"0.125"` / `"1e-3"` exactly.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Malformed(format!("not a rational: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    let num = BigInt::from_str(if digits == "-" || digits == "+" { "0" } else { &digits })
        .map_err(|_| bad())?;
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10u8);
    let r = if scale >= 0 {
        Rational::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(num, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(r)
}

/// Always `p/q`, even for integers.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Decimal with 12 significant digits; switches to exponent form outside
/// `1e-6 ≤ |x| < 1e15`.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if (-6..15).contains(&mag) {
        format!("{:.*}", (11 - mag).max(0) as usize, x)
    } else {
        format!("{x:.11e}")
    }
}

pub(crate) fn rational_to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// serde adapter for a single rational field.
pub mod ratio_str {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let v = RationalValue::deserialize(d)?;
        v.into_rational().map_err(serde::de::Error::custom)
    }
}

/// serde adapter for an optional rational field.
pub mod opt_ratio_str {
    use super::*;

    pub fn serialize<S: Serializer>(
        r: &Option<Rational>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_some(&format_rational(r)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Option<Rational>, D::Error> {
        let v = Option::<RationalValue>::deserialize(d)?;
        v.map(|v| v.into_rational())
            .transpose()
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RationalValue {
    Str(String),
    Num(serde_json::Number),
}

impl RationalValue {
    fn into_rational(self) -> Result<Rational> {
        match self {
            RationalValue::Str(s) => parse_rational(&s),
            RationalValue::Num(n) => parse_rational(&n.to_string()),
        }
    }
}

#[derive(Serialize, Deserialize)]
pub(crate) struct RectRepr {
    hl: u32,
    hi: u64,
    vl: u32,
    vi: u64,
}

impl TryFrom<RectRepr> for DyadicRect {
    type Error = Error;
    fn try_from(r: RectRepr) -> Result<Self> {
        Ok(DyadicRect::new(
            DyadicInterval::new(r.hl, r.hi)?,
            DyadicInterval::new(r.vl, r.vi)?,
        ))
    }
}

impl From<DyadicRect> for RectRepr {
    fn from(r: DyadicRect) -> Self {
        RectRepr {
            hl: r.h.level,
            hi: r.h.index,
            vl: r.v.level,
            vi: r.v.index,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct CellMass {
    ix: u64,
    iy: u64,
    #[serde(with = "ratio_str")]
    mass: Rational,
}

#[derive(Serialize, Deserialize)]
pub(crate) struct MeasureRepr {
    grain: u32,
    cells: Vec<CellMass>,
}

impl TryFrom<MeasureRepr> for Measure {
    type Error = Error;
    fn try_from(m: MeasureRepr) -> Result<Self> {
        let grain = Grain::new(m.grain)?;
        Measure::from_masses(
            grain,
            m.cells.into_iter().map(|c| (CellId::new(c.ix, c.iy), c.mass)),
        )
    }
}

impl From<Measure> for MeasureRepr {
    fn from(m: Measure) -> Self {
        MeasureRepr {
            grain: m.grain().n(),
            cells: m
                .iter()
                .map(|(c, mass)| CellMass {
                    ix: c.ix,
                    iy: c.iy,
                    mass: mass.clone(),
                })
                .collect(),
        }
    }
}

#[derive(Serialize, Deserialize)]
pub(crate) struct FamilyRepr {
    grain: u32,
    rects: Vec<DyadicRect>,
}

impl TryFrom<FamilyRepr> for RectFamily {
    type Error = Error;
    fn try_from(f: FamilyRepr) -> Result<Self> {
        RectFamily::from_rects(Grain::new(f.grain)?, f.rects)
    }
}

impl From<RectFamily> for FamilyRepr {
    fn from(f: RectFamily) -> Self {
        FamilyRepr {
            grain: f.grain().n(),
            rects: f.iter().copied().collect(),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct Override {
    rect: DyadicRect,
    #[serde(with = "ratio_str")]
    value: Rational,
}

#[derive(Serialize, Deserialize)]
pub(crate) struct WeightsRepr {
    grain: u32,
    #[serde(with = "ratio_str")]
    default: Rational,
    #[serde(default)]
    overrides: Vec<Override>,
}

impl TryFrom<WeightsRepr> for WeightFamily {
    type Error = Error;
    fn try_from(w: WeightsRepr) -> Result<Self> {
        let mut out = WeightFamily::constant(Grain::new(w.grain)?, w.default)?;
        for o in w.overrides {
            out.set(o.rect, o.value)?;
        }
        Ok(out)
    }
}

impl From<WeightFamily> for WeightsRepr {
    fn from(w: WeightFamily) -> Self {
        WeightsRepr {
            grain: w.grain().n(),
            default: w.default_value().clone(),
            overrides: w
                .overrides()
                .map(|(r, v)| Override {
                    rect: *r,
                    value: v.clone(),
                })
                .collect(),
        }
    }
}
