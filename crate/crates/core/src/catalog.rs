//! Named energies and maps, as selected on the command line.

use std::f64::consts::E;
use std::fmt;
use std::str::FromStr;

use crate::conformal::{ComplexMoebius, Deformation, MirroredInversion};
use crate::convexity::{FnSvFunction, LinearDistortionG, SingularValueFunction};
use crate::energy::{
    CompositeEnergy, DistortionEnergy, Energy, FiniteDifference, FnProfile, Iso3DEnergy, IsochoricDirichlet,
    KlinSquaredMinusOne, MinusOne, SquareMinusOne, VolumetricTerm,
};
use crate::error::{Error, Result};
use crate::linearized::QuadraticApprox;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnergyKind {
    /// `K_lin² − 1` (planar).
    Iso2dKlin2,
    /// `K − 1` with `K = ½‖F‖²/det F` (planar).
    Iso2dPsi,
    /// `‖F‖²/det(F)^{2/3} − 3`.
    Iso3d,
    /// `‖F‖²/det F − 2 + f(det F)`.
    Composite2d,
    /// `‖F‖²/det(F)^{2/3} − 3 + f(det F)`.
    Composite3d,
}

impl EnergyKind {
    pub const ALL: [EnergyKind; 5] =
        [Self::Iso2dKlin2, Self::Iso2dPsi, Self::Iso3d, Self::Composite2d, Self::Composite3d];

    pub fn dim(self) -> usize {
        match self {
            Self::Iso3d | Self::Composite3d => 3,
            _ => 2,
        }
    }

    pub fn is_composite(self) -> bool {
        matches!(self, Self::Composite2d | Self::Composite3d)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Iso2dKlin2 => "iso2d-klin2",
            Self::Iso2dPsi => "iso2d-psi",
            Self::Iso3d => "iso3d",
            Self::Composite2d => "composite2d",
            Self::Composite3d => "composite3d",
        }
    }

    /// The planar energy; `c` is the splice point of the volumetric term.
    pub fn planar(self, c: f64, fd: bool) -> Result<Box<dyn Energy<2>>> {
        let e: Box<dyn Energy<2>> = match self {
            Self::Iso2dKlin2 => Box::new(KlinSquaredMinusOne::klin_squared()),
            Self::Iso2dPsi => Box::new(DistortionEnergy::new(MinusOne)),
            Self::Composite2d => Box::new(CompositeEnergy::new(IsochoricDirichlet::<2>, VolumetricTerm::new(c)?)),
            _ => return Err(self.wrong_dim(2)),
        };
        Ok(if fd { Box::new(FiniteDifference(e)) } else { e })
    }

    pub fn spatial(self, c: f64, fd: bool) -> Result<Box<dyn Energy<3>>> {
        let e: Box<dyn Energy<3>> = match self {
            Self::Iso3d => Box::new(Iso3DEnergy::default()),
            Self::Composite3d => Box::new(CompositeEnergy::new(Iso3DEnergy::default(), VolumetricTerm::new(c)?)),
            _ => return Err(self.wrong_dim(3)),
        };
        Ok(if fd { Box::new(FiniteDifference(e)) } else { e })
    }

    /// The energy as `g(λ₁, λ₂)`, for the isochoric planar energies.
    pub fn singular_value_function(self) -> Option<Box<dyn SingularValueFunction>> {
        match self {
            Self::Iso2dKlin2 => Some(Box::new(LinearDistortionG::new(SquareMinusOne))),
            // K − 1 = ½(r + 1/r) − 1 with r = λ_max/λ_min
            Self::Iso2dPsi => Some(Box::new(LinearDistortionG::new(FnProfile {
                value: |r: f64| 0.5 * (r + 1.0 / r) - 1.0,
                derivative: |r: f64| 0.5 * (1.0 - 1.0 / (r * r)),
                second_derivative: |r: f64| 1.0 / (r * r * r),
            }))),
            Self::Composite2d => {
                let vol = VolumetricTerm::default();
                Some(Box::new(FnSvFunction(move |a: f64, b: f64| {
                    a / b + b / a - 2.0 + vol.eval(a * b).map_or(f64::NAN, |v| v.f)
                })))
            }
            _ => None,
        }
    }

    fn wrong_dim(self, dim: usize) -> Error {
        Error::InvalidArgument(format!("energy {self} is {}-dimensional, not {dim}-dimensional", self.dim()))
    }
}

impl fmt::Display for EnergyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EnergyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown energy '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MapKind {
    /// `x ↦ (x₁, −x₂)/‖x‖²`.
    Phi2d,
    /// `x ↦ (x₁, −x₂, x₃)/‖x‖²`.
    Phi3d,
    Moebius(ComplexMoebius),
    /// `x ↦ x + u(x)` for the quadratic kernel displacement.
    QuadraticApprox,
}

impl MapKind {
    pub fn dim(&self) -> usize {
        match self {
            Self::Phi3d => 3,
            _ => 2,
        }
    }

    pub fn planar(&self) -> Result<Box<dyn Deformation<2>>> {
        Ok(match self {
            Self::Phi2d => Box::new(MirroredInversion::<2>),
            Self::Moebius(m) => Box::new(*m),
            Self::QuadraticApprox => Box::new(QuadraticApprox::default().kernel()),
            Self::Phi3d => return Err(Error::InvalidArgument("map phi3d is 3-dimensional".into())),
        })
    }

    pub fn spatial(&self) -> Result<Box<dyn Deformation<3>>> {
        match self {
            Self::Phi3d => Ok(Box::new(MirroredInversion::<3>)),
            _ => Err(Error::InvalidArgument(format!("map {self} is 2-dimensional"))),
        }
    }

    /// `det ∇φ(x)` in closed form, where known.
    pub fn expected_det(&self, r: f64) -> Option<f64> {
        match self {
            Self::Phi2d => Some(r.powi(-4)),
            Self::Phi3d => Some(r.powi(-6)),
            _ => None,
        }
    }

    /// The annulus on which `det ∇φ ∈ [e, c]`, for the inversions.
    pub fn admissible_annulus(&self, c: f64) -> Option<Result<crate::field::AnnulusDomain>> {
        match self {
            Self::Phi2d | Self::Phi3d => Some(crate::field::admissible_annulus(self.dim(), c)),
            _ => None,
        }
    }
}

impl fmt::Display for MapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Phi2d => f.write_str("phi2d"),
            Self::Phi3d => f.write_str("phi3d"),
            Self::Moebius(m) => write!(
                f,
                "moebius:{},{},{},{},{},{},{},{}",
                m.a.re, m.a.im, m.b.re, m.b.im, m.c.re, m.c.im, m.d.re, m.d.im
            ),
            Self::QuadraticApprox => f.write_str("quadratic-approx"),
        }
    }
}

impl FromStr for MapKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "phi2d" => Ok(Self::Phi2d),
            "phi3d" => Ok(Self::Phi3d),
            "quadratic-approx" => Ok(Self::QuadraticApprox),
            _ => match s.strip_prefix("moebius:") {
                Some(spec) => Ok(Self::Moebius(ComplexMoebius::parse(spec)?)),
                None => Err(Error::InvalidArgument(format!("unknown map '{s}'"))),
            },
        }
    }
}

/// Default splice point `c = e + 2`.
pub const DEFAULT_SPLICE: f64 = E + 2.0;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convexity::{knowles_sternberg, KS_MARGIN_FACTOR};
    use crate::tensor::DefGradient;

    #[test]
    fn names_round_trip() {
        for k in EnergyKind::ALL {
            assert_eq!(k.as_str().parse::<EnergyKind>().unwrap(), k);
        }
        for s in ["phi2d", "phi3d", "quadratic-approx", "moebius:1,0,0,0,0,0,1,0"] {
            assert_eq!(s.parse::<MapKind>().unwrap().to_string(), s);
        }
        assert!("phi4d".parse::<MapKind>().is_err());
        assert!("iso4d".parse::<EnergyKind>().is_err());
    }

    #[test]
    fn dimensions_are_checked() {
        assert!(EnergyKind::Iso3d.planar(DEFAULT_SPLICE, false).is_err());
        assert!(EnergyKind::Iso2dPsi.spatial(DEFAULT_SPLICE, false).is_err());
        assert!(MapKind::Phi2d.spatial().is_err());
        assert!(MapKind::Phi3d.planar().is_err());
        assert!(matches!(EnergyKind::Composite3d.spatial(1.0, false), Err(Error::InvalidSplice { .. })));
    }

    #[test]
    fn singular_value_functions_match_energies() {
        let f = DefGradient::new(crate::tensor::Mat2::from_rows([[1.3, 0.4], [-0.2, 0.8]])).unwrap();
        let sv = f.singular_values().values;
        for k in [EnergyKind::Iso2dKlin2, EnergyKind::Iso2dPsi, EnergyKind::Composite2d] {
            let w = k.planar(DEFAULT_SPLICE, false).unwrap().value(&f).unwrap();
            let g = k.singular_value_function().unwrap().value(sv[0], sv[1]);
            assert!((w - g).abs() < 1e-12, "{k}");
        }
        let r = knowles_sternberg(&*EnergyKind::Iso2dPsi.singular_value_function().unwrap(), 2.0, 1.0, KS_MARGIN_FACTOR)
            .unwrap();
        assert!(r.strict);
    }
}
