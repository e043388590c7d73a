//! Parameterization of a lattice-filled square tube.
//!
//! A design is fixed by five variables: layer count `n` along the tube axis,
//! cell count `m` across the section, strut diameter `d`, wall thickness `t`
//! and the height difference `h` between tube and lattice. The BCC-Z unit
//! cell's strut inclination and length follow from the requirement that the
//! lattice fills the tube exactly.

use core::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use alloc::format;
use alloc::string::String;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// mm³ · kg/m³ → kg
const MM3_TO_M3: f64 = 1e-9;

/// Admissible ranges of the design variables (inclusive).
pub const N_RANGE: (u32, u32) = (2, 6);
pub const M_RANGE: (u32, u32) = (2, 5);
pub const D_RANGE: (f64, f64) = (1.0, 3.0);
pub const T_RANGE: (f64, f64) = (0.8, 2.0);
pub const H_RANGE: (f64, f64) = (0.0, 5.0);

/// One of the five design variables.
///
/// The declaration order `d, n, m, t, h` is the fixed attribute order used by
/// tree induction and sampling, and it breaks ties between split candidates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variable {
    D,
    N,
    M,
    T,
    H,
}

impl Variable {
    pub const ALL: [Variable; 5] = [Variable::D, Variable::N, Variable::M, Variable::T, Variable::H];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Variable::D => "d",
            Variable::N => "n",
            Variable::M => "m",
            Variable::T => "t",
            Variable::H => "h",
        }
    }

    pub fn from_name(name: &str) -> Option<Variable> {
        Variable::ALL.into_iter().find(|v| v.name() == name)
    }

    pub fn is_integer(self) -> bool {
        matches!(self, Variable::N | Variable::M)
    }

    /// Default admissible range as floats.
    pub fn default_range(self) -> (f64, f64) {
        match self {
            Variable::D => D_RANGE,
            Variable::N => (N_RANGE.0 as f64, N_RANGE.1 as f64),
            Variable::M => (M_RANGE.0 as f64, M_RANGE.1 as f64),
            Variable::T => T_RANGE,
            Variable::H => H_RANGE,
        }
    }
}

impl core::fmt::Display for Variable {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

/// The five independent design variables of one tube.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignPoint {
    /// Lattice layers along the tube axis.
    pub n: u32,
    /// Lattice cells across the section (per side).
    pub m: u32,
    /// Strut diameter, mm.
    pub d: f64,
    /// Tube wall thickness, mm.
    pub t: f64,
    /// Height difference between tube and lattice, mm.
    pub h: f64,
}

impl DesignPoint {
    pub fn new(n: u32, m: u32, d: f64, t: f64, h: f64) -> Self {
        DesignPoint { n, m, d, t, h }
    }

    pub fn get(&self, var: Variable) -> f64 {
        match var {
            Variable::D => self.d,
            Variable::N => self.n as f64,
            Variable::M => self.m as f64,
            Variable::T => self.t,
            Variable::H => self.h,
        }
    }

    /// Feature vector in [`Variable::ALL`] order.
    pub fn features(&self) -> [f64; 5] {
        Variable::ALL.map(|v| self.get(v))
    }

    /// Checks the admissible box. The error names the first violated bound.
    pub fn validate(&self) -> Result<()> {
        check_int("n", self.n, N_RANGE)?;
        check_int("m", self.m, M_RANGE)?;
        check_real("d", self.d, D_RANGE)?;
        check_real("t", self.t, T_RANGE)?;
        check_real("h", self.h, H_RANGE)
    }
}

fn check_int(field: &'static str, value: u32, (lo, hi): (u32, u32)) -> Result<()> {
    if value < lo || value > hi {
        return Err(Error::Domain { field, value: value as f64, bound: format!("{lo} <= {field} <= {hi}") });
    }
    Ok(())
}

fn check_real(field: &'static str, value: f64, (lo, hi): (f64, f64)) -> Result<()> {
    if !(value >= lo && value <= hi) {
        return Err(Error::Domain { field, value, bound: format!("{lo} <= {field} <= {hi}") });
    }
    Ok(())
}

/// Fixed tube dimensions, mm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TubeConstants {
    /// Side length of the square section.
    pub side: f64,
    /// Tube height.
    pub height: f64,
    /// Clearance between tube wall and lattice.
    pub gap: f64,
}

impl Default for TubeConstants {
    fn default() -> Self {
        TubeConstants { side: 75.0, height: 200.0, gap: 1.0 }
    }
}

impl TubeConstants {
    pub fn validate(&self) -> Result<()> {
        if !(self.gap >= 0.0 && self.side > 2.0 * self.gap) {
            return Err(Error::Domain { field: "side", value: self.side, bound: format!("side > 2*gap = {}", 2.0 * self.gap) });
        }
        if !(self.height > H_RANGE.1) {
            return Err(Error::Domain { field: "height", value: self.height, bound: format!("height > {}", H_RANGE.1) });
        }
        Ok(())
    }

    /// Lattice footprint width, `a - 2s`.
    pub fn lattice_width(&self) -> f64 {
        self.side - 2.0 * self.gap
    }
}

/// Scalar material constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaterialSpec {
    pub name: String,
    /// Young's modulus, GPa.
    pub youngs_modulus_gpa: f64,
    /// Yield stress, MPa.
    pub yield_stress_mpa: f64,
    /// Density, kg/m³.
    pub density: f64,
    pub poisson_ratio: f64,
    /// Flow stress used by the crush surrogate, MPa.
    pub flow_stress_mpa: f64,
}

impl MaterialSpec {
    /// Builds a material whose flow stress is the mean of `σy` and `1.1·σy`.
    pub fn new(name: &str, youngs_modulus_gpa: f64, yield_stress_mpa: f64, density: f64, poisson_ratio: f64) -> Self {
        MaterialSpec {
            name: name.into(),
            youngs_modulus_gpa,
            yield_stress_mpa,
            density,
            poisson_ratio,
            flow_stress_mpa: 0.5 * (yield_stress_mpa + 1.1 * yield_stress_mpa),
        }
    }

    /// Extruded tube alloy.
    pub fn al6063_t5() -> Self {
        MaterialSpec::new("Al6063-T5", 68.2, 187.0, 2700.0, 0.33)
    }

    /// Additively manufactured lattice alloy.
    pub fn alsi10mg() -> Self {
        MaterialSpec::new("AlSi10Mg", 69.3, 162.0, 2670.0, 0.3)
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("youngs_modulus_gpa", self.youngs_modulus_gpa),
            ("yield_stress_mpa", self.yield_stress_mpa),
            ("density", self.density),
            ("poisson_ratio", self.poisson_ratio),
            ("flow_stress_mpa", self.flow_stress_mpa),
        ];
        for (field, value) in fields {
            if !(value > 0.0) {
                return Err(Error::Domain { field, value, bound: format!("{field} > 0") });
            }
        }
        if self.flow_stress_mpa < self.yield_stress_mpa {
            return Err(Error::Domain {
                field: "flow_stress_mpa",
                value: self.flow_stress_mpa,
                bound: format!("flow_stress_mpa >= yield_stress_mpa = {}", self.yield_stress_mpa),
            });
        }
        Ok(())
    }
}

/// Quantities implied by the full-fill constraint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedGeometry {
    /// Diagonal strut inclination from the horizontal, radians.
    pub omega: f64,
    /// Diagonal strut length, mm.
    pub strut_length: f64,
    /// `(H - h) / n`, mm.
    pub cell_height: f64,
    /// `(a - 2s) / m`, mm.
    pub cell_width: f64,
    /// Corner-to-centre struts in the whole lattice.
    pub diagonal_struts: u32,
    /// Vertical strut segments in the whole lattice.
    pub vertical_struts: u32,
    /// Length of one vertical segment, mm.
    pub vertical_length: f64,
}

impl DerivedGeometry {
    pub fn omega_degrees(&self) -> f64 {
        self.omega * 180.0 / PI
    }
}

/// Strut inclination and length for a design that fills the tube.
pub fn derive_geometry(dp: &DesignPoint, c: &TubeConstants) -> Result<DerivedGeometry> {
    dp.validate()?;
    c.validate()?;
    let lattice_height = c.height - dp.h;
    let n = dp.n as f64;
    let m = dp.m as f64;
    // half a cell vertically, half a cell diagonal horizontally
    let rise = lattice_height / (2.0 * n);
    let run = c.lattice_width() / (SQRT_2 * m);
    let omega = libm::atan2(rise, run);
    debug_assert!(omega > 0.0 && omega < FRAC_PI_2);
    let cell_height = lattice_height / n;
    Ok(DerivedGeometry {
        omega,
        strut_length: libm::hypot(rise, run),
        cell_height,
        cell_width: c.lattice_width() / m,
        diagonal_struts: 8 * dp.m * dp.m * dp.n,
        vertical_struts: (dp.m + 1) * (dp.m + 1) * dp.n,
        vertical_length: cell_height,
    })
}

/// Component masses, kg.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassBreakdown {
    pub tube_mass: f64,
    pub lattice_mass: f64,
    pub total_mass: f64,
}

/// Thin-shell tube plus cylindrical struts; junction overlap is not removed.
///
/// Only physical sanity is checked here (`d >= 0`, `t > 0`), so the
/// zero-lattice limit can be evaluated directly.
pub fn compute_mass(
    dp: &DesignPoint,
    g: &DerivedGeometry,
    c: &TubeConstants,
    tube: &MaterialSpec,
    lattice: &MaterialSpec,
) -> Result<MassBreakdown> {
    if !(dp.t > 0.0) {
        return Err(Error::Domain { field: "t", value: dp.t, bound: "t > 0".into() });
    }
    if !(dp.d >= 0.0) {
        return Err(Error::Domain { field: "d", value: dp.d, bound: "d >= 0".into() });
    }
    tube.validate()?;
    lattice.validate()?;
    let tube_mass = 4.0 * c.side * c.height * dp.t * tube.density * MM3_TO_M3;
    let strut_total = g.diagonal_struts as f64 * g.strut_length + g.vertical_struts as f64 * g.vertical_length;
    let lattice_mass = lattice.density * strut_area(dp.d) * strut_total * MM3_TO_M3;
    Ok(MassBreakdown { tube_mass, lattice_mass, total_mass: tube_mass + lattice_mass })
}

/// Cross-section of a strut of diameter `d`, mm².
pub fn strut_area(d: f64) -> f64 {
    PI * d * d / 4.0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn reference_design_angle_and_length() {
        let g = derive_geometry(&DesignPoint::new(4, 2, 2.0, 1.4, 0.0), &TubeConstants::default()).unwrap();
        // tan ω = √2·2·200 / 584
        let tan = SQRT_2 * 2.0 * 200.0 / 584.0;
        assert!(rel(libm::tan(g.omega), tan) < 1e-12);
        assert!((libm::tan(g.omega) - 0.96864).abs() < 1e-5);
        assert!((g.strut_length - 35.932).abs() < 1e-3);
        assert_eq!(g.diagonal_struts, 128);
        assert_eq!(g.vertical_struts, 36);
        assert_eq!(g.vertical_length, 50.0);
    }

    #[test]
    fn angle_depends_on_ratio_only() {
        let c = TubeConstants::default();
        let a = derive_geometry(&DesignPoint::new(2, 2, 1.0, 1.0, 0.0), &c).unwrap();
        let b = derive_geometry(&DesignPoint::new(4, 4, 1.0, 1.0, 0.0), &c).unwrap();
        assert!(rel(a.omega, b.omega) < 1e-15);
    }

    #[test]
    fn out_of_range_names_the_bound() {
        let err = derive_geometry(&DesignPoint::new(7, 2, 2.0, 1.0, 0.0), &TubeConstants::default()).unwrap_err();
        match err {
            Error::Domain { field, bound, .. } => {
                assert_eq!(field, "n");
                assert!(bound.contains("n <= 6"));
            }
            other => panic!("unexpected {other:?}"),
        }
        let err = DesignPoint::new(3, 3, 2.0, 2.5, 0.0).validate().unwrap_err();
        assert!(matches!(err, Error::Domain { field: "t", .. }));
        assert!(DesignPoint::new(3, 3, f64::NAN, 1.0, 0.0).validate().is_err());
    }

    #[test]
    fn tube_mass_hand_value() {
        let dp = DesignPoint::new(4, 2, 2.0, 1.4, 0.0);
        let c = TubeConstants::default();
        let g = derive_geometry(&dp, &c).unwrap();
        let mass = compute_mass(&dp, &g, &c, &MaterialSpec::al6063_t5(), &MaterialSpec::alsi10mg()).unwrap();
        assert!(rel(mass.tube_mass, 0.2268) < 1e-12);
        assert!((mass.lattice_mass - 0.0537).abs() < 5e-5);
        assert!((mass.total_mass - 0.2805).abs() < 5e-5);
        assert_eq!(mass.total_mass, mass.tube_mass + mass.lattice_mass);
    }

    #[test]
    fn zero_diameter_leaves_tube_only() {
        let c = TubeConstants::default();
        let g = derive_geometry(&DesignPoint::new(4, 2, 1.0, 1.4, 0.0), &c).unwrap();
        let dp = DesignPoint::new(4, 2, 0.0, 1.4, 0.0);
        let mass = compute_mass(&dp, &g, &c, &MaterialSpec::al6063_t5(), &MaterialSpec::alsi10mg()).unwrap();
        assert_eq!(mass.lattice_mass, 0.0);
        assert_eq!(mass.total_mass, mass.tube_mass);
    }

    #[test]
    fn default_flow_stress() {
        let m = MaterialSpec::al6063_t5();
        assert!(rel(m.flow_stress_mpa, 1.05 * 187.0) < 1e-12);
        m.validate().unwrap();
        let mut bad = MaterialSpec::alsi10mg();
        bad.flow_stress_mpa = 100.0;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn variable_order_and_names() {
        let names: alloc::vec::Vec<_> = Variable::ALL.iter().map(|v| v.name()).collect();
        assert_eq!(names, ["d", "n", "m", "t", "h"]);
        assert_eq!(Variable::from_name("m"), Some(Variable::M));
        assert!(Variable::N.is_integer() && !Variable::D.is_integer());
        let dp = DesignPoint::new(3, 4, 2.0, 1.1, 3.0);
        assert_eq!(dp.features(), [2.0, 3.0, 4.0, 1.1, 3.0]);
    }
}
