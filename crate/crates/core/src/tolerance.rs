/// Numerical thresholds shared by the whole pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Node values whose magnitude (relative to the node's weight row) is
    /// below this are read as zero.
    pub sign: f64,
    /// Minimum interior slack for a sign pattern to count as a cell; also the
    /// constraint-satisfaction tolerance of the simplex solver.
    pub lp_feasibility: f64,
    /// Smallest admissible pivot in the simplex tableau.
    pub lp_pivot: f64,
    /// Relative threshold below which a directional derivative is flat.
    pub flat: f64,
    /// Relative gap below which two vertex values are considered equal.
    pub injectivity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            sign: 1e-9,
            lp_feasibility: 1e-7,
            lp_pivot: 1e-9,
            flat: 1e-9,
            injectivity: 1e-9,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> crate::Result<()> {
        let all = [
            self.sign,
            self.lp_feasibility,
            self.lp_pivot,
            self.flat,
            self.injectivity,
        ];
        if all.iter().all(|t| t.is_finite() && *t > 0.0) {
            Ok(())
        } else {
            Err(crate::Error::Shape(format!(
                "tolerances must be positive and finite: {self:?}"
            )))
        }
    }
}
