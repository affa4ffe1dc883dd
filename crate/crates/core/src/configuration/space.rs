use super::PlaneConfiguration;
use crate::numkernel::C64;
use crate::plane::{HomogeneousForm, ProjPoint};

/// The double cover `Y -> E` as the complete intersection of
/// `Q2 = f_Q + x3^2` and the cone `Q3` over `E` in P^3.
#[derive(Debug, Clone)]
pub struct SpaceCurveModel {
    pub q2: HomogeneousForm,
    pub q3: HomogeneousForm,
}

pub const CONE_VERTEX: [f64; 4] = [0.0, 0.0, 0.0, 1.0];

pub fn build_space_model(config: &PlaneConfiguration) -> SpaceCurveModel {
    let x3sq = HomogeneousForm::from_terms(4, 2, [(vec![0, 0, 0, 2], C64::new(1.0, 0.0))]).expect("x3^2");
    SpaceCurveModel {
        q2: config.q_conic.normalized().lift(4).add(&x3sq),
        q3: config.e.normalized().lift(4),
    }
}

impl SpaceCurveModel {
    pub fn vertex(&self) -> ProjPoint {
        ProjPoint::from_real(&CONE_VERTEX).expect("nonzero")
    }

    /// The cubic does not involve `x3`.
    pub fn is_cone(&self) -> bool {
        self.q3.terms().all(|(e, c)| e[3] == 0 || c == C64::new(0.0, 0.0))
    }

    /// Largest residual of the lifted marked points `(q_i : 0)` on both forms.
    pub fn lifted_residual(&self, q: &[ProjPoint]) -> f64 {
        q.iter()
            .map(|p| {
                let lp = p.lift();
                self.q2.residual(lp.coords()).max(self.q3.residual(lp.coords()))
            })
            .fold(0.0, f64::max)
    }
}
