#![allow(dead_code)]

use agm3::configuration::{extract_configuration, PlaneConfiguration};
use agm3::numkernel::{seeded_unitary, ToleranceProfile, C64};
use agm3::plane::{HomogeneousForm, ProjPoint};
use agm3::quartic_theta::{alpha_class, bitangents, BitangentRecord, Quartic, TwoTorsionClass};
use agm3::fixtures;
use nalgebra::DMatrix;

pub struct Fixture {
    pub quartic: Quartic,
    pub bitangents: Vec<BitangentRecord>,
    pub class: TwoTorsionClass,
    pub config: PlaneConfiguration,
}

pub fn profile() -> ToleranceProfile {
    ToleranceProfile::default()
}

pub fn fixture(c: Quartic, pair: (usize, usize)) -> Fixture {
    let p = profile();
    let bt = bitangents(&c, &p).unwrap();
    let class = alpha_class(&bt, pair, &p).unwrap();
    let (config, _) = extract_configuration(&c, &bt, &class, &p).unwrap();
    Fixture {
        quartic: c,
        bitangents: bt,
        class,
        config,
    }
}

pub fn random_fixture(seed: u64) -> Fixture {
    fixture(fixtures::random_quartic(seed), (2, 7))
}

pub fn trott_fixture() -> Fixture {
    fixture(fixtures::trott(), (2, 7))
}

/// A well-conditioned random projective map: unitary times a mild diagonal.
pub fn random_map(seed: u64) -> DMatrix<C64> {
    let u = seeded_unitary(3, seed);
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
        C64::new(1.0, 0.0),
        C64::new(1.7, 0.0),
        C64::new(0.6, 0.0),
    ]));
    u * d
}

/// `F(A y)`, the form whose zero set is `A^-1` of the zero set of `F`.
pub fn pull_back(f: &HomogeneousForm, a: &DMatrix<C64>) -> HomogeneousForm {
    f.substitute(a)
}

/// `A^-1 p`.
pub fn push_point(p: &ProjPoint, a: &DMatrix<C64>) -> ProjPoint {
    let inv = a.clone().try_inverse().unwrap();
    let v = inv * nalgebra::DVector::from_column_slice(p.coords());
    ProjPoint::new(v.as_slice()).unwrap()
}

pub fn transform_config(c: &PlaneConfiguration, a: &DMatrix<C64>) -> PlaneConfiguration {
    PlaneConfiguration::new(
        pull_back(&c.e, a),
        pull_back(&c.q_conic, a),
        c.q.iter().map(|p| push_point(p, a)).collect(),
        &profile(),
    )
    .unwrap()
}
