mod common;

use agm3::agm_step::agm_step;
use agm3::configuration::build_space_model;
use agm3::differentials::*;
use agm3::numkernel::C64;
use agm3::plane::HomogeneousForm;
use common::*;

#[test]
fn shared_frames_give_the_identity() {
    let p = profile();
    let f = random_fixture(1);
    let s = agm_step(&f.config, &"pair=1,2;partition=3-4,5-6".parse().unwrap(), &p).unwrap();
    for chart in [AffineChart::standard(), AffineChart::seeded(3)] {
        let (iso, report) = canonical_iso_report(&s, &chart, &chart, 10, &p).unwrap();
        assert!(off_identity(&iso.matrix) < 1e-12);
        assert!(report.off_identity < 1e-12);
        assert!(report.t_displacement < 1e-12);
        assert_eq!(report.pencil_lines, 10);
        assert!(report.max_pencil_displacement < 1e-12);
    }
}

#[test]
fn different_charts_still_induce_the_identity_on_the_plane() {
    let p = profile();
    let f = random_fixture(2);
    let s = agm_step(&f.config, &"pair=1,2;partition=3-4,5-6".parse().unwrap(), &p).unwrap();
    let (iso, report) = canonical_iso_report(&s, &AffineChart::seeded(1), &AffineChart::seeded(2), 10, &p).unwrap();
    assert!(off_identity(&iso.matrix) > 1e-3);
    assert!(report.off_identity < 1e-12);
    assert!(report.t_displacement < 1e-12);
    assert!(report.max_pencil_displacement < 1e-12);
}

#[test]
fn composition_law() {
    let (c0, c1, c2) = (AffineChart::seeded(10), AffineChart::seeded(11), AffineChart::standard());
    let composed = canonical_iso(&c0, &c1).then(&canonical_iso(&c1, &c2));
    let direct = canonical_iso(&c0, &c2);
    let ratio = direct.matrix.try_inverse().unwrap() * composed.matrix;
    assert!(off_identity(&ratio) < 1e-10);
}

#[test]
fn transport_keeps_the_differential() {
    let f = random_fixture(1);
    let (c_in, c_out) = (AffineChart::seeded(4), AffineChart::seeded(5));
    let iso = canonical_iso(&c_in, &c_out);
    let basis = residue_basis(&f.quartic, &c_in).unwrap();
    for b in &basis {
        let moved = iso.transport(b, &f.quartic).unwrap();
        assert_eq!(moved.chart, c_out);
        assert!(moved.numerator.distance(&b.numerator) < 1e-12);
    }
    assert_eq!(numerator_rank(&basis, 1e-12), 3);
}

#[test]
fn odd_and_even_dimensions() {
    for f in [random_fixture(1), random_fixture(2), trott_fixture()] {
        let model = build_space_model(&f.config);
        let r = odd_space_report(&model).unwrap();
        assert_eq!((r.even_dim, r.odd_dim), (1, 3));
        assert!(r.involution_preserves_model);
        assert_eq!(r.even_plane, [0.0, 0.0, 0.0, 1.0]);
        let v = model.vertex();
        let line = HomogeneousForm::linear(&[C64::new(0.4, 0.0), C64::new(-1.0, 0.2), C64::new(0.3, 0.0)]);
        let plane = phi_y(&line).unwrap();
        assert!(vertex_on(&plane, &v));
        assert!(trace_on_h(&plane).distance(&line) < 1e-15);
    }
}
