mod common;

use sigvol::curve::CurveFamily;
use sigvol::decomposition::{
    decompose_even, decompose_odd, decompose_odd_full, pfaffian, skew_spectrum, volume_via_eigenvalues,
};
use sigvol::signature::{alt, injections, pl_signature, signed_area_matrix, top_alternating};

use common::{random_curve, random_rotation, rng, row_major};

#[test]
fn decompositions_match_tensor_route() {
    let mut rng = rng(0xDEC0);
    let mut worst = 0.0f64;
    for i in 0..60 {
        let d = 1 + i % 5;
        let curve = random_curve(&mut rng, d, 8);
        let sig = pl_signature(&curve, d).unwrap();
        for k in 1..=d {
            let direct = alt(sig.level(k));
            for p in injections(d, k) {
                let want = direct.get(&p);
                if k % 2 == 0 {
                    worst = worst.max((decompose_even(&curve, &p).unwrap() - want).abs());
                } else {
                    worst = worst.max((decompose_odd(&curve, &p).unwrap() - want).abs());
                    worst = worst.max((decompose_odd_full(&curve, &p).unwrap() - want).abs());
                }
            }
        }
    }
    assert!(worst <= 1e-9, "max abs diff {worst:e}");
}

#[test]
fn pfaffian_transforms_by_determinant() {
    let mut rng = rng(0xFAFF);
    for d in [2, 4, 6] {
        let curve = random_curve(&mut rng, d, 10);
        let a = signed_area_matrix(&curve);
        let pf = pfaffian(&a).unwrap();
        for _ in 0..10 {
            let q = random_rotation(&mut rng, d);
            let conj = q.transpose() * &a * &q;
            let conj = (&conj - conj.transpose()) * 0.5;
            assert!((pfaffian(&conj).unwrap() - pf * q.determinant()).abs() <= 1e-10);
            // a reflection flips the sign
            let mut r = q.clone();
            let col = -r.column(0);
            r.set_column(0, &col);
            let conj = r.transpose() * &a * &r;
            let conj = (&conj - conj.transpose()) * 0.5;
            assert!((pfaffian(&conj).unwrap() + pf).abs() <= 1e-10);
        }
        let spec = skew_spectrum(&a).unwrap();
        assert!((spec.lambda_product() - pf).abs() <= 1e-12);
    }
}

#[test]
fn eigenvalue_volume_matches_signature_at_n_2000() {
    let families = [
        CurveFamily::moment(2).unwrap(),
        CurveFamily::moment(3).unwrap(),
        CurveFamily::moment(4).unwrap(),
        CurveFamily::log(vec![1.0, 2.0, 3.0]).unwrap(),
    ];
    for c in &families {
        let pl = c.discretize(2000).unwrap();
        let direct = top_alternating(&pl).unwrap();
        let ev = volume_via_eigenvalues(&pl).unwrap();
        assert!((ev.alpha - direct).abs() <= 1e-6, "{}: {} vs {direct}", c.name(), ev.alpha);
        assert!(ev.volume >= 0.0);
    }
}

#[test]
fn eigenvalue_volume_is_rotation_invariant() {
    let mut rng = rng(0xE16);
    for d in 2..=5 {
        let curve = random_curve(&mut rng, d, 9);
        let base = volume_via_eigenvalues(&curve).unwrap().alpha;
        assert!((base - top_alternating(&curve).unwrap()).abs() <= 1e-12);
        for _ in 0..5 {
            let q = random_rotation(&mut rng, d);
            let v = volume_via_eigenvalues(&curve.transformed(&row_major(&q))).unwrap().alpha;
            assert!((v - base).abs() <= 1e-12);
        }
    }
}
