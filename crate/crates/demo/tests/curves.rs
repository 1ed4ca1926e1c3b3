use ctxdep_demo::{cyclic_values, permutation_values, repetition_values};

fn spread(v: &[f64]) -> f64 {
    v.iter().cloned().fold(f64::MIN, f64::max) - v.iter().cloned().fold(f64::MAX, f64::min)
}

#[test]
fn permutation_curve_is_flat_only_without_coupling() {
    let flat = permutation_values(0.0, 40).unwrap();
    assert_eq!(flat.len(), 41);
    assert!(spread(&flat) < 1e-10, "{}", spread(&flat));
    assert!(spread(&permutation_values(5e-3, 40).unwrap()) > 1e-6);
}

#[test]
fn cyclic_curve_has_one_value_per_rotation() {
    let f = cyclic_values(0.0, 20, 2).unwrap();
    assert_eq!(f.len(), 21);
    assert!(spread(&f) < 1e-10);
    assert!(spread(&cyclic_values(5e-3, 20, 2).unwrap()) > 1e-6);
}

#[test]
fn repetition_curve_is_affine_without_coupling() {
    let v = repetition_values(0.0, "X180 Y180", 100, 25).unwrap();
    assert_eq!(v.len(), 5);
    let steps: Vec<f64> = v.windows(2).map(|w| w[1] - w[0]).collect();
    assert!(spread(&steps) < 1e-10);
    assert!(steps[0] < 0.0);
}

#[test]
fn bad_inputs_are_reported() {
    assert!(permutation_values(0.0, 0).is_err());
    assert!(permutation_values(f64::NAN, 3).is_err());
    assert!(cyclic_values(0.0, 5, 0).is_err());
    assert!(repetition_values(0.0, "Z90", 10, 1).is_err());
    assert!(repetition_values(0.0, "", 10, 1).is_err());
    assert!(repetition_values(0.0, "X180", 10, 0).is_err());
    assert!(repetition_values(0.0, "X180", 5000, 1).is_err());
}
