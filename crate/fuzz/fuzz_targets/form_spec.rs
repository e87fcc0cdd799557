//! Fuzz the form-spec decoder: any accepted form must be a genuine
//! symplectic form (skew, nondegenerate), and evaluation must behave.

#![no_main]

use libfuzzer_sys::fuzz_target;
use sbd_core::space::PhasePoint;
use sbd_core::spec::FormSpec;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(spec) = serde_json::from_str::<FormSpec>(text) else {
        return;
    };
    // Cap the dimension so the fuzzer probes logic, not allocation.
    if spec.n() == 0 || spec.n() > 32 {
        return;
    }
    if let Ok(form) = spec.build() {
        let gram = form.gram();
        let skew = gram
            .add(&gram.transpose())
            .expect("same shape")
            .max_norm();
        assert!(skew <= 1e-12, "accepted non-skew Gram matrix");
        let z = PhasePoint::zero(form.n());
        assert_eq!(form.evaluate(&z, &z).expect("dims"), 0.0);
    }
});
