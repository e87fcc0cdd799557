//! Fuzz the matrix JSON decoder: parsing must never panic, accepted
//! matrices must satisfy their invariants, and serialization must round
//! trip losslessly.

#![no_main]

use libfuzzer_sys::fuzz_target;
use sbd_core::matrix::Matrix;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(matrix) = serde_json::from_str::<Matrix>(text) {
        assert_eq!(matrix.data().len(), matrix.rows() * matrix.cols());
        assert!(matrix.data().iter().all(|v| v.is_finite()));
        let emitted = serde_json::to_string(&matrix).expect("serializes");
        let back: Matrix = serde_json::from_str(&emitted).expect("reparses");
        assert_eq!(matrix, back);
    }
});
