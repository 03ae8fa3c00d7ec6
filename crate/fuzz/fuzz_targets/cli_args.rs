#![no_main]
use darboux_cli::parse_range;
use darboux_core::files::parse_point;
use darboux_core::BranchLabel;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(p) = parse_point(data) {
        assert!(p.iter().all(|v| v.is_finite()));
    }
    if let Ok((a, b)) = parse_range(data) {
        assert!(a < b);
    }
    if let Ok(label) = data.parse::<BranchLabel>() {
        assert_eq!(label.to_string().parse::<BranchLabel>().unwrap(), label);
    }
});
