#![no_main]
use darboux_core::files::TrajectoryFile;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(t) = TrajectoryFile::from_csv(text) else { return };
    let _ = t.branch();
    let written = t.to_csv();
    let again = TrajectoryFile::from_csv(&written).expect("written files parse");
    assert_eq!(again, t);
    assert_eq!(again.to_csv(), written);
});
