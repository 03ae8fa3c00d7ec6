#![no_main]
use darboux_cli::{read_trajectory, render_svg, View};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(t) = read_trajectory(text) else { return };
    let written = t.to_json();
    let again = read_trajectory(&written).expect("written files parse");
    assert_eq!(again, t);
    let _ = render_svg(&[("fuzz".into(), t)], View::Y);
});
