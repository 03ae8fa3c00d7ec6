#![no_main]
use darboux_core::files::LinkageFile;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(file) = LinkageFile::from_json(text) else { return };
    let _ = file.to_model();
    let again = LinkageFile::from_json(&file.to_json()).expect("written files parse");
    assert_eq!(again, file);
});
