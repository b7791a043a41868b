#![no_main]
use halfhartley::csvio::{read_line_function, write_line_function};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(f) = read_line_function(data) {
        let mut buf = Vec::new();
        write_line_function(&mut buf, &f).expect("write accepted line function");
        let again = read_line_function(buf.as_slice()).expect("re-read written line function");
        assert_eq!(again, f);
    }
});
