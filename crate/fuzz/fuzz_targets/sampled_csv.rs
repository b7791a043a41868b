#![no_main]
use halfhartley::csvio::{read_sampled_function, read_samples, write_samples};
use halfhartley::function::DecayClass;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    // Anything accepted must survive a write and re-read unchanged.
    if let Ok((x, v)) = read_samples(data) {
        let mut buf = Vec::new();
        write_samples(&mut buf, &x, &v).expect("write accepted samples");
        let again = read_samples(buf.as_slice()).expect("re-read written samples");
        assert_eq!(again, (x, v));
    }
    for decay in [
        DecayClass::Exponential,
        DecayClass::Gaussian,
        DecayClass::Polynomial { exponent: 1.0 },
        DecayClass::Compact { end: 10.0 },
    ] {
        let _ = read_sampled_function(data, decay);
    }
});
