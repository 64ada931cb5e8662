use mqv_cli::suite::*;

fn main() {
    for name in SUITE_NAMES {
        let count = match name {
            "det-identity" => 10,
            "stability-cross" => 30,
            "reflection-dualities" => 20,
            _ => 3,
        };
        let t = std::time::Instant::now();
        let r = run_suite(name, 20240809, count).unwrap();
        println!(
            "{:late$} total {:3} passed {:3} ok={} ({:?})",
            r.name, r.total, r.passed, r.ok(), t.elapsed(), late = 24
        );
        for f in r.failures.iter().take(4) {
            println!("    FAIL {f}");
        }
    }
}
