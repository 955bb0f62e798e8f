//! Drives the command-line front end in-process and shows its exit codes.

fn main() {
    let runs: [&[&str]; 4] = [
        &[
            "onoc-xbar",
            "evaluate",
            "--topology",
            "ornoc-ml,matrix-ml-b",
            "--grid",
            "4",
        ],
        &[
            "onoc-xbar",
            "evaluate",
            "--topology",
            "lambda-router-sl-b",
            "--grid",
            "3",
            "--params",
            "zhang",
        ],
        &[
            "onoc-xbar",
            "resources",
            "--topology",
            "matrix-sl-a",
            "--grid",
            "3",
        ],
        &["onoc-xbar", "evaluate", "--grid", "3"],
    ];
    for args in runs {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = onoc_xbar::cli::run_with(args.iter().copied(), &mut out, &mut err);
        println!("$ {}\nexit {code}", args[1..].join(" "));
        print!(
            "{}{}",
            String::from_utf8_lossy(&out),
            String::from_utf8_lossy(&err)
        );
    }
}
