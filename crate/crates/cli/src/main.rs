fn main() {
    match ssmap_cli::run(std::env::args_os()) {
        Ok(report) => println!("{report}"),
        Err(e) => {
            eprintln!("{}", e.line());
            std::process::exit(e.code.exit_code());
        }
    }
}
