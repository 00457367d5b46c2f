fn main() {
    std::process::exit(sbl_chanest::cli::run(std::env::args_os()));
}
