fn main() {
    std::process::exit(fanofit_cli::run());
}
