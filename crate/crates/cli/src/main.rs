fn main() {
    std::process::exit(kmatch2d::cmd::run(std::env::args_os()));
}
