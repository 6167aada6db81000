fn main() {
    std::process::exit(transasym::run(std::env::args_os()));
}
