fn main() {
    std::process::exit(memspin::main_with_args(std::env::args_os().collect()));
}
