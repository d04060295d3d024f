fn main() {
    std::process::exit(icd_tool::run(std::env::args_os()));
}
