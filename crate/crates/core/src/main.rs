fn main() {
    std::process::exit(dlpp::app::main_entry());
}
