fn main() { std::process::exit(regnet::cli::main()); }
