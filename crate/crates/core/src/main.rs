fn main() {
    std::process::exit(qswitch_teleport::cli::run(std::env::args_os()));
}
