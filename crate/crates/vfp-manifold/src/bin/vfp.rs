fn main() {
    std::process::exit(vfp_manifold::cli::run(std::env::args_os()));
}
