fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("CENTERING_KIT_LOG", "warn")).init();
    std::process::exit(centering_kit::cli::run(std::env::args_os()));
}
