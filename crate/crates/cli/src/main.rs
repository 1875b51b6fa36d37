use clap::Parser;

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp_millis()
        .init();
    std::process::exit(msaug_cli::run(msaug_cli::Cli::parse()));
}
