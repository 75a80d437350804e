fn main() {
    std::process::exit(ode_efficiency::cli::main_with_args(std::env::args_os()));
}
