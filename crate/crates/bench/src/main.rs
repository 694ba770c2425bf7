fn main() {
    std::process::exit(masked_spgemm_bench::cli::run(std::env::args_os()));
}
