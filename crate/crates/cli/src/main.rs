use clap::Parser;

fn main() {
    let cli = match ucp_cli::cli::Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    std::process::exit(ucp_cli::run(cli));
}
