fn main() {
    fracgreen::cli::run()
}
