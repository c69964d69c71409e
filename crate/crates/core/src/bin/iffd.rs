fn main() {
    println!("iffd: command-line interface under construction");
}
