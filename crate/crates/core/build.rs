fn main() {
    // System LAPACK/BLAS (Debian alternatives; OpenBLAS-backed here).
    println!("cargo:rustc-link-lib=dylib=lapack");
    println!("cargo:rustc-link-lib=dylib=blas");
}
