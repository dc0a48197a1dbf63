#ifndef FUELGAN_KERNELS_HPP
#define FUELGAN_KERNELS_HPP

#include <span>

#include "fuelgan/matrix.hpp"

namespace fuelgan::kernels {

// Data-parallel primitives behind the network math. Each comes in a serial
// reference version (kept for tests and the benchmark) and a production
// version that parallelizes over independent output cells with OpenMP.
//
// Every output element is reduced in a fixed serial order in both versions,
// so the parallel results are bit-identical to the serial ones for any
// thread count. Determinism guarantees elsewhere in the project rely on this.

// C = A * B
Matrix matmul_serial(const Matrix& a, const Matrix& b);
Matrix matmul(const Matrix& a, const Matrix& b);

// C = A * B^T
Matrix matmul_nt_serial(const Matrix& a, const Matrix& b);
Matrix matmul_nt(const Matrix& a, const Matrix& b);

// C = A^T * B
Matrix matmul_tn_serial(const Matrix& a, const Matrix& b);
Matrix matmul_tn(const Matrix& a, const Matrix& b);

// out(r, c) += bias[c]
void add_row_bias_serial(Matrix& m, std::span<const double> bias);
void add_row_bias(Matrix& m, std::span<const double> bias);

// out[c] = sum over rows of m(r, c)
std::vector<double> column_sums_serial(const Matrix& m);
std::vector<double> column_sums(const Matrix& m);

// a(i) *= b(i)
void hadamard_inplace_serial(Matrix& a, const Matrix& b);
void hadamard_inplace(Matrix& a, const Matrix& b);

} // namespace fuelgan::kernels

#endif
