#include "fuelgan/kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fuelgan::kernels {

namespace {

// Below this many multiply-adds the fork/join overhead dominates; run serial.
// Has no effect on results, only on scheduling.
constexpr std::size_t kParallelFlopThreshold = 16384;

void check_inner(const Matrix& a, const Matrix& b, std::size_t a_inner, std::size_t b_inner,
                 const char* name) {
    if (a_inner != b_inner) {
        throw DimensionError(std::string(name) + ": incompatible shapes " + a.shape_str() +
                             " and " + b.shape_str());
    }
}

} // namespace

Matrix matmul_serial(const Matrix& a, const Matrix& b) {
    check_inner(a, b, a.cols(), b.rows(), "matmul");
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) acc += a(i, k) * b(k, j);
            c(i, j) = acc;
        }
    }
    return c;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    check_inner(a, b, a.cols(), b.rows(), "matmul");
    if (a.rows() * b.cols() * a.cols() < kParallelFlopThreshold) return matmul_serial(a, b);
    Matrix c(a.rows(), b.cols());
#pragma omp parallel for schedule(static)
    for (long long ii = 0; ii < static_cast<long long>(a.rows()); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) acc += a(i, k) * b(k, j);
            c(i, j) = acc;
        }
    }
    return c;
}

Matrix matmul_nt_serial(const Matrix& a, const Matrix& b) {
    check_inner(a, b, a.cols(), b.cols(), "matmul_nt");
    Matrix c(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < b.rows(); ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) acc += a(i, k) * b(j, k);
            c(i, j) = acc;
        }
    }
    return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
    check_inner(a, b, a.cols(), b.cols(), "matmul_nt");
    if (a.rows() * b.rows() * a.cols() < kParallelFlopThreshold) return matmul_nt_serial(a, b);
    Matrix c(a.rows(), b.rows());
#pragma omp parallel for schedule(static)
    for (long long ii = 0; ii < static_cast<long long>(a.rows()); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        for (std::size_t j = 0; j < b.rows(); ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) acc += a(i, k) * b(j, k);
            c(i, j) = acc;
        }
    }
    return c;
}

Matrix matmul_tn_serial(const Matrix& a, const Matrix& b) {
    check_inner(a, b, a.rows(), b.rows(), "matmul_tn");
    Matrix c(a.cols(), b.cols());
    for (std::size_t i = 0; i < a.cols(); ++i) {
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < a.rows(); ++k) acc += a(k, i) * b(k, j);
            c(i, j) = acc;
        }
    }
    return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
    check_inner(a, b, a.rows(), b.rows(), "matmul_tn");
    if (a.cols() * b.cols() * a.rows() < kParallelFlopThreshold) return matmul_tn_serial(a, b);
    Matrix c(a.cols(), b.cols());
#pragma omp parallel for schedule(static)
    for (long long ii = 0; ii < static_cast<long long>(a.cols()); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < a.rows(); ++k) acc += a(k, i) * b(k, j);
            c(i, j) = acc;
        }
    }
    return c;
}

void add_row_bias_serial(Matrix& m, std::span<const double> bias) {
    if (bias.size() != m.cols()) {
        throw DimensionError("add_row_bias: bias length " + std::to_string(bias.size()) +
                             " vs matrix " + m.shape_str());
    }
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) += bias[j];
    }
}

void add_row_bias(Matrix& m, std::span<const double> bias) {
    if (bias.size() != m.cols()) {
        throw DimensionError("add_row_bias: bias length " + std::to_string(bias.size()) +
                             " vs matrix " + m.shape_str());
    }
    if (m.size() < kParallelFlopThreshold) {
        add_row_bias_serial(m, bias);
        return;
    }
#pragma omp parallel for schedule(static)
    for (long long ii = 0; ii < static_cast<long long>(m.rows()); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) += bias[j];
    }
}

std::vector<double> column_sums_serial(const Matrix& m) {
    std::vector<double> sums(m.cols(), 0.0);
    for (std::size_t j = 0; j < m.cols(); ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < m.rows(); ++i) acc += m(i, j);
        sums[j] = acc;
    }
    return sums;
}

std::vector<double> column_sums(const Matrix& m) {
    if (m.size() < kParallelFlopThreshold) return column_sums_serial(m);
    std::vector<double> sums(m.cols(), 0.0);
#pragma omp parallel for schedule(static)
    for (long long jj = 0; jj < static_cast<long long>(m.cols()); ++jj) {
        const auto j = static_cast<std::size_t>(jj);
        double acc = 0.0;
        for (std::size_t i = 0; i < m.rows(); ++i) acc += m(i, j);
        sums[j] = acc;
    }
    return sums;
}

void hadamard_inplace_serial(Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) {
        throw DimensionError("hadamard: shapes " + a.shape_str() + " and " + b.shape_str());
    }
    auto av = a.values();
    auto bv = b.values();
    for (std::size_t i = 0; i < av.size(); ++i) av[i] *= bv[i];
}

void hadamard_inplace(Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) {
        throw DimensionError("hadamard: shapes " + a.shape_str() + " and " + b.shape_str());
    }
    if (a.size() < kParallelFlopThreshold) {
        hadamard_inplace_serial(a, b);
        return;
    }
    auto av = a.values();
    auto bv = b.values();
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(av.size()); ++i) av[i] *= bv[i];
}

} // namespace fuelgan::kernels
