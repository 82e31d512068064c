#pragma once

#include <Eigen/Dense>

#include <complex>
#include <string>
#include <vector>

namespace elts {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

// Largest absolute entry of A - B.
double matrix_distance(const Matrix& a, const Matrix& b);
bool matrix_equal(const Matrix& a, const Matrix& b, double tol);

bool is_hermitian(const Matrix& m, double tol);

// (M + M^dagger) / 2
Matrix hermitize(const Matrix& m);

// Eigenvalues of the hermitized matrix, ascending.
Eigen::VectorXd hermitian_eigenvalues(const Matrix& m);
double min_eigenvalue(const Matrix& m);
double max_eigenvalue(const Matrix& m);

// Nearest positive-semidefinite matrix: eigenvalues clipped to >= 0.
Matrix psd_project(const Matrix& m);

Matrix kron(const Matrix& a, const Matrix& b);

// Mixed-radix digit helpers for multi-factor index arithmetic. dims lists the
// per-factor dimensions, most significant first (Kronecker convention).
std::vector<long> index_digits(long index, const std::vector<long>& dims);
long digits_index(const std::vector<long>& digits, const std::vector<long>& dims);

// Deterministic textual key: entries rounded to a 1e-9 grid. Used for
// canonical ordering and hashing, never as the equality arbiter.
std::string matrix_key(const Matrix& m);

}  // namespace elts
