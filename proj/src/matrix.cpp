#include "elts/matrix.hpp"

#include "elts/errors.hpp"

#include <cmath>
#include <cstdio>

namespace elts {

double matrix_distance(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw Error("matrix shape mismatch");
  return (a - b).cwiseAbs().maxCoeff();
}

bool matrix_equal(const Matrix& a, const Matrix& b, double tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  if (a.size() == 0) return true;
  return matrix_distance(a, b) <= tol;
}

bool is_hermitian(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

Matrix hermitize(const Matrix& m) { return (m + m.adjoint()) / 2.0; }

Eigen::VectorXd hermitian_eigenvalues(const Matrix& m) {
  if (m.rows() != m.cols()) throw Error("eigenvalues of a non-square matrix");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitize(m), Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

double min_eigenvalue(const Matrix& m) { return hermitian_eigenvalues(m).minCoeff(); }
double max_eigenvalue(const Matrix& m) { return hermitian_eigenvalues(m).maxCoeff(); }

Matrix psd_project(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitize(m));
  Eigen::VectorXd vals = solver.eigenvalues().cwiseMax(0.0);
  return solver.eigenvectors() * vals.asDiagonal() * solver.eigenvectors().adjoint();
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (long i = 0; i < a.rows(); ++i)
    for (long j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

std::vector<long> index_digits(long index, const std::vector<long>& dims) {
  std::vector<long> digits(dims.size(), 0);
  for (std::size_t k = dims.size(); k-- > 0;) {
    digits[k] = index % dims[k];
    index /= dims[k];
  }
  return digits;
}

long digits_index(const std::vector<long>& digits, const std::vector<long>& dims) {
  long index = 0;
  for (std::size_t k = 0; k < dims.size(); ++k) index = index * dims[k] + digits[k];
  return index;
}

std::string matrix_key(const Matrix& m) {
  std::string key = std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + ":";
  char buf[64];
  for (long i = 0; i < m.rows(); ++i)
    for (long j = 0; j < m.cols(); ++j) {
      long long re = llround(m(i, j).real() / 1e-9);
      long long im = llround(m(i, j).imag() / 1e-9);
      if (re == 0) re = 0;  // normalize -0
      if (im == 0) im = 0;
      std::snprintf(buf, sizeof buf, "%lld,%lld;", re, im);
      key += buf;
    }
  return key;
}

}  // namespace elts
