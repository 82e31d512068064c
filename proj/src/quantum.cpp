#include "elts/quantum.hpp"

#include "elts/errors.hpp"
#include "elts/rng.hpp"

#include <algorithm>
#include <cmath>
#include <regex>

namespace elts {

bool validate_effect(const Matrix& m, double tol) {
  if (m.rows() != m.cols() || m.rows() == 0) return false;
  if (!m.allFinite()) return false;
  if (!is_hermitian(m, tol)) return false;
  Eigen::VectorXd eig = hermitian_eigenvalues(m);
  return eig.minCoeff() >= -tol && eig.maxCoeff() <= 1.0 + tol;
}

bool validate_density(const Matrix& m, double tol) {
  if (m.rows() != m.cols() || m.rows() == 0) return false;
  if (!m.allFinite()) return false;
  if (!is_hermitian(m, tol)) return false;
  if (min_eigenvalue(m) < -tol) return false;
  return std::abs(m.trace().real() - 1.0) <= tol && std::abs(m.trace().imag()) <= tol;
}

DensityOperator::DensityOperator(SystemCollection sys, Matrix m, double tol)
    : systems(std::move(sys)), matrix(std::move(m)) {
  if (matrix.rows() != systems.dimension())
    throw Error("density matrix dimension " + std::to_string(matrix.rows()) +
                " does not match systems " + systems.to_string());
  if (!validate_density(matrix, tol)) throw Error("not a valid density operator");
}

double born_real(const Matrix& effect, const DensityOperator& rho) {
  if (effect.rows() != rho.matrix.rows()) throw Error("born: dimension mismatch");
  return (effect * rho.matrix).trace().real();
}

Rational born(const Matrix& effect, const DensityOperator& rho, const BornOptions& opts) {
  if (effect.rows() != effect.cols() || effect.rows() != rho.matrix.rows())
    throw Error("born: dimension mismatch");
  if (!validate_effect(effect, opts.tol)) throw Error("born: not a valid effect");
  // Re tr(L rho) = sum_ij Re(L_ij) Re(rho_ji) - Im(L_ij) Im(rho_ji), summed
  // exactly over the dyadic rationals the doubles denote.
  Rational total = 0;
  for (long i = 0; i < effect.rows(); ++i)
    for (long j = 0; j < effect.cols(); ++j) {
      const Complex& l = effect(i, j);
      const Complex& r = rho.matrix(j, i);
      if (l.real() != 0.0 && r.real() != 0.0)
        total += exact_rational(l.real()) * exact_rational(r.real());
      if (l.imag() != 0.0 && r.imag() != 0.0)
        total -= exact_rational(l.imag()) * exact_rational(r.imag());
    }
  Rational tol = exact_rational(opts.tol);
  if (total < 0) {
    if (total < -tol) throw Error("born: trace below zero beyond tolerance");
    total = 0;
  } else if (total > 1) {
    if (total > 1 + tol) throw Error("born: trace above one beyond tolerance");
    total = 1;
  }
  if (opts.max_denominator != 0 && denominator(total) > Integer(opts.max_denominator))
    total = rationalize(to_double(total), opts.max_denominator);
  return total;
}

std::vector<long> sort_permutation_vector(const SystemCollection& c, const SystemCollection& d) {
  if (!c.same_registry(d)) throw Error("sort permutation: registries differ");
  if (!c.disjoint_from(d)) throw GradeClashError("sort permutation: collections overlap");
  SystemCollection u = *systems_union(c, d);

  // Factor order on the source side: C's systems then D's systems.
  std::vector<std::string> source_names(c.names());
  source_names.insert(source_names.end(), d.names().begin(), d.names().end());
  std::vector<long> source_dims;
  for (const auto& n : source_names) source_dims.push_back(c.registry().at(n));

  std::vector<long> target_dims = u.dims();
  // position of each source factor inside the sorted union
  std::vector<std::size_t> slot(source_names.size());
  for (std::size_t k = 0; k < source_names.size(); ++k) {
    auto it = std::lower_bound(u.names().begin(), u.names().end(), source_names[k]);
    slot[k] = static_cast<std::size_t>(it - u.names().begin());
  }

  long dim = u.dimension();
  std::vector<long> perm(dim);
  for (long s = 0; s < dim; ++s) {
    std::vector<long> src_digits = index_digits(s, source_dims);
    std::vector<long> tgt_digits(target_dims.size(), 0);
    for (std::size_t k = 0; k < slot.size(); ++k) tgt_digits[slot[k]] = src_digits[k];
    perm[s] = digits_index(tgt_digits, target_dims);
  }
  return perm;
}

Matrix sort_permutation(const SystemCollection& c, const SystemCollection& d) {
  std::vector<long> perm = sort_permutation_vector(c, d);
  Matrix p = Matrix::Zero(perm.size(), perm.size());
  for (std::size_t s = 0; s < perm.size(); ++s) p(perm[s], s) = 1.0;
  return p;
}

Matrix sorted_kron(const SystemCollection& c, const Matrix& a, const SystemCollection& d,
                   const Matrix& b) {
  if (a.rows() != c.dimension() || b.rows() != d.dimension())
    throw Error("sorted_kron: matrix dimension does not match its collection");
  Matrix k = kron(a, b);
  std::vector<long> perm = sort_permutation_vector(c, d);
  Matrix out(k.rows(), k.cols());
  for (long i = 0; i < k.rows(); ++i)
    for (long j = 0; j < k.cols(); ++j) out(perm[i], perm[j]) = k(i, j);
  return out;
}

Matrix partial_trace(const SystemCollection& c, const Matrix& m, const SystemCollection& over) {
  if (!over.subset_of(c)) throw Error("partial trace: traced systems not a subset");
  if (m.rows() != c.dimension() || m.cols() != c.dimension())
    throw Error("partial trace: matrix dimension does not match collection");
  SystemCollection kept = systems_difference(c, over);

  std::vector<long> dims = c.dims();
  std::vector<bool> traced(dims.size(), false);
  for (std::size_t k = 0; k < c.names().size(); ++k)
    if (over.contains(c.names()[k])) traced[k] = true;

  std::vector<long> kept_dims, traced_dims;
  std::vector<std::size_t> kept_pos, traced_pos;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    if (traced[k]) {
      traced_dims.push_back(dims[k]);
      traced_pos.push_back(k);
    } else {
      kept_dims.push_back(dims[k]);
      kept_pos.push_back(k);
    }
  }
  long kept_dim = kept.dimension();
  long traced_dim = 1;
  for (long d : traced_dims) traced_dim *= d;

  Matrix out = Matrix::Zero(kept_dim, kept_dim);
  std::vector<long> row_digits(dims.size()), col_digits(dims.size());
  for (long rk = 0; rk < kept_dim; ++rk) {
    std::vector<long> rkd = index_digits(rk, kept_dims);
    for (long ck = 0; ck < kept_dim; ++ck) {
      std::vector<long> ckd = index_digits(ck, kept_dims);
      Complex acc = 0.0;
      for (long t = 0; t < traced_dim; ++t) {
        std::vector<long> td = index_digits(t, traced_dims);
        for (std::size_t k = 0; k < kept_pos.size(); ++k) {
          row_digits[kept_pos[k]] = rkd[k];
          col_digits[kept_pos[k]] = ckd[k];
        }
        for (std::size_t k = 0; k < traced_pos.size(); ++k) {
          row_digits[traced_pos[k]] = td[k];
          col_digits[traced_pos[k]] = td[k];
        }
        acc += m(digits_index(row_digits, dims), digits_index(col_digits, dims));
      }
      out(rk, ck) = acc;
    }
  }
  return out;
}

DistinguishResult distinguishing_density(const std::vector<Matrix>& effects,
                                         const SystemCollection& systems,
                                         const DistinguishOptions& opts) {
  long dim = systems.dimension();
  for (const auto& e : effects)
    if (e.rows() != dim || e.cols() != dim)
      throw Error("distinguishing density: effect dimension does not match systems");
  for (std::size_t i = 0; i < effects.size(); ++i)
    for (std::size_t j = i + 1; j < effects.size(); ++j)
      if (matrix_equal(effects[i], effects[j], opts.tol))
        throw Error("distinguishing density: effects " + std::to_string(i) + " and " +
                    std::to_string(j) + " are indistinct");

  Rng rng(opts.seed);
  double best_gap = -1.0;
  std::pair<std::size_t, std::size_t> worst_pair{0, 0};
  for (int attempt = 1; attempt <= opts.max_attempts; ++attempt) {
    Matrix g(dim, dim);
    for (long i = 0; i < dim; ++i)
      for (long j = 0; j < dim; ++j) g(i, j) = Complex(rng.gaussian(), rng.gaussian());
    Matrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    rho = hermitize(rho);

    DistinguishResult result;
    result.rho = DensityOperator(systems, rho, opts.tol);
    result.seed = opts.seed;
    result.attempts = attempt;
    result.min_gap = effects.empty() ? 0.0 : std::numeric_limits<double>::infinity();
    bool ok = true;
    for (std::size_t i = 0; i < effects.size(); ++i)
      for (std::size_t j = i + 1; j < effects.size(); ++j) {
        double gap = std::abs(born_real(effects[i], result.rho) -
                              born_real(effects[j], result.rho));
        result.pair_gaps.push_back({{i, j}, gap});
        if (gap < result.min_gap) result.min_gap = gap;
        if (gap <= opts.sep_tol) {
          ok = false;
          if (gap > best_gap) {
            best_gap = gap;
            worst_pair = {i, j};
          }
        }
      }
    if (effects.size() < 2) result.min_gap = 0.0;
    if (ok) return result;
  }
  throw Error("distinguishing density: attempts exhausted; closest pair (" +
              std::to_string(worst_pair.first) + "," + std::to_string(worst_pair.second) + ")");
}

std::optional<Matrix> named_matrix(const std::string& name) {
  // Entries written out exactly: 1/2 is representable, 1/sqrt(2) is not, so
  // the projectors are built from halves rather than amplitude products.
  auto two = [](double a, double b, double c, double d) {
    Matrix m(2, 2);
    m << Complex(a), Complex(b), Complex(c), Complex(d);
    return m;
  };
  if (name == "ket0" || name == "proj0") return two(1, 0, 0, 0);
  if (name == "ket1" || name == "proj1") return two(0, 0, 0, 1);
  if (name == "ket+" || name == "proj+") return two(0.5, 0.5, 0.5, 0.5);
  if (name == "ket-" || name == "proj-") return two(0.5, -0.5, -0.5, 0.5);
  if (name == "bell_phi_plus") {
    Matrix m = Matrix::Zero(4, 4);
    m(0, 0) = m(0, 3) = m(3, 0) = m(3, 3) = 0.5;
    return m;
  }
  static const std::regex mixed_re(R"(maximally_mixed\((\d+)\))");
  std::smatch match;
  if (std::regex_match(name, match, mixed_re)) {
    long d = std::stol(match[1]);
    if (d <= 0) return std::nullopt;
    return Matrix(Matrix::Identity(d, d) / static_cast<double>(d));
  }
  return std::nullopt;
}

}  // namespace elts
