#include "elts/gen.hpp"

#include "elts/errors.hpp"

#include <algorithm>

namespace elts {
namespace gen {

Rational rational(Rng& rng, long max_den) {
  long den = rng.uniform(1, max_den);
  long num = rng.uniform(0, den);
  return Rational(num, den);
}

std::vector<Rational> sub_convex_weights(Rng& rng, int k, long max_den) {
  long den = rng.uniform(std::max<long>(k, 1), max_den);
  std::vector<Rational> out;
  long left = den;
  for (int i = 0; i < k; ++i) {
    long take = rng.uniform(0, left);
    out.push_back(Rational(take, den));
    left -= take;
  }
  return out;
}

Matrix unitary(Rng& rng, long dim) {
  Matrix g(dim, dim);
  for (long i = 0; i < dim; ++i)
    for (long j = 0; j < dim; ++j) g(i, j) = Complex(rng.gaussian(), rng.gaussian());
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  return q;
}

Matrix effect(Rng& rng, long dim) {
  Matrix g(dim, dim);
  for (long i = 0; i < dim; ++i)
    for (long j = 0; j < dim; ++j) g(i, j) = Complex(rng.gaussian(), rng.gaussian());
  Matrix h = hermitize(g * g.adjoint());
  double top = max_eigenvalue(h);
  if (top <= 0) return Matrix::Zero(dim, dim);
  double scale = (0.2 + 0.8 * rng.real()) / top;
  return h * scale;
}

Matrix density_matrix(Rng& rng, long dim) {
  Matrix g(dim, dim);
  for (long i = 0; i < dim; ++i)
    for (long j = 0; j < dim; ++j) g(i, j) = Complex(rng.gaussian(), rng.gaussian());
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return hermitize(rho);
}

DensityOperator density(Rng& rng, const SystemCollection& systems, double tol) {
  return DensityOperator(systems, density_matrix(rng, systems.dimension()), tol);
}

std::vector<Matrix> measurement(Rng& rng, long dim, int outcomes) {
  if (outcomes < 1) throw Error("measurement needs at least one outcome");
  outcomes = std::min<long>(outcomes, dim);
  Matrix u = unitary(rng, dim);
  // split the columns into `outcomes` consecutive non-empty groups
  std::vector<long> cut{0};
  for (int i = 1; i < outcomes; ++i) cut.push_back(i);
  for (long extra = outcomes; extra < dim; ++extra) {
    // distribute remaining columns randomly over the groups
    long g = rng.uniform(1, outcomes);
    for (std::size_t k = g; k < cut.size(); ++k) ++cut[k];
  }
  cut.push_back(dim);
  std::vector<Matrix> out;
  for (int g = 0; g < outcomes; ++g) {
    Matrix p = Matrix::Zero(dim, dim);
    for (long c = cut[g]; c < cut[g + 1]; ++c) p += u.col(c) * u.col(c).adjoint();
    out.push_back(hermitize(p));
  }
  return out;
}

EffectValue value(Rng& rng, const EffectAlgebraContext& ctx, long dim) {
  switch (ctx.kind) {
    case Kind::probability: return EffectValue::rational(rational(rng));
    case Kind::quantum: return EffectValue::matrix(effect(rng, dim));
    case Kind::finite: {
      const auto& carrier = ctx.table->carrier();
      return EffectValue::finite(carrier[rng.uniform(0, static_cast<long>(carrier.size()) - 1)]);
    }
  }
  throw Error("unreachable");
}

EffectDistribution distribution(Rng& rng, const EffectAlgebraContext& ctx,
                                const SystemCollection& grade,
                                const std::vector<std::string>& states, int max_support) {
  int k = static_cast<int>(rng.uniform(1, std::min<long>(max_support, states.size())));
  std::vector<std::string> pool = states;
  std::map<std::string, EffectValue> weights;
  switch (ctx.kind) {
    case Kind::probability: {
      auto ws = sub_convex_weights(rng, k);
      for (int i = 0; i < k; ++i) {
        long pick = rng.uniform(0, static_cast<long>(pool.size()) - 1);
        weights.emplace(pool[pick], EffectValue::rational(ws[i]));
        pool.erase(pool.begin() + pick);
      }
      break;
    }
    case Kind::quantum: {
      long dim = grade.dimension();
      auto family = measurement(rng, dim, static_cast<int>(std::max<long>(std::min<long>(k, dim), 1)));
      int kk = std::min<int>(k, static_cast<int>(family.size()));
      for (int i = 0; i < kk; ++i) {
        long pick = rng.uniform(0, static_cast<long>(pool.size()) - 1);
        Matrix w = family[i];
        if (rng.real() < 0.3) w *= 0.5;  // occasionally a sub-effect
        weights.emplace(pool[pick], EffectValue::matrix(w));
        pool.erase(pool.begin() + pick);
      }
      break;
    }
    case Kind::finite: {
      EffectValue acc = zero_value(ctx);
      for (int i = 0; i < k && !pool.empty(); ++i) {
        EffectValue w = value(rng, ctx);
        auto s = pcm_sum(ctx, acc, w);
        if (!s) continue;
        acc = *s;
        long pick = rng.uniform(0, static_cast<long>(pool.size()) - 1);
        weights.emplace(pool[pick], w);
        pool.erase(pool.begin() + pick);
      }
      break;
    }
  }
  return EffectDistribution(ctx, grade, std::move(weights));
}

SystemCollection subcollection(Rng& rng, const SystemRegistry& registry, int max_size) {
  std::vector<std::string> all;
  for (const auto& [name, dim] : registry) all.push_back(name);
  std::vector<std::string> names;
  for (const auto& name : all) {
    if (static_cast<int>(names.size()) >= max_size) break;
    if (rng.real() < 0.5) names.push_back(name);
  }
  return SystemCollection(registry, std::move(names));
}

}  // namespace gen
}  // namespace elts
