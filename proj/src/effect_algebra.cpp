#include "elts/effect_algebra.hpp"

#include "elts/errors.hpp"

#include <sstream>

namespace elts {

std::string kind_name(Kind k) {
  switch (k) {
    case Kind::probability: return "probability";
    case Kind::quantum: return "quantum";
    case Kind::finite: return "finite";
  }
  return "?";
}

EffectAlgebraContext EffectAlgebraContext::probability() { return {}; }

EffectAlgebraContext EffectAlgebraContext::quantum(SystemRegistry reg, double tol) {
  EffectAlgebraContext ctx;
  ctx.kind = Kind::quantum;
  ctx.registry = std::move(reg);
  ctx.tol = tol;
  for (const auto& [name, dim] : ctx.registry)
    if (dim <= 0) throw Error("system '" + name + "' has non-positive dimension");
  if (tol < 0) throw Error("negative tolerance");
  return ctx;
}

EffectAlgebraContext EffectAlgebraContext::finite(FiniteTable table) {
  EffectAlgebraContext ctx;
  ctx.kind = Kind::finite;
  ctx.table = std::make_shared<const FiniteTable>(std::move(table));
  return ctx;
}

bool EffectAlgebraContext::compatible(const EffectAlgebraContext& other) const {
  if (kind != other.kind) return false;
  switch (kind) {
    case Kind::probability: return true;
    case Kind::quantum: return registry == other.registry;
    case Kind::finite: return table && other.table && *table == *other.table;
  }
  return false;
}

namespace {

[[noreturn]] void kind_mismatch(const EffectAlgebraContext& ctx, const EffectValue& v) {
  std::string got = v.is_rational() ? "rational" : v.is_matrix() ? "matrix" : "finite";
  throw KindMismatchError("value of kind '" + got + "' used in a " + kind_name(ctx.kind) +
                          " context");
}

void require_kind(const EffectAlgebraContext& ctx, const EffectValue& v) {
  switch (ctx.kind) {
    case Kind::probability:
      if (!v.is_rational()) kind_mismatch(ctx, v);
      break;
    case Kind::quantum:
      if (!v.is_matrix()) kind_mismatch(ctx, v);
      break;
    case Kind::finite:
      if (!v.is_finite()) kind_mismatch(ctx, v);
      break;
  }
}

}  // namespace

void check_value(const EffectAlgebraContext& ctx, const EffectValue& v, long expected_dim) {
  require_kind(ctx, v);
  switch (ctx.kind) {
    case Kind::probability:
      if (v.rat() < 0 || v.rat() > 1)
        throw Error("rational weight " + format_rational(v.rat()) + " outside [0,1]");
      break;
    case Kind::quantum:
      if (expected_dim > 0 && v.mat().rows() != expected_dim)
        throw Error("matrix dimension " + std::to_string(v.mat().rows()) + " where " +
                    std::to_string(expected_dim) + " was expected");
      if (!validate_effect(v.mat(), ctx.tol)) throw Error("matrix is not a valid effect");
      break;
    case Kind::finite:
      if (!ctx.table->has(v.name()))
        throw Error("element '" + v.name() + "' not in the table carrier");
      break;
  }
}

EffectValue zero_value(const EffectAlgebraContext& ctx, long dim) {
  switch (ctx.kind) {
    case Kind::probability: return EffectValue::rational(0);
    case Kind::quantum: return EffectValue::matrix(Matrix::Zero(dim, dim));
    case Kind::finite: return EffectValue::finite(ctx.table->zero());
  }
  throw Error("unreachable");
}

EffectValue one_value(const EffectAlgebraContext& ctx, long dim) {
  switch (ctx.kind) {
    case Kind::probability: return EffectValue::rational(1);
    case Kind::quantum: return EffectValue::matrix(Matrix::Identity(dim, dim));
    case Kind::finite: return EffectValue::finite(ctx.table->one());
  }
  throw Error("unreachable");
}

bool value_equal(const EffectAlgebraContext& ctx, const EffectValue& a, const EffectValue& b) {
  require_kind(ctx, a);
  require_kind(ctx, b);
  switch (ctx.kind) {
    case Kind::probability: return a.rat() == b.rat();
    case Kind::quantum: return matrix_equal(a.mat(), b.mat(), ctx.tol);
    case Kind::finite: return a.name() == b.name();
  }
  return false;
}

bool value_is_zero(const EffectAlgebraContext& ctx, const EffectValue& v) {
  require_kind(ctx, v);
  switch (ctx.kind) {
    case Kind::probability: return v.rat() == 0;
    case Kind::quantum: return v.mat().cwiseAbs().maxCoeff() <= ctx.tol;
    case Kind::finite: return v.name() == ctx.table->zero();
  }
  return false;
}

std::optional<EffectValue> pcm_sum(const EffectAlgebraContext& ctx, const EffectValue& a,
                                   const EffectValue& b) {
  require_kind(ctx, a);
  require_kind(ctx, b);
  switch (ctx.kind) {
    case Kind::probability: {
      Rational s = a.rat() + b.rat();
      if (s > 1) return std::nullopt;
      return EffectValue::rational(std::move(s));
    }
    case Kind::quantum: {
      if (a.mat().rows() != b.mat().rows()) throw Error("pcm_sum: dimension mismatch");
      Matrix s = a.mat() + b.mat();
      if (max_eigenvalue(s) > 1.0 + ctx.tol) return std::nullopt;
      return EffectValue::matrix(std::move(s));
    }
    case Kind::finite: {
      auto s = ctx.table->sum(a.name(), b.name());
      if (!s) return std::nullopt;
      return EffectValue::finite(*s);
    }
  }
  return std::nullopt;
}

EffectValue orthocomplement(const EffectAlgebraContext& ctx, const EffectValue& a) {
  require_kind(ctx, a);
  switch (ctx.kind) {
    case Kind::probability: return EffectValue::rational(Rational(1) - a.rat());
    case Kind::quantum:
      return EffectValue::matrix(Matrix::Identity(a.mat().rows(), a.mat().cols()) - a.mat());
    case Kind::finite: return EffectValue::finite(ctx.table->complement(a.name()));
  }
  throw Error("unreachable");
}

bool leq(const EffectAlgebraContext& ctx, const EffectValue& a, const EffectValue& b) {
  require_kind(ctx, a);
  require_kind(ctx, b);
  switch (ctx.kind) {
    case Kind::probability: return a.rat() <= b.rat();
    case Kind::quantum: {
      if (a.mat().rows() != b.mat().rows()) throw Error("leq: dimension mismatch");
      return min_eigenvalue(b.mat() - a.mat()) >= -ctx.tol;
    }
    case Kind::finite: {
      for (const auto& c : ctx.table->carrier()) {
        auto s = ctx.table->sum(a.name(), c);
        if (s && *s == b.name()) return true;
      }
      return false;
    }
  }
  return false;
}

std::optional<EffectValue> difference(const EffectAlgebraContext& ctx, const EffectValue& a,
                                      const EffectValue& b) {
  require_kind(ctx, a);
  require_kind(ctx, b);
  switch (ctx.kind) {
    case Kind::probability:
      if (a.rat() > b.rat()) return std::nullopt;
      return EffectValue::rational(b.rat() - a.rat());
    case Kind::quantum: {
      if (!leq(ctx, a, b)) return std::nullopt;
      return EffectValue::matrix(b.mat() - a.mat());
    }
    case Kind::finite: {
      for (const auto& c : ctx.table->carrier()) {
        auto s = ctx.table->sum(a.name(), c);
        if (s && *s == b.name()) return EffectValue::finite(c);
      }
      return std::nullopt;
    }
  }
  return std::nullopt;
}

std::optional<EffectValue> nary_sum(const EffectAlgebraContext& ctx,
                                    const std::vector<EffectValue>& values, long dim) {
  EffectValue acc = zero_value(ctx, dim);
  for (const auto& v : values) {
    auto s = pcm_sum(ctx, acc, v);
    if (!s) return std::nullopt;
    acc = *s;
  }
  return acc;
}

EffectValue boxtimes(const EffectAlgebraContext& ctx, const EffectValue& a,
                     const SystemCollection& ga, const EffectValue& b,
                     const SystemCollection& gb) {
  require_kind(ctx, a);
  require_kind(ctx, b);
  switch (ctx.kind) {
    case Kind::probability: return EffectValue::rational(a.rat() * b.rat());
    case Kind::quantum: {
      if (!ga.disjoint_from(gb))
        throw GradeClashError("boxtimes over overlapping grades " + ga.to_string() + " and " +
                              gb.to_string());
      return EffectValue::matrix(sorted_kron(ga, a.mat(), gb, b.mat()));
    }
    case Kind::finite: {
      // Only the unit/zero laws hold in a bare table algebra.
      if (b.name() == ctx.table->one()) return a;
      if (a.name() == ctx.table->one()) return b;
      if (a.name() == ctx.table->zero() || b.name() == ctx.table->zero())
        return EffectValue::finite(ctx.table->zero());
      throw Error("finite table algebras carry no product for '" + a.name() + "' and '" +
                  b.name() + "'");
    }
  }
  throw Error("unreachable");
}

std::string value_key(const EffectValue& v) {
  if (v.is_rational()) return "r:" + format_rational(v.rat());
  if (v.is_finite()) return "f:" + v.name();
  return "m:" + matrix_key(v.mat());
}

std::string value_to_string(const EffectValue& v) {
  if (v.is_rational()) return format_rational(v.rat());
  if (v.is_finite()) return v.name();
  std::ostringstream os;
  os << v.mat();
  return os.str();
}

}  // namespace elts
