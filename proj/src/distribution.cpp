#include "elts/distribution.hpp"

#include "elts/errors.hpp"

#include <algorithm>

namespace elts {

EffectDistribution::EffectDistribution(EffectAlgebraContext ctx, SystemCollection grade,
                                       std::map<std::string, EffectValue> weights)
    : ctx_(std::move(ctx)), grade_(std::move(grade)) {
  if (ctx_.kind != Kind::quantum && !grade_.is_empty())
    throw Error("non-quantum distributions carry the empty grade");
  long dim = ctx_.kind == Kind::quantum ? grade_.dimension() : 0;
  for (auto& [id, w] : weights) {
    check_value(ctx_, w, dim);
    if (!value_is_zero(ctx_, w)) weights_.emplace(id, std::move(w));
  }
  std::vector<EffectValue> all;
  for (const auto& [id, w] : weights_) all.push_back(w);
  if (!nary_sum(ctx_, all, std::max<long>(dim, 1)))
    throw Error("distribution total exceeds one");
}

std::vector<std::string> EffectDistribution::support() const {
  std::vector<std::string> out;
  for (const auto& [id, w] : weights_) out.push_back(id);
  return out;
}

const EffectValue* EffectDistribution::weight(const std::string& id) const {
  auto it = weights_.find(id);
  return it == weights_.end() ? nullptr : &it->second;
}

EffectValue EffectDistribution::total() const {
  std::vector<EffectValue> all;
  for (const auto& [id, w] : weights_) all.push_back(w);
  long dim = ctx_.kind == Kind::quantum ? grade_.dimension() : 1;
  auto t = nary_sum(ctx_, all, dim);
  if (!t) throw Error("distribution total exceeds one");
  return *t;
}

bool dist_equal(const EffectDistribution& a, const EffectDistribution& b) {
  if (!a.ctx().compatible(b.ctx()) || a.grade() != b.grade()) return false;
  if (a.weights().size() != b.weights().size()) return false;
  auto ia = a.weights().begin();
  auto ib = b.weights().begin();
  for (; ia != a.weights().end(); ++ia, ++ib) {
    if (ia->first != ib->first) return false;
    if (!value_equal(a.ctx(), ia->second, ib->second)) return false;
  }
  return true;
}

std::string dist_key(const EffectDistribution& d) {
  std::string key = "[" + d.grade().to_string();
  for (const auto& [id, w] : d.weights()) key += "|" + id + "=" + value_key(w);
  return key + "]";
}

EffectDistribution pushforward(const std::map<std::string, std::string>& f,
                               const EffectDistribution& d) {
  std::map<std::string, EffectValue> out;
  for (const auto& [id, w] : d.weights()) {
    auto target = f.find(id);
    if (target == f.end()) throw Error("pushforward map undefined on state '" + id + "'");
    auto it = out.find(target->second);
    if (it == out.end()) {
      out.emplace(target->second, w);
    } else {
      auto merged = pcm_sum(d.ctx(), it->second, w);
      if (!merged)
        throw Error("pushforward: merged weight sum undefined at '" + target->second + "'");
      it->second = *merged;
    }
  }
  return EffectDistribution(d.ctx(), d.grade(), std::move(out));
}

EffectDistribution map_weights(const EffectMorphism& m, const EffectDistribution& d) {
  if (!m.source.compatible(d.ctx()) || m.source_grade != d.grade())
    throw KindMismatchError("morphism '" + m.name + "' does not match the distribution domain");
  std::map<std::string, EffectValue> out;
  for (const auto& [id, w] : d.weights()) out.emplace(id, m.fn(w));

  // A quantum total is only below one within tol, so its exact image can
  // overshoot one by up to tol; absorb that into the largest weight.
  if (m.target.kind == Kind::probability && m.source.kind == Kind::quantum && !out.empty()) {
    Rational total = 0;
    for (const auto& [id, w] : out) total += w.rat();
    if (total > 1) {
      Rational excess = total - 1;
      Rational slack = exact_rational(4 * m.source.tol) + Rational(1, Integer(1) << 40);
      if (excess <= slack) {
        auto largest = out.begin();
        for (auto it = out.begin(); it != out.end(); ++it)
          if (it->second.rat() > largest->second.rat()) largest = it;
        largest->second = EffectValue::rational(largest->second.rat() - excess);
      }
    }
  }
  return EffectDistribution(m.target, m.target_grade, std::move(out));
}

EffectDistribution unit_distribution(const EffectAlgebraContext& ctx, const std::string& id,
                                     SystemRegistry registry) {
  SystemCollection grade = SystemCollection::empty(
      ctx.kind == Kind::quantum ? (registry.empty() ? ctx.registry : registry) : SystemRegistry{});
  std::map<std::string, EffectValue> weights;
  weights.emplace(id, one_value(ctx, 1));
  return EffectDistribution(ctx, std::move(grade), std::move(weights));
}

EffectDistribution graded_mult(
    const EffectAlgebraContext& ctx, const SystemCollection& outer_grade,
    const std::vector<std::pair<EffectValue, EffectDistribution>>& items) {
  SystemCollection inner_grade =
      items.empty() ? SystemCollection::empty(outer_grade.registry()) : items[0].second.grade();
  for (const auto& [e, d] : items) {
    if (d.grade() != inner_grade) throw Error("graded_mult: inner grades differ");
    if (!d.ctx().compatible(ctx)) throw KindMismatchError("graded_mult: context mismatch");
  }
  auto joined = systems_union(outer_grade, inner_grade);
  if (!joined)
    throw GradeClashError("graded_mult over overlapping grades " + outer_grade.to_string() +
                          " and " + inner_grade.to_string());

  std::map<std::string, EffectValue> out;
  for (const auto& [e, d] : items) {
    for (const auto& [id, w] : d.weights()) {
      EffectValue term = boxtimes(ctx, e, outer_grade, w, inner_grade);
      auto it = out.find(id);
      if (it == out.end()) {
        out.emplace(id, std::move(term));
      } else {
        auto merged = pcm_sum(ctx, it->second, term);
        if (!merged) throw Error("graded_mult: weight sum undefined at '" + id + "'");
        it->second = *merged;
      }
    }
  }
  return EffectDistribution(ctx, *joined, std::move(out));
}

EffectDistribution product_alpha(
    const EffectDistribution& left, const EffectDistribution& right,
    const std::function<std::string(const std::string&, const std::string&)>& pair_id) {
  if (!left.ctx().compatible(right.ctx()))
    throw KindMismatchError("product_alpha: context mismatch");
  auto joined = systems_union(left.grade(), right.grade());
  if (!joined)
    throw GradeClashError("product_alpha over overlapping grades " + left.grade().to_string() +
                          " and " + right.grade().to_string());
  std::map<std::string, EffectValue> out;
  for (const auto& [x, wx] : left.weights())
    for (const auto& [y, wy] : right.weights()) {
      std::string id = pair_id(x, y);
      if (out.count(id)) throw Error("product_alpha: pair id collision at '" + id + "'");
      out.emplace(id, boxtimes(left.ctx(), wx, left.grade(), wy, right.grade()));
    }
  return EffectDistribution(left.ctx(), *joined, std::move(out));
}

EffectDistribution product_alpha(const EffectDistribution& left,
                                 const EffectDistribution& right) {
  return product_alpha(left, right,
                       [](const std::string& a, const std::string& b) { return a + "|" + b; });
}

EffectDistribution extend(const EffectDistribution& d, const SystemCollection& target_grade) {
  if (d.ctx().kind != Kind::quantum) {
    if (!target_grade.is_empty())
      throw Error("extend: non-quantum distributions have the empty grade");
    return d;
  }
  if (!d.grade().subset_of(target_grade))
    throw Error("extend: target grade does not contain the source grade");
  if (d.grade() == target_grade) return d;
  SystemCollection missing = systems_difference(target_grade, d.grade());
  EffectValue filler = one_value(d.ctx(), missing.dimension());
  std::map<std::string, EffectValue> out;
  for (const auto& [id, w] : d.weights())
    out.emplace(id, boxtimes(d.ctx(), w, d.grade(), filler, missing));
  return EffectDistribution(d.ctx(), target_grade, std::move(out));
}

EffectMorphism identity_morphism(const EffectAlgebraContext& ctx, SystemCollection grade) {
  return {"identity", ctx, grade, ctx, grade, [](const EffectValue& v) { return v; }};
}

EffectMorphism born_morphism(const EffectAlgebraContext& source, const DensityOperator& rho,
                             const BornOptions& opts) {
  if (source.kind != Kind::quantum)
    throw KindMismatchError("born morphism needs a quantum source");
  DensityOperator density = rho;
  BornOptions born_opts = opts;
  born_opts.tol = std::max(born_opts.tol, source.tol);
  return {"born",
          source,
          rho.systems,
          EffectAlgebraContext::probability(),
          SystemCollection::empty(),
          [density, born_opts](const EffectValue& v) {
            return EffectValue::rational(born(v.mat(), density, born_opts));
          }};
}

EffectMorphism partial_eval_morphism(const EffectAlgebraContext& source,
                                     const SystemCollection& grade, const DensityOperator& rho) {
  if (source.kind != Kind::quantum)
    throw KindMismatchError("partial evaluation needs a quantum source");
  if (!rho.systems.subset_of(grade))
    throw Error("partial evaluation: rho's systems are not a subset of the grade");
  SystemCollection evaluated = rho.systems;
  SystemCollection remaining = systems_difference(grade, evaluated);
  Matrix filler = Matrix::Identity(remaining.dimension(), remaining.dimension());
  Matrix rho_extended = sorted_kron(evaluated, rho.matrix, remaining, filler);
  return {"partial_eval",
          source,
          grade,
          source,
          remaining,
          [grade, evaluated, rho_extended](const EffectValue& v) {
            Matrix traced = partial_trace(grade, v.mat() * rho_extended, evaluated);
            return EffectValue::matrix(hermitize(traced));
          }};
}

EffectMorphism finite_hom_morphism(const EffectAlgebraContext& source,
                                   const EffectAlgebraContext& target,
                                   const std::map<std::string, EffectValue>& images) {
  if (source.kind != Kind::finite)
    throw KindMismatchError("finite homomorphism needs a finite source");
  const FiniteTable& table = *source.table;
  for (const auto& name : table.carrier()) {
    if (!images.count(name)) throw Error("homomorphism image missing for '" + name + "'");
    check_value(target, images.at(name));
  }
  auto img = [&](const std::string& name) { return images.at(name); };
  if (!value_equal(target, img(table.zero()), zero_value(target)))
    throw Error("homomorphism does not preserve zero");
  if (!value_equal(target, img(table.one()), one_value(target)))
    throw Error("homomorphism does not preserve one");
  for (const auto& [pair, result] : table.sums()) {
    auto mapped = pcm_sum(target, img(pair.first), img(pair.second));
    if (!mapped || !value_equal(target, *mapped, img(result)))
      throw Error("homomorphism does not preserve " + pair.first + "+" + pair.second);
  }
  for (const auto& [elem, comp] : table.complements()) {
    if (!value_equal(target, orthocomplement(target, img(elem)), img(comp)))
      throw Error("homomorphism does not preserve the complement of " + elem);
  }
  std::map<std::string, EffectValue> copy = images;
  return {"finite_hom",
          source,
          SystemCollection::empty(),
          target,
          SystemCollection::empty(),
          [copy](const EffectValue& v) { return copy.at(v.name()); }};
}

}  // namespace elts
