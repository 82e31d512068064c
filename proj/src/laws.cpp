#include "elts/laws.hpp"

#include "elts/coupling.hpp"
#include "elts/errors.hpp"
#include "elts/gen.hpp"

#include <algorithm>
#include <cmath>

namespace elts {

namespace {

FiniteTable diamond_table() {
  return FiniteTable({"0", "a", "a'", "1"}, "0", "1",
                     {{{"a", "a'"}, "1"}, {{"0", "1"}, "1"}},
                     {{"0", "1"}, {"a", "a'"}, {"a'", "a"}, {"1", "0"}});
}

// Largest per-state weight distance; infinite when one side has weight the
// other lacks entirely.
double dist_diff(const EffectDistribution& a, const EffectDistribution& b) {
  const auto& ctx = a.ctx();
  std::set<std::string> ids;
  for (const auto& [id, w] : a.weights()) ids.insert(id);
  for (const auto& [id, w] : b.weights()) ids.insert(id);
  double worst = 0.0;
  for (const auto& id : ids) {
    const EffectValue* wa = a.weight(id);
    const EffectValue* wb = b.weight(id);
    switch (ctx.kind) {
      case Kind::probability: {
        Rational ra = wa ? wa->rat() : Rational(0);
        Rational rb = wb ? wb->rat() : Rational(0);
        worst = std::max(worst, std::abs(to_double(ra - rb)));
        break;
      }
      case Kind::quantum: {
        long dim = a.grade().dimension();
        Matrix ma = wa ? wa->mat() : Matrix::Zero(dim, dim);
        Matrix mb = wb ? wb->mat() : Matrix::Zero(dim, dim);
        worst = std::max(worst, matrix_distance(ma, mb));
        break;
      }
      case Kind::finite: {
        bool same = (wa == nullptr && wb == nullptr) ||
                    (wa && wb && wa->name() == wb->name());
        worst = std::max(worst, same ? 0.0 : 1.0);
        break;
      }
    }
  }
  return worst;
}

struct LawRun {
  LawResult result;
  explicit LawRun(std::string name) { result.name = std::move(name); }
  void sample(double deviation, double tol, const std::string& note = "") {
    ++result.samples;
    result.worst = std::max(result.worst, deviation);
    if (deviation > tol && result.note.empty())
      result.note = note.empty() ? "deviation above tolerance" : note;
  }
  void fail(const std::string& note) {
    ++result.samples;
    result.worst = std::max(result.worst, 1.0);
    if (result.note.empty()) result.note = note;
  }
  LawResult finish(double tol) {
    result.pass = result.worst <= tol && result.note.empty();
    return result;
  }
};

std::vector<EffectAlgebraContext> law_contexts() {
  return {EffectAlgebraContext::probability(),
          EffectAlgebraContext::quantum({{"q1", 2}}, kDefaultTol),
          EffectAlgebraContext::finite(diamond_table())};
}

long ctx_dim(const EffectAlgebraContext& ctx) {
  return ctx.kind == Kind::quantum ? 2 : 1;
}

double value_diff(const EffectAlgebraContext& ctx, const EffectValue& a, const EffectValue& b) {
  switch (ctx.kind) {
    case Kind::probability: return std::abs(to_double(a.rat() - b.rat()));
    case Kind::quantum: return matrix_distance(a.mat(), b.mat());
    case Kind::finite: return a.name() == b.name() ? 0.0 : 1.0;
  }
  return 1.0;
}

}  // namespace

std::vector<LawResult> algebra_laws(const LawConfig& cfg) {
  Rng rng(cfg.seed);
  std::vector<LawResult> out;
  auto contexts = law_contexts();

  {
    LawRun zero("algebra/zero-unit"), compl_one("algebra/complement-sums-to-one");
    LawRun comm("algebra/sum-commutes"), assoc("algebra/sum-associates");
    LawRun refl("algebra/leq-reflexive"), antisym("algebra/leq-antisymmetric");
    LawRun trans("algebra/leq-transitive"), diff("algebra/difference-recomposes");
    for (int s = 0; s < cfg.samples; ++s) {
      const auto& ctx = contexts[s % contexts.size()];
      long dim = ctx_dim(ctx);
      EffectValue a = gen::value(rng, ctx, dim);
      EffectValue b = gen::value(rng, ctx, dim);
      EffectValue c = gen::value(rng, ctx, dim);

      auto z = pcm_sum(ctx, a, zero_value(ctx, dim));
      if (!z) zero.fail("a+0 undefined");
      else zero.sample(value_diff(ctx, *z, a), cfg.tol, "a+0 != a");

      auto one = pcm_sum(ctx, a, orthocomplement(ctx, a));
      if (!one) compl_one.fail("a+a' undefined");
      else compl_one.sample(value_diff(ctx, *one, one_value(ctx, dim)), cfg.tol, "a+a' != 1");

      auto ab = pcm_sum(ctx, a, b);
      auto ba = pcm_sum(ctx, b, a);
      if (ab.has_value() != ba.has_value()) comm.fail("orthogonality not symmetric");
      else if (ab) comm.sample(value_diff(ctx, *ab, *ba), cfg.tol, "a+b != b+a");
      else comm.sample(0.0, cfg.tol);

      auto bc = pcm_sum(ctx, b, c);
      auto a_bc = bc ? pcm_sum(ctx, a, *bc) : std::nullopt;
      if (a_bc) {
        auto ab2 = pcm_sum(ctx, a, b);
        auto ab_c = ab2 ? pcm_sum(ctx, *ab2, c) : std::nullopt;
        if (!ab2 || !ab_c) assoc.fail("associativity: (a+b)+c undefined");
        else assoc.sample(value_diff(ctx, *ab_c, *a_bc), cfg.tol, "(a+b)+c != a+(b+c)");
      } else {
        assoc.sample(0.0, cfg.tol);
      }

      refl.sample(leq(ctx, a, a) ? 0.0 : 1.0, cfg.tol, "a <= a fails");

      if (leq(ctx, a, b) && leq(ctx, b, a))
        antisym.sample(value_diff(ctx, a, b), std::max(cfg.tol, 2 * ctx.tol), "antisymmetry");
      else antisym.sample(0.0, cfg.tol);

      if (leq(ctx, a, b) && leq(ctx, b, c))
        trans.sample(leq(ctx, a, c) ? 0.0 : 1.0, cfg.tol, "transitivity");
      else trans.sample(0.0, cfg.tol);

      if (auto d = difference(ctx, a, b)) {
        auto back = pcm_sum(ctx, a, *d);
        if (!back) diff.fail("a+(b-a) undefined");
        else diff.sample(value_diff(ctx, *back, b), cfg.tol, "a+(b-a) != b");
      } else {
        diff.sample(0.0, cfg.tol);
      }
    }
    out.push_back(zero.finish(cfg.tol));
    out.push_back(compl_one.finish(cfg.tol));
    out.push_back(comm.finish(cfg.tol));
    out.push_back(assoc.finish(cfg.tol));
    out.push_back(refl.finish(cfg.tol));
    out.push_back(antisym.finish(std::max(cfg.tol, 2 * kDefaultTol)));
    out.push_back(trans.finish(cfg.tol));
    out.push_back(diff.finish(cfg.tol));
  }

  {
    // [0,1] is decomposable: every valid instance has a coupling.
    LawRun feasible("algebra/probability-coupling-feasible");
    auto ctx = EffectAlgebraContext::probability();
    for (int s = 0; s < cfg.samples; ++s) {
      auto weights = gen::sub_convex_weights(rng, 2);
      Rational total = weights[0] + weights[1];
      long den = rng.uniform(1, 24);
      Rational c = total * Rational(rng.uniform(0, den), den);
      Rational d = total - c;
      auto verdict = is_decomposable_instance(ctx, EffectValue::rational(weights[0]),
                                              EffectValue::rational(weights[1]),
                                              EffectValue::rational(c), EffectValue::rational(d));
      if (!verdict.feasible || !verdict.witness) {
        feasible.fail("instance reported infeasible");
        continue;
      }
      // verify the witness marginals exactly
      const auto& w = *verdict.witness;
      bool ok = w[0][0].rat() + w[0][1].rat() == weights[0] &&
                w[1][0].rat() + w[1][1].rat() == weights[1] &&
                w[0][0].rat() + w[1][0].rat() == c && w[0][1].rat() + w[1][1].rat() == d;
      feasible.sample(ok ? 0.0 : 1.0, cfg.tol, "witness marginals wrong");
    }
    out.push_back(feasible.finish(cfg.tol));
  }
  return out;
}

namespace {

struct NestedSample {
  SystemCollection g1, g2, g3;
  std::vector<std::pair<EffectValue, std::vector<std::pair<EffectValue, EffectDistribution>>>>
      outer;
};

NestedSample nested_sample(Rng& rng, const EffectAlgebraContext& ctx,
                           const std::vector<std::string>& states) {
  NestedSample s;
  if (ctx.kind == Kind::quantum) {
    std::vector<std::string> names;
    for (const auto& [name, dim] : ctx.registry) names.push_back(name);
    // three disjoint slices of the registry (some possibly empty)
    std::vector<std::vector<std::string>> slice(3);
    for (const auto& n : names) slice[rng.uniform(0, 2)].push_back(n);
    s.g1 = SystemCollection(ctx.registry, slice[0]);
    s.g2 = SystemCollection(ctx.registry, slice[1]);
    s.g3 = SystemCollection(ctx.registry, slice[2]);
  } else {
    s.g1 = s.g2 = s.g3 = SystemCollection::empty();
  }

  auto weights_for = [&](const SystemCollection& grade, int k) {
    std::vector<EffectValue> out;
    if (ctx.kind == Kind::quantum) {
      long dim = grade.dimension();
      auto family = gen::measurement(rng, dim, static_cast<int>(std::min<long>(k, dim)));
      long fs = static_cast<long>(family.size());
      long reps = (k + fs - 1) / fs;  // reuse count; scaling keeps the total below I
      for (int i = 0; i < k; ++i)
        out.push_back(EffectValue::matrix(family[i % fs] / static_cast<double>(reps)));
    } else {
      for (const auto& w : gen::sub_convex_weights(rng, k))
        out.push_back(EffectValue::rational(w));
    }
    return out;
  };

  int n_outer = static_cast<int>(rng.uniform(1, 2));
  auto outer_weights = weights_for(s.g1, n_outer);
  for (int i = 0; i < n_outer; ++i) {
    int n_mid = static_cast<int>(rng.uniform(1, 2));
    auto mid_weights = weights_for(s.g2, n_mid);
    std::vector<std::pair<EffectValue, EffectDistribution>> middle;
    for (int j = 0; j < n_mid; ++j)
      middle.emplace_back(mid_weights[j], gen::distribution(rng, ctx, s.g3, states));
    s.outer.emplace_back(outer_weights[i], std::move(middle));
  }
  return s;
}

}  // namespace

std::vector<LawResult> monad_laws(const LawConfig& cfg) {
  Rng rng(cfg.seed);
  std::vector<LawResult> out;
  std::vector<std::string> states{"x", "y", "z"};
  std::vector<EffectAlgebraContext> contexts;
  if (cfg.context_filter == "all" || cfg.context_filter == "probability")
    contexts.push_back(EffectAlgebraContext::probability());
  if (cfg.context_filter == "all" || cfg.context_filter == "quantum")
    contexts.push_back(
        EffectAlgebraContext::quantum({{"q1", 2}, {"q2", 2}, {"q3", 2}}, kDefaultTol));

  LawRun unit_left("monad/left-unitality"), unit_right("monad/right-unitality");
  LawRun assoc("monad/mult-associativity"), alpha("monad/alpha-commutes");
  LawRun natural("monad/pushforward-naturality");
  LawRun ext_id("monad/extend-identity"), ext_comp("monad/extend-composes");
  LawRun ext_born("monad/extend-preserves-born");

  for (int s = 0; s < cfg.samples; ++s) {
    const auto& ctx = contexts[s % contexts.size()];
    bool quantum = ctx.kind == Kind::quantum;
    SystemCollection whole =
        quantum ? SystemCollection::full(ctx.registry) : SystemCollection::empty();
    SystemCollection grade = quantum ? gen::subcollection(rng, ctx.registry, 2)
                                     : SystemCollection::empty();
    EffectDistribution d = gen::distribution(rng, ctx, grade, states);

    // left unitality: mu_{0,m}(1 . Delta) = Delta
    {
      EffectDistribution lhs = graded_mult(
          ctx, SystemCollection::empty(quantum ? ctx.registry : SystemRegistry{}),
          {{one_value(ctx, 1), d}});
      unit_left.sample(dist_diff(lhs, d), cfg.tol, "mu(eta x Delta) != Delta");
    }
    // right unitality: mu_{m,0}(sum e_i . eta(x_i)) = Delta
    {
      std::vector<std::pair<EffectValue, EffectDistribution>> items;
      for (const auto& [id, w] : d.weights())
        items.emplace_back(w, unit_distribution(ctx, id, quantum ? ctx.registry : SystemRegistry{}));
      EffectDistribution lhs = graded_mult(ctx, grade, items);
      unit_right.sample(dist_diff(lhs, d), cfg.tol, "mu(T eta) != Delta");
    }
    // associativity on a nested three-level sample
    {
      NestedSample nest = nested_sample(rng, ctx, states);
      // path A: flatten middle+inner first
      std::vector<std::pair<EffectValue, EffectDistribution>> flattened;
      for (const auto& [e1, middle] : nest.outer)
        flattened.emplace_back(e1, graded_mult(ctx, nest.g2, middle));
      EffectDistribution path_a = graded_mult(ctx, nest.g1, flattened);
      // path B: combine outer and middle weights first, over the inner
      // distributions as opaque points
      auto g12 = systems_union(nest.g1, nest.g2);
      std::vector<std::pair<EffectValue, EffectDistribution>> combined;
      for (const auto& [e1, middle] : nest.outer)
        for (const auto& [e2, inner] : middle)
          combined.emplace_back(boxtimes(ctx, e1, nest.g1, e2, nest.g2), inner);
      EffectDistribution path_b = graded_mult(ctx, *g12, combined);
      assoc.sample(dist_diff(path_a, path_b), cfg.tol, "mu o T mu != mu o mu T");
    }
    // alpha commutes with the swap
    if (quantum ? grade.disjoint_from(systems_difference(whole, grade)) : true) {
      SystemCollection other = quantum ? systems_difference(whole, grade) : grade;
      EffectDistribution e = gen::distribution(rng, ctx, other, states);
      EffectDistribution ab = product_alpha(d, e);
      EffectDistribution ba = product_alpha(
          e, d, [](const std::string& y, const std::string& x) { return x + "|" + y; });
      alpha.sample(dist_diff(ab, ba), cfg.tol, "alpha not commutative");
    }
    // naturality: m o D(f) = D(f) o m for the Born morphism
    if (quantum) {
      std::map<std::string, std::string> f{{"x", "x"}, {"y", "x"}, {"z", "z"}};
      DensityOperator rho = gen::density(rng, grade, ctx.tol);
      EffectMorphism m = born_morphism(ctx, rho);
      EffectDistribution lhs = map_weights(m, pushforward(f, d));
      EffectDistribution rhs = pushforward(f, map_weights(m, d));
      natural.sample(dist_diff(lhs, rhs), cfg.tol, "naturality square broken");
    }
    // extension laws
    {
      ext_id.sample(dist_diff(extend(d, grade), d), 0.0, "xi_{m<=m} != id");
      if (quantum) {
        SystemCollection mid = grade, top = whole;
        // grade <= mid' <= top with mid' = grade + one extra system when any
        SystemCollection rest = systems_difference(whole, grade);
        SystemCollection mid2 = grade;
        if (!rest.is_empty()) {
          std::vector<std::string> names = grade.names();
          names.push_back(rest.names()[0]);
          mid2 = SystemCollection(ctx.registry, names);
        }
        EffectDistribution two_step = extend(extend(d, mid2), top);
        EffectDistribution one_step = extend(d, top);
        ext_comp.sample(dist_diff(two_step, one_step), cfg.tol, "xi composition broken");

        if (!rest.is_empty()) {
          DensityOperator rho1 = gen::density(rng, grade, ctx.tol);
          DensityOperator rho2 = gen::density(rng, rest, ctx.tol);
          Matrix joint = sorted_kron(grade, rho1.matrix, rest, rho2.matrix);
          DensityOperator rho12(whole, joint, 10 * ctx.tol);
          EffectDistribution extended = extend(d, whole);
          double worst = 0.0;
          for (const auto& [id, w] : d.weights()) {
            const EffectValue* we = extended.weight(id);
            if (!we) { worst = 1.0; break; }
            double before = to_double(born(w.mat(), rho1, {0, ctx.tol}));
            double after = to_double(born(we->mat(), rho12, {0, 10 * ctx.tol}));
            worst = std::max(worst, std::abs(before - after));
          }
          ext_born.sample(worst, cfg.tol, "Born value changed by extension");
        }
      }
    }
  }

  out.push_back(unit_left.finish(cfg.tol));
  out.push_back(unit_right.finish(cfg.tol));
  out.push_back(assoc.finish(cfg.tol));
  out.push_back(alpha.finish(cfg.tol));
  out.push_back(natural.finish(cfg.tol));
  out.push_back(ext_id.finish(0.0));
  out.push_back(ext_comp.finish(cfg.tol));
  out.push_back(ext_born.finish(cfg.tol));
  return out;
}

std::vector<LawResult> quantum_laws(const LawConfig& cfg) {
  Rng rng(cfg.seed);
  std::vector<LawResult> out;
  SystemRegistry registry{{"q1", 2}, {"q2", 2}, {"q3", 2}};

  LawRun comm("quantum/boxtimes-commutes"), assoc("quantum/boxtimes-associates");
  LawRun born_c("quantum/born-complement"), born_f("quantum/born-factorizes");
  LawRun pt_trace("quantum/partial-trace-preserves-trace");
  LawRun pt_prod("quantum/partial-trace-product-rule");
  LawRun dist_self("quantum/distinguishing-density-selfcheck");
  LawRun iso("quantum/effectsiso-operational");

  for (int s = 0; s < cfg.samples; ++s) {
    SystemCollection c(registry, {"q1"});
    SystemCollection d(registry, {"q2"});
    SystemCollection e(registry, {"q3"});
    Matrix a = gen::effect(rng, 2), b = gen::effect(rng, 2), f = gen::effect(rng, 2);

    // commutativity, with the corrupt-sort mutation hook
    {
      Matrix lhs = sorted_kron(c, a, d, b);
      Matrix rhs = sorted_kron(d, b, c, a);
      if (cfg.corrupt_sort && rhs.rows() >= 2) rhs.row(0).swap(rhs.row(1));
      comm.sample(matrix_distance(lhs, rhs), cfg.tol, "Sort(C,D) disagreement");
    }
    // associativity
    {
      auto cd = *systems_union(c, d);
      auto de = *systems_union(d, e);
      Matrix lhs = sorted_kron(*systems_union(c, d), sorted_kron(c, a, d, b), e, f);
      Matrix rhs = sorted_kron(c, a, de, sorted_kron(d, b, e, f));
      assoc.sample(matrix_distance(lhs, rhs), cfg.tol, "boxtimes associativity");
      (void)cd;
    }
    // Born complement and factorization
    {
      DensityOperator rho1 = gen::density(rng, c);
      double p = born_real(a, rho1);
      double q = born_real(Matrix::Identity(2, 2) - a, rho1);
      born_c.sample(std::abs(p + q - 1.0), cfg.tol, "born(L)+born(L') != 1");

      DensityOperator rho2 = gen::density(rng, d);
      Matrix joint_rho = sorted_kron(c, rho1.matrix, d, rho2.matrix);
      DensityOperator rho12(*systems_union(c, d), joint_rho, 10 * kDefaultTol);
      double lhs = born_real(sorted_kron(c, a, d, b), rho12);
      double rhs = born_real(a, rho1) * born_real(b, rho2);
      born_f.sample(std::abs(lhs - rhs), cfg.tol, "born does not factorize");
    }
    // partial trace laws
    {
      auto cd = *systems_union(c, d);
      Matrix m(4, 4);
      for (long i = 0; i < 4; ++i)
        for (long j = 0; j < 4; ++j) m(i, j) = Complex(rng.gaussian(), rng.gaussian());
      m = hermitize(m);
      Matrix reduced = partial_trace(cd, m, d);
      pt_trace.sample(std::abs(reduced.trace().real() - m.trace().real()), cfg.tol,
                      "trace not preserved");
      Matrix prod = sorted_kron(c, a, d, b);
      Matrix rule = partial_trace(cd, prod, d);
      pt_prod.sample(matrix_distance(rule, a * b.trace()), cfg.tol,
                     "tr_D(A (x) B) != A tr(B)");
    }
    // distinguishing density self-check on a random finite effect set
    {
      SystemCollection sys = rng.real() < 0.5 ? c : *systems_union(c, d);
      long dim = sys.dimension();
      int count = static_cast<int>(rng.uniform(1, 8));
      std::vector<Matrix> effects;
      for (int k = 0; k < count; ++k) {
        Matrix cand = gen::effect(rng, dim);
        bool dup = false;
        for (const auto& kept : effects)
          if (matrix_equal(kept, cand, kDefaultTol)) dup = true;
        if (!dup) effects.push_back(cand);
      }
      DistinguishOptions dopts;
      dopts.seed = rng.u64();
      try {
        DistinguishResult r = distinguishing_density(effects, sys, dopts);
        bool ok = r.attempts <= dopts.max_attempts &&
                  (effects.size() < 2 || r.min_gap > dopts.sep_tol);
        dist_self.sample(ok ? 0.0 : 1.0, cfg.tol, "self-verification failed");
      } catch (const Error& err) {
        dist_self.fail(err.what());
      }
    }
    // operational effect isomorphism on a pair
    {
      Matrix l1 = gen::effect(rng, 2);
      bool make_equal = rng.real() < 0.5;
      Matrix l2 = make_equal ? l1 : gen::effect(rng, 2);
      bool matrices_equal = matrix_equal(l1, l2, kDefaultTol);
      bool borns_agree = true;
      if (!matrices_equal) {
        DistinguishOptions dopts;
        dopts.seed = rng.u64();
        DistinguishResult r = distinguishing_density({l1, l2}, c, dopts);
        borns_agree = std::abs(born_real(l1, r.rho) - born_real(l2, r.rho)) <= dopts.sep_tol;
      }
      for (int k = 0; k < 100 && borns_agree; ++k) {
        DensityOperator rho = gen::density(rng, c);
        if (std::abs(born_real(l1, rho) - born_real(l2, rho)) > 1e-6) borns_agree = false;
      }
      iso.sample(matrices_equal == borns_agree ? 0.0 : 1.0, cfg.tol,
                 "equality and Born agreement diverge");
    }
  }

  out.push_back(comm.finish(cfg.tol));
  out.push_back(assoc.finish(cfg.tol));
  out.push_back(born_c.finish(cfg.tol));
  out.push_back(born_f.finish(cfg.tol));
  out.push_back(pt_trace.finish(cfg.tol));
  out.push_back(pt_prod.finish(cfg.tol));
  out.push_back(dist_self.finish(cfg.tol));
  out.push_back(iso.finish(cfg.tol));
  return out;
}

std::vector<LawResult> run_laws(const std::string& scope, const LawConfig& cfg) {
  std::vector<LawResult> out;
  if (scope == "algebra" || scope == "all") {
    auto r = algebra_laws(cfg);
    out.insert(out.end(), r.begin(), r.end());
  }
  if (scope == "monad" || scope == "all") {
    auto r = monad_laws(cfg);
    out.insert(out.end(), r.begin(), r.end());
  }
  if (scope == "quantum" || scope == "all") {
    auto r = quantum_laws(cfg);
    out.insert(out.end(), r.begin(), r.end());
  }
  if (out.empty()) throw Error("unknown law scope '" + scope + "'");
  return out;
}

}  // namespace elts
