#include "elts/elts.hpp"

#include "elts/errors.hpp"

#include <algorithm>

namespace elts {

const std::string& LabelSet::bar_of(const std::string& l) const {
  auto it = bar.find(l);
  if (it == bar.end()) throw Error("label '" + l + "' has no involution entry");
  return it->second;
}

std::vector<Violation> LabelSet::check() const {
  std::vector<Violation> out;
  if (visible.count(tau)) out.push_back({"labels", "tau appears among the visible labels"});
  for (const auto& l : visible) {
    auto it = bar.find(l);
    if (it == bar.end()) {
      out.push_back({"labels", "visible label '" + l + "' has no involution entry"});
      continue;
    }
    if (it->second == tau) out.push_back({"labels", "bar(" + l + ") is tau"});
    if (!visible.count(it->second))
      out.push_back({"labels", "bar(" + l + ") = '" + it->second + "' is not a visible label"});
    auto back = bar.find(it->second);
    if (back == bar.end() || back->second != l)
      out.push_back({"labels", "involution not self-inverse at '" + l + "'"});
  }
  for (const auto& [l, b] : bar)
    if (!visible.count(l)) out.push_back({"labels", "involution entry for unknown label '" + l + "'"});
  return out;
}

Elts::Elts(EffectAlgebraContext ctx, SystemCollection grade, std::vector<std::string> states,
           LabelSet labels,
           std::map<std::pair<std::string, std::string>, std::vector<EffectDistribution>>
               transitions,
           bool markov_chain)
    : ctx_(std::move(ctx)),
      grade_(std::move(grade)),
      states_(std::move(states)),
      labels_(std::move(labels)),
      markov_chain_(markov_chain) {
  std::sort(states_.begin(), states_.end());
  if (std::adjacent_find(states_.begin(), states_.end()) != states_.end())
    throw Error("duplicate state id");
  for (auto& [key, dists] : transitions) {
    // set semantics: deduplicate under distribution equality
    std::vector<EffectDistribution> dedup;
    for (auto& d : dists) {
      bool seen = false;
      for (const auto& kept : dedup)
        if (dist_equal(kept, d)) {
          seen = true;
          break;
        }
      if (!seen) dedup.push_back(std::move(d));
    }
    std::sort(dedup.begin(), dedup.end(),
              [](const EffectDistribution& x, const EffectDistribution& y) {
                return dist_key(x) < dist_key(y);
              });
    if (!dedup.empty()) transitions_.emplace(key, std::move(dedup));
  }
}

bool Elts::has_state(const std::string& id) const {
  return std::binary_search(states_.begin(), states_.end(), id);
}

const std::vector<EffectDistribution>& Elts::dists(const std::string& state,
                                                   const std::string& label) const {
  static const std::vector<EffectDistribution> none;
  auto it = transitions_.find({state, label});
  return it == transitions_.end() ? none : it->second;
}

std::vector<Violation> validate(const Elts& sys) {
  std::vector<Violation> out = sys.labels().check();
  if (sys.ctx().kind != Kind::quantum && !sys.grade().is_empty())
    out.push_back({"grade", "non-quantum systems carry the empty grade"});
  if (sys.ctx().kind == Kind::quantum) {
    for (const auto& name : sys.grade().names())
      if (!sys.ctx().registry.count(name))
        out.push_back({"grade", "system '" + name + "' not in the algebra registry"});
  }
  std::set<std::string> used_labels;
  for (const auto& [key, dists] : sys.transitions()) {
    const auto& [from, label] = key;
    std::string where = from + " --" + label + "-->";
    if (!sys.has_state(from)) out.push_back({where, "unknown source state"});
    if (!sys.labels().is_label(label)) out.push_back({where, "unknown label"});
    used_labels.insert(label);
    for (const auto& d : dists) {
      if (!d.ctx().compatible(sys.ctx())) out.push_back({where, "distribution context mismatch"});
      if (d.grade() != sys.grade())
        out.push_back({where, "distribution grade " + d.grade().to_string() +
                                  " differs from the system grade"});
      for (const auto& id : d.support())
        if (!sys.has_state(id)) out.push_back({where, "unknown state '" + id + "' in support"});
      // Well-formedness of the weights themselves is enforced on
      // construction; re-check the total so hand-built systems surface it.
      std::vector<EffectValue> ws;
      for (const auto& [id, w] : d.weights()) ws.push_back(w);
      if (!nary_sum(d.ctx(), ws, d.ctx().kind == Kind::quantum ? d.grade().dimension() : 1))
        out.push_back({where, "total exceeds one"});
    }
  }
  if (sys.markov_chain()) {
    if (used_labels.size() > 1)
      out.push_back({"markov", "markov-chain mode allows exactly one label"});
    for (const auto& s : sys.states()) {
      std::size_t count = 0;
      for (const auto& [key, dists] : sys.transitions())
        if (key.first == s) count += dists.size();
      if (count != 1)
        out.push_back({"markov", "state '" + s + "' has " + std::to_string(count) +
                                     " distributions, markov-chain mode needs exactly 1"});
    }
  }
  return out;
}

bool elts_equal(const Elts& a, const Elts& b) {
  if (!a.ctx().compatible(b.ctx()) || a.grade() != b.grade()) return false;
  if (a.states() != b.states() || !(a.labels() == b.labels())) return false;
  if (a.markov_chain() != b.markov_chain()) return false;
  if (a.transitions().size() != b.transitions().size()) return false;
  auto ia = a.transitions().begin();
  auto ib = b.transitions().begin();
  for (; ia != a.transitions().end(); ++ia, ++ib) {
    if (ia->first != ib->first || ia->second.size() != ib->second.size()) return false;
    for (std::size_t k = 0; k < ia->second.size(); ++k)
      if (!dist_equal(ia->second[k], ib->second[k])) return false;
  }
  return true;
}

Elts rename_states(const Elts& sys, const std::map<std::string, std::string>& f) {
  std::vector<std::string> states;
  for (const auto& s : sys.states()) {
    auto it = f.find(s);
    if (it == f.end()) throw Error("rename map undefined on state '" + s + "'");
    states.push_back(it->second);
  }
  std::map<std::pair<std::string, std::string>, std::vector<EffectDistribution>> transitions;
  for (const auto& [key, dists] : sys.transitions()) {
    std::vector<EffectDistribution> mapped;
    for (const auto& d : dists) mapped.push_back(pushforward(f, d));
    transitions.emplace(std::make_pair(f.at(key.first), key.second), std::move(mapped));
  }
  return Elts(sys.ctx(), sys.grade(), std::move(states), sys.labels(), std::move(transitions),
              sys.markov_chain());
}

namespace {

// Representatives for tolerance-equal weights, chosen in deterministic
// transition order. Exact contexts are returned unchanged.
std::vector<std::pair<Matrix, Matrix>> weight_representatives(const Elts& sys) {
  std::vector<std::pair<Matrix, Matrix>> reps;
  if (sys.ctx().kind != Kind::quantum) return reps;
  for (const auto& [key, dists] : sys.transitions())
    for (const auto& d : dists)
      for (const auto& [id, w] : d.weights()) {
        bool found = false;
        for (const auto& [probe, rep] : reps)
          if (matrix_equal(probe, w.mat(), sys.ctx().tol)) {
            found = true;
            break;
          }
        if (!found) reps.push_back({w.mat(), w.mat()});
      }
  return reps;
}

Elts apply_morphism(const Elts& sys, const EffectMorphism& m, bool canonicalize) {
  if (!m.source.compatible(sys.ctx()) || m.source_grade != sys.grade())
    throw KindMismatchError("morphism '" + m.name + "' does not match the system");
  auto reps = canonicalize ? weight_representatives(sys) : std::vector<std::pair<Matrix, Matrix>>{};
  auto canonical = [&](const EffectDistribution& d) {
    if (reps.empty()) return d;
    std::map<std::string, EffectValue> weights;
    for (const auto& [id, w] : d.weights()) {
      const Matrix* rep = nullptr;
      for (const auto& [probe, r] : reps)
        if (matrix_equal(probe, w.mat(), sys.ctx().tol)) {
          rep = &r;
          break;
        }
      weights.emplace(id, rep ? EffectValue::matrix(*rep) : w);
    }
    return EffectDistribution(d.ctx(), d.grade(), std::move(weights));
  };

  std::map<std::pair<std::string, std::string>, std::vector<EffectDistribution>> transitions;
  for (const auto& [key, dists] : sys.transitions()) {
    std::vector<EffectDistribution> mapped;
    for (const auto& d : dists) mapped.push_back(map_weights(m, canonical(d)));
    transitions.emplace(key, std::move(mapped));
  }
  return Elts(m.target, m.target_grade, sys.states(), sys.labels(), std::move(transitions),
              sys.markov_chain());
}

}  // namespace

Elts instantiate(const Elts& sys, const DensityOperator& rho, const InstantiateOptions& opts) {
  if (sys.ctx().kind != Kind::quantum)
    throw KindMismatchError("instantiate needs a quantum system");
  if (rho.systems != sys.grade())
    throw Error("instantiate: rho is over " + rho.systems.to_string() + ", the system over " +
                sys.grade().to_string());
  return apply_morphism(sys, born_morphism(sys.ctx(), rho, opts.born), opts.canonicalize);
}

Elts remap_weights(const Elts& sys, const EffectMorphism& m) {
  return apply_morphism(sys, m, false);
}

Elts partial_eval(const Elts& sys, const DensityOperator& rho, const InstantiateOptions& opts) {
  if (sys.ctx().kind != Kind::quantum)
    throw KindMismatchError("partial evaluation needs a quantum system");
  if (!rho.systems.subset_of(sys.grade()))
    throw Error("partial evaluation: rho's systems " + rho.systems.to_string() +
                " are not a subset of the grade " + sys.grade().to_string());
  if (rho.systems == sys.grade()) return instantiate(sys, rho, opts);
  return apply_morphism(sys, partial_eval_morphism(sys.ctx(), sys.grade(), rho),
                        opts.canonicalize);
}

Elts parallel(const Elts& a, const Elts& b, const ParallelOptions& opts) {
  if (a.ctx().kind != b.ctx().kind)
    throw KindMismatchError("parallel composition across algebra kinds");
  if (!a.ctx().compatible(b.ctx()))
    throw Error("parallel composition needs a shared algebra (registry/table)");
  auto joined = systems_union(a.grade(), b.grade());
  if (!joined)
    throw GradeClashError("grade clash (no-cloning): " + a.grade().to_string() + " vs " +
                          b.grade().to_string());

  // Label-set merge: equal ids are identified, involutions must agree.
  if (a.labels().tau != b.labels().tau)
    throw Error("label-set conflict: tau is '" + a.labels().tau + "' vs '" + b.labels().tau + "'");
  LabelSet labels = a.labels();
  for (const auto& l : b.labels().visible) labels.visible.insert(l);
  for (const auto& [l, lb] : b.labels().bar) {
    auto it = labels.bar.find(l);
    if (it != labels.bar.end() && it->second != lb)
      throw Error("label-set conflict: bar(" + l + ") disagrees");
    labels.bar.emplace(l, lb);
  }
  if (labels.visible.count(labels.tau)) throw Error("label-set conflict: tau is visible");

  auto pair_id = [&](const std::string& s, const std::string& t) {
    return s + opts.separator + t;
  };
  std::vector<std::string> states;
  std::set<std::string> seen;
  for (const auto& s : a.states())
    for (const auto& t : b.states()) {
      std::string id = pair_id(s, t);
      if (!seen.insert(id).second)
        throw Error("state id collision under separator '" + opts.separator + "': " + id);
      states.push_back(id);
    }

  std::map<std::pair<std::string, std::string>, std::vector<EffectDistribution>> transitions;
  auto add = [&](const std::string& from, const std::string& label, EffectDistribution d) {
    transitions[{from, label}].push_back(std::move(d));
  };

  for (const auto& s : a.states())
    for (const auto& t : b.states()) {
      std::string from = pair_id(s, t);
      // (i) left moves, the right side idles at its grade
      EffectDistribution idle_right = extend(unit_distribution(b.ctx(), t, b.grade().registry()),
                                             b.grade());
      for (const auto& [key, dists] : a.transitions()) {
        if (key.first != s) continue;
        for (const auto& d : dists)
          add(from, key.second, product_alpha(d, idle_right, pair_id));
      }
      // (ii) right moves, the left side idles
      EffectDistribution idle_left = extend(unit_distribution(a.ctx(), s, a.grade().registry()),
                                            a.grade());
      for (const auto& [key, dists] : b.transitions()) {
        if (key.first != t) continue;
        for (const auto& d : dists)
          add(from, key.second, product_alpha(idle_left, d, pair_id));
      }
      // (iii) synchronization on label / bar(label) into tau
      for (const auto& mu : labels.visible) {
        auto bar_it = labels.bar.find(mu);
        if (bar_it == labels.bar.end()) continue;
        const auto& left = a.dists(s, mu);
        const auto& right = b.dists(t, bar_it->second);
        for (const auto& d : left)
          for (const auto& e : right) add(from, labels.tau, product_alpha(d, e, pair_id));
      }
    }

  return Elts(a.ctx(), *joined, std::move(states), std::move(labels), std::move(transitions),
              false);
}

}  // namespace elts
