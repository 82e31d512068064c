#pragma once

// Shared test fixtures: exact effect families, random system generators and
// small constructors used across the suites.

#include "elts/bisim.hpp"
#include "elts/gen.hpp"
#include "elts/json_io.hpp"
#include "elts/laws.hpp"

#include <string>
#include <vector>

#ifndef ELTS_DATA_DIR
#define ELTS_DATA_DIR "data"
#endif

namespace testsupport {

using namespace elts;

inline std::string data_path(const std::string& rel) {
  return std::string(ELTS_DATA_DIR) + "/" + rel;
}

inline Matrix proj0() { return *named_matrix("proj0"); }
inline Matrix proj1() { return *named_matrix("proj1"); }
inline Matrix projp() { return *named_matrix("proj+"); }
inline Matrix projm() { return *named_matrix("proj-"); }
inline Matrix id2() { return Matrix::Identity(2, 2); }

// Effect families with exactly representable entries; every family sums to
// the identity bit-for-bit, so Born images stay exactly consistent across
// different support structures.
inline std::vector<std::vector<Matrix>> exact_families(long dim) {
  std::vector<std::vector<Matrix>> out;
  if (dim == 1) {
    out.push_back({Matrix::Identity(1, 1)});
    return out;
  }
  if (dim == 2) {
    out.push_back({proj0(), proj1()});
    out.push_back({projp(), projm()});
    out.push_back({id2()});
    out.push_back({0.5 * id2(), 0.5 * id2()});
    return out;
  }
  if (dim == 4) {
    auto lift = [](const std::vector<Matrix>& a, const std::vector<Matrix>& b) {
      std::vector<Matrix> f;
      for (const auto& x : a)
        for (const auto& y : b) f.push_back(kron(x, y));
      return f;
    };
    out.push_back(lift({proj0(), proj1()}, {id2()}));
    out.push_back(lift({id2()}, {projp(), projm()}));
    out.push_back(lift({proj0(), proj1()}, {projp(), projm()}));
    out.push_back({Matrix::Identity(4, 4)});
    return out;
  }
  out.push_back({Matrix::Identity(dim, dim)});
  return out;
}

inline FiniteTable diamond() {
  return FiniteTable({"0", "a", "a'", "1"}, "0", "1", {{{"a", "a'"}, "1"}, {{"0", "1"}, "1"}},
                     {{"0", "1"}, {"a", "a'"}, {"a'", "a"}, {"1", "0"}});
}

// Horizontal sum of two diamonds: 1 = a+a' = b+b' with no cross sums; the
// smallest table on which AM and kernel bisimilarity differ exactly.
inline FiniteTable double_diamond() {
  return FiniteTable(
      {"0", "a", "a'", "b", "b'", "1"}, "0", "1",
      {{{"a", "a'"}, "1"}, {{"b", "b'"}, "1"}, {{"0", "1"}, "1"}},
      {{"0", "1"}, {"a", "a'"}, {"a'", "a"}, {"b", "b'"}, {"b'", "b"}, {"1", "0"}});
}

struct RandomSystem {
  Elts sys;
  std::vector<std::pair<std::string, std::string>> clone_pairs;
};

// Random qLTS built from exact effect families (<= 6 distinct effects), with
// optional cloned states guaranteeing kernel-related pairs.
inline RandomSystem random_qlts(Rng& rng, const EffectAlgebraContext& ctx,
                                const SystemCollection& grade, int max_states, int clones) {
  long dim = grade.dimension();
  auto families = exact_families(dim);
  // keep at most two families so the distinct-effect count stays small
  std::vector<std::vector<Matrix>> pool;
  pool.push_back(families[rng.uniform(0, static_cast<long>(families.size()) - 1)]);
  pool.push_back(families[rng.uniform(0, static_cast<long>(families.size()) - 1)]);

  int n = static_cast<int>(rng.uniform(2, max_states));
  std::vector<std::string> states;
  for (int i = 0; i < n; ++i) states.push_back("s" + std::to_string(i));

  LabelSet labels;
  labels.visible = {"a", "abar"};
  labels.bar = {{"a", "abar"}, {"abar", "a"}};

  std::map<std::pair<std::string, std::string>, std::vector<EffectDistribution>> transitions;
  std::vector<std::string> label_list{"tau", "a", "abar"};
  for (const auto& s : states)
    for (const auto& label : label_list) {
      double roll = rng.real();
      int count = roll < 0.45 ? 1 : (roll < 0.6 ? 2 : 0);
      for (int c = 0; c < count; ++c) {
        const auto& family = pool[rng.uniform(0, static_cast<long>(pool.size()) - 1)];
        // nonempty random subset of the family
        std::size_t mask = rng.uniform(1, (1L << family.size()) - 1);
        std::map<std::string, EffectValue> weights;
        std::vector<std::string> targets = states;
        for (std::size_t k = 0; k < family.size(); ++k) {
          if (!(mask & (std::size_t(1) << k)) || targets.empty()) continue;
          long pick = rng.uniform(0, static_cast<long>(targets.size()) - 1);
          // duplicate matrices inside a family can land on the same target
          auto it = weights.find(targets[pick]);
          if (it == weights.end()) {
            weights.emplace(targets[pick], EffectValue::matrix(family[k]));
          } else {
            it->second = EffectValue::matrix(it->second.mat() + family[k]);
          }
          targets.erase(targets.begin() + pick);
        }
        transitions[{s, label}].push_back(EffectDistribution(ctx, grade, std::move(weights)));
      }
    }

  RandomSystem out;
  std::vector<std::string> all_states = states;
  for (int c = 0; c < clones; ++c) {
    std::string base = states[rng.uniform(0, static_cast<long>(states.size()) - 1)];
    std::string copy = base + "c" + std::to_string(c);
    all_states.push_back(copy);
    for (const auto& label : label_list) {
      auto it = transitions.find({base, label});
      if (it != transitions.end()) transitions[{copy, label}] = it->second;
    }
    out.clone_pairs.emplace_back(base, copy);
  }
  out.sys = Elts(ctx, grade, std::move(all_states), std::move(labels), std::move(transitions),
                 false);
  return out;
}

// Random probabilistic Markov chain with designed lumping structure: states
// are grouped into blocks that share a quotient distribution, lifted by
// splitting each block weight over the block members.
inline Elts random_prob_mc(Rng& rng, int max_states) {
  EffectAlgebraContext ctx = EffectAlgebraContext::probability();
  int n_blocks = static_cast<int>(rng.uniform(1, 3));
  std::vector<std::vector<std::string>> blocks(n_blocks);
  int total = static_cast<int>(rng.uniform(n_blocks, max_states));
  std::vector<std::string> states;
  for (int i = 0; i < total; ++i) {
    std::string id = "s" + std::to_string(i);
    states.push_back(id);
    blocks[i < n_blocks ? i : rng.uniform(0, n_blocks - 1)].push_back(id);
  }

  std::map<std::pair<std::string, std::string>, std::vector<EffectDistribution>> transitions;
  for (int b = 0; b < n_blocks; ++b) {
    auto quotient_weights = gen::sub_convex_weights(rng, n_blocks, 12);
    for (const auto& s : blocks[b]) {
      std::map<std::string, EffectValue> weights;
      for (int t = 0; t < n_blocks; ++t) {
        const Rational& w = quotient_weights[t];
        if (w == 0) continue;
        // split w over the members of block t
        Integer num = numerator(w);
        Integer den = denominator(w);
        std::size_t members = blocks[t].size();
        std::vector<Integer> parts(members, 0);
        Integer left = num;
        for (std::size_t m = 0; m + 1 < members; ++m) {
          Integer take(rng.uniform(0, static_cast<long>(left.convert_to<long long>())));
          parts[m] = take;
          left -= take;
        }
        parts[members - 1] = left;
        for (std::size_t m = 0; m < members; ++m) {
          if (parts[m] == 0) continue;
          Rational part(parts[m], den);
          auto it = weights.find(blocks[t][m]);
          if (it == weights.end())
            weights.emplace(blocks[t][m], EffectValue::rational(part));
          else
            it->second = EffectValue::rational(it->second.rat() + part);
        }
      }
      transitions[{s, "tau"}].push_back(
          EffectDistribution(ctx, SystemCollection::empty(), std::move(weights)));
    }
  }
  return Elts(ctx, SystemCollection::empty(), std::move(states), LabelSet{}, std::move(transitions),
              true);
}

// Relation induced by a partition restricted to X x Y.
inline std::set<std::pair<std::string, std::string>> partition_relation(
    const Partition& p, const std::vector<std::string>& xs, const std::vector<std::string>& ys) {
  std::set<std::pair<std::string, std::string>> out;
  for (const auto& x : xs)
    for (const auto& y : ys)
      if (p.same_block(x, y)) out.insert({x, y});
  return out;
}

}  // namespace testsupport
