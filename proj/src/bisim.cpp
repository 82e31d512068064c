#include "elts/bisim.hpp"

#include "elts/errors.hpp"
#include "elts/gen.hpp"

#include <algorithm>
#include <functional>

namespace elts {

bool Partition::same_block(const std::string& x, const std::string& y) const {
  auto ix = block_of.find(x), iy = block_of.find(y);
  if (ix == block_of.end() || iy == block_of.end())
    throw Error("state not covered by the partition");
  return ix->second == iy->second;
}

bool Partition::refines(const Partition& coarser) const {
  for (const auto& block : blocks)
    for (std::size_t k = 1; k < block.size(); ++k)
      if (!coarser.same_block(block[0], block[k])) return false;
  return true;
}

Combined combine(const Elts& a, const Elts& b) {
  if (a.ctx().kind != b.ctx().kind || !a.ctx().compatible(b.ctx()))
    throw KindMismatchError("cannot compare systems over different algebras");
  if (a.grade() != b.grade())
    throw Error("cannot compare systems of grade " + a.grade().to_string() + " and " +
                b.grade().to_string());

  Combined out;
  if (elts_equal(a, b)) {
    out.sys = a;
    for (const auto& s : a.states()) {
      out.a_map[s] = s;
      out.b_map[s] = s;
    }
    out.a_states = a.states();
    out.b_states = b.states();
    return out;
  }

  bool clash = false;
  for (const auto& s : b.states())
    if (a.has_state(s)) clash = true;
  std::map<std::string, std::string> b_rename;
  for (const auto& s : b.states()) b_rename[s] = clash ? s + "#b" : s;
  Elts b2 = clash ? rename_states(b, b_rename) : b;
  for (const auto& s : b2.states())
    if (a.has_state(s)) throw Error("state id clash not resolved by renaming");

  if (a.labels().tau != b.labels().tau)
    throw Error("label-set conflict: tau differs between the systems");
  LabelSet labels = a.labels();
  for (const auto& l : b.labels().visible) labels.visible.insert(l);
  for (const auto& [l, lb] : b.labels().bar) {
    auto it = labels.bar.find(l);
    if (it != labels.bar.end() && it->second != lb)
      throw Error("label-set conflict: bar(" + l + ") disagrees");
    labels.bar.emplace(l, lb);
  }

  std::vector<std::string> states = a.states();
  states.insert(states.end(), b2.states().begin(), b2.states().end());
  auto transitions = a.transitions();
  for (const auto& [key, dists] : b2.transitions()) transitions[key] = dists;

  out.sys = Elts(a.ctx(), a.grade(), std::move(states), std::move(labels), std::move(transitions),
                 false);
  for (const auto& s : a.states()) out.a_map[s] = s;
  out.a_states = a.states();
  for (const auto& s : b.states()) {
    out.b_map[s] = b_rename.at(s);
    out.b_states.push_back(b_rename.at(s));
  }
  std::sort(out.b_states.begin(), out.b_states.end());
  return out;
}

namespace {

struct QuotientDist {
  std::vector<std::pair<int, EffectValue>> entries;  // sorted by block
  std::string key;
};

QuotientDist quotient(const EffectDistribution& d, const std::map<std::string, int>& block_of) {
  std::map<int, EffectValue> acc;
  for (const auto& [id, w] : d.weights()) {
    int block = block_of.at(id);
    auto it = acc.find(block);
    if (it == acc.end()) {
      acc.emplace(block, w);
    } else {
      auto s = pcm_sum(d.ctx(), it->second, w);
      if (!s) throw Error("quotient weight sum undefined");
      it->second = *s;
    }
  }
  QuotientDist out;
  for (auto& [block, w] : acc) {
    out.key += std::to_string(block) + "=" + value_key(w) + "|";
    out.entries.emplace_back(block, std::move(w));
  }
  return out;
}

bool qdist_equal(const EffectAlgebraContext& ctx, const QuotientDist& a, const QuotientDist& b) {
  if (a.entries.size() != b.entries.size()) return false;
  for (std::size_t k = 0; k < a.entries.size(); ++k) {
    if (a.entries[k].first != b.entries[k].first) return false;
    if (!value_equal(ctx, a.entries[k].second, b.entries[k].second)) return false;
  }
  return true;
}

using LabelSig = std::vector<QuotientDist>;

// Set equality up to the context's value equality: sizes match and the
// equality graph has a perfect matching (Kuhn's augmenting paths).
bool sets_equal(const EffectAlgebraContext& ctx, const LabelSig& a, const LabelSig& b) {
  if (a.size() != b.size()) return false;
  std::size_t n = a.size();
  std::vector<std::vector<int>> adj(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (qdist_equal(ctx, a[i], b[j])) adj[i].push_back(static_cast<int>(j));
  std::vector<int> match(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<bool> used(n, false);
    std::function<bool(int)> augment = [&](int u) {
      for (int v : adj[u]) {
        if (used[v]) continue;
        used[v] = true;
        if (match[v] == -1 || augment(match[v])) {
          match[v] = u;
          return true;
        }
      }
      return false;
    };
    if (!augment(static_cast<int>(i))) return false;
  }
  return true;
}

struct Signature {
  std::vector<LabelSig> per_label;  // aligned with the label list
  std::string key;
};

bool sig_equal(const EffectAlgebraContext& ctx, const Signature& a, const Signature& b,
               bool exact) {
  if (exact) return a.key == b.key;
  if (a.per_label.size() != b.per_label.size()) return false;
  for (std::size_t k = 0; k < a.per_label.size(); ++k)
    if (!sets_equal(ctx, a.per_label[k], b.per_label[k])) return false;
  return true;
}

std::vector<std::string> transition_labels(const Elts& sys) {
  std::set<std::string> labels;
  for (const auto& [key, dists] : sys.transitions()) labels.insert(key.second);
  return {labels.begin(), labels.end()};
}

Signature state_signature(const Elts& sys, const std::string& state,
                          const std::vector<std::string>& labels,
                          const std::map<std::string, int>& block_of) {
  Signature sig;
  for (const auto& label : labels) {
    LabelSig ls;
    for (const auto& d : sys.dists(state, label)) {
      QuotientDist q = quotient(d, block_of);
      bool seen = false;
      for (const auto& kept : ls)
        if (qdist_equal(sys.ctx(), kept, q)) {
          seen = true;
          break;
        }
      if (!seen) ls.push_back(std::move(q));
    }
    std::sort(ls.begin(), ls.end(),
              [](const QuotientDist& x, const QuotientDist& y) { return x.key < y.key; });
    sig.key += label + "{";
    for (const auto& q : ls) sig.key += q.key + ";";
    sig.key += "}";
    sig.per_label.push_back(std::move(ls));
  }
  return sig;
}

}  // namespace

Partition kernel_partition(const Elts& sys) {
  const auto& ids = sys.states();
  std::size_t n = ids.size();
  Partition out;
  if (n == 0) return out;

  bool exact = sys.ctx().kind != Kind::quantum;
  std::vector<std::string> labels = transition_labels(sys);

  std::map<std::string, int> block_of;
  for (const auto& id : ids) block_of[id] = 0;
  int nblocks = 1;

  for (std::size_t round = 0; round <= n; ++round) {
    std::vector<Signature> sigs(n);
    for (std::size_t i = 0; i < n; ++i) sigs[i] = state_signature(sys, ids[i], labels, block_of);

    // split every block by signature equality
    std::map<std::string, int> next;
    int next_blocks = 0;
    std::vector<std::vector<std::size_t>> members(nblocks);
    for (std::size_t i = 0; i < n; ++i) members[block_of[ids[i]]].push_back(i);
    for (int b = 0; b < nblocks; ++b) {
      std::vector<std::size_t> reps;
      std::vector<int> rep_block;
      for (std::size_t i : members[b]) {
        int assigned = -1;
        for (std::size_t r = 0; r < reps.size(); ++r)
          if (sig_equal(sys.ctx(), sigs[i], sigs[reps[r]], exact)) {
            assigned = rep_block[r];
            break;
          }
        if (assigned == -1) {
          assigned = next_blocks++;
          reps.push_back(i);
          rep_block.push_back(assigned);
        }
        next[ids[i]] = assigned;
      }
    }
    bool stable = next_blocks == nblocks;
    block_of = std::move(next);
    nblocks = next_blocks;
    if (stable) break;
  }

  // cocongruence soundness: members of a block have equal signatures
  {
    std::vector<std::vector<std::string>> blocks(nblocks);
    for (const auto& id : ids) blocks[block_of[id]].push_back(id);
    for (const auto& block : blocks) {
      Signature ref = state_signature(sys, block[0], labels, block_of);
      for (std::size_t k = 1; k < block.size(); ++k) {
        Signature other = state_signature(sys, block[k], labels, block_of);
        if (!sig_equal(sys.ctx(), ref, other, exact))
          throw Error("internal: final partition is not a cocongruence");
      }
    }
  }

  // canonical order: blocks by least member
  std::vector<std::vector<std::string>> blocks(nblocks);
  for (const auto& id : ids) blocks[block_of[id]].push_back(id);
  std::sort(blocks.begin(), blocks.end());
  out.blocks = std::move(blocks);
  for (std::size_t b = 0; b < out.blocks.size(); ++b)
    for (const auto& id : out.blocks[b]) out.block_of[id] = static_cast<int>(b);
  return out;
}

namespace {

std::string map_query_state(const std::map<std::string, std::string>& side, const std::string& s,
                            const char* which) {
  auto it = side.find(s);
  if (it == side.end())
    throw Error(std::string("state '") + s + "' not found in system " + which);
  return it->second;
}

void fill_numerics(BisimVerdict& v, const Elts& sys, const CouplingOptions& opts) {
  v.tol = sys.ctx().tol;
  v.feas_tol = opts.feas_tol;
}

}  // namespace

BisimVerdict kernel_bisim(const Elts& a, const Elts& b,
                          std::optional<std::pair<std::string, std::string>> query) {
  Combined c = combine(a, b);
  BisimVerdict v;
  v.kind = "kernel";
  fill_numerics(v, c.sys, CouplingOptions{});
  v.partition = kernel_partition(c.sys);
  if (query) {
    std::string x = map_query_state(c.a_map, query->first, "A");
    std::string y = map_query_state(c.b_map, query->second, "B");
    v.pair = {x, y};
    v.related = v.partition.same_block(x, y);
    if (!*v.related) {
      // name one distinguishing label for the diagnostics
      std::vector<std::string> labels = transition_labels(c.sys);
      for (const auto& label : labels) {
        LabelSig lx, ly;
        for (const auto& d : c.sys.dists(x, label)) lx.push_back(quotient(d, v.partition.block_of));
        for (const auto& d : c.sys.dists(y, label)) ly.push_back(quotient(d, v.partition.block_of));
        if (!sets_equal(c.sys.ctx(), lx, ly)) {
          v.diagnostics.push_back("label '" + label +
                                  "': quotiented transition sets differ over the final partition");
          break;
        }
      }
    }
  }
  return v;
}

bool kernel_equiv(const Elts& a, const Elts& b, const std::string& x, const std::string& y) {
  return *kernel_bisim(a, b, std::make_pair(x, y)).related;
}

namespace {

struct AmEngine {
  const Elts& sys;
  const CouplingOptions& opts;
  std::set<std::pair<std::string, std::string>> relation;
  std::map<std::pair<std::string, std::string>, bool> infeasible_cache;  // -> certified
  std::map<std::pair<std::string, std::string>, bool> deletion_certified;
  bool numerical = false;
  double max_residual = 0.0;
  std::vector<std::string> diagnostics;

  AmEngine(const Elts& s, const CouplingOptions& o) : sys(s), opts(o) {}

  bool in_relation(const std::string& x, const std::string& y) const {
    return relation.count({x, y}) > 0;
  }

  // fail_certified, when given, is AND-ed with the exactness of a negative
  // verdict so a refutation built from several candidates keeps its status.
  bool couple_ok(const EffectDistribution& dx, const EffectDistribution& dy,
                 std::vector<std::vector<EffectValue>>* witness = nullptr,
                 bool* fail_certified = nullptr) {
    auto fail = [&](bool certified) {
      if (fail_certified) *fail_certified = *fail_certified && certified;
      return false;
    };
    if (dx.empty() && dy.empty()) return true;
    const auto& ctx = sys.ctx();
    if (dx.empty() != dy.empty()) return fail(true);
    if (ctx.kind == Kind::quantum) {
      if (matrix_distance(dx.total().mat(), dy.total().mat()) > ctx.tol) return fail(true);
    } else if (!value_equal(ctx, dx.total(), dy.total())) {
      return fail(true);
    }
    auto cache_key = std::make_pair(dist_key(dx), dist_key(dy));
    if (!witness) {
      auto hit = infeasible_cache.find(cache_key);
      if (hit != infeasible_cache.end()) return fail(hit->second);
    }

    std::vector<std::string> rows = dx.support(), cols = dy.support();
    std::vector<EffectValue> row_sums, col_sums;
    for (const auto& id : rows) row_sums.push_back(*dx.weight(id));
    for (const auto& id : cols) col_sums.push_back(*dy.weight(id));
    std::vector<std::vector<bool>> support(rows.size(), std::vector<bool>(cols.size(), false));
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = 0; j < cols.size(); ++j) support[i][j] = in_relation(rows[i], cols[j]);

    FeasibilityVerdict verdict = coupling_feasible(ctx, row_sums, col_sums, support, opts);
    if (!verdict.certified) {
      numerical = true;
      max_residual = std::max(max_residual, verdict.residual);
    }
    if (!verdict.feasible) {
      infeasible_cache[cache_key] = verdict.certified;
      return fail(verdict.certified);
    }
    if (witness && verdict.witness) *witness = *verdict.witness;
    return true;
  }

  // Transfer condition for one pair; on failure optionally reports why and
  // whether the refutation was exact.
  bool transfer(const std::string& x, const std::string& y, std::string* why = nullptr,
                std::vector<CouplingRecord>* records = nullptr, bool* certified = nullptr) {
    std::vector<std::string> labels = transition_labels(sys);
    for (const auto& label : labels) {
      const auto& from_x = sys.dists(x, label);
      const auto& from_y = sys.dists(y, label);
      for (std::size_t i = 0; i < from_x.size(); ++i) {
        bool matched = false;
        bool fail_cert = true;
        for (std::size_t j = 0; j < from_y.size() && !matched; ++j) {
          std::vector<std::vector<EffectValue>> cells;
          if (couple_ok(from_x[i], from_y[j], records ? &cells : nullptr, &fail_cert)) {
            matched = true;
            if (records)
              records->push_back({label, static_cast<int>(i), static_cast<int>(j),
                                  from_x[i].support(), from_y[j].support(), std::move(cells)});
          }
        }
        if (!matched) {
          if (why)
            *why = "label '" + label + "': distribution " + std::to_string(i) + " of '" + x +
                   "' has no feasible coupling partner";
          if (certified) *certified = fail_cert;
          return false;
        }
      }
      for (std::size_t j = 0; j < from_y.size(); ++j) {
        bool matched = false;
        bool fail_cert = true;
        for (std::size_t i = 0; i < from_x.size() && !matched; ++i)
          matched = couple_ok(from_x[i], from_y[j], nullptr, &fail_cert);
        if (!matched) {
          if (why)
            *why = "label '" + label + "': distribution " + std::to_string(j) + " of '" + y +
                   "' has no feasible coupling partner";
          if (certified) *certified = fail_cert;
          return false;
        }
      }
    }
    return true;
  }

  void run() {
    bool changed = true;
    while (changed) {
      changed = false;
      std::vector<std::pair<std::string, std::string>> snapshot(relation.begin(), relation.end());
      for (const auto& pair : snapshot) {
        if (!relation.count(pair)) continue;
        std::string why;
        bool certified = true;
        if (!transfer(pair.first, pair.second, &why, nullptr, &certified)) {
          relation.erase(pair);
          deletion_certified[pair] = certified;
          diagnostics.push_back("deleted (" + pair.first + "," + pair.second + "): " + why +
                                (certified ? " [exact]" : " [numerical]"));
          changed = true;
        }
      }
    }
  }
};

}  // namespace

BisimVerdict am_bisim(const Elts& a, const Elts& b,
                      std::optional<std::pair<std::string, std::string>> query,
                      const CouplingOptions& opts) {
  Combined c = combine(a, b);
  BisimVerdict v;
  v.kind = "am";
  fill_numerics(v, c.sys, opts);
  v.partition = kernel_partition(c.sys);

  AmEngine engine(c.sys, opts);
  for (const auto& x : c.a_states)
    for (const auto& y : c.b_states)
      if (v.partition.same_block(x, y)) engine.relation.insert({x, y});
  engine.run();

  v.relation.assign(engine.relation.begin(), engine.relation.end());
  v.numerical = engine.numerical;
  v.max_residual = engine.max_residual;
  v.diagnostics = engine.diagnostics;
  if (query) {
    std::string x = map_query_state(c.a_map, query->first, "A");
    std::string y = map_query_state(c.b_map, query->second, "B");
    v.pair = {x, y};
    v.related = engine.in_relation(x, y);
    if (*v.related) {
      std::vector<CouplingRecord> records;
      engine.transfer(x, y, nullptr, &records);
      v.couplings = std::move(records);
    } else {
      auto it = engine.deletion_certified.find({x, y});
      if (it != engine.deletion_certified.end()) v.refutation_certified = it->second;
    }
  }
  return v;
}

bool am_equiv(const Elts& a, const Elts& b, const std::string& x, const std::string& y,
              const CouplingOptions& opts) {
  return *am_bisim(a, b, std::make_pair(x, y), opts).related;
}

std::vector<Matrix> effect_closure(const Elts& sys) {
  if (sys.ctx().kind != Kind::quantum)
    throw KindMismatchError("effect closure needs a quantum system");
  double tol = sys.ctx().tol;
  std::vector<Matrix> closure;
  auto add = [&](const Matrix& m) {
    if (m.cwiseAbs().maxCoeff() <= tol) return;
    for (const auto& kept : closure)
      if (matrix_equal(kept, m, tol)) return;
    closure.push_back(m);
  };
  std::vector<std::string> seen_dists;
  for (const auto& [key, dists] : sys.transitions())
    for (const auto& d : dists) {
      std::string k = dist_key(d);
      if (std::find(seen_dists.begin(), seen_dists.end(), k) != seen_dists.end()) continue;
      seen_dists.push_back(k);
      std::vector<Matrix> weights;
      for (const auto& [id, w] : d.weights()) weights.push_back(w.mat());
      std::size_t n = weights.size();
      if (n > 16) throw Error("effect closure: support too large to enumerate");
      for (std::size_t mask = 1; mask < (std::size_t(1) << n); ++mask) {
        Matrix sum = Matrix::Zero(weights[0].rows(), weights[0].cols());
        for (std::size_t i = 0; i < n; ++i)
          if (mask & (std::size_t(1) << i)) sum += weights[i];
        add(sum);
      }
    }
  return closure;
}

namespace {

DesideratumReport desiderata_common(const Elts& a, const Elts& b, const std::string& x,
                                    const std::string& y, std::uint64_t seed, Combined& c,
                                    std::string* cx, std::string* cy) {
  if (a.ctx().kind != Kind::quantum)
    throw KindMismatchError("the desiderata checks need quantum systems");
  c = combine(a, b);
  *cx = map_query_state(c.a_map, x, "A");
  *cy = map_query_state(c.b_map, y, "B");

  DesideratumReport report;
  Partition quantum = kernel_partition(c.sys);
  report.quantum_related = quantum.same_block(*cx, *cy);

  std::vector<Matrix> closure = effect_closure(c.sys);
  DistinguishOptions dopts;
  dopts.seed = seed;
  dopts.tol = c.sys.ctx().tol;
  DistinguishResult rho_hat = distinguishing_density(closure, c.sys.grade(), dopts);
  report.rho_hat_seed = seed;
  report.rho_hat_min_gap = rho_hat.min_gap;

  Elts inst = instantiate(c.sys, rho_hat.rho);
  report.rho_hat_related = kernel_partition(inst).same_block(*cx, *cy);
  report.agree = report.quantum_related == report.rho_hat_related;
  report.defect = !report.agree;
  return report;
}

}  // namespace

DesideratumReport check_desiderata1(const Elts& a, const Elts& b, const std::string& x,
                                    const std::string& y, int n_random, std::uint64_t seed) {
  Combined c;
  std::string cx, cy;
  DesideratumReport report = desiderata_common(a, b, x, y, seed, c, &cx, &cy);
  report.kind = "desiderata1";
  Rng rng(seed ^ 0x9e3779b97f4a7c15ull);
  for (int i = 0; i < n_random; ++i) {
    DensityOperator rho = gen::density(rng, c.sys.grade(), c.sys.ctx().tol);
    Elts inst = instantiate(c.sys, rho);
    report.random_related.push_back(kernel_partition(inst).same_block(cx, cy));
  }
  return report;
}

DesideratumReport check_desiderata2(const Elts& a, const Elts& b, const std::string& x,
                                    const std::string& y, std::uint64_t seed) {
  Combined c;
  std::string cx, cy;
  DesideratumReport report = desiderata_common(a, b, x, y, seed, c, &cx, &cy);
  report.kind = "desiderata2";
  return report;
}

}  // namespace elts
