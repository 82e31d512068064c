#include "elts/coupling.hpp"

#include "elts/errors.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

namespace elts {

namespace {

// ---------------------------------------------------------------- probability

// Exact max-flow (Edmonds-Karp) on integers after clearing denominators.
struct FlowNet {
  int n;
  std::vector<std::vector<Integer>> cap;
  explicit FlowNet(int nodes) : n(nodes), cap(nodes, std::vector<Integer>(nodes, 0)) {}

  Integer max_flow(int s, int t) {
    Integer total = 0;
    while (true) {
      std::vector<int> parent(n, -1);
      parent[s] = s;
      std::deque<int> queue{s};
      while (!queue.empty() && parent[t] == -1) {
        int u = queue.front();
        queue.pop_front();
        for (int v = 0; v < n; ++v)
          if (parent[v] == -1 && cap[u][v] > 0) {
            parent[v] = u;
            queue.push_back(v);
          }
      }
      if (parent[t] == -1) return total;
      Integer bottleneck = -1;
      for (int v = t; v != s; v = parent[v]) {
        const Integer& c = cap[parent[v]][v];
        if (bottleneck < 0 || c < bottleneck) bottleneck = c;
      }
      for (int v = t; v != s; v = parent[v]) {
        cap[parent[v]][v] -= bottleneck;
        cap[v][parent[v]] += bottleneck;
      }
      total += bottleneck;
    }
  }
};

FeasibilityVerdict probability_coupling(const std::vector<Rational>& rows,
                                        const std::vector<Rational>& cols,
                                        const std::vector<std::vector<bool>>& support) {
  int nr = static_cast<int>(rows.size()), nc = static_cast<int>(cols.size());
  Integer lcm_den = 1;
  for (const auto& r : rows) lcm_den = boost::multiprecision::lcm(lcm_den, denominator(r));
  for (const auto& c : cols) lcm_den = boost::multiprecision::lcm(lcm_den, denominator(c));
  auto scaled = [&](const Rational& r) {
    return numerator(r) * (lcm_den / denominator(r));
  };

  int source = 0, sink = nr + nc + 1;
  FlowNet net(nr + nc + 2);
  Integer total = 0;
  for (int i = 0; i < nr; ++i) {
    net.cap[source][1 + i] = scaled(rows[i]);
    total += scaled(rows[i]);
  }
  for (int j = 0; j < nc; ++j) net.cap[1 + nr + j][sink] = scaled(cols[j]);
  for (int i = 0; i < nr; ++i)
    for (int j = 0; j < nc; ++j)
      if (support[i][j]) net.cap[1 + i][1 + nr + j] = total;

  Integer flow = net.max_flow(source, sink);
  FeasibilityVerdict verdict;
  verdict.certified = true;
  if (flow != total) {
    verdict.feasible = false;
    verdict.residual = to_double(Rational(total - flow, lcm_den));
    return verdict;
  }
  verdict.feasible = true;
  std::vector<std::vector<EffectValue>> witness;
  for (int i = 0; i < nr; ++i) {
    std::vector<EffectValue> row;
    for (int j = 0; j < nc; ++j) {
      // Residual capacity on the reverse edge records the shipped flow.
      Integer shipped = support[i][j] ? net.cap[1 + nr + j][1 + i] : Integer(0);
      row.push_back(EffectValue::rational(Rational(shipped, lcm_den)));
    }
    witness.push_back(std::move(row));
  }
  verdict.witness = std::move(witness);
  return verdict;
}

// --------------------------------------------------------------------- finite

struct FiniteSearch {
  const EffectAlgebraContext& ctx;
  const FiniteTable& table;
  int nr, nc;
  const std::vector<std::vector<bool>>& support;
  std::vector<EffectValue> row_rem, col_rem;
  std::vector<std::vector<EffectValue>> cells;
  bool found = false;

  FiniteSearch(const EffectAlgebraContext& c, const std::vector<EffectValue>& rows,
               const std::vector<EffectValue>& cols, const std::vector<std::vector<bool>>& sup)
      : ctx(c),
        table(*c.table),
        nr(static_cast<int>(rows.size())),
        nc(static_cast<int>(cols.size())),
        support(sup),
        row_rem(rows),
        col_rem(cols),
        cells(nr, std::vector<EffectValue>(nc, zero_value(c))) {}

  bool run() { return dfs(0, 0); }

  bool dfs(int i, int j) {
    if (i == nr) {
      for (const auto& c : col_rem)
        if (c.name() != table.zero()) return false;
      return true;
    }
    if (j == nc) {
      if (row_rem[i].name() != table.zero()) return false;
      return dfs(i + 1, 0);
    }
    if (!support[i][j]) return dfs(i, j + 1);
    for (const auto& cand : table.carrier()) {
      EffectValue v = EffectValue::finite(cand);
      auto new_row = difference(ctx, v, row_rem[i]);
      if (!new_row) continue;
      auto new_col = difference(ctx, v, col_rem[j]);
      if (!new_col) continue;
      EffectValue saved_row = row_rem[i], saved_col = col_rem[j];
      row_rem[i] = *new_row;
      col_rem[j] = *new_col;
      cells[i][j] = v;
      if (dfs(i, j + 1)) return true;
      row_rem[i] = saved_row;
      col_rem[j] = saved_col;
      cells[i][j] = zero_value(ctx);
    }
    return false;
  }
};

FeasibilityVerdict finite_coupling(const EffectAlgebraContext& ctx,
                                   const std::vector<EffectValue>& rows,
                                   const std::vector<EffectValue>& cols,
                                   const std::vector<std::vector<bool>>& support) {
  FiniteSearch search(ctx, rows, cols, support);
  FeasibilityVerdict verdict;
  verdict.certified = true;
  if (search.run()) {
    verdict.feasible = true;
    verdict.witness = std::move(search.cells);
  } else {
    verdict.feasible = false;
    verdict.residual = 1.0;
  }
  return verdict;
}

// -------------------------------------------------------------------- quantum

struct Cell {
  int row, col;
};

// Union-find over rows (0..nr-1) and columns (nr..nr+nc-1).
struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

// Scalar transportation feasibility (doubles) via Edmonds-Karp.
struct ScalarFlow {
  int n;
  std::vector<std::vector<double>> cap;
  explicit ScalarFlow(int nodes) : n(nodes), cap(nodes, std::vector<double>(nodes, 0.0)) {}

  double max_flow(int s, int t) {
    const double eps = 1e-12;
    double total = 0.0;
    while (true) {
      std::vector<int> parent(n, -1);
      parent[s] = s;
      std::deque<int> queue{s};
      while (!queue.empty() && parent[t] == -1) {
        int u = queue.front();
        queue.pop_front();
        for (int v = 0; v < n; ++v)
          if (parent[v] == -1 && cap[u][v] > eps) {
            parent[v] = u;
            queue.push_back(v);
          }
      }
      if (parent[t] == -1) return total;
      double bottleneck = std::numeric_limits<double>::infinity();
      for (int v = t; v != s; v = parent[v]) bottleneck = std::min(bottleneck, cap[parent[v]][v]);
      for (int v = t; v != s; v = parent[v]) {
        cap[parent[v]][v] -= bottleneck;
        cap[v][parent[v]] += bottleneck;
      }
      total += bottleneck;
    }
  }
};

FeasibilityVerdict quantum_coupling(const EffectAlgebraContext& ctx,
                                    const std::vector<EffectValue>& rows,
                                    const std::vector<EffectValue>& cols,
                                    const std::vector<std::vector<bool>>& support,
                                    const CouplingOptions& opts) {
  int nr = static_cast<int>(rows.size()), nc = static_cast<int>(cols.size());
  long dim = nr > 0 ? rows[0].mat().rows() : (nc > 0 ? cols[0].mat().rows() : 1);
  double tol = ctx.tol;

  auto zero_witness = [&] {
    return std::vector<std::vector<EffectValue>>(
        nr, std::vector<EffectValue>(nc, EffectValue::matrix(Matrix::Zero(dim, dim))));
  };

  std::vector<bool> row_zero(nr), col_zero(nc);
  for (int i = 0; i < nr; ++i) row_zero[i] = rows[i].mat().cwiseAbs().maxCoeff() <= tol;
  for (int j = 0; j < nc; ++j) col_zero[j] = cols[j].mat().cwiseAbs().maxCoeff() <= tol;

  // Cells in zero rows/columns are forced to zero.
  std::vector<Cell> active;
  for (int i = 0; i < nr; ++i)
    for (int j = 0; j < nc; ++j)
      if (support[i][j] && !row_zero[i] && !col_zero[j]) active.push_back({i, j});

  FeasibilityVerdict verdict;

  // Per-component totals must match; this is exact reasoning, so an
  // imbalance is a certified infeasibility.
  {
    UnionFind uf(nr + nc);
    for (const auto& cell : active) uf.unite(cell.row, nr + cell.col);
    std::map<int, Matrix> imbalance;
    auto add = [&](int node, const Matrix& m, double sign) {
      int root = uf.find(node);
      auto it = imbalance.find(root);
      if (it == imbalance.end()) it = imbalance.emplace(root, Matrix::Zero(dim, dim)).first;
      it->second += sign * m;
    };
    for (int i = 0; i < nr; ++i)
      if (!row_zero[i]) add(i, rows[i].mat(), 1.0);
    for (int j = 0; j < nc; ++j)
      if (!col_zero[j]) add(nr + j, cols[j].mat(), -1.0);
    double worst = 0.0;
    for (const auto& [root, m] : imbalance) worst = std::max(worst, m.cwiseAbs().maxCoeff());
    if (worst > tol) {
      verdict.feasible = false;
      verdict.certified = true;
      verdict.residual = worst;
      return verdict;
    }
  }

  if (active.empty()) {
    verdict.feasible = true;
    verdict.certified = true;
    verdict.witness = zero_witness();
    return verdict;
  }

  // Rank-1 reduction: when every nonzero marginal is (numerically) rank-1,
  // each nonzero cell must be a scalar multiple of both its row and column
  // sum, so mass moves only between marginals with equal projectors and the
  // instance collapses to scalar transportation per projector group.
  if (opts.rank1_shortcut) {
    const double group_tol = std::max(1e-7, 10 * tol);
    bool all_rank1 = true;
    std::vector<Matrix> proj(nr + nc);
    std::vector<double> weight(nr + nc, 0.0);
    auto classify = [&](const Matrix& m, int slot) {
      Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitize(m));
      Eigen::VectorXd eig = solver.eigenvalues();
      long d = eig.size();
      if (d >= 2 && eig(d - 2) > group_tol) return false;  // rank >= 2
      weight[slot] = eig(d - 1);
      Eigen::VectorXcd u = solver.eigenvectors().col(d - 1);
      proj[slot] = u * u.adjoint();
      return true;
    };
    for (int i = 0; i < nr && all_rank1; ++i)
      if (!row_zero[i]) all_rank1 = classify(rows[i].mat(), i);
    for (int j = 0; j < nc && all_rank1; ++j)
      if (!col_zero[j]) all_rank1 = classify(cols[j].mat(), nr + j);

    if (all_rank1) {
      // Group marginals by projector.
      std::vector<int> group(nr + nc, -1);
      std::vector<Matrix> reps;
      auto assign = [&](int slot) {
        for (std::size_t g = 0; g < reps.size(); ++g)
          if (matrix_equal(proj[slot], reps[g], group_tol)) {
            group[slot] = static_cast<int>(g);
            return;
          }
        reps.push_back(proj[slot]);
        group[slot] = static_cast<int>(reps.size()) - 1;
      };
      for (int i = 0; i < nr; ++i)
        if (!row_zero[i]) assign(i);
      for (int j = 0; j < nc; ++j)
        if (!col_zero[j]) assign(nr + j);

      verdict.certified = true;
      // A nonzero row whose projector matches no column projector (or the
      // other way around) can never be paid out.
      double residual = 0.0;
      std::vector<std::vector<double>> cell_flow(nr, std::vector<double>(nc, 0.0));
      bool feasible = true;
      for (std::size_t g = 0; g < reps.size() && feasible; ++g) {
        std::vector<int> grows, gcols;
        for (int i = 0; i < nr; ++i)
          if (!row_zero[i] && group[i] == static_cast<int>(g)) grows.push_back(i);
        for (int j = 0; j < nc; ++j)
          if (!col_zero[j] && group[nr + j] == static_cast<int>(g)) gcols.push_back(j);
        double supply = 0.0, demand = 0.0;
        for (int i : grows) supply += weight[i];
        for (int j : gcols) demand += weight[nr + j];
        if (std::abs(supply - demand) > group_tol) {
          feasible = false;
          residual = std::abs(supply - demand);
          break;
        }
        int n = static_cast<int>(grows.size() + gcols.size()) + 2;
        ScalarFlow net(n);
        int source = 0, sink = n - 1;
        for (std::size_t a = 0; a < grows.size(); ++a) net.cap[source][1 + a] = weight[grows[a]];
        for (std::size_t b = 0; b < gcols.size(); ++b)
          net.cap[1 + grows.size() + b][sink] = weight[nr + gcols[b]];
        for (std::size_t a = 0; a < grows.size(); ++a)
          for (std::size_t b = 0; b < gcols.size(); ++b)
            if (support[grows[a]][gcols[b]])
              net.cap[1 + a][1 + grows.size() + b] = supply;
        double flow = net.max_flow(source, sink);
        if (flow < supply - group_tol * std::max<std::size_t>(1, grows.size())) {
          feasible = false;
          residual = supply - flow;
          break;
        }
        for (std::size_t a = 0; a < grows.size(); ++a)
          for (std::size_t b = 0; b < gcols.size(); ++b)
            if (support[grows[a]][gcols[b]])
              cell_flow[grows[a]][gcols[b]] = net.cap[1 + grows.size() + b][1 + a];
      }
      verdict.feasible = feasible;
      verdict.residual = feasible ? 0.0 : residual;
      if (feasible) {
        auto witness = zero_witness();
        for (int i = 0; i < nr; ++i)
          for (int j = 0; j < nc; ++j)
            if (cell_flow[i][j] > 0.0)
              witness[i][j] = EffectValue::matrix(cell_flow[i][j] * proj[i]);
        verdict.witness = std::move(witness);
      }
      return verdict;
    }
  }

  // Dykstra alternating projections between the affine subspace of matrices
  // with the prescribed row/column sums and the product of PSD cones.
  int ncells = static_cast<int>(active.size());
  int ncons = nr + nc;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(ncons, ncells);
  for (int k = 0; k < ncells; ++k) {
    a(active[k].row, k) = 1.0;
    a(nr + active[k].col, k) = 1.0;
  }
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);

  std::vector<Matrix> x(ncells, Matrix::Zero(dim, dim));
  std::vector<Matrix> corr(ncells, Matrix::Zero(dim, dim));

  auto target = [&](int cons) -> const Matrix& {
    return cons < nr ? rows[cons].mat() : cols[cons - nr].mat();
  };

  auto project_affine = [&](std::vector<Matrix>& cells) {
    for (long p = 0; p < dim; ++p)
      for (long q = 0; q < dim; ++q) {
        Eigen::VectorXd res_re(ncons), res_im(ncons);
        for (int cons = 0; cons < ncons; ++cons) {
          Complex sum = 0.0;
          for (int k = 0; k < ncells; ++k)
            if (a(cons, k) != 0.0) sum += cells[k](p, q);
          Complex r = sum - target(cons)(p, q);
          res_re(cons) = r.real();
          res_im(cons) = r.imag();
        }
        Eigen::VectorXd dx_re = cod.solve(res_re);
        Eigen::VectorXd dx_im = cod.solve(res_im);
        for (int k = 0; k < ncells; ++k) cells[k](p, q) -= Complex(dx_re(k), dx_im(k));
      }
  };

  auto constraint_residual = [&](const std::vector<Matrix>& cells) {
    double worst = 0.0;
    for (int cons = 0; cons < ncons; ++cons) {
      Matrix sum = Matrix::Zero(dim, dim);
      for (int k = 0; k < ncells; ++k)
        if (a(cons, k) != 0.0) sum += cells[k];
      worst = std::max(worst, (sum - target(cons)).cwiseAbs().maxCoeff());
    }
    return worst;
  };

  verdict.certified = false;
  for (int iter = 1; iter <= opts.max_iters; ++iter) {
    std::vector<Matrix> y = x;
    project_affine(y);
    for (int k = 0; k < ncells; ++k) {
      Matrix z = y[k] + corr[k];
      x[k] = psd_project(z);
      corr[k] = z - x[k];
    }
    double residual = constraint_residual(x);
    verdict.iterations = iter;
    verdict.residual = residual;
    if (residual < opts.feas_tol) {
      verdict.feasible = true;
      auto witness = zero_witness();
      for (int k = 0; k < ncells; ++k)
        witness[active[k].row][active[k].col] = EffectValue::matrix(x[k]);
      verdict.witness = std::move(witness);
      return verdict;
    }
  }
  verdict.feasible = false;
  return verdict;
}

}  // namespace

FeasibilityVerdict coupling_feasible(const EffectAlgebraContext& ctx,
                                     const std::vector<EffectValue>& row_sums,
                                     const std::vector<EffectValue>& col_sums,
                                     const std::vector<std::vector<bool>>& support,
                                     const CouplingOptions& opts) {
  if (support.size() != row_sums.size())
    throw Error("coupling: support has " + std::to_string(support.size()) + " rows, expected " +
                std::to_string(row_sums.size()));
  for (const auto& row : support)
    if (row.size() != col_sums.size()) throw Error("coupling: support shape mismatch");

  long dim = 1;
  if (ctx.kind == Kind::quantum) {
    if (!row_sums.empty()) dim = row_sums[0].mat().rows();
    else if (!col_sums.empty()) dim = col_sums[0].mat().rows();
    for (const auto& v : row_sums) check_value(ctx, v, dim);
    for (const auto& v : col_sums) check_value(ctx, v, dim);
  } else {
    for (const auto& v : row_sums) check_value(ctx, v);
    for (const auto& v : col_sums) check_value(ctx, v);
  }

  // Row and column totals must agree (as n-ary sums in the algebra).
  auto row_total = nary_sum(ctx, row_sums, dim);
  auto col_total = nary_sum(ctx, col_sums, dim);
  if (!row_total || !col_total) throw Error("coupling: marginal totals exceed one");
  if (ctx.kind == Kind::quantum) {
    if (matrix_distance(row_total->mat(), col_total->mat()) > ctx.tol)
      throw Error("coupling: row/column totals differ beyond tolerance");
  } else if (!value_equal(ctx, *row_total, *col_total)) {
    throw Error("coupling: row/column totals differ");
  }

  switch (ctx.kind) {
    case Kind::probability: {
      std::vector<Rational> rows, cols;
      for (const auto& v : row_sums) rows.push_back(v.rat());
      for (const auto& v : col_sums) cols.push_back(v.rat());
      return probability_coupling(rows, cols, support);
    }
    case Kind::finite:
      return finite_coupling(ctx, row_sums, col_sums, support);
    case Kind::quantum:
      return quantum_coupling(ctx, row_sums, col_sums, support, opts);
  }
  throw Error("unreachable");
}

FeasibilityVerdict is_decomposable_instance(const EffectAlgebraContext& ctx, const EffectValue& a,
                                            const EffectValue& b, const EffectValue& c,
                                            const EffectValue& d, const CouplingOptions& opts) {
  auto ab = pcm_sum(ctx, a, b);
  auto cd = pcm_sum(ctx, c, d);
  if (!ab || !cd || !value_equal(ctx, *ab, *cd))
    throw Error("invalid decomposability instance: need a+b and c+d defined and equal");
  return coupling_feasible(ctx, {a, b}, {c, d}, {{true, true}, {true, true}}, opts);
}

bool table_decomposable(const EffectAlgebraContext& ctx, const CouplingOptions& opts) {
  if (ctx.kind != Kind::finite) throw KindMismatchError("table_decomposable needs a finite table");
  const auto& carrier = ctx.table->carrier();
  for (const auto& a : carrier)
    for (const auto& b : carrier) {
      auto ab = ctx.table->sum(a, b);
      if (!ab) continue;
      for (const auto& c : carrier)
        for (const auto& d : carrier) {
          auto cd = ctx.table->sum(c, d);
          if (!cd || *ab != *cd) continue;
          auto verdict = is_decomposable_instance(ctx, EffectValue::finite(a),
                                                  EffectValue::finite(b), EffectValue::finite(c),
                                                  EffectValue::finite(d), opts);
          if (!verdict.feasible) return false;
        }
    }
  return true;
}

}  // namespace elts
