#pragma once

// Brute-force reference implementations used by the tests. They work on dense
// matrices and exhaustive enumeration and share no code with the library.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include "convabuse/graph.hpp"
#include "convabuse/matrix.hpp"

namespace oracle {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// w(i, j) = weight of i -> j (symmetric for undirected graphs).
struct Dense {
  int n = 0;
  bool directed = true;
  Eigen::MatrixXd w;

  bool arc(int i, int j) const { return w(i, j) != 0.0; }
};

inline Dense dense(const convabuse::graph::Graph& g) {
  Dense d;
  d.n = static_cast<int>(g.vertex_count());
  d.directed = g.directed();
  d.w = Eigen::MatrixXd::Zero(d.n, d.n);
  for (const auto& e : g.edges()) {
    d.w(e.src, e.dst) = e.weight;
    if (!g.directed()) d.w(e.dst, e.src) = e.weight;
  }
  return d;
}

enum class Dir { kIn, kOut, kAll };

/// Degree counted inside the vertex subset `alive`.
inline int sub_degree(const Dense& d, int v, Dir dir, const std::vector<bool>& alive) {
  int in = 0;
  int out = 0;
  for (int u = 0; u < d.n; ++u) {
    if (!alive[u] || u == v) continue;
    if (d.arc(v, u)) ++out;
    if (d.arc(u, v)) ++in;
  }
  if (!d.directed) return out;
  return dir == Dir::kIn ? in : dir == Dir::kOut ? out : in + out;
}

inline std::vector<double> degree(const Dense& d, Dir dir) {
  std::vector<bool> all(d.n, true);
  std::vector<double> out(d.n);
  for (int v = 0; v < d.n; ++v) out[v] = sub_degree(d, v, dir, all);
  return out;
}

inline std::vector<double> strength(const Dense& d, Dir dir) {
  std::vector<double> out(d.n, 0.0);
  for (int v = 0; v < d.n; ++v) {
    const double o = d.w.row(v).sum();
    const double i = d.w.col(v).sum();
    if (!d.directed) {
      out[v] = o;
    } else {
      out[v] = dir == Dir::kIn ? i : dir == Dir::kOut ? o : i + o;
    }
  }
  return out;
}

/// Coreness by definition: the k-core is what survives repeated removal of
/// vertices with degree < k; coreness(v) is the largest k whose core holds v.
inline std::vector<int> coreness(const Dense& d, Dir dir) {
  std::vector<int> core(d.n, 0);
  for (int k = 1; k <= 2 * d.n; ++k) {
    std::vector<bool> alive(d.n, true);
    for (bool changed = true; changed;) {
      changed = false;
      for (int v = 0; v < d.n; ++v) {
        if (alive[v] && sub_degree(d, v, dir, alive) < k) {
          alive[v] = false;
          changed = true;
        }
      }
    }
    for (int v = 0; v < d.n; ++v) {
      if (alive[v]) core[v] = k;
    }
  }
  return core;
}

/// Every simple path from s (as a vertex list) following arcs forward, or
/// backward when `reverse` is set. Edge length is 1/w.
inline void simple_paths(const Dense& d, int s, bool reverse,
                         const std::function<void(const std::vector<int>&, double)>& visit) {
  std::vector<int> path{s};
  std::vector<bool> on(d.n, false);
  on[s] = true;
  std::function<void(double)> rec = [&](double len) {
    visit(path, len);
    const int v = path.back();
    for (int u = 0; u < d.n; ++u) {
      const double w = reverse ? d.w(u, v) : d.w(v, u);
      if (w == 0.0 || on[u]) continue;
      on[u] = true;
      path.push_back(u);
      rec(len + 1.0 / w);
      path.pop_back();
      on[u] = false;
    }
  };
  rec(0.0);
}

/// All-pairs distances by path enumeration (kInf when unreachable).
inline Eigen::MatrixXd distances(const Dense& d, bool reverse) {
  Eigen::MatrixXd dist = Eigen::MatrixXd::Constant(d.n, d.n, kInf);
  for (int s = 0; s < d.n; ++s) {
    simple_paths(d, s, reverse, [&](const std::vector<int>& p, double len) {
      dist(s, p.back()) = std::min(dist(s, p.back()), len);
    });
  }
  return dist;
}

struct Distances {
  std::vector<double> closeness;
  std::vector<double> eccentricity;
  double diameter = 0.0;
  double radius = 0.0;
  double average_path_length = 0.0;
};

inline Distances distance_summary(const Dense& d, bool reverse) {
  const auto dist = distances(d, reverse && d.directed);
  Distances r;
  r.closeness.assign(d.n, 0.0);
  r.eccentricity.assign(d.n, 0.0);
  std::vector<double> ecc_nontrivial;
  double total = 0.0;
  int pairs = 0;
  for (int v = 0; v < d.n; ++v) {
    int reach = 1;
    double sum = 0.0;
    double ecc = 0.0;
    for (int u = 0; u < d.n; ++u) {
      if (u == v || dist(v, u) == kInf) continue;
      ++reach;
      sum += dist(v, u);
      ecc = std::max(ecc, dist(v, u));
    }
    if (reach > 1) {
      r.closeness[v] = (reach - 1) / sum;
      r.eccentricity[v] = ecc;
      ecc_nontrivial.push_back(ecc);
      total += sum;
      pairs += reach - 1;
    }
  }
  if (!ecc_nontrivial.empty()) {
    r.diameter = *std::max_element(ecc_nontrivial.begin(), ecc_nontrivial.end());
    r.radius = *std::min_element(ecc_nontrivial.begin(), ecc_nontrivial.end());
  }
  if (pairs > 0) r.average_path_length = total / pairs;
  return r;
}

/// Betweenness by enumerating every shortest path of every pair.
inline std::vector<double> betweenness(const Dense& d) {
  const auto dist = distances(d, false);
  std::vector<double> bc(d.n, 0.0);
  for (int s = 0; s < d.n; ++s) {
    std::vector<std::vector<std::vector<int>>> shortest(d.n);
    simple_paths(d, s, false, [&](const std::vector<int>& p, double len) {
      const int t = p.back();
      if (t == s) return;
      if (std::abs(len - dist(s, t)) <= 1e-9 * std::max(1.0, dist(s, t))) shortest[t].push_back(p);
    });
    for (int t = 0; t < d.n; ++t) {
      const double sigma = static_cast<double>(shortest[t].size());
      if (sigma == 0.0) continue;
      for (const auto& p : shortest[t]) {
        for (std::size_t i = 1; i + 1 < p.size(); ++i) bc[p[i]] += 1.0 / sigma;
      }
    }
  }
  if (!d.directed) {
    for (auto& b : bc) b /= 2.0;
  }
  return bc;
}

/// Stationary distribution from a direct linear solve of
/// (I - d M^T) x = (1 - d)/n, where dangling rows of M are uniform.
inline std::vector<double> pagerank(const Dense& d, double damping) {
  const int n = d.n;
  if (n == 0) return {};
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    const double out = d.w.row(i).sum();
    for (int j = 0; j < n; ++j) m(i, j) = out > 0 ? d.w(i, j) / out : 1.0 / n;
  }
  const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) - damping * m.transpose();
  const Eigen::VectorXd rhs = Eigen::VectorXd::Constant(n, (1.0 - damping) / n);
  Eigen::VectorXd x = a.fullPivLu().solve(rhs);
  x /= x.sum();
  return {x.data(), x.data() + n};
}

/// Dominant eigenvector of A^T A (authorities) by symmetric eigendecomposition.
/// A repeated top eigenvalue is resolved the way power iteration from the
/// uniform vector resolves it: the start vector projected on the eigenspace.
inline void hits(const Dense& d, std::vector<double>& hubs, std::vector<double>& auth) {
  const int n = d.n;
  hubs.assign(n, 0.0);
  auth.assign(n, 0.0);
  if (d.w.isZero(0.0)) return;
  const Eigen::MatrixXd ata = d.w.transpose() * d.w;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ata);
  const double top = es.eigenvalues()(n - 1);
  const Eigen::VectorXd start = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
  Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
  for (int k = 0; k < n; ++k) {
    if (es.eigenvalues()(k) >= top * (1.0 - 1e-9)) {
      const Eigen::VectorXd v = es.eigenvectors().col(k);
      a += v.dot(start) * v;
    }
  }
  a.normalize();
  Eigen::VectorXd h = d.w * a;
  h.normalize();
  hubs.assign(h.data(), h.data() + n);
  auth.assign(a.data(), a.data() + n);
}

/// Second largest over largest eigenvalue of A^T A: the power-iteration
/// contraction rate.
inline double hits_gap_ratio(const Dense& d) {
  if (d.n < 2 || d.w.isZero(0.0)) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(d.w.transpose() * d.w);
  const auto& ev = es.eigenvalues();
  const double top = ev(d.n - 1);
  for (int k = d.n - 2; k >= 0; --k) {
    if (ev(k) < top * (1.0 - 1e-9)) return ev(k) / top;
  }
  return 0.0;
}

inline double reciprocity(const Dense& d) {
  int m = 0;
  int mutual = 0;
  for (int i = 0; i < d.n; ++i) {
    for (int j = 0; j < d.n; ++j) {
      if (i == j || !d.arc(i, j)) continue;
      ++m;
      if (d.arc(j, i)) ++mutual;
    }
  }
  return m == 0 ? 0.0 : static_cast<double>(mutual) / m;
}

inline double density(const Dense& d) {
  if (d.n <= 1) return 0.0;
  int arcs = 0;
  for (int i = 0; i < d.n; ++i) {
    for (int j = 0; j < d.n; ++j) arcs += d.arc(i, j) ? 1 : 0;
  }
  return static_cast<double>(arcs) / (d.n * (d.n - 1.0));  // arcs counts both ends when undirected
}

struct Clustering {
  std::vector<double> local;
  double transitivity = 0.0;
};

/// Triangle enumeration over an undirected dense graph.
inline Clustering clustering(const Dense& d, bool weighted) {
  Clustering c;
  c.local.assign(d.n, 0.0);
  const double wmax = d.w.maxCoeff();
  double closed = 0.0;
  double triples = 0.0;
  for (int v = 0; v < d.n; ++v) {
    std::vector<int> nb;
    for (int u = 0; u < d.n; ++u) {
      if (u != v && d.arc(v, u)) nb.push_back(u);
    }
    const double k = static_cast<double>(nb.size());
    if (nb.size() < 2) continue;
    double tri = 0.0;
    double intensity = 0.0;
    for (std::size_t a = 0; a < nb.size(); ++a) {
      for (std::size_t b = a + 1; b < nb.size(); ++b) {
        if (!d.arc(nb[a], nb[b])) continue;
        tri += 1.0;
        intensity += std::pow(d.w(v, nb[a]) / wmax * d.w(v, nb[b]) / wmax * d.w(nb[a], nb[b]) / wmax, 1.0 / 3.0);
      }
    }
    c.local[v] = (weighted ? intensity : tri) / (k * (k - 1) / 2);
    closed += tri;
    triples += k * (k - 1) / 2;
  }
  if (triples > 0) c.transitivity = closed / triples;
  return c;
}

/// Q = 1/2m sum_ij (A_ij - k_i k_j / 2m) [c_i == c_j] on an undirected graph.
inline double modularity(const Dense& d, const std::vector<int>& community) {
  const double m2 = d.w.sum();
  if (m2 == 0.0) return 0.0;
  const Eigen::VectorXd k = d.w.rowwise().sum();
  double q = 0.0;
  for (int i = 0; i < d.n; ++i) {
    for (int j = 0; j < d.n; ++j) {
      if (community[i] == community[j]) q += d.w(i, j) - k(i) * k(j) / m2;
    }
  }
  return q / m2;
}

struct Components {
  double count = 0.0;
  double largest_fraction = 0.0;
  double assortativity = 0.0;
};

/// Union-find components; assortativity as the Pearson correlation of
/// endpoint degrees over both orientations of every edge.
inline Components components(const Dense& d) {
  Components c;
  if (d.n == 0) return c;
  std::vector<int> parent(d.n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  for (int i = 0; i < d.n; ++i) {
    for (int j = 0; j < d.n; ++j) {
      if (d.arc(i, j)) parent[find(i)] = find(j);
    }
  }
  std::vector<int> size(d.n, 0);
  for (int i = 0; i < d.n; ++i) ++size[find(i)];
  for (int s : size) c.count += s > 0 ? 1.0 : 0.0;
  c.largest_fraction = static_cast<double>(*std::max_element(size.begin(), size.end())) / d.n;

  const auto deg = degree(d, Dir::kAll);
  std::vector<double> xs;
  std::vector<double> ys;
  for (int i = 0; i < d.n; ++i) {
    for (int j = 0; j < d.n; ++j) {
      if (i != j && d.arc(i, j)) {
        xs.push_back(deg[i]);
        ys.push_back(deg[j]);
      }
    }
  }
  if (xs.empty()) return c;
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx > 1e-12 && syy > 1e-12) c.assortativity = sxy / std::sqrt(sxx * syy);
  return c;
}

// ---------------------------------------------------------------------------
// Soft-margin linear SVM by active-set enumeration.

/// Primal objective 1/2 |w|^2 + C sum hinge with the bias chosen optimally
/// (the hinge sum is piecewise linear in b, so a kink is optimal).
inline double primal_best_bias(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& w,
                               double C, double* b_out = nullptr) {
  const Eigen::VectorXd f = x * w;
  double best = kInf;
  for (int k = 0; k < x.rows(); ++k) {
    const double b = y(k) - f(k);
    double hinge = 0.0;
    for (int i = 0; i < x.rows(); ++i) hinge += std::max(0.0, 1.0 - y(i) * (f(i) + b));
    const double p = 0.5 * w.squaredNorm() + C * hinge;
    if (p < best) {
      best = p;
      if (b_out) *b_out = b;
    }
  }
  return best;
}

/// Exact optimum of the primal. Every assignment of the points to
/// {alpha = 0, alpha = C, free} is tried; free alphas and the bias solve the
/// margin equations. Each candidate w is a feasible primal point, and the
/// optimal assignment reproduces the optimum, so the minimum is exact.
inline double svm_optimum(const convabuse::Matrix& xm, const std::vector<int>& yv, double C) {
  const int n = static_cast<int>(xm.rows());
  const int d = static_cast<int>(xm.cols());
  Eigen::MatrixXd x(n, d);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) x(i, j) = xm(i, j);
    y(i) = yv[i];
  }
  const Eigen::MatrixXd k = x * x.transpose();
  double best = primal_best_bias(x, y, Eigen::VectorXd::Zero(d), C);
  int combos = 1;
  for (int i = 0; i < n; ++i) combos *= 3;
  for (int code = 0; code < combos; ++code) {
    std::vector<int> state(n);
    for (int i = 0, c = code; i < n; ++i, c /= 3) state[i] = c % 3;  // 0: zero, 1: C, 2: free
    std::vector<int> free;
    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) {
      if (state[i] == 1) alpha(i) = C;
      if (state[i] == 2) free.push_back(i);
    }
    const int f = static_cast<int>(free.size());
    if (f > 0) {
      // rows: y_i (sum_j alpha_j y_j K_ij + b) = 1 for free i; sum alpha y = 0
      Eigen::MatrixXd a = Eigen::MatrixXd::Zero(f + 1, f + 1);
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(f + 1);
      for (int r = 0; r < f; ++r) {
        const int i = free[r];
        double fixed = 0.0;
        for (int j = 0; j < n; ++j) {
          if (state[j] == 1) fixed += C * y(j) * k(i, j);
        }
        for (int c = 0; c < f; ++c) a(r, c) = y(free[c]) * k(i, free[c]);
        a(r, f) = 1.0;
        rhs(r) = y(i) - fixed;
      }
      double fixed_sum = 0.0;
      for (int j = 0; j < n; ++j) {
        if (state[j] == 1) fixed_sum += C * y(j);
      }
      for (int c = 0; c < f; ++c) a(f, c) = y(free[c]);
      rhs(f) = -fixed_sum;
      const Eigen::VectorXd sol = a.completeOrthogonalDecomposition().solve(rhs);
      if ((a * sol - rhs).norm() > 1e-9) continue;
      bool inside = true;
      for (int c = 0; c < f; ++c) {
        if (sol(c) < -1e-12 || sol(c) > C + 1e-12) inside = false;
        alpha(free[c]) = std::clamp(sol(c), 0.0, C);
      }
      if (!inside) continue;
    }
    const Eigen::VectorXd w = x.transpose() * alpha.cwiseProduct(y);
    best = std::min(best, primal_best_bias(x, y, w, C));
  }
  return best;
}

}  // namespace oracle
