#ifndef DILATRON_GRAPHSYS_HPP
#define DILATRON_GRAPHSYS_HPP

// (G, Q, L/M/R)-commuting systems on trees and their inductive dilation:
// peel a leaf, dilate the rest, then attach the leaf back with a fresh
// isometric lift while the previously built lifts extend by (+) I on the
// enlarged space. Every edge relation and every vertex lift is certified.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dilatron/liftops.hpp"

namespace dilatron {

class HasCycle : public std::runtime_error {
 public:
  HasCycle(const std::string& what, std::vector<int> witness_cycle)
      : std::runtime_error(what), cycle(std::move(witness_cycle)) {}
  std::vector<int> cycle;
};

class Disconnected : public std::runtime_error {
 public:
  Disconnected(const std::string& what, std::vector<std::vector<int>> comps)
      : std::runtime_error(what), components(std::move(comps)) {}
  std::vector<std::vector<int>> components;
};

// Simple graph on vertices 1..n with Q matrices on the ordered edge set
// { (i, j) : {i, j} in E, i < j }.
struct QGraph {
  int vertex_count = 0;
  std::set<std::pair<int, int>> edges;  // stored with i < j
  std::map<std::pair<int, int>, CMat> qmap;

  void add_edge(int i, int j, const CMat& q) {
    if (i == j) throw HypothesisViolated("QGraph: loops are not allowed");
    if (i < 1 || j < 1 || i > vertex_count || j > vertex_count)
      throw DimensionMismatch("QGraph: vertex index out of range");
    auto key = std::minmax(i, j);
    if (!edges.insert(key).second)
      throw HypothesisViolated("QGraph: duplicate edge");
    qmap[key] = q;
  }

  std::vector<int> neighbors(int v) const {
    std::vector<int> out;
    for (const auto& e : edges) {
      if (e.first == v) out.push_back(e.second);
      if (e.second == v) out.push_back(e.first);
    }
    return out;
  }
};

struct GraphSystem {
  QGraph graph;
  std::vector<CMat> contractions;  // contractions[v-1] acts on H
  QPosition position = QPosition::Left;
};

// Leaf elimination by layers: all current degree-1 vertices are removed in
// increasing index order before degrees are recomputed. Returns the
// elimination order with the root vertex last.
inline std::vector<int> validate_tree(const QGraph& g) {
  const int n = g.vertex_count;
  if (n <= 0) throw DimensionMismatch("validate_tree: empty graph");

  // connectivity
  std::vector<std::vector<int>> adj(n + 1);
  for (const auto& e : g.edges) {
    adj[e.first].push_back(e.second);
    adj[e.second].push_back(e.first);
  }
  {
    std::vector<int> seen(n + 1, 0);
    std::vector<int> stack{1};
    seen[1] = 1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int w : adj[v])
        if (!seen[w]) {
          seen[w] = 1;
          stack.push_back(w);
        }
    }
    std::vector<std::vector<int>> comps;
    std::vector<int> rest;
    for (int v = 1; v <= n; ++v)
      if (!seen[v]) rest.push_back(v);
    if (!rest.empty()) {
      std::vector<int> first;
      for (int v = 1; v <= n; ++v)
        if (seen[v]) first.push_back(v);
      comps.push_back(first);
      comps.push_back(rest);
      throw Disconnected("validate_tree: graph is not connected", comps);
    }
  }
  if (static_cast<int>(g.edges.size()) != n - 1) {
    // connected with >= n edges: a cycle exists; walk one out via DFS
    std::vector<int> parent(n + 1, 0), state(n + 1, 0);
    std::vector<int> cyc;
    std::function<bool(int, int)> dfs = [&](int v, int from) {
      state[v] = 1;
      for (int w : adj[v]) {
        if (w == from) {
          from = -from;  // consume one multiplicity of the parent edge
          continue;
        }
        if (state[w] == 1) {
          cyc.push_back(w);
          for (int u = v; u != w; u = parent[u]) cyc.push_back(u);
          return true;
        }
        if (state[w] == 0) {
          parent[w] = v;
          if (dfs(w, v)) return true;
        }
      }
      state[v] = 2;
      return false;
    };
    dfs(1, 0);
    throw HasCycle("validate_tree: graph contains a cycle", cyc);
  }

  std::vector<int> degree(n + 1, 0);
  for (const auto& e : g.edges) {
    ++degree[e.first];
    ++degree[e.second];
  }
  std::vector<bool> removed(n + 1, false);
  std::vector<int> order;
  int remaining = n;
  while (remaining > 1) {
    std::vector<int> layer;
    for (int v = 1; v <= n; ++v)
      if (!removed[v] && degree[v] <= 1) layer.push_back(v);
    for (int v : layer) {
      if (remaining == 1) break;
      removed[v] = true;
      --remaining;
      order.push_back(v);
      for (int w : adj[v])
        if (!removed[w]) --degree[w];
    }
  }
  for (int v = 1; v <= n; ++v)
    if (!removed[v]) order.push_back(v);
  return order;
}

inline double edge_relation_residual(QPosition pos, const CMat& ti,
                                     const CMat& tj, const CMat& q) {
  switch (pos) {
    case QPosition::Left: return (ti * tj - q * tj * ti).norm();
    case QPosition::Middle: return (ti * tj - tj * q * ti).norm();
    case QPosition::Right: return (ti * tj - tj * ti * q).norm();
  }
  return 0.0;
}

// Per-edge relation residuals of the raw system.
inline std::map<std::pair<int, int>, double> check_system(
    const GraphSystem& s) {
  std::map<std::pair<int, int>, double> out;
  for (const auto& e : s.graph.edges) {
    const CMat& ti = s.contractions[e.first - 1];
    const CMat& tj = s.contractions[e.second - 1];
    out[e] = edge_relation_residual(s.position, ti, tj, s.graph.qmap.at(e));
  }
  return out;
}

struct GraphDilationResult {
  DirectSumSpace space;
  std::vector<CMat> isometries;                   // vertex-indexed (0-based)
  std::map<std::pair<int, int>, CMat> qbar_map;
  CertificateMap certs;  // keys lift_v<k>, isometry_v<k>, edge_<i>_<j>
};

namespace detail {

// extend an operator by the identity on the tail of a tower over its space
inline CMat extend_by_identity(const CMat& op, Index total) {
  CMat m = identity(total);
  m.topLeftCorner(op.rows(), op.cols()) = op;
  return m;
}

struct AttachOutput {
  CMat fresh;      // isometric lift of the leaf contraction
  CMat relifted;   // lift of the neighbor's previous isometry
  CMat qbar;       // lift of the edge Q on the new space
};

}  // namespace detail

struct GraphDilationOptions {
  Index base_levels = 4;    // tower levels of the bootstrap space
  Index attach_levels = 3;  // tower levels per leaf attachment
  Index max_total_dim = 4096;
  double strict_margin = kStrictMargin;
};

// One leaf attachment for positions L and M. `w_m` is the neighbor's
// isometric lift on the current space; the relation between leaf and
// neighbor is the positioned edge relation with the given chirality
// (leaf_first: the leaf occupies the first slot of the edge pair).
namespace detail {

inline AttachOutput attach_leaf_lm(QPosition pos, bool leaf_first,
                                   const CMat& t_leaf, const CMat& w_m,
                                   const CMat& q, Index head_dim,
                                   Index levels, Tolerance tol) {
  const Index kd = w_m.rows();
  DirectSumSpace cur;  // current space treated as a single head block
  cur.components.emplace_back("K", kd);
  CMat head = identity(kd).leftCols(head_dim);  // embedded H
  bool q_unitary = (q.adjoint() * q - identity(q.rows())).norm() <=
                       tol.eff(q.rows()) &&
                   (q * q.adjoint() - identity(q.rows())).norm() <=
                       tol.eff(q.rows());

  // Qbar0: isometric lift of Q on the current space. Unitary Q extends as
  // Q (+) I; a plain contraction would need an auxiliary defect tail, which
  // this layer does not carry.
  if (!q_unitary)
    throw HypothesisViolated(
        "dilate_tree_system: edge Q must be unitary for this attachment");
  CMat qbar0 = identity(kd);
  qbar0.topLeftCorner(q.rows(), q.cols()) = q;

  // Stage A: norm preserving lift Y of the leaf contraction on the current
  // space satisfying the positioned relation against w_m.
  CMat vl, vr;
  if (pos == QPosition::Left) {
    if (leaf_first) {
      vl = qbar0 * w_m;  // Y W = Qbar0 W Y
      vr = w_m;
    } else {
      vl = qbar0.adjoint() * w_m;  // W Y = Qbar0 Y W
      vr = w_m;
    }
  } else {  // Middle
    if (leaf_first) {
      vl = w_m * qbar0;  // Y W = W Qbar0 Y
      vr = w_m;
    } else {
      vl = w_m;          // W Y = Y Qbar0 W
      vr = qbar0 * w_m;
    }
  }
  LevelStructure s1 = orbit_levels(vl, head, levels + 4);
  LevelStructure s2 = orbit_levels(vr, head, levels + 4);
  LadderResult stage_a = intertwine_ladder(s1, s2, t_leaf);
  CMat y = stage_a.y;

  // Stage B: tower of Y over the current space.
  DirectSumSpace kspace = DirectSumSpace::uniform("K", kd, "D_Y", kd, levels);
  CMat v_leaf = tower_matrix_on(kspace, y, tol);
  CMat qbar = identity(kspace.total_dim());
  qbar.topLeftCorner(kd, kd) = qbar0;

  // Stage C: relift the neighbor against the tower, preserving the edge
  // relation on the enlarged space.
  CMat head_k = identity(kspace.total_dim()).leftCols(kd);
  CMat vlo, vro;
  bool relift_right;  // the unknown appears as Y in V_L Y = Y V_R
  if (pos == QPosition::Left) {
    if (leaf_first) {
      // V_m from Qbar* V_leaf V_m = V_m V_leaf
      vlo = qbar.adjoint() * v_leaf;
      vro = v_leaf;
      relift_right = false;
    } else {
      // V_m V_leaf = Qbar V_leaf V_m: V_m Vl' = (Qbar Vl) V_m backwards
      vlo = qbar * v_leaf;
      vro = v_leaf;
      relift_right = false;
    }
  } else {
    if (leaf_first) {
      // V_m from V_leaf V_m = V_m Qbar V_leaf
      vlo = v_leaf;
      vro = qbar * v_leaf;
      relift_right = true;
    } else {
      // V_m from V_m V_leaf = V_leaf Qbar V_m... relation is
      // V_m V_leaf = V_leaf Qbar V_m with the unknown outside:
      vlo = v_leaf * qbar;
      vro = v_leaf;
      relift_right = false;
    }
  }
  LadderResult stage_c;
  if (relift_right) {
    LevelStructure a = tower_levels(v_leaf, kspace, levels);
    LevelStructure b = orbit_levels(vro, head_k, levels + 2);
    stage_c = intertwine_ladder(a, b, w_m);
  } else {
    LevelStructure a = orbit_levels(vlo, head_k, levels + 2);
    LevelStructure b = tower_levels(vro, kspace, levels);
    stage_c = intertwine_ladder(a, b, w_m);
  }

  AttachOutput out;
  out.fresh = v_leaf;
  out.relifted = stage_c.y;
  out.qbar = qbar;
  return out;
}

// Right-position attachment: the strict diagonal construction on the
// adjoint side. Fresh leaf must be a strict contraction.
inline AttachOutput attach_leaf_r(bool leaf_first, const CMat& t_leaf,
                                  const CMat& w_m, const CMat& q,
                                  Index head_dim, Index levels, Tolerance tol,
                                  double strict_margin) {
  const Index kd = w_m.rows();
  const Index d = q.rows();
  bool q_unitary = (q.adjoint() * q - identity(d)).norm() <= tol.eff(d) &&
                   (q * q.adjoint() - identity(d)).norm() <= tol.eff(d);
  if (!q_unitary)
    throw HypothesisViolated(
        "dilate_tree_system: right position requires unitary edge Q");
  double nleaf = spectral_norm(t_leaf);
  if (nleaf >= 1.0 - strict_margin)
    throw NotStrict("dilate_tree_system: right position requires strict "
                    "contractions");

  // Edge relation T_i T_j = T_j T_i Q. With the leaf in the first slot,
  // flip through the unitary: T_j T_i = T_i T_j Q*. Either way the leaf
  // sits in the second slot of T_a T_b = T_b T_a Qe with existing lift of
  // T_a; on adjoints this is the strict left construction.
  CMat qe = leaf_first ? CMat(q.adjoint()) : q;

  // adjoints: A1 = t_leaf*, A2 = (neighbor)*, relation A1 A2 = Qe* A2 A1,
  // existing co-isometric extension zhat2 = w_m* of A2.
  CMat zhat2 = w_m.adjoint();
  CMat qbar0hat = identity(kd);
  qbar0hat.topLeftCorner(d, d) = qe.adjoint();

  // stage A: norm preserving extension Yhat of t_leaf* with
  // Yhat zhat2 = qbar0hat zhat2 Yhat
  CMat head = identity(kd).leftCols(head_dim);
  CMat vl = w_m;                       // = zhat2*
  CMat vr = w_m * qbar0hat.adjoint();  // (qbar0hat zhat2)*
  LevelStructure s1 = orbit_levels(vl, head, levels + 6);
  LevelStructure s2 = orbit_levels(vr, head, levels + 6);
  LadderResult lad = intertwine_ladder(s1, s2, t_leaf);
  CMat yhat = lad.y.adjoint();  // extension of t_leaf* on the current space

  CMat dystar = codefect_clamped(yhat);
  Eigen::SelfAdjointEigenSolver<CMat> es(dystar);
  double dmin = es.eigenvalues().minCoeff();
  if (dmin <= 0.0 || es.eigenvalues().maxCoeff() / dmin > 1.0 / tol.base)
    throw ConditioningFailure(
        "dilate_tree_system: cond(D_{Y*}) exceeds 1/tol");
  CMat dinv = es.eigenvectors() *
              es.eigenvalues().cwiseInverse().cast<Complex>().asDiagonal() *
              es.eigenvectors().adjoint();

  DirectSumSpace kspace = DirectSumSpace::uniform("K", kd, "K", kd, levels);
  const Index total = kspace.total_dim();
  CMat zhat1 = CMat::Zero(total, total);  // pure co-isometry over yhat
  zhat1.topLeftCorner(kd, kd) = yhat;
  if (levels > 0) zhat1.block(0, kd, kd, kd) = dystar;
  for (Index j = 1; j < levels; ++j)
    zhat1.block(j * kd, (j + 1) * kd, kd, kd) = identity(kd);
  CMat adiag = dinv * qbar0hat * zhat2 * dystar;
  CMat zhat2ext = CMat::Zero(total, total);
  zhat2ext.topLeftCorner(kd, kd) = zhat2;
  for (Index j = 1; j <= levels; ++j)
    zhat2ext.block(j * kd, j * kd, kd, kd) = adiag;
  CMat qbarhat = identity(total);
  qbarhat.topLeftCorner(kd, kd) = qbar0hat;

  AttachOutput out;
  out.fresh = zhat1.adjoint();     // isometric lift of t_leaf
  out.relifted = zhat2ext.adjoint();
  // the construction certifies V_m V_leaf = V_leaf V_m (lift of qe); when
  // the leaf sits in the first edge slot the relation was flipped through
  // the unitary, and flipping back turns the lift of q* into its adjoint
  out.qbar = leaf_first ? qbarhat : CMat(qbarhat.adjoint());
  return out;
}

}  // namespace detail

inline GraphDilationResult dilate_tree_system(const GraphSystem& s,
                                              GraphDilationOptions opt = {},
                                              Tolerance tol = {}) {
  const int n = s.graph.vertex_count;
  if (static_cast<int>(s.contractions.size()) != n)
    throw DimensionMismatch("dilate_tree_system: one contraction per vertex");
  const Index d = n > 0 ? s.contractions[0].rows() : 0;
  for (const auto& t : s.contractions) {
    if (t.rows() != d || t.cols() != d)
      throw DimensionMismatch("dilate_tree_system: uniform dimensions only");
    if (spectral_norm(t) > 1.0 + tol.eff(d))
      throw NotAContraction("dilate_tree_system: contractions required");
  }
  for (const auto& e : s.graph.edges) {
    double rel = edge_relation_residual(s.position,
                                        s.contractions[e.first - 1],
                                        s.contractions[e.second - 1],
                                        s.graph.qmap.at(e));
    if (rel > tol.eff(d))
      throw HypothesisViolated("dilate_tree_system: edge relation (" +
                               std::to_string(e.first) + "," +
                               std::to_string(e.second) + ") fails, residual " +
                               std::to_string(rel));
  }

  std::vector<int> order = validate_tree(s.graph);
  int root = order.back();

  // neighbor of each eliminated leaf at elimination time
  std::map<int, int> attach_to;
  {
    std::set<int> gone;
    for (size_t k = 0; k + 1 < order.size(); ++k) {
      int v = order[k];
      for (int w : s.graph.neighbors(v))
        if (!gone.count(w)) attach_to[v] = w;
      gone.insert(v);
    }
  }

  // bootstrap: the root's tower
  Index cur_dim = (opt.base_levels + 1) * d;
  std::map<int, CMat> lifts;
  {
    DirectSumSpace base = tower_space(d, opt.base_levels);
    lifts[root] = tower_matrix_on(base, s.contractions[root - 1], tol);
  }
  std::map<std::pair<int, int>, CMat> qbars;

  // attach leaves back, last eliminated first
  for (auto it = order.rbegin() + 1; it != order.rend(); ++it) {
    int leaf = *it;
    int m = attach_to.at(leaf);
    auto key = std::minmax(leaf, m);
    bool leaf_first = key.first == leaf;
    const CMat& q = s.graph.qmap.at(key);

    Index levels = opt.attach_levels;
    while (levels > 1 && (levels + 1) * cur_dim > opt.max_total_dim) --levels;
    if ((levels + 1) * cur_dim > opt.max_total_dim)
      throw HypothesisViolated(
          "dilate_tree_system: space budget exceeded; raise max_total_dim "
          "or lower the truncation");

    detail::AttachOutput att;
    if (s.position == QPosition::Right)
      att = detail::attach_leaf_r(leaf_first, s.contractions[leaf - 1],
                                  lifts.at(m), q, d, levels, tol,
                                  opt.strict_margin);
    else
      att = detail::attach_leaf_lm(s.position, leaf_first,
                                   s.contractions[leaf - 1], lifts.at(m), q,
                                   d, levels, tol);

    Index new_dim = (levels + 1) * cur_dim;
    for (auto& [v, w] : lifts)
      if (v != m) w = detail::extend_by_identity(w, new_dim);
    lifts[m] = att.relifted;
    lifts[leaf] = att.fresh;
    for (auto& [e, qb] : qbars) qb = detail::extend_by_identity(qb, new_dim);
    qbars[key] = att.qbar;
    cur_dim = new_dim;
  }

  GraphDilationResult res;
  res.space.components.emplace_back("H", d);
  res.space.components.emplace_back("rest", cur_dim - d);
  res.isometries.resize(n);
  for (int v = 1; v <= n; ++v) res.isometries[v - 1] = lifts.at(v);
  res.qbar_map = qbars;

  // certificates
  CMat iota = CMat::Zero(cur_dim, d);
  iota.topRows(d) = identity(d);
  for (int v = 1; v <= n; ++v) {
    const CMat& vk = res.isometries[v - 1];
    res.certs["lift_v" + std::to_string(v)] =
        (vk.adjoint() * iota - iota * s.contractions[v - 1].adjoint()).norm();
    LevelStructure orb = orbit_levels(vk, iota, 2);
    CMat b = orb.basis;
    res.certs["isometry_v" + std::to_string(v)] =
        ((vk * b).adjoint() * (vk * b) - identity(b.cols())).norm();
  }
  for (const auto& e : s.graph.edges) {
    const CMat& vi = res.isometries[e.first - 1];
    const CMat& vj = res.isometries[e.second - 1];
    const CMat& qb = res.qbar_map.at(e);
    CMat lhs = vi * vj, rhs;
    switch (s.position) {
      case QPosition::Left: rhs = qb * vj * vi; break;
      case QPosition::Middle: rhs = vj * qb * vi; break;
      case QPosition::Right: rhs = vj * vi * qb; break;
    }
    res.certs["edge_" + std::to_string(e.first) + "_" +
              std::to_string(e.second)] = ((lhs - rhs) * iota).norm();
  }
  return res;
}

}  // namespace dilatron

#endif  // DILATRON_GRAPHSYS_HPP
