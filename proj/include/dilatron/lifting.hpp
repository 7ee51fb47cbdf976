#ifndef DILATRON_LIFTING_HPP
#define DILATRON_LIFTING_HPP

// Constructive lifting engines.
//
// Three mechanisms drive everything here:
//   * a one-step partial-isometry completion that fills one new defect block
//     of an upper-triangular extension (Douglas pair + Douglas + triangular
//     parameterization),
//   * level-by-level inductive ladders over the Schaffer tower (the
//     Douglas-Muhly-Pearcy style engines, and a dual-Parrott alternative),
//   * a nested-filtration ladder that lifts an intertwiner of two isometric
//     lifts one defect level at a time.
// The thin front-ends at the bottom translate each supported Q-relation into
// one of these mechanisms, taking adjoints where the statement is the
// co-isometric dual.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dilatron/blockspace.hpp"
#include "dilatron/numkernel.hpp"
#include "dilatron/schaffer.hpp"
#include "dilatron/types.hpp"

namespace dilatron {

inline constexpr double kStrictMargin = 1e-3;

// ---------------------------------------------------------------------------
// One-step completion: given a contraction T, operators X, Y with XT = TY,
// ||X|| <= ||Y||, and a feeder S0 with TT* + S0 S0* = I, produce C, W with
//   X S0 = T C + S0 W   and   || [[Y, C], [0, W]] || = ||Y||.
// ---------------------------------------------------------------------------
struct PartialIsoStep {
  CMat c;
  CMat w;
  double feasibility_margin = 0.0;  // most negative Douglas eigenvalue seen
};

inline PartialIsoStep partial_iso_step_impl(const CMat& t, const CMat& x,
                                            const CMat& y, const CMat& s0) {
  PartialIsoStep out;
  double mu = spectral_norm(y);
  if (mu <= 0.0) {
    out.c = CMat::Zero(t.cols(), s0.cols());
    out.w = CMat::Zero(s0.cols(), s0.cols());
    return out;
  }
  CMat xs = x / mu, ys = y / mu;
  CMat dystar = codefect_clamped(ys);
  double m1 = 0.0, m2 = 0.0;
  auto [r, w] =
      douglas_pair_least_squares(xs * s0, t * dystar, s0, &m1);
  CMat dw = defect_clamped(w);
  CMat fstar = douglas_least_squares(r.adjoint(), dw, &m2);
  out.c = mu * (dystar * fstar.adjoint() * dw);
  out.w = mu * w;
  out.feasibility_margin = std::min(m1, m2);
  return out;
}

inline PartialIsoStep partial_iso_step(const CMat& t, const CMat& x,
                                       const CMat& y, const CMat& s0,
                                       Tolerance tol = {}) {
  if (x.rows() != t.rows() || y.cols() != t.cols())
    throw DimensionMismatch("partial_iso_step: shape mismatch");
  double scale = std::max({1.0, x.norm(), y.norm()});
  if (spectral_norm(x) > spectral_norm(y) + tol.eff(t.rows(), scale))
    throw HypothesisViolated("partial_iso_step: ||X|| <= ||Y|| fails");
  double rel = (x * t - t * y).norm();
  if (rel > tol.eff(t.rows(), scale))
    throw HypothesisViolated("partial_iso_step: XT = TY fails, residual " +
                             std::to_string(rel));
  double feed = (t * t.adjoint() + s0 * s0.adjoint() - identity(t.rows())).norm();
  if (feed > tol.eff(t.rows()))
    throw HypothesisViolated("partial_iso_step: TT* + S0S0* = I fails");
  PartialIsoStep out = partial_iso_step_impl(t, x, y, s0);
  if (out.feasibility_margin < -tol.eff(t.rows(), scale))
    throw InfeasibleError("partial_iso_step: Douglas step infeasible",
                          out.feasibility_margin);
  return out;
}

// ---------------------------------------------------------------------------
// Level structure of an isometric lift: nested subspaces K_0 = H,
// K_{n+1} = K_n + V(K_n), presented through an orthonormal, nested basis.
// For Schaffer towers this is exactly the block filtration; for a general
// isometry it is computed by Gram-Schmidt against the previous levels.
// ---------------------------------------------------------------------------
struct LevelStructure {
  CMat v;                         // ambient isometry
  CMat basis;                     // ambient_dim x d_s, nested orthonormal
  std::vector<Index> level_dims;  // cumulative dims d_0 <= d_1 <= ...
  double structure_defect = 0.0;  // worst || V_n*V_n + S_n*S_n - I ||

  Index levels() const { return static_cast<Index>(level_dims.size()); }
  Index dim_at(Index n) const { return level_dims[n]; }
  CMat basis_at(Index n) const { return basis.leftCols(level_dims[n]); }
};

// Block filtration of a Schaffer-type tower (head + uniform tail blocks).
inline LevelStructure tower_levels(const CMat& v, const DirectSumSpace& space,
                                   Index max_levels) {
  LevelStructure ls;
  ls.v = v;
  Index blocks = std::min(max_levels + 1, space.block_count());
  ls.basis = identity(space.total_dim()).leftCols(space.leading_dim(blocks));
  for (Index b = 1; b <= blocks; ++b)
    ls.level_dims.push_back(space.leading_dim(b));
  return ls;
}

// General filtration from an orthonormal head embedding.
inline LevelStructure orbit_levels(const CMat& v, const CMat& head,
                                   Index max_levels, double drop_tol = 1e-9) {
  LevelStructure ls;
  ls.v = v;
  const Index n = v.rows();
  CMat basis = head;
  ls.level_dims.push_back(head.cols());
  CMat fresh = head;
  for (Index lvl = 0; lvl < max_levels; ++lvl) {
    if (fresh.cols() == 0) break;
    CMat cand = v * fresh;
    std::vector<CVec> kept;
    for (Index j = 0; j < cand.cols(); ++j) {
      CVec u = cand.col(j);
      u -= basis * (basis.adjoint() * u);
      for (const auto& k : kept) u -= k * k.dot(u);
      u -= basis * (basis.adjoint() * u);  // re-orthogonalize
      double nn = u.norm();
      if (nn > drop_tol) kept.push_back(u / nn);
    }
    if (kept.empty()) break;
    CMat add(n, static_cast<Index>(kept.size()));
    for (size_t j = 0; j < kept.size(); ++j) add.col(static_cast<Index>(j)) = kept[j];
    CMat nb(n, basis.cols() + add.cols());
    nb << basis, add;
    basis = std::move(nb);
    ls.level_dims.push_back(basis.cols());
    fresh = add;
  }
  ls.basis = basis;
  return ls;
}

// ---------------------------------------------------------------------------
// One column of the intertwining ladder: given V1 = [[T1, 0], [S1, 0]] and
// V2 = [[T2, 0], [S2, 0]] with Ti* Ti + Si* Si = I and T1 X = X T2, produce
// A, B with A T2 + B S2 = S1 X such that [[X, 0], [A, B]] keeps the norm of
// X. A is returned in its certified factorization A = K D_X.
// ---------------------------------------------------------------------------
struct QpartStep {
  CMat a;
  CMat b;
  double feasibility_margin = 0.0;
};

inline QpartStep qpart_step_impl(const CMat& /*t1*/, const CMat& s1,
                                 const CMat& t2, const CMat& s2,
                                 const CMat& x) {
  QpartStep out;
  CMat dx = defect_clamped(x);
  double m = 0.0;
  auto [kstar, bstar] = douglas_pair_least_squares(
      CMat(x.adjoint() * s1.adjoint()), CMat(t2.adjoint() * dx),
      CMat(s2.adjoint()), &m);
  out.b = bstar.adjoint();
  out.a = kstar.adjoint() * dx;
  out.feasibility_margin = m;
  return out;
}

inline QpartStep qpart_step(const CMat& t1, const CMat& t2, const CMat& x,
                            const CMat& s1, const CMat& s2,
                            Tolerance tol = {}) {
  double scale = std::max(1.0, x.norm());
  if ((t1 * x - x * t2).norm() > tol.eff(t1.rows(), scale))
    throw HypothesisViolated("qpart_step: T1 X = X T2 fails");
  if ((t1.adjoint() * t1 + s1.adjoint() * s1 - identity(t1.cols())).norm() >
          tol.eff(t1.cols()) ||
      (t2.adjoint() * t2 + s2.adjoint() * s2 - identity(t2.cols())).norm() >
          tol.eff(t2.cols()))
    throw HypothesisViolated("qpart_step: Ti* Ti + Si* Si = I fails");
  double mu = spectral_norm(x);
  if (mu <= 0.0) {
    QpartStep z;
    z.a = CMat::Zero(s1.rows(), t2.cols());
    z.b = CMat::Zero(s1.rows(), s2.rows());
    return z;
  }
  QpartStep st = qpart_step_impl(t1, s1, t2, s2, CMat(x / mu));
  st.a *= mu;
  st.b *= mu;
  if (st.feasibility_margin < -tol.eff(t1.rows(), scale))
    throw InfeasibleError("qpart_step: Douglas step infeasible",
                          st.feasibility_margin);
  return st;
}

// ---------------------------------------------------------------------------
// Nested-filtration intertwining ladder. Given level structures for two
// isometric lifts V1, V2 and X with T1 X = X T2 at the head level, produce
// Y with V1 Y = Y V2 (on the filtration window), Y* restricted to the head
// of side 1 equal to X*, and ||Y|| = ||X||.
// ---------------------------------------------------------------------------
struct LadderResult {
  CMat y;                       // ambient: side-2 space -> side-1 space
  std::vector<CMat> per_level;  // coordinates of each Y_n
  double feasibility_margin = 0.0;
  double structure_defect = 0.0;
  Index levels_run = 0;
};

inline LadderResult intertwine_ladder(const LevelStructure& s1,
                                      const LevelStructure& s2, const CMat& x,
                                      double structure_guard = 1e-7) {
  LadderResult out;
  double mu = spectral_norm(x);
  const Index n1 = s1.v.rows(), n2 = s2.v.rows();
  if (mu <= 0.0) {
    out.y = CMat::Zero(n1, n2);
    return out;
  }
  CMat ycur = x / mu;
  out.per_level.push_back(ycur);
  Index levels = std::min(s1.levels(), s2.levels());
  Index reached = 0;
  for (Index n = 0; n + 1 < levels; ++n) {
    const Index d1 = s1.dim_at(n), d1n = s1.dim_at(n + 1);
    const Index d2 = s2.dim_at(n), d2n = s2.dim_at(n + 1);
    const Index l1 = d1n - d1, l2 = d2n - d2;
    CMat b1 = s1.basis_at(n), g1 = s1.basis.middleCols(d1, l1);
    CMat b2 = s2.basis_at(n), g2 = s2.basis.middleCols(d2, l2);
    CMat t1 = b1.adjoint() * (s1.v * b1);
    CMat f1 = g1.adjoint() * (s1.v * b1);
    CMat t2 = b2.adjoint() * (s2.v * b2);
    CMat f2 = g2.adjoint() * (s2.v * b2);
    double sd = std::max(
        (t1.adjoint() * t1 + f1.adjoint() * f1 - identity(d1)).norm(),
        (t2.adjoint() * t2 + f2.adjoint() * f2 - identity(d2)).norm());
    out.structure_defect = std::max(out.structure_defect, sd);
    if (sd > structure_guard) break;

    CMat a = CMat::Zero(l1, d2), b = CMat::Zero(l1, l2);
    if (l1 > 0) {
      QpartStep st = qpart_step_impl(t1, f1, t2, f2, ycur);
      a = std::move(st.a);
      b = std::move(st.b);
      out.feasibility_margin =
          std::min(out.feasibility_margin, st.feasibility_margin);
    }
    CMat next(d1n, d2n);
    next.setZero();
    next.topLeftCorner(d1, d2) = ycur;
    if (l1 > 0) {
      next.block(d1, 0, l1, d2) = a;
      next.block(d1, d2, l1, l2) = b;
    }
    ycur = std::move(next);
    out.per_level.push_back(ycur);
    reached = n + 1;
  }
  Index d1f = s1.dim_at(reached), d2f = s2.dim_at(reached);
  out.y = mu * (s1.basis.leftCols(d1f) * ycur *
                s2.basis.leftCols(d2f).adjoint());
  out.levels_run = reached;
  return out;
}

// ---------------------------------------------------------------------------
// The inductive DMP ladders on the explicit co-isometric tower
//   Z(h0, h1, ...) = (T h0 + D_{T*} h1, h2, ...).
// ---------------------------------------------------------------------------

enum class DmpForm {
  // XT = TXQ with co-isometric Q; output extension satisfies
  //   Xt Z = Z Xt Qbar.
  RightOfX,
  // TX = QXT with contractive Q; output extension satisfies
  //   Z Xt = Qbar Xt Z.
  LeftOfX,
};

struct DmpLadder {
  DirectSumSpace space;
  CMat z;        // truncated minimal co-isometric extension of t
  CMat xt;       // extension X~ of x
  CMat qbar;     // block-diagonal lift/extension of q
  std::vector<CMat> per_level;
  CertificateMap certs;
  double feasibility_margin = 0.0;
};

namespace detail {

inline CMat tower_z_restriction(const CMat& t, const CMat& dtstar,
                                Index blocks) {
  const Index d = t.rows();
  CMat z = CMat::Zero(blocks * d, blocks * d);
  z.topLeftCorner(d, d) = t;
  if (blocks > 1) z.block(0, d, d, d) = dtstar;
  for (Index j = 1; j + 1 < blocks; ++j)
    z.block(j * d, (j + 1) * d, d, d) = identity(d);
  return z;
}

// The off-diagonal block S_n of Z_{n+1} = [[Z_n, S_n], [0, 0]]: the first
// new defect copy feeds block 0 through D_{T*}, later copies feed the last
// block of K_n through the identity.
inline CMat tower_feeder(const CMat& dtstar, Index blocks) {
  const Index d = dtstar.rows();
  if (blocks == 1) return dtstar;
  CMat f = CMat::Zero(blocks * d, d);
  f.bottomRows(d) = identity(d);
  return f;
}

inline CMat qbar_blockdiag(const CMat& q, Complex scalar, Index blocks) {
  const Index d = q.rows();
  CMat qb = CMat::Zero(blocks * d, blocks * d);
  qb.topLeftCorner(d, d) = q;
  for (Index j = 1; j < blocks; ++j)
    qb.block(j * d, j * d, d, d) = scalar * identity(d);
  return qb;
}

}  // namespace detail

inline DmpLadder lift_inductive_dmp(const CMat& t, const CMat& x, const CMat& q,
                                    DmpForm form, Index levels,
                                    Complex unimodular = Complex(1.0, 0.0),
                                    Tolerance tol = {}) {
  if (t.rows() != t.cols() || x.rows() != x.cols() || q.rows() != q.cols() ||
      t.rows() != x.rows() || t.rows() != q.rows())
    throw DimensionMismatch("lift_inductive_dmp: square same-size inputs");
  const Index d = t.rows();
  double scale = std::max({1.0, x.norm(), q.norm()});
  if (spectral_norm(t) > 1.0 + tol.eff(d))
    throw NotAContraction("lift_inductive_dmp: T is not a contraction");
  if (form == DmpForm::RightOfX) {
    double cod = (q * q.adjoint() - identity(d)).norm();
    if (cod > tol.eff(d, scale))
      throw HypothesisViolated("lift_inductive_dmp: Q must be co-isometric");
    double rel = (x * t - t * x * q).norm();
    if (rel > tol.eff(d, scale))
      throw HypothesisViolated("lift_inductive_dmp: XT = TXQ fails, residual " +
                               std::to_string(rel));
    if (std::abs(std::abs(unimodular) - 1.0) > 1e-14)
      throw HypothesisViolated("lift_inductive_dmp: |q| = 1 required");
  } else {
    if (spectral_norm(q) > 1.0 + tol.eff(d, scale))
      throw NotAContraction("lift_inductive_dmp: Q is not a contraction");
    double rel = (t * x - q * x * t).norm();
    if (rel > tol.eff(d, scale))
      throw HypothesisViolated("lift_inductive_dmp: TX = QXT fails, residual " +
                               std::to_string(rel));
  }

  DmpLadder out;
  out.space = tower_space(d, levels, "H", "D_Tstar");
  CMat dtstar = codefect(t, tol);
  const Complex us = form == DmpForm::RightOfX ? unimodular : Complex(1.0, 0.0);

  CMat xcur = x;
  out.per_level.push_back(xcur);
  double norm_drift = 0.0;
  const double nx = spectral_norm(x);
  for (Index n = 1; n <= levels; ++n) {
    CMat zprev = detail::tower_z_restriction(t, dtstar, n);
    CMat feed = detail::tower_feeder(dtstar, n);
    CMat qprev = detail::qbar_blockdiag(q, us, n);
    PartialIsoStep st;
    if (form == DmpForm::RightOfX) {
      // X_{n-1} Z_{n-1} = Z_{n-1} (X_{n-1} Q_{n-1})
      st = partial_iso_step_impl(zprev, xcur, xcur * qprev, feed);
    } else {
      // (Q_{n-1} X_{n-1}) Z_{n-1} = Z_{n-1} X_{n-1}
      st = partial_iso_step_impl(zprev, qprev * xcur, xcur, feed);
    }
    out.feasibility_margin =
        std::min(out.feasibility_margin, st.feasibility_margin);
    CMat next = CMat::Zero((n + 1) * d, (n + 1) * d);
    next.topLeftCorner(n * d, n * d) = xcur;
    if (form == DmpForm::RightOfX) {
      next.topRightCorner(n * d, d) = st.c / us;
      next.bottomRightCorner(d, d) = st.w / us;
    } else {
      next.topRightCorner(n * d, d) = st.c;
      next.bottomRightCorner(d, d) = st.w;
    }
    xcur = std::move(next);
    out.per_level.push_back(xcur);
    norm_drift = std::max(norm_drift, std::abs(spectral_norm(xcur) - nx));
  }

  out.xt = xcur;
  out.z = detail::tower_z_restriction(t, dtstar, levels + 1);
  out.qbar = detail::qbar_blockdiag(q, us, levels + 1);

  CMat iota = embed_matrix(out.space);
  out.certs["extension"] = (out.xt * iota - iota * x).norm();
  out.certs["norm_preservation"] = norm_drift;
  if (form == DmpForm::RightOfX)
    out.certs["relation"] = (out.xt * out.z - out.z * out.xt * out.qbar).norm();
  else
    out.certs["relation"] = (out.z * out.xt - out.qbar * out.xt * out.z).norm();
  return out;
}

// Dual-Parrott (Sebestyen style) alternative engine for the LeftOfX form
// TX = QXT. Works on the filtration K_n = span{ Z*^m H : m <= n } and
// extends one level per step; the claim identity is verified numerically
// inside dual_parrott_complete before every extension.
inline DmpLadder lift_inductive_dualparrott(const CMat& t, const CMat& x,
                                            const CMat& q, Index levels,
                                            Tolerance tol = {}) {
  const Index d = t.rows();
  double scale = std::max({1.0, x.norm(), q.norm()});
  if (spectral_norm(t) > 1.0 + tol.eff(d))
    throw NotAContraction("lift_inductive_dualparrott: T not a contraction");
  if (spectral_norm(q) > 1.0 + tol.eff(d, scale))
    throw NotAContraction("lift_inductive_dualparrott: Q not a contraction");
  double rel = (t * x - q * x * t).norm();
  if (rel > tol.eff(d, scale))
    throw HypothesisViolated(
        "lift_inductive_dualparrott: TX = QXT fails, residual " +
        std::to_string(rel));

  DmpLadder out;
  out.space = tower_space(d, levels, "H", "D_Tstar");
  CMat dtstar = codefect(t, tol);
  out.z = detail::tower_z_restriction(t, dtstar, levels + 1);
  out.qbar = detail::qbar_blockdiag(q, Complex(1.0, 0.0), levels + 1);
  CMat zstar = out.z.adjoint();
  CMat iota = embed_matrix(out.space);

  LevelStructure ls = orbit_levels(zstar, iota, levels);
  CMat scur = x;  // coordinates on K_0 = H
  out.per_level.push_back(scur);
  double norm_drift = 0.0;
  const double nx = spectral_norm(x);
  Index steps = ls.levels() - 1;
  for (Index n = 0; n < steps; ++n) {
    const Index dn = ls.dim_at(n), dn1 = ls.dim_at(n + 1);
    CMat bn = ls.basis_at(n), bn1 = ls.basis_at(n + 1);
    CMat pn = bn * bn.adjoint();
    CMat s_amb = bn * scur * bn.adjoint();
    // orthonormal basis of H' = Z* K_n (Z* is isometric on the interior,
    // so this keeps the full column count)
    CMat hprime = range_basis(CMat(zstar * bn), 1e-9);
    CMat ehp = bn1.adjoint() * hprime;
    CMat x_c(dn1, dn);
    x_c.setZero();
    x_c.topRows(dn) = scur;
    CMat xp_amb = zstar * s_amb.adjoint() * pn * out.qbar.adjoint() * out.z *
                  hprime;
    CMat xp_c = bn1.adjoint() * xp_amb;
    CMat eh = CMat::Zero(dn1, dn);
    eh.topRows(dn) = identity(dn);
    CompletionResult comp = dual_parrott_complete(x_c, xp_c, eh, ehp, tol);
    CMat snext = comp.completed;
    snext.leftCols(dn).setZero();
    snext.topLeftCorner(dn, dn) = scur;  // bit-exact ladder consistency
    scur = std::move(snext);
    out.per_level.push_back(scur);
    norm_drift = std::max(norm_drift, std::abs(spectral_norm(scur) - nx));
  }
  Index df = ls.dim_at(steps);
  out.xt = ls.basis.leftCols(df) * scur * ls.basis.leftCols(df).adjoint();
  out.certs["extension"] = (out.xt * iota - iota * x).norm();
  out.certs["norm_preservation"] = norm_drift;
  // relation holds on the filtration window; certify one level down
  Index dw = steps > 0 ? ls.dim_at(steps - 1) : ls.dim_at(0);
  CMat win = ls.basis.leftCols(dw);
  out.certs["relation"] =
      ((out.z * out.xt - out.qbar * out.xt * out.z) * win).norm();
  return out;
}

}  // namespace dilatron

#endif  // DILATRON_LIFTING_HPP
