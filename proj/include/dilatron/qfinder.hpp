#ifndef DILATRON_QFINDER_HPP
#define DILATRON_QFINDER_HPP

// Constructive existence of Q for a given pair: in finite dimensions a
// bounded Q with T1 T2 = Q T2 T1 exists iff ker(T2 T1) is contained in
// ker(T1 T2), and the kernel construction produces a canonical witness Q.
// Also carries the bundled corpus of l^2 examples, truncated to a finite
// basis with interior-vector guards, whose positive and negative claims
// are machine checkable.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dilatron/liftops.hpp"

namespace dilatron {

struct QExistenceReport {
  bool feasible_left = false;
  bool feasible_right = false;
  std::optional<CMat> q_left;
  std::optional<CMat> q_right;
  std::optional<CVec> witness_left;   // kernel-inclusion violator
  std::optional<CVec> witness_right;
  double residual_left = 0.0;   // || T1 T2 - Q T2 T1 || when feasible
  double residual_right = 0.0;  // || T1 T2 - T2 T1 Q || when feasible
};

namespace detail {

// canonical Q with N = Q M on range(M), Q = N on the complement of
// range(M); feasible iff ker M <= ker N
inline std::optional<CMat> kernel_quotient(const CMat& n, const CMat& m,
                                           CVec* witness, Tolerance tol) {
  double scale = std::max({1.0, n.norm(), m.norm()});
  CMat mp = pinv(m);
  CMat ker_proj = identity(m.cols()) - mp * m;  // projector onto ker M
  double violation = (n * ker_proj).norm();
  if (violation > tol.eff(m.rows(), scale)) {
    if (witness) {
      // pick the kernel direction with the largest image under N
      Eigen::JacobiSVD<CMat> svd(CMat(n * ker_proj), Eigen::ComputeFullV);
      *witness = ker_proj * svd.matrixV().col(0);
      witness->normalize();
    }
    return std::nullopt;
  }
  CMat q = n * (mp + (identity(m.rows()) - m * mp));
  return q;
}

}  // namespace detail

inline QExistenceReport find_q(const CMat& t1, const CMat& t2,
                               Tolerance tol = {}) {
  QExistenceReport rep;
  CMat n_left = t1 * t2, m_left = t2 * t1;
  CVec wit;
  if (auto q = detail::kernel_quotient(n_left, m_left, &wit, tol)) {
    rep.feasible_left = true;
    rep.q_left = *q;
    rep.residual_left = (n_left - *q * m_left).norm();
  } else {
    rep.witness_left = wit;
  }
  // right case through the adjoints: T1 T2 = T2 T1 Q reads
  // T2* T1* = Q* T1* T2*, the left form with target (T1 T2)* and kernel
  // side (T2 T1)*; feasible iff ker T1* T2* <= ker T2* T1*
  if (auto q = detail::kernel_quotient(CMat(n_left.adjoint()),
                                       CMat(m_left.adjoint()), &wit, tol)) {
    rep.feasible_right = true;
    rep.q_right = q->adjoint();
    rep.residual_right = (n_left - m_left * *rep.q_right).norm();
  } else {
    rep.witness_right = wit;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Example corpus: finite truncations of the l^2 examples with their
// documented claims. Positive claims are relation residuals on guarded
// basis vectors; negative claims are lower bounds over every bounded Q,
// obtained from kernel or range witnesses.
// ---------------------------------------------------------------------------

struct CorpusClaim {
  std::string description;
  bool positive = true;
  // positive: residual that should vanish on the guarded columns
  // negative: certified lower bound on the relation residual over all Q
  double value = 0.0;
  double negative_floor = 1.0 / 12.0;  // required gap for negative claims
  bool holds() const {
    return positive ? value <= 1e-9 : value >= negative_floor;
  }
};

struct CorpusInstance {
  std::string name;
  CMat t1, t2;
  std::vector<CorpusClaim> claims;
};

namespace detail {

// residual of A B = rel(Q, B, A) on the first `guard` basis columns
inline double guarded_residual(QPosition pos, const CMat& a, const CMat& b,
                               const CMat& q, Index guard) {
  CMat lhs = a * b;
  CMat rhs;
  switch (pos) {
    case QPosition::Left: rhs = q * (b * a); break;
    case QPosition::Middle: rhs = b * q * a; break;
    case QPosition::Right: rhs = (b * a) * q; break;
  }
  return (lhs - rhs).leftCols(guard).norm();
}

// lower bound over all Q for A B = Q (B A) at a kernel witness w:
// B A w = 0 makes the right side vanish
inline double left_negative_bound(const CMat& a, const CMat& b,
                                  const CVec& w) {
  if ((b * a * w).norm() > 1e-14) return 0.0;
  return (a * b * w).norm();
}

// lower bound for A B = B Q A at w: if A w = 0 the right side vanishes;
// otherwise Q (A w) ranges over everything and the bound is the distance
// of A B w from range(B)
inline double middle_negative_bound(const CMat& a, const CMat& b,
                                    const CVec& w) {
  CVec img = a * b * w;
  if ((a * w).norm() <= 1e-14) return img.norm();
  CMat p = range_projector(b);
  return (img - p * img).norm();
}

// lower bound for A B = (B A) Q at w: Q w ranges over everything, so the
// bound is the distance of A B w from range(B A)
inline double right_negative_bound(const CMat& a, const CMat& b,
                                   const CVec& w) {
  CVec img = a * b * w;
  CMat p = range_projector(CMat(b * a));
  return (img - p * img).norm();
}

inline CMat basis_action(Index dim,
                         const std::function<void(Index, CVec&)>& act) {
  CMat m = CMat::Zero(dim, dim);
  for (Index j = 0; j < dim; ++j) {
    CVec col = CVec::Zero(dim);
    act(j, col);
    m.col(j) = col;
  }
  return m;
}

}  // namespace detail

// The corpus. Truncation level counts retained basis vectors e_1..e_N; all
// claims are asserted only on basis vectors whose two-step images stay
// inside the truncation.
inline std::vector<CorpusInstance> example_corpus(Index trunc = 16) {
  std::vector<CorpusInstance> out;
  const Index guard = trunc - 6;
  auto e = [&](Index one_based) { return one_based - 1; };  // basis e_1, e_2, ...

  // two-by-two triangular pair: T1 = [[0, a1], [0, a2]], T2 upper
  // triangular; the left Q exists, the right Q exists iff
  // a1 b1 + b2 a2 = a1 b3
  {
    CorpusInstance inst;
    inst.name = "triangular-pair";
    double a1 = 1, a2 = 2, b1 = 1, b2 = 2, b3 = 3;
    inst.t1 = CMat::Zero(2, 2);
    inst.t1(0, 1) = a1;
    inst.t1(1, 1) = a2;
    inst.t2 = CMat::Zero(2, 2);
    inst.t2(0, 0) = b1;
    inst.t2(0, 1) = b2;
    inst.t2(1, 1) = b3;
    QExistenceReport rep = find_q(inst.t1, inst.t2);
    CorpusClaim left{"left Q exists and certifies", true,
                     rep.feasible_left ? rep.residual_left : 1.0};
    CorpusClaim right{"right Q infeasible (a1 b1 + b2 a2 != a1 b3)", false,
                      0.0};
    if (!rep.feasible_right && rep.witness_right)
      right.value = detail::right_negative_bound(inst.t1, inst.t2,
                                                 *rep.witness_right);
    inst.claims = {left, right};
    out.push_back(inst);
  }

  // interleaved shifts: T1 acts on even vectors, T2 on odd ones; no
  // bounded Q works in any position for either order
  {
    CorpusInstance inst;
    inst.name = "interleaved-shifts";
    inst.t1 = detail::basis_action(trunc, [&](Index j, CVec& col) {
      Index k = j + 1;  // 1-based
      if (k % 2 == 0) {
        if (j < trunc) col(j) += 1.0 / 3.0;
        if (j + 1 < trunc) col(j + 1) += 1.0 / 3.0;
      }
    });
    inst.t2 = detail::basis_action(trunc, [&](Index j, CVec& col) {
      Index k = j + 1;
      if (k % 2 == 1 && j + 1 < trunc) col(j + 1) = 0.5;
    });
    CVec e1 = CVec::Unit(trunc, e(1));
    CVec e2 = CVec::Unit(trunc, e(2));
    CorpusClaim c1{"no left Q for (T1,T2): witness e1", false,
                   detail::left_negative_bound(inst.t1, inst.t2, e1)};
    CorpusClaim c2{"no middle Q for (T1,T2): witness e1", false,
                   detail::middle_negative_bound(inst.t1, inst.t2, e1)};
    CorpusClaim c3{"no right Q for (T1,T2): witness e1", false,
                   detail::right_negative_bound(inst.t1, inst.t2, e1)};
    CorpusClaim c4{"no left Q for (T2,T1): witness e2", false,
                   detail::left_negative_bound(inst.t2, inst.t1, e2)};
    CorpusClaim c5{"no middle Q for (T2,T1): witness e2", false,
                   detail::middle_negative_bound(inst.t2, inst.t1, e2)};
    CorpusClaim c6{"no right Q for (T2,T1): witness e2", false,
                   detail::right_negative_bound(inst.t2, inst.t1, e2)};
    inst.claims = {c1, c2, c3, c4, c5, c6};
    out.push_back(inst);
  }

  // parity-split pair where (T1,T2) is left-commuting and (T2,T1) is
  // middle- and right-commuting, with the dual positions impossible
  {
    CorpusInstance inst;
    inst.name = "parity-split";
    inst.t1 = detail::basis_action(trunc, [&](Index j, CVec& col) {
      Index k = j + 1;
      if (k % 2 == 1 && j + 1 < trunc) col(j + 1) = 1.0;  // odd: e_{j+1}
    });
    inst.t2 = detail::basis_action(trunc, [&](Index j, CVec& col) {
      Index k = j + 1;
      if (k % 2 == 0) {
        if (j + 2 < trunc) col(j + 2) = 0.5;
      } else {
        col(j) += 0.5;
        if (j + 1 < trunc) col(j + 1) += 0.5;
      }
    });
    CMat q = detail::basis_action(trunc, [&](Index j, CVec& col) {
      Index k = j + 1;
      if (k % 2 == 0) {
        if (j >= 2) col(j - 2) = 1.0;  // even: e_{j-2}, e_0 = 0
      } else if (j + 2 < trunc) {
        col(j + 2) = 1.0;
      }
    });
    CMat qprime = detail::basis_action(trunc, [&](Index j, CVec& col) {
      if (j + 2 < trunc) col(j + 2) = 1.0;
    });
    CorpusClaim p1{"T1 T2 = Q T2 T1 on guarded columns", true,
                   detail::guarded_residual(QPosition::Left, inst.t1, inst.t2,
                                            q, guard)};
    CorpusClaim p2{"T2 T1 = T1 T2 Q on guarded columns", true,
                   detail::guarded_residual(QPosition::Right, inst.t2,
                                            inst.t1, q, guard)};
    CorpusClaim p3{"T2 T1 = T1 Q' T2 on guarded columns", true,
                   detail::guarded_residual(QPosition::Middle, inst.t2,
                                            inst.t1, qprime, guard)};
    CVec e1 = CVec::Unit(trunc, e(1));
    CorpusClaim n1{"no right Q for (T1,T2): witness e1", false,
                   detail::right_negative_bound(inst.t1, inst.t2, e1)};
    CorpusClaim n2{"no middle Q for (T1,T2): witness e1", false,
                   detail::middle_negative_bound(inst.t1, inst.t2, e1)};
    inst.claims = {p1, p2, p3, n1, n2};
    out.push_back(inst);
  }

  // backward shift against a truncated shift: (T2,T1) commutes in all
  // three positions with suitable Q, (T1,T2) in none
  {
    CorpusInstance inst;
    inst.name = "backward-shift-pair";
    double a = 1.0, b = 1.0;
    inst.t1 = detail::basis_action(trunc, [&](Index j, CVec& col) {
      if (j >= 1) col(j - 1) = a;  // (x1,x2,...) -> (a x2, a x3, ...)
    });
    inst.t2 = detail::basis_action(trunc, [&](Index j, CVec& col) {
      if (j >= 2) col(j - 1) = b;  // (0, b x3, b x4, ...)
    });
    CMat q = detail::basis_action(trunc, [&](Index j, CVec& col) {
      if (j >= 1) col(j) = 1.0;  // kill the first coordinate
    });
    CMat q1 = detail::basis_action(trunc, [&](Index j, CVec& col) {
      if (j != 1) col(j) = 1.0;  // kill the second coordinate
    });
    CMat q2 = detail::basis_action(trunc, [&](Index j, CVec& col) {
      if (j != 2) col(j) = 1.0;  // kill the third coordinate
    });
    CorpusClaim p1{"T2 T1 = Q T1 T2 on guarded columns", true,
                   detail::guarded_residual(QPosition::Left, inst.t2, inst.t1,
                                            q, guard)};
    CorpusClaim p2{"T2 T1 = T1 Q1 T2 on guarded columns", true,
                   detail::guarded_residual(QPosition::Middle, inst.t2,
                                            inst.t1, q1, guard)};
    CorpusClaim p3{"T2 T1 = T1 T2 Q2 on guarded columns", true,
                   detail::guarded_residual(QPosition::Right, inst.t2,
                                            inst.t1, q2, guard)};
    CVec e3 = CVec::Unit(trunc, e(3));
    CorpusClaim n1{"no left Q for (T1,T2): witness e3", false,
                   detail::left_negative_bound(inst.t1, inst.t2, e3)};
    CorpusClaim n2{"no middle Q for (T1,T2): witness e3", false,
                   detail::middle_negative_bound(inst.t1, inst.t2, e3)};
    CorpusClaim n3{"no right Q for (T1,T2): witness e3", false,
                   detail::right_negative_bound(inst.t1, inst.t2, e3)};
    inst.claims = {p1, p2, p3, n1, n2, n3};
    out.push_back(inst);
  }

  return out;
}

}  // namespace dilatron

#endif  // DILATRON_QFINDER_HPP
