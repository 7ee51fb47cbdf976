#ifndef DILATRON_NUMKERNEL_HPP
#define DILATRON_NUMKERNEL_HPP

// Finite-dimensional complex matrix kernel: defect operators, Douglas
// factorizations and the block completion lemmas that every construction
// in this library is assembled from.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <optional>
#include <string>
#include <utility>

#include "dilatron/types.hpp"

namespace dilatron {

inline constexpr double kRankTol = 1e-10;     // relative singular value cutoff
inline constexpr double kEigClamp = 1e-12;    // negative eigenvalue clamp

inline CMat adjoint(const CMat& a) { return a.adjoint(); }

inline CMat identity(Index n) { return CMat::Identity(n, n); }

inline double spectral_norm(const CMat& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMat> svd(a);
  return svd.singularValues()(0);
}

inline double hermiticity_defect(const CMat& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  return (m - m.adjoint()).norm();
}

// Moore-Penrose pseudoinverse; singular values below rank_tol * sigma_max
// are treated as zero.
inline CMat pinv(const CMat& a, double rank_tol = kRankTol) {
  if (a.size() == 0) return CMat(a.cols(), a.rows());
  Eigen::JacobiSVD<CMat> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  double cut = s.size() > 0 ? rank_tol * s(0) : 0.0;
  CVec inv = CVec::Zero(s.size());
  for (Index i = 0; i < s.size(); ++i)
    if (s(i) > cut) inv(i) = Complex(1.0 / s(i), 0.0);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

// Orthonormal basis of the column space, rank decided at rank_tol.
inline CMat range_basis(const CMat& a, double rank_tol = kRankTol) {
  if (a.size() == 0 || a.norm() == 0.0) return CMat(a.rows(), 0);
  Eigen::JacobiSVD<CMat> svd(a, Eigen::ComputeFullU);
  const auto& s = svd.singularValues();
  double cut = rank_tol * s(0);
  Index r = 0;
  while (r < s.size() && s(r) > cut) ++r;
  return svd.matrixU().leftCols(r);
}

// Orthonormal basis of the orthogonal complement of the (orthonormal)
// columns of e inside C^n, taken in the index order produced by a full
// Householder QR.
inline CMat orthogonal_complement(const CMat& e, Index n) {
  if (e.cols() == 0) return identity(n);
  Eigen::HouseholderQR<CMat> qr(e);
  CMat q = qr.householderQ() * identity(n);
  return q.rightCols(n - e.cols());
}

// Projection onto the column space of a.
inline CMat range_projector(const CMat& a, double rank_tol = kRankTol) {
  CMat u = range_basis(a, rank_tol);
  return u * u.adjoint();
}

// Hermitian PSD square root via eigendecomposition. Eigenvalues in
// [-eig_clamp*scale, 0) are zeroed; anything more negative is rejected.
inline CMat psd_sqrt(const CMat& m, Tolerance tol = {}) {
  if (m.rows() != m.cols())
    throw DimensionMismatch("psd_sqrt: matrix must be square");
  if (m.size() == 0) return m;
  double scale = std::max(1.0, m.norm());
  if (hermiticity_defect(m) > tol.eff(m.rows(), scale))
    throw NotHermitian("psd_sqrt: input is not Hermitian within tolerance");
  CMat h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<CMat> es(h);
  Eigen::VectorXd ev = es.eigenvalues();
  double clamp = kEigClamp * scale * static_cast<double>(m.rows());
  Eigen::VectorXd root = Eigen::VectorXd::Zero(ev.size());
  for (Index i = 0; i < ev.size(); ++i) {
    if (ev(i) < -clamp)
      throw IndefiniteInput("psd_sqrt: eigenvalue " + std::to_string(ev(i)) +
                            " below clamp");
    root(i) = ev(i) > 0.0 ? std::sqrt(ev(i)) : 0.0;
  }
  return es.eigenvectors() * root.asDiagonal() *
         es.eigenvectors().adjoint().eval();
}

// T together with D_T = (I - T*T)^{1/2} and D_{T*} = (I - TT*)^{1/2}.
// Defect spaces are kept unreduced: D_T acts on a full copy of the domain.
struct DefectPair {
  CMat base;
  CMat defect;    // D_T on the domain
  CMat codefect;  // D_{T*} on the codomain
};

inline DefectPair defect_pair(const CMat& t, bool require_contraction = true,
                              Tolerance tol = {}) {
  double nrm = spectral_norm(t);
  if (require_contraction && nrm > 1.0 + tol.eff(std::max(t.rows(), t.cols())))
    throw NotAContraction("defect_pair: spectral norm " + std::to_string(nrm) +
                          " exceeds 1");
  DefectPair d;
  d.base = t;
  d.defect = psd_sqrt(identity(t.cols()) - t.adjoint() * t, tol);
  d.codefect = psd_sqrt(identity(t.rows()) - t * t.adjoint(), tol);
  return d;
}

inline CMat defect(const CMat& t, Tolerance tol = {}) {
  return psd_sqrt(identity(t.cols()) - t.adjoint() * t, tol);
}

inline CMat codefect(const CMat& t, Tolerance tol = {}) {
  return psd_sqrt(identity(t.rows()) - t * t.adjoint(), tol);
}

// Hermitian square root with all negative eigenvalues zeroed, no rejection.
// For ladder internals, where a completed block may exceed norm one by a
// few ulps of accumulated solver noise.
inline CMat psd_sqrt_clamped(const CMat& m) {
  CMat h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<CMat> es(h);
  Eigen::VectorXd ev = es.eigenvalues();
  Eigen::VectorXd root = Eigen::VectorXd::Zero(ev.size());
  for (Index i = 0; i < ev.size(); ++i)
    root(i) = ev(i) > 0.0 ? std::sqrt(ev(i)) : 0.0;
  return es.eigenvectors() * root.asDiagonal() *
         es.eigenvectors().adjoint().eval();
}

inline CMat defect_clamped(const CMat& t) {
  return psd_sqrt_clamped(identity(t.cols()) - t.adjoint() * t);
}

inline CMat codefect_clamped(const CMat& t) {
  return psd_sqrt_clamped(identity(t.rows()) - t * t.adjoint());
}

// Douglas factorization: a contraction Z with A = BZ exists iff
// AA* <= BB*. The solution below is pinv(B)*A, which vanishes on the
// orthogonal complement of range(B*).
struct DouglasResult {
  bool feasible = false;
  CMat z;                 // valid when feasible
  double witness = 0.0;   // most negative eigenvalue of BB* - AA*
  double residual = 0.0;  // ||A - BZ||
};

inline DouglasResult douglas_solve(const CMat& a, const CMat& b,
                                   Tolerance tol = {}) {
  if (a.rows() != b.rows())
    throw DimensionMismatch("douglas_solve: A and B must share a codomain");
  DouglasResult r;
  CMat gap = b * b.adjoint() - a * a.adjoint();
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (gap + gap.adjoint()));
  r.witness = es.eigenvalues().size() > 0 ? es.eigenvalues().minCoeff() : 0.0;
  double scale = std::max({1.0, a.norm(), b.norm()});
  r.z = pinv(b) * a;
  r.residual = (a - b * r.z).norm();
  r.feasible = r.witness >= -tol.eff(a.rows(), scale * scale) &&
               r.residual <= tol.eff(a.rows(), scale);
  return r;
}

// Lenient variant for ladder-internal use: always returns the least-squares
// solution and records the feasibility margin. When AA* <= BB* holds, every
// row of U* A is bounded by the matching singular value of B, so the
// amplified rows produced by near-cutoff singular values are clamped back
// to that bound; this keeps ||Z|| <= 1 at boundary-feasible data.
inline CMat douglas_least_squares(const CMat& a, const CMat& b,
                                  double* margin = nullptr) {
  if (margin) {
    CMat gap = b * b.adjoint() - a * a.adjoint();
    Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (gap + gap.adjoint()));
    *margin = es.eigenvalues().size() > 0 ? es.eigenvalues().minCoeff() : 0.0;
  }
  if (b.size() == 0 || a.size() == 0) return CMat::Zero(b.cols(), a.cols());
  Eigen::JacobiSVD<CMat> svd(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  double cut = s.size() > 0 ? kRankTol * s(0) : 0.0;
  CMat rows = svd.matrixU().adjoint() * a;
  for (Index i = 0; i < s.size(); ++i) {
    if (s(i) <= cut) {
      rows.row(i).setZero();
      continue;
    }
    rows.row(i) /= s(i);
    double rn = rows.row(i).norm();
    if (rn > 1.0) rows.row(i) /= rn;
  }
  return svd.matrixV() * rows;
}

// Two-term Douglas: Z1, Z2 with A1 Z1 + A2 Z2 = A0 and Z1*Z1 + Z2*Z2 <= I,
// feasible iff A1 A1* + A2 A2* >= A0 A0*. Solved by stacking B = [A1 A2].
struct DouglasPairResult {
  bool feasible = false;
  CMat z1, z2;
  double witness = 0.0;
  double residual = 0.0;
};

inline DouglasPairResult douglas_solve_pair(const CMat& a0, const CMat& a1,
                                            const CMat& a2,
                                            Tolerance tol = {}) {
  if (a0.rows() != a1.rows() || a0.rows() != a2.rows())
    throw DimensionMismatch("douglas_solve_pair: shared codomain required");
  CMat b(a1.rows(), a1.cols() + a2.cols());
  b << a1, a2;
  DouglasResult inner = douglas_solve(a0, b, tol);
  DouglasPairResult r;
  r.feasible = inner.feasible;
  r.witness = inner.witness;
  r.residual = inner.residual;
  if (inner.z.size() > 0) {
    r.z1 = inner.z.topRows(a1.cols());
    r.z2 = inner.z.bottomRows(a2.cols());
  }
  return r;
}

inline std::pair<CMat, CMat> douglas_pair_least_squares(const CMat& a0,
                                                        const CMat& a1,
                                                        const CMat& a2,
                                                        double* margin =
                                                            nullptr) {
  CMat b(a1.rows(), a1.cols() + a2.cols());
  b << a1, a2;
  CMat z = douglas_least_squares(a0, b, margin);
  return {z.topRows(a1.cols()), z.bottomRows(a2.cols())};
}

// A completed block together with the free contraction parameter used and
// the norm the completion achieves.
struct CompletionResult {
  CMat completed;
  CMat parameter;
  double achieved_norm = 0.0;
};

// Triangular completion: [[T1, X], [0, T2]] is a contraction iff
// X = D_{T1*} C D_{T2} for a contraction C. Decides by two nested Douglas
// steps and returns C plus the assembled block matrix.
inline std::optional<CompletionResult> triangular_complete(const CMat& t1,
                                                           const CMat& t2,
                                                           const CMat& x,
                                                           Tolerance tol = {}) {
  if (x.rows() != t1.rows() || x.cols() != t2.cols())
    throw DimensionMismatch("triangular_complete: X must map dom(T2)->cod(T1)");
  CMat d1s = codefect(t1, tol);
  CMat d2 = defect(t2, tol);
  DouglasResult step1 = douglas_solve(x, d1s, tol);  // X = D_{T1*} K
  if (!step1.feasible) return std::nullopt;
  DouglasResult step2 = douglas_solve(step1.z.adjoint(), d2, tol);  // K = C D_{T2}
  if (!step2.feasible) return std::nullopt;
  CompletionResult res;
  res.parameter = step2.z.adjoint();
  CMat block(t1.rows() + t2.rows(), t1.cols() + t2.cols());
  block.setZero();
  block.topLeftCorner(t1.rows(), t1.cols()) = t1;
  block.topRightCorner(x.rows(), x.cols()) = x;
  block.bottomRightCorner(t2.rows(), t2.cols()) = t2;
  res.completed = block;
  res.achieved_norm = spectral_norm(block);
  return res;
}

// Parameter extraction for a given contractive triangle [[T1, X], [0, T2]].
inline CMat triangular_parameter(const CMat& t1, const CMat& t2, const CMat& x,
                                 Tolerance tol = {}) {
  auto res = triangular_complete(t1, t2, x, tol);
  if (!res)
    throw InfeasibleError("triangular_parameter: no contractive C exists", 0.0);
  return res->parameter;
}

// Dual Parrott completion (Sebestyen). Data: X : H -> K' and X' : H' -> K
// given through orthonormal embeddings embed_h (K x h) and embed_hp
// (K' x h'). Returns Y : K -> K' with Y|_H = X, Y*|_{H'} = X' and
// ||Y|| <= max(||X||, ||X'||). The unknown corner is the classical
// -Z A* W completion over the fixed row and column.
inline CompletionResult dual_parrott_complete(const CMat& x, const CMat& xprime,
                                              const CMat& embed_h,
                                              const CMat& embed_hp,
                                              Tolerance tol = {}) {
  const Index k = embed_h.rows();    // dim K
  const Index kp = embed_hp.rows();  // dim K'
  if (x.rows() != kp || x.cols() != embed_h.cols())
    throw DimensionMismatch("dual_parrott_complete: X must map H -> K'");
  if (xprime.rows() != k || xprime.cols() != embed_hp.cols())
    throw DimensionMismatch("dual_parrott_complete: X' must map H' -> K");

  // Compatibility <Xh, h'> = <h, X'h'> for all basis pairs.
  CMat lhs = embed_hp.adjoint() * x;            // h' x h
  CMat rhs = (xprime.adjoint() * embed_h);      // h' x h
  double scale = std::max({1.0, x.norm(), xprime.norm()});
  double mismatch = (lhs - rhs).cwiseAbs().maxCoeff();
  if (lhs.size() > 0 && mismatch > tol.eff(k, scale))
    throw IncompatibleData("dual_parrott_complete: inner products disagree by " +
                           std::to_string(mismatch));

  CMat eh_c = orthogonal_complement(embed_h, k);
  CMat ehp_c = orthogonal_complement(embed_hp, kp);

  CMat a = embed_hp.adjoint() * x;        // H  -> H'
  CMat bblk = xprime.adjoint() * eh_c;    // H^perp -> H'
  CMat c = ehp_c.adjoint() * x;           // H  -> H'^perp

  double mu = std::max(spectral_norm(x), spectral_norm(xprime));
  CMat corner(ehp_c.cols(), eh_c.cols());
  corner.setZero();
  CMat parameter = corner;
  if (mu > 0.0) {
    CMat ah = a / mu, bh = bblk / mu, ch = c / mu;
    CMat da_star = codefect(ah, tol);
    CMat da = defect(ah, tol);
    double m1 = 0.0, m2 = 0.0;
    CMat w = douglas_least_squares(bh, da_star, &m1);   // B = D_{A*} W
    CMat zt = douglas_least_squares(ch.adjoint(), da, &m2);  // C* = D_A Z*
    corner = -mu * (zt.adjoint() * ah.adjoint() * w);
    parameter = w;
  }

  CompletionResult res;
  CMat y_blocks(kp, k);
  // Y = EHp * [A B] + EHpc * [C D] in the (EH, EHc) input coordinates.
  CMat top(embed_hp.cols(), k), bottom(ehp_c.cols(), k);
  top << a, bblk;
  bottom << c, corner;
  CMat in_basis(k, k);
  in_basis << embed_h, eh_c;
  y_blocks = (embed_hp * top + ehp_c * bottom) * in_basis.adjoint();
  res.completed = y_blocks;
  res.parameter = parameter;
  res.achieved_norm = spectral_norm(y_blocks);
  return res;
}

// Extend a linear isometry between graph subspaces to a unitary: given
// P, R : H -> B with P*P = R*R, produce unitary G on B with G P = R.
// Range bases are matched through the shared right singular system;
// complement bases are paired in index order.
inline CMat unitary_complete(const CMat& p, const CMat& r, Tolerance tol = {}) {
  if (p.rows() != r.rows() || p.cols() != r.cols())
    throw DimensionMismatch("unitary_complete: P and R must be same shape");
  const Index n = p.rows();
  double scale = std::max({1.0, p.norm(), r.norm()});
  double defect_norm = (p.adjoint() * p - r.adjoint() * r).norm();
  if (defect_norm > tol.eff(n, scale * scale))
    throw GeneratorMismatch("unitary_complete: ||P*P - R*R|| = " +
                            std::to_string(defect_norm));
  if (p.norm() == 0.0) return identity(n);

  Eigen::JacobiSVD<CMat> svd(p, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  double cut = kRankTol * s(0);
  Index rank = 0;
  while (rank < s.size() && s(rank) > cut) ++rank;

  CMat up = svd.matrixU().leftCols(rank);
  CMat vr = svd.matrixV().leftCols(rank);
  CVec sinv(rank);
  for (Index i = 0; i < rank; ++i) sinv(i) = Complex(1.0 / s(i), 0.0);
  CMat ur = r * vr * sinv.asDiagonal();  // orthonormal since P*P = R*R

  CMat up_c = orthogonal_complement(up, n);
  CMat ur_c = orthogonal_complement(ur, n);
  CMat left(n, n), right(n, n);
  left << ur, ur_c;
  right << up, up_c;
  return left * right.adjoint();
}

}  // namespace dilatron

#endif  // DILATRON_NUMKERNEL_HPP
