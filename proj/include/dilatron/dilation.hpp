#ifndef DILATRON_DILATION_HPP
#define DILATRON_DILATION_HPP

// Ando-type dilations of Q-commuting pairs.
//
// Case II builds everything in closed form on (+) H: band isometries
// W1, W2, W, the defect-space generators L1, L2, the unitary G matching
// them, and the block unitary G~ acting on groups of four blocks. Case I
// follows the two-stage route: a norm preserving Q-commutant lift of T1 on
// the joint lift space K', its Schaffer tower, and a second lift of V2'
// against that tower. The strict constructions assemble the diagonal
// D^{-1} (.) D repetition blocks directly.

#include <optional>
#include <string>

#include "dilatron/liftops.hpp"

namespace dilatron {

struct DilationResult {
  DirectSumSpace space;
  CMat v1;
  CMat v2;
  CMat qbar;
  std::optional<CMat> aux;  // V_{2Q} or V_{1Q} in Case II
  CertificateMap certs;
};

namespace detail {

// (h0, h1, h2, ...) -> (hd h0, dd h0, 0, h1, h2, ...) on `blocks` blocks.
inline CMat band2_matrix(const CMat& hd, const CMat& dd, Index blocks) {
  const Index d = hd.rows();
  CMat m = CMat::Zero(blocks * d, blocks * d);
  m.topLeftCorner(d, d) = hd;
  if (blocks > 1) m.block(d, 0, d, d) = dd;
  for (Index j = 1; j + 2 < blocks; ++j)
    m.block((j + 2) * d, j * d, d, d) = identity(d);
  return m;
}

// (h0, h1, h2, ...) -> (hd h0, h1, 0, h2, h3, ...)
inline CMat band_keep1_matrix(const CMat& hd, Index blocks) {
  const Index d = hd.rows();
  CMat m = CMat::Zero(blocks * d, blocks * d);
  m.topLeftCorner(d, d) = hd;
  if (blocks > 1) m.block(d, d, d, d) = identity(d);
  for (Index j = 2; j + 1 < blocks; ++j)
    m.block((j + 1) * d, j * d, d, d) = identity(d);
  return m;
}

// (h0, h1, ...) -> (hd h0, dd h0, h1, h2, ...), the tower shape.
inline CMat tower_like_matrix(const CMat& hd, const CMat& dd, Index blocks) {
  const Index d = hd.rows();
  CMat m = CMat::Zero(blocks * d, blocks * d);
  m.topLeftCorner(d, d) = hd;
  if (blocks > 1) m.block(d, 0, d, d) = dd;
  for (Index j = 1; j + 1 < blocks; ++j)
    m.block((j + 1) * d, j * d, d, d) = identity(d);
  return m;
}

// generator column [a; 0; b; 0] : H -> B = H^4
inline CMat generator_column(const CMat& a, const CMat& b) {
  const Index d = a.cols();
  CMat g = CMat::Zero(4 * a.rows(), d);
  g.topRows(a.rows()) = a;
  g.middleRows(2 * a.rows(), a.rows()) = b;
  return g;
}

// G~ = diag(I_H, G, G, ...) over H (+) B (+) B (+) ...
inline CMat gtilde_matrix(const CMat& g, Index d, Index groups) {
  const Index n = d + groups * 4 * d;
  CMat m = CMat::Zero(n, n);
  m.topLeftCorner(d, d) = identity(d);
  for (Index k = 0; k < groups; ++k)
    m.block(d + 4 * d * k, d + 4 * d * k, 4 * d, 4 * d) = g;
  return m;
}

inline double lift_defect(const CMat& big, const CMat& iota, const CMat& small) {
  return (big.adjoint() * iota - iota * small.adjoint()).norm();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Ando-type dilation, Case II: Q need not be a contraction, only the
// positioned composite must be one. `groups` counts the groups of four
// blocks after the head, so the space carries 1 + 4*groups blocks.
// ---------------------------------------------------------------------------
inline DilationResult ando_q_case2(const CMat& t1, const CMat& t2,
                                   const CMat& q, QPosition position,
                                   Index groups, Tolerance tol = {}) {
  const Index d = t1.rows();
  double scale = std::max({1.0, q.norm()});
  if (spectral_norm(t1) > 1.0 + tol.eff(d) ||
      spectral_norm(t2) > 1.0 + tol.eff(d))
    throw NotAContraction("ando_q_case2: T1, T2 must be contractions");
  CMat composite;
  double rel = 0.0;
  switch (position) {
    case QPosition::Left:
      composite = q * t2;
      rel = (t1 * t2 - q * t2 * t1).norm();
      break;
    case QPosition::Middle:
      composite = q * t1;
      rel = (t1 * t2 - t2 * q * t1).norm();
      break;
    case QPosition::Right:
      composite = t1 * q;
      rel = (t1 * t2 - t2 * t1 * q).norm();
      break;
  }
  if (spectral_norm(composite) > 1.0 + tol.eff(d, scale))
    throw CompositeNotContraction("ando_q_case2: positioned composite "
                                  "exceeds norm one");
  if (rel > tol.eff(d, scale))
    throw HypothesisViolated("ando_q_case2: Q-relation fails, residual " +
                             std::to_string(rel));

  const Index blocks = 1 + 4 * groups;
  DilationResult res;
  res.space = DirectSumSpace::uniform("H", d, "H", d, blocks - 1);

  CMat d1 = defect(t1, tol), d2 = defect(t2, tol);
  CMat dc = defect(composite, tol);
  CMat w1 = detail::band2_matrix(t1, d1, blocks);
  CMat w2 = detail::band2_matrix(t2, d2, blocks);

  CMat w, qbar, p, r;
  switch (position) {
    case QPosition::Left:
      w = detail::band2_matrix(t2, dc, blocks);       // D_{QT2} feeds
      qbar = qbar_direct_sum(res.space, q);           // Q (+) I
      p = detail::generator_column(CMat(d1 * t2), d2);
      r = detail::generator_column(CMat(dc * t1), d1);
      break;
    case QPosition::Middle:
      w = detail::band2_matrix(t1, dc, blocks);       // D_{QT1} feeds
      qbar = qbar_direct_sum(res.space, q);
      p = detail::generator_column(CMat(d2 * q * t1), dc);
      r = detail::generator_column(CMat(d1 * t2), d2);
      break;
    case QPosition::Right:
      w = detail::band_keep1_matrix(t1, blocks);
      qbar = detail::tower_like_matrix(q, dc, blocks);  // Qbar h = (Qh, D_{T1Q}h, ...)
      p = detail::generator_column(CMat(d1 * t2), d2);
      r = detail::generator_column(CMat(d2 * t1 * q), dc);
      break;
  }

  double gen_defect = (p.adjoint() * p - r.adjoint() * r).norm();
  CMat g;
  try {
    g = unitary_complete(p, r, tol);
  } catch (const GeneratorMismatch&) {
    throw GeneratorMismatch(
        "ando_q_case2: ||Ph|| = ||Rh|| fails (Q-relation violated), defect " +
        std::to_string(gen_defect));
  }
  CMat gt = detail::gtilde_matrix(g, d, groups);
  CMat gti = gt.adjoint();  // G~ unitary

  switch (position) {
    case QPosition::Left:
      res.v1 = gt * w1;
      res.v2 = w2 * gti;
      res.aux = w * gti;  // V_{2Q}
      break;
    case QPosition::Middle:
      res.v1 = w1 * gti;
      res.v2 = gt * w2;
      res.aux = w * gti;  // V_{1Q}
      break;
    case QPosition::Right:
      res.v1 = gt * w1;
      res.v2 = w2 * gti;
      res.aux = gt * w;   // V_{1Q}
      break;
  }
  res.qbar = qbar;

  // certificates, evaluated on the exact leading blocks; operators with
  // G~^{-1} on the input side carry their truncation defect across the
  // whole last group of four, so the window stops one full group early
  Index exact4 = res.space.leading_dim(std::max<Index>(1, blocks - 4));
  CMat iota = embed_matrix(res.space);
  res.certs["generator_identity"] = gen_defect;
  res.certs["gtilde_unitary"] = (gt.adjoint() * gt - identity(gt.rows())).norm();
  res.certs["isometry_v1"] = isometry_defect_on(res.v1, exact4);
  res.certs["isometry_v2"] = isometry_defect_on(res.v2, exact4);
  res.certs["lift_v1"] = detail::lift_defect(res.v1, iota, t1);
  res.certs["lift_v2"] = detail::lift_defect(res.v2, iota, t2);
  CMat lhs = res.v1 * res.v2;
  CMat rhs, qaux;
  switch (position) {
    case QPosition::Left:
      qaux = qbar * *res.aux;
      rhs = qaux * res.v1;
      res.certs["lift_qbar"] = detail::lift_defect(qbar, iota, q);
      break;
    case QPosition::Middle:
      qaux = qbar * *res.aux;
      rhs = res.v2 * qaux;
      res.certs["lift_qbar"] = detail::lift_defect(qbar, iota, q);
      break;
    case QPosition::Right:
      qaux = *res.aux * qbar;
      rhs = res.v2 * qaux;
      res.certs["lift_qbar"] = detail::lift_defect(qbar, iota, q);
      break;
  }
  res.certs["isometry_qbar_or_aux"] = isometry_defect_on(qaux, exact4);
  res.certs["lift_aux_composite"] = detail::lift_defect(qaux, iota, composite);
  Index exact_rel = res.space.leading_dim(std::max<Index>(1, blocks - 8));
  res.certs["q_relation"] = (lhs - rhs).leftCols(exact_rel).norm();
  return res;
}

// Ando dilation of an intertwining triple T1 X = X T2: isometric lifts
// V1, V2, V with V1 V = V V2, by the same group-of-four machinery.
inline DilationResult ando_intertwine(const CMat& t1, const CMat& t2,
                                      const CMat& x, Index groups,
                                      Tolerance tol = {}) {
  const Index d = t1.rows();
  if (spectral_norm(t1) > 1.0 + tol.eff(d) ||
      spectral_norm(t2) > 1.0 + tol.eff(d) ||
      spectral_norm(x) > 1.0 + tol.eff(d))
    throw NotAContraction("ando_intertwine: contractions required");
  double rel = (t1 * x - x * t2).norm();
  if (rel > tol.eff(d, std::max(1.0, x.norm())))
    throw HypothesisViolated("ando_intertwine: T1 X = X T2 fails, residual " +
                             std::to_string(rel));

  const Index blocks = 1 + 4 * groups;
  DilationResult res;
  res.space = DirectSumSpace::uniform("H", d, "H", d, blocks - 1);
  CMat d1 = defect(t1, tol), d2 = defect(t2, tol), dx = defect(x, tol);
  CMat w1 = detail::band2_matrix(t1, d1, blocks);
  CMat w2 = detail::band2_matrix(t2, d2, blocks);
  CMat w = detail::band2_matrix(x, dx, blocks);
  CMat p = detail::generator_column(CMat(dx * t2), d2);
  CMat r = detail::generator_column(CMat(d1 * x), dx);
  double gen_defect = (p.adjoint() * p - r.adjoint() * r).norm();
  CMat g;
  try {
    g = unitary_complete(p, r, tol);
  } catch (const GeneratorMismatch&) {
    throw GeneratorMismatch("ando_intertwine: generator identity fails "
                            "(intertwining violated), defect " +
                            std::to_string(gen_defect));
  }
  CMat gt = detail::gtilde_matrix(g, d, groups);
  CMat gti = gt.adjoint();

  res.v1 = w1 * gti;
  res.v2 = w2 * gti;
  CMat v = gt * w;
  res.qbar = v;  // the lift of X plays the qbar slot
  res.aux = v;

  Index exact4 = res.space.leading_dim(std::max<Index>(1, blocks - 4));
  Index exact_rel = res.space.leading_dim(std::max<Index>(1, blocks - 8));
  CMat iota = embed_matrix(res.space);
  res.certs["generator_identity"] = gen_defect;
  res.certs["gtilde_unitary"] = (gt.adjoint() * gt - identity(gt.rows())).norm();
  res.certs["isometry_v1"] = isometry_defect_on(res.v1, exact4);
  res.certs["isometry_v2"] = isometry_defect_on(res.v2, exact4);
  res.certs["isometry_qbar_or_aux"] = isometry_defect_on(v, exact4);
  res.certs["lift_v1"] = detail::lift_defect(res.v1, iota, t1);
  res.certs["lift_v2"] = detail::lift_defect(res.v2, iota, t2);
  res.certs["lift_qbar"] = detail::lift_defect(v, iota, x);
  res.certs["q_relation"] = (res.v1 * v - v * res.v2).leftCols(exact_rel).norm();
  return res;
}

// ---------------------------------------------------------------------------
// Ando-type dilation, Case I: Q itself is lifted isometrically. The joint
// lift space K' carries tower lifts of Q and T2; T1 receives a norm
// preserving Q-commutant lift Y1 there; V1 is the tower of Y1; V2 lifts V2'
// through a second intertwining ladder. For unitary Q the lift of Q is
// Q (+) I exactly.
// ---------------------------------------------------------------------------
struct AndoCase1Options {
  Index inner_levels = 14;  // levels of the joint lift space K'
  Index outer_levels = 3;   // tower levels of K over K'
  Complex unimodular = Complex(1.0, 0.0);
};

inline DilationResult ando_q_case1(const CMat& t1, const CMat& t2,
                                   const CMat& q, QPosition position,
                                   AndoCase1Options opt = {},
                                   Tolerance tol = {}) {
  if (position == QPosition::Right)
    throw HypothesisViolated(
        "ando_q_case1: the right position needs a strict factor; use "
        "strict_q_diag_construction");
  const Index d = t1.rows();
  double scale = std::max(1.0, q.norm());
  if (spectral_norm(t1) > 1.0 + tol.eff(d) ||
      spectral_norm(t2) > 1.0 + tol.eff(d) ||
      spectral_norm(q) > 1.0 + tol.eff(d, scale))
    throw NotAContraction("ando_q_case1: contractions required");
  bool left = position == QPosition::Left;
  double rel = left ? (t1 * t2 - q * t2 * t1).norm()
                    : (t1 * t2 - t2 * q * t1).norm();
  if (rel > tol.eff(d, scale))
    throw HypothesisViolated("ando_q_case1: Q-relation fails, residual " +
                             std::to_string(rel));
  bool q_unitary = (q.adjoint() * q - identity(d)).norm() <= tol.eff(d) &&
                   (q * q.adjoint() - identity(d)).norm() <= tol.eff(d);

  // Stage 1: joint lifts on K'
  DirectSumSpace kp = tower_space(d, opt.inner_levels);
  CMat v2p = tower_matrix_on(kp, t2, tol);
  CMat qbar0 = q_unitary ? qbar_direct_sum(kp, q, opt.unimodular)
                         : tower_matrix_on(kp, q, tol);

  // Stage 2: norm preserving lift Y1 of T1 with Y1 V2' = rel(Qbar0, V2') Y1
  CMat w = left ? CMat(qbar0 * v2p) : CMat(v2p * qbar0);
  LevelStructure sw = orbit_levels(w, embed_matrix(kp), opt.inner_levels);
  LevelStructure sv = tower_levels(v2p, kp, opt.inner_levels);
  LadderResult lad1 = intertwine_ladder(sw, sv, t1);
  CMat y1 = lad1.y;

  // Stage 3: Schaffer tower of Y1
  DirectSumSpace kspace =
      DirectSumSpace::uniform("Kprime", kp.total_dim(), "D_Y1",
                              kp.total_dim(), opt.outer_levels);
  CMat v1 = tower_matrix_on(kspace, y1, tol);
  CMat qbar = qbar_direct_sum(kspace, qbar0);

  // Stage 4: lift V2' against the tower of Y1
  LevelStructure s_v1 = tower_levels(v1, kspace, opt.outer_levels);
  CMat v2;
  if (left && q_unitary) {
    // (Qbar* V1) V2 = V2 V1, then multiply back by the unitary Qbar
    CMat qv1 = qbar.adjoint() * v1;
    LevelStructure s_l = orbit_levels(qv1, embed_matrix(kspace),
                                      opt.outer_levels);
    LadderResult lad2 = intertwine_ladder(s_l, s_v1, v2p);
    v2 = lad2.y;
  } else if (left) {
    // contractive Q: the inductive ladder for V1 X~ = Qbar X~ V1 on the
    // adjoint side, run without the exact co-isometry hypothesis; the
    // truncation tail violates it, which only pollutes the tail window
    const Index kd = kp.total_dim();
    CMat zfull = v1.adjoint();
    CMat dtstar = opt.outer_levels > 0 ? CMat(v1.block(kd, 0, kd, kd))
                                       : CMat(identity(kd));
    CMat xcur = v2p.adjoint();
    CMat qhat = qbar0.adjoint();
    for (Index lvl = 1; lvl <= opt.outer_levels; ++lvl) {
      CMat zprev = zfull.topLeftCorner(lvl * kd, lvl * kd);
      CMat feed = detail::tower_feeder(dtstar, lvl);
      CMat qprev = identity(lvl * kd);
      qprev.topLeftCorner(kd, kd) = qhat;
      PartialIsoStep st =
          partial_iso_step_impl(zprev, xcur, CMat(xcur * qprev), feed);
      CMat next = CMat::Zero((lvl + 1) * kd, (lvl + 1) * kd);
      next.topLeftCorner(lvl * kd, lvl * kd) = xcur;
      next.topRightCorner(lvl * kd, kd) = st.c;
      next.bottomRightCorner(kd, kd) = st.w;
      xcur = std::move(next);
    }
    v2 = xcur.adjoint();
  } else {
    // V1 V2 = V2 (Qbar V1)
    CMat qv1 = qbar * v1;
    LevelStructure s_r = orbit_levels(qv1, embed_matrix(kspace),
                                      opt.outer_levels);
    LadderResult lad2 = intertwine_ladder(s_v1, s_r, v2p);
    v2 = lad2.y;
  }

  DilationResult res;
  res.space = kspace;
  res.v1 = v1;
  res.v2 = v2;
  res.qbar = qbar;

  // embeddings: H sits at the head of K', K' at the head of K
  CMat iota_kp = embed_matrix(kp);                    // H -> K'
  CMat iota_k = embed_matrix(kspace) * iota_kp;       // H -> K
  // with a tower-lifted contraction Q the stage-1 intertwiner doubles
  // block depth, so the certified window follows the ladder
  Index valid_blocks =
      q_unitary ? kp.block_count() - 2
                : std::max<Index>(1, std::min(kp.block_count() - 2,
                                              lad1.levels_run - 1));
  Index interior_kp = kp.leading_dim(valid_blocks);
  // test window: K'-interior embedded in the head block of K
  CMat win = CMat::Zero(kspace.total_dim(), interior_kp);
  win.topRows(interior_kp) = identity(interior_kp);

  res.certs["lift_v1"] = detail::lift_defect(v1, iota_k, t1);
  res.certs["lift_v2"] = detail::lift_defect(v2, iota_k, t2);
  res.certs["lift_qbar"] = detail::lift_defect(qbar, iota_k, q);
  res.certs["isometry_v1"] =
      isometry_defect_on(v1, kspace.leading_dim(kspace.block_count() - 1));
  // V2 is isometric on the orbit of the interior of K' under V1
  {
    LevelStructure orb = orbit_levels(v1, win, 2);
    CMat b = orb.basis;
    res.certs["isometry_v2"] = ((v2 * b).adjoint() * (v2 * b) -
                                identity(b.cols()))
                                   .norm();
  }
  res.certs["isometry_qbar_or_aux"] = isometry_defect_on(
      qbar, kspace.leading_dim(kspace.block_count() - 1));
  CMat lhs = v1 * v2;
  CMat rhs = left ? CMat(qbar * v2 * v1) : CMat(v2 * qbar * v1);
  res.certs["q_relation"] = ((lhs - rhs) * win).norm();
  res.certs["stage1_relation"] =
      ((w * y1 - y1 * v2p).leftCols(interior_kp)).norm();
  res.certs["norm_y1"] = std::abs(spectral_norm(y1) - spectral_norm(t1));
  return res;
}

// ---------------------------------------------------------------------------
// Strict-contraction diagonal constructions. Left: co-isometric extensions
// Z1 (pure), Z2 = diag(Z2', D^{-1} Qbar0 Z2' D, ...) with Z1 Z2 = Qbar Z2 Z1,
// requiring ||T1|| < 1. Right: the isometric dual with ||T2|| < 1 and
// V1 V2 = V2 V1 Qbar.
// ---------------------------------------------------------------------------
struct StrictDiagResult {
  DirectSumSpace space;
  CMat z1;  // pure (co-)isometry
  CMat z2;
  CMat qbar;
  CertificateMap certs;
};

inline StrictDiagResult strict_q_diag_construction(
    const CMat& t1, const CMat& t2, const CMat& q, QPosition position,
    Index outer_levels, Index inner_levels, Tolerance tol = {},
    double strict_margin = kStrictMargin) {
  const Index d = t1.rows();
  if (position == QPosition::Right) {
    // T1 T2 = T2 T1 Q with ||T2|| < 1: adjoint of the left construction
    StrictDiagResult dual = strict_q_diag_construction(
        CMat(t2.adjoint()), CMat(t1.adjoint()), CMat(q.adjoint()),
        QPosition::Left, outer_levels, inner_levels, tol, strict_margin);
    StrictDiagResult res;
    res.space = dual.space;
    res.z1 = dual.z2.adjoint();  // isometric lift of t1
    res.z2 = dual.z1.adjoint();  // pure isometric lift of t2
    res.qbar = dual.qbar.adjoint();
    res.certs = dual.certs;
    return res;
  }
  if (position != QPosition::Left)
    throw HypothesisViolated(
        "strict_q_diag_construction: positions Left and Right only");

  double n1 = spectral_norm(t1);
  if (n1 >= 1.0 - strict_margin)
    throw NotStrict("strict_q_diag_construction: ||T1|| = " +
                    std::to_string(n1) + " is not strictly below 1");
  if (spectral_norm(t2) > 1.0 + tol.eff(d) ||
      spectral_norm(q) > 1.0 + tol.eff(d))
    throw NotAContraction("strict_q_diag_construction: contractions required");
  double rel = (t1 * t2 - q * t2 * t1).norm();
  if (rel > tol.eff(d, std::max(1.0, q.norm())))
    throw HypothesisViolated("strict_q_diag_construction: relation fails");
  Index tail_margin = strict_tail_margin(n1);
  inner_levels = std::max(inner_levels, tail_margin + 4);

  // co-isometric extensions of T2 and Q on K', via isometric towers of the
  // adjoints. A co-isometric Q extends as Q (+) I, which keeps the
  // intertwiner band-limited; a general contraction needs the shift tower,
  // under which the intertwiner doubles block depth and the certified
  // window shrinks with it.
  DirectSumSpace kp = tower_space(d, inner_levels);
  CMat v2hat = tower_matrix_on(kp, CMat(t2.adjoint()), tol);
  bool q_coiso = (q * q.adjoint() - identity(d)).norm() <= tol.eff(d);
  CMat qhat = q_coiso ? qbar_direct_sum(kp, CMat(q.adjoint()))
                      : tower_matrix_on(kp, CMat(q.adjoint()), tol);
  CMat z2p = v2hat.adjoint();
  CMat qbar0 = qhat.adjoint();

  // extension Y1 of T1 with Y1 Z2' = Qbar0 Z2' Y1: ladder on the adjoints,
  // V Yhat = Yhat (V Qbar-hat) with V = tower(t2*)
  LevelStructure sv = tower_levels(v2hat, kp, inner_levels);
  CMat vq = v2hat * qhat;
  LevelStructure sr = orbit_levels(vq, embed_matrix(kp), inner_levels);
  LadderResult lad = intertwine_ladder(sv, sr, CMat(t1.adjoint()));
  CMat y1 = lad.y.adjoint();
  Index valid_blocks = std::min<Index>(
      kp.block_count() - tail_margin,
      q_coiso ? lad.levels_run : lad.levels_run - 1);

  double ny1 = spectral_norm(y1);
  CMat dy1star = codefect_clamped(y1);
  Eigen::SelfAdjointEigenSolver<CMat> es(dy1star);
  double dmin = es.eigenvalues().minCoeff();
  double dmax = es.eigenvalues().maxCoeff();
  if (dmin <= 0.0 || dmax / dmin > 1.0 / tol.base)
    throw ConditioningFailure(
        "strict_q_diag_construction: cond(D_{Y1*}) exceeds 1/tol");
  CMat dinv = es.eigenvectors() *
              es.eigenvalues().cwiseInverse().cast<Complex>().asDiagonal() *
              es.eigenvectors().adjoint();

  const Index kd = kp.total_dim();
  DirectSumSpace kspace = DirectSumSpace::uniform("Kprime", kd, "Kprime", kd,
                                                  outer_levels);
  const Index total = kspace.total_dim();

  // Z1 = [[Y1, D_{Y1*}, 0...], [0, 0, I, ...], ...]  (pure co-isometry)
  CMat z1 = CMat::Zero(total, total);
  z1.topLeftCorner(kd, kd) = y1;
  if (outer_levels > 0) z1.block(0, kd, kd, kd) = dy1star;
  for (Index j = 1; j < outer_levels; ++j)
    z1.block(j * kd, (j + 1) * kd, kd, kd) = identity(kd);

  CMat a = dinv * qbar0 * z2p * dy1star;
  CMat z2 = CMat::Zero(total, total);
  z2.topLeftCorner(kd, kd) = z2p;
  for (Index j = 1; j <= outer_levels; ++j)
    z2.block(j * kd, j * kd, kd, kd) = a;

  CMat qbar = identity(total);
  qbar.topLeftCorner(kd, kd) = qbar0;

  StrictDiagResult res;
  res.space = kspace;
  res.z1 = z1;
  res.z2 = z2;
  res.qbar = qbar;

  CMat iota_kp = embed_matrix(kp);
  CMat iota = CMat::Zero(total, d);
  iota.topRows(kd) = iota_kp;
  Index interior_kp = kp.leading_dim(std::max<Index>(1, valid_blocks));
  CMat win = CMat::Zero(total, interior_kp);
  win.topRows(interior_kp) = identity(interior_kp);

  res.certs["extension_z1"] = (z1 * iota - iota * t1).norm();
  res.certs["extension_z2"] = (z2 * iota - iota * t2).norm();
  res.certs["extension_qbar"] = (qbar * iota - iota * q).norm();
  // co-isometry of Z1 away from the dropped tail block
  res.certs["coisometry_z1"] = coisometry_defect_on(
      z1, kspace.leading_dim(kspace.block_count() - 1));
  // the displayed computation: (D^{-1} Qbar0 Z2' D)(...)^* = I, on the
  // interior of K'
  res.certs["coisometry_diag"] =
      ((a * a.adjoint() - identity(kd)).topLeftCorner(interior_kp,
                                                      interior_kp))
          .norm();
  // z2 is block diagonal; each block is co-isometric on the K' interior
  res.certs["coisometry_z2"] =
      std::max(coisometry_defect_on(z2p, interior_kp),
               res.certs["coisometry_diag"]);
  res.certs["q_relation"] = ((z1 * z2 - qbar * z2 * z1) * win).norm();
  res.certs["norm_y1"] = std::abs(ny1 - n1);
  return res;
}

}  // namespace dilatron

#endif  // DILATRON_DILATION_HPP
