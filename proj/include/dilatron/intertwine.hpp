#ifndef DILATRON_INTERTWINE_HPP
#define DILATRON_INTERTWINE_HPP

// Reverse intertwining liftings: given a (co-)isometric dilation of the
// intertwiner X itself, produce norm preserving lifts/extensions of T1, T2
// around it. The extension form is a closed-form Douglas chain on the
// co-isometric tower of X; the lift form is its adjoint; the codilation
// form dilates both outputs again and certifies the co-isometry of the
// intertwiner through the orbit density argument; the strict form builds
// the diagonal repetition blocks with an invertible D_{Y*}.

#include <string>

#include "dilatron/liftops.hpp"

namespace dilatron {

enum class ReverseMode { Extend, Lift, Codilate, Strict };

struct ReverseIntertwineResult {
  DirectSumSpace space;       // codomain-side space of r
  DirectSumSpace space_dom;   // domain-side space of r
  CMat y1;                    // lift/extension of t1
  CMat y2;                    // lift/extension of t2
  CMat r;                     // the dilation of x the outputs intertwine
  CertificateMap certs;
};

// T1 X = X T2 with all three contractions; Z the (truncated) minimal
// co-isometric extension of X. Returns Y1 = T1 (+) 0 (norm preserving) and
// the triangular Y2 with Y1 Z = Z Y2.
inline ReverseIntertwineResult reverse_intertwine_extend(const CMat& t1,
                                                         const CMat& t2,
                                                         const CMat& x,
                                                         Index levels,
                                                         Tolerance tol = {}) {
  const Index d = t1.rows();
  double rel = (t1 * x - x * t2).norm();
  if (rel > tol.eff(d, std::max(1.0, x.norm())))
    throw HypothesisViolated("reverse_intertwine_extend: T1 X = X T2 fails");
  if (spectral_norm(t1) > 1.0 + tol.eff(d) ||
      spectral_norm(t2) > 1.0 + tol.eff(d) ||
      spectral_norm(x) > 1.0 + tol.eff(d))
    throw NotAContraction("reverse_intertwine_extend: contractions required");

  CMat dxs = codefect(x, tol);
  CMat dt2s = codefect(t2, tol);

  double margin = 0.0;
  auto [z1g, z2g] = douglas_pair_least_squares(CMat(t1 * dxs), CMat(x * dt2s),
                                               dxs, &margin);
  if (margin < -tol.eff(d))
    throw InfeasibleError("reverse_intertwine_extend: Douglas pair infeasible",
                          margin);
  CMat s = range_projector(dxs) * z2g;  // supported on the defect range
  CMat ds = defect_clamped(s);
  CMat cstar = douglas_least_squares(CMat(z1g.adjoint()), ds, &margin);
  CMat e = dt2s * cstar.adjoint() * ds;

  ReverseIntertwineResult res;
  DirectSumSpace space = tower_space(d, levels, "H", "D_Xstar");
  res.space = space;
  res.space_dom = space;
  const Index total = space.total_dim();

  // Z(h0, h1, ...) = (X h0 + D_{X*} h1, h2, ...)
  CMat z = tower_matrix_on(space, CMat(x.adjoint()), tol).adjoint();
  res.r = z;
  res.y1 = CMat::Zero(total, total);
  res.y1.topLeftCorner(d, d) = t1;
  res.y2 = CMat::Zero(total, total);
  res.y2.topLeftCorner(d, d) = t2;
  if (levels > 0) {
    res.y2.block(0, d, d, d) = e;
    res.y2.block(d, d, d, d) = s;
  }

  res.certs["relation"] = (res.y1 * z - z * res.y2).norm();
  res.certs["norm_y1"] = std::abs(spectral_norm(res.y1) - spectral_norm(t1));
  res.certs["contractivity_y2"] = std::max(0.0, spectral_norm(res.y2) - 1.0);
  CMat iota = embed_matrix(space);
  res.certs["extension_y1"] = (res.y1 * iota - iota * t1).norm();
  res.certs["extension_y2"] = (res.y2 * iota - iota * t2).norm();
  res.certs["coisometry_r"] = coisometry_defect_on(
      z, space.leading_dim(space.block_count() - 1));
  return res;
}

// Lift form: V an isometric lift of X, S1 V = V S2 with S2 norm preserving.
inline ReverseIntertwineResult reverse_intertwine_lift(const CMat& t1,
                                                       const CMat& t2,
                                                       const CMat& x,
                                                       Index levels,
                                                       Tolerance tol = {}) {
  ReverseIntertwineResult dual = reverse_intertwine_extend(
      CMat(t2.adjoint()), CMat(t1.adjoint()), CMat(x.adjoint()), levels, tol);
  ReverseIntertwineResult res;
  res.space = dual.space;
  res.space_dom = dual.space;
  res.y1 = dual.y2.adjoint();  // contractive lift of t1
  res.y2 = dual.y1.adjoint();  // norm preserving lift of t2
  res.r = dual.r.adjoint();    // isometric lift of x
  res.certs["relation"] = (res.y1 * res.r - res.r * res.y2).norm();
  res.certs["norm_y2"] = std::abs(spectral_norm(res.y2) - spectral_norm(t2));
  res.certs["contractivity_y1"] = std::max(0.0, spectral_norm(res.y1) - 1.0);
  CMat iota = embed_matrix(res.space);
  res.certs["lift_y1"] =
      (res.y1.adjoint() * iota - iota * t1.adjoint()).norm();
  res.certs["lift_y2"] =
      (res.y2.adjoint() * iota - iota * t2.adjoint()).norm();
  res.certs["isometry_r"] = isometry_defect_on(
      res.r, res.space.leading_dim(res.space.block_count() - 1));
  return res;
}

// Codilation: both outputs are dilated once more to co-isometries Z1, Z2
// and the extension R of Z is certified co-isometric on the orbit of the
// inner space under Z1*.
inline ReverseIntertwineResult reverse_intertwine_codilate(
    const CMat& t1, const CMat& t2, const CMat& x, Index inner_levels,
    Index outer_levels, Tolerance tol = {}) {
  ReverseIntertwineResult stage = reverse_intertwine_extend(t1, t2, x,
                                                            inner_levels, tol);
  LiftResult ext = intertwine_extend(stage.y1, stage.y2, stage.r,
                                     outer_levels, tol);

  ReverseIntertwineResult res;
  res.space = ext.space;
  res.space_dom = ext.space_dom;
  res.y1 = ext.v;   // co-isometric extension of Y1, hence of T1
  res.y2 = ext.v2;  // of Y2 / T2
  res.r = ext.y;    // extension of Z intertwining them
  res.certs["relation"] = ext.certs["relation"];
  res.certs["extension_r"] = ext.certs["lift_y"];
  res.certs["coisometry_z1"] = coisometry_defect_on(
      res.y1, res.space.leading_dim(res.space.block_count() - 1));
  res.certs["coisometry_z2"] = coisometry_defect_on(
      res.y2, res.space_dom.leading_dim(res.space_dom.block_count() - 1));
  // R is co-isometric on span{ Z1*^n k : k in the inner interior }
  Index inner_win = stage.space.leading_dim(stage.space.block_count() - 2);
  CMat seed = CMat::Zero(res.space.total_dim(), inner_win);
  seed.topRows(inner_win) = identity(inner_win);
  LevelStructure orb = orbit_levels(CMat(res.y1.adjoint()), seed, 2);
  CMat b = orb.basis;
  res.certs["coisometry_r"] =
      ((res.r.adjoint() * b).adjoint() * (res.r.adjoint() * b) -
       identity(b.cols()))
          .norm();
  return res;
}

// Strict variant: ||X|| < 1 gives the explicit pure co-isometry R and the
// diagonal D^{-1} Z1' D repetition blocks.
inline ReverseIntertwineResult reverse_intertwine_strict(
    const CMat& t1, const CMat& t2, const CMat& x, Index inner_levels,
    Index outer_levels, Tolerance tol = {},
    double strict_margin = kStrictMargin) {
  const Index d = t1.rows();
  double nx = spectral_norm(x);
  if (nx >= 1.0 - strict_margin)
    throw NotStrict("reverse_intertwine_strict: ||X|| = " +
                    std::to_string(nx) + " is not strictly below 1");

  Index margin = strict_tail_margin(nx);
  inner_levels = std::max(inner_levels, margin + 4);
  LiftResult ext = intertwine_extend(t1, t2, x, inner_levels, tol);
  CMat y = ext.y;           // norm preserving extension of x
  CMat z1p = ext.v;         // co-isometric extension of t1
  CMat z2p = ext.v2;        // of t2
  const Index kd = z1p.rows();

  CMat dystar = codefect_clamped(y);
  Eigen::SelfAdjointEigenSolver<CMat> es(dystar);
  double dmin = es.eigenvalues().minCoeff();
  if (dmin <= 0.0 || es.eigenvalues().maxCoeff() / dmin > 1.0 / tol.base)
    throw ConditioningFailure(
        "reverse_intertwine_strict: cond(D_{Y*}) exceeds 1/tol");
  CMat dinv = es.eigenvectors() *
              es.eigenvalues().cwiseInverse().cast<Complex>().asDiagonal() *
              es.eigenvectors().adjoint();

  DirectSumSpace kspace = DirectSumSpace::uniform("Kprime", kd, "Kprime", kd,
                                                  outer_levels);
  const Index total = kspace.total_dim();
  CMat r = CMat::Zero(total, total);
  r.topLeftCorner(kd, kd) = y;
  if (outer_levels > 0) r.block(0, kd, kd, kd) = dystar;
  for (Index j = 1; j < outer_levels; ++j)
    r.block(j * kd, (j + 1) * kd, kd, kd) = identity(kd);

  CMat a = dinv * z1p * dystar;
  CMat z1 = CMat::Zero(total, total);
  z1.topLeftCorner(kd, kd) = z1p;
  CMat z2 = CMat::Zero(total, total);
  z2.topLeftCorner(kd, kd) = z2p;
  for (Index j = 1; j <= outer_levels; ++j) {
    z1.block(j * kd, j * kd, kd, kd) = a;
    z2.block(j * kd, j * kd, kd, kd) = a;
  }

  ReverseIntertwineResult res;
  res.space = kspace;
  res.space_dom = kspace;
  res.y1 = z1;
  res.y2 = z2;
  res.r = r;

  Index inner_interior = ext.space.leading_dim(
      std::max<Index>(1, ext.space.block_count() - margin));
  CMat win = CMat::Zero(total, inner_interior);
  win.topRows(inner_interior) = identity(inner_interior);
  res.certs["relation"] = ((z1 * r - r * z2) * win).norm();
  res.certs["stage_relation"] = ext.certs["relation"];
  // the displayed computation: (D^{-1} Z1' D)(D^{-1} Z1' D)* = I
  res.certs["coisometry_diag"] =
      ((a * a.adjoint() - identity(kd)).topLeftCorner(inner_interior,
                                                      inner_interior))
          .norm();
  res.certs["coisometry_r"] = coisometry_defect_on(
      r, kspace.leading_dim(kspace.block_count() - 1));
  res.certs["norm_y"] = std::abs(spectral_norm(y) - nx);
  CMat iota_h = CMat::Zero(total, d);
  iota_h.topRows(d) = identity(d);
  res.certs["extension_r"] = (r * iota_h - iota_h * x).norm();
  res.certs["extension_z1"] = (z1 * iota_h - iota_h * t1).norm();
  res.certs["extension_z2"] = (z2 * iota_h - iota_h * t2).norm();
  return res;
}

inline ReverseIntertwineResult reverse_intertwine(const CMat& t1,
                                                  const CMat& t2, const CMat& x,
                                                  ReverseMode mode,
                                                  Index levels,
                                                  Tolerance tol = {}) {
  switch (mode) {
    case ReverseMode::Extend:
      return reverse_intertwine_extend(t1, t2, x, levels, tol);
    case ReverseMode::Lift:
      return reverse_intertwine_lift(t1, t2, x, levels, tol);
    case ReverseMode::Codilate:
      return reverse_intertwine_codilate(t1, t2, x, levels,
                                         std::max<Index>(3, levels / 2), tol);
    case ReverseMode::Strict:
      return reverse_intertwine_strict(t1, t2, x, levels,
                                       std::max<Index>(3, levels / 2), tol);
  }
  throw HypothesisViolated("reverse_intertwine: unknown mode");
}

}  // namespace dilatron

#endif  // DILATRON_INTERTWINE_HPP
