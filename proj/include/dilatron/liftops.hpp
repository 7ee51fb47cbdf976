#ifndef DILATRON_LIFTOPS_HPP
#define DILATRON_LIFTOPS_HPP

// Front-ends for the Q-commutant and Q-intertwining lifting statements.
// Each supported relation form is routed to one of the constructive engines
// in lifting.hpp, taking adjoints where the statement is the co-isometric
// dual of a lifting statement.

#include <string>
#include <utility>
#include <vector>

#include "dilatron/lifting.hpp"

namespace dilatron {

enum class QPosition { Left, Middle, Right };

// The diagonal repetition identities of the strict constructions converge
// geometrically in the distance between the certificate window and the
// truncation tail, at rate ||strict factor||^2 per block. This picks the
// margin that pushes the tail contribution below 1e-10.
inline Index strict_tail_margin(double rho) {
  if (rho < 0.05) return 4;
  double m = 11.6 / -std::log(std::min(rho, 0.98));
  return std::max<Index>(4, static_cast<Index>(std::ceil(m)));
}

enum class RelationForm {
  XT_eq_QTX,  // X T = Q T X
  XT_eq_TQX,  // X T = T Q X
  TX_eq_XTQ,  // T X = X T Q
  TX_eq_QXT,  // T X = Q X T
  XT_eq_TXQ,  // X T = T X Q
  TX_eq_XQT,  // T X = X Q T
};

enum class LiftSide { IsometricLift, CoisometricExtension };

inline const char* relation_name(RelationForm f) {
  switch (f) {
    case RelationForm::XT_eq_QTX: return "XT=QTX";
    case RelationForm::XT_eq_TQX: return "XT=TQX";
    case RelationForm::TX_eq_XTQ: return "TX=XTQ";
    case RelationForm::TX_eq_QXT: return "TX=QXT";
    case RelationForm::XT_eq_TXQ: return "XT=TXQ";
    case RelationForm::TX_eq_XQT: return "TX=XQT";
  }
  return "?";
}

inline double relation_residual(RelationForm f, const CMat& t, const CMat& x,
                                const CMat& q) {
  switch (f) {
    case RelationForm::XT_eq_QTX: return (x * t - q * t * x).norm();
    case RelationForm::XT_eq_TQX: return (x * t - t * q * x).norm();
    case RelationForm::TX_eq_XTQ: return (t * x - x * t * q).norm();
    case RelationForm::TX_eq_QXT: return (t * x - q * x * t).norm();
    case RelationForm::XT_eq_TXQ: return (x * t - t * x * q).norm();
    case RelationForm::TX_eq_XQT: return (t * x - x * q * t).norm();
  }
  return 0.0;
}

struct LiftProblem {
  CMat t;
  CMat x;
  CMat q;
  RelationForm relation = RelationForm::XT_eq_QTX;
  LiftSide side = LiftSide::IsometricLift;
};

// The adjoint problem: adjoint all data and swap the lift side. Involutive,
// and maps each relation form to its dual form.
inline LiftProblem dualize(const LiftProblem& p) {
  LiftProblem d;
  d.t = p.t.adjoint();
  d.x = p.x.adjoint();
  d.q = p.q.adjoint();
  d.side = p.side == LiftSide::IsometricLift ? LiftSide::CoisometricExtension
                                             : LiftSide::IsometricLift;
  switch (p.relation) {
    case RelationForm::XT_eq_QTX: d.relation = RelationForm::TX_eq_XTQ; break;
    case RelationForm::TX_eq_XTQ: d.relation = RelationForm::XT_eq_QTX; break;
    case RelationForm::XT_eq_TQX: d.relation = RelationForm::TX_eq_XQT; break;
    case RelationForm::TX_eq_XQT: d.relation = RelationForm::XT_eq_TQX; break;
    case RelationForm::TX_eq_QXT: d.relation = RelationForm::XT_eq_TXQ; break;
    case RelationForm::XT_eq_TXQ: d.relation = RelationForm::TX_eq_QXT; break;
  }
  return d;
}

// Result of a lifting front-end: the lift Y together with the big-space
// operators it intertwines, and the residual certificates.
struct LiftResult {
  DirectSumSpace space;        // codomain-side space
  DirectSumSpace space_dom;    // domain-side space (same unless intertwining)
  CMat y;
  CMat v;                      // isometric lift / co-isometric ext of t (t1)
  CMat v2;                     // second lift for intertwining front-ends
  CMat qbar;
  std::string engine;
  std::string relation;        // big-space relation that was certified
  std::vector<CMat> per_level;
  CertificateMap certs;
};

// ---------------------------------------------------------------------------
// Constructive intertwining lift between Schaffer towers (the inductive
// proof of the classical intertwining lifting theorem): T X = X T' gives
// Y with V Y = Y V', Y a norm preserving lift of X.
// ---------------------------------------------------------------------------
inline LiftResult intertwine_lift(const CMat& t, const CMat& tprime,
                                  const CMat& x, Index levels,
                                  Tolerance tol = {}) {
  double scale = std::max({1.0, x.norm()});
  double rel = (t * x - x * tprime).norm();
  if (rel > tol.eff(t.rows(), scale))
    throw HypothesisViolated("intertwine_lift: TX = XT' fails, residual " +
                             std::to_string(rel));
  BlockOperator v = schaffer_isometric_dilation(t, levels, tol);
  BlockOperator vp = schaffer_isometric_dilation(tprime, levels, tol);
  LevelStructure s1 = tower_levels(v.matrix, v.domain, levels);
  LevelStructure s2 = tower_levels(vp.matrix, vp.domain, levels);
  LadderResult lad = intertwine_ladder(s1, s2, x);

  LiftResult res;
  res.space = v.domain;
  res.space_dom = vp.domain;
  res.y = lad.y;
  res.v = v.matrix;
  res.v2 = vp.matrix;
  res.qbar = identity(v.domain.total_dim());
  res.engine = "qpart-ladder";
  res.relation = "VY=YV'";
  res.per_level = lad.per_level;

  Index win = std::min(v.exact_input_dim(),
                       res.space_dom.leading_dim(lad.levels_run));
  res.certs["relation"] =
      ((res.v * res.y - res.y * res.v2).leftCols(win)).norm();
  CMat iota1 = embed_matrix(v.domain), iota2 = embed_matrix(vp.domain);
  res.certs["lift_y"] = (res.y.adjoint() * iota1 - iota2 * x.adjoint()).norm();
  res.certs["norm_preservation"] =
      std::abs(spectral_norm(res.y) - spectral_norm(x));
  return res;
}

// Extension form: TX = XT' gives Y extending X with Z Y = Y Z' between the
// co-isometric extension towers. Obtained from intertwine_lift on adjoints.
inline LiftResult intertwine_extend(const CMat& t, const CMat& tprime,
                                    const CMat& x, Index levels,
                                    Tolerance tol = {}) {
  LiftResult lifted = intertwine_lift(tprime.adjoint(), t.adjoint(),
                                      x.adjoint(), levels, tol);
  LiftResult res;
  res.space = lifted.space_dom;      // codomain side of Y = W*
  res.space_dom = lifted.space;
  res.y = lifted.y.adjoint();
  res.v = lifted.v2.adjoint();       // co-isometric extension of t
  res.v2 = lifted.v.adjoint();       // co-isometric extension of t'
  res.qbar = identity(res.space.total_dim());
  res.engine = lifted.engine;
  res.relation = "ZY=YZ'";
  res.per_level = lifted.per_level;
  Index win = res.space_dom.leading_dim(
      std::max<Index>(1, res.space_dom.block_count() - 2));
  res.certs["relation"] =
      ((res.v * res.y - res.y * res.v2).leftCols(win)).norm();
  CMat iota2 = embed_matrix(res.space_dom), iota1 = embed_matrix(res.space);
  res.certs["lift_y"] = (res.y * iota2 - iota1 * x).norm();
  res.certs["norm_preservation"] =
      std::abs(spectral_norm(res.y) - spectral_norm(x));
  return res;
}

// ---------------------------------------------------------------------------
// Contractive lift reduction: T' A = A T with V the Schaffer lift of t and
// w a contractive lift of t' on its own space. Produces a contractive lift
// B of A with w B = B V. If w is already isometric the nested-filtration
// ladder applies directly; otherwise w is first dilated to its own tower
// and the result is compressed back.
// ---------------------------------------------------------------------------
struct ContractiveLiftInput {
  CMat w;        // contractive lift of tprime on its space
  CMat embed;    // orthonormal embedding of H' into that space
  CMat tprime;   // compression of w to H'
  // set when w is known isometric on its interior (e.g. a truncated tower
  // or a product of truncated towers); skips the dilate-and-compress step
  bool assume_isometric = false;
};

struct ContractiveLiftReduction {
  CMat b;        // K_V -> space(w)
  CMat v;        // the Schaffer lift of t used
  DirectSumSpace v_space;
  CertificateMap certs;
};

inline ContractiveLiftReduction contractive_lift_reduce(
    const CMat& t, const ContractiveLiftInput& in, const CMat& a, Index levels,
    Tolerance tol = {}) {
  double scale = std::max(1.0, a.norm());
  double rel = (in.tprime * a - a * t).norm();
  if (rel > tol.eff(t.rows(), scale))
    throw HypothesisViolated("contractive_lift_reduce: T'A = AT fails");
  double wn = spectral_norm(in.w);
  if (wn > 1.0 + tol.eff(in.w.rows()))
    throw NotAContraction("contractive_lift_reduce: w is not a contraction");
  double lift_defect =
      (in.w.adjoint() * in.embed - in.embed * in.tprime.adjoint()).norm();
  if (lift_defect > tol.eff(in.w.rows()))
    throw HypothesisViolated("contractive_lift_reduce: w does not lift t'");

  BlockOperator v = schaffer_isometric_dilation(t, levels, tol);
  LevelStructure s2 = tower_levels(v.matrix, v.domain, levels);

  ContractiveLiftReduction out;
  out.v = v.matrix;
  out.v_space = v.domain;

  const Index kw = in.w.rows();
  double iso_defect = (in.w.adjoint() * in.w - identity(kw)).norm();
  if (in.assume_isometric || iso_defect <= tol.eff(kw)) {
    LevelStructure s1 = orbit_levels(in.w, in.embed, levels);
    LadderResult lad = intertwine_ladder(s1, s2, a);
    out.b = lad.y;
  } else {
    // dilate w to its own tower, lift there, compress back
    BlockOperator vpp = schaffer_isometric_dilation(in.w, levels, tol);
    CMat head = CMat::Zero(vpp.domain.total_dim(), in.embed.cols());
    head.topRows(kw) = in.embed;
    LevelStructure s1 = orbit_levels(vpp.matrix, head, levels);
    LadderResult lad = intertwine_ladder(s1, s2, a);
    out.b = lad.y.topRows(kw);
  }

  CMat iota = embed_matrix(v.domain);
  out.certs["lift_b"] =
      (out.b.adjoint() * in.embed - iota * a.adjoint()).norm();
  Index win = v.domain.leading_dim(
      std::max<Index>(1, v.domain.block_count() - 2));
  out.certs["relation"] =
      ((in.w * out.b - out.b * v.matrix).leftCols(win)).norm();
  out.certs["contractivity"] = std::max(0.0, spectral_norm(out.b) - 1.0);
  return out;
}

// ---------------------------------------------------------------------------
// Joint tower lifts on (+) H: the Schaffer images of t and q on a shared
// space, used by every front-end that needs V and Qbar together.
// ---------------------------------------------------------------------------
inline CMat tower_matrix_on(const DirectSumSpace& space, const CMat& op,
                            Tolerance tol = {}) {
  // (h0, h1, ...) -> (Op h0, D_Op h0, h1, ...) on the given uniform space
  const Index d = op.rows();
  if (space.block_dim(0) != d)
    throw DimensionMismatch("tower_matrix_on: head dimension mismatch");
  CMat dop = defect(op, tol);
  const Index n = space.total_dim();
  CMat m = CMat::Zero(n, n);
  m.topLeftCorner(d, d) = op;
  if (space.block_count() > 1) m.block(d, 0, d, d) = dop;
  for (Index b = 1; b + 1 < space.block_count(); ++b)
    m.block((b + 1) * d, b * d, d, d) = identity(d);
  return m;
}

inline CMat qbar_direct_sum(const DirectSumSpace& space, const CMat& q,
                            Complex scalar = Complex(1.0, 0.0)) {
  const Index d = q.rows();
  CMat m = scalar * identity(space.total_dim());
  m.topLeftCorner(d, d) = q;
  return m;
}

// ---------------------------------------------------------------------------
// q_commutant_lift: dispatch table for the Q-commutant lifting and
// Q-commuting co-isometric extension statements.
// ---------------------------------------------------------------------------
enum class Engine { Auto, Dmp, DualParrott };

inline LiftResult q_commutant_lift(const LiftProblem& p, Index levels,
                                   Engine engine = Engine::Auto,
                                   Tolerance tol = {}) {
  const Index d = p.t.rows();
  double scale = std::max({1.0, p.x.norm(), p.q.norm()});
  double rel = relation_residual(p.relation, p.t, p.x, p.q);
  if (rel > tol.eff(d, scale))
    throw HypothesisViolated(std::string("q_commutant_lift: relation ") +
                             relation_name(p.relation) + " fails, residual " +
                             std::to_string(rel));

  if (p.side == LiftSide::CoisometricExtension) {
    switch (p.relation) {
      case RelationForm::XT_eq_TXQ: {
        // Q co-isometric: direct DMP ladder, X~ Z = Z X~ Qbar
        double cod = (p.q * p.q.adjoint() - identity(d)).norm();
        if (cod <= tol.eff(d, scale)) {
          DmpLadder lad = lift_inductive_dmp(p.t, p.x, p.q,
                                             DmpForm::RightOfX, levels,
                                             Complex(1.0, 0.0), tol);
          LiftResult res;
          res.space = lad.space;
          res.space_dom = lad.space;
          res.y = lad.xt;
          res.v = lad.z;
          res.qbar = lad.qbar;
          res.engine = "dmp";
          res.relation = "YZ=ZYQbar";
          res.per_level = lad.per_level;
          res.certs = lad.certs;
          res.certs["lift_y"] = res.certs["extension"];
          res.certs.erase("extension");
          return res;
        }
        throw HypothesisViolated(
            "q_commutant_lift: XT=TXQ on the extension side requires a "
            "co-isometric Q");
      }
      case RelationForm::TX_eq_QXT: {
        // ladders for Z X~ = Qbar X~ Z
        DmpLadder lad =
            engine == Engine::DualParrott
                ? lift_inductive_dualparrott(p.t, p.x, p.q, levels, tol)
                : lift_inductive_dmp(p.t, p.x, p.q, DmpForm::LeftOfX, levels,
                                     Complex(1.0, 0.0), tol);
        LiftResult res;
        res.space = lad.space;
        res.space_dom = lad.space;
        res.y = lad.xt;
        res.v = lad.z;
        res.qbar = lad.qbar;
        res.engine = engine == Engine::DualParrott ? "dualparrott" : "dmp";
        res.relation = "ZY=QbarYZ";
        res.per_level = lad.per_level;
        res.certs = lad.certs;
        res.certs["lift_y"] = res.certs["extension"];
        res.certs.erase("extension");
        return res;
      }
      default: {
        // co-isometric duals of the lifting forms
        LiftResult lifted = q_commutant_lift(dualize(p), levels, engine, tol);
        LiftResult res = lifted;
        res.y = lifted.y.adjoint();
        res.v = lifted.v.adjoint();
        res.v2 = lifted.v2.size() ? CMat(lifted.v2.adjoint()) : lifted.v2;
        res.qbar = lifted.qbar.adjoint();
        res.relation = std::string("dual of ") + lifted.relation;
        CMat iota = embed_matrix(res.space);
        res.certs["lift_y"] = (res.y * iota - iota * p.x).norm();
        return res;
      }
    }
  }

  // Isometric-lift side.
  switch (p.relation) {
    case RelationForm::XT_eq_QTX:
    case RelationForm::XT_eq_TQX: {
      // Y V = Qbar V Y (left) or Y V = V Qbar Y (middle) via the
      // contractive-lift reduction with W = Qbar V or V Qbar.
      bool left = p.relation == RelationForm::XT_eq_QTX;
      CMat composite = left ? CMat(p.q * p.t) : CMat(p.t * p.q);
      if (spectral_norm(composite) > 1.0 + tol.eff(d, scale))
        throw CompositeNotContraction(
            std::string("q_commutant_lift: ") + (left ? "QT" : "TQ") +
            " must be a contraction");
      BlockOperator v = schaffer_isometric_dilation(p.t, levels, tol);
      CMat qbar;
      bool q_contractive = spectral_norm(p.q) <= 1.0 + tol.eff(d, scale);
      if (q_contractive)
        qbar = tower_matrix_on(v.domain, p.q, tol);  // isometric lift of Q
      else
        qbar = qbar_direct_sum(v.domain, p.q);       // Q (+) I
      CMat w = left ? CMat(qbar * v.matrix) : CMat(v.matrix * qbar);
      double wn = spectral_norm(w);
      if (wn > 1.0 + tol.eff(v.domain.total_dim()))
        throw HypothesisViolated(std::string("q_commutant_lift: ||") +
                                 (left ? "QbarV" : "VQbar") + "|| = " +
                                 std::to_string(wn) + " exceeds 1");
      ContractiveLiftInput in;
      in.w = w;
      in.embed = embed_matrix(v.domain);
      in.tprime = composite;
      in.assume_isometric = q_contractive;  // product of interior isometries
      ContractiveLiftReduction red =
          contractive_lift_reduce(p.t, in, p.x, levels, tol);
      LiftResult res;
      res.space = v.domain;
      res.space_dom = v.domain;
      res.y = red.b;
      res.v = v.matrix;
      res.qbar = qbar;
      res.engine = "contractive-lift";
      res.relation = left ? "YV=QbarVY" : "YV=VQbarY";
      res.certs = red.certs;
      res.certs["lift_y"] = res.certs["lift_b"];
      res.certs.erase("lift_b");
      res.certs["norm_preservation"] =
          std::abs(spectral_norm(res.y) - spectral_norm(p.x));
      return res;
    }
    case RelationForm::TX_eq_XTQ: {
      // V Y = Y V Qbar via the nested-filtration ladder between V and V Qbar.
      if (spectral_norm(p.q) > 1.0 + tol.eff(d, scale))
        throw NotAContraction("q_commutant_lift: Q must be a contraction");
      BlockOperator v = schaffer_isometric_dilation(p.t, levels, tol);
      bool q_iso = (p.q.adjoint() * p.q - identity(d)).norm() <= tol.eff(d);
      // an isometric Q extends as Q (+) I, keeping V Qbar band-limited
      CMat qbar = q_iso ? qbar_direct_sum(v.domain, p.q)
                        : tower_matrix_on(v.domain, p.q, tol);
      CMat vq = v.matrix * qbar;
      LevelStructure s1 = tower_levels(v.matrix, v.domain, levels);
      LevelStructure s2 = orbit_levels(vq, embed_matrix(v.domain), levels);
      LadderResult lad = intertwine_ladder(s1, s2, p.x);
      LiftResult res;
      res.space = v.domain;
      res.space_dom = v.domain;
      res.y = lad.y;
      res.v = v.matrix;
      res.qbar = qbar;
      res.engine = "qpart-ladder";
      res.relation = "VY=YVQbar";
      res.per_level = lad.per_level;
      Index win = res.space.leading_dim(
          std::max<Index>(1, std::min<Index>(lad.levels_run - 1,
                                             res.space.block_count() - 2)));
      res.certs["relation"] =
          ((v.matrix * res.y - res.y * vq).leftCols(win)).norm();
      CMat iota = embed_matrix(v.domain);
      res.certs["lift_y"] =
          (res.y.adjoint() * iota - iota * p.x.adjoint()).norm();
      res.certs["norm_preservation"] =
          std::abs(spectral_norm(res.y) - spectral_norm(p.x));
      return res;
    }
    case RelationForm::TX_eq_QXT: {
      // V X~ = Qbar X~ V for isometric Q, dual of the right-of-X DMP ladder
      double isod = (p.q.adjoint() * p.q - identity(d)).norm();
      if (isod > tol.eff(d, scale))
        throw HypothesisViolated(
            "q_commutant_lift: TX=QXT lifting requires isometric Q");
      DmpLadder lad =
          lift_inductive_dmp(p.t.adjoint(), p.x.adjoint(), p.q.adjoint(),
                             DmpForm::RightOfX, levels, Complex(1.0, 0.0), tol);
      LiftResult res;
      res.space = lad.space;
      res.space_dom = lad.space;
      res.y = lad.xt.adjoint();
      res.v = lad.z.adjoint();     // the Schaffer lift of t
      res.qbar = lad.qbar.adjoint();
      res.engine = "dmp";
      res.relation = "VY=QbarYV";
      res.per_level = lad.per_level;
      res.certs["relation"] = lad.certs["relation"];
      res.certs["norm_preservation"] = lad.certs["norm_preservation"];
      CMat iota = embed_matrix(res.space);
      res.certs["lift_y"] =
          (res.y.adjoint() * iota - iota * p.x.adjoint()).norm();
      return res;
    }
    case RelationForm::XT_eq_TXQ: {
      // X~ V = V X~ Qbar for contractive Q, dual of the left-of-X ladder
      DmpLadder lad =
          engine == Engine::DualParrott
              ? lift_inductive_dualparrott(p.t.adjoint(), p.x.adjoint(),
                                           p.q.adjoint(), levels, tol)
              : lift_inductive_dmp(p.t.adjoint(), p.x.adjoint(),
                                   p.q.adjoint(), DmpForm::LeftOfX, levels,
                                   Complex(1.0, 0.0), tol);
      LiftResult res;
      res.space = lad.space;
      res.space_dom = lad.space;
      res.y = lad.xt.adjoint();
      res.v = lad.z.adjoint();
      res.qbar = lad.qbar.adjoint();
      res.engine = engine == Engine::DualParrott ? "dualparrott" : "dmp";
      res.relation = "YV=VYQbar";
      res.per_level = lad.per_level;
      res.certs["relation"] = lad.certs["relation"];
      res.certs["norm_preservation"] = lad.certs["norm_preservation"];
      CMat iota = embed_matrix(res.space);
      res.certs["lift_y"] =
          (res.y.adjoint() * iota - iota * p.x.adjoint()).norm();
      return res;
    }
    case RelationForm::TX_eq_XQT:
      throw HypothesisViolated(
          "q_commutant_lift: TX=XQT has no lifting form; use the "
          "co-isometric extension side");
  }
  throw HypothesisViolated("q_commutant_lift: unsupported problem");
}

// ---------------------------------------------------------------------------
// q_intertwine_lift: X T1 = Q T2 X (left) or X T1 = T2 Q X (middle) gives a
// norm preserving lift Y with Y V1 = Qbar V2 Y resp. Y V1 = V2 Qbar Y.
// Extension duals are reached through `side`.
// ---------------------------------------------------------------------------
inline LiftResult q_intertwine_lift(const CMat& t1, const CMat& t2,
                                    const CMat& x, const CMat& q,
                                    QPosition position, LiftSide side,
                                    Index levels, Tolerance tol = {}) {
  if (position == QPosition::Right)
    throw HypothesisViolated(
        "q_intertwine_lift: right position is covered by q_commutant_lift "
        "with TX=XTQ");
  if (side == LiftSide::CoisometricExtension) {
    // T1 X = X T2 Q (left) / T1 X = X Q T2 (middle) on adjoints
    LiftResult lifted =
        q_intertwine_lift(t1.adjoint(), t2.adjoint(), x.adjoint(),
                          q.adjoint(), position, LiftSide::IsometricLift,
                          levels, tol);
    LiftResult res = lifted;
    std::swap(res.space, res.space_dom);
    res.y = lifted.y.adjoint();
    res.v = lifted.v.adjoint();
    res.v2 = lifted.v2.adjoint();
    res.qbar = lifted.qbar.adjoint();
    res.relation = position == QPosition::Left ? "V1Y=YV2Qbar" : "V1Y=YQbarV2";
    CMat iota_dom = embed_matrix(res.space_dom);
    CMat iota_cod = embed_matrix(res.space);
    res.certs["lift_y"] = (res.y * iota_dom - iota_cod * x).norm();
    return res;
  }

  const Index d = t1.rows();
  double scale = std::max({1.0, x.norm(), q.norm()});
  bool left = position == QPosition::Left;
  double rel = left ? (x * t1 - q * t2 * x).norm() : (x * t1 - t2 * q * x).norm();
  if (rel > tol.eff(d, scale))
    throw HypothesisViolated("q_intertwine_lift: relation fails, residual " +
                             std::to_string(rel));
  CMat composite = left ? CMat(q * t2) : CMat(t2 * q);
  if (spectral_norm(composite) > 1.0 + tol.eff(d, scale))
    throw CompositeNotContraction("q_intertwine_lift: composite not a "
                                  "contraction");

  BlockOperator v1 = schaffer_isometric_dilation(t1, levels, tol);
  BlockOperator v2 = schaffer_isometric_dilation(t2, levels, tol);
  CMat qbar;
  bool q_contractive = spectral_norm(q) <= 1.0 + tol.eff(d, scale);
  if (q_contractive)
    qbar = tower_matrix_on(v2.domain, q, tol);
  else
    qbar = qbar_direct_sum(v2.domain, q);
  CMat w = left ? CMat(qbar * v2.matrix) : CMat(v2.matrix * qbar);
  double wn = spectral_norm(w);
  if (wn > 1.0 + tol.eff(v2.domain.total_dim()))
    throw HypothesisViolated("q_intertwine_lift: composite lift not a "
                             "contraction");

  ContractiveLiftInput in;
  in.w = w;
  in.embed = embed_matrix(v2.domain);
  in.tprime = composite;
  in.assume_isometric = q_contractive;
  ContractiveLiftReduction red =
      contractive_lift_reduce(t1, in, x, levels, tol);

  LiftResult res;
  res.space = v2.domain;
  res.space_dom = v1.domain;
  res.y = red.b;
  res.v = v1.matrix;
  res.v2 = v2.matrix;
  res.qbar = qbar;
  res.engine = "contractive-lift";
  res.relation = left ? "YV1=QbarV2Y" : "YV1=V2QbarY";
  res.certs = red.certs;
  res.certs["lift_y"] = res.certs["lift_b"];
  res.certs.erase("lift_b");
  res.certs["norm_preservation"] =
      std::abs(spectral_norm(res.y) - spectral_norm(x));
  return res;
}

}  // namespace dilatron

#endif  // DILATRON_LIFTOPS_HPP
