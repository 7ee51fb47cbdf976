#ifndef DILATRON_SCHAFFER_HPP
#define DILATRON_SCHAFFER_HPP

// Schaffer-type towers: the explicit block-matrix isometric dilation
//   V(h0, h1, h2, ...) = (T h0, D_T h0, h1, h2, ...)
// on H (+) D_T (+) D_T (+) ..., and its adjoint, the co-isometric extension
//   Z(h0, h1, h2, ...) = (T h0 + D_{T*} h1, h2, h3, ...).
// Defect blocks are unreduced (full copies of the underlying space), so the
// displayed identities hold verbatim; minimality is not claimed.

#include <string>

#include "dilatron/blockspace.hpp"
#include "dilatron/numkernel.hpp"

namespace dilatron {

inline DirectSumSpace tower_space(Index head_dim, Index levels,
                                  const std::string& head = "H",
                                  const std::string& tail = "D") {
  return DirectSumSpace::uniform(head, head_dim, tail, head_dim, levels);
}

// Isometric dilation of a (square) contraction t, truncated to `levels`
// defect copies. The image of the last block is dropped; forward
// bandwidth is 1.
inline BlockOperator schaffer_isometric_dilation(const CMat& t, Index levels,
                                                 Tolerance tol = {}) {
  if (t.rows() != t.cols())
    throw DimensionMismatch("schaffer_isometric_dilation: square input only");
  double nrm = spectral_norm(t);
  if (nrm > 1.0 + tol.eff(t.rows()))
    throw NotAContraction("schaffer_isometric_dilation: ||T|| = " +
                          std::to_string(nrm));
  const Index d = t.rows();
  CMat dt = defect(t, tol);
  BlockOperator v;
  v.domain = tower_space(d, levels);
  v.codomain = v.domain;
  v.forward_bandwidth = 1;
  const Index n = v.domain.total_dim();
  v.matrix = CMat::Zero(n, n);
  v.matrix.topLeftCorner(d, d) = t;
  if (levels > 0) v.matrix.block(d, 0, d, d) = dt;
  for (Index b = 1; b < levels; ++b)
    v.matrix.block((b + 1) * d, b * d, d, d) = identity(d);
  return v;
}

// Co-isometric extension of t: the adjoint tower over t*.
inline BlockOperator coisometric_extension(const CMat& t, Index levels,
                                           Tolerance tol = {}) {
  BlockOperator z = block_adjoint(
      schaffer_isometric_dilation(t.adjoint(), levels, tol));
  for (auto& c : z.domain.components) c.first = "D_Tstar";
  z.domain.components[0].first = "H";
  z.codomain = z.domain;
  return z;
}

// Certificates for a single tower: isometry (or co-isometry) on the exact
// domain and the lift (extension) property against t.
inline CertificateMap tower_certificates(const BlockOperator& v, const CMat& t,
                                         bool isometric_side) {
  CertificateMap c;
  CMat iota = embed_matrix(v.domain);
  Index exact = v.exact_input_dim();
  if (isometric_side) {
    c["isometry"] = isometry_defect_on(v.matrix, exact);
    // lift: V* restricted to embedded H acts as t*
    c["lift"] = (v.matrix.adjoint() * iota - iota * t.adjoint()).norm();
  } else {
    c["coisometry"] = coisometry_defect_on(
        v.matrix, v.codomain.leading_dim(v.codomain.block_count() -
                                         v.forward_bandwidth));
    // extension: Z restricted to embedded H acts as t
    c["extension"] = (v.matrix * iota - iota * t).norm();
  }
  return c;
}

}  // namespace dilatron

#endif  // DILATRON_SCHAFFER_HPP
