#ifndef DILATRON_BLOCKSPACE_HPP
#define DILATRON_BLOCKSPACE_HPP

// Truncated direct sums H (+) H (+) ... and block operators between them,
// with shift-bandwidth bookkeeping that tells on which leading blocks a
// truncated operator still acts exactly like its infinite counterpart.

#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "dilatron/numkernel.hpp"
#include "dilatron/types.hpp"

namespace dilatron {

struct DirectSumSpace {
  // Ordered (label, dimension) components; labels document provenance
  // ("H", "D_Tstar", "Kprime", ...).
  std::vector<std::pair<std::string, Index>> components;

  Index total_dim() const {
    Index t = 0;
    for (const auto& c : components) t += c.second;
    return t;
  }
  Index block_count() const { return static_cast<Index>(components.size()); }
  Index truncation_level() const { return block_count(); }

  Index block_offset(Index b) const {
    Index off = 0;
    for (Index i = 0; i < b; ++i) off += components[i].second;
    return off;
  }
  Index block_dim(Index b) const { return components[b].second; }

  // Dimension spanned by the first `blocks` components.
  Index leading_dim(Index blocks) const {
    Index off = 0;
    for (Index i = 0; i < blocks && i < block_count(); ++i)
      off += components[i].second;
    return off;
  }

  bool same_shape(const DirectSumSpace& o) const {
    if (components.size() != o.components.size()) return false;
    for (size_t i = 0; i < components.size(); ++i)
      if (components[i].second != o.components[i].second) return false;
    return true;
  }

  static DirectSumSpace uniform(const std::string& head_label, Index head_dim,
                                const std::string& tail_label, Index tail_dim,
                                Index tail_copies) {
    DirectSumSpace s;
    s.components.emplace_back(head_label, head_dim);
    for (Index i = 0; i < tail_copies; ++i)
      s.components.emplace_back(tail_label, tail_dim);
    return s;
  }
};

struct BlockOperator {
  DirectSumSpace domain;
  DirectSumSpace codomain;
  CMat matrix;
  // Max number of block positions the true infinite operator shifts content
  // toward the tail. Vectors on the first (blocks - bandwidth) blocks are
  // mapped exactly by the truncation.
  Index forward_bandwidth = 0;

  Index exact_input_blocks() const {
    Index e = domain.block_count() - forward_bandwidth;
    return e > 0 ? e : 0;
  }
  Index exact_input_dim() const { return domain.leading_dim(exact_input_blocks()); }
};

inline void check_space(const BlockOperator& op) {
  if (op.matrix.rows() != op.codomain.total_dim() ||
      op.matrix.cols() != op.domain.total_dim())
    throw DimensionMismatch("BlockOperator: matrix does not match spaces");
}

// Embedding of a vector of H into block 0 of the space.
inline CVec embed(const CVec& h, const DirectSumSpace& space) {
  if (space.block_count() == 0 || h.size() != space.block_dim(0))
    throw DimensionMismatch("embed: vector does not fit the head block");
  CVec v = CVec::Zero(space.total_dim());
  v.head(h.size()) = h;
  return v;
}

// Adjoint of embed: the block-0 component.
inline CVec compress(const CVec& v, const DirectSumSpace& space) {
  if (v.size() != space.total_dim())
    throw DimensionMismatch("compress: vector does not match the space");
  return v.head(space.block_dim(0));
}

// Matrix of the head-block embedding H -> space.
inline CMat embed_matrix(const DirectSumSpace& space) {
  CMat e = CMat::Zero(space.total_dim(), space.block_dim(0));
  e.topRows(space.block_dim(0)) = identity(space.block_dim(0));
  return e;
}

inline BlockOperator compose(const BlockOperator& a, const BlockOperator& b) {
  if (a.domain.total_dim() != b.codomain.total_dim())
    throw DimensionMismatch("compose: a.domain must equal b.codomain");
  BlockOperator c;
  c.domain = b.domain;
  c.codomain = a.codomain;
  c.matrix = a.matrix * b.matrix;
  c.forward_bandwidth = a.forward_bandwidth + b.forward_bandwidth;
  return c;
}

// Conjugate transpose; the forward bandwidth is kept as the symmetric
// backward bound of the adjoint.
inline BlockOperator block_adjoint(const BlockOperator& a) {
  BlockOperator b;
  b.domain = a.codomain;
  b.codomain = a.domain;
  b.matrix = a.matrix.adjoint();
  b.forward_bandwidth = a.forward_bandwidth;
  return b;
}

inline BlockOperator block_identity(const DirectSumSpace& s) {
  BlockOperator b;
  b.domain = s;
  b.codomain = s;
  b.matrix = identity(s.total_dim());
  b.forward_bandwidth = 0;
  return b;
}

// Residual helpers used by every certificate in the library. All of them
// restrict to the exact sub-domain spanned by the first `blocks` blocks.

inline CMat leading_compression(const CMat& m, Index rows, Index cols) {
  return m.topLeftCorner(std::min(rows, m.rows()), std::min(cols, m.cols()));
}

// || (A - B) restricted to the first `dim` input coordinates ||
inline double restricted_residual(const CMat& a, const CMat& b, Index dim) {
  Index d = std::min({dim, a.cols(), b.cols()});
  return (a.leftCols(d) - b.leftCols(d)).norm();
}

// Isometry defect of V on vectors supported on the first `dim` coordinates:
// || P (V*V - I) P ||.
inline double isometry_defect_on(const CMat& v, Index dim) {
  CMat g = v.adjoint() * v - identity(v.cols());
  Index d = std::min(dim, v.cols());
  return g.topLeftCorner(d, d).norm();
}

inline double coisometry_defect_on(const CMat& v, Index dim) {
  return isometry_defect_on(v.adjoint(), dim);
}

}  // namespace dilatron

#endif  // DILATRON_BLOCKSPACE_HPP
