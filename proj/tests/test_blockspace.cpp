#include "doctest.h"

#include "dilatron/blockspace.hpp"
#include "dilatron/instances.hpp"
#include "dilatron/schaffer.hpp"

using namespace dilatron;

TEST_CASE("embed and compress") {
  DirectSumSpace s = DirectSumSpace::uniform("H", 2, "D", 2, 2);
  CHECK(s.total_dim() == 6);

  CVec e1 = CVec::Zero(2);
  e1(0) = 1.0;
  CVec v = embed(e1, s);
  CHECK(v.size() == 6);
  CHECK(v(0) == Complex(1.0, 0.0));
  CHECK(v.tail(5).norm() == 0.0);

  CHECK(embed(CVec::Zero(2), s).norm() == 0.0);

  Rng rng(3);
  CVec h = random_vector(rng, 2);
  CHECK(embed(h, s).norm() == doctest::Approx(h.norm()));  // isometric
  CHECK((compress(embed(h, s), s) - h).norm() == 0.0);

  // adjointness <compress v, h> = <v, embed h>
  CVec w = random_vector(rng, 6);
  Complex lhs = h.dot(compress(w, s));
  Complex rhs = embed(h, s).dot(w);
  CHECK(std::abs(lhs - rhs) < 1e-12);

  CVec tail_only = CVec::Zero(6);
  tail_only(4) = 1.0;
  CHECK(compress(tail_only, s).norm() == 0.0);

  CHECK_THROWS_AS(embed(CVec::Zero(3), s), DimensionMismatch);
}

TEST_CASE("compose tracks bandwidth") {
  Rng rng(17);
  CMat t = random_contraction(rng, 2, 0.9);
  BlockOperator v = schaffer_isometric_dilation(t, 6);
  BlockOperator id = block_identity(v.domain);

  BlockOperator vi = compose(id, v);
  CHECK(vi.forward_bandwidth == 1);
  CHECK((vi.matrix - v.matrix).norm() == 0.0);

  BlockOperator vv = compose(v, v);
  CHECK(vv.forward_bandwidth == 2);
  CHECK(vv.exact_input_blocks() == v.domain.block_count() - 2);

  // bandwidth-located support: applying V twice to a block-supported vector
  // lands two blocks deeper
  CVec x = CVec::Zero(v.domain.total_dim());
  x.segment(2 * 2, 2) = random_vector(rng, 2);  // block 2
  CVec y = vv.matrix * x;
  CHECK(y.head(3 * 2).norm() < 1e-14);
  CHECK(y.segment(4 * 2, 2).norm() > 0.0);

  // composition inside the exact domain equals a deeper truncation
  BlockOperator vbig = schaffer_isometric_dilation(t, 8);
  CVec z = CVec::Zero(v.domain.total_dim());
  z.head(2) = random_vector(rng, 2);
  CVec zbig = CVec::Zero(vbig.domain.total_dim());
  zbig.head(2) = z.head(2);
  CVec small = vv.matrix * z;
  CVec big = vbig.matrix * (vbig.matrix * zbig);
  CHECK((small - big.head(small.size())).norm() < 1e-13);
}

TEST_CASE("adjoint") {
  Rng rng(19);
  CMat t = random_contraction(rng, 3, 0.9);
  BlockOperator v = schaffer_isometric_dilation(t, 5);
  BlockOperator a = block_adjoint(v);
  BlockOperator aa = block_adjoint(a);
  CHECK((aa.matrix - v.matrix).norm() == 0.0);

  // <V u, w> = <u, V* w>
  CVec u = random_vector(rng, v.domain.total_dim());
  CVec w = random_vector(rng, v.domain.total_dim());
  Complex lhs = w.dot(v.matrix * u);
  Complex rhs = (a.matrix * w).dot(u);
  CHECK(std::abs(lhs - rhs) < 1e-10);

  // adjoint of the isometric tower is co-isometric on the exact domain
  CHECK(coisometry_defect_on(a.matrix, a.codomain.leading_dim(
                                           a.codomain.block_count() - 1)) <
        1e-12);
}

TEST_CASE("schaffer tower certificates") {
  Rng rng(23);
  for (int i = 0; i < 20; ++i) {
    Index n = 1 + static_cast<Index>(rng() % 4);
    CMat t = random_contraction(rng, n);
    BlockOperator v = schaffer_isometric_dilation(t, 8);
    CertificateMap c = tower_certificates(v, t, true);
    CHECK(c["isometry"] < 1e-10);
    CHECK(c["lift"] < 1e-10);

    BlockOperator z = coisometric_extension(t, 8);
    CertificateMap cz = tower_certificates(z, t, false);
    CHECK(cz["coisometry"] < 1e-10);
    CHECK(cz["extension"] < 1e-10);

    // Z agrees with the adjoint of the dilation of t* block for block
    BlockOperator vstar = schaffer_isometric_dilation(CMat(t.adjoint()), 8);
    CHECK((z.matrix - vstar.matrix.adjoint()).norm() == 0.0);
  }
}

TEST_CASE("tower on zero and unitary input") {
  // t = 0: V is the block down-shift fed by the identity defect
  BlockOperator v0 = schaffer_isometric_dilation(CMat::Zero(2, 2), 3);
  CHECK(v0.matrix.block(2, 0, 2, 2).isApprox(identity(2)));
  CHECK(v0.matrix.topLeftCorner(2, 2).norm() == 0.0);

  Rng rng(29);
  CMat u = random_unitary(rng, 2);
  BlockOperator vu = schaffer_isometric_dilation(u, 4);
  // defect of a unitary vanishes: V acts as u on the head block
  CVec h = random_vector(rng, 2);
  CVec img = vu.matrix * embed(h, vu.domain);
  CHECK((compress(img, vu.domain) - u * h).norm() < 1e-10);
  CHECK(img.tail(vu.domain.total_dim() - 2).norm() < 1e-7);

  // power dilation: P_H V^k embed(h) = t^k h on the exact budget
  CMat t = random_contraction(rng, 2, 0.8);
  BlockOperator v = schaffer_isometric_dilation(t, 8);
  CVec cur = embed(h, v.domain);
  CMat tk = identity(2);
  for (int k = 1; k <= 5; ++k) {
    cur = v.matrix * cur;
    tk = t * tk;
    CHECK((compress(cur, v.domain) - tk * h).norm() < 1e-11);
  }
}
