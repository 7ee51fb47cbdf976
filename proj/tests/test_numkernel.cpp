#include "doctest.h"

#include "dilatron/instances.hpp"
#include "dilatron/numkernel.hpp"

using namespace dilatron;

namespace {
CMat diag2(double a, double b) {
  CMat m = CMat::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}
}  // namespace

TEST_CASE("psd_sqrt basics") {
  CHECK((psd_sqrt(identity(3)) - identity(3)).norm() == doctest::Approx(0.0));
  CHECK(psd_sqrt(CMat::Zero(2, 2)).norm() == doctest::Approx(0.0));

  CMat s = psd_sqrt(diag2(4.0, 9.0));
  CHECK((s - diag2(2.0, 3.0)).norm() < 1e-12);
  CHECK((s * s - diag2(4.0, 9.0)).norm() < 1e-12);

  CMat bad(2, 2);
  bad << 1.0, 2.0, 0.0, 1.0;
  CHECK_THROWS_AS(psd_sqrt(bad), NotHermitian);
  CHECK_THROWS_AS(psd_sqrt(diag2(1.0, -1.0)), IndefiniteInput);
}

TEST_CASE("defect pairs") {
  DefectPair z = defect_pair(CMat::Zero(2, 2));
  CHECK((z.defect - identity(2)).norm() < 1e-14);
  CHECK((z.codefect - identity(2)).norm() < 1e-14);

  CMat col(2, 1);
  col << 1.0, 0.0;
  DefectPair iso = defect_pair(col);
  CHECK(iso.defect.norm() < 1e-12);
  CHECK((iso.codefect - diag2(0.0, 1.0)).norm() < 1e-7);

  DefectPair half = defect_pair(CMat(0.5 * identity(2)));
  double root3over2 = std::sqrt(3.0) / 2.0;
  CHECK((half.defect - root3over2 * identity(2)).norm() < 1e-12);
  CHECK((half.codefect - root3over2 * identity(2)).norm() < 1e-12);

  CHECK_THROWS_AS(defect_pair(CMat(2.0 * identity(2))), NotAContraction);
}

TEST_CASE("defect identities on random contractions") {
  Rng rng(11);
  for (int i = 0; i < 50; ++i) {
    Index n = 1 + static_cast<Index>(rng() % 6);
    CMat t = random_contraction(rng, n);
    DefectPair d = defect_pair(t);
    CHECK((d.defect * d.defect + t.adjoint() * t - identity(n)).norm() <
          1e-10);
    CHECK((d.codefect * d.codefect + t * t.adjoint() - identity(n)).norm() <
          1e-10);
    // intertwining identity T D_T = D_{T*} T
    CHECK((t * d.defect - d.codefect * t).norm() < 1e-9);
  }
}

TEST_CASE("douglas_solve") {
  Rng rng(7);
  CMat b = random_matrix(rng, 3, 3);
  DouglasResult same = douglas_solve(b, b);
  CHECK(same.feasible);
  CHECK((b * same.z - b).norm() < 1e-10);
  // Z acts as the identity on range(b*)
  CMat p = range_projector(CMat(b.adjoint()));
  CHECK((same.z * p - p).norm() < 1e-9);

  DouglasResult half = douglas_solve(CMat(0.5 * b), b);
  CHECK(half.feasible);
  CHECK((b * half.z - 0.5 * b).norm() < 1e-10);
  CHECK((half.z - 0.5 * p).norm() < 1e-9);

  DouglasResult inf = douglas_solve(identity(2), diag2(1.0, 0.0));
  CHECK(!inf.feasible);
  CHECK(inf.witness == doctest::Approx(-1.0));
}

TEST_CASE("douglas feasibility matches the eigenvalue oracle") {
  Rng rng(123);
  int checked = 0;
  for (int i = 0; i < 200; ++i) {
    CMat a = random_matrix(rng, 4, 4);
    CMat b = random_matrix(rng, 4, 4);
    if (i % 2 == 0) a *= 0.2;  // mix feasible and infeasible cases
    CMat gap = b * b.adjoint() - a * a.adjoint();
    Eigen::SelfAdjointEigenSolver<CMat> es(gap);
    double mineig = es.eigenvalues().minCoeff();
    if (std::abs(mineig) < 1e-6) continue;  // skip near-boundary draws
    DouglasResult r = douglas_solve(a, b);
    CHECK(r.feasible == (mineig > 0));
    if (r.feasible) CHECK((a - b * r.z).norm() < 1e-9);
    ++checked;
  }
  CHECK(checked > 150);
}

TEST_CASE("douglas_solve_pair") {
  Rng rng(5);
  CMat a1 = random_matrix(rng, 3, 3);
  DouglasPairResult triv = douglas_solve_pair(a1, a1, CMat::Zero(3, 2));
  CHECK(triv.feasible);
  CHECK((a1 * triv.z1 - a1).norm() < 1e-10);
  CHECK(triv.z2.norm() < 1e-10);

  // columns of an isometry: a0 = a1 + a2 splits with Z1*Z1 + Z2*Z2 <= I
  CMat u = random_unitary(rng, 4);
  CMat c1 = u.leftCols(2), c2 = u.rightCols(2);
  CMat a0(4, 4);
  a0 << c1, c2;
  DouglasPairResult split = douglas_solve_pair(a0, c1, c2);
  CHECK(split.feasible);
  CHECK((c1 * split.z1 + c2 * split.z2 - a0).norm() < 1e-10);
  CMat gram = split.z1.adjoint() * split.z1 + split.z2.adjoint() * split.z2;
  CHECK(spectral_norm(gram) < 1.0 + 1e-9);

  // a0 = 2 a1 with a1 = a2 = I/2: decided by the eigen oracle
  CMat half = 0.5 * identity(2);
  CMat a0b = 2.0 * half;
  CMat gap = half * half.adjoint() * 2.0 - a0b * a0b.adjoint();
  Eigen::SelfAdjointEigenSolver<CMat> es(gap);
  DouglasPairResult r = douglas_solve_pair(a0b, half, half);
  CHECK(r.feasible == (es.eigenvalues().minCoeff() > -1e-12));
}

TEST_CASE("triangular completion") {
  Rng rng(9);
  CMat t1 = random_contraction(rng, 3, 0.8);
  CMat t2 = random_contraction(rng, 3, 0.8);

  auto zero = triangular_complete(t1, t2, CMat::Zero(3, 3));
  REQUIRE(zero.has_value());
  CHECK(zero->parameter.norm() < 1e-9);
  CHECK(zero->achieved_norm ==
        doctest::Approx(std::max(spectral_norm(t1), spectral_norm(t2))));

  // vanishing diagonal: any contraction X completes with C = X
  CMat x = random_contraction(rng, 3, 0.9);
  auto free = triangular_complete(CMat::Zero(3, 3), CMat::Zero(3, 3), x);
  REQUIRE(free.has_value());
  CHECK((free->parameter - x).norm() < 1e-9);
  CHECK(free->achieved_norm <= 1.0 + 1e-9);

  // vanishing defects: nothing nonzero fits
  CHECK(!triangular_complete(identity(3), identity(3), x).has_value());

  // reconstruction: X = D_{T1*} C D_{T2} and the block norm stays <= 1
  auto gen = triangular_complete(t1, t2,
                                 CMat(0.3 * codefect(t1) * x * defect(t2)));
  REQUIRE(gen.has_value());
  CHECK(gen->achieved_norm <= 1.0 + 1e-9);
  CMat rebuilt = codefect(t1) * gen->parameter * defect(t2);
  CHECK((rebuilt - 0.3 * codefect(t1) * x * defect(t2)).norm() < 1e-9);
}

TEST_CASE("dual parrott completion") {
  Rng rng(21);

  // full subspaces: nothing to extend
  CMat x = random_matrix(rng, 3, 3);
  CompletionResult full =
      dual_parrott_complete(x, CMat(x.adjoint()), identity(3), identity(3));
  CHECK((full.completed - x).norm() < 1e-10);

  CompletionResult zero = dual_parrott_complete(
      CMat::Zero(3, 1), CMat::Zero(3, 1), identity(3).leftCols(1),
      identity(3).leftCols(1));
  CHECK(zero.completed.norm() < 1e-12);
  CHECK(zero.achieved_norm == doctest::Approx(0.0));

  // 1-dim H inside 2-dim spaces, X = X' = [1/2]: some Y with norm 1/2
  CMat xh = CMat::Zero(2, 1);
  xh(0, 0) = 0.5;
  CompletionResult small = dual_parrott_complete(
      xh, xh, identity(2).leftCols(1), identity(2).leftCols(1));
  CHECK((small.completed.col(0) - xh.col(0)).norm() < 1e-12);
  CHECK((small.completed.adjoint().col(0) - xh.col(0)).norm() < 1e-12);
  CHECK(small.achieved_norm == doctest::Approx(0.5).epsilon(1e-9));

  // random compatible data: restrictions exact, norm bounded by the max
  for (int trial = 0; trial < 20; ++trial) {
    Index k = 4, h = 2, hp = 2;
    CMat y = random_matrix(rng, k, k);
    CMat eh = random_unitary(rng, k).leftCols(h);
    CMat ehp = random_unitary(rng, k).leftCols(hp);
    CMat xr = y * eh;                  // X = Y|_H
    CMat xpr = y.adjoint() * ehp;      // X' = Y*|_{H'}
    CompletionResult c = dual_parrott_complete(xr, xpr, eh, ehp);
    CHECK((c.completed * eh - xr).norm() < 1e-10);
    CHECK((c.completed.adjoint() * ehp - xpr).norm() < 1e-10);
    double mu = std::max(spectral_norm(xr), spectral_norm(xpr));
    CHECK(c.achieved_norm <= mu * (1.0 + 1e-9));
  }

  // incompatible data must be rejected
  CMat bad = CMat::Ones(2, 1);
  CHECK_THROWS_AS(dual_parrott_complete(bad, CMat(-bad), identity(2).leftCols(1),
                                        identity(2).leftCols(1)),
                  IncompatibleData);
}

TEST_CASE("parrott corner achieves the brute-force optimum") {
  // 2x2 scalar-block completion [[a, b], [c, d]] with row/column maxima mu:
  // sweep the free corner over a grid and check nothing beats mu, while the
  // constructed completion reaches it
  Rng rng(37);
  for (int trial = 0; trial < 10; ++trial) {
    CMat x(2, 1), xp(2, 1);
    x << Complex(runif(rng, -0.6, 0.6), runif(rng, -0.6, 0.6)),
        Complex(runif(rng, -0.6, 0.6), runif(rng, -0.6, 0.6));
    xp(0, 0) = std::conj(x(0, 0));  // compatibility on the shared corner
    xp(1, 0) = Complex(runif(rng, -0.6, 0.6), runif(rng, -0.6, 0.6));
    CompletionResult c = dual_parrott_complete(x, xp, identity(2).leftCols(1),
                                               identity(2).leftCols(1));
    double mu = std::max(spectral_norm(x), spectral_norm(xp));
    CHECK(c.achieved_norm <= mu * (1.0 + 1e-10));

    // brute-force sweep over the free corner
    double best = std::numeric_limits<double>::infinity();
    for (double re = -1.0; re <= 1.0; re += 0.05) {
      for (double im = -1.0; im <= 1.0; im += 0.05) {
        CMat y(2, 2);
        y(0, 0) = x(0, 0);
        y(1, 0) = x(1, 0);
        y(0, 1) = std::conj(xp(1, 0));
        y(1, 1) = Complex(re, im);
        best = std::min(best, spectral_norm(y));
      }
    }
    // the grid optimum cannot go below mu, and the construction is within
    // grid resolution of it
    CHECK(best >= mu - 1e-9);
    CHECK(c.achieved_norm <= best + 0.05);
  }
}

TEST_CASE("unitary completion of graph isometries") {
  Rng rng(31);

  CMat p = random_matrix(rng, 4, 2);
  CMat g_same = unitary_complete(p, p);
  CHECK((g_same * p - p).norm() < 1e-9);
  CHECK((g_same.adjoint() * g_same - identity(4)).norm() < 1e-10);

  CMat e1 = CMat::Zero(2, 1), e2 = CMat::Zero(2, 1);
  e1(0, 0) = 1.0;
  e2(1, 0) = 1.0;
  CMat swap = unitary_complete(e1, e2);
  CHECK((swap * e1 - e2).norm() < 1e-12);
  CHECK((swap.adjoint() * swap - identity(2)).norm() < 1e-12);

  for (int trial = 0; trial < 25; ++trial) {
    CMat pr = random_matrix(rng, 5, 3);
    CMat u = random_unitary(rng, 5);
    CMat rr = u * pr;  // enforces P*P = R*R
    CMat g = unitary_complete(pr, rr);
    CHECK((g * pr - rr).norm() < 1e-9);
    CHECK((g.adjoint() * g - identity(5)).norm() < 1e-10);
    CHECK((g * g.adjoint() - identity(5)).norm() < 1e-10);
  }

  CHECK_THROWS_AS(unitary_complete(identity(2), CMat(0.5 * identity(2))),
                  GeneratorMismatch);
}

TEST_CASE("pinv rank cutoff") {
  CMat m = diag2(1.0, 1e-14);
  CMat mp = pinv(m);
  CHECK(mp(0, 0).real() == doctest::Approx(1.0));
  CHECK(std::abs(mp(1, 1)) < 1e-12);  // below the relative cutoff
}
