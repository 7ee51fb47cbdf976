#ifndef DILATRON_INSTANCES_HPP
#define DILATRON_INSTANCES_HPP

// Seeded instance generation. Feasible relation instances are generated,
// never assumed: either from exactly Q-commuting seed families (weighted
// shifts conjugated by a random unitary) or by a least-squares solve that
// is accepted only when the relation residual passes the gate.

#include <random>
#include <string>

#include "dilatron/liftops.hpp"
#include "dilatron/numkernel.hpp"

namespace dilatron {

using Rng = std::mt19937_64;

inline double runif(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline CMat random_matrix(Rng& rng, Index rows, Index cols) {
  std::normal_distribution<double> g(0.0, 1.0);
  CMat m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = Complex(g(rng), g(rng));
  return m;
}

inline CMat random_contraction(Rng& rng, Index n, double norm_cap = 0.95) {
  CMat m = random_matrix(rng, n, n);
  double s = spectral_norm(m);
  double target = runif(rng, 0.2, norm_cap);
  return s > 0 ? CMat(m * (target / s)) : m;
}

inline CMat random_unitary(Rng& rng, Index n) {
  CMat m = random_matrix(rng, n, n);
  Eigen::HouseholderQR<CMat> qr(m);
  CMat q = qr.householderQ() * identity(n);
  // fix the phase of the R diagonal for a Haar-like distribution
  CMat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index i = 0; i < n; ++i) {
    Complex d = r(i, i);
    if (std::abs(d) > 0) q.col(i) *= d / std::abs(d);
  }
  return q;
}

inline CVec random_vector(Rng& rng, Index n) {
  std::normal_distribution<double> g(0.0, 1.0);
  CVec v(n);
  for (Index i = 0; i < n; ++i) v(i) = Complex(g(rng), g(rng));
  return v;
}

inline Complex random_phase(Rng& rng) {
  double a = runif(rng, 0.0, 2.0 * M_PI);
  return Complex(std::cos(a), std::sin(a));
}

// A pair (T1, T2) with a unitary Q satisfying the positioned relation
// exactly: T2 is a diagonal of equal-modulus entries, T1 a weighted shift,
// Q the diagonal of phase ratios. Everything is conjugated by a random
// unitary to obtain dense matrices.
struct QCommutingTriple {
  CMat t1, t2, q;
};

inline QCommutingTriple random_unitary_q_commuting(Rng& rng, Index n,
                                                   QPosition pos,
                                                   double t1_norm = 0.9,
                                                   double t2_norm = 0.9) {
  std::vector<Complex> phase(n);
  for (Index i = 0; i < n; ++i) phase[i] = random_phase(rng);
  CMat t2 = CMat::Zero(n, n);
  for (Index i = 0; i < n; ++i) t2(i, i) = t2_norm * phase[i];
  CMat t1 = CMat::Zero(n, n);
  for (Index i = 0; i + 1 < n; ++i)
    t1(i + 1, i) = runif(rng, 0.3, 1.0) * random_phase(rng);
  double s1 = spectral_norm(t1);
  if (s1 > 0) t1 *= t1_norm / s1;

  // relation on the shift column: d_j c_j = q_* c_j d_{j+1}
  CMat q = CMat::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    Index jnext = i + 1 < n ? i + 1 : i;
    switch (pos) {
      case QPosition::Left:
      case QPosition::Middle:
        // q_{j+1} = d_j / d_{j+1}; free phase on the first slot
        q(i, i) = i == 0 ? random_phase(rng) : phase[i - 1] / phase[i];
        break;
      case QPosition::Right:
        // q_j = d_j / d_{j+1}; free phase on the last slot
        q(i, i) = i + 1 < n ? phase[i] / phase[jnext] : random_phase(rng);
        break;
    }
  }
  CMat u = random_unitary(rng, n);
  QCommutingTriple out;
  out.t1 = u.adjoint() * t1 * u;
  out.t2 = u.adjoint() * t2 * u;
  out.q = u.adjoint() * q * u;
  return out;
}

// Dense Q-commuting instance with Q from the canonical kernel construction
// (generically not unitary); the pair is scaled so the position composite
// is a contraction. Residual-gated.
inline QCommutingTriple random_case2_instance(Rng& rng, Index n, QPosition pos,
                                              double gate = 1e-10) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    CMat t1 = random_contraction(rng, n, 0.8);
    CMat t2 = random_contraction(rng, n, 0.8);
    CMat q;
    switch (pos) {
      case QPosition::Left:
        q = (t1 * t2) * pinv(t2 * t1);
        break;
      case QPosition::Middle:
        q = pinv(t2) * (t1 * t2) * pinv(t1);
        break;
      case QPosition::Right:
        q = pinv(t2 * t1) * (t1 * t2);
        break;
    }
    double rel = 0.0;
    switch (pos) {
      case QPosition::Left: rel = (t1 * t2 - q * t2 * t1).norm(); break;
      case QPosition::Middle: rel = (t1 * t2 - t2 * q * t1).norm(); break;
      case QPosition::Right: rel = (t1 * t2 - t2 * t1 * q).norm(); break;
    }
    if (rel > gate) continue;
    // scale the pair to tame the position composite; the kernel part of Q
    // is scale-free, so the relation is preserved exactly
    CMat comp = pos == QPosition::Left   ? CMat(q * t2)
                : pos == QPosition::Middle ? CMat(q * t1)
                                           : CMat(t1 * q);
    double c = spectral_norm(comp);
    if (c > 0.9) {
      double s = 0.9 / c;
      t1 *= s;
      t2 *= s;
      switch (pos) {
        case QPosition::Left: q = (t1 * t2) * pinv(t2 * t1); break;
        case QPosition::Middle: q = pinv(t2) * (t1 * t2) * pinv(t1); break;
        case QPosition::Right: q = pinv(t2 * t1) * (t1 * t2); break;
      }
      comp = pos == QPosition::Left   ? CMat(q * t2)
             : pos == QPosition::Middle ? CMat(q * t1)
                                        : CMat(t1 * q);
      if (spectral_norm(comp) > 1.0) continue;
      switch (pos) {
        case QPosition::Left: rel = (t1 * t2 - q * t2 * t1).norm(); break;
        case QPosition::Middle: rel = (t1 * t2 - t2 * q * t1).norm(); break;
        case QPosition::Right: rel = (t1 * t2 - t2 * t1 * q).norm(); break;
      }
      if (rel > gate) continue;
    }
    return {t1, t2, q};
  }
  throw GenerationFailed("random_case2_instance: gate rejected 100 candidates");
}

// Commuting pair: T2 random, T1 a random polynomial in T2, both contractions.
inline std::pair<CMat, CMat> random_commuting_pair(Rng& rng, Index n,
                                                   double cap = 0.9) {
  CMat t2 = random_contraction(rng, n, cap);
  CMat t1 = runif(rng, 0.2, 0.8) * identity(n) + Complex(runif(rng, -0.5, 0.5),
                                                         runif(rng, -0.5, 0.5)) *
                                                     t2 +
            Complex(runif(rng, -0.3, 0.3), 0.0) * t2 * t2;
  double s = spectral_norm(t1);
  if (s > cap) t1 *= cap / s;
  return {t1, t2};
}

// Intertwining instance T1 X = X T2 built from a similarity, gated.
struct IntertwineInstance {
  CMat t1, t2, x;
};

inline IntertwineInstance random_intertwine_instance(Rng& rng, Index n,
                                                     double cap = 0.8,
                                                     double gate = 1e-10) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    CMat t2 = random_contraction(rng, n, cap);
    CMat x = random_contraction(rng, n, cap);
    CMat t1 = x * t2 * pinv(x);
    double s = spectral_norm(t1);
    if (s > cap) {
      // shrink t2 instead, keeping the intertwiner
      t2 *= cap / s;
      t1 = x * t2 * pinv(x);
    }
    if ((t1 * x - x * t2).norm() <= gate && spectral_norm(t1) <= 1.0)
      return {t1, t2, x};
  }
  throw GenerationFailed("random_intertwine_instance: gate rejected");
}

// X T = T X Q instance with unitary (diagonal-phase) Q: X has equal-modulus
// diagonal entries against a weighted shift T.
struct LiftInstance {
  CMat t, x, q;
};

inline LiftInstance random_dmp_instance(Rng& rng, Index n, bool left_form,
                                        double xmod = 0.7) {
  // left_form: TX = QXT; otherwise XT = TXQ
  std::vector<Complex> xphase(n);
  for (Index i = 0; i < n; ++i) xphase[i] = random_phase(rng);
  CMat x = CMat::Zero(n, n);
  for (Index i = 0; i < n; ++i) x(i, i) = xmod * xphase[i];
  CMat t = CMat::Zero(n, n);
  for (Index i = 0; i + 1 < n; ++i)
    t(i + 1, i) = runif(rng, 0.3, 1.0) * random_phase(rng);
  double s = spectral_norm(t);
  if (s > 0) t *= runif(rng, 0.5, 0.9) / s;
  CMat q = CMat::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    if (left_form) {
      // t_{j+1,j} x_j = q_{j+1} x_{j+1} t_{j+1,j}
      q(i, i) = i == 0 ? random_phase(rng) : xphase[i - 1] / xphase[i];
    } else {
      // x_{j+1} t_{j+1,j} = t_{j+1,j} x_j q_j
      q(i, i) = i + 1 < n ? xphase[i + 1] / xphase[i] : random_phase(rng);
    }
  }
  CMat u = random_unitary(rng, n);
  LiftInstance out;
  out.t = u.adjoint() * t * u;
  out.x = u.adjoint() * x * u;
  out.q = u.adjoint() * q * u;
  return out;
}

// Q-intertwining instance X T1 = Q T2 X (left) or X T1 = T2 Q X (middle)
// with unitary Q: T1 and the composite share an eigenvalue and X is the
// rank-one eigenvector coupling, so the relation holds exactly.
struct QIntertwineInstance {
  CMat t1, t2, x, q;
};

inline QIntertwineInstance random_q_intertwine_instance(Rng& rng, Index n,
                                                        QPosition pos,
                                                        double gate = 1e-12) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    Complex lambda = runif(rng, 0.1, 0.6) * random_phase(rng);
    auto embed_eig = [&](Complex ev) {
      CMat core = random_contraction(rng, n, 0.8);
      CMat u = random_unitary(rng, n);
      CMat m = CMat::Zero(n, n);
      m(0, 0) = ev;
      m.bottomRightCorner(n - 1, n - 1) = core.bottomRightCorner(n - 1, n - 1);
      return CMat(u * m * u.adjoint());
    };
    CMat t1 = embed_eig(lambda);
    CMat comp = embed_eig(lambda);  // the positioned composite Q T2 or T2 Q
    CMat q = random_unitary(rng, n);
    CMat t2 = pos == QPosition::Left ? CMat(q.adjoint() * comp)
                                     : CMat(comp * q.adjoint());
    // rank-one coupling of the shared eigenvalue
    Eigen::ComplexEigenSolver<CMat> e1(t1), e2(comp);
    Index i1 = 0, i2 = 0;
    for (Index i = 0; i < n; ++i) {
      if (std::abs(e1.eigenvalues()(i) - lambda) <
          std::abs(e1.eigenvalues()(i1) - lambda))
        i1 = i;
      if (std::abs(e2.eigenvalues()(i) - lambda) <
          std::abs(e2.eigenvalues()(i2) - lambda))
        i2 = i;
    }
    // left eigenvector of t1 and right eigenvector of the composite
    Eigen::ComplexEigenSolver<CMat> e1t(CMat(t1.adjoint()));
    Index i1t = 0;
    for (Index i = 0; i < n; ++i)
      if (std::abs(e1t.eigenvalues()(i) - std::conj(lambda)) <
          std::abs(e1t.eigenvalues()(i1t) - std::conj(lambda)))
        i1t = i;
    CVec b = e1t.eigenvectors().col(i1t);
    CVec a = e2.eigenvectors().col(i2);
    CMat x = 0.7 * (a * b.adjoint());
    double rel = pos == QPosition::Left ? (x * t1 - q * t2 * x).norm()
                                        : (x * t1 - t2 * q * x).norm();
    if (rel <= gate && spectral_norm(t2) <= 1.0) return {t1, t2, x, q};
  }
  throw GenerationFailed("random_q_intertwine_instance: gate rejected");
}

// TX = QXT with strictly contractive diagonal Q: |x_j| increasing.
inline LiftInstance random_contractive_q_instance(Rng& rng, Index n) {
  Eigen::VectorXd mod(n);
  mod(0) = runif(rng, 0.2, 0.5);
  for (Index i = 1; i < n; ++i)
    mod(i) = mod(i - 1) * runif(rng, 1.05, 1.8);
  double top = mod(n - 1);
  CMat x = CMat::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    x(i, i) = (0.8 * mod(i) / top) * random_phase(rng);
  CMat t = CMat::Zero(n, n);
  for (Index i = 0; i + 1 < n; ++i)
    t(i + 1, i) = runif(rng, 0.3, 1.0) * random_phase(rng);
  double s = spectral_norm(t);
  if (s > 0) t *= runif(rng, 0.5, 0.9) / s;
  CMat q = CMat::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    if (i == 0)
      q(i, i) = runif(rng, 0.3, 0.9) * random_phase(rng);
    else
      q(i, i) = x(i - 1, i - 1) / x(i, i);  // modulus < 1 by construction
  }
  CMat u = random_unitary(rng, n);
  return {u.adjoint() * t * u, u.adjoint() * x * u, u.adjoint() * q * u};
}

}  // namespace dilatron

#endif  // DILATRON_INSTANCES_HPP
