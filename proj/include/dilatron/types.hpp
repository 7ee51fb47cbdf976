#ifndef DILATRON_TYPES_HPP
#define DILATRON_TYPES_HPP

#include <Eigen/Core>
#include <Eigen/Dense>

#include <complex>
#include <map>
#include <stdexcept>
#include <string>

namespace dilatron {

using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using Index = Eigen::Index;

// Base tolerance is interpreted relative to dimension and input scale,
// see Tolerance::eff().
struct Tolerance {
  double base = 1e-8;

  double eff(Index dim, double scale = 1.0) const {
    double d = dim > 1 ? static_cast<double>(dim) : 1.0;
    double s = scale > 1.0 ? scale : 1.0;
    return base * d * s;
  }
};

// Hypothesis/precondition violations. The CLI maps these to exit code 2.
class HypothesisViolated : public std::runtime_error {
 public:
  explicit HypothesisViolated(const std::string& what)
      : std::runtime_error(what) {}
};

class DimensionMismatch : public HypothesisViolated {
 public:
  explicit DimensionMismatch(const std::string& what)
      : HypothesisViolated(what) {}
};

class NotHermitian : public HypothesisViolated {
 public:
  explicit NotHermitian(const std::string& what) : HypothesisViolated(what) {}
};

class IndefiniteInput : public HypothesisViolated {
 public:
  explicit IndefiniteInput(const std::string& what)
      : HypothesisViolated(what) {}
};

class NotAContraction : public HypothesisViolated {
 public:
  explicit NotAContraction(const std::string& what)
      : HypothesisViolated(what) {}
};

class NotStrict : public HypothesisViolated {
 public:
  explicit NotStrict(const std::string& what) : HypothesisViolated(what) {}
};

class ConditioningFailure : public HypothesisViolated {
 public:
  explicit ConditioningFailure(const std::string& what)
      : HypothesisViolated(what) {}
};

class IncompatibleData : public HypothesisViolated {
 public:
  explicit IncompatibleData(const std::string& what)
      : HypothesisViolated(what) {}
};

class GeneratorMismatch : public HypothesisViolated {
 public:
  explicit GeneratorMismatch(const std::string& what)
      : HypothesisViolated(what) {}
};

class CompositeNotContraction : public HypothesisViolated {
 public:
  explicit CompositeNotContraction(const std::string& what)
      : HypothesisViolated(what) {}
};

class InfeasibleError : public HypothesisViolated {
 public:
  InfeasibleError(const std::string& what, double witness)
      : HypothesisViolated(what), witness_eigenvalue(witness) {}
  double witness_eigenvalue;
};

class GenerationFailed : public std::runtime_error {
 public:
  explicit GenerationFailed(const std::string& what)
      : std::runtime_error(what) {}
};

// Named residuals attached to every constructed lift/dilation.
using CertificateMap = std::map<std::string, double>;

inline double worst_certificate(const CertificateMap& certs) {
  double w = 0.0;
  for (const auto& [name, r] : certs) {
    (void)name;
    if (r > w) w = r;
  }
  return w;
}

}  // namespace dilatron

#endif  // DILATRON_TYPES_HPP
