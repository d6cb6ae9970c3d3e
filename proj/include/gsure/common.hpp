#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace gsure {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Error with a stable machine-readable kind ("model-singularity",
/// "subspace-violation", "non-converged", ...) next to the human message.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

inline bool all_finite(const Vector& v) { return v.allFinite(); }

}  // namespace gsure
