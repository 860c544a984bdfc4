#ifndef MVEM_TYPES_HPP_
#define MVEM_TYPES_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mvem {

using Index = std::int64_t;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// zero-measure or otherwise unusable polytope
class GeometryError : public Error {
 public:
  using Error::Error;
};

// SPD factorization failed or basis lost rank
class ConditioningError : public Error {
 public:
  using Error::Error;
};

class TopologyError : public Error {
 public:
  using Error::Error;
};

class ConformityError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

class SingularSystemError : public SolverError {
 public:
  SingularSystemError(const std::string& what, int null_dim)
      : SolverError(what), null_dim_(null_dim) {}
  int null_dim() const { return null_dim_; }

 private:
  int null_dim_;
};

}  // namespace mvem

#endif
