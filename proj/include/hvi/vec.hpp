#ifndef HVI_VEC_HPP
#define HVI_VEC_HPP

#include <Eigen/Dense>
#include <limits>
#include <string>

#include "hvi/errors.hpp"

namespace hvi {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

inline bool all_finite(const Vector& v) { return v.allFinite(); }

inline void require_finite(const Vector& v, const std::string& what) {
  if (!v.allFinite()) throw NumericsError("non-finite value produced by " + what);
}

inline void require_dim(const Vector& v, Eigen::Index dim, const std::string& what) {
  if (v.size() != dim)
    throw NumericsError("dimension mismatch in " + what + ": got " +
                        std::to_string(v.size()) + ", expected " + std::to_string(dim));
}

}  // namespace hvi

#endif
