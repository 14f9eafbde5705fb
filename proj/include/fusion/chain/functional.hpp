#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "fusion/chain/ledger.hpp"

namespace fusion::chain {

enum class Basis { polynomial, bspline };

std::string_view to_string(Basis b) noexcept;
std::optional<Basis> parse_basis(std::string_view s) noexcept;

inline constexpr double kRidge = 1e-9;

struct FunctionalCoeffs {
  std::string address;
  Basis basis = Basis::polynomial;
  int k = 1;
  Eigen::VectorXd coeffs;
  double residual = 0.0;     // root-mean-square
  bool regularized = false;  // design was rank-deficient, ridge kRidge applied
};

/// Maps timestamps affinely onto [0, 1]; a single instant maps to 0.
Eigen::VectorXd rescale_time(std::span<const BalancePoint> series);

/// Evaluates the k basis functions at each t in [0, 1] (rows = points).
/// Polynomial: 1, t, ..., t^(k-1). B-spline: clamped uniform knots, degree
/// min(3, k-1), so k = 1 is the constant function.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> design_matrix(
    const Eigen::MatrixBase<Derived>& t, Basis basis, int k) {
  using Scalar = typename Derived::Scalar;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index n = t.size();
  Mat x(n, k);
  if (basis == Basis::polynomial) {
    for (Eigen::Index i = 0; i < n; ++i) {
      Scalar p = Scalar(1);
      for (int j = 0; j < k; ++j) {
        x(i, j) = p;
        p *= t(i);
      }
    }
    return x;
  }
  const int degree = std::min(3, k - 1);
  const int inner = k - degree - 1;  // interior knot count
  std::vector<Scalar> knots;
  for (int j = 0; j <= degree; ++j) knots.push_back(Scalar(0));
  for (int j = 1; j <= inner; ++j) knots.push_back(Scalar(j) / Scalar(inner + 1));
  for (int j = 0; j <= degree; ++j) knots.push_back(Scalar(1));
  const int spans = static_cast<int>(knots.size()) - 1;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Scalar ti = t(i);
    // Cox-de Boor, degree 0 then raised; the last span is closed at t = 1.
    std::vector<Scalar> b(static_cast<std::size_t>(spans), Scalar(0));
    for (int j = 0; j < spans; ++j) {
      const bool last = knots[j] < knots[j + 1] && knots[j + 1] == Scalar(1);
      if ((knots[j] <= ti && ti < knots[j + 1]) || (last && ti == Scalar(1))) b[j] = Scalar(1);
    }
    for (int d = 1; d <= degree; ++d) {
      for (int j = 0; j + d < spans; ++j) {
        Scalar left = Scalar(0), right = Scalar(0);
        if (knots[j + d] != knots[j]) left = (ti - knots[j]) / (knots[j + d] - knots[j]) * b[j];
        if (knots[j + d + 1] != knots[j + 1])
          right = (knots[j + d + 1] - ti) / (knots[j + d + 1] - knots[j + 1]) * b[j + 1];
        b[j] = left + right;
      }
    }
    for (int j = 0; j < k; ++j) x(i, j) = b[static_cast<std::size_t>(j)];
  }
  return x;
}

/// Least-squares fit of y against the k-term basis at rescaled times t.
/// Throws Error(InsufficientPoints) when fewer than k points are given.
FunctionalCoeffs fit_basis(const Eigen::VectorXd& t, const Eigen::VectorXd& y, Basis basis, int k);

FunctionalCoeffs fit_functional(std::span<const BalancePoint> series, Basis basis, int k);

/// Fits the profile's balance series and tags the result with its address.
FunctionalCoeffs fit_profile(const AddressProfile& profile, Basis basis, int k);

}  // namespace fusion::chain
