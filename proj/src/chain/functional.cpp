#include "fusion/chain/functional.hpp"

#include <cmath>

#include "fusion/error.hpp"

namespace fusion::chain {

std::string_view to_string(Basis b) noexcept { return b == Basis::polynomial ? "polynomial" : "bspline"; }

std::optional<Basis> parse_basis(std::string_view s) noexcept {
  if (s == "polynomial") return Basis::polynomial;
  if (s == "bspline") return Basis::bspline;
  return std::nullopt;
}

Eigen::VectorXd rescale_time(std::span<const BalancePoint> series) {
  Eigen::VectorXd t(static_cast<Eigen::Index>(series.size()));
  if (series.empty()) return t;
  std::int64_t lo = series.front().timestamp, hi = lo;
  for (const auto& p : series) {
    lo = std::min(lo, p.timestamp);
    hi = std::max(hi, p.timestamp);
  }
  const double span = static_cast<double>(hi - lo);
  for (std::size_t i = 0; i < series.size(); ++i)
    t(static_cast<Eigen::Index>(i)) = span > 0 ? static_cast<double>(series[i].timestamp - lo) / span : 0.0;
  return t;
}

FunctionalCoeffs fit_basis(const Eigen::VectorXd& t, const Eigen::VectorXd& y, Basis basis, int k) {
  if (k < 1) throw Error(Errc::BadConfig, "basis size must be >= 1");
  if (t.size() < k)
    throw Error(Errc::InsufficientPoints,
                std::to_string(t.size()) + " points cannot determine " + std::to_string(k) + " coefficients");
  const Eigen::MatrixXd x = design_matrix(t, basis, k);

  FunctionalCoeffs out;
  out.basis = basis;
  out.k = k;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  if (qr.rank() == k) {
    out.coeffs = qr.solve(y);
  } else {
    const Eigen::MatrixXd gram = x.transpose() * x + kRidge * Eigen::MatrixXd::Identity(k, k);
    out.coeffs = gram.ldlt().solve(x.transpose() * y);
    out.regularized = true;
  }
  out.residual = std::sqrt((x * out.coeffs - y).squaredNorm() / static_cast<double>(t.size()));
  return out;
}

FunctionalCoeffs fit_functional(std::span<const BalancePoint> series, Basis basis, int k) {
  Eigen::VectorXd y(static_cast<Eigen::Index>(series.size()));
  for (std::size_t i = 0; i < series.size(); ++i) y(static_cast<Eigen::Index>(i)) = series[i].balance;
  return fit_basis(rescale_time(series), y, basis, k);
}

FunctionalCoeffs fit_profile(const AddressProfile& profile, Basis basis, int k) {
  auto out = fit_functional(profile.balance_series, basis, k);
  out.address = profile.address;
  return out;
}

}  // namespace fusion::chain
