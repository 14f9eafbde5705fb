#include "fusion/chain/activity.hpp"

#include <cmath>
#include <limits>

#include "fusion/error.hpp"

namespace fusion::chain {

Eigen::VectorXd activity_features(const AddressProfile& profile, const FunctionalCoeffs& coeffs) {
  Eigen::VectorXd v(4 + coeffs.coeffs.size());
  v << profile.tx_frequency, std::log1p(profile.total_usd_in), std::log1p(profile.total_usd_out),
      profile.lifespan_days(), coeffs.coeffs;
  return v;
}

Standardizer Standardizer::fit(const Eigen::MatrixXd& x) {
  Standardizer s;
  const auto n = static_cast<double>(x.rows());
  s.mean = x.colwise().mean();
  s.scale = ((x.rowwise() - s.mean).array().square().colwise().sum() / n).sqrt().matrix();
  for (Eigen::Index j = 0; j < s.scale.size(); ++j)
    if (!(s.scale(j) > 0.0)) s.scale(j) = 1.0;
  return s;
}

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& x) const {
  return (x.rowwise() - mean).array().rowwise() / scale.array();
}

Eigen::VectorXd Standardizer::apply(const Eigen::VectorXd& v) const {
  return ((v.transpose() - mean).array() / scale.array()).transpose();
}

Eigen::MatrixXd activity_matrix(std::span<const AddressProfile> profiles, std::span<const FunctionalCoeffs> coeffs) {
  if (profiles.size() != coeffs.size()) throw Error(Errc::BadConfig, "one coefficient set per profile is required");
  if (profiles.empty()) return Eigen::MatrixXd(0, 0);
  const Eigen::Index dim = 4 + coeffs.front().coeffs.size();
  Eigen::MatrixXd x(static_cast<Eigen::Index>(profiles.size()), dim);
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    if (coeffs[i].coeffs.size() + 4 != dim) throw Error(Errc::BadConfig, "coefficient counts differ between addresses");
    x.row(static_cast<Eigen::Index>(i)) = activity_features(profiles[i], coeffs[i]).transpose();
  }
  return Standardizer::fit(x).apply(x);
}

AddressGroups cluster_addresses(std::span<const AddressProfile> profiles, std::span<const FunctionalCoeffs> coeffs,
                                const correlate::DbscanParams& params) {
  AddressGroups out;
  for (const auto& p : profiles) out.addresses.push_back(p.address);
  out.assignment = correlate::dbscan(activity_matrix(profiles, coeffs), params);
  return out;
}

void NearestCentroid::fit(const Eigen::MatrixXd& features, const std::vector<std::string>& labels) {
  if (features.rows() == 0 || static_cast<std::size_t>(features.rows()) != labels.size())
    throw Error(Errc::BadConfig, "need one label per non-empty feature row");
  standardizer_ = Standardizer::fit(features);
  const Eigen::MatrixXd z = standardizer_.apply(features);
  std::map<std::string, std::pair<Eigen::VectorXd, double>> sums;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto [it, fresh] = sums.try_emplace(labels[i], Eigen::VectorXd::Zero(z.cols()), 0.0);
    it->second.first += z.row(static_cast<Eigen::Index>(i)).transpose();
    it->second.second += 1.0;
  }
  centroids_.clear();
  for (const auto& [label, acc] : sums) centroids_.emplace(label, acc.first / acc.second);
  fitted_ = true;
}

ActivityPrediction NearestCentroid::predict(const Eigen::VectorXd& features) const {
  if (!fitted_) throw Error(Errc::UnfittedClassifier, "nearest-centroid classifier has not been fitted");
  if (features.size() != standardizer_.mean.size())
    throw Error(Errc::BadConfig, "feature length differs from the training data");
  const Eigen::VectorXd z = standardizer_.apply(features);
  const std::string* best = nullptr;
  double d1 = 0.0, d2 = std::numeric_limits<double>::infinity();
  for (const auto& [label, c] : centroids_) {
    const double d = (z - c).norm();
    if (!best || d < d1) {  // map order keeps the smaller label on ties
      if (best) d2 = d1;
      best = &label;
      d1 = d;
    } else if (d < d2) {
      d2 = d;
    }
  }
  ActivityPrediction out{*best, 1.0};
  if (std::isfinite(d2)) out.confidence = (d1 + d2) > 0.0 ? 1.0 - d1 / (d1 + d2) : 0.5;
  return out;
}

ActivityPrediction classify_activity(const ActivityClassifier& classifier, const AddressProfile& profile,
                                     const FunctionalCoeffs& coeffs) {
  return classifier.predict(activity_features(profile, coeffs));
}

}  // namespace fusion::chain
