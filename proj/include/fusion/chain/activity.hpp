#pragma once

#include <Eigen/Dense>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "fusion/chain/functional.hpp"
#include "fusion/chain/ledger.hpp"
#include "fusion/correlate/dbscan.hpp"

namespace fusion::chain {

/// [tx_frequency, log1p(usd_in), log1p(usd_out), lifespan_days, coeffs...].
/// Graph-neighbourhood features (degrees) are deliberately left out.
Eigen::VectorXd activity_features(const AddressProfile& profile, const FunctionalCoeffs& coeffs);

/// Column-wise z-score parameters. Constant columns get scale 1.
struct Standardizer {
  Eigen::RowVectorXd mean;
  Eigen::RowVectorXd scale;

  static Standardizer fit(const Eigen::MatrixXd& x);
  Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& v) const;
};

/// Rows of the standardized activity feature matrix, in profile order.
/// `coeffs[i]` must belong to `profiles[i]` and all must share one K.
Eigen::MatrixXd activity_matrix(std::span<const AddressProfile> profiles, std::span<const FunctionalCoeffs> coeffs);

struct AddressGroups {
  std::vector<std::string> addresses;
  correlate::ClusterAssignment assignment;
};

AddressGroups cluster_addresses(std::span<const AddressProfile> profiles, std::span<const FunctionalCoeffs> coeffs,
                                const correlate::DbscanParams& params);

struct ActivityPrediction {
  std::string label;
  double confidence = 0.0;
};

/// Pluggable activity classifier over raw (unstandardized) feature rows.
class ActivityClassifier {
 public:
  virtual ~ActivityClassifier() = default;
  virtual void fit(const Eigen::MatrixXd& features, const std::vector<std::string>& labels) = 0;
  /// Throws Error(UnfittedClassifier) before fit.
  virtual ActivityPrediction predict(const Eigen::VectorXd& features) const = 0;
};

/// Standardizes with statistics from the training set, then picks the
/// closest class centroid. Equal distances go to the lexicographically
/// smaller label. confidence = 1 - d1 / (d1 + d2) for the two closest
/// centroids (1 with a single class, 0.5 when both distances are 0).
class NearestCentroid final : public ActivityClassifier {
 public:
  void fit(const Eigen::MatrixXd& features, const std::vector<std::string>& labels) override;
  ActivityPrediction predict(const Eigen::VectorXd& features) const override;

  const std::map<std::string, Eigen::VectorXd>& centroids() const { return centroids_; }

 private:
  bool fitted_ = false;
  Standardizer standardizer_;
  std::map<std::string, Eigen::VectorXd> centroids_;
};

ActivityPrediction classify_activity(const ActivityClassifier& classifier, const AddressProfile& profile,
                                     const FunctionalCoeffs& coeffs);

}  // namespace fusion::chain
