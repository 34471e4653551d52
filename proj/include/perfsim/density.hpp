#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "perfsim/rand.hpp"

namespace perfsim {

/// Unnormalized density on a finite ordered domain (counting measure).
/// Immutable once built.
class FiniteDensity {
 public:
  /// Throws InvalidArgument on size mismatch, empty domain, or a negative or
  /// non-finite weight; DegenerateDensity when every weight is zero.
  FiniteDensity(std::vector<std::string> labels, std::vector<double> weights);

  /// Labels "0", "1", ...
  explicit FiniteDensity(const std::vector<double>& weights);

  std::size_t size() const noexcept { return weights_.size(); }
  double weight(std::size_t i) const { return weights_.at(i); }
  const std::vector<double>& weights() const noexcept { return weights_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  double total() const noexcept { return total_; }

  /// h(x) / Z_h for every point, in domain order.
  std::vector<double> normalize() const;

  /// Inverse-CDF draw over the stored order; one unit draw.
  std::size_t sample(UniformSource& src) const;

 private:
  std::vector<std::string> labels_;
  std::vector<double> weights_;
  std::vector<double> cumulative_;
  double total_ = 0.0;
};

/// Target h and envelope g on the same domain with h <= g pointwise, checked
/// exactly at construction.
class EnvelopePair {
 public:
  /// Throws EnvelopeViolation if the domains differ or g(x) < h(x) anywhere.
  EnvelopePair(FiniteDensity target, FiniteDensity envelope);

  const FiniteDensity& target() const noexcept { return target_; }
  const FiniteDensity& envelope() const noexcept { return envelope_; }

  /// Z_h / Z_g, the per-attempt acceptance probability of rejection sampling.
  double acceptance_mass() const noexcept { return target_.total() / envelope_.total(); }

 private:
  FiniteDensity target_;
  FiniteDensity envelope_;
};

/// {"domain": [labels...], "weights": [reals...]}. Labels may be strings or
/// numbers; numbers are stored by their JSON text.
FiniteDensity density_from_json(const nlohmann::json& doc);
FiniteDensity load_density(const std::filesystem::path& path);
nlohmann::json density_to_json(const FiniteDensity& density);

}  // namespace perfsim
