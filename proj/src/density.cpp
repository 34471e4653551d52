#include "perfsim/density.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "perfsim/errors.hpp"

namespace perfsim {

namespace {

std::vector<std::string> index_labels(std::size_t n) {
  std::vector<std::string> labels;
  labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i));
  return labels;
}

}  // namespace

FiniteDensity::FiniteDensity(std::vector<std::string> labels, std::vector<double> weights)
    : labels_(std::move(labels)), weights_(std::move(weights)) {
  if (weights_.empty()) throw InvalidArgument("density: empty domain");
  if (labels_.size() != weights_.size()) {
    throw InvalidArgument("density: " + std::to_string(labels_.size()) + " labels but " +
                          std::to_string(weights_.size()) + " weights");
  }
  cumulative_.reserve(weights_.size());
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    const double w = weights_[i];
    if (!std::isfinite(w) || w < 0.0) {
      throw InvalidArgument("density: weight of '" + labels_[i] + "' must be finite and >= 0");
    }
    total_ += w;
    cumulative_.push_back(total_);
  }
  if (!(total_ > 0.0)) throw DegenerateDensity("density: total mass is zero");
  if (!std::isfinite(total_)) throw InvalidArgument("density: total mass overflows");
}

FiniteDensity::FiniteDensity(const std::vector<double>& weights)
    : FiniteDensity(index_labels(weights.size()), weights) {}

std::vector<double> FiniteDensity::normalize() const {
  std::vector<double> p(weights_.size());
  std::transform(weights_.begin(), weights_.end(), p.begin(),
                 [this](double w) { return w / total_; });
  return p;
}

std::size_t FiniteDensity::sample(UniformSource& src) const {
  const double target = src.unit() * total_;
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
  if (it == cumulative_.end()) {
    // Only reachable through rounding in unit() * total_; fall back to the
    // last point with positive weight.
    std::size_t i = weights_.size();
    while (weights_[--i] == 0.0) {
    }
    return i;
  }
  return static_cast<std::size_t>(it - cumulative_.begin());
}

EnvelopePair::EnvelopePair(FiniteDensity target, FiniteDensity envelope)
    : target_(std::move(target)), envelope_(std::move(envelope)) {
  if (target_.size() != envelope_.size()) {
    throw EnvelopeViolation("envelope: target has " + std::to_string(target_.size()) +
                            " points, envelope has " + std::to_string(envelope_.size()));
  }
  if (target_.labels() != envelope_.labels()) {
    throw EnvelopeViolation("envelope: target and envelope domains differ");
  }
  for (std::size_t i = 0; i < target_.size(); ++i) {
    if (envelope_.weight(i) < target_.weight(i)) {
      throw EnvelopeViolation("envelope: g(" + target_.labels()[i] + ") = " +
                              std::to_string(envelope_.weight(i)) + " < h = " +
                              std::to_string(target_.weight(i)));
    }
  }
  if (envelope_.total() < target_.total()) {
    throw EnvelopeViolation("envelope: Z_g < Z_h");
  }
}

FiniteDensity density_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("domain") || !doc.contains("weights")) {
    throw InvalidArgument(R"(density JSON needs {"domain": [...], "weights": [...]})");
  }
  const auto& domain = doc.at("domain");
  const auto& weights = doc.at("weights");
  if (!domain.is_array() || !weights.is_array()) {
    throw InvalidArgument("density JSON: 'domain' and 'weights' must be arrays");
  }
  std::vector<std::string> labels;
  for (const auto& label : domain) {
    labels.push_back(label.is_string() ? label.get<std::string>() : label.dump());
  }
  std::vector<double> values;
  for (const auto& w : weights) {
    if (!w.is_number()) throw InvalidArgument("density JSON: weights must be numbers");
    values.push_back(w.get<double>());
  }
  return FiniteDensity(std::move(labels), std::move(values));
}

FiniteDensity load_density(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open density file " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgument("density file " + path.string() + ": " + e.what());
  }
  return density_from_json(doc);
}

nlohmann::json density_to_json(const FiniteDensity& density) {
  return {{"domain", density.labels()}, {"weights", density.weights()}};
}

}  // namespace perfsim
