#include "histlayer/histogram_io.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace histlayer {

nlohmann::json histogram_to_json(const SoftHistogram& hist) {
  nlohmann::json j;
  j["k"] = hist.config.bins();
  j["centers"] = std::vector<double>(hist.config.centers().begin(), hist.config.centers().end());
  j["mass"] = hist.mass;
  return j;
}

SoftHistogram histogram_from_json(const nlohmann::json& j, double bandwidth_ratio) {
  if (!j.is_object()) throw std::invalid_argument("histogram: expected a JSON object");
  if (!j.contains("k") || !j["k"].is_number_integer() || j["k"].get<long long>() <= 0) {
    throw std::invalid_argument("histogram: \"k\" must be a positive integer");
  }
  if (!j.contains("mass") || !j["mass"].is_array()) {
    throw std::invalid_argument("histogram: \"mass\" must be an array");
  }
  const auto bins = j["k"].get<std::size_t>();
  auto config = BinningConfig::with_bins(bins, bandwidth_ratio);

  std::vector<double> mass;
  for (const auto& m : j["mass"]) {
    if (!m.is_number()) throw std::invalid_argument("histogram: mass entries must be numbers");
    const double v = m.get<double>();
    if (!std::isfinite(v) || v < 0.0) {
      throw std::invalid_argument("histogram: mass entries must be finite and non-negative");
    }
    mass.push_back(v);
  }
  if (mass.size() != bins) {
    throw std::invalid_argument("histogram: expected " + std::to_string(bins) + " masses, got " +
                                std::to_string(mass.size()));
  }

  if (j.contains("centers")) {
    const auto& centers = j["centers"];
    if (!centers.is_array() || centers.size() != bins) {
      throw std::invalid_argument("histogram: \"centers\" must hold k numbers");
    }
    for (std::size_t k = 0; k < bins; ++k) {
      if (!centers[k].is_number() || std::abs(centers[k].get<double>() - config.center(k)) > 1e-9) {
        throw std::invalid_argument("histogram: center " + std::to_string(k) +
                                    " does not match a uniform partition of [-1, 1]");
      }
    }
  }
  return {config, std::move(mass)};
}

std::array<SoftHistogram, 3> channel_histograms_from_json(const nlohmann::json& j,
                                                          double bandwidth_ratio) {
  if (j.is_object() && j.contains("y") && j.contains("u") && j.contains("v")) {
    auto y = histogram_from_json(j["y"], bandwidth_ratio);
    auto u = histogram_from_json(j["u"], bandwidth_ratio);
    auto v = histogram_from_json(j["v"], bandwidth_ratio);
    if (!(y.config == u.config) || !(y.config == v.config)) {
      throw std::invalid_argument("histogram: y, u and v must use the same bin count");
    }
    return {std::move(y), std::move(u), std::move(v)};
  }
  auto h = histogram_from_json(j, bandwidth_ratio);
  return {h, h, h};
}

nlohmann::json channel_histograms_to_json(const std::array<SoftHistogram, 3>& hists) {
  return {{"y", histogram_to_json(hists[0])},
          {"u", histogram_to_json(hists[1])},
          {"v", histogram_to_json(hists[2])}};
}

std::string joint_to_csv(const JointHistogram& joint) {
  std::string out;
  const std::size_t k = joint.bins();
  char buf[32];
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", joint(i, j));
      if (j) out += ',';
      out += buf;
    }
    out += '\n';
  }
  return out;
}

nlohmann::json joint_to_json(const JointHistogram& joint) {
  const std::size_t k = joint.bins();
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < k; ++i) {
    rows.push_back(std::vector<double>(joint.mass.begin() + static_cast<std::ptrdiff_t>(i * k),
                                       joint.mass.begin() + static_cast<std::ptrdiff_t>((i + 1) * k)));
  }
  return {{"k", k}, {"mass", rows}};
}

}  // namespace histlayer
