#pragma once

#include <array>
#include <nlohmann/json.hpp>

#include "histlayer/histogram.hpp"
#include "histlayer/joint.hpp"

namespace histlayer {

// {"k": K, "centers": [...], "mass": [...]}
nlohmann::json histogram_to_json(const SoftHistogram& hist);

/// Parses a histogram object. The bin count comes from "k"; centers, when
/// present, must agree with the implied bin partition to 1e-9. The bandwidth
/// is not part of the format and is taken from bandwidth_ratio.
/// Throws std::invalid_argument on malformed input.
SoftHistogram histogram_from_json(const nlohmann::json& j,
                                  double bandwidth_ratio = kDefaultBandwidthRatio);

/// Reference histograms for the Y, U and V channels. Accepts either an object
/// keyed "y", "u", "v" or a single histogram object used for all three.
std::array<SoftHistogram, 3> channel_histograms_from_json(
    const nlohmann::json& j, double bandwidth_ratio = kDefaultBandwidthRatio);

nlohmann::json channel_histograms_to_json(const std::array<SoftHistogram, 3>& hists);

// K rows of K comma-separated values, 17 significant digits.
std::string joint_to_csv(const JointHistogram& joint);
// {"k": K, "mass": [[...], ...]}
nlohmann::json joint_to_json(const JointHistogram& joint);

}  // namespace histlayer
