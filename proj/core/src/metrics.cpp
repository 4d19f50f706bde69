#include "histlayer/metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "histlayer/errors.hpp"

namespace histlayer {

namespace {

void require_same_binning(const SoftHistogram& a, const SoftHistogram& b, const char* op) {
  if (!(a.config == b.config) || a.mass.size() != b.mass.size()) {
    throw ConfigMismatch(std::string(op) + ": histograms use different binning");
  }
}

std::vector<double> cdf_difference(const SoftHistogram& a, const SoftHistogram& b) {
  std::vector<double> diff(a.mass.size());
  double ca = 0.0;
  double cb = 0.0;
  for (std::size_t i = 0; i < diff.size(); ++i) {
    ca += a.mass[i];
    cb += b.mass[i];
    diff[i] = ca - cb;
  }
  return diff;
}

// Quantities shared by the information measures and their gradient.
struct InfoTerms {
  std::vector<double> rows;
  std::vector<double> cols;
  std::vector<double> log_rows;
  std::vector<double> log_cols;
  double information = 0.0;
  double entropy = 0.0;
};

double safe_log(double p) { return p > 0.0 ? std::log(p) : 0.0; }

InfoTerms info_terms(const JointHistogram& joint) {
  if (!(joint.total() > 0.0)) throw DegenerateDistribution("empty distribution");
  const std::size_t k = joint.bins();
  InfoTerms t;
  t.rows = joint.row_sums();
  t.cols = joint.column_sums();
  t.log_rows.resize(k);
  t.log_cols.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    t.log_rows[i] = safe_log(t.rows[i]);
    t.log_cols[i] = safe_log(t.cols[i]);
  }
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const double p = joint.mass[i * k + j];
      if (p < kProbabilityFloor) continue;
      const double log_p = std::log(p);
      t.information += p * (log_p - t.log_rows[i] - t.log_cols[j]);
      t.entropy -= p * log_p;
    }
  }
  return t;
}

}  // namespace

double emd(const SoftHistogram& a, const SoftHistogram& b) {
  require_same_binning(a, b, "emd");
  double sum = 0.0;
  for (double d : cdf_difference(a, b)) sum += d * d;
  return sum;
}

EmdGradient emd_backward(const SoftHistogram& a, const SoftHistogram& b) {
  require_same_binning(a, b, "emd_backward");
  const auto diff = cdf_difference(a, b);
  const std::size_t k = diff.size();
  EmdGradient g{std::vector<double>(k), std::vector<double>(k)};
  double suffix = 0.0;
  for (std::size_t i = k; i-- > 0;) {
    suffix += diff[i];
    g.first[i] = 2.0 * suffix;
    g.second[i] = -2.0 * suffix;
  }
  return g;
}

double mutual_information(const JointHistogram& joint) { return info_terms(joint).information; }

double joint_entropy(const JointHistogram& joint) { return info_terms(joint).entropy; }

double mi_distance(const JointHistogram& joint) {
  const auto t = info_terms(joint);
  if (!(t.entropy > 0.0)) throw DegenerateDistribution("degenerate joint distribution");
  return 1.0 - t.information / t.entropy;
}

std::vector<double> mi_distance_backward(const JointHistogram& joint) {
  const auto t = info_terms(joint);
  if (!(t.entropy > 0.0)) throw DegenerateDistribution("degenerate joint distribution");
  const std::size_t k = joint.bins();

  // Mass of the kept cells in each row/column, which is what the marginal
  // logs are weighted by.
  std::vector<double> kept_rows(k, 0.0);
  std::vector<double> kept_cols(k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const double p = joint.mass[i * k + j];
      if (p < kProbabilityFloor) continue;
      kept_rows[i] += p;
      kept_cols[j] += p;
    }
  }
  std::vector<double> row_term(k, 0.0);
  std::vector<double> col_term(k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    if (t.rows[i] > 0.0) row_term[i] = kept_rows[i] / t.rows[i];
    if (t.cols[i] > 0.0) col_term[i] = kept_cols[i] / t.cols[i];
  }

  const double h = t.entropy;
  const double info = t.information;
  std::vector<double> grad(k * k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const double p = joint.mass[i * k + j];
      double d_info = -row_term[i] - col_term[j];
      double d_entropy = 0.0;
      if (p >= kProbabilityFloor) {
        const double log_p = std::log(p);
        d_info += log_p + 1.0 - t.log_rows[i] - t.log_cols[j];
        d_entropy = -log_p - 1.0;
      }
      grad[i * k + j] = -(d_info * h - info * d_entropy) / (h * h);
    }
  }
  return grad;
}

void LossWeights::validate() const {
  if (!(emd >= 0.0) || !(mi >= 0.0) || !(adversarial >= 0.0)) {
    throw std::invalid_argument("loss weights must be non-negative");
  }
  if (adversarial != 0.0) {
    throw std::invalid_argument("adversarial loss is not supported; its weight must be 0");
  }
}

ColorLoss::ColorLoss(const ImageYUV& source, std::array<SoftHistogram, 3> reference,
                     LossWeights weights, const BinningConfig& config, bool skip_degenerate_mi)
    : config_(config),
      weights_(weights),
      skip_degenerate_mi_(skip_degenerate_mi),
      height_(source.height()),
      width_(source.width()),
      reference_(std::move(reference)) {
  weights_.validate();
  source.validate();
  for (const auto& r : reference_) {
    if (!(r.config == config_) || r.mass.size() != config_.bins()) {
      throw ConfigMismatch("color loss: reference histogram binning differs from the loss binning");
    }
  }
  for (const auto& c : source.channels) source_stacks_.push_back(activation_stack(c, config_));
}

LossReport ColorLoss::evaluate(const ImageYUV& output) const { return run(output, nullptr); }

LossReport ColorLoss::evaluate(const ImageYUV& output, PixelGradient& grad) const {
  return run(output, &grad);
}

LossReport ColorLoss::run(const ImageYUV& output, PixelGradient* grad) const {
  output.validate();
  if (output.height() != height_ || output.width() != width_) {
    throw ShapeError("color loss: output is " + std::to_string(output.height()) + "x" +
                     std::to_string(output.width()) + ", source is " + std::to_string(height_) +
                     "x" + std::to_string(width_));
  }

  LossReport report;
  for (std::size_t c = 0; c < 3; ++c) {
    const auto stack = activation_stack(output.channels[c], config_);
    const auto hist = soft_histogram(stack);
    report.emd[c] = emd(reference_[c], hist);

    const auto joint = joint_histogram(stack, source_stacks_[c]);
    std::vector<double> mi_grad;
    try {
      report.mi[c] = mi_distance(joint);
      if (grad && weights_.mi != 0.0) mi_grad = mi_distance_backward(joint);
    } catch (const DegenerateDistribution&) {
      if (!skip_degenerate_mi_) throw;
      report.mi[c] = 0.0;
      report.mi_skipped[c] = true;
    }

    if (grad) {
      auto hist_grad = emd_backward(reference_[c], hist).second;
      for (double& g : hist_grad) g *= weights_.emd / 3.0;
      Grid g = histogram_backward(stack, hist_grad);
      if (!mi_grad.empty()) {
        for (double& m : mi_grad) m *= weights_.mi / 3.0;
        const Grid gm = joint_backward_first(stack, source_stacks_[c], mi_grad);
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += gm[i];
      }
      (*grad)[c] = std::move(g);
    }
  }
  report.total = weights_.emd * report.emd_loss() + weights_.mi * report.mi_loss();
  return report;
}

LossReport total_loss(const ImageYUV& output, const ImageYUV& source,
                      const std::array<SoftHistogram, 3>& reference, const LossWeights& weights,
                      const BinningConfig& config) {
  return ColorLoss(source, reference, weights, config).evaluate(output);
}

std::array<SoftHistogram, 3> channel_histograms(const ImageYUV& image, const BinningConfig& config) {
  image.validate();
  return {soft_histogram(image.y(), config), soft_histogram(image.u(), config),
          soft_histogram(image.v(), config)};
}

}  // namespace histlayer
