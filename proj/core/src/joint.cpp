#include "histlayer/joint.hpp"

#include <numeric>
#include <string>

#include "histlayer/errors.hpp"
#include "histlayer/parallel.hpp"

namespace histlayer {

namespace {

void require_same_domain(const ActivationStack& a, const ActivationStack& b, const char* op) {
  if (!(a.config() == b.config())) {
    throw ShapeError(std::string(op) + ": stacks use different binning");
  }
  if (a.height() != b.height() || a.width() != b.width()) {
    throw ShapeError(std::string(op) + ": channel shapes differ (" + std::to_string(a.height()) +
                     "x" + std::to_string(a.width()) + " vs " + std::to_string(b.height()) + "x" +
                     std::to_string(b.width()) + ")");
  }
}

// acc += outer(window of first at x, window of second at x)
void accumulate_pixel(const ActivationStack& first, const ActivationStack& second, std::size_t x,
                      std::size_t bins, double* acc) {
  const auto a1 = first.activations(x);
  const auto a2 = second.activations(x);
  const std::size_t f1 = first.first_bin(x);
  const std::size_t f2 = second.first_bin(x);
  for (std::size_t i = 0; i < a1.size(); ++i) {
    const double a = a1[i];
    double* row = acc + (f1 + i) * bins + f2;
    for (std::size_t j = 0; j < a2.size(); ++j) row[j] += a * a2[j];
  }
}

}  // namespace

double JointHistogram::total() const { return std::accumulate(mass.begin(), mass.end(), 0.0); }

std::vector<double> JointHistogram::row_sums() const {
  const std::size_t k = bins();
  std::vector<double> out(k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) out[i] += mass[i * k + j];
  }
  return out;
}

std::vector<double> JointHistogram::column_sums() const {
  const std::size_t k = bins();
  std::vector<double> out(k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) out[j] += mass[i * k + j];
  }
  return out;
}

JointHistogram JointHistogram::transposed() const {
  const std::size_t k = bins();
  JointHistogram out{config, std::vector<double>(mass.size())};
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) out.mass[j * k + i] = mass[i * k + j];
  }
  return out;
}

JointHistogram joint_histogram(const ActivationStack& first, const ActivationStack& second) {
  require_same_domain(first, second, "joint_histogram");
  const std::size_t bins = first.config().bins();
  const std::size_t n = first.pixels();
  JointHistogram joint{first.config(), std::vector<double>(bins * bins, 0.0)};

  const std::size_t chunks = chunk_count(n);
  if (chunks == 1) {
    for (std::size_t x = 0; x < n; ++x) accumulate_pixel(first, second, x, bins, joint.mass.data());
  } else {
    std::vector<std::vector<double>> partial(chunks);
    parallel_chunks(n, [&](std::size_t c, std::size_t begin, std::size_t end) {
      partial[c].assign(bins * bins, 0.0);
      for (std::size_t x = begin; x < end; ++x) {
        accumulate_pixel(first, second, x, bins, partial[c].data());
      }
    });
    for (const auto& p : partial) {
      for (std::size_t i = 0; i < p.size(); ++i) joint.mass[i] += p[i];
    }
  }

  const double inv_n = 1.0 / static_cast<double>(n);
  for (double& m : joint.mass) m *= inv_n;
  return joint;
}

Grid joint_backward_first(const ActivationStack& first, const ActivationStack& second,
                          std::span<const double> grad_mass) {
  require_same_domain(first, second, "joint_backward");
  const std::size_t bins = first.config().bins();
  if (grad_mass.size() != bins * bins) {
    throw ShapeError("joint_backward: expected " + std::to_string(bins * bins) +
                     " gradient entries, got " + std::to_string(grad_mass.size()));
  }

  Grid grad(first.height(), first.width());
  const double inv_n = 1.0 / static_cast<double>(first.pixels());
  parallel_chunks(first.pixels(), [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t x = begin; x < end; ++x) {
      const auto d1 = first.derivatives(x);
      const auto a2 = second.activations(x);
      const std::size_t f1 = first.first_bin(x);
      const std::size_t f2 = second.first_bin(x);
      double acc = 0.0;
      for (std::size_t i = 0; i < d1.size(); ++i) {
        const double* row = grad_mass.data() + (f1 + i) * bins + f2;
        double inner = 0.0;
        for (std::size_t j = 0; j < a2.size(); ++j) inner += row[j] * a2[j];
        acc += d1[i] * inner;
      }
      grad[x] = acc * inv_n;
    }
  });
  return grad;
}

JointGradient joint_backward(const ActivationStack& first, const ActivationStack& second,
                             std::span<const double> grad_mass) {
  require_same_domain(first, second, "joint_backward");
  const std::size_t bins = first.config().bins();
  if (grad_mass.size() != bins * bins) {
    throw ShapeError("joint_backward: expected " + std::to_string(bins * bins) +
                     " gradient entries, got " + std::to_string(grad_mass.size()));
  }
  std::vector<double> transposed(grad_mass.size());
  for (std::size_t i = 0; i < bins; ++i) {
    for (std::size_t j = 0; j < bins; ++j) transposed[j * bins + i] = grad_mass[i * bins + j];
  }
  return {joint_backward_first(first, second, grad_mass),
          joint_backward_first(second, first, transposed)};
}

}  // namespace histlayer
