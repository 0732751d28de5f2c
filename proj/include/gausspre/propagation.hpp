#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gausspre/activation.hpp"
#include "gausspre/kstest.hpp"

namespace gausspre {

enum class InitKind { gaussian, weibull, rademacher };

/// Parameter law of one network. Weights are scale * (N(0,1) | W(theta,1) |
/// +-1); biases are N(0, sigma_b^2) for the Gaussian law and 0 otherwise.
struct Init {
  InitKind kind = InitKind::gaussian;
  double scale = 1.0;  // sigma_w for the Gaussian law
  double sigma_b = 0.0;
  double theta = 3.0;

  static Init gaussian(double sigma_w, double sigma_b = 0.0);
  static Init weibull(double theta, double scale = 1.0);
  static Init rademacher(double scale = 1.0);

  std::string name() const;
  /// Throws DomainError on a non-positive scale, negative sigma_b or
  /// theta <= 0.
  void validate() const;
};

InitKind parse_init_kind(std::string_view name);

/// widths = {n_0, ..., n_L}: n_0 inputs and L layers of pre-activations.
struct NetworkConfig {
  std::vector<std::size_t> widths;
  Activation activation = Activation::identity();
  Init init{};

  std::size_t depth() const { return widths.empty() ? 0 : widths.size() - 1; }
  /// Throws DomainError unless L >= 1 and every width >= 1.
  void validate() const;
};

/// Called after the parameters of layer l (0-based, mapping n_l -> n_{l+1})
/// are sampled; may overwrite them. weights is row-major n_{l+1} x n_l.
using ParameterHook =
    std::function<void(std::size_t layer, std::span<double> weights, std::span<double> biases)>;

/// One realization of Z^1..Z^L for input x under parameters drawn from
/// `seed`: Z^{l+1} = W^l X^l / sqrt(n_l) + B^l, X^0 = x, X^l = phi(Z^l).
/// Throws DomainError when len(x) != n_0.
std::vector<std::vector<double>> forward(const NetworkConfig& config,
                                         std::span<const double> x,
                                         std::uint64_t seed,
                                         const ParameterHook& hook = {});

/// Batched forward pass sharing one parameter draw: inputs is row-major
/// N x n_0 and each returned layer is row-major n_l x N.
std::vector<std::vector<double>> forward_batch(const NetworkConfig& config,
                                               std::span<const double> inputs,
                                               std::size_t batch,
                                               std::uint64_t seed,
                                               const ParameterHook& hook = {});

struct LayerStats {
  std::size_t layer;  // 1-based
  double ks_raw;      // vs N(0, 1)
  double ks_standardized;
  double mean;
  double std;
};

struct PropagationReport {
  std::vector<LayerStats> layers;
  std::size_t samples = 0;
  double alpha = 0.05;
  double threshold = 0.0;  // K_alpha / sqrt(samples)
};

/// Law of Z^l_1 over `draws` independent parameter draws (draw i seeded with
/// derive_seed(seed, i)). Throws DomainError when draws < 100.
PropagationReport layer_distribution_experiment(const NetworkConfig& config,
                                                std::span<const double> x,
                                                std::size_t draws,
                                                std::uint64_t seed,
                                                std::size_t threads = 0,
                                                double alpha = 0.05);

/// Samples with class labels; features row-major, size() x dim.
struct Dataset {
  std::size_t dim = 0;
  std::vector<double> features;
  std::vector<int> labels;

  std::size_t size() const { return labels.size(); }
  std::span<const double> row(std::size_t i) const {
    return {features.data() + i * dim, dim};
  }
  std::span<double> row(std::size_t i) { return {features.data() + i * dim, dim}; }
};

/// P Gaussian blobs around random unit-norm centers in R^dim: each sample is
/// center + spread * N(0, I/dim), then individually normalized.
Dataset synthetic_classes(std::size_t classes, std::size_t per_class,
                          std::size_t dim, double spread, std::uint64_t seed);

/// CSV, one row per sample: integer class label then the features. Lines
/// starting with '#' and a non-numeric first row are skipped. Throws
/// DomainError on ragged rows, bad numbers or an empty file.
Dataset load_csv_dataset(const std::string& path);

/// JSON sidecar {"channels": [len_1, len_2, ...]} giving consecutive channel
/// lengths; throws DomainError when malformed.
std::vector<std::size_t> load_channel_sidecar(const std::string& path);

/// Per-channel (x - mu_i) / sigma_i with mean and population std over every
/// sample and coordinate of channel i. An empty `channels` means a single
/// channel. Throws DomainError on an empty dataset, channel lengths not
/// summing to dim, or a zero channel variance.
Dataset normalize_whole_dataset(const Dataset& data,
                                std::span<const std::size_t> channels = {});

/// (x - mean) / std with the corrected std. Throws DomainError when
/// len < 2 or x is constant.
std::vector<double> normalize_individual(std::span<const double> x);

struct CorrelationReport {
  std::size_t classes = 0;
  std::vector<int> class_labels;
  /// Per layer, row-major classes x classes matrix C_pq.
  std::vector<std::vector<double>> matrices;
  std::size_t draws = 0;
  /// Averaging convention: raw second moments summed over draws and
  /// coordinates, then normalized.
  std::string averaging = "raw_moments";

  double at(std::size_t layer, std::size_t p, std::size_t q) const {
    return matrices[layer][p * classes + q];
  }
};

/// c_ab^l = sum Z_a Z_b / sqrt(sum Z_a^2 sum Z_b^2) over draws and
/// coordinates, averaged over class blocks (pairs a = b excluded). Needs at
/// least two classes with two samples each.
CorrelationReport correlation_experiment(const Dataset& data,
                                         const NetworkConfig& config,
                                         std::size_t draws, std::uint64_t seed,
                                         std::size_t threads = 0);

/// Z = W2 phi(W1 X / sqrt(n0)) / sqrt(n1) with X ~ N(0, I_n0) fresh per draw.
struct IndependenceResult {
  KsResult ks;                // standardized Z vs N(0, 1)
  double zero_fraction;       // share of draws with |Z| < 1e-12
  std::vector<double> samples;
};

/// Throws DomainError unless n0, n1 >= 1 and draws >= 1.
IndependenceResult independence_experiment(std::size_t n0, std::size_t n1,
                                           const Activation& activation,
                                           const Init& init, std::size_t draws,
                                           std::uint64_t seed,
                                           std::size_t threads = 0,
                                           double alpha = 0.05);

/// Z' = sum_i W_i phi(Z_i) / sqrt(n) + B with Z_i ~ N(0, 1) i.i.d.
struct ProductTestResult {
  KsResult raw;
  KsResult standardized;
  double mean;
  double std;
};

ProductTestResult product_test(std::size_t n, const Activation& activation,
                               const Init& init, std::size_t draws,
                               std::uint64_t seed, std::size_t threads = 0,
                               double alpha = 0.05);

/// Draw samples of the scalar experiments in blocks of this size, block b
/// seeded with derive_seed(seed, b).
inline constexpr std::size_t kScalarBlock = 4096;

}  // namespace gausspre
