#include "gausspre/propagation.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "gausspre/distributions.hpp"
#include "gausspre/error.hpp"
#include "gausspre/parallel.hpp"
#include "gausspre/rng.hpp"
#include "json.hpp"

namespace gausspre {

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void fill_weights(Rng& rng, const Init& init, std::span<double> out) {
  switch (init.kind) {
    case InitKind::gaussian: fill_std_normal(rng, out); break;
    case InitKind::weibull: fill_weibull(rng, init.theta, out); break;
    case InitKind::rademacher: fill_rademacher(rng, out); break;
  }
  if (init.scale != 1.0) {
    for (double& w : out) w *= init.scale;
  }
}

void fill_biases(Rng& rng, const Init& init, std::span<double> out) {
  if (init.kind == InitKind::gaussian && init.sigma_b > 0.0) {
    fill_std_normal(rng, out);
    for (double& b : out) b *= init.sigma_b;
  } else {
    std::fill(out.begin(), out.end(), 0.0);
  }
}

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

}  // namespace

Init Init::gaussian(double sigma_w, double sigma_b) {
  Init i{InitKind::gaussian, sigma_w, sigma_b, 3.0};
  i.validate();
  return i;
}

Init Init::weibull(double theta, double scale) {
  Init i{InitKind::weibull, scale, 0.0, theta};
  i.validate();
  return i;
}

Init Init::rademacher(double scale) {
  Init i{InitKind::rademacher, scale, 0.0, 3.0};
  i.validate();
  return i;
}

std::string Init::name() const {
  switch (kind) {
    case InitKind::gaussian: return "gaussian";
    case InitKind::weibull: return "weibull";
    case InitKind::rademacher: return "rademacher";
  }
  return "gaussian";
}

void Init::validate() const {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw DomainError("init: scale must be > 0");
  if (!(sigma_b >= 0.0) || !std::isfinite(sigma_b)) {
    throw DomainError("init: sigma_b must be >= 0");
  }
  if (kind == InitKind::weibull && !(theta > 0.0)) throw DomainError("init: theta must be > 0");
}

InitKind parse_init_kind(std::string_view name) {
  if (name == "gaussian") return InitKind::gaussian;
  if (name == "weibull") return InitKind::weibull;
  if (name == "rademacher") return InitKind::rademacher;
  throw DomainError("unknown init '" + std::string(name) + "' (gaussian, weibull, rademacher)");
}

void NetworkConfig::validate() const {
  if (widths.size() < 2) throw DomainError("network needs n_0 and at least one layer");
  for (std::size_t w : widths) {
    if (w < 1) throw DomainError("network widths must be >= 1");
  }
  init.validate();
}

std::vector<std::vector<double>> forward_batch(const NetworkConfig& config,
                                               std::span<const double> inputs,
                                               std::size_t batch, std::uint64_t seed,
                                               const ParameterHook& hook) {
  config.validate();
  const std::size_t n0 = config.widths[0];
  if (batch < 1 || inputs.size() != batch * n0) {
    throw DomainError("forward: input length does not match n_0");
  }
  Rng rng(seed);
  RowMajor x(n0, batch);
  for (std::size_t a = 0; a < batch; ++a) {
    for (std::size_t i = 0; i < n0; ++i) x(i, a) = inputs[a * n0 + i];
  }
  std::vector<std::vector<double>> layers;
  layers.reserve(config.depth());
  std::vector<double> w, b;
  for (std::size_t l = 0; l < config.depth(); ++l) {
    const std::size_t rows = config.widths[l + 1], cols = config.widths[l];
    w.resize(rows * cols);
    b.resize(rows);
    fill_weights(rng, config.init, w);
    fill_biases(rng, config.init, b);
    if (hook) hook(l, w, b);
    const Eigen::Map<const RowMajor> wm(w.data(), rows, cols);
    const Eigen::Map<const Eigen::VectorXd> bv(b.data(), rows);
    std::vector<double> z(rows * batch);
    Eigen::Map<RowMajor> zm(z.data(), rows, batch);
    zm.noalias() = wm * x / std::sqrt(static_cast<double>(cols));
    zm.colwise() += bv;
    x.resize(rows, batch);
    config.activation.apply(z, std::span<double>(x.data(), z.size()));
    layers.push_back(std::move(z));
  }
  return layers;
}

std::vector<std::vector<double>> forward(const NetworkConfig& config,
                                         std::span<const double> x, std::uint64_t seed,
                                         const ParameterHook& hook) {
  config.validate();
  if (x.size() != config.widths[0]) throw DomainError("forward: input length does not match n_0");
  return forward_batch(config, x, 1, seed, hook);
}

namespace {

LayerStats layer_stats(std::size_t layer, std::span<const double> z, double alpha) {
  const KsResult raw = ks_test_normal(z, alpha);
  const SampleMoments m = sample_moments(z);
  const double ks_std = m.std > 0.0 ? ks_test_standardized(z, alpha).statistic : nan();
  return {layer, raw.statistic, ks_std, m.mean, m.std};
}

}  // namespace

PropagationReport layer_distribution_experiment(const NetworkConfig& config,
                                                std::span<const double> x,
                                                std::size_t draws, std::uint64_t seed,
                                                std::size_t threads, double alpha) {
  config.validate();
  if (draws < 100) throw DomainError("layer_distribution_experiment: needs at least 100 draws");
  if (x.size() != config.widths[0]) throw DomainError("forward: input length does not match n_0");
  const std::size_t depth = config.depth();
  std::vector<double> first(depth * draws);
  parallel_for(draws, threads, [&](std::size_t d) {
    const auto layers = forward(config, x, derive_seed(seed, d));
    for (std::size_t l = 0; l < depth; ++l) first[l * draws + d] = layers[l][0];
  });
  PropagationReport report;
  report.samples = draws;
  report.alpha = alpha;
  report.threshold = ks_threshold(draws, alpha);
  for (std::size_t l = 0; l < depth; ++l) {
    report.layers.push_back(
        layer_stats(l + 1, std::span<const double>(first).subspan(l * draws, draws), alpha));
  }
  return report;
}

std::vector<double> normalize_individual(std::span<const double> x) {
  if (x.size() < 2) throw DomainError("normalize_individual: needs at least two entries");
  const SampleMoments m = sample_moments(x);
  if (!(m.std > 0.0)) throw DomainError("normalize_individual: constant input");
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - m.mean) / m.std;
  return out;
}

Dataset synthetic_classes(std::size_t classes, std::size_t per_class, std::size_t dim,
                          double spread, std::uint64_t seed) {
  if (classes < 1 || per_class < 1 || dim < 2 || !(spread >= 0.0)) {
    throw DomainError("synthetic_classes: need classes, per_class >= 1, dim >= 2, spread >= 0");
  }
  Rng rng(seed);
  Dataset data;
  data.dim = dim;
  data.features.resize(classes * per_class * dim);
  std::vector<double> center(dim), noise(dim);
  const double noise_scale = spread / std::sqrt(static_cast<double>(dim));
  for (std::size_t p = 0; p < classes; ++p) {
    fill_std_normal(rng, center);
    double norm = 0.0;
    for (double c : center) norm += c * c;
    norm = std::sqrt(norm);
    for (double& c : center) c /= norm;
    for (std::size_t k = 0; k < per_class; ++k) {
      fill_std_normal(rng, noise);
      for (std::size_t i = 0; i < dim; ++i) noise[i] = center[i] + noise_scale * noise[i];
      const std::vector<double> x = normalize_individual(noise);
      const std::size_t row = data.labels.size();
      std::copy(x.begin(), x.end(), data.features.begin() + static_cast<std::ptrdiff_t>(row * dim));
      data.labels.push_back(static_cast<int>(p));
    }
  }
  return data;
}

Dataset load_csv_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open dataset '" + path + "'");
  Dataset data;
  std::string line;
  std::size_t line_no = 0;
  bool seen_row = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    auto parse = [&](const std::string& s, double& v) {
      try {
        std::size_t used = 0;
        v = std::stod(s, &used);
        while (used < s.size() && std::isspace(static_cast<unsigned char>(s[used]))) ++used;
        return used == s.size() && std::isfinite(v);
      } catch (const std::exception&) {
        return false;
      }
    };
    double label = 0.0;
    if (!parse(cells.empty() ? std::string() : cells[0], label)) {
      if (!seen_row) {
        seen_row = true;  // header row
        continue;
      }
      throw DomainError(path + ":" + std::to_string(line_no) + ": bad class label");
    }
    seen_row = true;
    if (label != std::floor(label)) {
      throw DomainError(path + ":" + std::to_string(line_no) + ": class label must be an integer");
    }
    if (cells.size() < 2) throw DomainError(path + ":" + std::to_string(line_no) + ": no features");
    if (data.dim == 0) data.dim = cells.size() - 1;
    if (cells.size() - 1 != data.dim) {
      throw DomainError(path + ":" + std::to_string(line_no) + ": expected " +
                        std::to_string(data.dim) + " features");
    }
    for (std::size_t c = 1; c < cells.size(); ++c) {
      double v = 0.0;
      if (!parse(cells[c], v)) {
        throw DomainError(path + ":" + std::to_string(line_no) + ": bad number '" + cells[c] + "'");
      }
      data.features.push_back(v);
    }
    data.labels.push_back(static_cast<int>(label));
  }
  if (data.labels.empty()) throw DomainError("dataset '" + path + "' has no samples");
  return data;
}

std::vector<std::size_t> load_channel_sidecar(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open channel sidecar '" + path + "'");
  try {
    const auto j = nlohmann::json::parse(in);
    std::vector<std::size_t> channels;
    for (const auto& c : j.at("channels")) {
      const auto len = c.get<long long>();
      if (len < 1) throw DomainError("channel lengths must be >= 1");
      channels.push_back(static_cast<std::size_t>(len));
    }
    if (channels.empty()) throw DomainError("channel list is empty");
    return channels;
  } catch (const nlohmann::json::exception& e) {
    throw DomainError("bad channel sidecar '" + path + "': " + e.what());
  }
}

Dataset normalize_whole_dataset(const Dataset& data, std::span<const std::size_t> channels) {
  if (data.size() == 0 || data.dim == 0) throw DomainError("normalize_whole_dataset: empty dataset");
  std::vector<std::size_t> lengths(channels.begin(), channels.end());
  if (lengths.empty()) lengths.push_back(data.dim);
  std::size_t total = 0;
  for (std::size_t len : lengths) total += len;
  if (total != data.dim) throw DomainError("normalize_whole_dataset: channel lengths must sum to dim");

  Dataset out = data;
  std::size_t start = 0;
  for (std::size_t len : lengths) {
    double sum = 0.0;
    for (std::size_t s = 0; s < data.size(); ++s) {
      for (std::size_t i = start; i < start + len; ++i) sum += data.row(s)[i];
    }
    const double count = static_cast<double>(data.size() * len);
    const double mu = sum / count;
    double ss = 0.0;
    for (std::size_t s = 0; s < data.size(); ++s) {
      for (std::size_t i = start; i < start + len; ++i) {
        const double d = data.row(s)[i] - mu;
        ss += d * d;
      }
    }
    const double sigma = std::sqrt(ss / count);
    if (!(sigma > 0.0)) throw DomainError("normalize_whole_dataset: zero channel variance");
    for (std::size_t s = 0; s < data.size(); ++s) {
      for (std::size_t i = start; i < start + len; ++i) {
        out.row(s)[i] = (data.row(s)[i] - mu) / sigma;
      }
    }
    start += len;
  }
  return out;
}

CorrelationReport correlation_experiment(const Dataset& data, const NetworkConfig& config,
                                         std::size_t draws, std::uint64_t seed,
                                         std::size_t threads) {
  config.validate();
  if (data.dim != config.widths[0]) throw DomainError("correlation_experiment: dim != n_0");
  if (draws < 1) throw DomainError("correlation_experiment: needs at least one draw");
  std::map<int, std::vector<std::size_t>> members;
  for (std::size_t a = 0; a < data.size(); ++a) members[data.labels[a]].push_back(a);
  if (members.size() < 2) throw DomainError("correlation_experiment: needs at least two classes");
  for (const auto& [label, idx] : members) {
    if (idx.size() < 2) throw DomainError("correlation_experiment: each class needs two samples");
  }

  const std::size_t n = data.size(), depth = config.depth();
  constexpr std::size_t kDrawBlock = 8;
  const std::size_t blocks = (draws + kDrawBlock - 1) / kDrawBlock;
  std::vector<std::vector<Eigen::MatrixXd>> partial(blocks);
  parallel_for(blocks, threads, [&](std::size_t blk) {
    std::vector<Eigen::MatrixXd> sums(depth, Eigen::MatrixXd::Zero(n, n));
    const std::size_t end = std::min(draws, (blk + 1) * kDrawBlock);
    for (std::size_t d = blk * kDrawBlock; d < end; ++d) {
      const auto layers = forward_batch(config, data.features, n, derive_seed(seed, d));
      for (std::size_t l = 0; l < depth; ++l) {
        const Eigen::Map<const RowMajor> z(layers[l].data(), config.widths[l + 1], n);
        sums[l].noalias() += z.transpose() * z;
      }
    }
    partial[blk] = std::move(sums);
  });

  CorrelationReport report;
  report.draws = draws;
  report.classes = members.size();
  for (const auto& [label, idx] : members) report.class_labels.push_back(label);
  const std::size_t P = report.classes;
  std::vector<const std::vector<std::size_t>*> groups;
  for (const auto& [label, idx] : members) groups.push_back(&idx);

  for (std::size_t l = 0; l < depth; ++l) {
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
    for (const auto& blk : partial) s += blk[l];
    std::vector<double> m(P * P);
    for (std::size_t p = 0; p < P; ++p) {
      for (std::size_t q = p; q < P; ++q) {
        double total = 0.0;
        std::size_t count = 0;
        for (std::size_t a : *groups[p]) {
          for (std::size_t b : *groups[q]) {
            if (a == b) continue;
            const double denom = std::sqrt(s(a, a) * s(b, b));
            total += denom > 0.0 ? s(a, b) / denom : nan();
            ++count;
          }
        }
        m[p * P + q] = m[q * P + p] = total / static_cast<double>(count);
      }
    }
    report.matrices.push_back(std::move(m));
  }
  return report;
}

namespace {

template <class DrawBlock>
std::vector<double> scalar_samples(std::size_t draws, std::uint64_t seed, std::size_t threads,
                                   DrawBlock&& draw_block) {
  std::vector<double> out(draws);
  const std::size_t blocks = (draws + kScalarBlock - 1) / kScalarBlock;
  parallel_for(blocks, threads, [&](std::size_t blk) {
    Rng rng(seed, blk);
    const std::size_t begin = blk * kScalarBlock, end = std::min(draws, begin + kScalarBlock);
    draw_block(rng, std::span<double>(out).subspan(begin, end - begin));
  });
  return out;
}

}  // namespace

IndependenceResult independence_experiment(std::size_t n0, std::size_t n1,
                                           const Activation& activation, const Init& init,
                                           std::size_t draws, std::uint64_t seed,
                                           std::size_t threads, double alpha) {
  init.validate();
  if (n0 < 1 || n1 < 1) throw DomainError("independence_experiment: widths must be >= 1");
  if (draws < 1) throw DomainError("independence_experiment: needs at least one draw");
  const double s0 = 1.0 / std::sqrt(static_cast<double>(n0));
  const double s1 = 1.0 / std::sqrt(static_cast<double>(n1));
  IndependenceResult result;
  result.samples = scalar_samples(draws, seed, threads, [&](Rng& rng, std::span<double> out) {
    std::vector<double> x(n0), w1(n1 * n0), w2(n1);
    for (double& z : out) {
      fill_std_normal(rng, x);
      fill_weights(rng, init, w1);
      fill_weights(rng, init, w2);
      double total = 0.0;
      for (std::size_t k = 0; k < n1; ++k) {
        double pre = 0.0;
        for (std::size_t i = 0; i < n0; ++i) pre += w1[k * n0 + i] * x[i];
        total += w2[k] * activation(s0 * pre);
      }
      z = s1 * total;
    }
  });
  std::size_t zeros = 0;
  for (double z : result.samples) zeros += std::abs(z) < 1e-12 ? 1 : 0;
  result.zero_fraction = static_cast<double>(zeros) / static_cast<double>(draws);
  if (draws >= 2 && sample_moments(result.samples).std > 0.0) {
    result.ks = ks_test_standardized(result.samples, alpha);
  } else {
    result.ks = {nan(), draws, ks_threshold(draws, alpha), alpha, true};
  }
  return result;
}

ProductTestResult product_test(std::size_t n, const Activation& activation, const Init& init,
                               std::size_t draws, std::uint64_t seed, std::size_t threads,
                               double alpha) {
  init.validate();
  if (n < 1) throw DomainError("product_test: n must be >= 1");
  if (draws < 2) throw DomainError("product_test: needs at least two draws");
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  const std::vector<double> samples =
      scalar_samples(draws, seed, threads, [&](Rng& rng, std::span<double> out) {
        std::vector<double> z(n * out.size()), w(n * out.size()), b(out.size());
        fill_std_normal(rng, z);
        fill_weights(rng, init, w);
        fill_biases(rng, init, b);
        activation.apply(z, z);
        for (std::size_t d = 0; d < out.size(); ++d) {
          double total = 0.0;
          for (std::size_t i = 0; i < n; ++i) total += w[d * n + i] * z[d * n + i];
          out[d] = scale * total + b[d];
        }
      });
  const SampleMoments m = sample_moments(samples);
  ProductTestResult r;
  r.raw = ks_test_normal(samples, alpha);
  r.standardized = m.std > 0.0 ? ks_test_standardized(samples, alpha)
                               : KsResult{nan(), draws, r.raw.threshold, alpha, true};
  r.mean = m.mean;
  r.std = m.std;
  return r;
}

}  // namespace gausspre
