#include "qecml/trainer.h"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "qecml/dataset.h"
#include "qecml/qed422.h"
#include "qecml/stats.h"
#include "qecml/threadpool.h"

namespace qecml::trainer {

namespace {

constexpr uint64_t kTagInit = 0x696e6974;
constexpr uint64_t kTagShuffle = 0x73687566;
constexpr uint64_t kTagEval = 0x6576616c;
constexpr uint64_t kTagProbe = 0x70726f62;
constexpr double kPi = std::numbers::pi;
constexpr double kShift = kPi / 2.0;

uint64_t hash_u64(uint64_t h, uint64_t v) { return Rng::derive(h, v); }
uint64_t hash_f64(uint64_t h, double v) {
  return Rng::derive(h, std::bit_cast<uint64_t>(v));
}

void fisher_yates(std::vector<int>& order, Rng& rng) {
  for (size_t i = order.size(); i > 1; --i)
    std::swap(order[i - 1], order[rng.uniform_below(i)]);
}

// Per-epoch reshuffled batch windows cycling through the dataset.
struct BatchCycle {
  int n_samples;
  int batch_size;
  uint64_t seed;
  std::vector<int> order;
  int shuffled_epoch = -1;

  BatchCycle(int n, int batch, uint64_t s)
      : n_samples(n), batch_size(batch), seed(s), order(static_cast<size_t>(n)) {}

  int batches_per_epoch() const {
    return (n_samples + batch_size - 1) / batch_size;
  }

  std::span<const int> batch(int iteration) {
    const int epoch = iteration / batches_per_epoch();
    const int index = iteration % batches_per_epoch();
    if (epoch != shuffled_epoch) {
      std::iota(order.begin(), order.end(), 0);
      Rng rng(Rng::derive(seed, kTagShuffle, static_cast<uint64_t>(epoch)));
      fisher_yates(order, rng);
      shuffled_epoch = epoch;
    }
    const int begin = index * batch_size;
    const int end = std::min(begin + batch_size, n_samples);
    return std::span<const int>(order).subspan(begin, end - begin);
  }
};

double mean_sq(std::span<const double> xs) {
  double sum = 0.0;
  for (const double x : xs) sum += x * x;
  return sum / static_cast<double>(xs.size());
}

double se_of(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  return stats::standard_error(xs);
}

}  // namespace

// ---------------------------------------------------------------------------
// Configs.
// ---------------------------------------------------------------------------

void ParityTrainConfig::check_valid() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
    throw std::invalid_argument("learning_rate must be positive");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
  if (shots < 0) throw std::invalid_argument("shots must be >= 0");
  if (shots == 0 && p != 0.0)
    throw std::invalid_argument("exact mode (shots = 0) requires zero noise");
  if (rounds < 0 || rounds > 11)
    throw std::invalid_argument("rounds must be in [0, 11]");
  if (!(init_low <= init_high) || !std::isfinite(init_low) ||
      !std::isfinite(init_high))
    throw std::invalid_argument("invalid init interval");
  PauliInjectionSpec spec;
  spec.model = noise_model;
  spec.rate = p;
  spec.f_anc = f_anc;
  spec.check_valid();
}

uint64_t config_hash(const ParityTrainConfig& config) {
  uint64_t h = 0x70617269;  // parity-task salt
  h = hash_f64(h, config.learning_rate);
  h = hash_u64(h, static_cast<uint64_t>(config.batch_size));
  h = hash_u64(h, static_cast<uint64_t>(config.iterations));
  h = hash_u64(h, static_cast<uint64_t>(config.shots));
  h = hash_u64(h, static_cast<uint64_t>(config.noise_model));
  h = hash_f64(h, config.p);
  h = hash_f64(h, config.f_anc);
  h = hash_u64(h, static_cast<uint64_t>(config.rounds));
  h = hash_f64(h, config.init_low);
  h = hash_f64(h, config.init_high);
  return h;
}

void QvcTrainConfig::check_valid() const {
  arch.check_valid();
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
    throw std::invalid_argument("learning_rate must be positive");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
  if (shots < 0) throw std::invalid_argument("shots must be >= 0");
  if (p_depol < 0.0 || p_depol > 1.0)
    throw std::invalid_argument("p_depol must be in [0, 1]");
  if (per_class < 1) throw std::invalid_argument("per_class must be >= 1");
}

uint64_t config_hash(const QvcTrainConfig& config) {
  uint64_t h = 0x71766300;  // qvc-task salt
  h = hash_u64(h, static_cast<uint64_t>(config.arch.n_qubits));
  h = hash_u64(h, static_cast<uint64_t>(config.arch.n_layers));
  h = hash_u64(h, static_cast<uint64_t>(config.arch.entangler));
  h = hash_u64(h, config.arch.noisy_entangler ? 1 : 0);
  if (config.arch.dense) {
    h = hash_u64(h, static_cast<uint64_t>(config.arch.dense->n_outputs));
    for (const double w : config.arch.dense->weights) h = hash_f64(h, w);
    for (const double b : config.arch.dense->biases) h = hash_f64(h, b);
  }
  h = hash_f64(h, config.learning_rate);
  h = hash_u64(h, static_cast<uint64_t>(config.batch_size));
  h = hash_u64(h, static_cast<uint64_t>(config.iterations));
  h = hash_u64(h, static_cast<uint64_t>(config.shots));
  h = hash_f64(h, config.p_depol);
  h = hash_u64(h, static_cast<uint64_t>(config.per_class));
  h = hash_u64(h, config.data_seed);
  return h;
}

double TrainingTrace::final_accuracy() const {
  if (records.empty()) throw std::logic_error("final_accuracy of an empty trace");
  const size_t window = std::min<size_t>(40, records.size());
  double sum = 0.0;
  for (size_t i = records.size() - window; i < records.size(); ++i)
    sum += records[i].accuracy;
  return sum / static_cast<double>(window);
}

// ---------------------------------------------------------------------------
// Parity training.
// ---------------------------------------------------------------------------

namespace {

// One logical-parity expectation; tracks post-selection discards.
double parity_expectation(qed422::LogicalParityEvaluator& evaluator, int b1, int b2,
                          int shots, uint64_t seed, int iteration, uint64_t slot,
                          long& discarded, long& total_shots) {
  if (shots == 0) return evaluator.evaluate_exact(b1, b2).z1_expectation;
  Rng rng(Rng::derive(seed, kTagEval, static_cast<uint64_t>(iteration), slot));
  const auto result = evaluator.evaluate(b1, b2, shots, rng);
  discarded += result.discarded;
  total_shots += shots;
  return result.z1_expectation;
}

}  // namespace

TrainingTrace train_parity(const ParityTrainConfig& config, uint64_t seed) {
  config.check_valid();
  const Dataset data = parity_dataset();
  const int n_samples = static_cast<int>(data.samples.size());

  PauliInjectionSpec spec;
  spec.model = config.noise_model;
  spec.rate = config.p;
  spec.f_anc = config.f_anc;

  TrainingTrace trace;
  trace.seed = seed;
  trace.config_hash = config_hash(config);
  trace.records.reserve(static_cast<size_t>(config.iterations));

  Rng init_rng(Rng::derive(seed, kTagInit));
  double theta = init_rng.uniform(config.init_low, config.init_high);

  BatchCycle cycle(n_samples, std::min(config.batch_size, n_samples), seed);

  for (int iter = 0; iter < config.iterations; ++iter) {
    const auto batch = cycle.batch(iter);
    qed422::LogicalParityEvaluator center(theta, config.rounds, spec);
    qed422::LogicalParityEvaluator plus(theta + kShift, config.rounds, spec);
    qed422::LogicalParityEvaluator minus(theta - kShift, config.rounds, spec);

    double grad_sum = 0.0;
    double loss_sum = 0.0;
    long discarded = 0;
    long total_shots = 0;
    for (size_t s = 0; s < batch.size(); ++s) {
      const Sample& sample = data.samples[static_cast<size_t>(batch[s])];
      const int b1 = static_cast<int>(std::lround(sample.features[0]));
      const int b2 = static_cast<int>(std::lround(sample.features[1]));
      const double target = 1.0 - 2.0 * sample.label;
      const uint64_t slot = static_cast<uint64_t>(s) * 4;
      const double e0 = parity_expectation(center, b1, b2, config.shots, seed, iter,
                                           slot, discarded, total_shots);
      const double ep = parity_expectation(plus, b1, b2, config.shots, seed, iter,
                                           slot + 1, discarded, total_shots);
      const double em = parity_expectation(minus, b1, b2, config.shots, seed, iter,
                                           slot + 2, discarded, total_shots);
      grad_sum += 2.0 * (e0 - target) * 0.5 * (ep - em);
      loss_sum += (e0 - target) * (e0 - target);
    }
    const double batch_n = static_cast<double>(batch.size());
    const double grad = grad_sum / batch_n;
    theta -= config.learning_rate * grad;

    qed422::LogicalParityEvaluator scorer(theta, config.rounds, spec);
    int correct = 0;
    for (int input = 0; input < 4; ++input) {
      const int b1 = input >> 1;
      const int b2 = input & 1;
      const double e = parity_expectation(scorer, b1, b2, config.shots, seed, iter,
                                          1000 + input, discarded, total_shots);
      const int predicted = e < 0.0 ? 1 : 0;
      if (predicted == (b1 ^ b2)) ++correct;
    }

    IterationRecord record;
    record.accuracy = correct / 4.0;
    record.loss = loss_sum / batch_n;
    record.avg_sq_gradient = grad * grad;
    record.discard_rate =
        total_shots > 0 ? static_cast<double>(discarded) / static_cast<double>(total_shots)
                        : 0.0;
    trace.records.push_back(record);
  }
  trace.final_params = {theta};
  return trace;
}

// ---------------------------------------------------------------------------
// QVC training.
// ---------------------------------------------------------------------------

namespace {

struct SoftmaxLoss {
  double loss = 0.0;
  std::vector<double> dloss_dscore;  // softmax(s) - onehot(label)
};

SoftmaxLoss softmax_cross_entropy(std::span<const double> scores, int label) {
  SoftmaxLoss out;
  const double top = *std::max_element(scores.begin(), scores.end());
  double norm = 0.0;
  out.dloss_dscore.resize(scores.size());
  for (size_t i = 0; i < scores.size(); ++i) {
    out.dloss_dscore[i] = std::exp(scores[i] - top);
    norm += out.dloss_dscore[i];
  }
  for (size_t i = 0; i < scores.size(); ++i) out.dloss_dscore[i] /= norm;
  out.loss = -std::log(std::max(out.dloss_dscore[static_cast<size_t>(label)], 1e-300));
  out.dloss_dscore[static_cast<size_t>(label)] -= 1.0;
  return out;
}

// dL/dz through the optional dense layer: dL/dz_q = sum_o dL/ds_o * W[o][q].
std::vector<double> chain_to_z(const QvcArchitecture& arch,
                               std::span<const double> dloss_dscore) {
  if (!arch.dense)
    return std::vector<double>(dloss_dscore.begin(), dloss_dscore.end());
  std::vector<double> dz(static_cast<size_t>(arch.n_qubits), 0.0);
  const auto& dense = *arch.dense;
  for (int o = 0; o < dense.n_outputs; ++o)
    for (int q = 0; q < arch.n_qubits; ++q)
      dz[static_cast<size_t>(q)] +=
          dloss_dscore[static_cast<size_t>(o)] *
          dense.weights[static_cast<size_t>(o * arch.n_qubits + q)];
  return dz;
}

Dataset qvc_dataset(const QvcTrainConfig& config) {
  return synthetic_multiclass(1 << config.arch.n_qubits, config.arch.n_outputs(),
                              config.per_class, config.data_seed);
}

std::vector<double> qvc_initial_params(const QvcTrainConfig& config, uint64_t seed) {
  Rng rng(Rng::derive(seed, kTagInit));
  std::vector<double> params(static_cast<size_t>(config.arch.parameter_count()));
  for (auto& p : params) p = rng.uniform(-kPi, kPi);
  return params;
}

// Gradient of the mean softmax loss over `rows` w.r.t. every circuit
// parameter, via the shift rule chained through the loss. Slot space per
// sample: 0 = center, then (+,-) pairs per parameter.
std::vector<double> qvc_loss_gradient(const QvcTrainConfig& config,
                                      const Dataset& data, std::span<const int> rows,
                                      std::span<const double> params, uint64_t seed,
                                      int iteration, double* loss_out) {
  const int n_params = static_cast<int>(params.size());
  ForwardOptions options;
  options.noise.p_1q = config.p_depol;
  options.noise.p_2q = config.p_depol;
  options.shots = config.shots;
  std::vector<double> grad(static_cast<size_t>(n_params), 0.0);
  std::vector<double> shifted(params.begin(), params.end());
  double loss_sum = 0.0;
  const uint64_t slots_per_sample = 2 * static_cast<uint64_t>(n_params) + 1;
  for (size_t s = 0; s < rows.size(); ++s) {
    const Sample& sample = data.samples[static_cast<size_t>(rows[s])];
    const uint64_t base_slot = static_cast<uint64_t>(s) * slots_per_sample;
    options.seed = Rng::derive(seed, kTagEval, static_cast<uint64_t>(iteration),
                               base_slot);
    const ForwardResult center = forward(config.arch, params, sample, options);
    const SoftmaxLoss sm = softmax_cross_entropy(center.scores, sample.label);
    loss_sum += sm.loss;
    const std::vector<double> dz = chain_to_z(config.arch, sm.dloss_dscore);
    for (int k = 0; k < n_params; ++k) {
      const size_t uk = static_cast<size_t>(k);
      shifted[uk] = params[uk] + kShift;
      options.seed = Rng::derive(seed, kTagEval, static_cast<uint64_t>(iteration),
                                 base_slot + 1 + 2 * static_cast<uint64_t>(k));
      const ForwardResult up = forward(config.arch, shifted, sample, options);
      shifted[uk] = params[uk] - kShift;
      options.seed = Rng::derive(seed, kTagEval, static_cast<uint64_t>(iteration),
                                 base_slot + 2 + 2 * static_cast<uint64_t>(k));
      const ForwardResult down = forward(config.arch, shifted, sample, options);
      shifted[uk] = params[uk];
      double dldk = 0.0;
      for (int q = 0; q < config.arch.n_qubits; ++q) {
        const size_t uq = static_cast<size_t>(q);
        dldk += dz[uq] * 0.5 * (up.z_expectations[uq] - down.z_expectations[uq]);
      }
      grad[static_cast<size_t>(k)] += dldk;
    }
  }
  const double inv = 1.0 / static_cast<double>(rows.size());
  for (auto& g : grad) g *= inv;
  if (loss_out) *loss_out = loss_sum * inv;
  return grad;
}

}  // namespace

TrainingTrace train_qvc(const QvcTrainConfig& config, uint64_t seed) {
  config.check_valid();
  const Dataset data = qvc_dataset(config);
  const int n_samples = static_cast<int>(data.samples.size());

  TrainingTrace trace;
  trace.seed = seed;
  trace.config_hash = config_hash(config);
  trace.records.reserve(static_cast<size_t>(config.iterations));

  std::vector<double> params = qvc_initial_params(config, seed);
  BatchCycle cycle(n_samples, std::min(config.batch_size, n_samples), seed);

  ForwardOptions score_options;
  score_options.noise.p_1q = config.p_depol;
  score_options.noise.p_2q = config.p_depol;
  score_options.shots = config.shots;

  for (int iter = 0; iter < config.iterations; ++iter) {
    const auto batch = cycle.batch(iter);
    double loss = 0.0;
    const std::vector<double> grad =
        qvc_loss_gradient(config, data, batch, params, seed, iter, &loss);
    for (size_t k = 0; k < params.size(); ++k)
      params[k] -= config.learning_rate * grad[k];

    int correct = 0;
    for (int row = 0; row < n_samples; ++row) {
      score_options.seed = Rng::derive(seed, kTagEval, static_cast<uint64_t>(iter),
                                       (1ull << 40) + static_cast<uint64_t>(row));
      const ForwardResult result =
          forward(config.arch, params, data.samples[static_cast<size_t>(row)],
                  score_options);
      if (predict_class(result) == data.samples[static_cast<size_t>(row)].label)
        ++correct;
    }

    IterationRecord record;
    record.accuracy = static_cast<double>(correct) / static_cast<double>(n_samples);
    record.loss = loss;
    record.avg_sq_gradient = mean_sq(grad);
    record.discard_rate = 0.0;
    trace.records.push_back(record);
  }
  trace.final_params = params;
  return trace;
}

// ---------------------------------------------------------------------------
// Gradients.
// ---------------------------------------------------------------------------

std::vector<double> parameter_shift_gradient(const ExpectationFn& expectation,
                                             std::span<const double> params,
                                             double shift) {
  if (!expectation) throw std::invalid_argument("expectation function required");
  if (!(shift > 0.0)) throw std::invalid_argument("shift must be positive");
  std::vector<double> shifted(params.begin(), params.end());
  std::vector<double> grad(params.size(), 0.0);
  for (size_t k = 0; k < params.size(); ++k) {
    shifted[k] = params[k] + shift;
    const double up = expectation(shifted);
    shifted[k] = params[k] - shift;
    const double down = expectation(shifted);
    shifted[k] = params[k];
    grad[k] = 0.5 * (up - down);
  }
  return grad;
}

double average_squared_gradient(const QvcTrainConfig& config, uint64_t seed,
                                int probe_samples) {
  config.check_valid();
  if (probe_samples < 1)
    throw std::invalid_argument("probe_samples must be >= 1");
  QvcTrainConfig probe_config = config;
  probe_config.shots = 0;  // exact density-matrix expectations
  const Dataset data = qvc_dataset(probe_config);
  const int n_samples = static_cast<int>(data.samples.size());
  const int n_rows = std::min(probe_samples, n_samples);

  std::vector<int> order(static_cast<size_t>(n_samples));
  std::iota(order.begin(), order.end(), 0);
  Rng probe_rng(Rng::derive(seed, kTagProbe));
  fisher_yates(order, probe_rng);
  order.resize(static_cast<size_t>(n_rows));

  const std::vector<double> params = qvc_initial_params(probe_config, seed);
  const std::vector<double> grad =
      qvc_loss_gradient(probe_config, data, order, params, seed, 0, nullptr);
  return mean_sq(grad);
}

// ---------------------------------------------------------------------------
// Sweeps.
// ---------------------------------------------------------------------------

void SweepConfig::check_valid() const {
  base.check_valid();
  if (p_grid.empty()) throw std::invalid_argument("p grid must be nonempty");
  if (rounds_grid.empty()) throw std::invalid_argument("rounds grid must be nonempty");
  if (f_anc_grid.empty()) throw std::invalid_argument("f_anc grid must be nonempty");
  if (seeds.empty()) throw std::invalid_argument("seed list must be nonempty");
  for (const double p : p_grid) {
    ParityTrainConfig cell = base;
    cell.noise_model = model;
    cell.p = p;
    if (cell.shots == 0 && p != 0.0) cell.shots = 1;  // representative check only
    cell.check_valid();
  }
  for (const int r : rounds_grid)
    if (r < 0 || r > 11) throw std::invalid_argument("rounds must be in [0, 11]");
  for (const double f : f_anc_grid) {
    PauliInjectionSpec spec;
    spec.model = model;
    spec.rate = p_grid.front();
    spec.f_anc = f;
    spec.check_valid();
  }
}

SweepSummary sweep(const SweepConfig& config, int jobs,
                   const SweepProgressFn& progress) {
  config.check_valid();
  std::vector<SweepCell> cells;
  for (const double p : config.p_grid)
    for (const int rounds : config.rounds_grid)
      for (const double f_anc : config.f_anc_grid)
        cells.push_back({config.model, p, rounds, f_anc});

  const int n_cells = static_cast<int>(cells.size());
  const int n_seeds = static_cast<int>(config.seeds.size());
  SweepSummary summary;
  summary.seeds = config.seeds;
  summary.cells.resize(static_cast<size_t>(n_cells));
  for (int c = 0; c < n_cells; ++c) {
    summary.cells[static_cast<size_t>(c)].cell = cells[static_cast<size_t>(c)];
    summary.cells[static_cast<size_t>(c)].final_accuracies.assign(
        static_cast<size_t>(n_seeds), 0.0);
  }
  if (config.keep_traces)
    summary.traces.assign(static_cast<size_t>(n_cells),
                          std::vector<TrainingTrace>(static_cast<size_t>(n_seeds)));

  std::atomic<int> done{0};
  std::mutex progress_mutex;
  const int total = n_cells * n_seeds;
  parallel_for(total, jobs, [&](int run) {
    const int c = run / n_seeds;
    const int s = run % n_seeds;
    ParityTrainConfig cell_config = config.base;
    const SweepCell& cell = cells[static_cast<size_t>(c)];
    cell_config.noise_model = cell.model;
    cell_config.p = cell.p;
    cell_config.rounds = cell.rounds;
    cell_config.f_anc = cell.f_anc;
    if (cell_config.shots == 0 && cell.p != 0.0) cell_config.shots = 1000;
    TrainingTrace trace = train_parity(cell_config, config.seeds[static_cast<size_t>(s)]);
    summary.cells[static_cast<size_t>(c)].final_accuracies[static_cast<size_t>(s)] =
        trace.final_accuracy();
    if (config.keep_traces)
      summary.traces[static_cast<size_t>(c)][static_cast<size_t>(s)] = std::move(trace);
    if (progress) {
      std::lock_guard<std::mutex> lock(progress_mutex);
      progress(done.fetch_add(1, std::memory_order_relaxed) + 1, total);
    } else {
      done.fetch_add(1, std::memory_order_relaxed);
    }
  });

  for (auto& cell : summary.cells) {
    cell.mean_final_accuracy = stats::mean(cell.final_accuracies);
    cell.std_final_accuracy =
        cell.final_accuracies.size() > 1 ? stats::std_dev(cell.final_accuracies) : 0.0;
  }
  return summary;
}

double extract_threshold(const SweepSummary& summary, double plateau_floor,
                         double f_anc, double z_slack) {
  if (!(plateau_floor > 0.0 && plateau_floor <= 1.0))
    throw std::invalid_argument("plateau_floor must be in (0, 1]");
  std::map<double, std::map<int, const CellSummary*>> by_p;
  for (const auto& cell : summary.cells)
    if (cell.cell.f_anc == f_anc) by_p[cell.cell.p][cell.cell.rounds] = &cell;
  if (by_p.empty())
    throw std::invalid_argument("summary has no cells at the requested f_anc");

  double threshold = 0.0;
  bool qualified = false;
  for (const auto& [p, by_rounds] : by_p) {
    const CellSummary& deepest = *by_rounds.rbegin()->second;
    bool ok = deepest.mean_final_accuracy >= plateau_floor;
    const CellSummary* previous = nullptr;
    for (const auto& [rounds, cell] : by_rounds) {
      if (ok && previous) {
        const double se_prev = se_of(previous->final_accuracies);
        const double se_here = se_of(cell->final_accuracies);
        const double slack = z_slack * std::hypot(se_prev, se_here);
        ok = cell->mean_final_accuracy >= previous->mean_final_accuracy - slack;
      }
      previous = cell;
    }
    if (!ok) break;
    threshold = p;
    qualified = true;
  }
  if (!qualified)
    throw std::runtime_error(
        "no grid point sustains the plateau floor with round-monotone accuracy");
  return threshold;
}

}  // namespace qecml::trainer
