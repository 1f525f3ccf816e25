#include "qecml/dataset.h"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "qecml/rng.h"

namespace qecml {

void Dataset::check_valid() const {
  if (n_features <= 0 || n_classes <= 0) {
    throw std::invalid_argument("Dataset: feature and class counts must be positive");
  }
  for (const Sample& sample : samples) {
    if (static_cast<int>(sample.features.size()) != n_features) {
      throw std::invalid_argument("Dataset: inconsistent feature length");
    }
    if (sample.label < 0 || sample.label >= n_classes) {
      throw std::invalid_argument("Dataset: label out of range");
    }
  }
}

Dataset parity_dataset() {
  Dataset data;
  data.n_features = 2;
  data.n_classes = 2;
  const int rows[4][3] = {{0, 0, 0}, {0, 1, 1}, {1, 0, 1}, {1, 1, 0}};
  for (int copy = 0; copy < 6; ++copy) {
    for (const auto& row : rows) {
      data.samples.push_back(
          {{static_cast<double>(row[0]), static_cast<double>(row[1])}, row[2]});
    }
  }
  return data;
}

Dataset synthetic_multiclass(int n_features, int n_classes, int per_class,
                             uint64_t seed) {
  if (n_features <= 0 || n_classes <= 0 || per_class <= 0) {
    throw std::invalid_argument("synthetic_multiclass: counts must be positive");
  }
  if (n_classes > n_features) {
    throw std::invalid_argument("synthetic_multiclass: more classes than features");
  }
  Dataset data;
  data.n_features = n_features;
  data.n_classes = n_classes;
  Rng rng(Rng::derive(seed, 0xda7a));
  const int block = n_features / n_classes;
  for (int c = 0; c < n_classes; ++c) {
    for (int i = 0; i < per_class; ++i) {
      Sample sample;
      sample.label = c;
      sample.features.resize(n_features);
      for (int f = 0; f < n_features; ++f) {
        const bool in_block = f >= c * block && f < (c + 1) * block;
        const double mean = in_block ? 3.0 : 1.0;
        sample.features[f] = std::max(0.05, mean + 0.4 * rng.normal());
      }
      data.samples.push_back(std::move(sample));
    }
  }
  // Seeded Fisher-Yates so batches mix classes.
  for (size_t i = data.samples.size(); i > 1; --i) {
    const uint64_t j = rng.uniform_below(i);
    std::swap(data.samples[i - 1], data.samples[j]);
  }
  return data;
}

void save_csv(const Dataset& data, const std::string& path) {
  data.check_valid();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_csv: cannot open " + path);
  out << data.samples.size() << ',' << data.n_features << ',' << data.n_classes
      << '\n';
  out.precision(17);
  for (const Sample& sample : data.samples) {
    for (double f : sample.features) out << f << ',';
    out << sample.label << '\n';
  }
  if (!out) throw std::runtime_error("save_csv: write failed for " + path);
}

Dataset load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("load_csv: empty file");
  Dataset data;
  size_t n_samples = 0;
  {
    std::istringstream header(line);
    char comma = 0;
    if (!(header >> n_samples >> comma >> data.n_features >> comma >> data.n_classes)) {
      throw std::runtime_error("load_csv: malformed header in " + path);
    }
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    Sample sample;
    sample.features.resize(data.n_features);
    char comma = 0;
    for (int f = 0; f < data.n_features; ++f) {
      if (!(row >> sample.features[f] >> comma)) {
        throw std::runtime_error("load_csv: malformed row in " + path);
      }
    }
    if (!(row >> sample.label)) {
      throw std::runtime_error("load_csv: missing label in " + path);
    }
    data.samples.push_back(std::move(sample));
  }
  if (data.samples.size() != n_samples) {
    throw std::runtime_error("load_csv: sample count mismatch in " + path);
  }
  data.check_valid();
  return data;
}

}  // namespace qecml
