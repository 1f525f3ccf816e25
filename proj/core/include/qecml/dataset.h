#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qecml {

struct Sample {
  std::vector<double> features;
  int label = 0;
};

struct Dataset {
  int n_features = 0;
  int n_classes = 0;
  std::vector<Sample> samples;

  void check_valid() const;
};

// The four parity rows (b1, b2) -> b1 xor b2, duplicated to 24 samples.
Dataset parity_dataset();

// Seeded Gaussian-blob multiclass data for amplitude encoding: each class
// raises one block of feature indices above a positive baseline. Feature
// vectors are left unnormalized; encoding normalizes.
Dataset synthetic_multiclass(int n_features, int n_classes, int per_class,
                             uint64_t seed);

// CSV layout: one header line "n_samples,n_features,n_classes", then one
// line per sample with n_features values followed by the integer label.
void save_csv(const Dataset& data, const std::string& path);
Dataset load_csv(const std::string& path);

}  // namespace qecml
