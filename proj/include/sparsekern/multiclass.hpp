#pragma once

#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "sparsekern/datasets.hpp"
#include "sparsekern/model.hpp"

namespace sparsekern {

/// One binary model per unordered label pair (a, b), a < b. A model votes for
/// a when its prediction is >= 0 and for b otherwise.
struct OvoEnsemble {
    std::vector<double> classes;  ///< sorted
    std::map<std::pair<double, double>, DiscreteModel> pairwise;
};

/// Fits a binary model on samples labelled +1 / -1.
using BinaryTrainer = std::function<DiscreteModel(const SampleSet&)>;

/// Trains every pair on its own samples, lower label mapped to +1 and higher to -1.
/// Throws ConfigError with fewer than two classes.
OvoEnsemble ovo_train(const SampleSet& samples, const BinaryTrainer& trainer);

/// Votes per class, in the order of ensemble.classes.
std::vector<std::size_t> ovo_votes(const OvoEnsemble& ensemble, Point x);

/// Majority vote; ties go to the lowest label.
double ovo_predict(const OvoEnsemble& ensemble, Point x);

/// Fraction of rows whose predicted label equals y.
double ovo_accuracy(const OvoEnsemble& ensemble, const SampleSet& samples);

}  // namespace sparsekern
