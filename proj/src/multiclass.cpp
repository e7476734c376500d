#include "sparsekern/multiclass.hpp"

#include <algorithm>

#include "sparsekern/error.hpp"

namespace sparsekern {

OvoEnsemble ovo_train(const SampleSet& samples, const BinaryTrainer& trainer) {
    samples.validate();
    OvoEnsemble ens;
    for (std::size_t i = 0; i < samples.size(); ++i) ens.classes.push_back(samples.y[static_cast<Eigen::Index>(i)]);
    std::sort(ens.classes.begin(), ens.classes.end());
    ens.classes.erase(std::unique(ens.classes.begin(), ens.classes.end()), ens.classes.end());
    if (ens.classes.size() < 2) throw ConfigError("one-vs-one needs at least two classes");

    for (std::size_t a = 0; a < ens.classes.size(); ++a)
        for (std::size_t b = a + 1; b < ens.classes.size(); ++b) {
            std::vector<std::size_t> idx;
            for (std::size_t i = 0; i < samples.size(); ++i) {
                const double y = samples.y[static_cast<Eigen::Index>(i)];
                if (y == ens.classes[a] || y == ens.classes[b]) idx.push_back(i);
            }
            SampleSet pair = samples.subset(idx);
            for (Eigen::Index i = 0; i < pair.y.size(); ++i) pair.y[i] = pair.y[i] == ens.classes[a] ? 1.0 : -1.0;
            ens.pairwise.emplace(std::make_pair(ens.classes[a], ens.classes[b]), trainer(pair));
        }
    return ens;
}

std::vector<std::size_t> ovo_votes(const OvoEnsemble& ensemble, Point x) {
    std::vector<std::size_t> votes(ensemble.classes.size(), 0);
    auto slot = [&](double label) {
        return static_cast<std::size_t>(std::lower_bound(ensemble.classes.begin(), ensemble.classes.end(), label) -
                                        ensemble.classes.begin());
    };
    for (const auto& [pair, model] : ensemble.pairwise) {
        const double winner = predict_discrete(model, x) >= 0.0 ? pair.first : pair.second;
        ++votes[slot(winner)];
    }
    return votes;
}

double ovo_predict(const OvoEnsemble& ensemble, Point x) {
    if (ensemble.classes.empty()) throw ConfigError("empty ensemble");
    const auto votes = ovo_votes(ensemble, x);
    const auto best = std::max_element(votes.begin(), votes.end()) - votes.begin();
    return ensemble.classes[static_cast<std::size_t>(best)];
}

double ovo_accuracy(const OvoEnsemble& ensemble, const SampleSet& samples) {
    if (samples.size() == 0) return 0.0;
    std::size_t hit = 0;
    for (std::size_t i = 0; i < samples.size(); ++i)
        if (ovo_predict(ensemble, samples.x(i)) == samples.y[static_cast<Eigen::Index>(i)]) ++hit;
    return static_cast<double>(hit) / static_cast<double>(samples.size());
}

}  // namespace sparsekern
