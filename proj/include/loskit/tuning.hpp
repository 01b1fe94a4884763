#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "loskit/metrics.hpp"
#include "loskit/serialize.hpp"

namespace loskit {

// One hyperparameter sampler.
struct ChoiceSampler {
    std::vector<json> options;
};
struct IntRangeSampler {
    long long lo = 0, hi = 0;  // inclusive
};
struct LogUniformSampler {
    double lo = 0, hi = 0;  // positive
};
using Sampler = std::variant<ChoiceSampler, IntRangeSampler, LogUniformSampler>;

// Dimensions stay sorted by name so sampling order is deterministic.
struct SearchSpace {
    std::vector<std::pair<std::string, Sampler>> dims;

    void validate() const;
    json sample(Rng& rng) const;  // one params object

    // {"name": {"choice": [...]}, "name": {"int": [lo, hi]},
    //  "name": {"log_uniform": [lo, hi]}}
    static SearchSpace from_json(const json& j);
    json to_json() const;
};

struct TrialResult {
    std::size_t index = 0;
    std::uint64_t seed = 0;
    json params;
    std::optional<MetricsReport> report;  // absent when the trial failed
    double objective = 0;
    bool failed = false;
    std::string error;
};

struct SearchResult {
    json best_params;
    std::size_t best_index = 0;
    double best_objective = 0;
    std::vector<TrialResult> trials;
};

// Trains and scores one sampled configuration; the trial seed is a
// deterministic function of (seed, trial index).
using TrialRunner = std::function<MetricsReport(const json& params, std::uint64_t trial_seed)>;

// n_trials independent draws; best by max objective, ties to the earliest
// trial. Failed trials are recorded and skipped; all failing is an error.
SearchResult random_search(const SearchSpace& space, std::size_t n_trials, std::uint64_t seed,
                           const std::string& objective, const TrialRunner& run_trial);

}  // namespace loskit
