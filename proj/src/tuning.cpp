#include "loskit/tuning.hpp"

#include <algorithm>
#include <cmath>

#include "loskit/error.hpp"
#include "loskit/rng.hpp"

namespace loskit {

void SearchSpace::validate() const {
    if (dims.empty())
        throw Error::validation("search space: no dimensions");
    for (const auto& [name, sampler] : dims) {
        if (std::holds_alternative<ChoiceSampler>(sampler)) {
            if (std::get<ChoiceSampler>(sampler).options.empty())
                throw Error::validation("search space: empty choice list for " + name);
        } else if (std::holds_alternative<IntRangeSampler>(sampler)) {
            const auto& r = std::get<IntRangeSampler>(sampler);
            if (r.hi < r.lo)
                throw Error::validation("search space: bad integer range for " + name);
        } else {
            const auto& r = std::get<LogUniformSampler>(sampler);
            if (!(r.lo > 0) || r.hi < r.lo)
                throw Error::validation("search space: log_uniform needs 0 < lo <= hi for " +
                                        name);
        }
    }
}

json SearchSpace::sample(Rng& rng) const {
    json params = json::object();
    for (const auto& [name, sampler] : dims) {
        if (std::holds_alternative<ChoiceSampler>(sampler)) {
            const auto& options = std::get<ChoiceSampler>(sampler).options;
            params[name] = options[uniform_index(rng, options.size())];
        } else if (std::holds_alternative<IntRangeSampler>(sampler)) {
            const auto& r = std::get<IntRangeSampler>(sampler);
            params[name] = uniform_int(rng, r.lo, r.hi);
        } else {
            const auto& r = std::get<LogUniformSampler>(sampler);
            const double u = uniform_real(rng);
            params[name] = std::exp(std::log(r.lo) + u * (std::log(r.hi) - std::log(r.lo)));
        }
    }
    return params;
}

SearchSpace SearchSpace::from_json(const json& j) {
    if (!j.is_object())
        throw Error::validation("search space: expected a JSON object");
    SearchSpace space;
    for (const auto& [name, spec] : j.items()) {
        if (!spec.is_object() || spec.size() != 1)
            throw Error::validation("search space: dimension " + name +
                                    " must be {\"choice\"|\"int\"|\"log_uniform\": ...}");
        if (spec.contains("choice")) {
            ChoiceSampler s;
            for (const auto& option : spec.at("choice")) s.options.push_back(option);
            space.dims.emplace_back(name, std::move(s));
        } else if (spec.contains("int")) {
            const auto& arr = spec.at("int");
            space.dims.emplace_back(
                name, IntRangeSampler{arr.at(0).get<long long>(), arr.at(1).get<long long>()});
        } else if (spec.contains("log_uniform")) {
            const auto& arr = spec.at("log_uniform");
            space.dims.emplace_back(
                name, LogUniformSampler{arr.at(0).get<double>(), arr.at(1).get<double>()});
        } else {
            throw Error::validation("search space: dimension " + name +
                                    " has no recognized sampler");
        }
    }
    std::sort(space.dims.begin(), space.dims.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    space.validate();
    return space;
}

json SearchSpace::to_json() const {
    json j = json::object();
    for (const auto& [name, sampler] : dims) {
        if (std::holds_alternative<ChoiceSampler>(sampler)) {
            j[name] = json{{"choice", std::get<ChoiceSampler>(sampler).options}};
        } else if (std::holds_alternative<IntRangeSampler>(sampler)) {
            const auto& r = std::get<IntRangeSampler>(sampler);
            j[name] = json{{"int", json::array({r.lo, r.hi})}};
        } else {
            const auto& r = std::get<LogUniformSampler>(sampler);
            j[name] = json{{"log_uniform", json::array({r.lo, r.hi})}};
        }
    }
    return j;
}

SearchResult random_search(const SearchSpace& space, std::size_t n_trials, std::uint64_t seed,
                           const std::string& objective, const TrialRunner& run_trial) {
    if (n_trials < 1)
        throw Error::validation("random_search: n_trials must be >= 1");
    space.validate();
    {
        MetricsReport probe;  // metric name check up front
        probe.precision.resize(1);
        metric_by_name(probe, objective);
    }

    SearchResult result;
    std::optional<std::size_t> best;
    for (std::size_t t = 0; t < n_trials; ++t) {
        TrialResult trial;
        trial.index = t;
        trial.seed = derive_seed(seed, t);
        Rng rng(trial.seed);
        trial.params = space.sample(rng);
        try {
            MetricsReport report = run_trial(trial.params, trial.seed);
            trial.objective = metric_by_name(report, objective);
            trial.report = std::move(report);
        } catch (const std::exception& e) {
            trial.failed = true;
            trial.error = e.what();
        }
        if (!trial.failed && (!best || trial.objective > result.best_objective)) {
            best = t;
            result.best_objective = trial.objective;
            result.best_params = trial.params;
        }
        result.trials.push_back(std::move(trial));
    }
    if (!best)
        throw Error::runtime("random_search: every trial failed");
    result.best_index = *best;
    return result;
}

}  // namespace loskit
