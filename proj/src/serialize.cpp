#include "loskit/serialize.hpp"

#include <fstream>

namespace loskit {

json read_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error::runtime("cannot open JSON file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw Error::runtime("malformed JSON in " + path + ": " + e.what());
    }
    return j;
}

void write_json_file(const json& j, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error::runtime("cannot open file for writing: " + path);
    out << j.dump(2) << '\n';
    if (!out)
        throw Error::runtime("write failed: " + path);
}

namespace {

// Guards a params object against typos.
void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& what) {
    if (!j.is_object())
        throw Error::validation(what + ": expected a JSON object");
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) ok = true;
        if (!ok)
            throw Error::validation(what + ": unknown key '" + key + "'");
    }
}

template <typename T>
void maybe(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

json max_features_to_json(const MaxFeatures& mf) {
    switch (mf.mode) {
        case MaxFeatures::Mode::all: return "all";
        case MaxFeatures::Mode::sqrt_of_d: return "sqrt";
        case MaxFeatures::Mode::count: return mf.count;
    }
    return "all";
}

MaxFeatures max_features_from_json(const json& j) {
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "all") return MaxFeatures::all();
        if (s == "sqrt" || s == "auto") return MaxFeatures::sqrt_of_d();
        throw Error::validation("max_features: expected 'all', 'sqrt' or a count, got '" + s +
                                "'");
    }
    if (j.is_number_unsigned() || j.is_number_integer())
        return MaxFeatures::exact(j.get<std::size_t>());
    throw Error::validation("max_features: expected 'all', 'sqrt' or a count");
}

}  // namespace

json to_json(const TreeParams& p) {
    json j;
    j["criterion"] = criterion_name(p.criterion);
    if (p.max_depth != std::numeric_limits<std::size_t>::max()) j["max_depth"] = p.max_depth;
    j["min_samples_split"] = p.min_samples_split;
    j["min_samples_leaf"] = p.min_samples_leaf;
    j["max_features"] = max_features_to_json(p.max_features);
    j["seed"] = p.seed;
    return j;
}

TreeParams tree_params_from_json(const json& j, TreeParams base) {
    check_keys(j,
               {"criterion", "max_depth", "min_samples_split", "min_samples_leaf",
                "max_features", "seed"},
               "tree params");
    TreeParams p = base;
    if (j.contains("criterion")) p.criterion = criterion_from_name(j.at("criterion"));
    maybe(j, "max_depth", p.max_depth);
    maybe(j, "min_samples_split", p.min_samples_split);
    maybe(j, "min_samples_leaf", p.min_samples_leaf);
    if (j.contains("max_features")) p.max_features = max_features_from_json(j.at("max_features"));
    maybe(j, "seed", p.seed);
    p.validate();
    return p;
}

json to_json(const ForestParams& p) {
    json j = to_json(p.tree);
    j.erase("seed");
    j["n_estimators"] = p.n_estimators;
    j["bootstrap"] = p.bootstrap;
    j["seed"] = p.seed;
    return j;
}

ForestParams forest_params_from_json(const json& j, ForestParams base) {
    check_keys(j,
               {"criterion", "max_depth", "min_samples_split", "min_samples_leaf",
                "max_features", "n_estimators", "bootstrap", "seed"},
               "forest params");
    ForestParams p = base;
    json tree_part = j;
    tree_part.erase("n_estimators");
    tree_part.erase("bootstrap");
    tree_part.erase("seed");
    p.tree = tree_params_from_json(tree_part, base.tree);
    maybe(j, "n_estimators", p.n_estimators);
    maybe(j, "bootstrap", p.bootstrap);
    maybe(j, "seed", p.seed);
    p.validate();
    return p;
}

json to_json(const AdaBoostParams& p) {
    return json{{"n_estimators", p.n_estimators},
                {"learning_rate", p.learning_rate},
                {"base_max_depth", p.base_max_depth},
                {"seed", p.seed}};
}

AdaBoostParams adaboost_params_from_json(const json& j, AdaBoostParams base) {
    check_keys(j, {"n_estimators", "learning_rate", "base_max_depth", "seed"},
               "adaboost params");
    AdaBoostParams p = base;
    maybe(j, "n_estimators", p.n_estimators);
    maybe(j, "learning_rate", p.learning_rate);
    maybe(j, "base_max_depth", p.base_max_depth);
    maybe(j, "seed", p.seed);
    p.validate();
    return p;
}

json to_json(const GbmParams& p) {
    return json{{"n_estimators", p.n_estimators},
                {"learning_rate", p.learning_rate},
                {"max_depth", p.max_depth},
                {"num_leaves", p.num_leaves},
                {"min_data_in_leaf", p.min_data_in_leaf},
                {"leaf_l2", p.leaf_l2},
                {"n_bins", p.n_bins},
                {"goss", p.goss},
                {"goss_top_fraction", p.goss_top_fraction},
                {"goss_other_fraction", p.goss_other_fraction},
                {"efb", p.efb},
                {"efb_max_conflict", p.efb_max_conflict},
                {"seed", p.seed}};
}

GbmParams gbm_params_from_json(const json& j, GbmParams base) {
    check_keys(j,
               {"n_estimators", "learning_rate", "max_depth", "num_leaves", "min_data_in_leaf",
                "leaf_l2", "n_bins", "goss", "goss_top_fraction", "goss_other_fraction", "efb",
                "efb_max_conflict", "seed"},
               "gbm params");
    GbmParams p = base;
    maybe(j, "n_estimators", p.n_estimators);
    maybe(j, "learning_rate", p.learning_rate);
    maybe(j, "max_depth", p.max_depth);
    maybe(j, "num_leaves", p.num_leaves);
    maybe(j, "min_data_in_leaf", p.min_data_in_leaf);
    maybe(j, "leaf_l2", p.leaf_l2);
    maybe(j, "n_bins", p.n_bins);
    maybe(j, "goss", p.goss);
    maybe(j, "goss_top_fraction", p.goss_top_fraction);
    maybe(j, "goss_other_fraction", p.goss_other_fraction);
    maybe(j, "efb", p.efb);
    maybe(j, "efb_max_conflict", p.efb_max_conflict);
    maybe(j, "seed", p.seed);
    p.validate();
    return p;
}

json to_json(const LogisticParams& p) {
    return json{{"C", p.C}, {"penalty", "l2"}, {"max_iter", p.max_iter}, {"tol", p.tol}};
}

LogisticParams logistic_params_from_json(const json& j, LogisticParams base) {
    check_keys(j, {"C", "penalty", "max_iter", "tol"}, "logistic params");
    LogisticParams p = base;
    maybe(j, "C", p.C);
    maybe(j, "max_iter", p.max_iter);
    maybe(j, "tol", p.tol);
    if (j.contains("penalty") && j.at("penalty") != "l2")
        throw Error::validation("logistic params: only the l2 penalty is supported");
    p.validate();
    return p;
}

namespace {

json tree_nodes_to_json(const std::vector<TreeNode>& nodes) {
    json arr = json::array();
    for (const auto& n : nodes) {
        if (n.is_leaf()) {
            arr.push_back(json{{"counts", n.class_counts}, {"class", n.predicted_class}});
        } else {
            arr.push_back(json{{"feature", n.feature},
                               {"threshold", n.threshold},
                               {"left", n.left},
                               {"right", n.right}});
        }
    }
    return arr;
}

std::vector<TreeNode> tree_nodes_from_json(const json& arr) {
    std::vector<TreeNode> nodes;
    for (const auto& j : arr) {
        TreeNode n;
        if (j.contains("feature")) {
            n.feature = j.at("feature").get<int>();
            n.threshold = j.at("threshold").get<double>();
            n.left = j.at("left").get<int>();
            n.right = j.at("right").get<int>();
        } else {
            n.class_counts = j.at("counts").get<std::vector<double>>();
            n.predicted_class = j.at("class").get<int>();
        }
        nodes.push_back(std::move(n));
    }
    return nodes;
}

json tree_payload(const TreeModel& m) {
    return json{{"n_features", m.n_features},
                {"n_classes", m.n_classes},
                {"importance", m.importance},
                {"nodes", tree_nodes_to_json(m.nodes)}};
}

TreeModel tree_from_payload(const json& j, const json& params) {
    TreeModel m;
    m.n_features = j.at("n_features").get<std::size_t>();
    m.n_classes = j.at("n_classes").get<std::size_t>();
    m.importance = j.at("importance").get<std::vector<double>>();
    m.nodes = tree_nodes_from_json(j.at("nodes"));
    m.params = tree_params_from_json(params);
    return m;
}

json regtree_to_json(const RegTree& t) {
    json nodes = json::array();
    for (const auto& n : t.nodes) {
        if (n.feature < 0) {
            nodes.push_back(json{{"value", n.value}});
        } else {
            nodes.push_back(json{{"feature", n.feature},
                               {"threshold", n.threshold},
                               {"left", n.left},
                               {"right", n.right},
                               {"gain", n.gain}});
        }
    }
    return nodes;
}

RegTree regtree_from_json(const json& arr) {
    RegTree t;
    for (const auto& j : arr) {
        RegTreeNode n;
        if (j.contains("feature")) {
            n.feature = j.at("feature").get<int>();
            n.threshold = j.at("threshold").get<double>();
            n.left = j.at("left").get<int>();
            n.right = j.at("right").get<int>();
            n.gain = j.at("gain").get<double>();
        } else {
            n.value = j.at("value").get<double>();
        }
        t.nodes.push_back(std::move(n));
    }
    return t;
}

}  // namespace

json model_to_json(const Model& model) {
    json envelope;
    envelope["model_type"] = model_family_name(family_of(model));
    envelope["version"] = kModelFormatVersion;

    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, TreeModel>) {
                envelope["params"] = to_json(m.params);
                envelope["payload"] = tree_payload(m);
            } else if constexpr (std::is_same_v<T, ForestModel>) {
                envelope["params"] = to_json(m.params);
                json trees = json::array();
                for (const auto& t : m.trees) trees.push_back(tree_payload(t));
                envelope["payload"] = json{{"n_features", m.n_features},
                                           {"n_classes", m.n_classes},
                                           {"trees", std::move(trees)}};
            } else if constexpr (std::is_same_v<T, AdaBoostModel>) {
                envelope["params"] = to_json(m.params);
                json stages = json::array();
                for (const auto& s : m.stages)
                    stages.push_back(json{{"alpha", s.alpha}, {"tree", tree_payload(s.tree)}});
                envelope["payload"] = json{{"n_features", m.n_features},
                                           {"n_classes", m.n_classes},
                                           {"stages", std::move(stages)}};
            } else if constexpr (std::is_same_v<T, GbmModel>) {
                envelope["params"] = to_json(m.params);
                json stages = json::array();
                for (const auto& stage : m.stages) {
                    json trees = json::array();
                    for (const auto& t : stage) trees.push_back(regtree_to_json(t));
                    stages.push_back(std::move(trees));
                }
                json payload{{"n_features", m.n_features},
                             {"n_classes", m.n_classes},
                             {"prior_scores", m.prior_scores},
                             {"importance", m.importance},
                             {"stages", std::move(stages)}};
                if (m.efb) {
                    json bundles = json::array();
                    for (const auto& b : m.efb->bundles)
                        bundles.push_back(json{{"members", b.members},
                                               {"offsets", b.offsets},
                                               {"ranges", b.ranges}});
                    payload["efb"] = json{{"n_input_features", m.efb->n_input_features},
                                          {"bundles", std::move(bundles)}};
                }
                envelope["payload"] = std::move(payload);
            } else {
                envelope["params"] = to_json(m.params);
                std::vector<double> flat;
                flat.reserve(m.weights.rows() * m.weights.cols());
                for (std::size_t i = 0; i < m.weights.rows(); ++i)
                    for (std::size_t j = 0; j < m.weights.cols(); ++j)
                        flat.push_back(m.weights(i, j));
                envelope["payload"] = json{{"n_classes", m.n_classes()},
                                           {"n_features", m.n_features()},
                                           {"weights", std::move(flat)},
                                           {"intercepts", m.intercepts}};
            }
        },
        model);
    return envelope;
}

Model model_from_json(const json& j) {
    if (!j.is_object() || !j.contains("model_type") || !j.contains("version"))
        throw Error::runtime("model file: missing model_type or version");
    const int version = j.at("version").get<int>();
    if (version != kModelFormatVersion)
        throw Error::runtime("model file: unsupported version " + std::to_string(version));
    const std::string type = j.at("model_type").get<std::string>();
    const json& payload = j.at("payload");
    const json& params = j.at("params");

    try {
        if (type == "tree") {
            return tree_from_payload(payload, params);
        }
        if (type == "forest") {
            ForestModel m;
            m.n_features = payload.at("n_features").get<std::size_t>();
            m.n_classes = payload.at("n_classes").get<std::size_t>();
            m.params = forest_params_from_json(params);
            json tree_params = to_json(m.params.tree);
            for (const auto& t : payload.at("trees"))
                m.trees.push_back(tree_from_payload(t, tree_params));
            return m;
        }
        if (type == "adaboost") {
            AdaBoostModel m;
            m.n_features = payload.at("n_features").get<std::size_t>();
            m.n_classes = payload.at("n_classes").get<std::size_t>();
            m.params = adaboost_params_from_json(params);
            for (const auto& s : payload.at("stages")) {
                AdaBoostStage stage;
                stage.alpha = s.at("alpha").get<double>();
                stage.tree = tree_from_payload(s.at("tree"), json::object());
                m.stages.push_back(std::move(stage));
            }
            return m;
        }
        if (type == "gbm") {
            GbmModel m;
            m.params = gbm_params_from_json(params);
            m.n_features = payload.at("n_features").get<std::size_t>();
            m.n_classes = payload.at("n_classes").get<std::size_t>();
            m.prior_scores = payload.at("prior_scores").get<std::vector<double>>();
            m.importance = payload.at("importance").get<std::vector<double>>();
            for (const auto& stage : payload.at("stages")) {
                std::vector<RegTree> trees;
                for (const auto& t : stage) trees.push_back(regtree_from_json(t));
                m.stages.push_back(std::move(trees));
            }
            if (payload.contains("efb")) {
                EfbPlan plan;
                plan.n_input_features =
                    payload.at("efb").at("n_input_features").get<std::size_t>();
                for (const auto& b : payload.at("efb").at("bundles")) {
                    EfbBundle bundle;
                    bundle.members = b.at("members").get<std::vector<std::size_t>>();
                    bundle.offsets = b.at("offsets").get<std::vector<double>>();
                    bundle.ranges = b.at("ranges").get<std::vector<double>>();
                    plan.bundles.push_back(std::move(bundle));
                }
                m.efb = std::move(plan);
            }
            return m;
        }
        if (type == "logistic") {
            LogisticModel m;
            const std::size_t k = payload.at("n_classes").get<std::size_t>();
            const std::size_t d = payload.at("n_features").get<std::size_t>();
            const auto flat = payload.at("weights").get<std::vector<double>>();
            if (flat.size() != k * d)
                throw Error::runtime("model file: logistic weight size mismatch");
            m.weights = Matrix(k, d);
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t jj = 0; jj < d; ++jj) m.weights(i, jj) = flat[i * d + jj];
            m.intercepts = payload.at("intercepts").get<std::vector<double>>();
            m.params = logistic_params_from_json(params);
            return m;
        }
    } catch (const json::exception& e) {
        throw Error::runtime(std::string("model file: malformed payload: ") + e.what());
    }
    throw Error::runtime("model file: unknown model_type '" + type + "'");
}

void save_model(const Model& model, const std::string& path) {
    write_json_file(model_to_json(model), path);
}

Model load_model(const std::string& path) {
    return model_from_json(read_json_file(path));
}

json to_json(const PcaModel& m) {
    const std::size_t d = m.n_features();
    std::vector<double> flat;
    flat.reserve(d * d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) flat.push_back(m.components(i, j));
    return json{{"means", m.means},
                {"components", std::move(flat)},
                {"explained_variance", m.explained_variance},
                {"explained_ratio", m.explained_ratio},
                {"degenerate", m.degenerate}};
}

PcaModel pca_from_json(const json& j) {
    PcaModel m;
    m.means = j.at("means").get<std::vector<double>>();
    const std::size_t d = m.means.size();
    const auto flat = j.at("components").get<std::vector<double>>();
    if (flat.size() != d * d)
        throw Error::runtime("pca file: component size mismatch");
    m.components = Matrix(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t jj = 0; jj < d; ++jj) m.components(i, jj) = flat[i * d + jj];
    m.explained_variance = j.at("explained_variance").get<std::vector<double>>();
    m.explained_ratio = j.at("explained_ratio").get<std::vector<double>>();
    m.degenerate = j.at("degenerate").get<bool>();
    return m;
}

json to_json(const Standardizer& s) {
    std::vector<int> zv(s.zero_variance.begin(), s.zero_variance.end());
    return json{{"feature_names", s.feature_names},
                {"mean", s.mean},
                {"stddev", s.stddev},
                {"zero_variance", zv}};
}

Standardizer standardizer_from_json(const json& j) {
    Standardizer s;
    s.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    s.mean = j.at("mean").get<std::vector<double>>();
    s.stddev = j.at("stddev").get<std::vector<double>>();
    const auto zv = j.at("zero_variance").get<std::vector<int>>();
    s.zero_variance.assign(zv.begin(), zv.end());
    return s;
}

json to_json(const EncoderSet& enc) {
    json maps = json::array();
    for (const auto& m : enc.maps)
        maps.push_back(json{{"column", m.column},
                            {"categories", m.ordered_categories},
                            {"explicit", m.explicit_order}});
    json bins = json::array();
    for (const auto& r : enc.bins.ranges) bins.push_back(json::array({r.lo, r.hi}));
    return json{{"maps", std::move(maps)}, {"bins", std::move(bins)}};
}

EncoderSet encoders_from_json(const json& j) {
    EncoderSet enc;
    for (const auto& m : j.at("maps")) {
        OrdinalMap map;
        map.column = m.at("column").get<std::string>();
        map.ordered_categories = m.at("categories").get<std::vector<std::string>>();
        map.explicit_order = m.at("explicit").get<bool>();
        enc.maps.push_back(std::move(map));
    }
    std::vector<std::pair<int, int>> edges;
    for (const auto& e : j.at("bins")) edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    enc.bins = BinSpec::from_edges(edges);
    return enc;
}

json to_json(const MetricsReport& rep) {
    json j;
    j["accuracy"] = rep.accuracy;
    j["per_class"] = json::object();
    for (std::size_t c = 0; c < rep.precision.size(); ++c) {
        j["per_class"][std::to_string(c)] =
            json{{"precision", rep.precision[c]},
                 {"recall", rep.recall[c]},
                 {"f1", rep.f1[c]},
                 {"support", rep.support[c]},
                 {"degenerate", rep.precision_degenerate[c] || rep.recall_degenerate[c] ||
                                    rep.f1_degenerate[c]}};
    }
    j["macro"] = json{{"precision", rep.macro_precision},
                      {"recall", rep.macro_recall},
                      {"f1", rep.macro_f1}};
    j["weighted"] = json{{"precision", rep.weighted_precision},
                         {"recall", rep.weighted_recall},
                         {"f1", rep.weighted_f1}};
    j["kappa"] = rep.kappa;
    j["kappa_degenerate"] = rep.kappa_degenerate;
    j["mcc"] = rep.mcc;
    j["mcc_degenerate"] = rep.mcc_degenerate;
    return j;
}

json to_json(const CleanReport& rep) {
    return json{{"rows_dropped", rep.rows_dropped},
                {"missing_per_column", rep.missing_per_column},
                {"columns_dropped", rep.columns_dropped},
                {"drop_misses", rep.drop_misses}};
}

json to_json(const ProfileReport& rep) {
    json j;
    j["numeric"] = json::object();
    for (const auto& [name, s] : rep.numeric)
        j["numeric"][name] = json{{"min", s.min},
                                  {"max", s.max},
                                  {"mean", s.mean},
                                  {"stddev", s.stddev},
                                  {"n_missing", s.n_missing},
                                  {"degenerate", s.degenerate}};
    j["categorical"] = json::object();
    for (const auto& [name, s] : rep.categorical) {
        json freq = json::array();
        for (const auto& [label, count] : s.frequencies)
            freq.push_back(json::array({label, count}));
        j["categorical"][name] = json{{"frequencies", std::move(freq)},
                                      {"n_missing", s.n_missing}};
    }
    json corr = json::array();
    for (const auto& e : rep.correlations)
        corr.push_back(
            json{{"a", e.a}, {"b", e.b}, {"r", e.r}, {"degenerate", e.degenerate}});
    j["correlations"] = std::move(corr);
    j["group_mean_los"] = json::object();
    for (const auto& [name, rows] : rep.group_mean_los) {
        json arr = json::array();
        for (const auto& r : rows)
            arr.push_back(json{{"category", r.category},
                               {"mean_los", r.mean_los},
                               {"count", r.count},
                               {"n_with_los", r.n_with_los}});
        j["group_mean_los"][name] = std::move(arr);
    }
    j["los_histogram"] = rep.los_histogram;
    return j;
}

}  // namespace loskit
