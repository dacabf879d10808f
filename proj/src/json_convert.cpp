#include "internal/json_convert.hpp"

#include "catex/errors.hpp"

namespace catex {

using nlohmann::json;

template <typename T>
T json_get_or(const json& j, const char* key, const T& fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("config field '") + key + "': " + e.what());
    }
}

// the instantiations the artifact needs
template bool json_get_or<bool>(const json&, const char*, const bool&);
template int json_get_or<int>(const json&, const char*, const int&);
template double json_get_or<double>(const json&, const char*, const double&);
template std::uint64_t json_get_or<std::uint64_t>(const json&, const char*,
                                                  const std::uint64_t&);
#if !defined(__LP64__)
template std::size_t json_get_or<std::size_t>(const json&, const char*, const std::size_t&);
#endif
template std::string json_get_or<std::string>(const json&, const char*, const std::string&);
template std::vector<int> json_get_or<std::vector<int>>(const json&, const char*,
                                                        const std::vector<int>&);
template std::vector<double> json_get_or<std::vector<double>>(const json&, const char*,
                                                              const std::vector<double>&);
template std::vector<std::size_t> json_get_or<std::vector<std::size_t>>(
    const json&, const char*, const std::vector<std::size_t>&);
template std::vector<std::string> json_get_or<std::vector<std::string>>(
    const json&, const char*, const std::vector<std::string>&);

json exchange_params_to_json(const ExchangeParams& p) {
    return json{{"log_k_na", p.log_k_na},
                {"log_k_k", p.log_k_k},
                {"log_k_ca", p.log_k_ca},
                {"cec", p.cec},
                {"activity_model", "ideal"}};
}

ExchangeParams exchange_params_from_json(const json& j) {
    ExchangeParams p;
    p.log_k_na = json_get_or(j, "log_k_na", p.log_k_na);
    p.log_k_k = json_get_or(j, "log_k_k", p.log_k_k);
    p.log_k_ca = json_get_or(j, "log_k_ca", p.log_k_ca);
    p.cec = json_get_or(j, "cec", p.cec);
    std::string act = json_get_or<std::string>(j, "activity_model", "ideal");
    if (act != "ideal") throw InvalidInput("exchange_params: unknown activity_model " + act);
    p.activity_model = ActivityModel::Ideal;
    return p;
}

json transport_config_to_json(const TransportConfig& c) {
    return json{{"n_cells", c.n_cells},
                {"length", c.length},
                {"darcy_velocity", c.darcy_velocity},
                {"porosity", c.porosity},
                {"cfl", c.cfl},
                {"total_pore_volumes", c.total_pore_volumes}};
}

TransportConfig transport_config_from_json(const json& j) {
    TransportConfig c;
    c.n_cells = json_get_or(j, "n_cells", c.n_cells);
    c.length = json_get_or(j, "length", c.length);
    c.darcy_velocity = json_get_or(j, "darcy_velocity", c.darcy_velocity);
    c.porosity = json_get_or(j, "porosity", c.porosity);
    c.cfl = json_get_or(j, "cfl", c.cfl);
    c.total_pore_volumes = json_get_or(j, "total_pore_volumes", c.total_pore_volumes);
    return c;
}

json coupling_config_to_json(const CouplingConfig& c) {
    return json{{"backend", to_string(c.backend)},
                {"skip_equilibrium", c.skip_equilibrium},
                {"skip_tolerance", c.skip_tolerance},
                {"oracle_period", c.oracle_period},
                {"charge_rescale", c.charge_rescale},
                {"record_snapshots", c.record_snapshots}};
}

CouplingConfig coupling_config_from_json(const json& j) {
    CouplingConfig c;
    c.backend = backend_from_string(json_get_or<std::string>(j, "backend", to_string(c.backend)));
    c.skip_equilibrium = json_get_or(j, "skip_equilibrium", c.skip_equilibrium);
    c.skip_tolerance = json_get_or(j, "skip_tolerance", c.skip_tolerance);
    c.oracle_period = json_get_or(j, "oracle_period", c.oracle_period);
    c.charge_rescale = json_get_or(j, "charge_rescale", c.charge_rescale);
    c.record_snapshots = json_get_or(j, "record_snapshots", c.record_snapshots);
    return c;
}

json sampler_spec_to_json(const SamplerSpec& s) {
    return json{{"kind", to_string(s.kind)},
                {"n", s.n},
                {"seed", s.seed},
                {"lo", s.lo},
                {"hi", s.hi},
                {"feature_lo", s.feature_lo},
                {"feature_hi", s.feature_hi},
                {"zero_prob", s.zero_prob},
                {"mean", s.mean},
                {"cov", s.cov},
                {"max_rejections", s.max_rejections}};
}

SamplerSpec sampler_spec_from_json(const json& j) {
    SamplerSpec s;
    s.kind = sampler_kind_from_string(json_get_or<std::string>(j, "kind", to_string(s.kind)));
    s.n = json_get_or(j, "n", s.n);
    s.seed = json_get_or(j, "seed", s.seed);
    s.lo = json_get_or(j, "lo", s.lo);
    s.hi = json_get_or(j, "hi", s.hi);
    s.feature_lo = json_get_or(j, "feature_lo", s.feature_lo);
    s.feature_hi = json_get_or(j, "feature_hi", s.feature_hi);
    s.zero_prob = json_get_or(j, "zero_prob", s.zero_prob);
    s.mean = json_get_or(j, "mean", s.mean);
    s.cov = json_get_or(j, "cov", s.cov);
    s.max_rejections = json_get_or(j, "max_rejections", s.max_rejections);
    return s;
}

json model_spec_to_json(const ModelSpec& s) {
    return json{{"kind", to_string(s.kind)},
                {"residual_connection", s.residual_connection},
                {"n_trees", s.n_trees},
                {"max_depth", s.max_depth},
                {"learning_rate", s.learning_rate},
                {"min_samples_leaf", s.min_samples_leaf},
                {"feature_subsample", s.feature_subsample},
                {"hidden_layers", s.hidden_layers},
                {"epochs", s.epochs},
                {"batch_size", s.batch_size},
                {"mlp_learning_rate", s.mlp_learning_rate},
                {"momentum", s.momentum},
                {"seed", s.seed}};
}

ModelSpec model_spec_from_json(const json& j) {
    // start from the per-kind defaults so omitted fields mean "default for
    // this kind", not "default for gbdt"
    ModelSpec s = ModelSpec::defaults_for(model_kind_from_string(
        json_get_or<std::string>(j, "kind", to_string(ModelSpec{}.kind))));
    s.residual_connection = json_get_or(j, "residual_connection", s.residual_connection);
    s.n_trees = json_get_or(j, "n_trees", s.n_trees);
    s.max_depth = json_get_or(j, "max_depth", s.max_depth);
    s.learning_rate = json_get_or(j, "learning_rate", s.learning_rate);
    s.min_samples_leaf = json_get_or(j, "min_samples_leaf", s.min_samples_leaf);
    s.feature_subsample = json_get_or(j, "feature_subsample", s.feature_subsample);
    s.hidden_layers = json_get_or(j, "hidden_layers", s.hidden_layers);
    s.epochs = json_get_or(j, "epochs", s.epochs);
    s.batch_size = json_get_or(j, "batch_size", s.batch_size);
    s.mlp_learning_rate = json_get_or(j, "mlp_learning_rate", s.mlp_learning_rate);
    s.momentum = json_get_or(j, "momentum", s.momentum);
    s.seed = json_get_or(j, "seed", s.seed);
    return s;
}

json aqueous_to_json(const AqueousSolution& s) {
    return json{{"na", s.na}, {"k", s.k}, {"ca", s.ca}, {"cl", s.cl}, {"no3", s.no3}};
}

AqueousSolution aqueous_from_json(const json& j) {
    AqueousSolution s;
    s.na = json_get_or(j, "na", 0.0);
    s.k = json_get_or(j, "k", 0.0);
    s.ca = json_get_or(j, "ca", 0.0);
    s.cl = json_get_or(j, "cl", 0.0);
    s.no3 = json_get_or(j, "no3", 0.0);
    return s;
}

}  // namespace catex
