#pragma once

// JSON round-trips for the config-bearing types; kept out of the public
// headers so only the few translation units that serialize pay for json.hpp.

#include <json.hpp>

#include "catex/coupling.hpp"
#include "catex/dataset.hpp"
#include "catex/geochem.hpp"
#include "catex/surrogate.hpp"
#include "catex/transport.hpp"

namespace catex {

nlohmann::json exchange_params_to_json(const ExchangeParams& p);
ExchangeParams exchange_params_from_json(const nlohmann::json& j);

nlohmann::json transport_config_to_json(const TransportConfig& c);
TransportConfig transport_config_from_json(const nlohmann::json& j);

nlohmann::json coupling_config_to_json(const CouplingConfig& c);
CouplingConfig coupling_config_from_json(const nlohmann::json& j);

nlohmann::json sampler_spec_to_json(const SamplerSpec& s);
SamplerSpec sampler_spec_from_json(const nlohmann::json& j);

nlohmann::json model_spec_to_json(const ModelSpec& s);
ModelSpec model_spec_from_json(const nlohmann::json& j);

nlohmann::json aqueous_to_json(const AqueousSolution& s);
AqueousSolution aqueous_from_json(const nlohmann::json& j);

// Defaulted field access: value if present, fallback otherwise; throws
// InvalidInput with the field name on type errors.
template <typename T>
T json_get_or(const nlohmann::json& j, const char* key, const T& fallback);

}  // namespace catex
