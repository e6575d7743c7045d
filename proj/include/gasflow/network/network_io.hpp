#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "gasflow/network/network.hpp"

namespace gasflow::network {

struct ModelDocument {
  EnergyNetwork network;
  HorizonData horizon;
};

/// Schema errors are ValidationError with a JSON pointer to the offending
/// field, e.g. "/units/2/role: unknown role 'boiler'".
ModelDocument parse_model(const nlohmann::json& doc);
ModelDocument load_model(const std::filesystem::path& path);
nlohmann::json to_json(const EnergyNetwork& net, const HorizonData& horizon);

/// One row per (entity, quantity, period): entity,quantity,period,value.
std::string schedule_csv(const Schedule& schedule);
nlohmann::json schedule_to_json(const Schedule& schedule);
Schedule schedule_from_json(const nlohmann::json& doc);

}  // namespace gasflow::network
