#pragma once

#include "pdm/catalog.hpp"
#include "pdm/riccati.hpp"
#include "pdm/verify.hpp"
#include "pdm_cli/config.hpp"

#include <nlohmann/json.hpp>

#include <ostream>

namespace pdm::cli {

inline constexpr int kSchemaVersion = 1;

/// Header "x,m,V,u,psi,mask", then one row per grid point with %.17g floats.
/// `mask` is the validity of u.
void write_csv(std::ostream& os, const Samples& m, const Samples& V, const Samples& u, const Samples& psi);

/// Family parameters, constants, grid and setup of a run.
nlohmann::ordered_json describe_run(const RunConfig& cfg, const FamilySpec& spec);

nlohmann::ordered_json to_json(const VerificationReport& r);

nlohmann::ordered_json catalog_json();

}  // namespace pdm::cli
