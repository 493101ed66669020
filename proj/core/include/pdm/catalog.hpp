#pragma once

#include "pdm/expr.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pdm {

/// A built-in mass profile. All entries are strictly positive on any finite grid
/// for the listed parameter ranges.
struct CatalogEntry {
    std::string name;
    std::string expression;
    Params defaults;
    std::string valid_range;
    std::string description;

    /// Parsed expression with `overrides` (then the defaults) bound.
    [[nodiscard]] Expr bound(const Params& overrides = {}) const;
};

[[nodiscard]] const std::vector<CatalogEntry>& mass_catalog();

/// Lookup by name, with or without the leading '@'.
[[nodiscard]] const CatalogEntry* find_catalog_entry(std::string_view name);

}  // namespace pdm
