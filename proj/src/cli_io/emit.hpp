#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bufchem/cli_io.hpp"
#include "bufchem/spectrum.hpp"

namespace bufchem::emit {

using nlohmann::json;

/// printf "%.17g"
std::string format17(double v);

json number_or_null(std::optional<double> v);
json model_json(const GrowthModel& model);
std::string tag_name(const StabilityTag& tag);

/// CSV with a header row, '\n' line endings and 17 significant digits.
std::string csv(const std::vector<std::string>& header,
                const std::vector<std::vector<double>>& rows);

/// Writes `content` to out_dir/name, or to `out` when no directory is given.
void artifact(const OutputOptions& opts, const std::string& name, const std::string& content,
              std::ostream& out);

/// Like artifact(), but sidecars are only written when out_dir is set.
void sidecar(const OutputOptions& opts, const std::string& name, const std::string& content);

std::string dump(const json& j);

}  // namespace bufchem::emit
