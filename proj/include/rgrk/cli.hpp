#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rgrk/harness.hpp"

namespace rgrk::cli {

struct Preset {
    std::string name;
    std::string description;
    ExperimentSpec spec;
};

// figure2-theta-sweep, figure3-n-sweep, figure4-simulated, figure5-realworld
std::vector<Preset> preset_catalog();

// Exact name or unique prefix ("figure3").
std::optional<Preset> find_preset(std::string_view name);

// Flat "key = value" document, one ExperimentSpec field per line; `source`
// and `method` repeat. Doubles use the shortest exact decimal form, so
// parse_config(serialize_config(s)) == s.
//
//   name = figure3-n-sweep
//   source = gaussian 400x200
//   source = mtx suitesparse/ash958.mtx
//   source = mtx? suitesparse/abtaha2.mtx      (optional file)
//   method = rgrk-sa theta=1 N=10
std::string serialize_config(const ExperimentSpec& spec);
ExperimentSpec parse_config(std::string_view text, const std::string& source = "<config>");
ExperimentSpec load_config(const std::filesystem::path& path);
void save_config(const ExperimentSpec& spec, const std::filesystem::path& path);

// "400x200" -> {400, 200}; throws std::invalid_argument.
std::pair<Index, Index> parse_dimensions(std::string_view text);

// Exit codes: 0 success, 1 usage error, 2 runtime failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rgrk::cli
