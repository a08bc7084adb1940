#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hyperswitch/certifier.hpp"
#include "hyperswitch/core_model.hpp"
#include "hyperswitch/signals.hpp"
#include "hyperswitch/simulator.hpp"

namespace hyperswitch {

using Json = nlohmann::json;

/// Matrices are accepted as nested arrays or as flat row-major arrays of n*n
/// numbers; Lambda also as a vector of diagonal entries.
Matrix matrix_from_json(const Json& j, int n, const std::string& what);
Json matrix_to_json(const Matrix& m);

/// {"n": 2, "modes": [{"L", "A", "B0", "B1"} | {"Lambda", "m", "F", "G"}, ...]}
SwitchedSystem system_from_json(const Json& j);
/// Emits the physical form of every mode.
Json system_to_json(const SwitchedSystem& sys);

/// {"initial_mode": 0, "switches": [[t, mode], ...], "horizon": T}, or a
/// generator: {"periodic": {"period": p, "cycle": [..]}, "horizon": T} or
/// {"random": {"tau_D": .., "N0": .., "seed": ..}, "horizon": T, "modes": k}.
SwitchingSignal signal_from_json(const Json& j, int mode_count = -1, std::uint64_t default_seed = 0);
Json signal_to_json(const SwitchingSignal& s);

Json certificate_to_json(const Certificate& c);
Certificate certificate_from_json(const Json& j);

SearchOptions search_options_from_json(const Json& j);

struct WarmStart {
    std::vector<Vector> Q;
    std::vector<double> mu;
    std::optional<double> nu;
};

struct SweepSpec {
    std::string param = "period";
    double lo = 0.0;
    double hi = 0.0;
    int steps = 0;
};

struct ScenarioConfig {
    std::optional<SwitchedSystem> system;
    std::optional<Variant> variant;
    SearchOptions search;
    std::optional<Json> signal;  // resolved per run (period may be swept)
    GridSpec grid;
    std::optional<Matrix> initial;
    std::optional<WarmStart> warm_start;
    std::optional<SweepSpec> sweep;
    std::optional<std::string> out_dir;
};

/// Loads a scenario; "system_file" is resolved relative to the config file.
ScenarioConfig load_config(const std::filesystem::path& path);
ScenarioConfig config_from_json(const Json& j, const std::filesystem::path& base_dir = {});

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& j);

/// Header "t,l2,V,mode"; every number with 17 significant digits.
void write_trace_csv(const std::filesystem::path& path, const Trace& trace);
/// One row per grid point: "x,w0,w1,..." for sample k.
void write_state_csv(const std::filesystem::path& path, const Trace& trace, std::size_t k);
/// Self-contained SVG line plot of l2 (and V when present) against t on a log axis.
std::string trace_svg(const Trace& trace, const std::string& title);

std::string format_double(double v);

}  // namespace hyperswitch
