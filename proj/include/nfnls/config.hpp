#pragma once

// Flat key = value settings for the command line front end.

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "nfnls/dynamics.hpp"
#include "nfnls/solver.hpp"
#include "nfnls/spectral.hpp"

namespace nfnls::cli {

/// Sorted, so dumps are stable.
using Settings = std::map<std::string, std::string>;

/// `key = value` lines; `#` and `;` start comments, blank lines and
/// `[section]` headers are skipped, surrounding quotes are stripped.
Settings parse_config_text(std::string_view text);
Settings load_config_file(const std::filesystem::path& path);

/// Overlays `over` onto `base`, rejecting keys base does not know.
void merge_known(Settings& base, const Settings& over, std::string_view origin);

std::string get(const Settings& s, const std::string& key);
double get_double(const Settings& s, const std::string& key);
int get_int(const Settings& s, const std::string& key);
std::uint64_t get_u64(const Settings& s, const std::string& key);
bool get_bool(const Settings& s, const std::string& key);

std::vector<double> parse_double_list(std::string_view text);
std::vector<int> parse_int_list(std::string_view text);
std::vector<std::string> split(std::string_view text, char sep);

/// "1:4,2:9" -> {1: 4, 2: 9}
std::map<int, double> parse_cutoff_override(std::string_view text);
std::string format_cutoff_override(const std::map<int, double>& m);

/// "n:re:im;n:re:im" (im optional)
ModeVector parse_modes(std::string_view text, int n_max);

/// Shortest round-trip decimal.
std::string format_double(double x);

ModelSpec model_from(const Settings& s);
ModulationConfig modulation_from(const Settings& s);
SolverConfig solver_config_from(const Settings& s);

/// u0, else u0_file (ModeVector JSON), else geometric data from
/// amplitude, rate and support (negative support means n_max).
ModeVector initial_data_from(const Settings& s, int n_max);

}  // namespace nfnls::cli
