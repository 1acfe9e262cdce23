#pragma once

#include <exception>
#include <string>
#include <string_view>
#include <vector>

#include "polblock/config.hpp"

namespace polblock::cli {

inline const std::vector<std::string> kSubcommands = {"coupling", "spectral", "lineardyn", "g2ss",
                                                      "g2tau",    "optimize", "sweep-L",   "regime-map"};

struct RunManifest {
    std::string subcommand;
    std::string out_dir;
    std::vector<std::string> outputs;  // file names relative to out_dir
    std::string json;                  // manifest.json contents
};

// Runs one subcommand, writes its data files and finally manifest.json into
// out_dir (created if missing).
RunManifest dispatch(const config::RunConfig& config, const std::string& subcommand, const std::string& out_dir,
                     unsigned threads = 1);

// {"error": {"kind": ..., "module": ..., "message": ...}}
std::string error_json(const std::exception& e);

// %.12g
std::string format_number(double v);

} // namespace polblock::cli
