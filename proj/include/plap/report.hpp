#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "plap/config.hpp"

namespace plap {

using json = nlohmann::ordered_json;

struct ResultRecord {
    std::string digest;
    std::string experiment;
    json payload;
    std::string timestamp;  // excluded from determinism guarantees
    std::string version;
};

json to_json(const ResultRecord& rec);

// Atomic file emission: write to a temp file in the target directory, rename.
void write_text_atomic(const std::string& path, const std::string& content);
void write_json_atomic(const std::string& path, const json& j);

// rows flattened row-major; header defines the column count.
void write_csv_atomic(const std::string& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows);

// Run an experiment per config, writing record.json and experiment CSVs under
// out_dir (created if absent). Returns the record.
ResultRecord run_experiment(const RunConfig& cfg, const std::string& out_dir);

std::string toolkit_version();

} // namespace plap
