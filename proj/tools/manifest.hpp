#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace lcga::cli {

std::string sha256_file(const std::filesystem::path& path);
std::string sha256_text(const std::string& text);
std::string utc_timestamp();

// Everything needed to replay a run. `reproducible()` omits the timestamps
// and is what result files embed; manifest.json carries the full record.
struct RunManifest {
    std::string command;
    nlohmann::json config;
    std::map<std::string, std::uint64_t> seeds;
    std::vector<std::pair<std::string, std::string>> inputs;  // path, sha256
    std::vector<std::string> outputs;
    std::string started_at;
    std::string finished_at;

    nlohmann::json reproducible() const;
    nlohmann::json full() const;
};

}  // namespace lcga::cli
