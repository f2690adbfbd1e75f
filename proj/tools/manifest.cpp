#include "manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>
#include <stdexcept>

#ifndef LCGA_VERSION
#define LCGA_VERSION "dev"
#endif

namespace lcga::cli {

namespace {

std::string hex(const unsigned char* data, unsigned len) {
    std::ostringstream out;
    for (unsigned i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << int(data[i]);
    return out.str();
}

class Sha256 {
public:
    Sha256() : ctx_(EVP_MD_CTX_new(), &EVP_MD_CTX_free) {
        if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1)
            throw std::runtime_error("sha256 init failed");
    }
    void update(const char* data, std::size_t n) { EVP_DigestUpdate(ctx_.get(), data, n); }
    std::string finish() {
        std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
        unsigned len = 0;
        EVP_DigestFinal_ex(ctx_.get(), md.data(), &len);
        return hex(md.data(), len);
    }

private:
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

}  // namespace

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    Sha256 h;
    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        h.update(buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    return h.finish();
}

std::string sha256_text(const std::string& text) {
    Sha256 h;
    h.update(text.data(), text.size());
    return h.finish();
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

nlohmann::json RunManifest::reproducible() const {
    nlohmann::json in = nlohmann::json::array();
    for (const auto& [path, digest] : inputs) in.push_back({{"path", path}, {"sha256", digest}});
    return {
        {"command", command},
        {"version", LCGA_VERSION},
        {"config", config},
        {"seeds", seeds},
        {"inputs", in},
        {"config_sha256", sha256_text(config.dump())},
    };
}

nlohmann::json RunManifest::full() const {
    nlohmann::json j = reproducible();
    j["outputs"] = outputs;
    j["started_at"] = started_at;
    j["finished_at"] = finished_at;
    return j;
}

}  // namespace lcga::cli
