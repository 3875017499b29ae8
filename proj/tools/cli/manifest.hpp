#pragma once

#include <openssl/evp.h>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "stefan/error.hpp"

namespace stefan::cli {

inline std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        fail(ErrorKind::numerical, "io.hash.failed", "SHA-256 digest failed");
    }
    std::ostringstream os;
    os << std::hex << std::setfill('0');
    for (unsigned int i = 0; i < len; ++i) os << std::setw(2) << static_cast<int>(digest[i]);
    return os.str();
}

/// Writes run artifacts into one directory and records each file, with its
/// content hash, in manifest.json. All writes go through this object.
class OutputDir {
public:
    explicit OutputDir(std::filesystem::path dir) : dir_(std::move(dir)) {
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        if (ec) fail(ErrorKind::configuration, "config.out.unwritable", "cannot create output directory '" + dir_.string() + "'");
        manifest_["files"] = nlohmann::json::array();
    }

    void write(const std::string& name, const std::string& content) {
        const auto target = dir_ / name;
        std::ofstream out(target, std::ios::binary | std::ios::trunc);
        if (!out) fail(ErrorKind::configuration, "config.out.unwritable", "cannot write '" + target.string() + "'");
        out << content;
        manifest_["files"].push_back({{"name", name}, {"bytes", content.size()}, {"sha256", sha256_hex(content)}});
    }

    nlohmann::json& manifest() noexcept { return manifest_; }

    void finish() {
        manifest_["created"] = timestamp();
        const auto target = dir_ / "manifest.json";
        std::ofstream out(target, std::ios::binary | std::ios::trunc);
        if (!out) fail(ErrorKind::configuration, "config.out.unwritable", "cannot write '" + target.string() + "'");
        out << manifest_.dump(2) << '\n';
    }

    [[nodiscard]] const std::filesystem::path& path() const noexcept { return dir_; }

private:
    static std::string timestamp() {
        const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        std::tm tm{};
        gmtime_r(&now, &tm);
        std::ostringstream os;
        os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
        return os.str();
    }

    std::filesystem::path dir_;
    nlohmann::json manifest_;
};

}  // namespace stefan::cli
