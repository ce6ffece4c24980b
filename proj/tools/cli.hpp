#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ukfnav::cli {

inline constexpr std::string_view kToolVersion = "0.1.0";

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kRuntimeError = 1;
inline constexpr int kUsageError = 2;

/// Ordered key=value run record.
class Manifest {
public:
    void set(std::string key, std::string value);
    void set(std::string key, double value);
    std::optional<std::string> get(std::string_view key) const;

    std::string str() const;
    void save(const std::filesystem::path& path) const;
    static Manifest load(const std::filesystem::path& path);

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

/// Entry point shared by the executable and the tests.
/// Subcommands: simulate, fuse, kitti-convert.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ukfnav::cli
