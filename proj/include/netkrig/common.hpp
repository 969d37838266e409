#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace netkrig {

// Execution policy for the data-parallel kernels.  Serial is the reference
// path; Parallel uses OpenMP when compiled in and must produce bitwise
// identical results (work is split per independent RNG stream, and all
// reductions run in a fixed order).
enum class Exec { Serial, Parallel };

// SplitMix64 step; used to derive independent per-stream seeds from a master
// seed so that results do not depend on thread count or schedule.
std::uint64_t splitmix64(std::uint64_t& state);

// Seed for sub-stream `stream` of master seed `seed`.  Distinct streams are
// decorrelated even for adjacent master seeds.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

std::string trim(const std::string& s);
std::vector<std::string> split(const std::string& s, char delim);

// Flat key = value configuration file: one pair per line, '#' starts a
// comment, blank lines ignored.  Duplicate keys are a config_error.
std::map<std::string, std::string> parse_config_file(const std::string& path);
std::map<std::string, std::string> parse_config_text(const std::string& text,
                                                     const std::string& origin);

// Typed access with strict parsing; `get_*` throw config_error when the key is
// missing, `get_*_or` return the fallback instead.  Every consumer must call
// `reject_unknown_keys` once it has claimed its keys.
class Config {
public:
    Config() = default;
    explicit Config(std::map<std::string, std::string> kv, std::string origin = "<config>");

    bool has(const std::string& key) const;
    std::string get_string(const std::string& key) const;
    std::string get_string_or(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double_or(const std::string& key, double fallback) const;
    long get_int(const std::string& key) const;
    long get_int_or(const std::string& key, long fallback) const;
    bool get_bool_or(const std::string& key, bool fallback) const;
    std::vector<double> get_double_list(const std::string& key) const;
    std::vector<long> get_int_list(const std::string& key) const;

    // Throws config_error naming the first key never requested by any getter.
    void reject_unknown_keys() const;

    const std::string& origin() const { return origin_; }

private:
    const std::string& raw(const std::string& key) const;
    std::map<std::string, std::string> kv_;
    mutable std::map<std::string, bool> seen_;
    std::string origin_ = "<config>";
};

// Shortest text that round-trips a double exactly; used by every writer so
// that repeated runs are byte identical.
std::string format_double(double v);

}  // namespace netkrig
