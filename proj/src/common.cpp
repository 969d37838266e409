#include "netkrig/common.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "netkrig/errors.hpp"

namespace netkrig {

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t state = seed;
    std::uint64_t mixed = splitmix64(state);
    state = mixed ^ (0xd1342543de82ef95ULL * (stream + 1));
    return splitmix64(state);
}

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split(const std::string& s, char delim) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == delim) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

std::map<std::string, std::string> parse_config_text(const std::string& text,
                                                     const std::string& origin) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error(origin + ":" + std::to_string(lineno) +
                               ": expected key = value, got '" + line + "'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw config_error(origin + ":" + std::to_string(lineno) + ": empty key");
        if (kv.count(key))
            throw config_error(origin + ":" + std::to_string(lineno) + ": duplicate key '" +
                               key + "'");
        kv[key] = value;
    }
    return kv;
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

Config::Config(std::map<std::string, std::string> kv, std::string origin)
    : kv_(std::move(kv)), origin_(std::move(origin)) {}

bool Config::has(const std::string& key) const {
    return kv_.count(key) != 0;
}

const std::string& Config::raw(const std::string& key) const {
    auto it = kv_.find(key);
    if (it == kv_.end())
        throw config_error(origin_ + ": missing required key '" + key + "'");
    seen_[key] = true;
    return it->second;
}

std::string Config::get_string(const std::string& key) const {
    return raw(key);
}

std::string Config::get_string_or(const std::string& key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    return raw(key);
}

namespace {

double parse_double_strict(const std::string& text, const std::string& origin,
                           const std::string& key) {
    const std::string t = trim(text);
    double v = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size())
        throw config_error(origin + ": key '" + key + "': not a number: '" + text + "'");
    return v;
}

long parse_int_strict(const std::string& text, const std::string& origin,
                      const std::string& key) {
    const std::string t = trim(text);
    long v = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size())
        throw config_error(origin + ": key '" + key + "': not an integer: '" + text + "'");
    return v;
}

}  // namespace

double Config::get_double(const std::string& key) const {
    return parse_double_strict(raw(key), origin_, key);
}

double Config::get_double_or(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    return get_double(key);
}

long Config::get_int(const std::string& key) const {
    return parse_int_strict(raw(key), origin_, key);
}

long Config::get_int_or(const std::string& key, long fallback) const {
    if (!has(key)) return fallback;
    return get_int(key);
}

bool Config::get_bool_or(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    std::string v = trim(raw(key));
    if (v == "true" || v == "on" || v == "1") return true;
    if (v == "false" || v == "off" || v == "0") return false;
    throw config_error(origin_ + ": key '" + key + "': not a boolean: '" + v + "'");
}

std::vector<double> Config::get_double_list(const std::string& key) const {
    std::vector<double> out;
    for (const auto& part : split(raw(key), ','))
        out.push_back(parse_double_strict(part, origin_, key));
    return out;
}

std::vector<long> Config::get_int_list(const std::string& key) const {
    std::vector<long> out;
    for (const auto& part : split(raw(key), ','))
        out.push_back(parse_int_strict(part, origin_, key));
    return out;
}

void Config::reject_unknown_keys() const {
    for (const auto& [key, value] : kv_)
        if (!seen_.count(key))
            throw config_error(origin_ + ": unknown key '" + key + "'");
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

}  // namespace netkrig
