#pragma once

#include <map>
#include <string>
#include <vector>

namespace rotorlab {

// Flat key-value configuration with [section] headers. Lines look like
//
//   [vehicle]
//   rotor_radius_m = 0.5    # trailing comments allowed
//
// Keys are addressed as "section.key"; keys before any section header live
// in the "" section and are addressed by bare name. All angles in config
// files are degrees; conversion to radians happens at the parse boundary.
class Config {
public:
    static Config from_file(const std::string& path);   // throws ConfigError/InputError
    static Config from_string(const std::string& text); // throws ConfigError

    bool has(const std::string& key) const;

    // Typed getters throw ConfigError when missing or malformed.
    std::string get_string(const std::string& key) const;
    double get_double(const std::string& key) const;
    long get_int(const std::string& key) const;
    bool get_bool(const std::string& key) const;

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    long get_int(const std::string& key, long fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    // whitespace-separated list of numbers
    std::vector<double> get_doubles(const std::string& key) const;

    const std::map<std::string, std::string>& entries() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

} // namespace rotorlab
