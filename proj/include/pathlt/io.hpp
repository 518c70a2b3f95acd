#pragma once

#include <filesystem>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace pathlt {

using json = nlohmann::json;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Reads keys from a JSON object and records every value it hands out,
// defaults included, so runs can echo their full settings. finish() rejects
// keys that nobody asked for.
class ConfigReader {
public:
    explicit ConfigReader(json doc);

    bool has(const std::string& key) const { return doc_.contains(key); }
    template <class T>
    T get(const std::string& key, const T& fallback) {
        seen_.insert(key);
        T v = fallback;
        if (doc_.contains(key)) {
            try {
                v = doc_.at(key).get<T>();
            } catch (const json::exception& e) {
                throw ConfigError("config key '" + key + "': " + e.what());
            }
        }
        used_[key] = v;
        return v;
    }
    json raw(const std::string& key);  // null when absent
    void finish() const;
    const json& settings() const { return used_; }

private:
    json doc_;
    std::set<std::string> seen_;
    json used_ = json::object();
};

json read_json_file(const std::filesystem::path& p);
std::string read_text_file(const std::filesystem::path& p);
void write_text_file(const std::filesystem::path& p, const std::string& text);

// Directory for artifacts: the explicit value, else $PATHLT_OUT, else ".".
std::filesystem::path output_dir(const std::string& explicit_dir);

// Shortest round-trip representation.
std::string fmt(double v);
std::string csv_field(const std::string& s);
std::string csv_row(const std::vector<std::string>& fields);

// name.csv plus name.json describing the columns.
void write_plot_data(const std::filesystem::path& dir, const std::string& name, const std::string& csv, const json& axes);

}  // namespace pathlt
