#include "pathlt/io.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace pathlt {

ConfigReader::ConfigReader(json doc) : doc_(std::move(doc)) {
    if (doc_.is_null()) doc_ = json::object();
    if (!doc_.is_object()) throw ConfigError("config must be a JSON object");
}

json ConfigReader::raw(const std::string& key) {
    seen_.insert(key);
    if (!doc_.contains(key)) return nullptr;
    used_[key] = doc_.at(key);
    return doc_.at(key);
}

void ConfigReader::finish() const {
    std::string bad;
    for (const auto& [k, v] : doc_.items())
        if (!seen_.count(k)) bad += (bad.empty() ? "" : ", ") + k;
    if (!bad.empty()) throw ConfigError("unknown config keys: " + bad);
}

std::string read_text_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + p.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

json read_json_file(const std::filesystem::path& p) {
    try {
        return json::parse(read_text_file(p));
    } catch (const json::parse_error& e) {
        throw ConfigError(p.string() + ": " + e.what());
    }
}

void write_text_file(const std::filesystem::path& p, const std::string& text) {
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + p.string());
    out << text;
}

std::filesystem::path output_dir(const std::string& explicit_dir) {
    if (!explicit_dir.empty()) return explicit_dir;
    if (const char* env = std::getenv("PATHLT_OUT"); env && *env) return env;
    return ".";
}

std::string fmt(double v) {
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string csv_row(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ',';
        out += csv_field(fields[i]);
    }
    return out + "\r\n";
}

void write_plot_data(const std::filesystem::path& dir, const std::string& name, const std::string& csv, const json& axes) {
    write_text_file(dir / (name + ".csv"), csv);
    write_text_file(dir / (name + ".json"), axes.dump(2) + "\n");
}

}  // namespace pathlt
