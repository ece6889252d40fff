#include "pulsq/dataset.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <system_error>

#include "json.hpp"

#include "pulsq/errors.hpp"

namespace pulsq {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
    double v = 0.0;
    const char* begin = s.data();
    const char* end = begin + s.size();
    const auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc{} || res.ptr != end)
        throw ConfigError("cannot parse number: '" + s + "'");
    return v;
}

namespace {

bool parses_as_double(const std::string& s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    return res.ec == std::errc{} && res.ptr == s.data() + s.size();
}

void check_cell_text(const std::string& s) {
    if (s.find_first_of(",\n\r") != std::string::npos)
        throw ConfigError("text cell may not contain commas or line breaks: '" + s + "'");
}

} // namespace

void Dataset::set_meta(const std::string& key, const std::string& value) {
    if (key.empty() || key.find_first_of("=\n\r") != std::string::npos)
        throw ConfigError("invalid metadata key: '" + key + "'");
    if (value.find_first_of("\n\r") != std::string::npos)
        throw ConfigError("metadata value may not contain line breaks");
    for (auto& kv : meta_) {
        if (kv.first == key) {
            kv.second = value;
            return;
        }
    }
    meta_.emplace_back(key, value);
}

void Dataset::set_meta(const std::string& key, double value) { set_meta(key, format_double(value)); }

void Dataset::set_meta(const std::string& key, long value) { set_meta(key, std::to_string(value)); }

void Dataset::check_new_column(const std::string& name, std::size_t rows) const {
    if (name.empty() || name.find_first_of(",\n\r") != std::string::npos)
        throw ConfigError("invalid column name: '" + name + "'");
    if (find_column(name)) throw ConfigError("duplicate column: '" + name + "'");
    if (!columns_.empty() && columns_.front().size() != rows)
        throw ConfigError("column '" + name + "' length differs from existing columns");
}

void Dataset::add_column(const std::string& name, std::vector<double> values) {
    check_new_column(name, values.size());
    Column c;
    c.name = name;
    c.numbers = std::move(values);
    columns_.push_back(std::move(c));
}

void Dataset::add_text_column(const std::string& name, std::vector<std::string> values) {
    check_new_column(name, values.size());
    for (const auto& v : values) check_cell_text(v);
    Column c;
    c.name = name;
    c.is_text = true;
    c.texts = std::move(values);
    columns_.push_back(std::move(c));
}

const std::string* Dataset::find_meta(const std::string& key) const {
    for (const auto& kv : meta_)
        if (kv.first == key) return &kv.second;
    return nullptr;
}

const Dataset::Column* Dataset::find_column(const std::string& name) const {
    for (const auto& c : columns_)
        if (c.name == name) return &c;
    return nullptr;
}

std::string Dataset::to_csv() const {
    std::string out;
    for (const auto& kv : meta_) {
        out += "# ";
        out += kv.first;
        out += '=';
        out += kv.second;
        out += '\n';
    }
    out += "# columns=";
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        if (i) out += ',';
        out += columns_[i].name;
    }
    out += '\n';
    const std::size_t rows = columns_.empty() ? 0 : columns_.front().size();
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t i = 0; i < columns_.size(); ++i) {
            if (i) out += ',';
            const Column& c = columns_[i];
            out += c.is_text ? c.texts[r] : format_double(c.numbers[r]);
        }
        out += '\n';
    }
    return out;
}

std::string Dataset::to_json() const {
    nlohmann::ordered_json j;
    nlohmann::ordered_json meta = nlohmann::ordered_json::object();
    for (const auto& kv : meta_) meta[kv.first] = kv.second;
    j["meta"] = std::move(meta);
    nlohmann::ordered_json cols = nlohmann::ordered_json::object();
    for (const Column& c : columns_) {
        if (c.is_text) {
            cols[c.name] = c.texts;
        } else {
            nlohmann::ordered_json arr = nlohmann::ordered_json::array();
            for (double v : c.numbers) {
                if (std::isfinite(v))
                    arr.push_back(v);
                else
                    arr.push_back(nullptr); // JSON has no NaN literal
            }
            cols[c.name] = std::move(arr);
        }
    }
    j["columns"] = std::move(cols);
    return j.dump(2) + "\n";
}

std::string Dataset::serialize(const std::string& format) const {
    if (format == "csv") return to_csv();
    if (format == "json") return to_json();
    throw ConfigError("unknown output format: '" + format + "' (expected csv or json)");
}

Dataset Dataset::from_csv(const std::string& text) {
    Dataset d;
    std::vector<std::string> names;
    std::vector<std::vector<std::string>> cells;
    bool have_columns = false;

    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string::npos) eol = text.size();
        std::string line = text.substr(pos, eol - pos);
        pos = eol + 1;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        if (line.rfind("# ", 0) == 0) {
            const std::string body = line.substr(2);
            const std::size_t eq = body.find('=');
            if (eq == std::string::npos)
                throw ConfigError("malformed metadata line: '" + line + "'");
            const std::string key = body.substr(0, eq);
            const std::string value = body.substr(eq + 1);
            if (key == "columns") {
                have_columns = true;
                std::size_t p = 0;
                while (true) {
                    const std::size_t comma = value.find(',', p);
                    names.push_back(value.substr(p, comma - p));
                    if (comma == std::string::npos) break;
                    p = comma + 1;
                }
                cells.resize(names.size());
            } else {
                d.set_meta(key, value);
            }
            continue;
        }

        if (!have_columns)
            throw ConfigError("data before '# columns=' line in CSV input");
        std::size_t p = 0, col = 0;
        while (true) {
            const std::size_t comma = line.find(',', p);
            if (col >= names.size()) throw ConfigError("row has more cells than columns");
            cells[col++].push_back(line.substr(p, comma - p));
            if (comma == std::string::npos) break;
            p = comma + 1;
        }
        if (col != names.size()) throw ConfigError("row has fewer cells than columns");
    }
    if (!have_columns) throw ConfigError("CSV input has no '# columns=' line");

    for (std::size_t i = 0; i < names.size(); ++i) {
        bool numeric = true;
        for (const auto& cell : cells[i])
            if (!parses_as_double(cell)) {
                numeric = false;
                break;
            }
        if (numeric) {
            std::vector<double> vals;
            vals.reserve(cells[i].size());
            for (const auto& cell : cells[i]) vals.push_back(parse_double(cell));
            d.add_column(names[i], std::move(vals));
        } else {
            d.add_text_column(names[i], std::move(cells[i]));
        }
    }
    return d;
}

Dataset Dataset::from_json(const std::string& text) {
    nlohmann::ordered_json j;
    try {
        j = nlohmann::ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("invalid JSON dataset: ") + e.what());
    }
    if (!j.is_object() || !j.contains("meta") || !j.contains("columns"))
        throw ConfigError("JSON dataset must be an object with 'meta' and 'columns'");

    Dataset d;
    for (const auto& [key, value] : j["meta"].items()) {
        if (!value.is_string()) throw ConfigError("meta values must be strings");
        d.set_meta(key, value.template get<std::string>());
    }
    for (const auto& [name, arr] : j["columns"].items()) {
        if (!arr.is_array()) throw ConfigError("column '" + name + "' is not an array");
        bool numeric = true;
        for (const auto& v : arr)
            if (!v.is_number() && !v.is_null()) {
                numeric = false;
                break;
            }
        if (numeric) {
            std::vector<double> vals;
            vals.reserve(arr.size());
            for (const auto& v : arr)
                vals.push_back(v.is_null() ? std::numeric_limits<double>::quiet_NaN()
                                           : v.template get<double>());
            d.add_column(name, std::move(vals));
        } else {
            std::vector<std::string> vals;
            vals.reserve(arr.size());
            for (const auto& v : arr) {
                if (!v.is_string())
                    throw ConfigError("column '" + name + "' mixes strings and numbers");
                vals.push_back(v.template get<std::string>());
            }
            d.add_text_column(name, std::move(vals));
        }
    }
    return d;
}

} // namespace pulsq
