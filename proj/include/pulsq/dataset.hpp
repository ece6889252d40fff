#pragma once

// Self-describing columnar datasets: an ordered key=value metadata block plus
// parallel columns, emitted as CSV ('#'-prefixed header) or JSON. Floats are
// written as shortest round-trip decimals so identical runs produce
// byte-identical files.

#include <string>
#include <utility>
#include <vector>

namespace pulsq {

std::string format_double(double v);
double parse_double(const std::string& s);

class Dataset {
  public:
    struct Column {
        std::string name;
        bool is_text = false;
        std::vector<double> numbers;
        std::vector<std::string> texts;

        std::size_t size() const { return is_text ? texts.size() : numbers.size(); }
    };

    void set_meta(const std::string& key, const std::string& value);
    void set_meta(const std::string& key, double value);
    void set_meta(const std::string& key, long value);

    void add_column(const std::string& name, std::vector<double> values);
    void add_text_column(const std::string& name, std::vector<std::string> values);

    const std::vector<std::pair<std::string, std::string>>& meta() const { return meta_; }
    const std::vector<Column>& columns() const { return columns_; }
    const std::string* find_meta(const std::string& key) const;
    const Column* find_column(const std::string& name) const;

    std::string to_csv() const;
    std::string to_json() const;
    std::string serialize(const std::string& format) const; // "csv" | "json"

    static Dataset from_csv(const std::string& text);
    static Dataset from_json(const std::string& text);

  private:
    void check_new_column(const std::string& name, std::size_t rows) const;

    std::vector<std::pair<std::string, std::string>> meta_;
    std::vector<Column> columns_;
};

} // namespace pulsq
