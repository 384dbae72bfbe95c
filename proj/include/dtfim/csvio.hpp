#pragma once

#include <string>
#include <variant>
#include <vector>

namespace dtfim {

inline constexpr const char* kToolName = "dtfim";
inline constexpr const char* kToolVersion = "0.1.0";

/// Deterministic table output: CSV with a single comment line echoing the
/// full configuration, or an equivalent JSON document. Doubles print with 17
/// significant digits so identical configs reproduce byte-identical files.
class TableWriter {
  public:
    using Cell = std::variant<double, long, std::string>;

    explicit TableWriter(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    void meta(const std::string& key, const std::string& value);
    void meta(const std::string& key, double value);
    void meta(const std::string& key, long value);
    void add_row(std::vector<Cell> row);
    void footnote(const std::string& key, double value);

    std::string to_csv(const std::string& subcommand) const;
    std::string to_json(const std::string& subcommand) const;

    static std::string format_double(double v);

  private:
    std::vector<std::string> columns_;
    std::vector<std::pair<std::string, std::string>> meta_;
    std::vector<std::vector<Cell>> rows_;
    std::vector<std::pair<std::string, double>> footnotes_;
};

/// Writes to `path`, or to stdout when path is empty.
void write_output(const std::string& path, const std::string& content);

}  // namespace dtfim
