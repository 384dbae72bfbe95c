#include "dtfim/csvio.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "dtfim/types.hpp"

namespace dtfim {

std::string TableWriter::format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void TableWriter::meta(const std::string& key, const std::string& value) {
    meta_.emplace_back(key, value);
}

void TableWriter::meta(const std::string& key, double value) {
    meta_.emplace_back(key, format_double(value));
}

void TableWriter::meta(const std::string& key, long value) {
    meta_.emplace_back(key, std::to_string(value));
}

void TableWriter::add_row(std::vector<Cell> row) { rows_.push_back(std::move(row)); }

void TableWriter::footnote(const std::string& key, double value) {
    footnotes_.emplace_back(key, value);
}

std::string TableWriter::to_csv(const std::string& subcommand) const {
    std::string out = "# ";
    out += kToolName;
    out += ' ';
    out += kToolVersion;
    out += " subcommand=";
    out += subcommand;
    for (const auto& [k, v] : meta_) {
        out += ' ';
        out += k;
        out += '=';
        out += v;
    }
    out += '\n';
    for (size_t c = 0; c < columns_.size(); ++c) {
        if (c) out += ',';
        out += columns_[c];
    }
    out += '\n';
    for (const auto& row : rows_) {
        for (size_t c = 0; c < row.size(); ++c) {
            if (c) out += ',';
            if (const double* d = std::get_if<double>(&row[c]))
                out += format_double(*d);
            else if (const long* l = std::get_if<long>(&row[c]))
                out += std::to_string(*l);
            else
                out += std::get<std::string>(row[c]);
        }
        out += '\n';
    }
    for (const auto& [k, v] : footnotes_) {
        out += "# ";
        out += k;
        out += '=';
        out += format_double(v);
        out += '\n';
    }
    return out;
}

std::string TableWriter::to_json(const std::string& subcommand) const {
    nlohmann::ordered_json doc;
    doc["tool"] = kToolName;
    doc["version"] = kToolVersion;
    doc["subcommand"] = subcommand;
    nlohmann::ordered_json meta;
    for (const auto& [k, v] : meta_) meta[k] = v;
    doc["meta"] = std::move(meta);
    doc["columns"] = columns_;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : rows_) {
        nlohmann::ordered_json jrow = nlohmann::ordered_json::array();
        for (const auto& cell : row) {
            if (const double* d = std::get_if<double>(&cell))
                jrow.push_back(*d);
            else if (const long* l = std::get_if<long>(&cell))
                jrow.push_back(*l);
            else
                jrow.push_back(std::get<std::string>(cell));
        }
        rows.push_back(std::move(jrow));
    }
    doc["rows"] = std::move(rows);
    for (const auto& [k, v] : footnotes_) doc[k] = v;
    return doc.dump(2) + "\n";
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open output file: " + path);
    f << content;
}

}  // namespace dtfim
