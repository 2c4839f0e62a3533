#include "dualcox/csv.hpp"

#include "dualcox/error.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>

namespace dualcox {

std::string format_double(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.12g", value);
    return buffer;
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line, int line_number) {
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                current += c;
            }
        } else if (c == '"') {
            if (!current.empty()) {
                throw Error(ErrorCode::InvalidInput,
                            "line " + std::to_string(line_number) + ": stray quote");
            }
            quoted = true;
        } else if (c == ',') {
            fields.push_back(current);
            current.clear();
        } else {
            current += c;
        }
    }
    if (quoted) {
        throw Error(ErrorCode::InvalidInput,
                    "line " + std::to_string(line_number) + ": unterminated quote");
    }
    fields.push_back(current);
    return fields;
}

double parse_number(const std::string& field, int line_number, const std::string& column) {
    double value = 0.0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    const auto result = std::from_chars(begin, end, value);
    if (result.ec != std::errc() || result.ptr != end) {
        throw Error(ErrorCode::InvalidInput, "line " + std::to_string(line_number) + ": column '" +
                                                 column + "' is not a number: '" + field + "'");
    }
    return value;
}

}  // namespace

std::vector<std::vector<std::string>> read_csv_table(std::istream& in) {
    std::vector<std::vector<std::string>> table;
    std::string line;
    int line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        table.push_back(split_csv_line(line, line_number));
    }
    return table;
}

TrialCsv read_trial_csv(std::istream& in, const std::vector<std::string>& covariates) {
    std::string line;
    if (!std::getline(in, line)) {
        throw Error(ErrorCode::InvalidInput, "line 1: empty file, header required");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::vector<std::string> header = split_csv_line(line, 1);
    const std::vector<std::string> fixed = {"id", "time", "status", "arm", "response"};
    if (header.size() < fixed.size() + 1) {
        throw Error(ErrorCode::InvalidInput,
                    "line 1: header needs id,time,status,arm,response plus covariate columns");
    }
    for (std::size_t j = 0; j < fixed.size(); ++j) {
        if (header[j] != fixed[j]) {
            throw Error(ErrorCode::InvalidInput, "line 1: column " + std::to_string(j + 1) +
                                                     " must be '" + fixed[j] + "', got '" + header[j] +
                                                     "'");
        }
    }
    std::vector<std::string> all_covariates(header.begin() + static_cast<std::ptrdiff_t>(fixed.size()),
                                            header.end());

    // Column selection: keep the user's requested covariates in their order.
    std::vector<std::size_t> selected;
    TrialCsv out;
    if (covariates.empty()) {
        out.covariate_names = all_covariates;
        selected.resize(all_covariates.size());
        for (std::size_t j = 0; j < selected.size(); ++j) selected[j] = fixed.size() + j;
    } else {
        for (const std::string& name : covariates) {
            const auto it = std::find(all_covariates.begin(), all_covariates.end(), name);
            if (it == all_covariates.end()) {
                throw Error(ErrorCode::InvalidInput, "line 1: no covariate column named '" + name + "'");
            }
            selected.push_back(fixed.size() +
                               static_cast<std::size_t>(it - all_covariates.begin()));
            out.covariate_names.push_back(name);
        }
    }

    int line_number = 1;
    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::vector<std::string> fields = split_csv_line(line, line_number);
        if (fields.size() != header.size()) {
            throw Error(ErrorCode::InvalidInput, "line " + std::to_string(line_number) + ": expected " +
                                                     std::to_string(header.size()) + " fields, got " +
                                                     std::to_string(fields.size()));
        }
        RawRow row;
        row.id = fields[0];
        row.time = parse_number(fields[1], line_number, "time");
        row.status = parse_number(fields[2], line_number, "status");
        row.arm = parse_number(fields[3], line_number, "arm");
        if (!fields[4].empty()) row.response = parse_number(fields[4], line_number, "response");
        for (std::size_t j : selected) {
            row.covariates.push_back(parse_number(fields[j], line_number, header[j]));
        }
        out.rows.push_back(std::move(row));
    }
    if (out.rows.empty()) {
        throw Error(ErrorCode::InvalidInput, "line 2: no data rows");
    }
    return out;
}

TrialCsv read_trial_csv_file(const std::string& path, const std::vector<std::string>& covariates) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::InvalidInput, "cannot open '" + path + "'");
    }
    return read_trial_csv(in, covariates);
}

}  // namespace dualcox
