#pragma once

#include "dualcox/data.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace dualcox {

// Deterministic float formatting for all file output: shortest of %.12g,
// no locale dependence.
std::string format_double(double value);

struct TrialCsv {
    std::vector<RawRow> rows;
    std::vector<std::string> covariate_names;
};

// Input schema (header required): id, time, status, arm, response, then
// covariate columns. arm: 0 = control/unlabeled, 1 = experimental/labeled.
// response: 1/2 on labeled rows, empty otherwise. Comma-separated, '.'
// decimal point. If `covariates` is non-empty only those columns are kept,
// in the given order. Violations raise InvalidInput with the line number.
TrialCsv read_trial_csv(std::istream& in, const std::vector<std::string>& covariates = {});
TrialCsv read_trial_csv_file(const std::string& path, const std::vector<std::string>& covariates = {});

std::vector<std::vector<std::string>> read_csv_table(std::istream& in);

std::string csv_escape(const std::string& field);

}  // namespace dualcox
