#include "dualcox/data.hpp"

#include "dualcox/error.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

namespace dualcox {

namespace {

std::string row_msg(std::size_t row, const std::string& what) {
    return "row " + std::to_string(row + 1) + ": " + what;
}

}  // namespace

TrialDataset::TrialDataset(std::vector<SurvivalSample> samples,
                           std::vector<std::string> covariate_names, std::vector<std::string> ids)
    : samples_(std::move(samples)), covariate_names_(std::move(covariate_names)), ids_(std::move(ids)) {
    const auto n = samples_.size();
    const auto p = covariate_names_.size();
    if (n < 2) {
        throw Error(ErrorCode::InvalidInput, "dataset needs at least 2 samples");
    }
    if (ids_.empty()) {
        ids_.reserve(n);
        for (std::size_t i = 0; i < n; ++i) ids_.push_back(std::to_string(i + 1));
    }
    if (ids_.size() != n) {
        throw Error(ErrorCode::DimensionMismatch, "ids and samples differ in length");
    }

    times_.resize(static_cast<Eigen::Index>(n));
    status_.resize(static_cast<Eigen::Index>(n));
    covariates_.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));

    for (std::size_t i = 0; i < n; ++i) {
        const SurvivalSample& s = samples_[i];
        if (!(s.time > 0.0) || !std::isfinite(s.time)) {
            throw Error(ErrorCode::NonPositiveTime, row_msg(i, "time must be positive and finite"));
        }
        if (s.status != 0 && s.status != 1) {
            throw Error(ErrorCode::InvalidInput, row_msg(i, "status must be 0 or 1"));
        }
        if (s.covariates.size() != p) {
            throw Error(ErrorCode::DimensionMismatch,
                        row_msg(i, "expected " + std::to_string(p) + " covariates, got " +
                                       std::to_string(s.covariates.size())));
        }
        for (std::size_t j = 0; j < p; ++j) {
            if (!std::isfinite(s.covariates[j])) {
                throw Error(ErrorCode::NonFiniteCovariate,
                            row_msg(i, "covariate '" + covariate_names_[j] + "' is not finite"));
            }
            covariates_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = s.covariates[j];
        }
        if (s.arm == Arm::labeled) {
            if (!s.response.has_value()) {
                throw Error(ErrorCode::MissingResponseOnLabeled,
                            row_msg(i, "labeled sample lacks a response label"));
            }
            if (*s.response != 1 && *s.response != 2) {
                throw Error(ErrorCode::InvalidInput, row_msg(i, "response must be 1 or 2"));
            }
            ++n_labeled_;
        } else if (s.response.has_value()) {
            throw Error(ErrorCode::ResponsePresentOnUnlabeled,
                        row_msg(i, "unlabeled sample carries a response label"));
        }
        times_(static_cast<Eigen::Index>(i)) = s.time;
        status_(static_cast<Eigen::Index>(i)) = s.status;
    }

    std::set<double> event_times;
    for (const SurvivalSample& s : samples_) {
        if (s.status == 1 && !event_times.insert(s.time).second) {
            has_tied_event_times_ = true;
            break;
        }
    }
}

DatasetCounts TrialDataset::counts() const {
    DatasetCounts c;
    c.n = n();
    c.n_labeled = n_labeled_;
    c.n_unlabeled = n() - n_labeled_;
    c.labeled_fraction = labeled_fraction();
    int censored = 0;
    for (const SurvivalSample& s : samples_) censored += (s.status == 0);
    c.censoring_rate = static_cast<double>(censored) / n();
    return c;
}

int TrialDataset::response(int row) const {
    const SurvivalSample& s = samples_[static_cast<std::size_t>(row)];
    return s.response.value_or(0);
}

std::vector<int> TrialDataset::unlabeled_rows() const {
    std::vector<int> rows;
    for (int i = 0; i < n(); ++i)
        if (!is_labeled(i)) rows.push_back(i);
    return rows;
}

std::vector<int> TrialDataset::labeled_rows() const {
    std::vector<int> rows;
    for (int i = 0; i < n(); ++i)
        if (is_labeled(i)) rows.push_back(i);
    return rows;
}

TrialDataset validate_dataset(const std::vector<RawRow>& rows,
                              const std::vector<std::string>& covariate_names) {
    std::vector<SurvivalSample> samples;
    std::vector<std::string> ids;
    samples.reserve(rows.size());
    ids.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const RawRow& r = rows[i];
        SurvivalSample s;
        s.time = r.time;
        if (r.status != 0.0 && r.status != 1.0) {
            throw Error(ErrorCode::InvalidInput, row_msg(i, "status must be 0 or 1"));
        }
        s.status = static_cast<int>(r.status);
        if (r.arm != 0.0 && r.arm != 1.0) {
            throw Error(ErrorCode::InvalidInput, row_msg(i, "arm must be 0 or 1"));
        }
        s.arm = r.arm == 1.0 ? Arm::labeled : Arm::unlabeled;
        if (r.response.has_value()) {
            if (*r.response != 1.0 && *r.response != 2.0) {
                throw Error(ErrorCode::InvalidInput, row_msg(i, "response must be 1 or 2"));
            }
            s.response = static_cast<int>(*r.response);
        }
        s.covariates = r.covariates;
        samples.push_back(std::move(s));
        ids.push_back(r.id.empty() ? std::to_string(i + 1) : r.id);
    }
    return TrialDataset(std::move(samples), covariate_names, std::move(ids));
}

}  // namespace dualcox
