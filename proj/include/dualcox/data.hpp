#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace dualcox {

enum class Arm { labeled, unlabeled };

// One subject: observed time, event indicator, covariates, arm, and the
// drug-response label (present exactly when the subject is labeled;
// 1 = responder, 2 = non-responder).
struct SurvivalSample {
    double time = 0.0;
    int status = 0;  // 1 = event observed, 0 = right-censored
    std::vector<double> covariates;
    Arm arm = Arm::unlabeled;
    std::optional<int> response;
};

// A row as parsed from an external table, before validation.
struct RawRow {
    std::string id;
    double time = 0.0;
    double status = 0.0;
    double arm = 0.0;  // 0 = control/unlabeled, 1 = experimental/labeled
    std::optional<double> response;
    std::vector<double> covariates;
};

struct DatasetCounts {
    int n = 0;
    int n_labeled = 0;
    int n_unlabeled = 0;
    double labeled_fraction = 0.0;
    double censoring_rate = 0.0;
};

// Validated, column-ordered collection of samples. Immutable after
// construction; all fitting code reads through the Eigen views.
class TrialDataset {
  public:
    TrialDataset(std::vector<SurvivalSample> samples, std::vector<std::string> covariate_names,
                 std::vector<std::string> ids = {});

    int n() const { return static_cast<int>(samples_.size()); }
    int p() const { return static_cast<int>(covariate_names_.size()); }
    int n_labeled() const { return n_labeled_; }
    int n_unlabeled() const { return n() - n_labeled_; }
    double labeled_fraction() const { return static_cast<double>(n_labeled_) / n(); }
    bool has_tied_event_times() const { return has_tied_event_times_; }

    const std::vector<SurvivalSample>& samples() const { return samples_; }
    const std::vector<std::string>& covariate_names() const { return covariate_names_; }
    const std::vector<std::string>& ids() const { return ids_; }
    DatasetCounts counts() const;

    const Eigen::VectorXd& times() const { return times_; }
    const Eigen::VectorXi& status() const { return status_; }
    const Eigen::MatrixXd& covariates() const { return covariates_; }

    bool is_labeled(int row) const { return samples_[static_cast<std::size_t>(row)].arm == Arm::labeled; }
    // 1 or 2 for labeled rows, 0 otherwise.
    int response(int row) const;
    std::vector<int> unlabeled_rows() const;
    std::vector<int> labeled_rows() const;

  private:
    std::vector<SurvivalSample> samples_;
    std::vector<std::string> covariate_names_;
    std::vector<std::string> ids_;
    Eigen::VectorXd times_;
    Eigen::VectorXi status_;
    Eigen::MatrixXd covariates_;
    int n_labeled_ = 0;
    bool has_tied_event_times_ = false;
};

// Checks every type invariant and reports the first violation with its row
// number. Row numbers are 1-based to match source-file line diagnostics.
TrialDataset validate_dataset(const std::vector<RawRow>& rows,
                              const std::vector<std::string>& covariate_names);

}  // namespace dualcox
