#include "dualcox/data.hpp"

#include "dualcox/error.hpp"

#include "doctest.h"

#include <cmath>

using namespace dualcox;

namespace {

RawRow make_row(double time, double status, double arm, std::optional<double> response,
                std::vector<double> covariates) {
    RawRow row;
    row.time = time;
    row.status = status;
    row.arm = arm;
    row.response = response;
    row.covariates = std::move(covariates);
    return row;
}

}  // namespace

TEST_CASE("validate_dataset accepts a well-formed table") {
    std::vector<RawRow> rows = {
        make_row(1.0, 1, 1, 1.0, {0.1, 2.0}),
        make_row(2.0, 0, 1, 2.0, {0.3, -1.0}),
        make_row(3.0, 1, 0, std::nullopt, {1.0, 0.0}),
        make_row(4.0, 0, 0, std::nullopt, {0.0, 0.5}),
    };
    TrialDataset data = validate_dataset(rows, {"a", "b"});
    CHECK(data.n() == 4);
    CHECK(data.n_labeled() == 2);
    CHECK(data.n_unlabeled() == 2);
    CHECK(data.p() == 2);
    CHECK(data.labeled_fraction() == 0.5);
    CHECK(data.counts().censoring_rate == 0.5);
    CHECK(data.response(0) == 1);
    CHECK(data.response(2) == 0);
    CHECK_FALSE(data.has_tied_event_times());
}

TEST_CASE("validate_dataset rejects boundary violations") {
    std::vector<RawRow> base = {
        make_row(1.0, 1, 1, 1.0, {0.0}),
        make_row(2.0, 1, 0, std::nullopt, {0.0}),
    };

    SUBCASE("zero time") {
        base[0].time = 0.0;
        CHECK_THROWS_WITH_AS(validate_dataset(base, {"a"}), doctest::Contains("row 1"), Error);
        try {
            validate_dataset(base, {"a"});
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::NonPositiveTime);
        }
    }
    SUBCASE("labeled row without response") {
        base[0].response.reset();
        try {
            validate_dataset(base, {"a"});
            FAIL("expected throw");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::MissingResponseOnLabeled);
        }
    }
    SUBCASE("unlabeled row with response") {
        base[1].response = 1.0;
        try {
            validate_dataset(base, {"a"});
            FAIL("expected throw");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::ResponsePresentOnUnlabeled);
        }
    }
    SUBCASE("non-finite covariate") {
        base[1].covariates[0] = std::nan("");
        try {
            validate_dataset(base, {"a"});
            FAIL("expected throw");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::NonFiniteCovariate);
        }
    }
    SUBCASE("covariate count mismatch") {
        base[1].covariates.push_back(1.0);
        try {
            validate_dataset(base, {"a"});
            FAIL("expected throw");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::DimensionMismatch);
        }
    }
}

TEST_CASE("tied event times are stored but flagged") {
    std::vector<RawRow> rows = {
        make_row(5.0, 1, 1, 1.0, {0.0}),
        make_row(5.0, 1, 1, 2.0, {1.0}),
        make_row(7.0, 0, 0, std::nullopt, {0.5}),
    };
    TrialDataset data = validate_dataset(rows, {"a"});
    CHECK(data.has_tied_event_times());
}
