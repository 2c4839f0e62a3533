#include "dualcox/csv.hpp"

#include "dualcox/error.hpp"

#include "doctest.h"

#include <sstream>

using namespace dualcox;

namespace {

const char* kGoodCsv =
    "id,time,status,arm,response,age,stage\n"
    "p1,12.5,1,1,1,61,2\n"
    "p2,8,0,1,2,55,1\n"
    "p3,30.25,1,0,,70,3\n";

}  // namespace

TEST_CASE("trial csv happy path") {
    std::istringstream in(kGoodCsv);
    TrialCsv csv = read_trial_csv(in);
    REQUIRE(csv.rows.size() == 3);
    CHECK(csv.covariate_names == std::vector<std::string>{"age", "stage"});
    CHECK(csv.rows[0].id == "p1");
    CHECK(csv.rows[0].time == 12.5);
    CHECK(csv.rows[0].response == 1.0);
    CHECK_FALSE(csv.rows[2].response.has_value());
    CHECK(csv.rows[2].covariates == std::vector<double>{70.0, 3.0});

    TrialDataset data = validate_dataset(csv.rows, csv.covariate_names);
    CHECK(data.n() == 3);
    CHECK(data.n_labeled() == 2);
}

TEST_CASE("trial csv covariate selection preserves order") {
    std::istringstream in(kGoodCsv);
    TrialCsv csv = read_trial_csv(in, {"stage"});
    CHECK(csv.covariate_names == std::vector<std::string>{"stage"});
    CHECK(csv.rows[0].covariates == std::vector<double>{2.0});

    std::istringstream in2(kGoodCsv);
    CHECK_THROWS_WITH_AS(read_trial_csv(in2, {"bogus"}), doctest::Contains("bogus"), Error);
}

TEST_CASE("trial csv diagnostics carry line numbers") {
    SUBCASE("bad header") {
        std::istringstream in("time,id,status,arm,response,x\n");
        CHECK_THROWS_WITH_AS(read_trial_csv(in), doctest::Contains("line 1"), Error);
    }
    SUBCASE("non-numeric field") {
        std::istringstream in("id,time,status,arm,response,x\na,1,1,1,1,ok\nb,oops,1,1,2,3\n");
        CHECK_THROWS_WITH_AS(read_trial_csv(in), doctest::Contains("line 2"), Error);
    }
    SUBCASE("field count mismatch") {
        std::istringstream in("id,time,status,arm,response,x\na,1,1,1,1\n");
        CHECK_THROWS_WITH_AS(read_trial_csv(in), doctest::Contains("line 2"), Error);
    }
    SUBCASE("empty file") {
        std::istringstream in("");
        CHECK_THROWS_WITH_AS(read_trial_csv(in), doctest::Contains("line 1"), Error);
    }
}

TEST_CASE("quoted fields and escapes") {
    std::istringstream in(
        "id,time,status,arm,response,x\n"
        "\"with,comma\",1,1,1,1,2\n");
    TrialCsv csv = read_trial_csv(in);
    CHECK(csv.rows[0].id == "with,comma");
    CHECK(csv_escape("plain") == "plain");
    CHECK(csv_escape("a,b") == "\"a,b\"");
    CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
}

TEST_CASE("format_double is deterministic and round-trip friendly") {
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(-1.0) == "-1");
    CHECK(format_double(1e-9) == "1e-09");
    CHECK(format_double(1.0 / 3.0) == format_double(1.0 / 3.0));
}
