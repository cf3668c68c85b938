// Copyright 2026 The wateruse Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "test_util.hpp"

#include "wateruse/stream.hpp"
#include "wateruse/trace_io.hpp"

#include <doctest.h>

#include <sstream>

using namespace wateruse;

namespace {

MetaModel trained_model(const WindowedDataset& ds) {
    const BaseLearnerSpec spec{LearnerKind::Gbt, {{"n_estimators", 15}, {"max_depth", 4}}, 3};
    return fit_cc(ds, spec);
}

} // namespace

TEST_CASE("flow parsing") {
    CHECK(parse_flow("1.5") == 1.5);
    CHECK(parse_flow("  0 \r") == 0.0);
    CHECK(parse_flow("1e-3") == 0.001);
    CHECK_FALSE(parse_flow("abc"));
    CHECK_FALSE(parse_flow("1.5x"));
    CHECK_FALSE(parse_flow(""));
    CHECK_FALSE(parse_flow("nan"));
}

TEST_CASE("stream replay matches batch prediction bit-exactly") {
    const auto ds = testutil::small_dataset(3, 30, 21);
    const auto model = trained_model(ds);
    const auto batch = model.predict(ds, {0, ds.size()});

    std::ostringstream input;
    for (double v : ds.aggregate()) input << format_double(v) << '\n';
    std::istringstream in(input.str());
    std::ostringstream out, diag;
    const auto stats = run_stream(model, in, out, diag);
    CHECK(stats.predicted == ds.size());
    CHECK(stats.rejected == 0u);

    std::istringstream lines(out.str());
    std::string line;
    std::size_t t = 0, positives = 0;
    while (std::getline(lines, line)) {
        std::string expected = std::to_string(t);
        for (std::size_t k = 0; k < kFixtureCount; ++k) {
            expected += batch.labels[t][k] ? ",1" : ",0";
        }
        REQUIRE(line == expected);
        positives += batch.labels[t].any();
        ++t;
    }
    CHECK(t == ds.size());
    CHECK(positives > 0u);
}

TEST_CASE("zero stream predicts nothing active") {
    const auto ds = testutil::small_dataset(3, 30, 22);
    const auto model = trained_model(ds);
    StreamPredictor predictor(model);
    for (int i = 0; i < 200; ++i) CHECK_FALSE(predictor.push(0.0).any());
}

TEST_CASE("predictions start before the window fills") {
    const auto ds = testutil::small_dataset(2, 40, 5);
    const auto model = trained_model(ds);
    std::istringstream in("0.5\n1.25\n");
    std::ostringstream out, diag;
    const auto stats = run_stream(model, in, out, diag);
    CHECK(stats.predicted == 2u);
    CHECK(out.str().rfind("0,", 0) == 0);
}

TEST_CASE("bad lines are reported and skipped") {
    const auto ds = testutil::small_dataset(2, 10, 5);
    const auto model = trained_model(ds);
    std::istringstream in("0\nhello\n\n0.2\n");
    std::ostringstream out, diag;
    const auto stats = run_stream(model, in, out, diag);
    CHECK(stats.predicted == 2u);
    CHECK(stats.rejected == 1u);
    CHECK(diag.str().find("line 2") != std::string::npos);
    CHECK(out.str().find("\n1,") != std::string::npos);
}
