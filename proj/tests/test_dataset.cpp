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

#include "wateruse/dataset.hpp"
#include "wateruse/errors.hpp"
#include "wateruse/trace_io.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>

using namespace wateruse;

namespace {

WindowedDataset from_values(std::vector<double> values, std::size_t window) {
    std::vector<LabelVector> labels(values.size());
    return WindowedDataset(std::move(values), std::move(labels), window);
}

std::string read_error(const std::string& csv) {
    std::istringstream in(csv);
    try {
        read_trace_csv(in);
    } catch (const FormatError& e) {
        return e.what();
    }
    return "";
}

} // namespace

TEST_CASE("window rows are zero-padded, oldest first") {
    const auto w1 = from_values({1, 2, 3}, 1);
    for (std::size_t t = 0; t < 3; ++t) CHECK(w1.feature(t, 0) == double(t + 1));

    const auto w2 = from_values({1, 2, 3}, 2);
    const Matrix m = w2.design_matrix({0, 3});
    CHECK(m(0, 0) == 0.0);
    CHECK(m(0, 1) == 1.0);
    CHECK(m(1, 0) == 1.0);
    CHECK(m(1, 1) == 2.0);
    CHECK(m(2, 0) == 2.0);
    CHECK(m(2, 1) == 3.0);
}

TEST_CASE("window size must lie in 1..T") {
    CHECK_THROWS(from_values({1, 2, 3}, 4));
    CHECK_THROWS(from_values({1, 2, 3}, 0));
}

TEST_CASE("design matrix extra columns are zero") {
    const auto ds = from_values({1, 2, 3, 4}, 2);
    const Matrix m = ds.design_matrix({1, 4}, 3);
    CHECK(m.cols() == 5u);
    CHECK(m.rows() == 3u);
    for (std::size_t r = 0; r < 3; ++r) {
        for (std::size_t c = 2; c < 5; ++c) CHECK(m(r, c) == 0.0);
    }
}

TEST_CASE("180-day windows and split sizes") {
    std::vector<double> zeros(steps_for(180, 10), 0.0);
    std::vector<LabelVector> labels(zeros.size());
    for (std::size_t w : {60, 120, 240, 480}) {
        const WindowedDataset ds(zeros, labels, w);
        CHECK(ds.size() == 1'555'200u);
    }
    const auto split = split_chronological(WindowedDataset(zeros, labels, 60));
    CHECK(split.rows(Split::Train).size() == 777'600u);
    CHECK(split.rows(Split::Val).size() == 388'800u);
    CHECK(split.rows(Split::Test).size() == 388'800u);
}

TEST_CASE("split arithmetic on small N") {
    const auto s8 = split_chronological(from_values(std::vector<double>(8, 1.0), 1));
    CHECK(s8.rows(Split::Train).size() == 4u);
    CHECK(s8.rows(Split::Val).size() == 2u);
    CHECK(s8.rows(Split::Test).size() == 2u);
    const auto s9 = split_chronological(from_values(std::vector<double>(9, 1.0), 1));
    CHECK(s9.rows(Split::Train).size() == 4u);
    CHECK(s9.rows(Split::Val).size() == 2u);
    CHECK(s9.rows(Split::Test).size() == 3u);
    for (std::size_t t = 0; t < 9; ++t) {
        const Split expected = t < 4 ? Split::Train : t < 6 ? Split::Val : Split::Test;
        CHECK(s9.split_of(t) == expected);
    }
    const auto unsplit = from_values({1, 2, 3}, 1);
    CHECK_FALSE(unsplit.is_split());
    CHECK(unsplit.rows(Split::Train).size() == 3u);
    CHECK(unsplit.rows(Split::Test).size() == 0u);
}

TEST_CASE("window shift and alignment properties on simulated data") {
    const auto series = simulate_household(testutil::default_configs(), 3, 17);
    const auto ds = window_series(series, 16);
    REQUIRE(ds.size() == series.size());
    for (std::size_t t = 0; t < ds.size(); ++t) {
        REQUIRE(ds.feature(t, 15) == series.aggregate[t]);
        REQUIRE(ds.label(t) == series.labels[t]);
        if (t > 0) {
            for (std::size_t c = 0; c + 1 < 16; ++c) REQUIRE(ds.feature(t, c) == ds.feature(t - 1, c + 1));
        }
        if (!series.labels[t].any() && series.aggregate[t] == 0.0) REQUIRE(ds.feature(t, 15) == 0.0);
    }
    const auto rewindowed = ds.with_window(4);
    CHECK(rewindowed.window() == 4u);
    CHECK(rewindowed.feature(100, 3) == ds.feature(100, 15));
}

TEST_CASE("trace CSV round-trips") {
    auto cfgs = testutil::default_configs();
    auto series = simulate_household(cfgs, 1, 8);
    for (auto& tr : series.traces) tr.flow.resize(100);
    recompute_aggregate(series);
    std::stringstream buf;
    write_trace_csv(series, buf);
    const auto text = buf.str();
    CHECK(text.rfind(std::string(kTraceHeader) + "\n", 0) == 0);
    const auto back = read_trace_csv(buf);
    REQUIRE(back.size() == 100u);
    for (std::size_t k = 0; k < kFixtureCount; ++k) CHECK(back.traces[k].flow == series.traces[k].flow);
    CHECK(back.aggregate == series.aggregate);
    CHECK(back.labels == series.labels);
    CHECK(back.step_seconds == 10);
}

TEST_CASE("trace CSV format errors carry the row number") {
    const std::string header = std::string(kTraceHeader) + "\n";
    CHECK(read_error("t,a,b\n0,1,1\n").find("header") != std::string::npos);
    const auto bad_total = read_error(header + "0,1,0,0,0,0,1\n10,1,1,0,0,0,3\n20,0,0,0,0,0,5\n");
    CHECK(bad_total.find("row 2") != std::string::npos);
    CHECK(read_error(header + "10,0,0,0,0,0,0\n0,0,0,0,0,0,0\n").find("non-monotone timestamps") !=
          std::string::npos);
    CHECK(read_error(header + "0,0,-1,0,0,0,-1\n").find("row 1") != std::string::npos);
}

TEST_CASE("dataset file round-trips") {
    const auto ds = testutil::small_dataset(1, 12, 4);
    const auto path = testutil::temp_dir("dataset") / "d.wuds";
    write_dataset(ds, path);
    const auto back = read_dataset(path);
    CHECK(back.size() == ds.size());
    CHECK(back.window() == 12u);
    CHECK(back.is_split());
    CHECK(back.rows(Split::Val).begin == ds.rows(Split::Val).begin);
    CHECK(back.aggregate() == ds.aggregate());
    CHECK(back.labels() == ds.labels());
    CHECK(back.design_matrix({0, back.size()}) == ds.design_matrix({0, ds.size()}));

    std::ofstream(path, std::ios::binary) << "JUNKJUNKJUNK";
    CHECK_THROWS_AS(read_dataset(path), FormatError);
}

TEST_CASE("dataset CSV export has one row per sample") {
    const auto ds = split_chronological(from_values({1, 2, 3, 4}, 2));
    std::ostringstream out;
    export_dataset_csv(ds, out);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "x0,x1,toilet,shower,faucet,clothes_washer,dishwasher,split");
    std::getline(in, line);
    CHECK(line == "0,1,0,0,0,0,0,train");
    std::size_t rows = 1;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 4u);
}

TEST_CASE("standardizer centers and scales columns") {
    Matrix x(4, 2);
    for (std::size_t r = 0; r < 4; ++r) {
        x(r, 0) = double(r);
        x(r, 1) = 5.0;
    }
    const auto s = Standardizer::fit(x);
    CHECK(s.mean[0] == doctest::Approx(1.5));
    CHECK(s.scale[0] == doctest::Approx(std::sqrt(1.25)));
    CHECK(s.scale[1] == 1.0);
    std::vector<double> out(2);
    s.apply(x.row(3), out);
    CHECK(out[0] == doctest::Approx(1.5 / std::sqrt(1.25)));
    CHECK(out[1] == 0.0);
}
