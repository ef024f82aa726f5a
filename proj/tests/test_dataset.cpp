#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <set>
#include <string>

#include "fairboost/dataset.hpp"

using namespace fairboost;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name, const std::string& content)
        : path("/tmp/fairboost_test_" + name) {
        std::ofstream out(path, std::ios::binary);
        out << content;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

SchemaConfig basic_config() {
    SchemaConfig cfg;
    cfg.label_column = "outcome";
    cfg.positive_value = "yes";
    cfg.protected_column = "sex";
    cfg.group1_value = "f";
    cfg.categorical_columns = {"color"};
    return cfg;
}

}  // namespace

TEST_CASE("load_csv encodes a small file by hand-checkable rules") {
    TempFile f("basic.csv",
               "age,color,outcome,sex\n"
               "30,red,yes,f\n"
               "41,blue,no,m\n"
               "25,red,yes,m\n"
               "33,blue,no,f\n");
    const Dataset d = load_csv(f.path, basic_config());

    // age passes through; color one-hots in first-appearance order (red, blue)
    REQUIRE(d.size() == 4);
    CHECK(d.width() == 3);
    CHECK(d.schema().feature_names == std::vector<std::string>{"age", "color=red", "color=blue"});

    CHECK(d.examples()[0].features == std::vector<double>{30.0, 1.0, 0.0});
    CHECK(d.examples()[1].features == std::vector<double>{41.0, 0.0, 1.0});
    CHECK(d.examples()[0].label == +1);
    CHECK(d.examples()[1].label == -1);
    CHECK(d.examples()[0].protected_group == 1);
    CHECK(d.examples()[2].protected_group == 0);

    const auto& c = d.group_counts();
    CHECK(c.n[0] == 2);
    CHECK(c.n[1] == 2);
    CHECK(c.pos[0] == 1);
    CHECK(c.pos[1] == 1);
    CHECK(d.cell_count(1, -1) == 1);

    CHECK(d.decode_categorical(d.examples()[1].features, 1) == std::string("blue"));
}

TEST_CASE("load_csv schema errors name the missing column") {
    TempFile f("missing.csv", "a,b\n1,2\n");
    SchemaConfig cfg = basic_config();
    cfg.categorical_columns.clear();
    CHECK_THROWS_WITH_AS(load_csv(f.path, cfg),
                         doctest::Contains("column 'outcome' not found"), std::runtime_error);
}

TEST_CASE("load_csv rejects a positive value that never occurs") {
    TempFile f("nopos.csv", "x,outcome,sex\n1,no,m\n2,no,f\n");
    SchemaConfig cfg = basic_config();
    cfg.categorical_columns.clear();
    CHECK_THROWS_WITH_AS(load_csv(f.path, cfg), doctest::Contains("positive value"),
                         std::runtime_error);
}

TEST_CASE("load_csv parse errors carry the 1-based file row") {
    TempFile f("badnum.csv", "x,outcome,sex\n1,yes,m\noops,no,f\n");
    SchemaConfig cfg = basic_config();
    cfg.categorical_columns.clear();
    CHECK_THROWS_WITH_AS(load_csv(f.path, cfg), doctest::Contains("row 3"), std::runtime_error);
}

TEST_CASE("load_csv rejects ragged rows with the row number") {
    TempFile f("ragged.csv", "x,outcome,sex\n1,yes,m\n2,no\n");
    SchemaConfig cfg = basic_config();
    cfg.categorical_columns.clear();
    CHECK_THROWS_WITH_AS(load_csv(f.path, cfg), doctest::Contains("row 3"), std::runtime_error);
}

TEST_CASE("dataset constructor validates labels, groups and width") {
    Schema s;
    s.columns = {{"x", false, {}}};
    s.feature_names = {"x"};
    CHECK_THROWS_AS(Dataset({{{1.0}, 0, 2}}, s), std::invalid_argument);
    CHECK_THROWS_AS(Dataset({{{1.0}, 3, 1}}, s), std::invalid_argument);
    CHECK_THROWS_AS(Dataset({{{1.0, 2.0}, 0, 1}}, s), std::invalid_argument);
    CHECK_THROWS_AS(Dataset(std::vector<Example>{}, s), std::invalid_argument);
}

TEST_CASE("train_test_split is a deterministic seeded partition") {
    const Dataset d = make_synthetic(100, 0.5, 0.4, 0.8, 7);

    auto [tr1, te1] = train_test_split(d, 0.2, 42);
    auto [tr2, te2] = train_test_split(d, 0.2, 42);
    CHECK(te1.size() == 20);
    CHECK(tr1.size() == 80);
    REQUIRE(tr1.size() == tr2.size());
    for (std::size_t i = 0; i < tr1.size(); ++i)
        CHECK(tr1.examples()[i].features == tr2.examples()[i].features);

    // a different seed shuffles differently
    auto [tr3, te3] = train_test_split(d, 0.2, 43);
    bool any_diff = false;
    for (std::size_t i = 0; i < te1.size(); ++i)
        if (te1.examples()[i].features != te3.examples()[i].features) any_diff = true;
    CHECK(any_diff);

    // the two sides partition the rows exactly
    std::multiset<double> all, split;
    for (const auto& e : d.examples()) all.insert(e.features[0]);
    for (const auto& e : tr1.examples()) split.insert(e.features[0]);
    for (const auto& e : te1.examples()) split.insert(e.features[0]);
    CHECK(all == split);

    CHECK_THROWS_AS(train_test_split(d, 0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(train_test_split(d, 1.0, 1), std::invalid_argument);
}

TEST_CASE("make_synthetic is deterministic in the seed") {
    const Dataset a = make_synthetic(500, 0.5, 0.4, 0.8, 11);
    const Dataset b = make_synthetic(500, 0.5, 0.4, 0.8, 11);
    const Dataset c = make_synthetic(500, 0.5, 0.4, 0.8, 12);
    REQUIRE(a.size() == 500);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.examples()[i].features == b.examples()[i].features);
        CHECK(a.examples()[i].label == b.examples()[i].label);
    }
    bool any_diff = false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a.examples()[i].features != c.examples()[i].features) any_diff = true;
    CHECK(any_diff);
}

TEST_CASE("make_synthetic hits the requested group rates at scale") {
    const Dataset d = make_synthetic(40000, 0.3, 0.4, 0.8, 3);
    const auto& c = d.group_counts();
    const double p1 = static_cast<double>(c.n[1]) / static_cast<double>(d.size());
    CHECK(p1 == doctest::Approx(0.3).epsilon(0.05));
    const double rate1 = static_cast<double>(c.pos[1]) / static_cast<double>(c.n[1]);
    const double rate0 = static_cast<double>(c.pos[0]) / static_cast<double>(c.n[0]);
    CHECK(rate1 - rate0 == doctest::Approx(0.4).epsilon(0.08));

    CHECK_THROWS_AS(make_synthetic(2, 0.5, 0.4, 0.8, 1), std::invalid_argument);
    CHECK_THROWS_AS(make_synthetic(100, 1.5, 0.4, 0.8, 1), std::invalid_argument);
}
