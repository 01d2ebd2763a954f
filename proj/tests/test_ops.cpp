#include <cstdint>
#include <vector>

#include <doctest.h>

#include "nf2/columnar.hpp"
#include "nf2/datagen.hpp"
#include "nf2/ops.hpp"

using namespace nf2;

namespace {

NestedListColumn make_col(std::vector<std::int64_t> offsets, std::vector<double> pt) {
    NestedListColumn col;
    col.offsets = std::move(offsets);
    col.fields["pt"] = std::move(pt);
    return col;
}

std::vector<std::pair<std::int64_t, std::int64_t>> pairs_of(const CombinationIndices& c) {
    std::vector<std::pair<std::int64_t, std::int64_t>> out;
    for (std::size_t t = 0; t + 1 < c.indices.size(); t += 2)
        out.emplace_back(c.indices[t], c.indices[t + 1]);
    return out;
}

}  // namespace

TEST_CASE("unnest concatenates in event then particle order") {
    auto col = make_col({0, 2, 2, 3}, {1.0, 2.0, 3.0});
    CHECK(unnest(col, "pt") == std::vector<double>{1.0, 2.0, 3.0});
    CHECK(unnest(make_col({0, 0, 0}, {}), "pt").empty());
}

TEST_CASE("count_per_event differences the offsets") {
    auto col = make_col({0, 2, 2, 3}, {1.0, 2.0, 3.0});
    CHECK(count_per_event(col) == std::vector<std::int64_t>{2, 0, 1});
}

TEST_CASE("nested_filter keeps order and grouping") {
    auto col = make_col({0, 3}, {50.0, 10.0, 45.0});
    const auto& pt = col.fields.at("pt");
    auto [filtered, mask] = nested_filter(col, [&](std::size_t i) { return pt[i] > 40.0; });
    CHECK(filtered.offsets == std::vector<std::int64_t>{0, 2});
    CHECK(filtered.fields.at("pt") == std::vector<double>{50.0, 45.0});
    CHECK(mask.keep == std::vector<std::uint8_t>{1, 0, 1});

    auto [all_kept, mask2] = nested_filter(col, [](std::size_t) { return true; });
    CHECK(all_kept.offsets == col.offsets);
    CHECK(all_kept.fields.at("pt") == pt);

    auto [none, mask3] = nested_filter(col, [](std::size_t) { return false; });
    CHECK(none.offsets == std::vector<std::int64_t>{0, 0});
    CHECK(none.fields.at("pt").empty());
}

TEST_CASE("nested_filter composes like a conjunction") {
    GenConfig cfg;
    cfg.seed = 21;
    cfg.num_events = 400;
    auto rg = events_to_row_group(generate_events(cfg));
    const auto& jets = rg.jets;
    const auto& pt = jets.field("pt");
    const auto& eta = jets.field("eta");

    auto [one_pass, m1] = nested_filter(
        jets, [&](std::size_t i) { return pt[i] > 30.0 && eta[i] < 0.5; });

    auto [first, mf] = nested_filter(jets, [&](std::size_t i) { return pt[i] > 30.0; });
    const auto& eta2 = first.field("eta");
    auto [second, ms] = nested_filter(first, [&](std::size_t i) { return eta2[i] < 0.5; });

    CHECK(second.offsets == one_pass.offsets);
    CHECK(second.fields.at("pt") == one_pass.fields.at("pt"));
    CHECK(second.fields.at("eta") == one_pass.fields.at("eta"));
}

TEST_CASE("combinations enumerate lexicographically") {
    auto c = combinations({0, 4}, 2);
    CHECK(c.arity == 2);
    CHECK(c.num_tuples() == 6);
    CHECK(pairs_of(c) == std::vector<std::pair<std::int64_t, std::int64_t>>{
                             {0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});

    CHECK(combinations({0, 1}, 2).num_tuples() == 0);
    CHECK(combinations({0, 2}, 3).num_tuples() == 0);
    CHECK(combinations({0, 0}, 2).num_tuples() == 0);
    CHECK(combinations({0, 50}, 3).num_tuples() == 19600);

    auto t = combinations({0, 3, 5}, 3);
    CHECK(t.offsets == std::vector<std::int64_t>{0, 1, 1});
    CHECK(t.indices == std::vector<std::int64_t>{0, 1, 2});

    CHECK_THROWS_AS(combinations({0, 3}, 4), std::invalid_argument);
    CHECK_THROWS_AS(combinations({0, 3}, 1), std::invalid_argument);
}

TEST_CASE("combination counts match the closed form per event") {
    for (std::int64_t n = 0; n <= 12; ++n) {
        auto c2 = combinations({0, n}, 2);
        auto c3 = combinations({0, n}, 3);
        CHECK(c2.num_tuples() == n * (n - 1) / 2);
        CHECK(c3.num_tuples() == n * (n - 1) * (n - 2) / 6);
    }
}

TEST_CASE("cross_pairs is a row-major cartesian product") {
    auto c = cross_pairs({0, 2}, {0, 3});
    CHECK(c.num_tuples() == 6);
    CHECK(pairs_of(c) == std::vector<std::pair<std::int64_t, std::int64_t>>{
                             {0, 0}, {0, 1}, {0, 2}, {1, 0}, {1, 1}, {1, 2}});
    CHECK(cross_pairs({0, 0}, {0, 3}).num_tuples() == 0);
    CHECK(cross_pairs({0, 2, 4}, {0, 1, 3}).offsets == std::vector<std::int64_t>{0, 2, 6});
    CHECK_THROWS_AS(cross_pairs({0, 2}, {0, 1, 2}), std::invalid_argument);
}

TEST_CASE("argmin_per_event breaks ties by first occurrence") {
    CHECK(argmin_per_event({3.0}, {0, 1}) == std::vector<std::int64_t>{0});
    CHECK(argmin_per_event({2.0, 1.0, 1.0}, {0, 3}) == std::vector<std::int64_t>{1});
    CHECK(argmin_per_event({}, {0, 0}) == std::vector<std::int64_t>{-1});
    CHECK(argmin_per_event({5.0, 4.0, 9.0, 0.5}, {0, 2, 2, 4}) ==
          std::vector<std::int64_t>{1, -1, 1});
}

TEST_CASE("sum_per_event adds in ascending index order") {
    CHECK(sum_per_event({}, {0, 0}) == std::vector<double>{0.0});
    CHECK(sum_per_event({10.0, 20.0, 30.0}, {0, 3}) == std::vector<double>{60.0});
    CHECK(sum_per_event({1.0, 2.0, 4.0}, {0, 1, 1, 3}) == std::vector<double>{1.0, 0.0, 6.0});
}

TEST_CASE("max_per_group leaves empty groups unset") {
    auto m = max_per_group({0.2, 0.9, 0.5}, {0, 3});
    REQUIRE(m.size() == 1);
    CHECK(m[0] == 0.9);
    auto n = max_per_group({0.7}, {0, 0, 1});
    CHECK(!n[0].has_value());
    CHECK(n[1] == 0.7);
}

TEST_CASE("select_events filters every column consistently") {
    GenConfig cfg;
    cfg.seed = 33;
    cfg.num_events = 6;
    auto events = generate_events(cfg);
    auto rg = events_to_row_group(events);

    std::vector<std::uint8_t> all_true(6, 1);
    auto same = select_events(rg, all_true);
    CHECK(same.num_events == 6);
    CHECK(same.jets.offsets == rg.jets.offsets);
    CHECK(same.met_pt == rg.met_pt);

    std::vector<std::uint8_t> all_false(6, 0);
    auto none = select_events(rg, all_false);
    CHECK(none.num_events == 0);
    CHECK(none.jets.offsets == std::vector<std::int64_t>{0});
    CHECK(!check_row_group(none).has_value());

    std::vector<std::uint8_t> pick = {1, 0, 0, 1, 0, 1};
    auto some = select_events(rg, pick);
    CHECK(some.num_events == 3);
    CHECK(!check_row_group(some).has_value());
    auto picked = row_group_to_events(some);
    CHECK(picked[0].event_id == events[0].event_id);
    CHECK(picked[1].event_id == events[3].event_id);
    CHECK(picked[2].event_id == events[5].event_id);
    CHECK(picked[1].jets.size() == events[3].jets.size());

    CHECK_THROWS_AS(select_events(rg, std::vector<std::uint8_t>(5, 1)),
                    std::invalid_argument);
}

TEST_CASE("unnest after an all-true select is unchanged") {
    GenConfig cfg;
    cfg.seed = 34;
    cfg.num_events = 40;
    auto rg = events_to_row_group(generate_events(cfg));
    auto same = select_events(rg, std::vector<std::uint8_t>(40, 1));
    CHECK(unnest(same.jets, "pt") == unnest(rg.jets, "pt"));
}

TEST_CASE("concat_nested appends b after a per event with tags") {
    NestedListColumn a = make_col({0, 1, 3}, {1.0, 2.0, 3.0});
    a.fields["eta"] = {0.1, 0.2, 0.3};
    NestedListColumn b = make_col({0, 2, 2}, {9.0, 8.0});
    b.fields["eta"] = {0.9, 0.8};
    b.fields["charge"] = {1.0, -1.0};  // not shared with a; must be dropped

    auto merged = concat_nested(a, b, "flavor", 0.0, 1.0);
    CHECK(merged.offsets == std::vector<std::int64_t>{0, 3, 5});
    CHECK(merged.fields.at("pt") == std::vector<double>{1.0, 9.0, 8.0, 2.0, 3.0});
    CHECK(merged.fields.at("eta") == std::vector<double>{0.1, 0.9, 0.8, 0.2, 0.3});
    CHECK(merged.fields.at("flavor") == std::vector<double>{0.0, 1.0, 1.0, 0.0, 0.0});
    CHECK(merged.fields.count("charge") == 0);
}
