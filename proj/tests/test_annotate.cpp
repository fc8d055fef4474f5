#include <fstream>
#include <random>
#include <sstream>

#include "axon/annotate.hpp"
#include "axon/blocks.hpp"
#include "axon/core.hpp"
#include "axon/edit_ops.hpp"
#include "axon/projection.hpp"
#include "doctest.h"
#include "support/check.hpp"
#include "support/fixture.hpp"
#include "support/random_ops.hpp"

using namespace axon;
using namespace axon::testing;

namespace {

const std::string kData = AXON_TEST_DATA;

Catalog catalog_from(const std::string& text) {
  std::istringstream in(text);
  return parse_catalog(in, "inline");
}

ConstructionGrid grid_from(const std::string& text) {
  std::istringstream in(text);
  return parse_grid(in);
}

}  // namespace

TEST_CASE("dimension variants follow the varying axes") {
  const F1 f = make_f1_bare();
  const DimOrigin a = PipeEndRef{f.p1, End::kA};
  const DimOrigin b = PipeEndRef{f.p1, End::kB};
  const DimOrigin c = PipeEndRef{f.p2, End::kB};
  CHECK(enumerate_dimension_variants(f.scheme, {a, b}) ==
        std::vector<DimensionVariant>{{Axis::kX, 1}, {Axis::kX, -1}});
  CHECK(enumerate_dimension_variants(f.scheme, {a, b, c}) ==
        std::vector<DimensionVariant>{{Axis::kX, 1}, {Axis::kX, -1}, {Axis::kY, 1}, {Axis::kY, -1}});
  CHECK_FAILS_WITH(enumerate_dimension_variants(f.scheme, {a}), ErrorCode::kTooFewOrigins);
  CHECK_FAILS_WITH(enumerate_dimension_variants(f.scheme, {PipeEndRef{99, End::kA}, a}), ErrorCode::kUnknownId);
}

TEST_CASE("chain dimension values") {
  F1 f = make_f1_bare();
  const ObjectId d = add_chain_dimension(f.scheme, {PipeEndRef{f.p1, End::kA}, PipeEndRef{f.p1, End::kB}}, Axis::kX, 1);
  CHECK(dimension_values(f.scheme, f.scheme.dimensions.at(d)) == std::vector<double>{1000});
  CHECK_FAILS_WITH(
      add_chain_dimension(f.scheme, {PipeEndRef{f.p1, End::kA}, PipeEndRef{f.p1, End::kB}}, Axis::kZ, 1),
      ErrorCode::kVariantNotAdmissible);
  CHECK_FAILS_WITH(add_chain_dimension(f.scheme, {PipeEndRef{f.p1, End::kA}}, Axis::kX, 1), ErrorCode::kTooFewOrigins);

  Scheme s;
  const ObjectId p = add_pipe(s, {0, 0, 0}, {1000, 0, 0});
  const auto halves = cut_pipe(s, p, 0.4);
  const ObjectId chain = add_chain_dimension(
      s, {PipeEndRef{halves[1], End::kB}, PipeEndRef{halves[0], End::kA}, PipeEndRef{halves[0], End::kB}}, Axis::kX, -1);
  const auto values = dimension_values(s, s.dimensions.at(chain));
  REQUIRE(values.size() == 2);
  CHECK(values[0] == doctest::Approx(400));
  CHECK(values[1] == doctest::Approx(600));
  CHECK_FAILS_WITH(add_chain_dimension(s, {PipeEndRef{halves[0], End::kB}, PipeEndRef{halves[1], End::kA}}, Axis::kX, 1),
                   ErrorCode::kVariantNotAdmissible);
  CHECK_FAILS_WITH(add_chain_dimension(s,
                                       {PipeEndRef{halves[0], End::kA}, PipeEndRef{halves[0], End::kB},
                                        PipeEndRef{halves[1], End::kA}},
                                       Axis::kX, 1),
                   ErrorCode::kInvalidArgument);
}

TEST_CASE("dimension origins on block attachment points") {
  F1 f = make_f1_bare();
  const ObjectId e = place_block(f.scheme, elbow_symbol(), {1000, 0, 0}, 1.0, 0, {f.p2});
  const BlockInstance& b = f.scheme.blocks.at(e);
  std::vector<DimOrigin> origins{PipeEndRef{f.p1, End::kA}};
  for (const auto& at : b.attachments) origins.push_back(BlockPointRef{e, at.slot});
  const auto variants = enumerate_dimension_variants(f.scheme, origins);
  CHECK(variants.size() == 4);
  const ObjectId d = add_chain_dimension(f.scheme, origins, Axis::kX, 1);
  const auto values = dimension_values(f.scheme, f.scheme.dimensions.at(d));
  double sum = 0;
  for (double v : values) sum += v;
  CHECK(sum == doctest::Approx(1000));
}

TEST_CASE("dimension values survive translation and projection change") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    Scheme s = random_scheme(seed, 25);
    if (s.dimensions.empty()) continue;
    std::map<ObjectId, std::vector<double>> before;
    for (const auto& [id, d] : s.dimensions) before[id] = dimension_values(s, d);
    IdSet all;
    for (const auto& [id, _] : s.pipes) all.insert(id);
    move_part(s, all, {123, -45, 678});
    set_projection(s, frontal_dimetric());
    move_scheme(s, {40, 40});
    for (const auto& [id, d] : s.dimensions) {
      const auto after = dimension_values(s, d);
      REQUIRE(after.size() == before[id].size());
      for (std::size_t i = 0; i < after.size(); ++i) CHECK(after[i] == doctest::Approx(before[id][i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("every admissible variant is accepted") {
  const F1 f = make_f1_bare();
  const std::vector<DimOrigin> origins{PipeEndRef{f.p1, End::kA}, PipeEndRef{f.p2, End::kB}};
  for (const auto& v : enumerate_dimension_variants(f.scheme, origins)) {
    Scheme s = f.scheme;
    const ObjectId d = add_chain_dimension(s, origins, v.axis, v.side);
    const ChainDimension& dim = s.dimensions.at(d);
    CHECK(dim.axis == v.axis);
    CHECK(dim.side == v.side);
    const auto again = enumerate_dimension_variants(s, dim.origins);
    CHECK(std::find(again.begin(), again.end(), v) != again.end());
  }
}

TEST_CASE("leader texts") {
  F1 f = make_f1();
  const ObjectId t = add_leader_text(f.scheme, "DN50", {PipePoint{f.p1, 0.5}, PipePoint{f.p2, 0.5}});
  CHECK(f.scheme.texts.at(t).main_leader == 0);
  change_main_leader(f.scheme, t, 1);
  CHECK(f.scheme.texts.at(t).main_leader == 1);
  CHECK_FAILS_WITH(change_main_leader(f.scheme, t, 1), ErrorCode::kAlreadyMain);
  CHECK_FAILS_WITH(change_main_leader(f.scheme, t, 5), ErrorCode::kInvalidArgument);

  change_leader_target(f.scheme, t, 0, BlockRef{f.valve});
  CHECK(distance(target_point(f.scheme, f.scheme.texts.at(t).leaders[0].target), {500, 0, 0}) <= 1e-9);
  CHECK_FAILS_WITH(change_leader_target(f.scheme, t, 0, BlockRef{4242}), ErrorCode::kUnknownId);

  const ObjectId single = add_leader_text(f.scheme, "x", {PipePoint{f.p1, 0.1}});
  CHECK_FAILS_WITH(change_main_leader(f.scheme, single, 0), ErrorCode::kOnlyOneLeader);
  CHECK_FAILS_WITH(add_leader_text(f.scheme, "x", {}), ErrorCode::kInvalidArgument);
  CHECK_FAILS_WITH(add_leader_text(f.scheme, "x", {PipePoint{f.p1, 1.5}}), ErrorCode::kBadParameter);

  // Default anchor: 10 mm up and right of the target's image.
  const Vec2 img = project({100, 0, 0}, f.scheme.settings.projection);
  const Vec2 anchor = f.scheme.texts.at(single).leaders[0].anchor;
  CHECK(anchor.x == doctest::Approx(img.x + 10));
  CHECK(anchor.y == doctest::Approx(img.y + 10));
}

TEST_CASE("height marks default to the point elevation") {
  Scheme s;
  const ObjectId p = add_pipe(s, {0, 0, 0}, {0, 0, 3000});
  const ObjectId h = add_height_mark(s, {p, 0.5});
  CHECK(s.height_marks.at(h).level == doctest::Approx(1.5));
  const ObjectId given = add_height_mark(s, {p, 0.0}, -0.35);
  CHECK(s.height_marks.at(given).level == doctest::Approx(-0.35));
  CHECK_FAILS_WITH(add_height_mark(s, {p, 2.0}), ErrorCode::kBadParameter);
  CHECK_FAILS_WITH(add_height_mark(s, {99, 0.5}), ErrorCode::kUnknownId);
}

TEST_CASE("flange designators number after the highest used number") {
  F1 f = make_f1();
  place_designator(f.scheme, f.p1, 2, {1, 2});
  place_designator(f.scheme, f.p2, 1, {5});
  CHECK(next_position_number(f.scheme) == 6);
  const ObjectId d = place_flange_designator(f.scheme, f.valve);
  CHECK(f.scheme.designators.at(d).positions == std::vector<int>{6, 7, 8, 9});
  CHECK(f.scheme.blocks.at(f.valve).designator == d);
  CHECK_FAILS_WITH(place_designator(f.scheme, f.valve), ErrorCode::kDesignatorConflict);

  Scheme empty;
  const ObjectId p = add_pipe(empty, {0, 0, 0}, {1000, 0, 0});
  const ObjectId v = place_block_on_pipe(empty, valve_symbol(), {p, 0.5}, 0);
  empty.settings.flange_slots = 5;
  CHECK(empty.designators.at(place_flange_designator(empty, v)).positions == std::vector<int>{1, 2, 3, 4, 5});
  CHECK_FAILS_WITH(place_flange_designator(empty, p, {3, 3, 4, 5, 6}), ErrorCode::kDuplicateNumber);
}

TEST_CASE("manual designator numbers") {
  F1 f = make_f1();
  CHECK_FAILS_WITH(place_flange_designator(f.scheme, f.valve, {3, 3, 4, 5}), ErrorCode::kDuplicateNumber);
  CHECK_FAILS_WITH(place_designator(f.scheme, f.p1, 2, {3}), ErrorCode::kWrongPositionCount);
  CHECK_FAILS_WITH(place_designator(f.scheme, f.p1, 1, {0}), ErrorCode::kInvalidArgument);
  CHECK_FAILS_WITH(place_designator(f.scheme, f.p1, 6), ErrorCode::kInvalidArgument);
  f.scheme.settings.numbering = NumberingMode::kManual;
  CHECK_FAILS_WITH(place_designator(f.scheme, f.p1), ErrorCode::kInvalidArgument);
  // Two elements may share a position number.
  place_designator(f.scheme, f.p1, 1, {12});
  place_designator(f.scheme, f.p2, 1, {12});
  CHECK(elements_sharing(f.scheme, 12) == IdSet{f.p1, f.p2});
}

TEST_CASE("automatic numbering is strictly monotone") {
  std::mt19937_64 rng(7);
  Scheme s;
  int last = 0;
  for (int i = 0; i < 100; ++i) {
    const ObjectId p = add_pipe(s, {0, 1000.0 * i, 0}, {1000, 1000.0 * i, 0});
    if (rng() % 4 == 0) s.spec[last + 1 + static_cast<int>(rng() % 3)].name = "row";
    int floor = last;
    for (const auto& [pos, _] : s.spec) floor = std::max(floor, pos);
    const int count = 1 + static_cast<int>(rng() % 5);
    const ObjectId d = place_designator(s, p, count);
    const auto& positions = s.designators.at(d).positions;
    CHECK(positions.front() > floor);
    for (std::size_t k = 1; k < positions.size(); ++k) CHECK(positions[k] == positions[k - 1] + 1);
    last = positions.back();
  }
}

TEST_CASE("catalog parsing") {
  const Catalog pipes = load_catalog(kData + "/fixtures/pipes.csv");
  CHECK(pipes.rows.size() == 3);
  CHECK(pipes.name == "pipes");
  REQUIRE(pipes.find("P-89x3.5"));
  CHECK(pipes.find("P-89x3.5")->dn == "80");
  CHECK(pipes.find("nope") == nullptr);

  const Catalog kit = load_catalog(kData + "/fixtures/flange_kit.csv");
  CHECK(kit.find("FL-50-16")->name == "Flange, welding neck");

  const Catalog reordered = catalog_from("name,unit,code,mass,pn,dn\nValve,pcs,V1,4,16,50\n");
  CHECK(reordered.rows[0].code == "V1");
  CHECK(reordered.rows[0].dn == "50");

  const auto missing = caught([] { catalog_from("code,name,dn,pn,unit\nA,b,1,2,m\n"); });
  REQUIRE(missing);
  CHECK(missing->code() == ErrorCode::kParseError);
  CHECK(std::string(missing->what()).find("mass") != std::string::npos);
  CHECK_FAILS_WITH(catalog_from("code,name,dn,pn,unit,mass\nA,x,,,m,\nA,y,,,m,\n"), ErrorCode::kDuplicateCode);
  CHECK_FAILS_WITH(catalog_from(""), ErrorCode::kParseError);
  CHECK_FAILS_WITH(load_catalog(kData + "/fixtures/absent.csv"), ErrorCode::kIoError);
}

TEST_CASE("flange kit wizard fills every slot at once") {
  const std::vector<Catalog> catalogs{load_catalog(kData + "/fixtures/pipes.csv"),
                                      load_catalog(kData + "/fixtures/flange_kit.csv")};
  const std::vector<std::string> codes{"FL-50-16", "ST-M16x90", "NT-M16", "WS-16", "GK-50-16"};
  F1 f = make_f1();
  f.scheme.settings.flange_slots = 5;
  const ObjectId d = place_flange_designator(f.scheme, f.valve);
  const auto rows = flange_kit_wizard(f.scheme, d, codes, catalogs);
  REQUIRE(rows.size() == 5);
  const auto& positions = f.scheme.designators.at(d).positions;
  for (std::size_t k = 0; k < 5; ++k) {
    const SpecRow& row = f.scheme.spec.at(positions[k]);
    CHECK(row.code == codes[k]);
    CHECK(row.extra.at("role") == kFlangeRoles[k]);
    CHECK(row.catalog_ref == "flange_kit");
  }
  CHECK(f.scheme.spec.at(positions[0]).type_brand == "DN50 PN16");

  F1 g = make_f1();
  g.scheme.settings.flange_slots = 5;
  const ObjectId dg = place_flange_designator(g.scheme, g.valve);
  auto bad = codes;
  bad[3] = "XX";
  CHECK_FAILS_WITH(flange_kit_wizard(g.scheme, dg, bad, catalogs), ErrorCode::kUnknownCatalogCode);
  CHECK(g.scheme.spec.empty());
  const ObjectId three = place_designator(g.scheme, g.p1, 3);
  CHECK_FAILS_WITH(flange_kit_wizard(g.scheme, three, {"A", "B", "C"}, catalogs), ErrorCode::kWrongPositionCount);
  CHECK_FAILS_WITH(flange_kit_wizard(g.scheme, dg, {"FL-50-16"}, catalogs), ErrorCode::kWrongPositionCount);
}

TEST_CASE("specification rows of an element") {
  F1 f = make_f1();
  CHECK_FAILS_WITH(spec_rows(f.scheme, f.p1), ErrorCode::kNoDesignator);
  place_designator(f.scheme, f.p1, 1, {3});
  place_designator(f.scheme, f.valve, 1, {6});
  const auto rows = spec_rows(f.scheme, f.valve);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].first == 6);

  SpecRow row;
  row.name = "Gate valve";
  row.code = "30s41nzh";
  row.quantity = 3;
  const auto warnings = write_spec_rows(f.scheme, f.valve, {{6, row}});
  CHECK(warnings.size() == 1);
  CHECK(f.scheme.spec.at(6).name == "Gate valve");
  CHECK(!f.scheme.spec.at(6).quantity);
  CHECK(position_quantity(f.scheme, 6) == doctest::Approx(1.0));

  CHECK(write_spec_rows(f.scheme, f.valve, {{6, row}}, SpecEditMode::kShared).empty());
  CHECK(position_quantity(f.scheme, 6) == doctest::Approx(3.0));
  CHECK_FAILS_WITH(write_spec_rows(f.scheme, f.valve, {{3, row}}), ErrorCode::kInvalidArgument);
  row.quantity = -1;
  CHECK_FAILS_WITH(write_spec_rows(f.scheme, f.valve, {{6, row}}, SpecEditMode::kShared), ErrorCode::kInvalidArgument);

  // Pipes count by length in meters.
  CHECK(position_quantity(f.scheme, 3) == doctest::Approx(1.0));
}

TEST_CASE("specified part") {
  F1 f = make_f1();
  CHECK(specified_part(f.scheme).specified.empty());
  CHECK(specified_part(f.scheme).unassigned.empty());
  place_designator(f.scheme, f.valve, 1, {6});
  f.scheme.spec[6].quantity = 2;
  CHECK(specified_part(f.scheme).specified == IdSet{f.valve});
  CHECK(specified_part(f.scheme).unassigned == IdSet{f.valve});
  f.scheme.spec[6].name = "Gate valve";
  CHECK(specified_part(f.scheme).unassigned.empty());
  for (std::uint64_t seed = 50; seed < 70; ++seed) {
    const Scheme s = random_scheme(seed, 30);
    const SpecifiedPart a = specified_part(s);
    for (ObjectId id : a.unassigned) CHECK(a.specified.count(id));
    const SpecifiedPart b = specified_part(s);
    CHECK(a.specified == b.specified);
    CHECK(a.unassigned == b.unassigned);
  }
}

TEST_CASE("specification export") {
  F1 f = make_f1();
  place_designator(f.scheme, f.p1, 1, {1});
  place_designator(f.scheme, f.valve, 1, {2});
  f.scheme.spec[2].name = "Valve, \"wedge\"";
  f.scheme.spec[2].unit = "pcs";
  std::ostringstream out;
  export_spec_csv(f.scheme, out);
  CHECK(out.str() ==
        "position,name,typeBrand,code,unit,quantity\n"
        "1,,,,,1\n"
        "2,\"Valve, \"\"wedge\"\"\",,,pcs,1\n");
}

TEST_CASE("pipe lengths") {
  const F1 f = make_f1();
  CHECK(pipe_length_total(f.scheme, {f.p1, f.p2}) == doctest::Approx(2000));
  CHECK(pipe_length_total(f.scheme, {}) == 0.0);
  CHECK_FAILS_WITH(pipe_length_total(f.scheme, {f.valve}), ErrorCode::kUnknownId);
  LengthAccumulator acc(f.scheme);
  CHECK(acc.add(f.p1) == doctest::Approx(1000));
  CHECK(acc.add(f.p1) == doctest::Approx(1000));
  CHECK(acc.add(f.p2) == doctest::Approx(2000));
  CHECK_FAILS_WITH(acc.add(4242), ErrorCode::kUnknownId);
}

TEST_CASE("pipe length is additive and rigid") {
  for (std::uint64_t seed = 400; seed < 430; ++seed) {
    Scheme s = random_scheme(seed, 30);
    IdSet left, right, all;
    bool flip = false;
    for (const auto& [id, _] : s.pipes) {
      (flip ? left : right).insert(id);
      all.insert(id);
      flip = !flip;
    }
    const double total = pipe_length_total(s, all);
    CHECK(total == doctest::Approx(pipe_length_total(s, left) + pipe_length_total(s, right)).epsilon(1e-12));
    if (s.pipes.empty()) continue;
    move_part(s, left, {10, 20, 30});
    CHECK(pipe_length_total(s, all) == doctest::Approx(total).epsilon(1e-12));
    const ObjectId seedp = s.pipes.begin()->first;
    if (!connections_of(s, seedp).empty()) move_branch(s, seedp, {-5, 0, 7});
    CHECK(pipe_length_total(s, all) == doctest::Approx(total).epsilon(1e-12));
  }
}

TEST_CASE("construction grid") {
  std::ifstream file(kData + "/fixtures/grid.txt");
  Scheme s;
  const ObjectId g = import_construction_grid(s, file);
  const auto& axes = s.grids.at(g).axes;
  REQUIRE(axes.size() == 4);
  int letters = 0;
  for (const auto& a : axes) letters += a.family == GridFamily::kLetters;
  CHECK(letters == 2);
  CHECK(grid_from("# comment\n\nA\t0\n1\t-2.5\n").axes.size() == 2);
  CHECK_FAILS_WITH(grid_from(""), ErrorCode::kParseError);
  const auto dup = caught([] { grid_from("A\t0\nB\t10\nA\t20\n"); });
  REQUIRE(dup);
  CHECK(dup->code() == ErrorCode::kParseError);
  CHECK(dup->line() == 3);
  CHECK_FAILS_WITH(grid_from("A 0\n"), ErrorCode::kParseError);
  CHECK_FAILS_WITH(grid_from("A\tfar\n"), ErrorCode::kParseError);
  CHECK_FAILS_WITH(grid_from("-A\t0\n"), ErrorCode::kParseError);
}
