#include <algorithm>
#include <random>

#include "axon/annotate.hpp"
#include "axon/blocks.hpp"
#include "axon/core.hpp"
#include "axon/edit_ops.hpp"
#include "doctest.h"
#include "support/check.hpp"
#include "support/fixture.hpp"
#include "support/oracles.hpp"
#include "support/random_ops.hpp"

using namespace axon;
using namespace axon::testing;

namespace {

bool near(Point3 a, Point3 b, double tol = 1e-9) { return distance(a, b) <= tol; }

bool has_pipe(const Scheme& s, Point3 a, Point3 b) {
  return std::any_of(s.pipes.begin(), s.pipes.end(), [&](const auto& kv) {
    const Pipe& p = kv.second;
    return (near(p.a, a, 1e-6) && near(p.b, b, 1e-6)) || (near(p.a, b, 1e-6) && near(p.b, a, 1e-6));
  });
}

Point3 block_at(const Scheme& s, ObjectId b) { return s.blocks.at(b).position; }

}  // namespace

TEST_CASE("sketch line orthogonalizes each vertex") {
  Scheme s;
  const auto ids = sketch_line(s, {{0, 0, 0}, {998, 3, 0}, {998, -2, 995}}, 0.0);
  REQUIRE(ids.size() == 2);
  CHECK(near(s.pipes.at(ids[0]).a, {0, 0, 0}));
  CHECK(near(s.pipes.at(ids[0]).b, {998, 0, 0}));
  CHECK(near(s.pipes.at(ids[1]).b, {998, 0, 995}));
  CHECK(s.connections.size() == 1);
  CHECK(find_connection(s, {ids[0], End::kB}, {ids[1], End::kA}));
}

TEST_CASE("sketch line edge cases") {
  Scheme s;
  CHECK_FAILS_WITH(sketch_line(s, {{0, 0, 0}, {0, 0, 0}}, 0.0), ErrorCode::kDegenerateLine);
  CHECK_FAILS_WITH(sketch_line(s, {{0, 0, 0}}, 0.0), ErrorCode::kDegenerateLine);
  CHECK(s.pipes.empty());

  const auto collapsed = sketch_line(s, {{0, 0, 0}, {500, 0, 0}, {500, 0.0, 0.0}, {500, 700, 0}}, 0.0);
  CHECK(collapsed.size() == 2);

  Scheme t;
  const ObjectId existing = add_pipe(t, {500, 0, 0}, {500, 500, 0});
  const auto ids = sketch_line(t, {{0, 0, 0}, {500, 0, 0}}, 0.0);
  REQUIRE(ids.size() == 1);
  CHECK(connections_of(t, existing).empty());
  CHECK(t.connections.empty());
}

TEST_CASE("sketch line snaps before orthogonalizing") {
  Scheme s;
  add_pipe(s, {1000, 10, 0}, {1000, 10, 500});
  const auto ids = sketch_line(s, {{0, 0, 0}, {1004, 8, 0}}, 10.0);
  REQUIRE(ids.size() == 1);
  // The snapped vertex (1000,10,0) is then reduced to the dominant X axis.
  CHECK(near(s.pipes.at(ids[0]).b, {1000, 0, 0}));
}

TEST_CASE("insert elbow replaces the pipe by five") {
  F1 f = make_f1_bare();
  const auto ids = insert_elbow(f.scheme, f.p1, 0.4, 0.6, AxisDir::kPosY, 200);
  REQUIRE(ids.size() == 5);
  const Point3 expect[6] = {{0, 0, 0}, {400, 0, 0}, {400, 200, 0}, {600, 200, 0}, {600, 0, 0}, {1000, 0, 0}};
  for (int i = 0; i < 5; ++i) {
    CHECK(near(f.scheme.pipes.at(ids[i]).a, expect[i]));
    CHECK(near(f.scheme.pipes.at(ids[i]).b, expect[i + 1]));
  }
  CHECK(!f.scheme.pipes.count(f.p1));
  CHECK(f.scheme.pipes.size() == 6);
  CHECK(f.scheme.connections.size() == 5);
  CHECK(integrity_check(f.scheme).empty());
  // The old junction with P2 moved onto the last piece.
  CHECK(find_connection(f.scheme, {ids[4], End::kB}, {f.p2, End::kA}));
  CHECK(pipe_length_total(f.scheme, IdSet(ids.begin(), ids.end())) == doctest::Approx(1400));
}

TEST_CASE("insert elbow preconditions") {
  F1 f = make_f1_bare();
  const Scheme before = f.scheme;
  CHECK_FAILS_WITH(insert_elbow(f.scheme, f.p1, 0.4, 0.6, AxisDir::kPosX, 200), ErrorCode::kDirParallelToPipe);
  CHECK_FAILS_WITH(insert_elbow(f.scheme, f.p1, 0.6, 0.4, AxisDir::kPosY, 200), ErrorCode::kBadInterval);
  CHECK_FAILS_WITH(insert_elbow(f.scheme, f.p1, 0.0, 0.4, AxisDir::kPosY, 200), ErrorCode::kBadInterval);
  CHECK_FAILS_WITH(insert_elbow(f.scheme, f.p1, 0.4, 0.6, AxisDir::kPosY, 0), ErrorCode::kInvalidArgument);
  CHECK(f.scheme == before);
}

TEST_CASE("insert elbow re-homes annotations by parameter") {
  F1 f = make_f1();
  const ObjectId early = add_height_mark(f.scheme, {f.p1, 0.2});
  const ObjectId late = add_height_mark(f.scheme, {f.p1, 0.9});
  const auto ids = insert_elbow(f.scheme, f.p1, 0.4, 0.6, AxisDir::kPosZ, 300);
  CHECK(f.scheme.height_marks.at(early).at.pipe == ids[0]);
  CHECK(f.scheme.height_marks.at(early).at.t == doctest::Approx(0.5));
  CHECK(f.scheme.height_marks.at(late).at.pipe == ids[4]);
  CHECK(f.scheme.height_marks.at(late).at.t == doctest::Approx(0.75));
  // The valve at 500 mm now sits on the shifted middle piece.
  CHECK(f.scheme.blocks.at(f.valve).attachments[0].pipe == ids[2]);
  CHECK(near(block_at(f.scheme, f.valve), {500, 0, 300}));
  CHECK(integrity_check(f.scheme).empty());
}

TEST_CASE("extend a free end along the axis") {
  F1 f = make_f1_bare();
  extend_pipe(f.scheme, {f.p2, End::kB}, {1000, 1500, 0});
  CHECK(f.scheme.pipes.at(f.p2).length() == doctest::Approx(1500));
  CHECK_FAILS_WITH(extend_pipe(f.scheme, {f.p1, End::kB}, {1500, 0, 0}), ErrorCode::kEndConnected);
  CHECK_FAILS_WITH(extend_pipe(f.scheme, {f.p2, End::kB}, {1000.01, 1600, 0}), ErrorCode::kOffAxis);
  CHECK_FAILS_WITH(extend_pipe(f.scheme, {f.p2, End::kB}, {1000, 0, 0}), ErrorCode::kZeroLengthPipe);

  Scheme s;
  const ObjectId p = add_pipe(s, {0, 0, 0}, {1000, 0, 0});
  extend_pipe(s, {p, End::kB}, {1500, 0, 0});
  CHECK(s.pipes.at(p).length() == doctest::Approx(1500));
}

TEST_CASE("a junction block pins the end after a disconnect") {
  F1 f = make_f1_bare();
  place_block(f.scheme, elbow_symbol(), {1000, 0, 0}, 1.0, 0, {f.p2});
  disconnect_ends(f.scheme, f.c12);
  const Scheme before = f.scheme;
  CHECK_FAILS_WITH(extend_pipe(f.scheme, {f.p1, End::kB}, {1500, 0, 0}), ErrorCode::kEndConnected);
  CHECK(f.scheme == before);
  const auto ops = applicable_ops(f.scheme, PickTarget{PickKind::kPipeEnd, f.p1, End::kB});
  CHECK(std::none_of(ops.begin(), ops.end(), [](const auto& op) { return op.verb == "extend_pipe" && op.enabled; }));

  // A block holding only this pipe travels with the end.
  Scheme s;
  const ObjectId p = add_pipe(s, {0, 0, 0}, {1000, 0, 0});
  const ObjectId lone = place_block(s, elbow_symbol(), {1000, 0, 0}, 1.0, 0);
  extend_pipe(s, {p, End::kB}, {1500, 0, 0});
  CHECK(distance(s.blocks.at(lone).position, {1500, 0, 0}) <= 1e-9);
  CHECK(integrity_check(s).empty());
}

TEST_CASE("extend past the fixed end mirrors blocks") {
  Scheme s;
  const ObjectId p = add_pipe(s, {0, 0, 0}, {1000, 0, 0});
  const ObjectId v = place_block_on_pipe(s, valve_symbol(), {p, 0.3}, 0);
  const ObjectId h = add_height_mark(s, {p, 0.3});
  extend_pipe(s, {p, End::kB}, {-800, 0, 0});
  CHECK(near(block_at(s, v), {-300, 0, 0}, 1e-9));
  CHECK(near(point_at(s, s.height_marks.at(h).at), {-300, 0, 0}, 1e-9));
  CHECK(integrity_check(s).empty());
}

TEST_CASE("shortening slides blocks to the nearest end") {
  Scheme s;
  const ObjectId p = add_pipe(s, {0, 0, 0}, {1000, 0, 0});
  const ObjectId v = place_block_on_pipe(s, valve_symbol(true, true, 40), {p, 0.3}, 0);
  extend_pipe(s, {p, End::kB}, {250, 0, 0});
  const auto cuts = cuts_on_pipe(s, p);
  REQUIRE(cuts.size() == 1);
  CHECK(cuts[0].t1 * 250 == doctest::Approx(250));
  CHECK(cuts[0].t0 * 250 == doctest::Approx(210));
  CHECK(near(block_at(s, v), {230, 0, 0}, 1e-9));
}

TEST_CASE("move point for all pipes at the point") {
  F1 f = make_f1_bare();
  move_point(f.scheme, {f.p1, End::kB}, {1000, 0, 500}, MoveScope::kAllAtPoint);
  CHECK(near(f.scheme.pipes.at(f.p1).b, {1000, 0, 500}));
  CHECK(near(f.scheme.pipes.at(f.p2).a, {1000, 0, 500}));
  CHECK(f.scheme.connections.count(f.c12));
  CHECK(integrity_check(f.scheme).empty());
}

TEST_CASE("move point scope rules") {
  F1 f = make_f1_bare();
  CHECK_FAILS_WITH(move_point(f.scheme, {f.p1, End::kB}, {1000, 0, 500}, MoveScope::kOnlyThis),
                   ErrorCode::kScopeForbidden);
  Scheme s;
  const ObjectId a = add_pipe(s, {0, 0, 0}, {1000, 0, 0});
  const ObjectId b = add_pipe(s, {1000, 0, 0}, {1000, 800, 0});
  move_point(s, {a, End::kB}, {1000, 0, 300}, MoveScope::kOnlyThis);
  CHECK(near(s.pipes.at(a).b, {1000, 0, 300}));
  CHECK(near(s.pipes.at(b).a, {1000, 0, 0}));
  CHECK(integrity_check(s).empty());
  CHECK_FAILS_WITH(move_point(s, {a, End::kB}, {0, 0, 0}, MoveScope::kOnlyThis), ErrorCode::kZeroLengthPipe);
}

TEST_CASE("connect and disconnect are inverse") {
  F1 f = make_f1();
  const Scheme original = f.scheme;
  disconnect_ends(f.scheme, f.c12);
  const auto comps = components_oracle(f.scheme);
  CHECK(comps.size() == 2);
  CHECK(branch_of(f.scheme, f.p1) == IdSet{f.p1});
  const ObjectId c = connect_ends(f.scheme, {f.p1, End::kB}, {f.p2, End::kA});
  CHECK(c != f.c12);
  CHECK(canonical(f.scheme) == canonical(original));
  CHECK_FAILS_WITH(disconnect_ends(f.scheme, 777), ErrorCode::kUnknownId);

  F1 g = make_f1();
  disconnect_ends(g.scheme, g.c12);
  const Scheme split = g.scheme;
  const ObjectId c2 = connect_ends(g.scheme, {g.p1, End::kB}, {g.p2, End::kA});
  disconnect_ends(g.scheme, c2);
  g.scheme.next_id = split.next_id;
  CHECK(g.scheme == split);
}

TEST_CASE("cut pipe splits and connects") {
  F1 f = make_f1_bare();
  const auto halves = cut_pipe(f.scheme, f.p1, 0.4);
  REQUIRE(halves.size() == 2);
  CHECK(near(f.scheme.pipes.at(halves[0]).a, {0, 0, 0}));
  CHECK(near(f.scheme.pipes.at(halves[0]).b, {400, 0, 0}));
  CHECK(near(f.scheme.pipes.at(halves[1]).a, {400, 0, 0}));
  CHECK(near(f.scheme.pipes.at(halves[1]).b, {1000, 0, 0}));
  CHECK(find_connection(f.scheme, {halves[0], End::kB}, {halves[1], End::kA}));
  CHECK(f.scheme.connections.size() == 2);
  CHECK(integrity_check(f.scheme).empty());
  CHECK_FAILS_WITH(cut_pipe(f.scheme, halves[0], 0.0), ErrorCode::kBadParameter);
  CHECK_FAILS_WITH(cut_pipe(f.scheme, halves[0], 1.0), ErrorCode::kBadParameter);
}

TEST_CASE("cut pipe joins ends lying on the cut point") {
  Scheme s;
  const ObjectId p = add_pipe(s, {0, 0, 0}, {1000, 0, 0});
  const ObjectId third = add_pipe(s, {400, 0, 0}, {400, 600, 0});
  const auto halves = cut_pipe(s, p, 0.4);
  CHECK(s.connections.size() == 3);
  CHECK(find_connection(s, {halves[0], End::kB}, {third, End::kA}));
  CHECK(find_connection(s, {halves[1], End::kA}, {third, End::kA}));
  CHECK(integrity_check(s).empty());
}

TEST_CASE("cut pipe refuses block intervals") {
  F1 f = make_f1();
  CHECK_FAILS_WITH(cut_pipe(f.scheme, f.p1, 0.5), ErrorCode::kPointOccupied);
  CHECK_NOTHROW(cut_pipe(f.scheme, f.p1, 0.2));
}

TEST_CASE("cut then merge is identity up to renaming") {
  F1 f = make_f1();
  const ObjectId text = add_leader_text(f.scheme, "note", {PipePoint{f.p1, 0.8}, PipePoint{f.p2, 0.5}});
  const Scheme original = f.scheme;
  const auto halves = cut_pipe(f.scheme, f.p1, 0.4);
  const ObjectId merged = merge_pipes(f.scheme, halves[0], End::kB);
  CHECK(canonical(f.scheme) == canonical(original));
  CHECK(f.scheme.texts.at(text).leaders[0].target == LeaderTarget{PipePoint{merged, 0.8}});
  CHECK(integrity_check(f.scheme).empty());
}

TEST_CASE("merge preconditions") {
  SUBCASE("no continuation") {
    F1 f = make_f1_bare();
    CHECK_FAILS_WITH(merge_pipes(f.scheme, f.p1, End::kB), ErrorCode::kNoContinuation);
    CHECK_FAILS_WITH(merge_pipes(f.scheme, f.p1, End::kA), ErrorCode::kNoContinuation);
  }
  SUBCASE("dimension origin locks the junction") {
    F1 f = make_f1_bare();
    const auto halves = cut_pipe(f.scheme, f.p1, 0.4);
    add_chain_dimension(f.scheme, {PipeEndRef{halves[0], End::kA}, PipeEndRef{halves[0], End::kB}}, Axis::kX, 1);
    CHECK_FAILS_WITH(merge_pipes(f.scheme, halves[0], End::kB), ErrorCode::kJunctionLocked);
  }
  SUBCASE("side must be given when both sides continue") {
    Scheme s;
    const ObjectId p = add_pipe(s, {0, 0, 0}, {1000, 0, 0});
    const auto pieces = cut_pipe(s, p, 0.3);
    const auto more = cut_pipe(s, pieces[1], 0.5);
    CHECK_FAILS_WITH(merge_pipes(s, more[0]), ErrorCode::kAmbiguousSide);
    CHECK_NOTHROW(merge_pipes(s, more[0], End::kA));
  }
  SUBCASE("other pipes at the junction leave the branch") {
    Scheme s;
    const ObjectId p = add_pipe(s, {0, 0, 0}, {1000, 0, 0});
    const ObjectId side = add_pipe(s, {400, 0, 0}, {400, 500, 0});
    const auto halves = cut_pipe(s, p, 0.4);
    const ObjectId merged = merge_pipes(s, halves[0], End::kB);
    CHECK(connections_of(s, side).empty());
    CHECK(s.connections.empty());
    CHECK(s.pipes.count(merged));
  }
}

TEST_CASE("delete pipe cascade") {
  F1 f = make_f1();
  const DeleteResult r = delete_pipe(f.scheme, f.p1);
  CHECK(r.deleted == IdSet{f.p1, f.c12, f.valve, f.mark});
  CHECK(f.scheme.pipes.count(f.p2));
  CHECK(integrity_check(f.scheme).empty());
  CHECK_FAILS_WITH(delete_pipe(f.scheme, f.p1), ErrorCode::kUnknownId);
}

TEST_CASE("delete pipe drops starved dimensions and prunes texts") {
  F1 f = make_f1();
  const ObjectId dim = add_chain_dimension(f.scheme, {PipeEndRef{f.p1, End::kA}, PipeEndRef{f.p2, End::kB}}, Axis::kX, 1);
  const ObjectId text = add_leader_text(f.scheme, "T", {PipePoint{f.p1, 0.2}, PipePoint{f.p2, 0.5}});
  delete_pipe(f.scheme, f.p1);
  CHECK(!f.scheme.dimensions.count(dim));
  REQUIRE(f.scheme.texts.count(text));
  CHECK(f.scheme.texts.at(text).leaders.size() == 1);
  CHECK(integrity_check(f.scheme).empty());
}

TEST_CASE("delete pipe removes multi-attached blocks while delete part prunes them") {
  Scheme s;
  const ObjectId a = add_pipe(s, {0, 0, 0}, {1000, 0, 0});
  const ObjectId b = add_pipe(s, {1000, 0, 0}, {1000, 1000, 0});
  const ObjectId elbow = place_block(s, elbow_symbol(), {1000, 0, 0}, 1.0, 0, {b});
  REQUIRE(s.blocks.at(elbow).attachments.size() == 2);

  Scheme by_pipe = s;
  delete_pipe(by_pipe, a);
  CHECK(!by_pipe.blocks.count(elbow));

  Scheme by_part = s;
  const IdSet preview = preview_delete_part(by_part, {a});
  CHECK(!preview.count(elbow));
  delete_part(by_part, {a});
  REQUIRE(by_part.blocks.count(elbow));
  CHECK(by_part.blocks.at(elbow).attachments.size() == 1);
  CHECK(integrity_check(by_part).empty());
}

TEST_CASE("delete part closure") {
  F1 f = make_f1();
  CHECK(preview_delete_part(f.scheme, {f.p1}) == IdSet{f.p1, f.c12, f.valve, f.mark});
  const DeleteResult r = delete_part(f.scheme, {f.p1});
  CHECK(r.deleted == IdSet{f.p1, f.c12, f.valve, f.mark});
  CHECK(integrity_check(f.scheme).empty());
}

TEST_CASE("move part translates what the pipes position") {
  F1 f = make_f1();
  const MoveResult r = move_part(f.scheme, {f.p1, f.p2}, {0, 0, 100});
  CHECK(r.warnings.empty());
  CHECK(near(f.scheme.pipes.at(f.p1).a, {0, 0, 100}));
  CHECK(near(f.scheme.pipes.at(f.p2).b, {1000, 1000, 100}));
  CHECK(near(block_at(f.scheme, f.valve), {500, 0, 100}));
  CHECK(f.scheme.connections.count(f.c12));
  CHECK(integrity_check(f.scheme).empty());

  F1 g = make_f1();
  const MoveResult partial = move_part(g.scheme, {g.p1}, {0, 0, 100});
  CHECK(!g.scheme.connections.count(g.c12));
  CHECK(partial.warnings.size() == 1);
  CHECK(integrity_check(g.scheme).empty());

  F1 h = make_f1();
  const Scheme before = h.scheme;
  move_part(h.scheme, {h.p1}, {0, 0, 0});
  CHECK(h.scheme == before);
  CHECK_FAILS_WITH(move_part(h.scheme, {4242}, {0, 0, 1}), ErrorCode::kUnknownId);
}

TEST_CASE("move branch") {
  F1 f = make_f1();
  CHECK(preview_move_branch(f.scheme, f.p1) == IdSet{f.p1, f.p2});
  const Vec3 d1 = f.scheme.pipes.at(f.p1).direction();
  move_branch(f.scheme, f.p1, {0, 0, 100});
  CHECK(near(f.scheme.pipes.at(f.p2).a, {1000, 0, 100}));
  CHECK(near(f.scheme.pipes.at(f.p1).direction(), d1));
  CHECK(f.scheme.blocks.at(f.valve).attachments[0].pipe == f.p1);

  Scheme s;
  const ObjectId lone = add_pipe(s, {0, 0, 0}, {100, 0, 0});
  CHECK_FAILS_WITH(move_branch(s, lone, {0, 0, 1}), ErrorCode::kNoConnections);
}

TEST_CASE("replicate a valve along its pipe") {
  Scheme s;
  const ObjectId p = add_pipe(s, {0, 0, 0}, {1000, 0, 0});
  const ObjectId v = place_block_on_pipe(s, valve_symbol(), {p, 0.3}, 0);
  Scheme twice = s;
  const auto copies = replicate(twice, {v}, {200, 0, 0}, 2);
  REQUIRE(copies.size() == 2);
  CHECK(near(block_at(twice, *copies[0].begin()), {500, 0, 0}));
  CHECK(near(block_at(twice, *copies[1].begin()), {700, 0, 0}));
  CHECK(integrity_check(twice).empty());

  Scheme four = s;
  CHECK_FAILS_WITH(replicate(four, {v}, {200, 0, 0}, 4), ErrorCode::kDoesNotFit);
  CHECK(four == s);
  CHECK_FAILS_WITH(replicate(four, {v}, {0, 200, 0}, 1), ErrorCode::kOffPipe);
}

TEST_CASE("replicate requires a closed selection") {
  F1 f = make_f1();
  CHECK_FAILS_WITH(replicate(f.scheme, {f.p1}, {0, 0, 500}, 1), ErrorCode::kNotClosed);
  CHECK_FAILS_WITH(replicate(f.scheme, {f.p1, f.valve, f.mark}, {0, 0, 500}, 1), ErrorCode::kNotClosed);

  Scheme lone;
  const ObjectId q = add_pipe(lone, {0, 0, 0}, {1000, 0, 0});
  place_block_on_pipe(lone, valve_symbol(), {q, 0.5}, 0);
  add_height_mark(lone, {q, 0.25});
  const IdSet closed = lone.all_ids();
  Scheme many = lone;
  const auto copies = replicate(many, closed, {0, 0, 500}, 2);
  REQUIRE(copies.size() == 2);
  for (const auto& c : copies) {
    CHECK(c.size() == closed.size());
    for (ObjectId id : c) CHECK(!lone.contains(id));
  }
  CHECK(integrity_check(many).empty());

  // A single copy minus the original is the original shifted.
  Scheme shifted = lone;
  move_part(shifted, {q}, {0, 0, 500});
  Scheme copy = lone;
  replicate(copy, closed, {0, 0, 500}, 1);
  delete_part(copy, {q});
  CHECK(canonical(copy) == canonical(shifted));
}

TEST_CASE("set level shifts every z and every mark") {
  F1 f = make_f1();
  const ObjectId second = add_height_mark(f.scheme, {f.p2, 0.5}, 1.2);
  set_level(f.scheme, f.mark, 2.5);
  CHECK(f.scheme.height_marks.at(f.mark).level == doctest::Approx(2.5));
  CHECK(f.scheme.height_marks.at(second).level == doctest::Approx(3.7));
  CHECK(f.scheme.pipes.at(f.p1).a.z == doctest::Approx(2500));
  CHECK(f.scheme.pipes.at(f.p2).b.z == doctest::Approx(2500));
  CHECK(block_at(f.scheme, f.valve).z == doctest::Approx(2500));
  const Scheme before = f.scheme;
  set_level(f.scheme, f.mark, 2.5);
  CHECK(f.scheme == before);
  CHECK_FAILS_WITH(set_level(f.scheme, 4242, 1.0), ErrorCode::kUnknownId);
}

TEST_CASE("move scheme composes") {
  F1 f = make_f1();
  move_scheme(f.scheme, {100, 50});
  move_scheme(f.scheme, {-30, 5});
  CHECK(f.scheme.settings.placement_origin.x == doctest::Approx(70));
  CHECK(f.scheme.settings.placement_origin.y == doctest::Approx(55));
}

TEST_CASE("offsets never move model points") {
  F1 f = make_f1();
  const Scheme before = f.scheme;
  OffsetSpec o;
  o.anchor = {f.p1, 0.5};
  o.paper_shift = {20, 0};
  set_offset(f.scheme, o);
  CHECK(f.scheme.pipes == before.pipes);
  CHECK(f.scheme.blocks == before.blocks);
  OffsetSpec bad;
  bad.kind = OffsetKind::kLocal;
  bad.anchor = {f.p1, 0.5};
  bad.paper_shift = {20, 0};
  bad.scope_pipe = f.p2;
  bad.broken_pipes = {{f.p2, 0.5}};
  CHECK_FAILS_WITH(set_offset(f.scheme, bad), ErrorCode::kNotCrossing);
  OffsetSpec zero = o;
  zero.paper_shift = {0, 0};
  CHECK_FAILS_WITH(set_offset(f.scheme, zero), ErrorCode::kInvalidArgument);
  OffsetSpec gone = o;
  gone.anchor.pipe = 4242;
  CHECK_FAILS_WITH(set_offset(f.scheme, gone), ErrorCode::kUnknownId);
}

TEST_CASE("deleting a scope pipe moves the offset scope") {
  Scheme s;
  const ObjectId a = add_pipe(s, {0, 0, 0}, {1000, 0, 0});
  const ObjectId b = add_pipe(s, {1000, 0, 0}, {2000, 0, 0});
  const ObjectId c = add_pipe(s, {2000, 0, 0}, {2000, 800, 0});
  connect_ends(s, {a, End::kB}, {b, End::kA});
  connect_ends(s, {b, End::kB}, {c, End::kA});
  OffsetSpec o;
  o.kind = OffsetKind::kLocal;
  o.anchor = {a, 0.5};
  o.paper_shift = {0, 30};
  o.scope_pipe = c;
  const ObjectId id = set_offset(s, o);
  const DeleteResult r = delete_pipe(s, c);
  REQUIRE(s.offsets.count(id));
  CHECK(s.offsets.at(id).scope_pipe != c);
  CHECK(!r.warnings.empty());
  CHECK(integrity_check(s).empty());
  delete_pipe(s, a);
  CHECK(!s.offsets.count(id));
}

TEST_CASE("branch equals the union-find component") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const Scheme s = random_scheme(seed, 30);
    const auto comps = components_oracle(s);
    for (const auto& [id, _] : s.pipes) CHECK(branch_of(s, id) == component_of(comps, id));
  }
}

TEST_CASE("part and branch moves are rigid") {
  for (std::uint64_t seed = 100; seed < 130; ++seed) {
    Scheme s = random_scheme(seed, 30);
    if (s.pipes.empty()) continue;
    const ObjectId seedp = s.pipes.begin()->first;
    const IdSet branch = branch_of(s, seedp);
    std::vector<Point3> before;
    for (ObjectId p : branch) {
      before.push_back(s.pipes.at(p).a);
      before.push_back(s.pipes.at(p).b);
    }
    move_part(s, branch, {130, -70, 250});
    std::vector<Point3> after;
    for (ObjectId p : branch) {
      after.push_back(s.pipes.at(p).a);
      after.push_back(s.pipes.at(p).b);
    }
    for (std::size_t i = 0; i < before.size(); ++i) {
      for (std::size_t j = i + 1; j < before.size(); ++j) {
        CHECK(std::abs(distance(before[i], before[j]) - distance(after[i], after[j])) <= 1e-9);
      }
    }
    CHECK(integrity_check(s).empty());
  }
}

TEST_CASE("failed operations leave the scheme untouched") {
  F1 f = make_f1();
  const Scheme before = f.scheme;
  CHECK_THROWS_AS(cut_pipe(f.scheme, f.p1, 0.5), Error);
  CHECK_THROWS_AS(merge_pipes(f.scheme, f.p1), Error);
  CHECK_THROWS_AS(replicate(f.scheme, {f.valve}, {600, 0, 0}, 1), Error);
  CHECK_THROWS_AS(extend_pipe(f.scheme, {f.p1, End::kA}, {1000, 0, 0}), Error);
  CHECK(f.scheme == before);
}

TEST_CASE("applicable operations follow the preconditions") {
  const F1 f = make_f1();
  auto enabled = [&](PickTarget t, const std::string& verb) {
    for (const auto& op : applicable_ops(f.scheme, t)) {
      if (op.verb == verb) return op.enabled;
    }
    FAIL("verb not listed: " << verb);
    return false;
  };
  CHECK(enabled({PickKind::kPipeEnd, f.p2, End::kB}, "extend_pipe"));
  CHECK(!enabled({PickKind::kPipeEnd, f.p1, End::kB}, "extend_pipe"));
  CHECK(enabled({PickKind::kPipe, f.p1, End::kA}, "move_branch"));
  CHECK(!enabled({PickKind::kPipe, f.p1, End::kA}, "merge_pipes"));
  CHECK(enabled({PickKind::kBlock, f.valve, End::kA}, "replicate"));
  CHECK(!enabled({PickKind::kBlock, f.valve, End::kA}, "attach_pipe"));
}
