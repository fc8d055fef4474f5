#include "axon/core.hpp"
#include "axon/render.hpp"
#include "doctest.h"
#include "support/check.hpp"
#include "support/fixture.hpp"
#include "support/oracles.hpp"

using namespace axon;
using namespace axon::testing;

TEST_CASE("add_pipe allocates fresh ids and rejects zero length") {
  Scheme s;
  const ObjectId p1 = add_pipe(s, {0, 0, 0}, {1000, 0, 0});
  CHECK(s.pipes.size() == 1);
  CHECK(s.connections.empty());
  const ObjectId p2 = add_pipe(s, {0, 0, 0}, {1000, 0, 0});
  CHECK(p1 != p2);
  CHECK_FAILS_WITH(add_pipe(s, {0, 0, 0}, {0, 0, 0}), ErrorCode::kZeroLengthPipe);
  CHECK_FAILS_WITH(add_pipe(s, {0, 0, 0}, {0, 0, 0.0005}), ErrorCode::kZeroLengthPipe);
  CHECK(s.pipes.size() == 2);
}

TEST_CASE("ids are never reused after deletion") {
  Scheme s;
  const ObjectId p1 = add_pipe(s, {0, 0, 0}, {1000, 0, 0});
  delete_closed_set(s, {p1});
  const ObjectId p2 = add_pipe(s, {0, 0, 0}, {1000, 0, 0});
  CHECK(p2 > p1);
}

TEST_CASE("fixture is consistent") {
  const F1 f = make_f1();
  CHECK(integrity_check(f.scheme).empty());
  CHECK(f.scheme.blocks.at(f.valve).attachments.size() == 1);
}

TEST_CASE("reference closure of P1 in the fixture") {
  const F1 f = make_f1();
  const IdSet expected = {f.p1, f.c12, f.valve, f.mark};
  CHECK(reference_closure(f.scheme, {f.p1}) == expected);
  CHECK(closure_oracle(f.scheme, {f.p1}) == expected);
  CHECK(reference_closure(f.scheme, {}).empty());
}

TEST_CASE("a dimension is a leaf of the reference graph") {
  F1 f = make_f1();
  ChainDimension d;
  d.id = f.scheme.allocate_id();
  d.origins = {PipeEndRef{f.p1, End::kA}, PipeEndRef{f.p2, End::kB}};
  d.axis = Axis::kX;
  f.scheme.dimensions[d.id] = d;
  CHECK(reference_closure(f.scheme, {d.id}) == IdSet{d.id});
}

TEST_CASE("closure rejects unknown ids") {
  const F1 f = make_f1();
  CHECK_FAILS_WITH(reference_closure(f.scheme, {4242}), ErrorCode::kUnknownId);
}

TEST_CASE("closure is idempotent and monotone on the fixture") {
  const F1 f = make_f1();
  const IdSet all = f.scheme.all_ids();
  for (ObjectId a : all) {
    const IdSet ca = reference_closure(f.scheme, {a});
    CHECK(reference_closure(f.scheme, ca) == ca);
    for (ObjectId b : all) {
      const IdSet cab = reference_closure(f.scheme, {a, b});
      for (ObjectId x : ca) CHECK(cab.count(x) == 1);
    }
  }
}

TEST_CASE("deleting a closed set leaves a consistent scheme") {
  const F1 f = make_f1();
  for (ObjectId id : f.scheme.all_ids()) {
    Scheme s = f.scheme;
    delete_closed_set(s, reference_closure(s, {id}));
    CHECK(integrity_check(s).empty());
  }
}

TEST_CASE("integrity check reports forced corruption") {
  SUBCASE("dangling pipe reference") {
    F1 f = make_f1_bare();
    f.scheme.pipes.erase(f.p2);
    const auto v = integrity_check(f.scheme);
    REQUIRE(!v.empty());
    CHECK(std::any_of(v.begin(), v.end(), [](const Violation& x) { return x.kind == ViolationKind::kDanglingRef; }));
  }
  SUBCASE("connection ends apart") {
    F1 f = make_f1_bare();
    f.scheme.pipes.at(f.p2).a = {1000, 0.002, 0};
    const auto v = integrity_check(f.scheme);
    REQUIRE(v.size() == 1);
    CHECK(v[0].kind == ViolationKind::kEndsNotCoincident);
  }
  SUBCASE("id beyond the counter") {
    F1 f = make_f1_bare();
    f.scheme.next_id = 2;
    const auto v = integrity_check(f.scheme);
    CHECK(std::any_of(v.begin(), v.end(), [](const Violation& x) { return x.kind == ViolationKind::kIdNotAllocated; }));
  }
}

TEST_CASE("connections are unordered pairs") {
  F1 f = make_f1_bare();
  CHECK_FAILS_WITH(connect_ends(f.scheme, {f.p2, End::kA}, {f.p1, End::kB}), ErrorCode::kAlreadyConnected);
  CHECK_FAILS_WITH(connect_ends(f.scheme, {f.p1, End::kB}, {f.p2, End::kA}), ErrorCode::kAlreadyConnected);
  const Connection& c = f.scheme.connections.at(f.c12);
  CHECK(c.first < c.second);
  CHECK(find_connection(f.scheme, {f.p2, End::kA}, {f.p1, End::kB}) == f.c12);
}

TEST_CASE("connect_ends preconditions") {
  Scheme s;
  const ObjectId a = add_pipe(s, {0, 0, 0}, {1000, 0, 0});
  const ObjectId b = add_pipe(s, {1000.002, 0, 0}, {2000, 0, 0});
  const ObjectId c = add_pipe(s, {1000.0005, 0, 0}, {1000, 500, 0});
  CHECK_FAILS_WITH(connect_ends(s, {a, End::kB}, {b, End::kA}), ErrorCode::kNotCoincident);
  CHECK_FAILS_WITH(connect_ends(s, {a, End::kA}, {a, End::kB}), ErrorCode::kSamePipe);
  CHECK_FAILS_WITH(connect_ends(s, {a, End::kB}, {99, End::kA}), ErrorCode::kUnknownId);
  CHECK_NOTHROW(connect_ends(s, {a, End::kB}, {c, End::kA}));
}

TEST_CASE("an end may take part in several connections") {
  Scheme s;
  const ObjectId a = add_pipe(s, {0, 0, 0}, {1000, 0, 0});
  const ObjectId b = add_pipe(s, {1000, 0, 0}, {2000, 0, 0});
  const ObjectId c = add_pipe(s, {1000, 0, 0}, {1000, 500, 0});
  connect_ends(s, {a, End::kB}, {b, End::kA});
  connect_ends(s, {a, End::kB}, {c, End::kA});
  connect_ends(s, {b, End::kA}, {c, End::kA});
  CHECK(connections_at(s, {a, End::kB}).size() == 2);
  CHECK(integrity_check(s).empty());
}

TEST_CASE("pick resolves pipe bodies and coincident ends") {
  const F1 f = make_f1_bare();
  const Projection iso = isometric();
  const Vec2 mid = project({500, 0, 0}, iso);
  const auto bodies = pick(f.scheme, mid, iso, {PickKind::kPipe});
  REQUIRE(bodies.size() == 1);
  CHECK(bodies[0].target.id == f.p1);
  CHECK(bodies[0].distance == doctest::Approx(0.0).epsilon(1e-9));

  const Vec2 near_b = project({1000, 0, 0}, iso) + Vec2{1.0, 1.0};
  const auto ends = pick(f.scheme, near_b, iso, {PickKind::kPipeEnd});
  REQUIRE(ends.size() == 2);
  CHECK(ends[0].target.id == f.p1);
  CHECK(ends[0].target.end == End::kB);
  CHECK(ends[1].target.id == f.p2);
  CHECK(ends[1].target.end == End::kA);

  CHECK(pick(f.scheme, mid, iso, {}).empty());
  CHECK(pick(f.scheme, mid + Vec2{0, 50}, iso, {PickKind::kPipe}).empty());
}

TEST_CASE("pick sees the block where it hides its pipe") {
  const F1 f = make_f1();
  const Projection iso = isometric();
  const Vec2 mid = project({500, 0, 0}, iso);
  CHECK(pick(f.scheme, mid, iso, {PickKind::kPipe}).empty());
  const auto hits = pick(f.scheme, mid, iso, {PickKind::kPipe, PickKind::kBlock});
  REQUIRE(!hits.empty());
  CHECK(hits[0].target.kind == PickKind::kBlock);
  CHECK(hits[0].target.id == f.valve);
}
