#include <fstream>
#include <sstream>

#include "axon/annotate.hpp"
#include "axon/blocks.hpp"
#include "axon/core.hpp"
#include "axon/edit_ops.hpp"
#include "axon/projection.hpp"
#include "axon/render.hpp"
#include "axon/session.hpp"
#include "doctest.h"
#include "support/check.hpp"
#include "support/fixture.hpp"
#include "support/random_ops.hpp"

using namespace axon;
using namespace axon::testing;

namespace {

const std::string kData = AXON_TEST_DATA;

std::vector<DrawPrimitive> bodies(const Drawable& d, ObjectId pipe) {
  std::vector<DrawPrimitive> out;
  for (const auto& item : d.items) {
    if (item.role == "body" && item.source == pipe) out.push_back(item);
  }
  return out;
}

int count_role(const Drawable& d, const std::string& role) {
  int n = 0;
  for (const auto& item : d.items) n += item.role == role;
  return n;
}

bool near2(Vec2 a, Vec2 b, double tol = 1e-9) { return distance(a, b) <= tol; }

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace

TEST_CASE("a valve splits its pipe image") {
  const F1 f = make_f1();
  const Drawable d = render(f.scheme);
  const auto p1 = bodies(d, f.p1);
  REQUIRE(p1.size() == 2);
  const Projection& iso = f.scheme.settings.projection;
  CHECK(near2(p1[0].points[0], project({0, 0, 0}, iso)));
  CHECK(near2(p1[0].points[1], project({450, 0, 0}, iso)));
  CHECK(near2(p1[1].points[0], project({550, 0, 0}, iso)));
  CHECK(near2(p1[1].points[1], project({1000, 0, 0}, iso)));
  CHECK(bodies(d, f.p2).size() == 1);
  for (const auto& item : d.items) {
    for (Vec2 p : item.points) CHECK((std::isfinite(p.x) && std::isfinite(p.y)));
  }
}

TEST_CASE("a crossing pipe without attachment stays visible") {
  F1 f = make_f1();
  const ObjectId cross = add_pipe(f.scheme, {500, -300, 0}, {500, 300, 0});
  const Drawable d = render(f.scheme);
  CHECK(bodies(d, cross).size() == 1);
}

TEST_CASE("rendered length equals image length minus cuts") {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    Scheme s = random_scheme(seed, 30);
    s.offsets.clear();
    const Projection proj = seed % 2 ? isometric() : frontal_dimetric();
    RenderSettings rs;
    rs.projection = proj;
    const Drawable d = render(s, rs);
    for (const auto& [id, p] : s.pipes) {
      double drawn = 0.0;
      for (const auto& item : bodies(d, id)) drawn += distance(item.points[0], item.points[1]);
      if (!p.visible) {
        CHECK(drawn == 0.0);
        continue;
      }
      const double image = distance(project(p.a, proj), project(p.b, proj));
      double hidden = 0.0;
      for (const auto& c : cuts_on_pipe(s, id)) hidden += (c.t1 - c.t0) * image;
      CHECK(std::abs(drawn - (image - hidden)) <= 1e-6);
    }
  }
}

TEST_CASE("hidden classes draw nothing and nothing else changes") {
  for (std::uint64_t seed = 20; seed <= 40; ++seed) {
    const Scheme s = random_scheme(seed, 30);
    const Drawable all = render(s);
    for (ObjectClass cls : kAllObjectClasses) {
      RenderSettings rs;
      rs.visibility[cls] = false;
      const Drawable without = render(s, rs);
      Drawable expected;
      for (const auto& item : all.items) {
        if (item.source_class != cls) expected.items.push_back(item);
      }
      CHECK(without == expected);
    }
  }
  F1 f = make_f1_bare();
  add_chain_dimension(f.scheme, {PipeEndRef{f.p1, End::kA}, PipeEndRef{f.p1, End::kB}}, Axis::kX, 1);
  set_visibility(f.scheme, ObjectClass::kDimension, false);
  for (const auto& item : render(f.scheme).items) CHECK(item.style != Style::kDimension);
}

TEST_CASE("axes glyph adds three arrows") {
  const F1 f = make_f1();
  RenderSettings rs;
  CHECK(count_role(render(f.scheme, rs), "arrow") == 0);
  rs.axes_glyph = true;
  const Drawable d = render(f.scheme, rs);
  CHECK(count_role(d, "arrow") == 3);
  CHECK(count_role(d, "head") == 6);
  const Scheme empty;
  CHECK(count_role(render(empty, rs), "arrow") == 3);
}

TEST_CASE("svg output is deterministic") {
  const F1 f = make_f1();
  const std::string a = emit_svg(render(f.scheme));
  const std::string b = emit_svg(render(make_f1().scheme));
  CHECK(a == b);
  CHECK(a.rfind("<?xml", 0) == 0);
  CHECK(a.find("</svg>") != std::string::npos);
  const std::string empty = emit_svg(render(Scheme{}));
  CHECK(empty.find("<svg") != std::string::npos);
  CHECK(empty.find("<line") == std::string::npos);
}

TEST_CASE("svg matches the reference drawing") {
  Session session;
  run_script_file(session, kData + "/fixtures/f1.axs");
  CHECK(emit_svg(render(session.scheme())) == slurp(kData + "/fixtures/f1.svg"));
}

TEST_CASE("svg numbers carry three decimals") {
  const std::string svg = emit_svg(render(make_f1().scheme));
  CHECK(svg.find("x1=\"0.000\"") != std::string::npos);
  CHECK(svg.find("viewBox=\"") != std::string::npos);
}

TEST_CASE("render settings are validated") {
  RenderSettings rs;
  rs.pipe_width = 0;
  CHECK_FAILS_WITH(validate_render_settings(rs), ErrorCode::kInvalidArgument);
  rs = {};
  rs.text_height = -1;
  CHECK_FAILS_WITH(render(Scheme{}, rs), ErrorCode::kInvalidArgument);
}

TEST_CASE("global offset shifts the far half-space") {
  F1 f = make_f1_bare();
  const ObjectId p3 = add_pipe(f.scheme, {2000, 0, 0}, {2000, 1000, 0});
  const Drawable base = render(f.scheme);
  OffsetSpec o;
  o.anchor = {f.p1, 0.5};
  o.paper_shift = {20, 0};
  set_offset(f.scheme, o);
  const Drawable shifted = render(f.scheme);
  const auto p2_before = bodies(base, f.p2);
  const auto p2_after = bodies(shifted, f.p2);
  REQUIRE(p2_after.size() == 1);
  CHECK(near2(p2_after[0].points[0], p2_before[0].points[0] + Vec2{20, 0}));
  CHECK(near2(p2_after[0].points[1], p2_before[0].points[1] + Vec2{20, 0}));
  CHECK(near2(bodies(shifted, p3)[0].points[0], bodies(base, p3)[0].points[0] + Vec2{20, 0}));
  bool a_half_fixed = false;
  for (const auto& item : bodies(shifted, f.p1)) a_half_fixed |= near2(item.points[0], {0, 0});
  CHECK(a_half_fixed);
  CHECK(count_role(shifted, "break") == 0);
}

TEST_CASE("local offset breaks a pipe and shifts only its scope") {
  F1 f = make_f1_bare();
  const ObjectId p3 = add_pipe(f.scheme, {2000, 0, 0}, {2000, 1000, 0});
  const Drawable base = render(f.scheme);
  OffsetSpec o;
  o.kind = OffsetKind::kLocal;
  o.anchor = {f.p1, 0.5};
  o.paper_shift = {0, 30};
  o.broken_pipes = {{f.p1, 0.5}};
  o.scope_pipe = f.p2;
  set_offset(f.scheme, o);
  const Drawable d = render(f.scheme);
  CHECK(count_role(d, "break") == 4);
  CHECK(near2(bodies(d, f.p2)[0].points[0], bodies(base, f.p2)[0].points[0] + Vec2{0, 30}));
  CHECK(bodies(d, p3) == bodies(base, p3));
  const auto p1 = bodies(d, f.p1);
  REQUIRE(p1.size() == 2);
  CHECK(near2(p1[0].points[0], {0, 0}));
  CHECK(near2(p1[1].points[1], project({1000, 0, 0}, f.scheme.settings.projection) + Vec2{0, 30}));
}

TEST_CASE("move scheme translates the whole drawing") {
  F1 f = make_f1();
  const Drawable before = render(f.scheme);
  move_scheme(f.scheme, {15, -5});
  const Drawable after = render(f.scheme);
  REQUIRE(before.items.size() == after.items.size());
  for (std::size_t i = 0; i < before.items.size(); ++i) {
    REQUIRE(before.items[i].points.size() == after.items[i].points.size());
    for (std::size_t k = 0; k < before.items[i].points.size(); ++k) {
      CHECK(near2(after.items[i].points[k], before.items[i].points[k] + Vec2{15, -5}));
    }
  }
}

TEST_CASE("projection can be overridden per render") {
  const F1 f = make_f1_bare();
  RenderSettings rs;
  rs.projection = frontal_dimetric();
  const auto p2 = bodies(render(f.scheme, rs), f.p2);
  CHECK(near2(p2[0].points[0], project({1000, 0, 0}, frontal_dimetric())));
  CHECK(near2(p2[0].points[1], project({1000, 1000, 0}, frontal_dimetric())));
}

TEST_CASE("preview shows the pending objects in construction style") {
  Scheme base;
  const ObjectId p = add_pipe(base, {0, 0, 0}, {1000, 0, 0});
  const ObjectId v = place_block_on_pipe(base, valve_symbol(), {p, 0.3}, 0);
  Scheme staged = base;
  const auto copies = replicate(staged, {v}, {200, 0, 0}, 2);
  IdSet pending;
  for (const auto& c : copies) pending.insert(c.begin(), c.end());
  const Drawable d = render_preview(base, staged, pending);
  IdSet previewed;
  for (const auto& item : d.items) {
    if (item.style == Style::kPreview) {
      CHECK(pending.count(item.source));
      previewed.insert(item.source);
    }
  }
  CHECK(previewed == pending);
  CHECK(render_preview(base, base, {}) == render(base));
  RenderSettings rs;
  rs.projection = frontal_dimetric();
  CHECK(render_preview(base, staged, pending, rs) != d);
}

TEST_CASE("pick ignores hidden classes") {
  F1 f = make_f1();
  const Projection& iso = f.scheme.settings.projection;
  const std::set<PickKind> any{PickKind::kPipe, PickKind::kBlock, PickKind::kHeightMark};
  CHECK(!pick(f.scheme, project({500, 0, 0}, iso), iso, any).empty());
  set_visibility(f.scheme, ObjectClass::kBlock, false);
  const auto hits = pick(f.scheme, project({500, 0, 0}, iso), iso, any);
  for (const auto& c : hits) CHECK(c.target.kind != PickKind::kBlock);
}
