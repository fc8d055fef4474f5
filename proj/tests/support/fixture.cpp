#include "support/fixture.hpp"

#include "axon/annotate.hpp"
#include "axon/blocks.hpp"
#include "axon/core.hpp"

namespace axon::testing {

F1 make_f1_bare() {
  F1 f;
  f.p1 = add_pipe(f.scheme, {0, 0, 0}, {1000, 0, 0});
  f.p2 = add_pipe(f.scheme, {1000, 0, 0}, {1000, 1000, 0});
  f.c12 = connect_ends(f.scheme, {f.p1, End::kB}, {f.p2, End::kA});
  return f;
}

F1 make_f1() {
  F1 f = make_f1_bare();
  f.valve = place_block_on_pipe(f.scheme, valve_symbol(), {f.p1, 0.5}, 0);
  f.mark = add_height_mark(f.scheme, {f.p1, 0.25});
  return f;
}

SymbolDef valve_symbol(bool symmetric_axis, bool symmetric_normal, double cut) {
  SymbolDef d;
  d.name = "valve";
  if (!symmetric_axis || !symmetric_normal) {
    d.name += symmetric_axis ? "_a" : "_x";
    d.name += symmetric_normal ? "n" : "x";
  }
  const double h = cut / 2;
  Primitive left{PrimitiveKind::kFilledPolyline, {{-h, -h / 2}, {0, 0}, {-h, h / 2}}};
  Primitive right{PrimitiveKind::kFilledPolyline, {{h, -h / 2}, {0, 0}, {h, h / 2}}};
  d.primitives = {left, right};
  if (!symmetric_axis) d.primitives.push_back({PrimitiveKind::kSegment, {{0, 0}, {0, h}}});
  if (!symmetric_normal) d.primitives.push_back({PrimitiveKind::kSegment, {{h, 0}, {h + 10, 0}}});
  d.attachment.kind = AttachmentKind::kAxial;
  d.attachment.cut_length = cut;
  d.symmetric_about_axis = symmetric_axis;
  d.symmetric_about_normal = symmetric_normal;
  return d;
}

SymbolDef elbow_symbol() { return builtin_library().symbols.at("elbow"); }
SymbolDef tee_symbol() { return builtin_library().symbols.at("tee"); }

}  // namespace axon::testing
