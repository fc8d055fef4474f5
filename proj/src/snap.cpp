#include "axon/snap.hpp"

#include <limits>
#include <tuple>

#include "axon/error.hpp"

namespace axon {

Point3 snap(const Scheme& scheme, Point3 raw, double radius) {
  if (!(radius > 0.0)) fail(ErrorCode::kInvalidArgument, "snap radius must be positive");
  std::optional<std::tuple<double, ObjectId, int>> best;
  Point3 best_point = raw;
  auto consider = [&](Point3 p, ObjectId id, int sub) {
    const double d = distance(raw, p);
    if (d > radius) return;
    const auto key = std::make_tuple(d, id, sub);
    if (!best || key < *best) {
      best = key;
      best_point = p;
    }
  };
  for (const auto& [id, p] : scheme.pipes) {
    consider(p.a, id, 0);
    consider(p.b, id, 1);
  }
  for (const auto& [id, b] : scheme.blocks) {
    auto sym = scheme.symbols.find(b.symbol);
    if (sym == scheme.symbols.end()) continue;
    const int arity = attachment_arity(sym->second.attachment);
    for (int slot = 0; slot < arity; ++slot) consider(attachment_point(scheme, b, slot), id, slot);
  }
  return best_point;
}

}  // namespace axon
